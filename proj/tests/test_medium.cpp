#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "parax/medium.hpp"

using namespace parax;

namespace {
Domain box(double r, double z_hi = 10.0) {
  Domain d;
  d.lo = Vec3(-r, -r, 0.0);
  d.hi = Vec3(r, r, z_hi);
  return d;
}
}  // namespace

TEST_CASE("index evaluation per kind") {
  const auto hom = MediumProfile::homogeneous(1.5, box(2));
  CHECK(hom.index_at(Vec3(0.3, -0.7, 1.0)) == 1.5);
  CHECK(hom.grad_index(Vec3(0.3, -0.7, 1.0)).norm() == 0.0);

  const auto lin = MediumProfile::linear(1.0, Vec3(0.01, 0, 0), box(2));
  CHECK(lin.index_at(Vec3(2.0, 0, 0)) == Catch::Approx(1.02).epsilon(1e-15));
  CHECK((lin.grad_index(Vec3(0.5, 0.5, 2.0)) - Vec3(0.01, 0, 0)).norm() == 0.0);

  const auto gr = MediumProfile::grin(1.5, 0.05, Vec2(0, 0), box(2));
  CHECK(gr.index_at(Vec3(1.0, 0, 0)) == Catch::Approx(1.49875).epsilon(1e-15));
}

TEST_CASE("analytic gradients match central differences of the index") {
  const auto gr = MediumProfile::grin(1.5, 0.05, Vec2(0.2, -0.1), box(2));
  const auto gd = MediumProfile::gaussian_defect(1.0, 0.05, Vec3(0.1, 0.2, 1.0),
                                                 0.7, box(2));
  const double h = 1e-5;
  for (const MediumProfile* m : {&gr, &gd}) {
    const Vec3 x(0.4, -0.3, 1.2);
    Vec3 fd;
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      fd[a] = (m->index_at(xp) - m->index_at(xm)) / (2 * h);
    }
    CHECK((fd - m->grad_index(x)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("gridded sampling of the grin profile reproduces values and gradients") {
  const double alpha = 0.05, n0 = 1.5, spacing = 0.05;
  const int n = 81;  // spans [-2, 2]
  std::vector<double> samples(std::size_t(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = -2.0 + i * spacing, y = -2.0 + j * spacing;
      samples[std::size_t(j) * n + i] = -0.5 * alpha * alpha * (x * x + y * y);
    }
  const auto grid = MediumProfile::gridded2d(n0, samples, n, n,
                                             Vec2(spacing, spacing),
                                             Vec2(-2.0, -2.0), 0.0, 10.0);
  const auto exact = MediumProfile::grin(n0, alpha, Vec2(0, 0), box(2));

  // nodes are reproduced exactly
  CHECK(grid.index_at(Vec3(-2.0 + 13 * spacing, -2.0 + 40 * spacing, 1.0)) ==
        n0 + samples[std::size_t(40) * n + 13]);

  for (const Vec3& x : {Vec3(0.33, -0.71, 2.0), Vec3(1.2, 0.9, 5.0)}) {
    CHECK(std::abs(grid.index_at(x) - exact.index_at(x)) <= 1e-4);
    CHECK((grid.grad_index(x) - exact.grad_index(x)).cwiseAbs().maxCoeff() <=
          1e-6);
  }
}

TEST_CASE("weakness bound is enforced and overridable") {
  CHECK_THROWS_AS(MediumProfile::linear(1.0, Vec3(0.2, 0, 0), box(2)),
                  ValidationError);
  const auto forced =
      MediumProfile::linear(1.0, Vec3(0.2, 0, 0), box(2), true);
  CHECK(forced.out_of_regime());
  const auto ok = MediumProfile::linear(1.0, Vec3(0.01, 0, 0), box(2));
  CHECK_FALSE(ok.out_of_regime());
  CHECK(ok.weakness_sup() == Catch::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("out-of-domain queries identify the violated bound") {
  const auto lin = MediumProfile::linear(1.0, Vec3(0.01, 0, 0), box(1));
  CHECK_THROWS_AS(lin.index_at(Vec3(2.0, 0, 0)), NumericDomainError);
  try {
    lin.index_at(Vec3(2.0, 0, 0));
  } catch (const NumericDomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("outside declared domain") != std::string::npos);
  }
}

TEST_CASE("adiabaticity report matches hand value for the linear profile") {
  const auto lin = MediumProfile::linear(1.0, Vec3(0.01, 0, 0), box(2));
  Domain region = box(2, 0.0);
  region.hi.z() = 0.0;
  const auto rep = lin.adiabaticity_report(100.0, region);
  // |grad n|/(k n) with n in [0.98, 1.02]
  CHECK(rep.max_ratio == Catch::Approx(1e-4).epsilon(0.03));
  CHECK(rep.mean_ratio > 0);
}

TEST_CASE("adiabaticity report for the grin profile on a transverse line") {
  const auto gr = MediumProfile::grin(1.5, 0.05, Vec2(0, 0), box(2));
  Domain region;
  region.lo = Vec3(-2, 0, 0);
  region.hi = Vec3(2, 0, 0);
  const auto rep = gr.adiabaticity_report(100.0, region);
  CHECK(rep.max_ratio == Catch::Approx(3.344e-5).epsilon(0.01));
  const auto hom = MediumProfile::homogeneous(1.0, box(2));
  CHECK(hom.adiabaticity_report(100.0, region).max_ratio == 0.0);
}

TEST_CASE("gridded container round trip") {
  const int nx = 12, ny = 9;
  std::vector<double> samples(std::size_t(nx) * ny);
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = 0.01 * std::sin(0.37 * double(i));
  const auto grid = MediumProfile::gridded2d(1.25, samples, nx, ny,
                                             Vec2(0.1, 0.2), Vec2(-0.55, -0.8),
                                             0.0, 3.0);
  const std::string path =
      (std::filesystem::temp_directory_path() / "parax_zeta_roundtrip.pxc")
          .string();
  write_container(path, grid.to_container());
  const auto back = MediumProfile::from_container(path);
  CHECK(back.n0() == 1.25);
  CHECK(back.kind() == MediumKind::gridded2d);
  CHECK(back.domain().hi.z() == 3.0);
  const Vec3 probe(-0.13, 0.41, 1.0);
  CHECK(back.index_at(probe) == grid.index_at(probe));
  std::remove(path.c_str());
}
