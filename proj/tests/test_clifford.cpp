#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "parax/clifford.hpp"
#include "parax/foldy_wouthuysen.hpp"

using namespace parax;

TEST_CASE("matrix set matches the block definition") {
  const DiracMatrixSet s = build_matrices(false);
  Mat4 mz = Mat4::Zero();
  mz(0, 0) = 1;
  mz(1, 1) = 1;
  mz(2, 2) = -1;
  mz(3, 3) = -1;
  CHECK((s.m_z - mz).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.m_x * s.m_y - iu * s.m_z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.m_y * s.m_z - iu * s.m_x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.m_z * s.m_x - iu * s.m_y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conjugate set negates m_y and flips the cyclic orientation") {
  const DiracMatrixSet s = build_matrices(false);
  const DiracMatrixSet c = build_matrices(true);
  CHECK((c.m_y + s.m_y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.m_x - s.m_x).cwiseAbs().maxCoeff() == 0.0);

  const CliffordReport rs = verify_clifford(s);
  const CliffordReport rc = verify_clifford(c);
  CHECK(rs.max_residual() == 0.0);
  CHECK(rc.max_residual() == 0.0);
  CHECK(rs.orientation == +1);
  CHECK(rc.orientation == -1);
}

TEST_CASE("a corrupted set is detected") {
  DiracMatrixSet s = build_matrices(false);
  s.m_x(0, 2) += 1e-3;
  CHECK(verify_clifford(s).max_residual() >= 1e-3);
}

TEST_CASE("spinor assembly reproduces the circular and longitudinal channels") {
  // F = (1, i, 0): pure component 1
  Spinor4 a = assemble_spinor(Vec3c(1, iu, 0), Vec3c::Zero(), 1.0, 1.0);
  CHECK(a(0) == cplx(-2.0, 0.0));
  CHECK(std::abs(a(1)) == 0.0);
  CHECK(std::abs(a(2)) == 0.0);
  CHECK(std::abs(a(3)) == 0.0);

  // F = (1, -i, 0): pure component 4
  Spinor4 b = assemble_spinor(Vec3c(1, -iu, 0), Vec3c::Zero(), 1.0, 1.0);
  CHECK(std::abs(b(0)) == 0.0);
  CHECK(b(3) == cplx(2.0, 0.0));

  // F = (0, 0, 1): the longitudinal channel feeds components 2 and 3
  Spinor4 c = assemble_spinor(Vec3c(0, 0, 1), Vec3c::Zero(), 1.0, 1.0);
  CHECK(c(0) == cplx(0.0, 0.0));
  CHECK(c(1) == cplx(1.0, 0.0));
  CHECK(c(2) == cplx(1.0, 0.0));
  CHECK(c(3) == cplx(0.0, 0.0));
}

TEST_CASE("spinor assembly is linear in the fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto rv = [&] { return Vec3c(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))); };
  for (int t = 0; t < 20; ++t) {
    const Vec3c e1 = rv(), b1 = rv(), e2 = rv(), b2 = rv();
    const double n = 1.3, c = 0.7;
    const Spinor4 lhs = assemble_spinor(e1 + e2, b1 + b2, n, c);
    const Spinor4 rhs = assemble_spinor(e1, b1, n, c) + assemble_spinor(e2, b2, n, c);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("non-finite spinor input is rejected") {
  Vec3c bad(std::nan(""), 0, 0);
  CHECK_THROWS_AS(assemble_spinor(bad, Vec3c::Zero(), 1.0, 1.0),
                  NumericDomainError);
  CHECK_THROWS_AS(assemble_spinor(Vec3c::Zero(), Vec3c::Zero(), -1.0, 1.0),
                  NumericDomainError);
}

TEST_CASE("hamiltonian at p_perp = 0 is -n beta and both odd forms agree") {
  const DiracMatrixSet s = build_matrices(false);
  const Mat4 h0 = hamiltonian_matrix({1.0, 0.0, Vec2(0, 0)}, s);
  CHECK((h0 + s.m_z).cwiseAbs().maxCoeff() == 0.0);

  const Vec2 p(0.2, 0.1);
  const Mat4 odd1 = s.m_z * s.m_perp_dot(p);
  const Mat4 odd2 = hamiltonian_odd_alt(p, s);
  CHECK((odd1 - odd2).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("hamiltonian is beta-pseudo-Hermitian with an anticommuting odd part") {
  const DiracMatrixSet s = build_matrices(false);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double n0 = 1.0 + 0.5 * std::abs(u(rng));
    HamiltonianSymbol sym{n0, 0.08 * u(rng), 0.4 * Vec2(u(rng), u(rng))};
    const Mat4 h = hamiltonian_matrix(sym, s);
    CHECK((s.m_z * h.adjoint() * s.m_z - h).cwiseAbs().maxCoeff() <= 1e-13);
    const Mat4 odd = s.m_z * s.m_perp_dot(sym.p_perp);
    CHECK((s.m_z * odd + odd * s.m_z).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("homogeneous spectrum is {-E, -E, +E, +E}") {
  const DiracMatrixSet s = build_matrices(false);
  const Vec2 p(0.3, -0.2);
  const double n0 = 1.4;
  const Mat4 h = hamiltonian_matrix({n0, 0.0, p}, s);
  const double e = fw_energy(p, n0);
  Eigen::ComplexEigenSolver<Mat4> es(h, false);
  Eigen::Vector4d ev = es.eigenvalues().real();
  std::sort(ev.data(), ev.data() + 4);
  CHECK(std::abs(ev[0] + e) <= 1e-12);
  CHECK(std::abs(ev[1] + e) <= 1e-12);
  CHECK(std::abs(ev[2] - e) <= 1e-12);
  CHECK(std::abs(ev[3] - e) <= 1e-12);
  CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hamiltonian rejects momenta at or above the local index") {
  const DiracMatrixSet s = build_matrices(false);
  CHECK_THROWS_AS(hamiltonian_matrix({1.0, 0.0, Vec2(1.0, 0.0)}, s),
                  NumericDomainError);
}

TEST_CASE("plane wave along z, sigma = +1") {
  const double n = 1.5;
  const EigencheckResult r = plane_wave_eigencheck(Vec3(0, 0, 1), +1, n);
  CHECK(r.status == EigencheckStatus::ok);
  CHECK(r.residual <= 1e-14);
  CHECK(std::abs(r.spinor(0) - cplx(-4.0 * n, 0.0)) <= 1e-12);
  CHECK(std::abs(r.spinor(1)) <= 1e-14);
  CHECK(std::abs(r.spinor(2)) <= 1e-14);
  CHECK(std::abs(r.spinor(3)) <= 1e-14);
}

TEST_CASE("plane wave along z, sigma = -1 needs the conjugate representation") {
  const EigencheckResult r = plane_wave_eigencheck(Vec3(0, 0, 1), -1, 1.0);
  CHECK(r.status == EigencheckStatus::conjugate_representation_required);
}

TEST_CASE("tilted plane wave stays in the forward eigenspace") {
  const double theta = 0.01;
  const Vec3 d(std::sin(theta), 0.0, std::cos(theta));
  const double n = 1.0;
  const EigencheckResult r = plane_wave_eigencheck(d, +1, n);
  CHECK(r.status == EigencheckStatus::ok);
  CHECK(r.residual <= 1e-12);

  // cross-check against a numerical diagonalization of M . p
  const DiracMatrixSet s = build_matrices(false);
  const Vec3 p = n * d;
  const Mat4 mdotp = s.m_x * p.x() + s.m_y * p.y() + s.m_z * p.z();
  Eigen::ComplexEigenSolver<Mat4> es(mdotp, true);
  // projector onto the eigenvalue +n subspace
  Mat4 proj = Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    if (std::abs(es.eigenvalues()(i).real() - n) < 1e-8) {
      const Vec4c v = es.eigenvectors().col(i).normalized();
      proj += v * v.adjoint();
    }
  const Vec4c psi = r.spinor.normalized();
  CHECK((psi - proj * psi).norm() <= 1e-10);
}
