// Acceptance suite: one pass/fail line per criterion, each at its pinned
// tolerance. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "parax/clifford.hpp"
#include "parax/config.hpp"
#include "parax/foldy_wouthuysen.hpp"
#include "parax/medium.hpp"
#include "parax/ray_transport.hpp"
#include "parax/scenario.hpp"
#include "parax/wave_oracle.hpp"

using namespace parax;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Outcome> g_results;

template <typename Fn>
void criterion(int id, const std::string& name, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{id, name, false, "", 0.0};
  try {
    o = body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  o.id = id;
  o.name = name;
  o.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] %2d. %s: %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", id,
              name.c_str(), o.detail.c_str(), o.seconds);
  std::fflush(stdout);
  g_results.push_back(o);
}

ScenarioConfig load_scenario(const std::string& name) {
  return parse_config(std::string(PARAX_SCENARIO_DIR) + "/" + name);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

int main() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  criterion(1, "algebra suite", [&](Outcome o) {
    const DiracMatrixSet s = build_matrices(false);
    const DiracMatrixSet c = build_matrices(true);
    const double alg = std::max(verify_clifford(s).max_residual(),
                                verify_clifford(c).max_residual());
    double ph = 0;
    for (int t = 0; t < 1000; ++t) {
      const double n0 = 1.0 + unit(rng);
      const double r = 0.9 * n0 * std::sqrt(unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      const HamiltonianSymbol sym{n0, 0.1 * n0 * (2 * unit(rng) - 1),
                                  Vec2(r * std::cos(a), r * std::sin(a))};
      const Mat4 h = hamiltonian_matrix(sym, s);
      ph = std::max(ph, (s.m_z * h.adjoint() * s.m_z - h).cwiseAbs().maxCoeff());
    }
    o.pass = (alg == 0.0) && (ph <= 1e-13);
    o.detail = "clifford residual " + fmt(alg) +
               " (tol 0), pseudo-hermiticity " + fmt(ph) + " (tol 1e-13)";
    return o;
  });

  criterion(2, "fw diagonalization", [&](Outcome o) {
    const DiracMatrixSet s = build_matrices(false);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
      const double n0 = 1.0 + unit(rng);
      const double r = 0.9 * n0 * std::sqrt(unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      const Vec2 p(r * std::cos(a), r * std::sin(a));
      const FwTransform u = fw_matrix(p, n0, s);
      const Mat4 h0 = hamiltonian_matrix({n0, 0.0, p}, s);
      const Mat4 d = u.inverse * h0 * u.matrix + u.energy * s.m_z;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if ((i < 2) != (j < 2)) worst = std::max(worst, std::abs(d(i, j)));
    }
    o.pass = worst <= 1e-12;
    o.detail =
        "off-diagonal blocks over 1000 draws: " + fmt(worst) + " (tol 1e-12)";
    return o;
  });

  criterion(3, "connection oracle", [&](Outcome o) {
    const DiracMatrixSet s = build_matrices(false);
    const double h = 1e-5;
    double fd_worst = 0;
    for (const Vec2& p :
         {Vec2(0.1, 0.05), Vec2(-0.2, 0.15), Vec2(0.3, -0.1), Vec2(0.01, 0.02)}) {
      const FwTransform u0 = fw_matrix(p, 1.0, s);
      const ConnectionMatrices conn = berry_connection_exact(p, 1.0, s);
      for (int j = 0; j < 2; ++j) {
        Vec2 pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        const Mat4 fd = iu * u0.inverse *
                        ((fw_matrix(pp, 1.0, s).matrix -
                          fw_matrix(pm, 1.0, s).matrix) /
                         (2.0 * h));
        fd_worst = std::max(fd_worst, (fd - conn.a[j]).cwiseAbs().maxCoeff());
      }
    }
    double par_worst = 0;
    const Vec2 p(0.05, 0.0);
    const ConnectionMatrices ex = berry_connection_exact(p, 1.0, s);
    const ConnectionMatrices par = berry_connection_paraxial(p, 1.0, s);
    for (int j = 0; j < 2; ++j)
      par_worst = std::max(par_worst,
                           (ex.a[j] - par.a[j]).cwiseAbs().maxCoeff() /
                               ex.a[j].cwiseAbs().maxCoeff());
    o.pass = fd_worst <= 1e-8 && par_worst <= 5e-3;
    o.detail = "fd residual " + fmt(fd_worst) + " (tol 1e-8), paraxial rel " +
               fmt(par_worst) + " (tol 5e-3)";
    return o;
  });

  criterion(4, "curvature identity and commutator scaling", [&](Outcome o) {
    double curl_worst = 0;
    const double h = 1e-5;
    for (const Vec3& p : {Vec3(0.1, 0.2, 1.0), Vec3(-0.15, 0.07, 0.9),
                          Vec3(0.02, -0.3, 1.2)}) {
      Vec3 curl;
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        Vec3 pb1 = p, pb0 = p, pc1 = p, pc0 = p;
        pb1[b] += h;
        pb0[b] -= h;
        pc1[c] += h;
        pc0[c] -= h;
        curl[a] = (projected_connection(pb1, 1)[c] -
                   projected_connection(pb0, 1)[c]) /
                      (2 * h) -
                  (projected_connection(pc1, 1)[b] -
                   projected_connection(pc0, 1)[b]) /
                      (2 * h);
      }
      curl_worst =
          std::max(curl_worst, (curl - berry_curvature(p)).cwiseAbs().maxCoeff());
    }
    const auto gauss = [](const Vec3& p) {
      return std::exp(-(p - Vec3(0, 0, 1)).squaredNorm() / (2.0 * 0.08 * 0.08));
    };
    CommutatorGrid coarse{Vec3(-0.2, -0.2, 0.8), Vec3(0.2, 0.2, 1.2), 41};
    CommutatorGrid fine = coarse;
    fine.n = 81;
    const double rc = position_commutator_check(1, coarse, gauss).max_residual;
    const double rf = position_commutator_check(1, fine, gauss).max_residual;
    const double ratio = rc / rf;
    o.pass = curl_worst <= 1e-8 && ratio >= 3.0 && ratio <= 5.0;
    o.detail = "curl residual " + fmt(curl_worst) +
               " (tol 1e-8), h-halving ratio " + fmt(ratio) + " (target 4)";
    return o;
  });

  criterion(5, "ray tracer", [&](Outcome o) {
    Domain dom;
    dom.lo = Vec3(-1, -1, 0);
    dom.hi = Vec3(1, 1, 11);
    const auto med = MediumProfile::linear(1.0, Vec3(0.01, 0, 0), dom);
    StepControl ctrl;
    ctrl.dz = 0.01;
    ctrl.sample_stride = 1 << 20;
    const Trajectory t = trace_ray(
        med, launch_ray(med, Vec3::Zero(), Vec2::Zero(), 0), 100.0, 10.0, ctrl);
    const double exact = (std::cosh(0.1) - 1.0) * 100.0;
    const double err = std::abs(t.samples.back().state.r.x() - exact);

    Domain dom9;
    dom9.lo = Vec3(-1.11, -1.11, 0);
    dom9.hi = Vec3(1.11, 1.11, 4.5);
    const auto strong = MediumProfile::linear(1.0, Vec3(0.09, 0, 0), dom9);
    const auto err_at = [&](double dz) {
      StepControl c;
      c.dz = dz;
      c.sample_stride = 1 << 20;
      const Trajectory tt = trace_ray(
          strong, launch_ray(strong, Vec3::Zero(), Vec2::Zero(), 0), 100.0, 4.0,
          c);
      return std::abs(tt.samples.back().state.r.x() -
                      (std::cosh(0.09 * 4.0) - 1.0) / 0.09);
    };
    const double order = std::log2(err_at(0.5) / err_at(0.25));
    o.pass = err <= 1e-8 && order >= 3.9;
    o.detail = "closed-form error " + fmt(err) + " (tol 1e-8), rk4 order " +
               fmt(order) + " (min 3.9)";
    return o;
  });

  criterion(6, "spin-hall quadrature", [&](Outcome o) {
    Trajectory path;
    const int n = 4097;
    const double xmax = 0.1;
    for (int i = 0; i < n; ++i) {
      const double px = xmax * double(i) / double(n - 1);
      TrajectorySample s;
      s.z = double(i);
      s.state.p = Vec3(px, 0.0, std::sqrt(1.0 - px * px));
      path.samples.push_back(s);
    }
    const double k = 100.0;
    const Vec3 defl = spin_hall_deflection(path, k, +1);
    const double exact = (xmax / (2.0 * (1.0 - xmax * xmax)) +
                          0.25 * std::log((1.0 + xmax) / (1.0 - xmax))) /
                         (2.0 * k);
    const double rel = std::abs(defl.y() / exact - 1.0);
    const Vec3 neg = spin_hall_deflection(path, k, -1);
    const bool antisym = (defl + neg).norm() == 0.0;
    o.pass = rel <= 1e-6 && antisym;
    o.detail = "deflection " + fmt(defl.y()) + " vs " + fmt(exact) + ", rel " +
               fmt(rel) + " (tol 1e-6), antisymmetry exact: " +
               (antisym ? "yes" : "no");
    return o;
  });

  criterion(7, "rytov quadrature", [&](Outcome o) {
    Trajectory loop;
    const int n = 4096;
    const double theta = 0.05;
    for (int i = 0; i <= n; ++i) {
      const double phi = 2.0 * std::numbers::pi * double(i) / double(n);
      TrajectorySample s;
      s.z = double(i);
      s.state.p = Vec3(std::sin(theta) * std::cos(phi),
                       std::sin(theta) * std::sin(phi), std::cos(theta));
      loop.samples.push_back(s);
    }
    const double expected =
        0.25 * std::tan(theta) * std::tan(theta) * 2.0 * std::numbers::pi;
    const double got = berry_phase(loop, +1);
    const double err = std::abs(got - expected);
    o.pass = err <= 1e-6;
    o.detail = "cone loop phase " + fmt(got) + " vs " + fmt(expected) +
               ", error " + fmt(err) + " (tol 1e-6)";
    return o;
  });

  criterion(8, "wave-oracle conservation", [&](Outcome o) {
    ScenarioConfig cfg = load_scenario("grin_helix.cfg");
    const MediumProfile med = make_medium(cfg);
    const GridGeometry geom = make_grid(cfg);
    FieldGrid f = init_gaussian_beam(make_beam(cfg, +1), geom, cfg.medium_n0,
                                     cfg.k);
    SplitStepPropagator prop(med, geom, cfg.k, cfg.bpm_dz, false);
    const double n0norm = f.beta_norm();
    for (int i = 0; i < 1000; ++i) prop.step(f);
    const double drift = std::abs(f.beta_norm() / n0norm - 1.0);

    const DiracMatrixSet s = build_matrices(false);
    const DiracMatrixSet c = build_matrices(true);
    double kin_worst = 0;
    for (int t = 0; t < 1000; ++t) {
      const double r = 0.9 * std::sqrt(unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      const Vec2 p(r * std::cos(a), r * std::sin(a));
      const DiracMatrixSet& set = (t % 2) ? c : s;
      const Mat4 prop_m = kinetic_propagator(p, 0.01, 150.0, 1.0, set, false);
      const Mat4 kin = -set.m_z + set.m_z * set.m_perp_dot(p);
      const Mat4 oracle = (-iu * 150.0 * 0.01 * kin).exp();
      kin_worst = std::max(kin_worst, (prop_m - oracle).cwiseAbs().maxCoeff());
    }
    o.pass = drift <= 1e-6 && kin_worst <= 1e-12;
    o.detail = "beta-norm drift over 1000 steps " + fmt(drift) +
               " (tol 1e-6), kinetic vs expm " + fmt(kin_worst) +
               " (tol 1e-12)";
    return o;
  });

  criterion(9, "spin-hall cross-validation", [&](Outcome o) {
    const ScenarioConfig cfg = load_scenario("linear_gradient.cfg");
    const TraceResult tr = run_trace(cfg);
    const double pred = tr.deflection_quad_plus.y();

    const auto measure = [&](const ScenarioConfig& c) {
      const BpmResult bpm = run_bpm(c);
      const auto& pa = bpm.plus.probes;
      const auto& pb = bpm.minus.probes;
      const double base = 0.5 * (pa.front().centroid_fwd.y() -
                                 pb.front().centroid_fwd.y());
      return 0.5 * (pa.back().centroid_fwd.y() - pb.back().centroid_fwd.y()) -
             base;
    };
    const double meas = measure(cfg);
    ScenarioConfig fine = cfg;
    fine.grid_n = 512;
    fine.bpm_dz = 0.5 * cfg.bpm_dz;
    const double meas_fine = measure(fine);

    const double rel = std::abs(meas / pred - 1.0);
    const double rel_fine = std::abs(meas_fine / pred - 1.0);
    const bool sign_ok = meas * pred > 0;
    const bool refines = rel_fine <= rel + 0.02;
    o.pass = sign_ok && rel <= 0.30 && refines;
    o.detail = "predicted " + fmt(pred) + ", measured " + fmt(meas) +
               " (rel " + fmt(rel) + ", tol 0.30), refined " + fmt(meas_fine) +
               " (rel " + fmt(rel_fine) + "), sign " + (sign_ok ? "ok" : "WRONG");
    return o;
  });

  criterion(10, "rytov cross-check", [&](Outcome o) {
    const ScenarioConfig cfg = load_scenario("grin_helix.cfg");
    const TraceResult tr = run_trace(cfg);
    const double paper = tr.rytov.quarter_tan2;
    const double lit = tr.rytov.half_theta2;

    const BpmResult bpm = run_bpm(cfg);
    if (bpm.rotation.empty()) {
      o.pass = false;
      o.detail = "wave run truncated, no rotation series";
      return o;
    }
    const double meas = bpm.rotation.back().rotation;
    const double lo = std::min(paper, lit), hi = std::max(paper, lit);
    const double band_lo = lo - 0.30 * std::abs(lo);
    const double band_hi = hi + 0.30 * std::abs(hi);
    const bool in_band = meas >= band_lo && meas <= band_hi;
    o.pass = in_band;
    o.detail = "paper form " + fmt(paper) + ", literature form " + fmt(lit) +
               ", measured " + fmt(meas) + ", band [" + fmt(band_lo) + ", " +
               fmt(band_hi) + "] -> " + (in_band ? "inside" : "OUTSIDE (flagged)");
    return o;
  });

  int failures = 0;
  for (const auto& r : g_results)
    if (!r.pass) ++failures;
  std::printf("acceptance: %zu criteria, %d failed\n", g_results.size(),
              failures);
  return failures == 0 ? 0 : 1;
}
