#pragma once

// Aggregated residual checks over the algebra, the diagonalization, the
// connection/curvature identities and the kinetic propagator, with the
// tolerances reported next to each residual. Backs the `verify` CLI
// subcommand and the machine-readable report it emits.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "parax/clifford.hpp"
#include "parax/foldy_wouthuysen.hpp"
#include "parax/types.hpp"
#include "parax/version.hpp"
#include "parax/wave_oracle.hpp"

#include <nlohmann/json.hpp>

namespace parax {

struct CheckResult {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  std::string note;
};

inline std::vector<CheckResult> run_verify_suite(unsigned long seed = 1,
                                                 bool inject_fault = false) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto push = [&](const std::string& name, double residual, double tol,
                        const std::string& note = "") {
    out.push_back({name, residual, tol, residual <= tol, note});
  };

  DiracMatrixSet std_set = build_matrices(false);
  const DiracMatrixSet conj_set = build_matrices(true);
  if (inject_fault) std_set.m_x(0, 2) += 1e-3;

  {
    const CliffordReport r = verify_clifford(std_set);
    push("clifford_standard", r.max_residual(), 0.0,
         "cyclic orientation " + std::to_string(r.orientation));
    const CliffordReport rc = verify_clifford(conj_set);
    push("clifford_conjugate", rc.max_residual(), 0.0,
         "cyclic orientation " + std::to_string(rc.orientation));
  }

  const auto random_symbol = [&](double max_frac) {
    const double n0 = 1.0 + unit(rng);
    const double zeta = 0.1 * n0 * (2.0 * unit(rng) - 1.0);
    const double r = max_frac * n0 * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    return HamiltonianSymbol{n0, zeta, Vec2(r * std::cos(ang), r * std::sin(ang))};
  };

  {
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
      const HamiltonianSymbol sym = random_symbol(0.9);
      const Mat4 h = hamiltonian_matrix(sym, std_set);
      const Mat4 back = std_set.m_z * h.adjoint() * std_set.m_z;
      worst = std::max(worst, (back - h).cwiseAbs().maxCoeff());
    }
    push("pseudo_hermiticity_1000", worst, 1e-13);
  }

  {
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      HamiltonianSymbol sym = random_symbol(0.9);
      sym.zeta = 0;
      const Mat4 h = hamiltonian_matrix(sym, std_set);
      const double e = fw_energy(sym.p_perp, sym.n0);
      Eigen::ComplexEigenSolver<Mat4> es(h, false);
      Eigen::Vector4d ev = es.eigenvalues().real();
      std::sort(ev.data(), ev.data() + 4);
      const double res = std::max(
          std::max(std::abs(ev[0] + e), std::abs(ev[1] + e)),
          std::max(std::abs(ev[2] - e), std::abs(ev[3] - e)));
      worst = std::max(worst, res);
      worst = std::max(worst, es.eigenvalues().imag().cwiseAbs().maxCoeff());
    }
    push("spectrum_pm_energy", worst, 1e-12, "eigenvalues {-E,-E,+E,+E}");
  }

  {
    double worst_offdiag = 0, worst_inverse = 0;
    for (int t = 0; t < 1000; ++t) {
      HamiltonianSymbol sym = random_symbol(0.9);
      sym.zeta = 0;
      const FwTransform u = fw_matrix(sym.p_perp, sym.n0, std_set);
      const Mat4 h0 = hamiltonian_matrix(sym, std_set);
      const Mat4 d = u.inverse * h0 * u.matrix + u.energy * std_set.m_z;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if ((r < 2) != (c < 2))
            worst_offdiag = std::max(worst_offdiag, std::abs(d(r, c)));
      worst_inverse = std::max(
          worst_inverse,
          (u.inverse - u.matrix.inverse()).cwiseAbs().maxCoeff());
    }
    push("fw_diagonalization_1000", worst_offdiag, 1e-12,
         "off-diagonal blocks of U^-1 H0 U + E beta");
    push("fw_inverse_closed_form", worst_inverse, 1e-12);
  }

  {
    const double h = 1e-5;
    double worst = 0, worst_par = 0;
    const Vec2 pts[] = {Vec2(0.1, 0.05), Vec2(-0.2, 0.15), Vec2(0.02, -0.3)};
    for (const Vec2& p : pts) {
      const FwTransform u0 = fw_matrix(p, 1.0, std_set);
      const ConnectionMatrices conn = berry_connection_exact(p, 1.0, std_set);
      for (int j = 0; j < 2; ++j) {
        Vec2 pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        const Mat4 fd =
            iu * u0.inverse *
            ((fw_matrix(pp, 1.0, std_set).matrix -
              fw_matrix(pm, 1.0, std_set).matrix) /
             (2.0 * h));
        worst = std::max(worst, (fd - conn.a[j]).cwiseAbs().maxCoeff());
      }
      worst = std::max(worst, conn.a[2].cwiseAbs().maxCoeff());
    }
    push("connection_exact_vs_fd", worst, 1e-8, "central differences, h = 1e-5");

    const Vec2 p(0.05, 0.0);
    const ConnectionMatrices ex = berry_connection_exact(p, 1.0, std_set);
    const ConnectionMatrices par = berry_connection_paraxial(p, 1.0, std_set);
    for (int j = 0; j < 2; ++j) {
      const double scale = ex.a[j].cwiseAbs().maxCoeff();
      worst_par =
          std::max(worst_par, (ex.a[j] - par.a[j]).cwiseAbs().maxCoeff() / scale);
    }
    push("connection_paraxial_rel", worst_par, 5e-3,
         "p_perp = 0.05, p_z = 1");
  }

  {
    double worst = 0;
    const Vec3 pts[] = {Vec3(0.1, 0.2, 1.0), Vec3(-0.05, 0.02, 0.9)};
    const double h = 1e-5;
    for (const Vec3& p : pts) {
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
      worst = std::max(worst, (curl - berry_curvature(p)).cwiseAbs().maxCoeff());
      worst = std::max(
          worst, std::abs(projected_connection(p, 1).dot(p)));  // transversality
    }
    push("curvature_curl_fd", worst, 1e-8,
         "curl of the projected connection vs p/(2 p_z^3)");
  }

  {
    const auto gauss = [](const Vec3& p) {
      const Vec3 c(0.0, 0.0, 1.0);
      return std::exp(-(p - c).squaredNorm() / (2.0 * 0.08 * 0.08));
    };
    CommutatorGrid coarse{Vec3(-0.2, -0.2, 0.8), Vec3(0.2, 0.2, 1.2), 41};
    CommutatorGrid fine = coarse;
    fine.n = 81;
    const auto rc = position_commutator_check(1, coarse, gauss, 1.0);
    const auto rf = position_commutator_check(1, fine, gauss, 1.0);
    const double ratio = rc.max_residual / std::max(rf.max_residual, 1e-300);
    push("commutator_h2_scaling", std::abs(ratio - 4.0), 1.0,
         "residual ratio on halving h: " + std::to_string(ratio));
    const auto r0 = position_commutator_check(0, coarse, gauss, 1.0);
    push("commutator_sigma0", r0.max_residual, 1e-10,
         "connection off, derivatives commute");
    push("commutator_zz", rc.zz_residual, 0.0);
  }

  {
    double worst = 0;
    const Vec3 pts[] = {Vec3(0.1, 0.2, 1.0), Vec3(-0.3, 0.05, 1.1)};
    for (const Vec3& p : pts) {
      worst = std::max(worst, (projected_connection(p, -1) +
                               projected_connection(p, 1))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    push("helicity_antisymmetry", worst, 0.0);
  }

  {
    double worst = 0, worst_beta = 0;
    const double k = 150.0, dz = 0.01, n0 = 1.0;
    for (int t = 0; t < 1000; ++t) {
      const double r = 0.9 * std::sqrt(unit(rng));
      const double ang = 2.0 * std::numbers::pi * unit(rng);
      const Vec2 p(r * std::cos(ang), r * std::sin(ang));
      const DiracMatrixSet& set = (t % 2 == 0) ? std_set : conj_set;
      const Mat4 prop = kinetic_propagator(p, dz, k, n0, set, false);
      const Mat4 kin = -n0 * set.m_z + set.m_z * set.m_perp_dot(p);
      const Mat4 oracle = (-iu * k * dz * kin).exp();
      worst = std::max(worst, (prop - oracle).cwiseAbs().maxCoeff());
      worst_beta = std::max(
          worst_beta,
          (prop.adjoint() * set.m_z * prop - set.m_z).cwiseAbs().maxCoeff());
    }
    push("kinetic_vs_matrix_exponential_1000", worst, 1e-12);
    push("kinetic_beta_pseudo_unitarity", worst_beta, 1e-13);
  }

  return out;
}

inline nlohmann::ordered_json verify_report_json(
    const std::vector<CheckResult>& checks, unsigned long seed) {
  nlohmann::ordered_json j;
  j["tool"] = "parax";
  j["version"] = kVersion;
  j["seed"] = seed;
  bool all = true;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["residual"] = c.residual;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(e);
    all = all && c.pass;
  }
  j["checks"] = arr;
  j["all_pass"] = all;
  return j;
}

}  // namespace parax
