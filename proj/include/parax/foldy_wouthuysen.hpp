#pragma once

// Foldy-Wouthuysen diagonalization of the homogeneous z-evolution
// Hamiltonian, with the exact, paraxial and band-projected Berry
// connections and the Berry curvature derived from it.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "parax/clifford.hpp"
#include "parax/errors.hpp"
#include "parax/types.hpp"

namespace parax {

inline double fw_energy(double p_perp, double n0) {
  if (!(p_perp >= 0) || !(n0 > 0))
    throw NumericDomainError("fw_energy: need p_perp >= 0 and n0 > 0");
  if (p_perp >= n0)
    throw NumericDomainError(
        "fw_energy: p_perp >= n0 is outside the paraxial domain");
  return std::sqrt(n0 * n0 - p_perp * p_perp);
}

inline double fw_energy(const Vec2& p_perp, double n0) {
  return fw_energy(p_perp.norm(), n0);
}

struct FwTransform {
  double n0 = 1.0;
  double energy = 1.0;  // E = sqrt(n0^2 - p_perp^2)
  double theta = 0.0;   // tanh(2 p_perp theta) = p_perp / n0
  Vec2 p_perp{0.0, 0.0};
  Mat4 matrix;   // U, Hermitian but not unitary
  Mat4 inverse;  // closed form, kinetic term sign-flipped
};

inline FwTransform fw_matrix(const Vec2& p_perp, double n0,
                             const DiracMatrixSet& set) {
  const double pp = p_perp.norm();
  const double e = fw_energy(pp, n0);
  const double denom = std::sqrt(2.0 * e * (n0 + e));
  const Mat4 kin = set.m_perp_dot(p_perp);
  FwTransform t;
  t.n0 = n0;
  t.energy = e;
  t.p_perp = p_perp;
  t.theta = (pp > 0) ? std::atanh(pp / n0) / (2.0 * pp) : 1.0 / (2.0 * n0);
  t.matrix = ((n0 + e) * Mat4::Identity() + kin) / denom;
  t.inverse = ((n0 + e) * Mat4::Identity() - kin) / denom;
  return t;
}

// Matrix-valued momentum-space connection, one 4x4 per momentum direction.
struct ConnectionMatrices {
  std::array<Mat4, 3> a{Mat4::Zero(), Mat4::Zero(), Mat4::Zero()};
  const Mat4& x() const { return a[0]; }
  const Mat4& y() const { return a[1]; }
  const Mat4& z() const { return a[2]; }
};

// Exact A_perp = i U^-1 grad_p U:
//   beta (z_hat x p_perp) / (2E(n0+E))
// + i (M_perp . p_perp) p_perp / (2E^2(n0+E))
// + i M_perp / (2E)
inline ConnectionMatrices berry_connection_exact(const Vec2& p_perp, double n0,
                                                 const DiracMatrixSet& set) {
  const double e = fw_energy(p_perp, n0);
  const double d1 = 2.0 * e * (n0 + e);
  const double d2 = 2.0 * e * e * (n0 + e);
  const Vec2 zxp(-p_perp.y(), p_perp.x());
  const Mat4 kin = set.m_perp_dot(p_perp);
  ConnectionMatrices c;
  const Mat4 m[2] = {set.m_x, set.m_y};
  for (int j = 0; j < 2; ++j) {
    c.a[j] = set.m_z * (zxp[j] / d1) + iu * kin * (p_perp[j] / d2) +
             iu * m[j] / (2.0 * e);
  }
  return c;
}

inline ConnectionMatrices berry_connection_exact(const Vec2& p_perp, double n0) {
  return berry_connection_exact(p_perp, n0, build_matrices(false));
}

// Paraxial form with E ~ n0 = p_z.
inline ConnectionMatrices berry_connection_paraxial(const Vec2& p_perp, double p_z,
                                                    const DiracMatrixSet& set) {
  if (!(p_z > 0))
    throw NumericDomainError("berry_connection_paraxial: require p_z > 0");
  const Vec2 zxp(-p_perp.y(), p_perp.x());
  const Mat4 kin = set.m_perp_dot(p_perp);
  ConnectionMatrices c;
  const Mat4 m[2] = {set.m_x, set.m_y};
  for (int j = 0; j < 2; ++j) {
    c.a[j] = set.m_z * (zxp[j] / (4.0 * p_z * p_z)) +
             iu * kin * (p_perp[j] / (4.0 * p_z * p_z * p_z)) +
             iu * m[j] / (2.0 * p_z);
  }
  return c;
}

inline ConnectionMatrices berry_connection_paraxial(const Vec2& p_perp, double p_z) {
  return berry_connection_paraxial(p_perp, p_z, build_matrices(false));
}

// Band-projected connection sigma (z_hat x p) / (4 p_z^2).
inline Vec3 projected_connection(const Vec3& p, int sigma) {
  if (!(p.z() > 0))
    throw NumericDomainError("projected_connection: require p_z > 0");
  const double d = 4.0 * p.z() * p.z();
  return double(sigma) * Vec3(-p.y() / d, p.x() / d, 0.0);
}

// Curvature of the projected connection, p / (2 p_z^3); exact curl identity.
inline Vec3 berry_curvature(const Vec3& p) {
  if (!(p.z() > 0))
    throw NumericDomainError("berry_curvature: require p_z > 0");
  const double d = 2.0 * p.z() * p.z() * p.z();
  return p / d;
}

// Monopole-style comparison form p / (2 p^3), valid for p ~ p_z.
inline Vec3 berry_curvature_radial_approx(const Vec3& p) {
  const double pn = p.norm();
  if (!(pn > 0)) throw NumericDomainError("berry_curvature_radial_approx: |p| > 0");
  return p / (2.0 * pn * pn * pn);
}

// Helicity-bound evaluators over momentum space.
struct BerryGeometry {
  int sigma = +1;
  double n0 = 1.0;

  Vec3 connection(const Vec3& p) const { return projected_connection(p, sigma); }
  Vec3 curvature(const Vec3& p) const { return berry_curvature(p); }
  ConnectionMatrices pre_projection(const Vec2& p_perp) const {
    return berry_connection_exact(p_perp, n0);
  }
};

struct CommutatorGrid {
  Vec3 lo{-0.2, -0.2, 0.8};
  Vec3 hi{0.2, 0.2, 1.2};
  int n = 41;  // points per axis
};

struct CommutatorCheckResult {
  double max_residual = 0;               // worst pair among xy, yz, zx
  std::array<double, 3> pair_residual{};  // xy, yz, zx
  double zz_residual = 0;                // trivially zero pair
  double h = 0;                          // max grid spacing
};

// Applies r_i = i k^-1 d/dp_i + k^-1 sigma A_i with central differences and
// checks [r_i, r_j] f = i k^-2 sigma eps_ijk B_k f on the grid interior.
inline CommutatorCheckResult position_commutator_check(
    int sigma, const CommutatorGrid& grid,
    const std::function<double(const Vec3&)>& test_fn, double k = 1.0) {
  const int n = grid.n;
  if (n < 5) throw ValidationError("position_commutator_check: grid too small");
  Vec3 h;
  for (int a = 0; a < 3; ++a)
    h[a] = (grid.hi[a] - grid.lo[a]) / double(n - 1);
  if (!(grid.lo.z() > 0))
    throw NumericDomainError("position_commutator_check: grid must have p_z > 0");

  const auto at = [&](int i, int j, int l) { return (i * n + j) * n + l; };
  const auto point = [&](int i, int j, int l) {
    return Vec3(grid.lo.x() + i * h.x(), grid.lo.y() + j * h.y(),
                grid.lo.z() + l * h.z());
  };

  std::vector<cplx> f(std::size_t(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) f[at(i, j, l)] = test_fn(point(i, j, l));

  // r_axis applied to a sampled field; output valid on [pad+1, n-pad-2].
  const auto apply_r = [&](const std::vector<cplx>& in, int axis, int pad,
                           std::vector<cplx>& out) {
    out.assign(in.size(), cplx(0));
    const int di = (axis == 0), dj = (axis == 1), dl = (axis == 2);
    for (int i = pad + 1; i < n - pad - 1; ++i)
      for (int j = pad + 1; j < n - pad - 1; ++j)
        for (int l = pad + 1; l < n - pad - 1; ++l) {
          const cplx grad = (in[at(i + di, j + dj, l + dl)] -
                             in[at(i - di, j - dj, l - dl)]) /
                            (2.0 * h[axis]);
          cplx val = iu / k * grad;
          if (sigma != 0) {
            const Vec3 a = projected_connection(point(i, j, l), sigma);
            val += a[axis] / k * in[at(i, j, l)];
          }
          out[at(i, j, l)] = val;
        }
  };

  CommutatorCheckResult res;
  res.h = h.maxCoeff();
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  std::vector<cplx> tmp1, tmp2, ij, ji;
  for (int q = 0; q < 3; ++q) {
    const int pi = pairs[q][0], pj = pairs[q][1];
    apply_r(f, pj, 0, tmp1);
    apply_r(tmp1, pi, 1, ij);
    apply_r(f, pi, 0, tmp2);
    apply_r(tmp2, pj, 1, ji);
    double worst = 0;
    for (int i = 2; i < n - 2; ++i)
      for (int j = 2; j < n - 2; ++j)
        for (int l = 2; l < n - 2; ++l) {
          const Vec3 p = point(i, j, l);
          // eps_{i j k} B_k for cyclic (pi, pj): k is the remaining axis
          const int pk = 3 - pi - pj;
          const double sign = ((pi + 1) % 3 == pj) ? 1.0 : -1.0;
          cplx expect = 0;
          if (sigma != 0)
            expect = iu / (k * k) * double(sigma) * sign *
                     berry_curvature(p)[pk] * f[at(i, j, l)];
          const cplx got = ij[at(i, j, l)] - ji[at(i, j, l)];
          worst = std::max(worst, std::abs(got - expect));
        }
    res.pair_residual[q] = worst;
    res.max_residual = std::max(res.max_residual, worst);
  }

  // (z, z) pair: identical operators commute identically.
  apply_r(f, 2, 0, tmp1);
  apply_r(tmp1, 2, 1, ij);
  apply_r(f, 2, 0, tmp2);
  apply_r(tmp2, 2, 1, ji);
  double zz = 0;
  for (int i = 2; i < n - 2; ++i)
    for (int j = 2; j < n - 2; ++j)
      for (int l = 2; l < n - 2; ++l)
        zz = std::max(zz, std::abs(ij[at(i, j, l)] - ji[at(i, j, l)]));
  res.zz_residual = zz;
  return res;
}

}  // namespace parax
