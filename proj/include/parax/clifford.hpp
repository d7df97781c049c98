#pragma once

// Exact 4x4 algebra of the Dirac-like Maxwell operator: the Hermitian
// matrix triple (M_x, M_y, M_z = beta), the Riemann-Silberstein spinor,
// and the non-Hermitian z-evolution Hamiltonian built from them.

#include <cmath>
#include <string>

#include "parax/errors.hpp"
#include "parax/types.hpp"

namespace parax {

struct DiracMatrixSet {
  Mat4 m_x;
  Mat4 m_y;
  Mat4 m_z;  // diag(+1,+1,-1,-1), also written beta
  bool conjugated = false;

  const Mat4& beta() const { return m_z; }

  // M_perp . v for a transverse vector v
  Mat4 m_perp_dot(const Vec2& v) const { return m_x * v.x() + m_y * v.y(); }
};

// Standard set in 2x2 blocks: M_x = [[0,I],[I,0]], M_y = i[[0,-I],[I,0]],
// M_z = diag(I,-I). The conjugated set flips the sign of M_y; it governs
// the evolution obeyed by the conjugate Riemann-Silberstein vector and is
// used to represent forward sigma = -1 beams.
inline DiracMatrixSet build_matrices(bool conjugated = false) {
  DiracMatrixSet s;
  s.conjugated = conjugated;
  s.m_x.setZero();
  s.m_y.setZero();
  s.m_z.setZero();
  s.m_x(0, 2) = 1.0;
  s.m_x(1, 3) = 1.0;
  s.m_x(2, 0) = 1.0;
  s.m_x(3, 1) = 1.0;
  s.m_y(0, 2) = cplx(0.0, -1.0);
  s.m_y(1, 3) = cplx(0.0, -1.0);
  s.m_y(2, 0) = cplx(0.0, 1.0);
  s.m_y(3, 1) = cplx(0.0, 1.0);
  s.m_z(0, 0) = 1.0;
  s.m_z(1, 1) = 1.0;
  s.m_z(2, 2) = -1.0;
  s.m_z(3, 3) = -1.0;
  if (conjugated) s.m_y = -s.m_y;
  return s;
}

struct CliffordReport {
  double square_residual = 0;       // max_i ||M_i^2 - 1||_max
  double hermiticity_residual = 0;  // max_i ||M_i - M_i^dagger||_max
  double anticommute_residual = 0;  // max_{i<j} ||M_i M_j + M_j M_i||_max
  double cyclic_residual = 0;       // max over cyclic triples, best orientation
  int orientation = +1;             // +1: M_i M_j = +i M_k, -1: flipped

  double max_residual() const {
    double r = square_residual;
    r = std::max(r, hermiticity_residual);
    r = std::max(r, anticommute_residual);
    r = std::max(r, cyclic_residual);
    return r;
  }
};

inline CliffordReport verify_clifford(const DiracMatrixSet& set) {
  const Mat4 m[3] = {set.m_x, set.m_y, set.m_z};
  const Mat4 id = Mat4::Identity();
  CliffordReport rep;
  for (int i = 0; i < 3; ++i) {
    rep.square_residual =
        std::max(rep.square_residual, (m[i] * m[i] - id).cwiseAbs().maxCoeff());
    rep.hermiticity_residual = std::max(
        rep.hermiticity_residual, (m[i] - m[i].adjoint()).cwiseAbs().maxCoeff());
    for (int j = i + 1; j < 3; ++j) {
      rep.anticommute_residual = std::max(
          rep.anticommute_residual, (m[i] * m[j] + m[j] * m[i]).cwiseAbs().maxCoeff());
    }
  }
  double plus = 0, minus = 0;
  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& t : cyc) {
    plus = std::max(plus, (m[t[0]] * m[t[1]] - iu * m[t[2]]).cwiseAbs().maxCoeff());
    minus = std::max(minus, (m[t[0]] * m[t[1]] + iu * m[t[2]]).cwiseAbs().maxCoeff());
  }
  rep.orientation = (plus <= minus) ? +1 : -1;
  rep.cyclic_residual = std::min(plus, minus);
  return rep;
}

// Spinor layout: (-F_x + i F_y, F_z, F_z, F_x + i F_y). The conjugate
// representation uses the i -> -i template on the conjugate field
// combination n E - i c B.
inline Spinor4 spinor_from_field(const Vec3c& f, bool conjugated = false) {
  if (!conjugated)
    return Spinor4(-f.x() + iu * f.y(), f.z(), f.z(), f.x() + iu * f.y());
  return Spinor4(-f.x() - iu * f.y(), f.z(), f.z(), f.x() - iu * f.y());
}

inline Spinor4 assemble_spinor(const Vec3c& e_field, const Vec3c& b_field,
                               double n, double c) {
  if (!e_field.allFinite() || !b_field.allFinite() || !std::isfinite(n) ||
      !std::isfinite(c) || n <= 0)
    throw NumericDomainError(
        "assemble_spinor: inputs must be finite with n > 0");
  const Vec3c f = n * e_field + iu * c * b_field;
  return spinor_from_field(f, false);
}

// Symbol of the z-evolution Hamiltonian H = -(n0 + zeta) beta + beta M_perp . p_perp.
// H is not Hermitian; it is beta-pseudo-Hermitian: beta H^dagger beta = H.
struct HamiltonianSymbol {
  double n0 = 1.0;
  double zeta = 0.0;
  Vec2 p_perp{0.0, 0.0};
};

inline Mat4 hamiltonian_matrix(const HamiltonianSymbol& sym,
                               const DiracMatrixSet& set) {
  const double n = sym.n0 + sym.zeta;
  if (!(sym.p_perp.norm() < n))
    throw NumericDomainError(
        "hamiltonian_matrix: |p_perp| must be below the local index");
  return -n * set.m_z + set.m_z * set.m_perp_dot(sym.p_perp);
}

// Equivalent form of the odd term, i M_perp . (z_hat x p_perp).
inline Mat4 hamiltonian_odd_alt(const Vec2& p_perp, const DiracMatrixSet& set) {
  const Vec2 zxp(-p_perp.y(), p_perp.x());
  return iu * set.m_perp_dot(zxp);
}

enum class EigencheckStatus { ok, conjugate_representation_required };

struct EigencheckResult {
  EigencheckStatus status = EigencheckStatus::ok;
  double residual = 0;
  Spinor4 spinor = Spinor4::Zero();
};

// Residual of the plane-wave eigenvalue relation (M . p) Psi = n Psi for a
// forward circular wave along `direction`. The analytic-signal field of a
// forward sigma = -1 wave cancels identically, which is reported as a
// status rather than an error.
inline EigencheckResult plane_wave_eigencheck(const Vec3& direction, int sigma,
                                              double n = 1.0) {
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw ValidationError("plane_wave_eigencheck: direction must be a unit vector");
  if (sigma != 1 && sigma != -1)
    throw ValidationError("plane_wave_eigencheck: polarization must be +1 or -1");

  const Vec3 d = direction;
  Vec3 seed = (std::abs(d.x()) < 0.9) ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  Vec3 e1 = (seed - seed.dot(d) * d).normalized();
  Vec3 e2 = d.cross(e1);

  // Forward circular wave in a medium of index n: E = e1 + i sigma e2,
  // c B = n (d x E), F = n E + i c B = n (1 + sigma) E.
  const Vec3c e_field = e1.cast<cplx>() + iu * double(sigma) * e2.cast<cplx>();
  const Vec3c cb = n * Vec3c(d.cast<cplx>().cross(e_field));
  const Vec3c f = n * e_field + iu * cb;

  EigencheckResult out;
  if (f.norm() < 1e-12 * n) {
    out.status = EigencheckStatus::conjugate_representation_required;
    return out;
  }
  out.spinor = spinor_from_field(f, false);
  const DiracMatrixSet set = build_matrices(false);
  const Vec3 p = n * d;
  const Mat4 mdotp = set.m_x * p.x() + set.m_y * p.y() + set.m_z * p.z();
  out.residual = (mdotp * out.spinor - n * out.spinor).norm() / out.spinor.norm();
  return out;
}

}  // namespace parax
