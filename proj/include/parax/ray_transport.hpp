#pragma once

// Semiclassical polarized ray tracing in z, with the helicity-dependent
// anomalous velocity, and the line-integral quadratures for the spin Hall
// deflection, Berry phase and Rytov rotation.
//
// Conventions: z is the evolution parameter (beam length maps via
// ds = (|p|/p_z) dz); momenta are dimensionless with |p| = n(r); rays bend
// toward higher index, dp_perp/dz = +grad_perp n * (n/p_z).

#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "parax/errors.hpp"
#include "parax/medium.hpp"
#include "parax/types.hpp"

namespace parax {

struct RayState {
  Vec3 r{0, 0, 0};
  Vec3 p{0, 0, 1};  // |p| = n(r), p_z > 0
  int sigma = 0;    // +1, -1, or 0 for the zeroth-order baseline

  // accumulated along the trajectory
  double berry_phase = 0;          // sigma * Int A . dp
  Vec3 anomalous_shift{0, 0, 0};   // (sigma/k) Int B x dp, diagnostic
  double dynamical_phase = 0;      // k Int p . dr
};

struct TrajectorySample {
  double z = 0;
  RayState state;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dz = 0;
  std::string integrator = "rk4";
};

struct StepControl {
  double dz = 0;              // <= 0 selects the automatic step rule
  double max_dp_step = 1e-3;  // bound on |dp| per step for the automatic rule
  bool include_berry = true;  // false: zeroth order, k^-1 -> 0
  bool strict_paraxial = false;  // force p_z = n0 throughout
  int sample_stride = 1;
};

// Constructs a state satisfying the dispersion constraint |p| = n(r).
inline RayState launch_ray(const MediumProfile& profile, const Vec3& r0,
                           const Vec2& p_perp, int sigma) {
  const double n = profile.index_at(r0);
  const double pz2 = n * n - p_perp.squaredNorm();
  if (!(pz2 > 0))
    throw ValidationError("launch_ray: |p_perp| >= n(r0), no forward ray");
  RayState s;
  s.r = r0;
  s.p = Vec3(p_perp.x(), p_perp.y(), std::sqrt(pz2));
  s.sigma = sigma;
  return s;
}

namespace detail {

struct RayDeriv {
  Vec2 dr;        // transverse velocity
  Vec2 dp;        // transverse momentum rate
  double dberry;  // berry phase rate (sigma included)
  Vec2 dshift;    // anomalous shift rate (sigma/k included)
  double ddyn;    // dynamical phase rate
};

struct RayStage {
  Vec2 r, p;
  double berry = 0, dyn = 0;
  Vec2 shift{0, 0};
};

inline RayDeriv ray_rhs(const MediumProfile& profile, double z, const RayStage& y,
                        int sigma, double k, const StepControl& ctrl,
                        double n0) {
  const Vec3 pos(y.r.x(), y.r.y(), z);
  const double n = profile.index_at(pos);
  const Vec3 g = profile.grad_index(pos);
  const double pz2 = n * n - y.p.squaredNorm();
  if (!(pz2 > 0))
    throw NumericDomainError(
        "trace_ray: paraxiality lost (p_z^2 <= 0) at z = " + std::to_string(z));
  const double pz = ctrl.strict_paraxial ? n0 : std::sqrt(pz2);
  const double ratio = n / pz;

  RayDeriv d;
  d.dp = ratio * Vec2(g.x(), g.y());
  d.dr = Vec2(y.p.x() / pz, y.p.y() / pz);
  d.dberry = 0;
  d.dshift = Vec2::Zero();

  const Vec3 p3(y.p.x(), y.p.y(), pz);
  const Vec3 q = ratio * g;  // dp/dz, all three components
  if (ctrl.include_berry && sigma != 0) {
    const Vec3 b = p3 / (2.0 * pz * pz * pz);
    const Vec3 anom = (double(sigma) / k) * b.cross(q);
    d.dr += Vec2(anom.x(), anom.y());
    d.dshift = Vec2(anom.x(), anom.y());
    const double d4 = 4.0 * pz * pz;
    const Vec3 conn(-y.p.y() / d4, y.p.x() / d4, 0.0);
    d.dberry = double(sigma) * conn.dot(q);
  }
  // k p . dr/dz over the realized path; the anomalous term is transverse.
  d.ddyn = k * (y.p.x() * d.dr.x() + y.p.y() * d.dr.y() + pz);
  return d;
}

}  // namespace detail

inline Trajectory trace_ray(const MediumProfile& profile, const RayState& init,
                            double k, double z_end,
                            const StepControl& ctrl = {}) {
  if (!(k > 0)) throw ValidationError("trace_ray: k must be positive");
  if (!(z_end > init.r.z()))
    throw ValidationError("trace_ray: z_end must exceed the launch z");
  {
    const double n = profile.index_at(init.r);
    if (std::abs(init.p.norm() - n) > 1e-9 * n)
      throw ValidationError("trace_ray: initial state violates |p| = n(r)");
    if (!(init.p.z() > 0))
      throw ValidationError("trace_ray: initial p_z must be positive");
  }

  const double n0 = profile.n0();
  const double span = z_end - init.r.z();
  double dz = ctrl.dz;
  if (dz <= 0) {
    const double g = profile.grad_sup();
    dz = (g > 0) ? ctrl.max_dp_step / (1.5 * g) : span / 64.0;
    dz = std::min(dz, span / 64.0);
  }
  long nsteps = std::max(1L, long(std::ceil(span / dz - 1e-12)));
  if (nsteps > 100000000L)
    throw NumericDomainError("trace_ray: step size underflow");
  dz = span / double(nsteps);

  detail::RayStage y;
  y.r = Vec2(init.r.x(), init.r.y());
  y.p = Vec2(init.p.x(), init.p.y());
  y.berry = init.berry_phase;
  y.dyn = init.dynamical_phase;
  y.shift = Vec2(init.anomalous_shift.x(), init.anomalous_shift.y());

  Trajectory traj;
  traj.dz = dz;
  const int stride = std::max(1, ctrl.sample_stride);
  traj.samples.reserve(std::size_t(nsteps / stride) + 2);

  const auto record = [&](double z) {
    RayState s;
    const Vec3 pos(y.r.x(), y.r.y(), z);
    const double n = profile.index_at(pos);
    const double pz2 = n * n - y.p.squaredNorm();
    if (!(pz2 > 0))
      throw NumericDomainError(
          "trace_ray: paraxiality lost (p_z^2 <= 0) at z = " + std::to_string(z));
    s.r = pos;
    s.p = Vec3(y.p.x(), y.p.y(),
               ctrl.strict_paraxial ? n0 : std::sqrt(pz2));
    s.sigma = init.sigma;
    s.berry_phase = y.berry;
    s.anomalous_shift = Vec3(y.shift.x(), y.shift.y(), 0.0);
    s.dynamical_phase = y.dyn;
    traj.samples.push_back({z, s});
  };

  double z = init.r.z();
  record(z);
  for (long step = 0; step < nsteps; ++step) {
    const auto add = [](const detail::RayStage& s, const detail::RayDeriv& d,
                        double h) {
      detail::RayStage o = s;
      o.r += h * d.dr;
      o.p += h * d.dp;
      o.berry += h * d.dberry;
      o.shift += h * d.dshift;
      o.dyn += h * d.ddyn;
      return o;
    };
    const auto k1 = detail::ray_rhs(profile, z, y, init.sigma, k, ctrl, n0);
    const auto k2 = detail::ray_rhs(profile, z + dz / 2, add(y, k1, dz / 2),
                                    init.sigma, k, ctrl, n0);
    const auto k3 = detail::ray_rhs(profile, z + dz / 2, add(y, k2, dz / 2),
                                    init.sigma, k, ctrl, n0);
    const auto k4 =
        detail::ray_rhs(profile, z + dz, add(y, k3, dz), init.sigma, k, ctrl, n0);
    y.r += dz / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
    y.p += dz / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    y.berry +=
        dz / 6.0 * (k1.dberry + 2.0 * k2.dberry + 2.0 * k3.dberry + k4.dberry);
    y.shift +=
        dz / 6.0 * (k1.dshift + 2.0 * k2.dshift + 2.0 * k3.dshift + k4.dshift);
    y.dyn += dz / 6.0 * (k1.ddyn + 2.0 * k2.ddyn + 2.0 * k3.ddyn + k4.ddyn);
    z = init.r.z() + span * double(step + 1) / double(nsteps);
    if ((step + 1) % stride == 0 || step + 1 == nsteps) record(z);
  }
  return traj;
}

// Trapezoidal quadrature of (sigma/k) Int_C p x dp / (2 p_z^3) along the
// momentum-space path of the trajectory.
inline Vec3 spin_hall_deflection(const Trajectory& traj, double k, int sigma) {
  if (traj.samples.size() < 2)
    throw ValidationError("spin_hall_deflection: need at least 2 samples");
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const Vec3& p0 = traj.samples[i].state.p;
    const Vec3& p1 = traj.samples[i + 1].state.p;
    const Vec3 b0 = p0 / (2.0 * p0.z() * p0.z() * p0.z());
    const Vec3 b1 = p1 / (2.0 * p1.z() * p1.z() * p1.z());
    acc += 0.5 * (b0 + b1).cross(p1 - p0);
  }
  return (double(sigma) / k) * acc;
}

// Trapezoidal quadrature of sigma Int_C A_perp . dp with
// A_perp = (z_hat x p) / (4 p_z^2).
inline double berry_phase(const Trajectory& traj, int sigma) {
  if (traj.samples.size() < 2)
    throw ValidationError("berry_phase: need at least 2 samples");
  double acc = 0;
  const auto conn = [](const Vec3& p) {
    const double d = 4.0 * p.z() * p.z();
    return Vec3(-p.y() / d, p.x() / d, 0.0);
  };
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const Vec3& p0 = traj.samples[i].state.p;
    const Vec3& p1 = traj.samples[i + 1].state.p;
    acc += 0.5 * (conn(p0) + conn(p1)).dot(p1 - p0);
  }
  return double(sigma) * acc;
}

struct RytovAngles {
  double quarter_tan2 = 0;   // (1/4) Int tan^2(theta) dphi
  double quarter_theta2 = 0; // (1/4) Int theta^2 dphi, small-angle variant
  double half_theta2 = 0;    // (1/2) Int theta^2 dphi, solid-angle form
  bool large_angle_warning = false;  // some theta sample above 0.3 rad
};

inline RytovAngles rytov_angle_closed(std::span<const double> theta,
                                      std::span<const double> phi) {
  if (theta.size() != phi.size() || theta.size() < 2)
    throw ValidationError("rytov_angle_closed: need matching samples (>= 2)");
  RytovAngles out;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    const double dphi = phi[i + 1] - phi[i];
    const double t0 = std::tan(theta[i]), t1 = std::tan(theta[i + 1]);
    out.quarter_tan2 += 0.25 * 0.5 * (t0 * t0 + t1 * t1) * dphi;
    out.quarter_theta2 +=
        0.25 * 0.5 * (theta[i] * theta[i] + theta[i + 1] * theta[i + 1]) * dphi;
    if (theta[i] > 0.3 || theta[i + 1] > 0.3) out.large_angle_warning = true;
  }
  out.half_theta2 = 2.0 * out.quarter_theta2;
  return out;
}

// Zenith/azimuth history of the momentum along a trajectory; phi is
// unwrapped to a continuous branch.
inline void angles_history(const Trajectory& traj, std::vector<double>& theta,
                           std::vector<double>& phi) {
  theta.clear();
  phi.clear();
  double offset = 0, prev = 0;
  bool first = true;
  for (const auto& s : traj.samples) {
    const Vec3& p = s.state.p;
    theta.push_back(std::atan2(std::hypot(p.x(), p.y()), p.z()));
    double a = std::atan2(p.y(), p.x());
    constexpr double pi = std::numbers::pi;
    if (!first) {
      while (a + offset - prev > pi) offset -= 2.0 * pi;
      while (a + offset - prev < -pi) offset += 2.0 * pi;
    }
    first = false;
    prev = a + offset;
    phi.push_back(prev);
  }
}

// k Int p . dr plus sigma times the Berry phase; the common -wt term of the
// monochromatic carrier is excluded.
inline double total_phase(const Trajectory& traj, double k, int sigma) {
  if (traj.samples.size() < 2)
    throw ValidationError("total_phase: need at least 2 samples");
  double acc = 0;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const Vec3& p0 = traj.samples[i].state.p;
    const Vec3& p1 = traj.samples[i + 1].state.p;
    const Vec3 dr = traj.samples[i + 1].state.r - traj.samples[i].state.r;
    acc += 0.5 * (p0 + p1).dot(dr);
  }
  return k * acc + berry_phase(traj, sigma);
}

// CSV: z,r_x,r_y,r_z,p_x,p_y,p_z,sigma,berry_phase,shift_x,shift_y,dyn_phase
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const std::string& header_comment = "") {
  out.precision(17);
  out << std::scientific;
  if (!header_comment.empty()) out << header_comment;
  out << "z,r_x,r_y,r_z,p_x,p_y,p_z,sigma,berry_phase,shift_x,shift_y,dyn_phase\n";
  for (const auto& s : traj.samples) {
    const RayState& st = s.state;
    out << s.z << ',' << st.r.x() << ',' << st.r.y() << ',' << st.r.z() << ','
        << st.p.x() << ',' << st.p.y() << ',' << st.p.z() << ',' << st.sigma
        << ',' << st.berry_phase << ',' << st.anomalous_shift.x() << ','
        << st.anomalous_shift.y() << ',' << st.dynamical_phase << '\n';
  }
}

}  // namespace parax
