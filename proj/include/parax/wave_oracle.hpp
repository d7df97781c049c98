#pragma once

// Split-step integrator of the Dirac-like z-evolution on a transverse
// grid: symmetric Strang splitting of H = K(p_perp) + V(x) with
// K = beta(-n0 + M_perp . p_perp) applied exactly per Fourier mode via
// K^2 = E^2, and V = -zeta(x) beta applied pointwise. The generator is
// beta-pseudo-Hermitian, so the indefinite beta-weighted norm is the
// conserved quantity. This module is the independent full-wave oracle for
// the geometric transport predictions.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "parax/clifford.hpp"
#include "parax/container.hpp"
#include "parax/errors.hpp"
#include "parax/foldy_wouthuysen.hpp"
#include "parax/medium.hpp"
#include "parax/types.hpp"

namespace parax {

struct GridGeometry {
  int nx = 256;
  int ny = 256;
  double extent = 2.0;  // physical width along x; cells are square

  double cell() const { return extent / nx; }
  double extent_y() const { return cell() * ny; }
  double x(int i) const { return (i - nx / 2) * cell(); }
  double y(int j) const { return (j - ny / 2) * cell(); }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Signed mode index folding for an unnormalized DFT axis.
inline int fold_index(int idx, int n) { return (idx < (n + 1) / 2) ? idx : idx - n; }

}  // namespace detail

// Dimensionless transverse momentum of DFT mode `idx` along an axis of n
// samples with the given cell size, for wave number k.
inline double mode_momentum(int idx, int n, double cell, double k) {
  return 2.0 * std::numbers::pi * detail::fold_index(idx, n) / (n * cell * k);
}

// Copy-based in-place complex 2D FFT pair on an aligned private buffer.
class Fft2 {
 public:
  Fft2(int nx, int ny) : nx_(nx), ny_(ny) {
    const std::size_t n = std::size_t(nx) * ny;
    buf_ = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;
  ~Fft2() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  void forward(std::vector<cplx>& v) { run(v, fwd_, 1.0); }
  void backward_scaled(std::vector<cplx>& v) {
    run(v, bwd_, 1.0 / (double(nx_) * ny_));
  }

 private:
  void run(std::vector<cplx>& v, fftw_plan plan, double scale) {
    const std::size_t n = std::size_t(nx_) * ny_;
    std::copy_n(reinterpret_cast<const double*>(v.data()), 2 * n,
                reinterpret_cast<double*>(buf_));
    fftw_execute(plan);
    const double* src = reinterpret_cast<const double*>(buf_);
    double* dst = reinterpret_cast<double*>(v.data());
    if (scale == 1.0) {
      std::copy_n(src, 2 * n, dst);
    } else {
      for (std::size_t i = 0; i < 2 * n; ++i) dst[i] = src[i] * scale;
    }
  }

  int nx_, ny_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

// Transverse grid of 4-component amplitudes with carrier bookkeeping.
struct FieldGrid {
  GridGeometry geom;
  double z = 0;
  double n0 = 1.0;
  double k = 1.0;
  bool conjugated = false;  // matrix set of the evolution this field obeys
  std::array<std::vector<cplx>, 4> comp;

  FieldGrid() = default;
  FieldGrid(const GridGeometry& g, double n0_in, double k_in, bool conj)
      : geom(g), n0(n0_in), k(k_in), conjugated(conj) {
    for (auto& c : comp) c.assign(std::size_t(g.nx) * g.ny, cplx(0));
  }

  std::size_t idx(int i, int j) const { return std::size_t(j) * geom.nx + i; }
  double cell_area() const { return geom.cell() * geom.cell(); }

  // Indefinite norm sum(|c1|^2 + |c2|^2 - |c3|^2 - |c4|^2) * cell area.
  double beta_norm() const {
    double acc = 0;
    for (int c = 0; c < 4; ++c) {
      const double sign = (c < 2) ? 1.0 : -1.0;
      for (const cplx& v : comp[c]) acc += sign * std::norm(v);
    }
    return acc * cell_area();
  }

  double l2_norm() const {
    double acc = 0;
    for (int c = 0; c < 4; ++c)
      for (const cplx& v : comp[c]) acc += std::norm(v);
    return acc * cell_area();
  }

  double energy(int c) const {
    double acc = 0;
    for (const cplx& v : comp[c]) acc += std::norm(v);
    return acc * cell_area();
  }

  // Intensity-weighted mean position of one component over the interior
  // (the absorbing band is excluded).
  Vec2 centroid(int c, double interior_frac = 0.10,
                double rel_threshold = 1e-12) const {
    const double xmax = (0.5 - interior_frac) * geom.extent;
    const double ymax = (0.5 - interior_frac) * geom.extent_y();
    double w = 0, sx = 0, sy = 0;
    for (int j = 0; j < geom.ny; ++j) {
      const double yy = geom.y(j);
      if (std::abs(yy) > ymax) continue;
      for (int i = 0; i < geom.nx; ++i) {
        const double xx = geom.x(i);
        if (std::abs(xx) > xmax) continue;
        const double a = std::norm(comp[c][idx(i, j)]);
        w += a;
        sx += a * xx;
        sy += a * yy;
      }
    }
    const double total = l2_norm() / cell_area();
    if (!(w > rel_threshold * std::max(total, 1e-300)))
      throw NumericDomainError(
          "centroid: component energy below threshold, centroid undefined");
    return Vec2(sx / w, sy / w);
  }

  // Complex mean of one component against an optional reference mode;
  // with no reference this is the DC Fourier amplitude.
  cplx mean_amplitude(int c,
                      const std::function<cplx(double, double)>& ref = {}) const {
    cplx acc(0);
    for (int j = 0; j < geom.ny; ++j)
      for (int i = 0; i < geom.nx; ++i) {
        const cplx v = comp[c][idx(i, j)];
        acc += ref ? v * std::conj(ref(geom.x(i), geom.y(j))) : v;
      }
    return acc;
  }
};

// Intensity-weighted mean transverse momentum of one component.
inline Vec2 momentum_centroid(const FieldGrid& f, int c) {
  std::vector<cplx> spec = f.comp[c];
  Fft2 fft(f.geom.nx, f.geom.ny);
  fft.forward(spec);
  double w = 0, sx = 0, sy = 0;
  for (int j = 0; j < f.geom.ny; ++j) {
    const double py = mode_momentum(j, f.geom.ny, f.geom.cell(), f.k);
    for (int i = 0; i < f.geom.nx; ++i) {
      const double px = mode_momentum(i, f.geom.nx, f.geom.cell(), f.k);
      const double a = std::norm(spec[std::size_t(j) * f.geom.nx + i]);
      w += a;
      sx += a * px;
      sy += a * py;
    }
  }
  if (!(w > 0)) throw NumericDomainError("momentum_centroid: empty component");
  return Vec2(sx / w, sy / w);
}

struct BeamSpec {
  double waist = 0.2;       // 1/e amplitude radius
  Vec2 center{0, 0};
  Vec2 tilt{0, 0};          // dimensionless transverse momentum
  int sigma = +1;           // +1 or -1
  double amplitude = 1.0;
};

// Exact mode propagator exp(-i k dz K) = cos(k dz E) - i sin(k dz E)/E K,
// optionally multiplied by exp(-i k dz n0) so the forward branch carries
// the slow envelope phase exp(+i k (E - n0) dz).
inline Mat4 kinetic_propagator(const Vec2& p_perp, double dz, double k, double n0,
                               const DiracMatrixSet& set,
                               bool carrier_reference = false) {
  const double e = fw_energy(p_perp, n0);
  const Mat4 kin =
      -n0 * set.m_z + set.m_z * set.m_perp_dot(p_perp);
  const double phi = k * dz * e;
  Mat4 p = std::cos(phi) * Mat4::Identity() - iu * (std::sin(phi) / e) * kin;
  if (carrier_reference) p *= std::polar(1.0, -k * dz * n0);
  return p;
}

struct StepOptions {
  bool carrier_reference = true;
  double boundary_frac = 0.10;   // absorbing band width per side
  double filter_lo = 0.80;       // spectral rolloff start, units of n0
  double filter_hi = 0.95;       // spectral cutoff, units of n0
};

// Accuracy guide for the splitting step: keeps the potential phase per
// half step small. The scheme itself is norm-stable for any dz.
inline double suggested_dz_bound(const MediumProfile& profile, double k) {
  const double zsup = std::max(profile.weakness_sup(), 1e-12);
  return std::numbers::pi / (4.0 * k * zsup);
}

class SplitStepPropagator {
 public:
  SplitStepPropagator(const MediumProfile& profile, const GridGeometry& geom,
                      double k, double dz, bool conjugated,
                      const StepOptions& opt = {})
      : profile_(&profile),
        geom_(geom),
        k_(k),
        dz_(dz),
        n0_(profile.n0()),
        conjugated_(conjugated),
        opt_(opt),
        fft_(geom.nx, geom.ny) {
    if (!(k > 0) || !(dz > 0))
      throw ValidationError("SplitStepPropagator: k and dz must be positive");
    const std::size_t n = std::size_t(geom.nx) * geom.ny;
    for (auto& s : spec_) s.assign(n, cplx(0));
    build_boundary_mask();
    build_kinetic_tables();
    if (profile.z_invariant()) {
      zeta_lo_.assign(n, 0.0);
      fill_zeta(0.0, zeta_lo_);
      zeta_static_ = true;
    }
  }

  double absorbed() const { return absorbed_; }
  double dz() const { return dz_; }

  void step(FieldGrid& f) {
    if (f.geom.nx != geom_.nx || f.geom.ny != geom_.ny ||
        f.geom.extent != geom_.extent || f.conjugated != conjugated_)
      throw ValidationError("SplitStepPropagator: field/propagator mismatch");
    const std::size_t n = std::size_t(geom_.nx) * geom_.ny;
    const double z0 = f.z;
    const double area = f.cell_area();

    if (!zeta_static_) {
      if (zeta_lo_.empty() || zeta_lo_z_ != z0) {
        zeta_lo_.assign(n, 0.0);
        fill_zeta(z0, zeta_lo_);
      }
      zeta_hi_.assign(n, 0.0);
      fill_zeta(z0 + dz_, zeta_hi_);
    }
    const std::vector<double>& zlo = zeta_lo_;
    const std::vector<double>& zhi = zeta_static_ ? zeta_lo_ : zeta_hi_;

    // half potential step exp(+i k zeta beta dz/2), fused with the copy
    // into the spectral workspace
    const double half = 0.5 * k_ * dz_;
    for (int c = 0; c < 4; ++c) {
      const double sgn = (c < 2) ? 1.0 : -1.0;
      const std::vector<cplx>& src = f.comp[c];
      std::vector<cplx>& dst = spec_[c];
      for (std::size_t i = 0; i < n; ++i)
        dst[i] = src[i] * std::polar(1.0, sgn * half * zlo[i]);
    }

    for (int c = 0; c < 4; ++c) fft_.forward(spec_[c]);

    // exact kinetic step per mode, with spectral band filter
    double filtered = 0;
    const double inv_n = 1.0 / double(n);
    for (int j = 0; j < geom_.ny; ++j) {
      const double py = pys_[j];
      for (int i = 0; i < geom_.nx; ++i) {
        const std::size_t m = std::size_t(j) * geom_.nx + i;
        const cplx a = kin_cos_[m];
        const cplx b = kin_sinc_[m];
        cplx v0 = spec_[0][m], v1 = spec_[1][m], v2 = spec_[2][m],
             v3 = spec_[3][m];
        if (filter_loss_[m] != 0.0)
          filtered += filter_loss_[m] *
                      (std::norm(v0) + std::norm(v1) + std::norm(v2) +
                       std::norm(v3));
        const cplx q(pxs_[i], conjugated_ ? -py : py);
        const cplx u = std::conj(q);
        const cplx kv0 = -n0_ * v0 + u * v2;
        const cplx kv1 = -n0_ * v1 + u * v3;
        const cplx kv2 = n0_ * v2 - q * v0;
        const cplx kv3 = n0_ * v3 - q * v1;
        spec_[0][m] = a * v0 - iu * b * kv0;
        spec_[1][m] = a * v1 - iu * b * kv1;
        spec_[2][m] = a * v2 - iu * b * kv2;
        spec_[3][m] = a * v3 - iu * b * kv3;
      }
    }
    absorbed_ += filtered * inv_n * area;

    for (int c = 0; c < 4; ++c) fft_.backward_scaled(spec_[c]);

    // second half potential step, absorbing boundary, write-back
    double mask_loss = 0, total = 0;
    for (int c = 0; c < 4; ++c) {
      const double sgn = (c < 2) ? 1.0 : -1.0;
      const std::vector<cplx>& src = spec_[c];
      std::vector<cplx>& dst = f.comp[c];
      for (std::size_t i = 0; i < n; ++i) {
        const cplx v = src[i] * std::polar(1.0, sgn * half * zhi[i]);
        const double m = mask_[i];
        mask_loss += (1.0 - m * m) * std::norm(v);
        const cplx w = m * v;
        total += std::norm(w);
        dst[i] = w;
      }
    }
    absorbed_ += mask_loss * area;
    if (!std::isfinite(total))
      throw NumericDomainError(
          "SplitStepPropagator: non-finite field detected, last good z = " +
          std::to_string(z0));
    f.z = z0 + dz_;

    if (!zeta_static_) {
      zeta_lo_.swap(zeta_hi_);
      zeta_lo_z_ = f.z;
    }
  }

 private:
  void build_boundary_mask() {
    const std::size_t n = std::size_t(geom_.nx) * geom_.ny;
    mask_.assign(n, 1.0);
    if (opt_.boundary_frac <= 0) return;
    const auto profile1d = [&](double coord, double width) {
      const double band = opt_.boundary_frac * width;
      const double x0 = 0.5 * width - band;
      const double d = std::abs(coord) - x0;
      if (d <= 0) return 1.0;
      const double t = d / (0.5 * band);
      return std::exp(-std::pow(t, 6));
    };
    for (int j = 0; j < geom_.ny; ++j) {
      const double my = profile1d(geom_.y(j), geom_.extent_y());
      for (int i = 0; i < geom_.nx; ++i)
        mask_[std::size_t(j) * geom_.nx + i] =
            my * profile1d(geom_.x(i), geom_.extent);
    }
  }

  void build_kinetic_tables() {
    const std::size_t n = std::size_t(geom_.nx) * geom_.ny;
    kin_cos_.assign(n, cplx(0));
    kin_sinc_.assign(n, cplx(0));
    filter_loss_.assign(n, 1.0);
    pxs_.resize(geom_.nx);
    pys_.resize(geom_.ny);
    for (int i = 0; i < geom_.nx; ++i)
      pxs_[i] = mode_momentum(i, geom_.nx, geom_.cell(), k_);
    for (int j = 0; j < geom_.ny; ++j)
      pys_[j] = mode_momentum(j, geom_.ny, geom_.cell(), k_);
    const cplx carrier =
        opt_.carrier_reference ? std::polar(1.0, -k_ * dz_ * n0_) : cplx(1.0);
    const double lo = opt_.filter_lo * n0_;
    const double hi = opt_.filter_hi * n0_;
    for (int j = 0; j < geom_.ny; ++j) {
      for (int i = 0; i < geom_.nx; ++i) {
        const std::size_t m = std::size_t(j) * geom_.nx + i;
        const double pp = std::hypot(pxs_[i], pys_[j]);
        double filt = 1.0;
        if (pp >= hi) {
          filt = 0.0;
        } else if (pp > lo) {
          const double t = (pp - lo) / (hi - lo);
          const double c = std::cos(0.5 * std::numbers::pi * t);
          filt = c * c;
        }
        filter_loss_[m] = 1.0 - filt * filt;
        if (filt == 0.0) {
          kin_cos_[m] = cplx(0);
          kin_sinc_[m] = cplx(0);
          continue;
        }
        const double e = std::sqrt(n0_ * n0_ - pp * pp);
        const double phi = k_ * dz_ * e;
        kin_cos_[m] = filt * carrier * std::cos(phi);
        kin_sinc_[m] = filt * carrier * (std::sin(phi) / e);
      }
    }
  }

  void fill_zeta(double z, std::vector<double>& out) const {
    for (int j = 0; j < geom_.ny; ++j)
      for (int i = 0; i < geom_.nx; ++i)
        out[std::size_t(j) * geom_.nx + i] =
            profile_->zeta_at(Vec3(geom_.x(i), geom_.y(j), z));
  }

  const MediumProfile* profile_;
  GridGeometry geom_;
  double k_, dz_, n0_;
  bool conjugated_;
  StepOptions opt_;
  Fft2 fft_;
  std::array<std::vector<cplx>, 4> spec_;
  std::vector<double> mask_;
  std::vector<cplx> kin_cos_, kin_sinc_;
  std::vector<double> filter_loss_;
  std::vector<double> pxs_, pys_;
  std::vector<double> zeta_lo_, zeta_hi_;
  double zeta_lo_z_ = 0;
  bool zeta_static_ = false;
  double absorbed_ = 0;
};

// One-shot convenience wrapper; scenario runs reuse a cached propagator.
inline FieldGrid step(const FieldGrid& field, double dz,
                      const MediumProfile& profile, double k,
                      const StepOptions& opt = {}) {
  FieldGrid out = field;
  SplitStepPropagator prop(profile, field.geom, k, dz, field.conjugated, opt);
  prop.step(out);
  return out;
}

// Circularly polarized Gaussian envelope: F_perp = a(x) (1, i sigma), with
// F_z fixed in the transverse Fourier domain by the divergence condition
// F_z = -(p_x F_x + p_y F_y)/p_z, then assembled into the spinor of the
// representation selected by sigma (sigma = -1 uses the conjugate set).
inline FieldGrid init_gaussian_beam(const BeamSpec& spec, const GridGeometry& geom,
                                    double n0, double k,
                                    const StepOptions& opt = {}) {
  if (spec.sigma != 1 && spec.sigma != -1)
    throw ValidationError("init_gaussian_beam: sigma must be +1 or -1");
  if (!(spec.waist > 0) || !(k > 0) || !(n0 > 0))
    throw ValidationError("init_gaussian_beam: waist, k, n0 must be positive");
  if (spec.waist < 8.0 * geom.cell())
    throw ValidationError(
        "init_gaussian_beam: under-resolved waist, need >= 8 cells per waist");
  const double spread = 2.0 / (k * spec.waist);
  const double p_nyq = std::numbers::pi / (geom.cell() * k);
  const double band = std::min(0.9 * p_nyq, opt.filter_lo * n0);
  if (spec.tilt.norm() + 3.0 * spread > band)
    throw ValidationError(
        "init_gaussian_beam: tilt too large for the grid bandwidth");

  const bool conj = spec.sigma < 0;
  FieldGrid f(geom, n0, k, conj);
  const std::size_t n = std::size_t(geom.nx) * geom.ny;
  std::vector<cplx> fx(n), fy(n), fz(n, cplx(0));
  const double w2 = spec.waist * spec.waist;
  for (int j = 0; j < geom.ny; ++j) {
    for (int i = 0; i < geom.nx; ++i) {
      const double dx = geom.x(i) - spec.center.x();
      const double dy = geom.y(j) - spec.center.y();
      const double env = spec.amplitude * std::exp(-(dx * dx + dy * dy) / w2);
      const cplx a =
          env * std::polar(1.0, k * (spec.tilt.x() * dx + spec.tilt.y() * dy));
      const std::size_t m = std::size_t(j) * geom.nx + i;
      fx[m] = a;
      fy[m] = iu * double(spec.sigma) * a;
    }
  }

  Fft2 fft(geom.nx, geom.ny);
  fft.forward(fx);
  fft.forward(fy);
  for (int j = 0; j < geom.ny; ++j) {
    const double py = mode_momentum(j, geom.ny, geom.cell(), k);
    for (int i = 0; i < geom.nx; ++i) {
      const double px = mode_momentum(i, geom.nx, geom.cell(), k);
      const std::size_t m = std::size_t(j) * geom.nx + i;
      const double pp2 = px * px + py * py;
      const double cut = opt.filter_hi * n0;
      if (pp2 >= cut * cut) {
        fz[m] = cplx(0);
        continue;
      }
      const double pz = std::sqrt(n0 * n0 - pp2);
      fz[m] = -(px * fx[m] + py * fy[m]) / pz;
    }
  }
  fft.backward_scaled(fz);
  fft.backward_scaled(fx);
  fft.backward_scaled(fy);

  for (std::size_t m = 0; m < n; ++m) {
    const Spinor4 s = spinor_from_field(Vec3c(fx[m], fy[m], fz[m]), conj);
    for (int c = 0; c < 4; ++c) f.comp[c][m] = s[c];
  }
  return f;
}

struct ProbeSample {
  double z = 0;
  Vec2 centroid_fwd{0, 0};  // component 1 (dominant forward channel)
  Vec2 centroid_bwd{0, 0};  // component 4; NaN when below threshold
  double energy_fwd = 0;
  double energy_bwd = 0;
  double beta_norm = 0;
  double absorbed = 0;
  double phase = 0;  // mean phase of the dominant component vs reference
};

struct ReferencePath {
  bool valid = false;
  // center and tilt of the zeroth-order beam at a given z
  std::function<void(double z, Vec2& center, Vec2& tilt)> eval;
};

struct ScenarioRun {
  std::vector<ProbeSample> probes;
  FieldGrid final_field;
  bool truncated = false;
  double truncated_at = 0;
  int sigma = +1;
};

using SnapshotSink = std::function<void(const FieldGrid&)>;

inline ScenarioRun run_scenario(const MediumProfile& profile, const BeamSpec& spec,
                                const GridGeometry& geom, double k, double z_end,
                                double dz, int probe_cadence,
                                const StepOptions& opt = {},
                                const ReferencePath& ref = {},
                                const SnapshotSink& snapshots = {}) {
  if (!(z_end > 0) || !(dz > 0))
    throw ValidationError("run_scenario: z_end and dz must be positive");
  const long nsteps = std::max(1L, long(std::ceil(z_end / dz - 1e-12)));
  const double dz_eff = z_end / double(nsteps);
  const int cadence = std::max(1, probe_cadence);

  ScenarioRun run;
  run.sigma = spec.sigma;
  run.final_field = init_gaussian_beam(spec, geom, profile.n0(), k, opt);
  SplitStepPropagator prop(profile, geom, k, dz_eff, run.final_field.conjugated,
                           opt);

  const auto probe = [&](const FieldGrid& f) {
    ProbeSample s;
    s.z = f.z;
    s.beta_norm = f.beta_norm();
    s.absorbed = prop.absorbed();
    s.energy_fwd = f.energy(0);
    s.energy_bwd = f.energy(3);
    s.centroid_fwd = f.centroid(0, opt.boundary_frac);
    try {
      s.centroid_bwd = f.centroid(3, opt.boundary_frac);
    } catch (const NumericDomainError&) {
      s.centroid_bwd = Vec2(std::nan(""), std::nan(""));
    }
    std::function<cplx(double, double)> refmode;
    if (ref.valid) {
      Vec2 c, t;
      ref.eval(f.z, c, t);
      const double w2 = spec.waist * spec.waist;
      refmode = [c, t, w2, k](double x, double y) {
        const double dx = x - c.x(), dy = y - c.y();
        return std::polar(std::exp(-(dx * dx + dy * dy) / w2),
                          k * (t.x() * dx + t.y() * dy));
      };
    }
    s.phase = std::arg(f.mean_amplitude(0, refmode));
    run.probes.push_back(s);
    if (snapshots) snapshots(f);
  };

  probe(run.final_field);
  for (long step = 0; step < nsteps; ++step) {
    try {
      prop.step(run.final_field);
    } catch (const NumericDomainError&) {
      run.truncated = true;
      run.truncated_at = run.final_field.z;
      return run;
    }
    if ((step + 1) % cadence == 0 || step + 1 == nsteps)
      probe(run.final_field);
  }
  return run;
}

struct RotationSample {
  double z = 0;
  double rotation = 0;       // 1/2 (phase_plus - phase_minus), unwrapped
  bool unwrap_warning = false;  // raw per-probe jump above pi/2
};

inline std::vector<double> unwrap_phases(const std::vector<double>& raw) {
  std::vector<double> out;
  out.reserve(raw.size());
  double offset = 0;
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0) {
      while (raw[i] + offset - out.back() > pi) offset -= 2.0 * pi;
      while (raw[i] + offset - out.back() < -pi) offset += 2.0 * pi;
    }
    out.push_back(raw[i] + offset);
  }
  return out;
}

// Polarization-plane rotation angle from matched runs of the two helicity
// representations over the same medium and launch. The common dynamical
// phase cancels in the phase difference; the optional geometric dynamical
// phase is only subtracted from the per-run diagnostics, not the result.
inline std::vector<RotationSample> rytov_measurement(
    const ScenarioRun& plus_run, const ScenarioRun& minus_run) {
  const auto& a = plus_run.probes;
  const auto& b = minus_run.probes;
  if (a.size() != b.size() || a.empty())
    throw ValidationError("rytov_measurement: probe series do not match");
  std::vector<double> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].z - b[i].z) > 1e-9)
      throw ValidationError("rytov_measurement: probe z grids do not match");
    pa.push_back(a[i].phase);
    pb.push_back(b[i].phase);
  }
  const std::vector<double> ua = unwrap_phases(pa);
  const std::vector<double> ub = unwrap_phases(pb);
  std::vector<RotationSample> out(a.size());
  constexpr double pi = std::numbers::pi;
  const double base = 0.5 * (ua[0] - ub[0]);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i].z = a[i].z;
    out[i].rotation = 0.5 * (ua[i] - ub[i]) - base;
    if (i > 0) {
      const bool jump_a = std::abs(ua[i] - ua[i - 1]) > 0.5 * pi;
      const bool jump_b = std::abs(ub[i] - ub[i - 1]) > 0.5 * pi;
      out[i].unwrap_warning = jump_a || jump_b;
    }
  }
  return out;
}

// Field snapshots reuse the gridded container format with 8 real planes,
// re/im per spinor component.
inline Container field_to_container(const FieldGrid& f) {
  Container c;
  c.kind = "field4";
  c.n0 = f.n0;
  c.dims = {f.geom.nx, f.geom.ny, 1};
  c.spacing = Vec3(f.geom.cell(), f.geom.cell(), 0);
  c.origin = Vec3(f.geom.x(0), f.geom.y(0), f.z);
  c.extra["z"] = f.z;
  c.extra["k"] = f.k;
  c.extra["conjugated"] = f.conjugated ? 1.0 : 0.0;
  c.extra["extent"] = f.geom.extent;
  const std::size_t n = std::size_t(f.geom.nx) * f.geom.ny;
  c.data.resize(8 * n);
  for (int comp = 0; comp < 4; ++comp)
    for (std::size_t m = 0; m < n; ++m) {
      c.data[(2 * comp + 0) * n + m] = f.comp[comp][m].real();
      c.data[(2 * comp + 1) * n + m] = f.comp[comp][m].imag();
    }
  return c;
}

inline FieldGrid field_from_container(const Container& c) {
  if (c.kind != "field4")
    throw IoError("field_from_container: container kind is not field4");
  GridGeometry geom;
  geom.nx = int(c.dims[0]);
  geom.ny = int(c.dims[1]);
  geom.extent = c.extra.count("extent") ? c.extra.at("extent")
                                        : c.spacing.x() * c.dims[0];
  FieldGrid f(geom, c.n0, c.extra.count("k") ? c.extra.at("k") : 1.0,
              c.extra.count("conjugated") && c.extra.at("conjugated") != 0.0);
  f.z = c.extra.count("z") ? c.extra.at("z") : 0.0;
  const std::size_t n = std::size_t(geom.nx) * geom.ny;
  if (c.data.size() != 8 * n)
    throw IoError("field_from_container: payload size mismatch");
  for (int comp = 0; comp < 4; ++comp)
    for (std::size_t m = 0; m < n; ++m)
      f.comp[comp][m] = cplx(c.data[(2 * comp + 0) * n + m],
                             c.data[(2 * comp + 1) * n + m]);
  return f;
}

}  // namespace parax
