#pragma once

// Refractive-index models n(x) = n0 + zeta(x) with analytic or gridded
// perturbations. Construction enforces the weak-inhomogeneity bound
// sup|zeta| <= 0.1 n0 over the declared domain unless explicitly
// overridden, in which case the profile is tagged out-of-regime.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "parax/container.hpp"
#include "parax/errors.hpp"
#include "parax/types.hpp"

namespace parax {

enum class MediumKind {
  homogeneous,
  linear,
  grin,
  gaussian_defect,
  gridded2d,
  gridded3d,
};

inline const char* to_string(MediumKind k) {
  switch (k) {
    case MediumKind::homogeneous: return "homogeneous";
    case MediumKind::linear: return "linear";
    case MediumKind::grin: return "grin";
    case MediumKind::gaussian_defect: return "gaussian_defect";
    case MediumKind::gridded2d: return "gridded2d";
    case MediumKind::gridded3d: return "gridded3d";
  }
  return "?";
}

struct Domain {
  Vec3 lo{-1, -1, 0};
  Vec3 hi{1, 1, 1};

  bool contains(const Vec3& x, double tol = 1e-9) const {
    for (int a = 0; a < 3; ++a) {
      const double pad = tol * std::max(1.0, hi[a] - lo[a]);
      if (x[a] < lo[a] - pad || x[a] > hi[a] + pad) return false;
    }
    return true;
  }
};

struct AdiabaticityReport {
  double max_ratio = 0;   // max |grad n| / (k n)
  double mean_ratio = 0;
};

class MediumProfile {
 public:
  static MediumProfile homogeneous(double n0, const Domain& dom) {
    MediumProfile m(MediumKind::homogeneous, n0, dom);
    m.finalize(false);
    return m;
  }

  static MediumProfile linear(double n0, const Vec3& gradient, const Domain& dom,
                              bool allow_strong = false) {
    MediumProfile m(MediumKind::linear, n0, dom);
    m.gradient_ = gradient;
    m.finalize(allow_strong);
    return m;
  }

  // zeta = -1/2 alpha^2 |r_perp - center|^2
  static MediumProfile grin(double n0, double alpha, const Vec2& center,
                            const Domain& dom, bool allow_strong = false) {
    MediumProfile m(MediumKind::grin, n0, dom);
    m.alpha_ = alpha;
    m.grin_center_ = center;
    m.finalize(allow_strong);
    return m;
  }

  // zeta = a exp(-|r - center|^2 / w^2)
  static MediumProfile gaussian_defect(double n0, double amplitude,
                                       const Vec3& center, double width,
                                       const Domain& dom,
                                       bool allow_strong = false) {
    if (!(width > 0))
      throw ValidationError("gaussian_defect: width must be positive");
    MediumProfile m(MediumKind::gaussian_defect, n0, dom);
    m.defect_a_ = amplitude;
    m.defect_center_ = center;
    m.defect_w_ = width;
    m.finalize(allow_strong);
    return m;
  }

  // z-invariant sampled zeta on a uniform transverse grid (x fastest).
  static MediumProfile gridded2d(double n0, std::vector<double> zeta, int nx,
                                 int ny, const Vec2& spacing, const Vec2& origin,
                                 double z_lo, double z_hi,
                                 bool allow_strong = false) {
    if (nx < 2 || ny < 2 || zeta.size() != std::size_t(nx) * ny)
      throw ValidationError("gridded2d: inconsistent sample dimensions");
    Domain dom;
    dom.lo = Vec3(origin.x(), origin.y(), z_lo);
    dom.hi = Vec3(origin.x() + spacing.x() * (nx - 1),
                  origin.y() + spacing.y() * (ny - 1), z_hi);
    MediumProfile m(MediumKind::gridded2d, n0, dom);
    m.dims_ = {nx, ny, 1};
    m.spacing_ = Vec3(spacing.x(), spacing.y(), 0);
    m.origin_ = Vec3(origin.x(), origin.y(), z_lo);
    m.samples_ = std::move(zeta);
    m.finalize(allow_strong);
    return m;
  }

  static MediumProfile gridded3d(double n0, std::vector<double> zeta, int nx,
                                 int ny, int nz, const Vec3& spacing,
                                 const Vec3& origin, bool allow_strong = false) {
    if (nx < 2 || ny < 2 || nz < 2 ||
        zeta.size() != std::size_t(nx) * ny * nz)
      throw ValidationError("gridded3d: inconsistent sample dimensions");
    Domain dom;
    dom.lo = origin;
    dom.hi = origin + Vec3(spacing.x() * (nx - 1), spacing.y() * (ny - 1),
                           spacing.z() * (nz - 1));
    MediumProfile m(MediumKind::gridded3d, n0, dom);
    m.dims_ = {nx, ny, nz};
    m.spacing_ = spacing;
    m.origin_ = origin;
    m.samples_ = std::move(zeta);
    m.finalize(allow_strong);
    return m;
  }

  static MediumProfile from_container(const std::string& path,
                                      bool allow_strong = false) {
    Container c = read_container(path);
    if (c.kind == "zeta2d") {
      double z_lo = 0, z_hi = 1;
      if (auto it = c.extra.find("z_lo"); it != c.extra.end()) z_lo = it->second;
      if (auto it = c.extra.find("z_hi"); it != c.extra.end()) z_hi = it->second;
      return gridded2d(c.n0, std::move(c.data), int(c.dims[0]), int(c.dims[1]),
                       Vec2(c.spacing.x(), c.spacing.y()),
                       Vec2(c.origin.x(), c.origin.y()), z_lo, z_hi, allow_strong);
    }
    if (c.kind == "zeta3d") {
      return gridded3d(c.n0, std::move(c.data), int(c.dims[0]), int(c.dims[1]),
                       int(c.dims[2]), c.spacing, c.origin, allow_strong);
    }
    throw IoError("from_container: unsupported kind '" + c.kind + "' in " + path);
  }

  Container to_container() const {
    if (kind_ != MediumKind::gridded2d && kind_ != MediumKind::gridded3d)
      throw ValidationError("to_container: only gridded profiles serialize");
    Container c;
    c.kind = (kind_ == MediumKind::gridded2d) ? "zeta2d" : "zeta3d";
    c.n0 = n0_;
    c.dims = {dims_[0], dims_[1], dims_[2]};
    c.spacing = spacing_;
    c.origin = origin_;
    if (kind_ == MediumKind::gridded2d) {
      c.extra["z_lo"] = domain_.lo.z();
      c.extra["z_hi"] = domain_.hi.z();
    }
    c.data = samples_;
    return c;
  }

  MediumKind kind() const { return kind_; }
  double n0() const { return n0_; }
  const Domain& domain() const { return domain_; }
  bool out_of_regime() const { return out_of_regime_; }
  double weakness_sup() const { return weakness_sup_; }
  bool z_invariant() const {
    switch (kind_) {
      case MediumKind::homogeneous:
      case MediumKind::grin:
      case MediumKind::gridded2d:
        return true;
      case MediumKind::linear:
        return gradient_.z() == 0.0;
      default:
        return false;
    }
  }

  double zeta_at(const Vec3& x) const {
    require_inside(x);
    return zeta_unchecked(x);
  }

  double index_at(const Vec3& x) const { return n0_ + zeta_at(x); }

  Vec3 grad_index(const Vec3& x) const {
    require_inside(x);
    switch (kind_) {
      case MediumKind::homogeneous:
        return Vec3::Zero();
      case MediumKind::linear:
        return gradient_;
      case MediumKind::grin: {
        const Vec2 d(x.x() - grin_center_.x(), x.y() - grin_center_.y());
        return Vec3(-alpha_ * alpha_ * d.x(), -alpha_ * alpha_ * d.y(), 0.0);
      }
      case MediumKind::gaussian_defect: {
        const Vec3 d = x - defect_center_;
        const double g =
            defect_a_ * std::exp(-d.squaredNorm() / (defect_w_ * defect_w_));
        return (-2.0 / (defect_w_ * defect_w_)) * g * d;
      }
      case MediumKind::gridded2d:
      case MediumKind::gridded3d:
        return gridded_gradient(x);
    }
    return Vec3::Zero();
  }

  // sup |grad n| over the domain, used for automatic ray step sizing.
  double grad_sup() const {
    switch (kind_) {
      case MediumKind::homogeneous:
        return 0.0;
      case MediumKind::linear:
        return gradient_.norm();
      case MediumKind::grin: {
        double r2 = 0;
        for (double cx : {domain_.lo.x(), domain_.hi.x()})
          for (double cy : {domain_.lo.y(), domain_.hi.y()}) {
            const Vec2 d(cx - grin_center_.x(), cy - grin_center_.y());
            r2 = std::max(r2, d.squaredNorm());
          }
        return alpha_ * alpha_ * std::sqrt(r2);
      }
      case MediumKind::gaussian_defect:
        return std::abs(defect_a_) * std::sqrt(2.0 / std::exp(1.0)) / defect_w_;
      case MediumKind::gridded2d:
      case MediumKind::gridded3d: {
        double worst = 0;
        for (std::size_t i = 0; i + 1 < samples_.size(); ++i)
          worst = std::max(worst, std::abs(samples_[i + 1] - samples_[i]));
        const double hmin = spacing_.head<2>().minCoeff();
        return (hmin > 0) ? worst / hmin : 0.0;
      }
    }
    return 0.0;
  }

  AdiabaticityReport adiabaticity_report(double k, const Domain& region,
                                         int samples_per_axis = 17) const {
    if (!(k > 0)) throw ValidationError("adiabaticity_report: k must be positive");
    AdiabaticityReport rep;
    double sum = 0;
    std::size_t count = 0;
    const int m = std::max(samples_per_axis, 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
          Vec3 x;
          const double frac[3] = {double(i), double(j), double(l)};
          for (int a = 0; a < 3; ++a) {
            const double span = region.hi[a] - region.lo[a];
            x[a] = (span == 0 || m == 1)
                       ? region.lo[a]
                       : region.lo[a] + span * frac[a] / (m - 1);
          }
          const double ratio = grad_index(x).norm() / (k * index_at(x));
          rep.max_ratio = std::max(rep.max_ratio, ratio);
          sum += ratio;
          ++count;
        }
    rep.mean_ratio = sum / double(count);
    return rep;
  }

 private:
  MediumProfile(MediumKind kind, double n0, const Domain& dom)
      : kind_(kind), n0_(n0), domain_(dom) {
    if (!(n0 > 0)) throw ValidationError("MediumProfile: n0 must be positive");
    for (int a = 0; a < 3; ++a)
      if (domain_.hi[a] < domain_.lo[a])
        throw ValidationError("MediumProfile: domain hi < lo");
  }

  void finalize(bool allow_strong) {
    weakness_sup_ = compute_weakness_sup();
    const double bound = 0.1 * n0_;
    if (weakness_sup_ > bound * (1.0 + 1e-12)) {
      if (!allow_strong)
        throw ValidationError(
            "MediumProfile: sup|zeta| = " + std::to_string(weakness_sup_) +
            " exceeds weak-inhomogeneity bound 0.1 n0 = " + std::to_string(bound) +
            " over the declared domain (set allow_strong to override)");
      out_of_regime_ = true;
    }
  }

  double compute_weakness_sup() const {
    switch (kind_) {
      case MediumKind::homogeneous:
        return 0.0;
      case MediumKind::linear: {
        double worst = 0;
        for (double cx : {domain_.lo.x(), domain_.hi.x()})
          for (double cy : {domain_.lo.y(), domain_.hi.y()})
            for (double cz : {domain_.lo.z(), domain_.hi.z()})
              worst = std::max(worst, std::abs(gradient_.dot(Vec3(cx, cy, cz))));
        return worst;
      }
      case MediumKind::grin: {
        double r2 = 0;
        for (double cx : {domain_.lo.x(), domain_.hi.x()})
          for (double cy : {domain_.lo.y(), domain_.hi.y()}) {
            const Vec2 d(cx - grin_center_.x(), cy - grin_center_.y());
            r2 = std::max(r2, d.squaredNorm());
          }
        return 0.5 * alpha_ * alpha_ * r2;
      }
      case MediumKind::gaussian_defect:
        return std::abs(defect_a_);
      case MediumKind::gridded2d:
      case MediumKind::gridded3d: {
        double worst = 0;
        for (double v : samples_) worst = std::max(worst, std::abs(v));
        return worst;
      }
    }
    return 0.0;
  }

  void require_inside(const Vec3& x) const {
    if (!domain_.contains(x)) {
      throw NumericDomainError(
          std::string("MediumProfile(") + to_string(kind_) + "): position (" +
          std::to_string(x.x()) + ", " + std::to_string(x.y()) + ", " +
          std::to_string(x.z()) + ") outside declared domain [" +
          std::to_string(domain_.lo.x()) + "," + std::to_string(domain_.hi.x()) +
          "]x[" + std::to_string(domain_.lo.y()) + "," +
          std::to_string(domain_.hi.y()) + "]x[" +
          std::to_string(domain_.lo.z()) + "," + std::to_string(domain_.hi.z()) +
          "]");
    }
  }

  double zeta_unchecked(const Vec3& x) const {
    switch (kind_) {
      case MediumKind::homogeneous:
        return 0.0;
      case MediumKind::linear:
        return gradient_.dot(x);
      case MediumKind::grin: {
        const Vec2 d(x.x() - grin_center_.x(), x.y() - grin_center_.y());
        return -0.5 * alpha_ * alpha_ * d.squaredNorm();
      }
      case MediumKind::gaussian_defect: {
        const Vec3 d = x - defect_center_;
        return defect_a_ * std::exp(-d.squaredNorm() / (defect_w_ * defect_w_));
      }
      case MediumKind::gridded2d:
        return interp2(x.x(), x.y());
      case MediumKind::gridded3d:
        return interp3(x);
    }
    return 0.0;
  }

  // Multilinear interpolation; nodes reproduce sample values exactly.
  double interp2(double x, double y) const {
    const int nx = dims_[0], ny = dims_[1];
    double fx = (x - origin_.x()) / spacing_.x();
    double fy = (y - origin_.y()) / spacing_.y();
    fx = std::clamp(fx, 0.0, double(nx - 1));
    fy = std::clamp(fy, 0.0, double(ny - 1));
    const int i = std::min(int(fx), nx - 2);
    const int j = std::min(int(fy), ny - 2);
    const double tx = fx - i, ty = fy - j;
    const auto s = [&](int a, int b) { return samples_[std::size_t(b) * nx + a]; };
    return (1 - tx) * (1 - ty) * s(i, j) + tx * (1 - ty) * s(i + 1, j) +
           (1 - tx) * ty * s(i, j + 1) + tx * ty * s(i + 1, j + 1);
  }

  double interp3(const Vec3& x) const {
    const int nx = dims_[0], ny = dims_[1], nz = dims_[2];
    double f[3];
    for (int a = 0; a < 3; ++a) {
      f[a] = (x[a] - origin_[a]) / spacing_[a];
      f[a] = std::clamp(f[a], 0.0, double(dims_[a] - 1));
    }
    const int i = std::min(int(f[0]), nx - 2);
    const int j = std::min(int(f[1]), ny - 2);
    const int l = std::min(int(f[2]), nz - 2);
    const double tx = f[0] - i, ty = f[1] - j, tz = f[2] - l;
    const auto s = [&](int a, int b, int c) {
      return samples_[(std::size_t(c) * ny + b) * nx + a];
    };
    const double c00 = (1 - tx) * s(i, j, l) + tx * s(i + 1, j, l);
    const double c10 = (1 - tx) * s(i, j + 1, l) + tx * s(i + 1, j + 1, l);
    const double c01 = (1 - tx) * s(i, j, l + 1) + tx * s(i + 1, j, l + 1);
    const double c11 = (1 - tx) * s(i, j + 1, l + 1) + tx * s(i + 1, j + 1, l + 1);
    const double c0 = (1 - ty) * c00 + ty * c10;
    const double c1 = (1 - ty) * c01 + ty * c11;
    return (1 - tz) * c0 + tz * c1;
  }

  // Central differences of the interpolant, step = half grid spacing.
  Vec3 gridded_gradient(const Vec3& x) const {
    Vec3 g = Vec3::Zero();
    const int naxes = (kind_ == MediumKind::gridded2d) ? 2 : 3;
    for (int a = 0; a < naxes; ++a) {
      const double h = 0.5 * spacing_[a];
      Vec3 xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      if (xp[a] > domain_.hi[a] || xm[a] < domain_.lo[a])
        throw NumericDomainError(
            "MediumProfile(gridded): gradient stencil exceeds the sample box; "
            "a margin of half a grid spacing is required");
      g[a] = (zeta_unchecked(xp) - zeta_unchecked(xm)) / (2.0 * h);
    }
    return g;
  }

  MediumKind kind_;
  double n0_;
  Domain domain_;
  bool out_of_regime_ = false;
  double weakness_sup_ = 0.0;

  Vec3 gradient_ = Vec3::Zero();        // linear
  double alpha_ = 0.0;                  // grin
  Vec2 grin_center_ = Vec2::Zero();     // grin
  double defect_a_ = 0.0;               // gaussian_defect
  Vec3 defect_center_ = Vec3::Zero();   // gaussian_defect
  double defect_w_ = 1.0;               // gaussian_defect
  std::array<std::int64_t, 3> dims_{1, 1, 1};  // gridded
  Vec3 spacing_ = Vec3::Zero();         // gridded
  Vec3 origin_ = Vec3::Zero();          // gridded
  std::vector<double> samples_;         // gridded
};

}  // namespace parax
