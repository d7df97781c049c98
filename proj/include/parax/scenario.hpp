#pragma once

// Scenario orchestration: builds media and beams from a ScenarioConfig,
// runs the three-helicity ray traces and the two-representation wave
// runs, and reads/writes the CSV and JSON artifacts that the compare
// step joins.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parax/config.hpp"
#include "parax/errors.hpp"
#include "parax/medium.hpp"
#include "parax/ray_transport.hpp"
#include "parax/version.hpp"
#include "parax/wave_oracle.hpp"

namespace parax {

inline GridGeometry make_grid(const ScenarioConfig& cfg) {
  GridGeometry g;
  g.nx = cfg.grid_n;
  g.ny = cfg.grid_n;
  g.extent = cfg.grid_extent;
  return g;
}

inline MediumProfile make_medium(const ScenarioConfig& cfg) {
  Domain dom;
  if (cfg.medium_domain_set) {
    dom.lo = cfg.medium_domain_lo;
    dom.hi = cfg.medium_domain_hi;
  } else {
    const GridGeometry g = make_grid(cfg);
    dom.lo = Vec3(-0.5 * g.extent, -0.5 * g.extent_y(), 0.0);
    dom.hi = Vec3(0.5 * g.extent, 0.5 * g.extent_y(), cfg.z_end + 1.0);
  }
  if (cfg.medium_kind == "homogeneous")
    return MediumProfile::homogeneous(cfg.medium_n0, dom);
  if (cfg.medium_kind == "linear")
    return MediumProfile::linear(cfg.medium_n0, cfg.medium_gradient, dom,
                                 cfg.medium_allow_strong);
  if (cfg.medium_kind == "grin")
    return MediumProfile::grin(cfg.medium_n0, cfg.medium_alpha,
                               cfg.medium_grin_center, dom,
                               cfg.medium_allow_strong);
  if (cfg.medium_kind == "gaussian_defect")
    return MediumProfile::gaussian_defect(
        cfg.medium_n0, cfg.medium_defect_amplitude, cfg.medium_defect_center,
        cfg.medium_defect_width, dom, cfg.medium_allow_strong);
  if (cfg.medium_kind == "gridded") {
    const std::filesystem::path p =
        cfg.config_dir.empty()
            ? std::filesystem::path(cfg.medium_file)
            : std::filesystem::path(cfg.config_dir) / cfg.medium_file;
    return MediumProfile::from_container(p.string(), cfg.medium_allow_strong);
  }
  throw ValidationError("make_medium: unknown kind " + cfg.medium_kind);
}

inline BeamSpec make_beam(const ScenarioConfig& cfg, int sigma) {
  BeamSpec b;
  b.waist = cfg.beam_waist;
  b.center = cfg.beam_center;
  b.tilt = cfg.beam_tilt;
  b.sigma = sigma;
  b.amplitude = cfg.beam_amplitude;
  return b;
}

inline std::string output_header_comment(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "# tool parax " << kVersion << "\n";
  os << "# scenario " << cfg.scenario << "\n";
  os << "# config_hash " << cfg.hash_hex() << "\n";
  os << "# units transverse lengths set the unit; k dimensionless; |p| = n\n";
  return os.str();
}

struct TraceOptions {
  bool zeroth_order = false;    // drop the Berry term (k^-1 -> 0)
  bool strict_paraxial = false; // force p_z = n0
};

struct TraceResult {
  Trajectory plus, zero, minus;
  Vec3 deflection_quad_plus = Vec3::Zero();
  Vec3 deflection_quad_minus = Vec3::Zero();
  Vec2 realized_shift_plus = Vec2::Zero();
  Vec2 realized_shift_minus = Vec2::Zero();
  Vec2 inflight_shift_plus = Vec2::Zero();
  Vec2 inflight_shift_minus = Vec2::Zero();
  double berry_quad_plus = 0, berry_quad_minus = 0;
  double berry_inflight_plus = 0, berry_inflight_minus = 0;
  RytovAngles rytov;
  double dynamical_phase_zero = 0;
  TraceOptions options;
};

inline TraceResult run_trace(const ScenarioConfig& cfg,
                             const TraceOptions& opts = {}) {
  const MediumProfile medium = make_medium(cfg);
  StepControl ctrl;
  ctrl.dz = cfg.ray_dz;
  ctrl.max_dp_step = cfg.ray_max_dp_step;
  ctrl.include_berry = !opts.zeroth_order;
  ctrl.strict_paraxial = opts.strict_paraxial;

  const Vec3 r0(cfg.beam_center.x(), cfg.beam_center.y(), 0.0);
  const auto trace_sigma = [&](int sigma) {
    const RayState init = launch_ray(medium, r0, cfg.beam_tilt, sigma);
    return trace_ray(medium, init, cfg.k, cfg.z_end, ctrl);
  };

  TraceResult tr;
  tr.options = opts;
  tr.plus = trace_sigma(+1);
  tr.zero = trace_sigma(0);
  tr.minus = trace_sigma(-1);

  tr.deflection_quad_plus = spin_hall_deflection(tr.plus, cfg.k, +1);
  tr.deflection_quad_minus = spin_hall_deflection(tr.minus, cfg.k, -1);
  const auto tail = [](const Trajectory& t) { return t.samples.back().state; };
  tr.realized_shift_plus =
      (tail(tr.plus).r - tail(tr.zero).r).head<2>();
  tr.realized_shift_minus =
      (tail(tr.minus).r - tail(tr.zero).r).head<2>();
  tr.inflight_shift_plus = tail(tr.plus).anomalous_shift.head<2>();
  tr.inflight_shift_minus = tail(tr.minus).anomalous_shift.head<2>();
  tr.berry_quad_plus = berry_phase(tr.plus, +1);
  tr.berry_quad_minus = berry_phase(tr.minus, -1);
  tr.berry_inflight_plus = tail(tr.plus).berry_phase;
  tr.berry_inflight_minus = tail(tr.minus).berry_phase;
  tr.dynamical_phase_zero = tail(tr.zero).dynamical_phase;

  std::vector<double> theta, phi;
  angles_history(tr.zero, theta, phi);
  tr.rytov = rytov_angle_closed(theta, phi);
  return tr;
}

inline nlohmann::ordered_json trace_summary_json(const ScenarioConfig& cfg,
                                                 const TraceResult& tr) {
  nlohmann::ordered_json j;
  j["tool"] = "parax";
  j["version"] = kVersion;
  j["scenario"] = cfg.scenario;
  j["config_hash"] = cfg.hash_hex();
  j["units"] = "transverse lengths set the unit; k dimensionless; |p| = n";
  j["k"] = cfg.k;
  j["z_end"] = cfg.z_end;
  j["zeroth_order_mode"] = tr.options.zeroth_order;
  j["strict_paraxial"] = tr.options.strict_paraxial;
  const auto side = [](const Vec3& defl, const Vec2& realized,
                       const Vec2& inflight, double bq, double bi) {
    nlohmann::ordered_json s;
    s["deflection_quadrature"] = {defl.x(), defl.y()};
    s["realized_shift"] = {realized.x(), realized.y()};
    s["inflight_shift"] = {inflight.x(), inflight.y()};
    s["berry_phase_quadrature"] = bq;
    s["berry_phase_inflight"] = bi;
    return s;
  };
  j["sigma_plus"] =
      side(tr.deflection_quad_plus, tr.realized_shift_plus,
           tr.inflight_shift_plus, tr.berry_quad_plus, tr.berry_inflight_plus);
  j["sigma_minus"] =
      side(tr.deflection_quad_minus, tr.realized_shift_minus,
           tr.inflight_shift_minus, tr.berry_quad_minus, tr.berry_inflight_minus);
  nlohmann::ordered_json ry;
  ry["quarter_tan2"] = tr.rytov.quarter_tan2;
  ry["quarter_theta2"] = tr.rytov.quarter_theta2;
  ry["half_theta2"] = tr.rytov.half_theta2;
  ry["large_angle_warning"] = tr.rytov.large_angle_warning;
  j["rytov"] = ry;
  j["dynamical_phase_zeroth"] = tr.dynamical_phase_zero;
  nlohmann::ordered_json tol;
  tol["shift_rel_tol"] = cfg.compare_shift_rel_tol;
  tol["rytov_band_rel"] = cfg.compare_rytov_band_rel;
  j["compare_tolerances"] = tol;
  return j;
}

struct BpmOptions {
  bool snapshots = false;
  std::string snapshot_dir;
};

struct BpmResult {
  ScenarioRun plus, minus;
  std::vector<RotationSample> rotation;
};

// Zeroth-order reference path used as the shared phase reference of the
// two helicity runs; any common reference cancels in their difference.
inline ReferencePath reference_from_trajectory(const Trajectory& traj) {
  struct Table {
    std::vector<double> z;
    std::vector<Vec2> c, t;
  };
  auto table = std::make_shared<Table>();
  for (const auto& s : traj.samples) {
    table->z.push_back(s.z);
    table->c.push_back(s.state.r.head<2>());
    table->t.push_back(s.state.p.head<2>());
  }
  ReferencePath ref;
  ref.valid = true;
  ref.eval = [table](double z, Vec2& center, Vec2& tilt) {
    const auto& zs = table->z;
    const auto it = std::lower_bound(zs.begin(), zs.end(), z);
    if (it == zs.begin()) {
      center = table->c.front();
      tilt = table->t.front();
      return;
    }
    if (it == zs.end()) {
      center = table->c.back();
      tilt = table->t.back();
      return;
    }
    const std::size_t hi = std::size_t(it - zs.begin());
    const std::size_t lo = hi - 1;
    const double f = (z - zs[lo]) / (zs[hi] - zs[lo]);
    center = (1 - f) * table->c[lo] + f * table->c[hi];
    tilt = (1 - f) * table->t[lo] + f * table->t[hi];
  };
  return ref;
}

inline BpmResult run_bpm(const ScenarioConfig& cfg, const BpmOptions& opts = {}) {
  const MediumProfile medium = make_medium(cfg);
  const GridGeometry geom = make_grid(cfg);
  StepOptions sopt;
  sopt.boundary_frac = cfg.bpm_boundary_frac;

  StepControl rctrl;
  rctrl.dz = cfg.ray_dz;
  rctrl.max_dp_step = cfg.ray_max_dp_step;
  rctrl.include_berry = false;
  const RayState init = launch_ray(
      medium, Vec3(cfg.beam_center.x(), cfg.beam_center.y(), 0.0), cfg.beam_tilt,
      0);
  const Trajectory ref_traj = trace_ray(medium, init, cfg.k, cfg.z_end, rctrl);
  const ReferencePath ref = reference_from_trajectory(ref_traj);

  BpmResult out;
  const auto run_one = [&](int sigma) {
    SnapshotSink sink;
    if (opts.snapshots) {
      const std::string tag = sigma > 0 ? "plus" : "minus";
      const std::string dir =
          opts.snapshot_dir.empty() ? std::string(".") : opts.snapshot_dir;
      sink = [&, tag, dir](const FieldGrid& f) {
        // first and final probes only
        if (!(f.z == 0.0 || std::abs(f.z - cfg.z_end) < 1e-9)) return;
        Container c = field_to_container(f);
        c.extra["config_hash_prefix"] =
            double(std::stoull(cfg.hash_hex().substr(0, 8), nullptr, 16));
        write_container(dir + "/" + cfg.scenario + "_field_" + tag +
                            (f.z == 0.0 ? "_start" : "_end") + ".pxc",
                        c);
      };
    }
    return run_scenario(medium, make_beam(cfg, sigma), geom, cfg.k, cfg.z_end,
                        cfg.bpm_dz, cfg.bpm_probe_cadence, sopt, ref, sink);
  };
  out.plus = run_one(+1);
  out.minus = run_one(-1);
  if (!out.plus.truncated && !out.minus.truncated)
    out.rotation = rytov_measurement(out.plus, out.minus);
  return out;
}

// Probe CSV columns; beta_norm and absorbed_energy refer to the sigma=+1
// run, the sigma=-1 counterparts are covered by the test suite.
inline constexpr const char* kProbeCsvHeader =
    "z,cx_plus,cy_plus,cx_minus,cy_minus,energy_plus,energy_minus,beta_norm,"
    "absorbed_energy,phase_plus,phase_minus,rotation";

inline void write_probe_csv(std::ostream& os, const ScenarioConfig& cfg,
                            const BpmResult& bpm) {
  os.precision(17);
  os << std::scientific;
  os << output_header_comment(cfg);
  os << kProbeCsvHeader << "\n";
  const std::size_t n =
      std::min(bpm.plus.probes.size(), bpm.minus.probes.size());
  for (std::size_t i = 0; i < n; ++i) {
    const ProbeSample& a = bpm.plus.probes[i];
    const ProbeSample& b = bpm.minus.probes[i];
    const double rot = (i < bpm.rotation.size()) ? bpm.rotation[i].rotation
                                                 : std::nan("");
    os << a.z << ',' << a.centroid_fwd.x() << ',' << a.centroid_fwd.y() << ','
       << b.centroid_fwd.x() << ',' << b.centroid_fwd.y() << ',' << a.energy_fwd
       << ',' << b.energy_fwd << ',' << a.beta_norm << ',' << a.absorbed << ','
       << a.phase << ',' << b.phase << ',' << rot << '\n';
  }
  if (bpm.plus.truncated || bpm.minus.truncated) {
    os << "# truncated_at "
       << (bpm.plus.truncated ? bpm.plus.truncated_at : bpm.minus.truncated_at)
       << "\n";
  }
}

struct ProbeTable {
  std::string scenario;
  std::string config_hash;
  std::vector<std::array<double, 12>> rows;
  bool truncated = false;
};

inline ProbeTable read_probe_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_probe_csv: cannot open " + path);
  ProbeTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "scenario") ls >> t.scenario;
      if (key == "config_hash") ls >> t.config_hash;
      if (key == "truncated_at") t.truncated = true;
      continue;
    }
    if (line.rfind("z,", 0) == 0) continue;  // column header
    std::array<double, 12> row{};
    std::istringstream ls(line);
    std::string tok;
    for (int c = 0; c < 12; ++c) {
      if (!std::getline(ls, tok, ','))
        throw IoError("read_probe_csv: short row in " + path);
      row[std::size_t(c)] = std::stod(tok);
    }
    t.rows.push_back(row);
  }
  if (t.rows.empty()) throw IoError("read_probe_csv: no data rows in " + path);
  return t;
}

struct CompareRow {
  std::string name;
  double predicted = 0;
  double measured = 0;
  double relative_discrepancy = 0;
  double tolerance = 0;
  bool pass = false;
  std::string note;
};

struct CompareReport {
  std::string scenario;
  std::string config_hash;
  std::vector<CompareRow> rows;
  double rytov_paper_quarter_tan2 = 0;
  double rytov_paper_quarter_theta2 = 0;
  double rytov_literature_half_theta2 = 0;
  double rytov_measured = 0;
  double rytov_band_lo = 0, rytov_band_hi = 0;
  bool rytov_in_band = false;
  bool all_pass = false;
};

inline CompareReport make_compare(const nlohmann::json& summary,
                                  const ProbeTable& probes) {
  CompareReport rep;
  rep.scenario = summary.at("scenario").get<std::string>();
  rep.config_hash = summary.at("config_hash").get<std::string>();
  if (!probes.scenario.empty() && probes.scenario != rep.scenario)
    throw ValidationError("compare: scenario mismatch: summary '" +
                          rep.scenario + "' vs probes '" + probes.scenario +
                          "'");
  if (!probes.config_hash.empty() && probes.config_hash != rep.config_hash)
    throw ValidationError("compare: config hash mismatch between inputs");

  const double shift_tol =
      summary.contains("compare_tolerances")
          ? summary["compare_tolerances"].value("shift_rel_tol", 0.30)
          : 0.30;
  const double band_rel =
      summary.contains("compare_tolerances")
          ? summary["compare_tolerances"].value("rytov_band_rel", 0.30)
          : 0.30;

  const auto& first = probes.rows.front();
  const auto& last = probes.rows.back();
  // measured half-splittings, initial offsets removed
  const double meas_x = 0.5 * ((last[1] - first[1]) - (last[3] - first[3]));
  const double meas_y = 0.5 * ((last[2] - first[2]) - (last[4] - first[4]));
  const double pred_x = summary["sigma_plus"]["deflection_quadrature"][0];
  const double pred_y = summary["sigma_plus"]["deflection_quadrature"][1];

  const auto shift_row = [&](const std::string& name, double pred,
                             double meas) {
    CompareRow r;
    r.name = name;
    r.predicted = pred;
    r.measured = meas;
    r.tolerance = shift_tol;
    constexpr double pred_floor = 1e-10;
    constexpr double meas_floor = 1e-7;
    if (std::abs(pred) <= pred_floor) {
      r.relative_discrepancy = 0;
      r.pass = std::abs(meas) <= meas_floor;
      r.note = "prediction below floor, measured compared to noise floor";
    } else {
      r.relative_discrepancy = std::abs(meas / pred - 1.0);
      r.pass = (meas * pred > 0) && (r.relative_discrepancy <= shift_tol);
    }
    return r;
  };
  rep.rows.push_back(shift_row("spin_hall_half_split_x", pred_x, meas_x));
  rep.rows.push_back(shift_row("spin_hall_half_split_y", pred_y, meas_y));

  rep.rytov_paper_quarter_tan2 = summary["rytov"]["quarter_tan2"];
  rep.rytov_paper_quarter_theta2 = summary["rytov"]["quarter_theta2"];
  rep.rytov_literature_half_theta2 = summary["rytov"]["half_theta2"];
  rep.rytov_measured = last[11];
  {
    const double a = rep.rytov_paper_quarter_tan2;
    const double b = rep.rytov_literature_half_theta2;
    const double lo = std::min(a, b), hi = std::max(a, b);
    rep.rytov_band_lo = lo - band_rel * std::abs(lo);
    rep.rytov_band_hi = hi + band_rel * std::abs(hi);
    CompareRow r;
    r.name = "rytov_rotation";
    r.predicted = a;  // the verbatim coefficient; both forms are reported
    r.measured = rep.rytov_measured;
    r.tolerance = band_rel;
    if (std::abs(a) <= 1e-10 && std::abs(b) <= 1e-10) {
      rep.rytov_in_band = std::abs(rep.rytov_measured) <= 1e-6;
      r.note = "predictions below floor, measured compared to noise floor";
    } else {
      rep.rytov_in_band = rep.rytov_measured >= rep.rytov_band_lo &&
                          rep.rytov_measured <= rep.rytov_band_hi;
      r.relative_discrepancy =
          (a != 0) ? std::abs(rep.rytov_measured / a - 1.0) : 0.0;
      r.note = "band spans the 1/4 tan^2 and 1/2 theta^2 coefficient forms";
    }
    r.pass = rep.rytov_in_band;
    rep.rows.push_back(r);
  }

  rep.all_pass = true;
  for (const auto& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
  if (probes.truncated) rep.all_pass = false;
  return rep;
}

inline nlohmann::ordered_json compare_report_json(const CompareReport& rep) {
  nlohmann::ordered_json j;
  j["tool"] = "parax";
  j["version"] = kVersion;
  j["scenario"] = rep.scenario;
  j["config_hash"] = rep.config_hash;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["predicted"] = r.predicted;
    e["measured"] = r.measured;
    e["relative_discrepancy"] = r.relative_discrepancy;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    if (!r.note.empty()) e["note"] = r.note;
    rows.push_back(e);
  }
  j["rows"] = rows;
  nlohmann::ordered_json ry;
  ry["paper_quarter_tan2"] = rep.rytov_paper_quarter_tan2;
  ry["paper_quarter_theta2"] = rep.rytov_paper_quarter_theta2;
  ry["literature_half_theta2"] = rep.rytov_literature_half_theta2;
  ry["measured"] = rep.rytov_measured;
  ry["band_lo"] = rep.rytov_band_lo;
  ry["band_hi"] = rep.rytov_band_hi;
  ry["in_band"] = rep.rytov_in_band;
  j["rytov"] = ry;
  j["all_pass"] = rep.all_pass;
  return j;
}

}  // namespace parax
