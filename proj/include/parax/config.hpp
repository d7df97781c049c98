#pragma once

// Scenario configuration: a flat key/value text format with '#' comments.
// Unknown keys are rejected and every parse error carries the line number.
// The canonical serialization materializes all defaults in a fixed key
// order; its FNV-1a hash stamps every output file.
//
// Units: transverse lengths set the unit; k is the dimensionless wave
// number in those units; momenta are dimensionless with |p| = n.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parax/errors.hpp"
#include "parax/types.hpp"
#include "parax/version.hpp"

namespace parax {

struct ScenarioConfig {
  std::string scenario = "unnamed";
  unsigned long seed = 1;
  double k = 100.0;
  double z_end = 1.0;

  std::string medium_kind = "homogeneous";
  double medium_n0 = 1.0;
  Vec3 medium_gradient{0, 0, 0};
  double medium_alpha = 0.0;
  Vec2 medium_grin_center{0, 0};
  double medium_defect_amplitude = 0.0;
  Vec3 medium_defect_center{0, 0, 0};
  double medium_defect_width = 1.0;
  std::string medium_file;  // gridded kinds, resolved against the config dir
  bool medium_domain_set = false;
  Vec3 medium_domain_lo{0, 0, 0};
  Vec3 medium_domain_hi{0, 0, 0};
  bool medium_allow_strong = false;

  double beam_waist = 0.2;
  Vec2 beam_center{0, 0};
  Vec2 beam_tilt{0, 0};
  double beam_amplitude = 1.0;

  int grid_n = 256;
  double grid_extent = 2.0;

  double ray_dz = 0.0;  // 0 selects the automatic step rule
  double ray_max_dp_step = 1e-3;

  double bpm_dz = 0.01;
  int bpm_probe_cadence = 10;
  double bpm_boundary_frac = 0.10;

  double compare_shift_rel_tol = 0.30;
  double compare_rytov_band_rel = 0.30;

  std::string config_dir;  // directory of the source file, not serialized

  std::string canonical_text() const;
  std::string hash_hex() const;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct ConfigLine {
  int number = 0;
  std::string key;
  std::vector<std::string> values;
};

inline std::vector<ConfigLine> tokenize_config(std::istream& in) {
  std::vector<ConfigLine> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    ConfigLine line;
    line.number = number;
    if (!(ls >> line.key)) continue;
    std::string tok;
    while (ls >> tok) line.values.push_back(tok);
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace detail

inline std::string ScenarioConfig::canonical_text() const {
  using detail::format_double;
  std::ostringstream os;
  os << "scenario " << scenario << "\n";
  os << "seed " << seed << "\n";
  os << "k " << format_double(k) << "\n";
  os << "z_end " << format_double(z_end) << "\n";
  os << "medium.kind " << medium_kind << "\n";
  os << "medium.n0 " << format_double(medium_n0) << "\n";
  os << "medium.gradient " << format_double(medium_gradient.x()) << " "
     << format_double(medium_gradient.y()) << " "
     << format_double(medium_gradient.z()) << "\n";
  os << "medium.alpha " << format_double(medium_alpha) << "\n";
  os << "medium.grin_center " << format_double(medium_grin_center.x()) << " "
     << format_double(medium_grin_center.y()) << "\n";
  os << "medium.defect_amplitude " << format_double(medium_defect_amplitude)
     << "\n";
  os << "medium.defect_center " << format_double(medium_defect_center.x()) << " "
     << format_double(medium_defect_center.y()) << " "
     << format_double(medium_defect_center.z()) << "\n";
  os << "medium.defect_width " << format_double(medium_defect_width) << "\n";
  if (!medium_file.empty()) os << "medium.file " << medium_file << "\n";
  if (medium_domain_set) {
    os << "medium.domain " << format_double(medium_domain_lo.x()) << " "
       << format_double(medium_domain_lo.y()) << " "
       << format_double(medium_domain_lo.z()) << " "
       << format_double(medium_domain_hi.x()) << " "
       << format_double(medium_domain_hi.y()) << " "
       << format_double(medium_domain_hi.z()) << "\n";
  }
  os << "medium.allow_strong " << (medium_allow_strong ? "true" : "false")
     << "\n";
  os << "beam.waist " << format_double(beam_waist) << "\n";
  os << "beam.center " << format_double(beam_center.x()) << " "
     << format_double(beam_center.y()) << "\n";
  os << "beam.tilt " << format_double(beam_tilt.x()) << " "
     << format_double(beam_tilt.y()) << "\n";
  os << "beam.amplitude " << format_double(beam_amplitude) << "\n";
  os << "grid.n " << grid_n << "\n";
  os << "grid.extent " << format_double(grid_extent) << "\n";
  os << "ray.dz " << format_double(ray_dz) << "\n";
  os << "ray.max_dp_step " << format_double(ray_max_dp_step) << "\n";
  os << "bpm.dz " << format_double(bpm_dz) << "\n";
  os << "bpm.probe_cadence " << bpm_probe_cadence << "\n";
  os << "bpm.boundary_frac " << format_double(bpm_boundary_frac) << "\n";
  os << "compare.shift_rel_tol " << format_double(compare_shift_rel_tol) << "\n";
  os << "compare.rytov_band_rel " << format_double(compare_rytov_band_rel)
     << "\n";
  return os.str();
}

inline std::string ScenarioConfig::hash_hex() const {
  std::ostringstream os;
  os << std::hex << detail::fnv1a64(canonical_text());
  return os.str();
}

inline ScenarioConfig parse_config_text(std::istream& in,
                                        const std::string& origin,
                                        const std::string& dir = "") {
  ScenarioConfig cfg;
  cfg.config_dir = dir;
  const auto fail = [&](int line, const std::string& msg) {
    throw ValidationError(origin + ":" + std::to_string(line) + ": " + msg);
  };

  for (const auto& line : detail::tokenize_config(in)) {
    const auto need = [&](std::size_t n) {
      if (line.values.size() != n)
        fail(line.number, "key '" + line.key + "' expects " + std::to_string(n) +
                              " value(s), got " +
                              std::to_string(line.values.size()));
    };
    const auto as_double = [&](const std::string& tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
      } catch (const std::exception&) {
        fail(line.number, "cannot parse '" + tok + "' as a number");
        return 0.0;
      }
    };
    const auto as_int = [&](const std::string& tok) {
      const double v = as_double(tok);
      if (v != std::floor(v))
        fail(line.number, "expected an integer, got '" + tok + "'");
      return long(v);
    };
    const auto as_bool = [&](const std::string& tok) {
      if (tok == "true" || tok == "1") return true;
      if (tok == "false" || tok == "0") return false;
      fail(line.number, "expected true/false, got '" + tok + "'");
      return false;
    };

    const std::string& k0 = line.key;
    if (k0 == "scenario") {
      need(1);
      cfg.scenario = line.values[0];
    } else if (k0 == "seed") {
      need(1);
      cfg.seed = (unsigned long)(as_int(line.values[0]));
    } else if (k0 == "k") {
      need(1);
      cfg.k = as_double(line.values[0]);
    } else if (k0 == "z_end") {
      need(1);
      cfg.z_end = as_double(line.values[0]);
    } else if (k0 == "medium.kind") {
      need(1);
      cfg.medium_kind = line.values[0];
    } else if (k0 == "medium.n0") {
      need(1);
      cfg.medium_n0 = as_double(line.values[0]);
    } else if (k0 == "medium.gradient") {
      need(3);
      cfg.medium_gradient = Vec3(as_double(line.values[0]),
                                 as_double(line.values[1]),
                                 as_double(line.values[2]));
    } else if (k0 == "medium.alpha") {
      need(1);
      cfg.medium_alpha = as_double(line.values[0]);
    } else if (k0 == "medium.grin_center") {
      need(2);
      cfg.medium_grin_center =
          Vec2(as_double(line.values[0]), as_double(line.values[1]));
    } else if (k0 == "medium.defect_amplitude") {
      need(1);
      cfg.medium_defect_amplitude = as_double(line.values[0]);
    } else if (k0 == "medium.defect_center") {
      need(3);
      cfg.medium_defect_center = Vec3(as_double(line.values[0]),
                                      as_double(line.values[1]),
                                      as_double(line.values[2]));
    } else if (k0 == "medium.defect_width") {
      need(1);
      cfg.medium_defect_width = as_double(line.values[0]);
    } else if (k0 == "medium.file") {
      need(1);
      cfg.medium_file = line.values[0];
    } else if (k0 == "medium.domain") {
      need(6);
      cfg.medium_domain_set = true;
      cfg.medium_domain_lo = Vec3(as_double(line.values[0]),
                                  as_double(line.values[1]),
                                  as_double(line.values[2]));
      cfg.medium_domain_hi = Vec3(as_double(line.values[3]),
                                  as_double(line.values[4]),
                                  as_double(line.values[5]));
    } else if (k0 == "medium.allow_strong") {
      need(1);
      cfg.medium_allow_strong = as_bool(line.values[0]);
    } else if (k0 == "beam.waist") {
      need(1);
      cfg.beam_waist = as_double(line.values[0]);
    } else if (k0 == "beam.center") {
      need(2);
      cfg.beam_center = Vec2(as_double(line.values[0]), as_double(line.values[1]));
    } else if (k0 == "beam.tilt") {
      need(2);
      cfg.beam_tilt = Vec2(as_double(line.values[0]), as_double(line.values[1]));
    } else if (k0 == "beam.amplitude") {
      need(1);
      cfg.beam_amplitude = as_double(line.values[0]);
    } else if (k0 == "grid.n") {
      need(1);
      cfg.grid_n = int(as_int(line.values[0]));
    } else if (k0 == "grid.extent") {
      need(1);
      cfg.grid_extent = as_double(line.values[0]);
    } else if (k0 == "ray.dz") {
      need(1);
      cfg.ray_dz = as_double(line.values[0]);
    } else if (k0 == "ray.max_dp_step") {
      need(1);
      cfg.ray_max_dp_step = as_double(line.values[0]);
    } else if (k0 == "bpm.dz") {
      need(1);
      cfg.bpm_dz = as_double(line.values[0]);
    } else if (k0 == "bpm.probe_cadence") {
      need(1);
      cfg.bpm_probe_cadence = int(as_int(line.values[0]));
    } else if (k0 == "bpm.boundary_frac") {
      need(1);
      cfg.bpm_boundary_frac = as_double(line.values[0]);
    } else if (k0 == "compare.shift_rel_tol") {
      need(1);
      cfg.compare_shift_rel_tol = as_double(line.values[0]);
    } else if (k0 == "compare.rytov_band_rel") {
      need(1);
      cfg.compare_rytov_band_rel = as_double(line.values[0]);
    } else {
      fail(line.number, "unknown key '" + k0 + "'");
    }
  }

  // validation with key names
  const auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(origin + ": " + msg);
  };
  require(cfg.k > 0, "key 'k' must be positive");
  require(cfg.z_end > 0, "key 'z_end' must be positive");
  require(cfg.medium_n0 > 0, "key 'medium.n0' must be positive");
  require(cfg.beam_waist > 0, "key 'beam.waist' must be positive");
  require(cfg.beam_amplitude > 0, "key 'beam.amplitude' must be positive");
  require(cfg.grid_n >= 16 && cfg.grid_n <= 8192,
          "key 'grid.n' must be in [16, 8192]");
  require(cfg.grid_extent > 0, "key 'grid.extent' must be positive");
  require(cfg.bpm_dz > 0, "key 'bpm.dz' must be positive");
  require(cfg.bpm_probe_cadence >= 1, "key 'bpm.probe_cadence' must be >= 1");
  require(cfg.bpm_boundary_frac >= 0 && cfg.bpm_boundary_frac < 0.5,
          "key 'bpm.boundary_frac' must be in [0, 0.5)");
  require(cfg.ray_max_dp_step > 0, "key 'ray.max_dp_step' must be positive");
  const bool known_kind =
      cfg.medium_kind == "homogeneous" || cfg.medium_kind == "linear" ||
      cfg.medium_kind == "grin" || cfg.medium_kind == "gaussian_defect" ||
      cfg.medium_kind == "gridded";
  require(known_kind, "key 'medium.kind' must be one of homogeneous, linear, "
                      "grin, gaussian_defect, gridded");
  if (cfg.medium_kind == "gridded") {
    require(!cfg.medium_file.empty(),
            "key 'medium.file' is required for gridded media");
    const std::filesystem::path p =
        cfg.config_dir.empty() ? std::filesystem::path(cfg.medium_file)
                               : std::filesystem::path(cfg.config_dir) /
                                     cfg.medium_file;
    require(std::filesystem::exists(p),
            "key 'medium.file': referenced file does not exist: " + p.string());
  }
  return cfg;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_config: cannot open " + path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config_text(in, path, dir);
}

}  // namespace parax
