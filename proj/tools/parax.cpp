// Command-line front end: verify / trace / bpm / compare / batch.
//
// Exit codes: 0 success, 1 reported checks or comparison bands failed,
// 2 validation error, 3 numerical-domain error, 4 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parax/config.hpp"
#include "parax/scenario.hpp"
#include "parax/verify.hpp"
#include "parax/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string out_dir = ".";
  unsigned long seed = 0;
  bool seed_set = false;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw parax::IoError("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw parax::IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw parax::IoError("write failed for " + path);
}

parax::ScenarioConfig load_config(const std::string& path,
                                  const GlobalOpts& g) {
  parax::ScenarioConfig cfg = parax::parse_config(path);
  if (g.seed_set) cfg.seed = g.seed;
  return cfg;
}

int cmd_verify(const GlobalOpts& g, bool inject_fault, const std::string& out) {
  const unsigned long seed = g.seed_set ? g.seed : 1;
  const auto checks = parax::run_verify_suite(seed, inject_fault);
  const auto report = parax::verify_report_json(checks, seed);
  const std::string text = report.dump(2) + "\n";
  if (!out.empty()) {
    write_text(out, text);
  }
  std::cout << text;
  return report["all_pass"].get<bool>() ? 0 : 1;
}

int cmd_trace(const GlobalOpts& g, const std::string& config_path,
              bool zeroth_order, bool strict_paraxial) {
  const parax::ScenarioConfig cfg = load_config(config_path, g);
  parax::TraceOptions opts;
  opts.zeroth_order = zeroth_order;
  opts.strict_paraxial = strict_paraxial;
  const parax::TraceResult tr = parax::run_trace(cfg, opts);

  ensure_dir(g.out_dir);
  const std::string base = g.out_dir + "/" + cfg.scenario;
  const std::string hdr = parax::output_header_comment(cfg);
  const auto dump = [&](const parax::Trajectory& t, const std::string& tag) {
    std::ofstream out(base + "_trace_" + tag + ".csv");
    if (!out) throw parax::IoError("cannot write trace CSV for " + tag);
    parax::write_trajectory_csv(out, t, hdr);
  };
  dump(tr.plus, "plus");
  dump(tr.zero, "zero");
  dump(tr.minus, "minus");
  write_text(base + "_trace_summary.json",
             parax::trace_summary_json(cfg, tr).dump(2) + "\n");
  std::cout << "trace: " << cfg.scenario << " -> " << base
            << "_trace_{plus,zero,minus}.csv, _trace_summary.json\n";
  return 0;
}

int cmd_bpm(const GlobalOpts& g, const std::string& config_path,
            bool snapshots) {
  const parax::ScenarioConfig cfg = load_config(config_path, g);
  ensure_dir(g.out_dir);
  parax::BpmOptions opts;
  opts.snapshots = snapshots;
  opts.snapshot_dir = g.out_dir;
  const parax::BpmResult bpm = parax::run_bpm(cfg, opts);
  const std::string path = g.out_dir + "/" + cfg.scenario + "_probes.csv";
  std::ofstream out(path);
  if (!out) throw parax::IoError("cannot write " + path);
  parax::write_probe_csv(out, cfg, bpm);
  std::cout << "bpm: " << cfg.scenario << " -> " << path << "\n";
  if (bpm.plus.truncated || bpm.minus.truncated) {
    std::cerr << "bpm: propagation truncated, partial probes flushed\n";
    return 3;
  }
  return 0;
}

int cmd_compare(const GlobalOpts& g, const std::string& summary_path,
                const std::string& probes_path) {
  std::ifstream in(summary_path);
  if (!in) throw parax::IoError("cannot open " + summary_path);
  json summary;
  try {
    in >> summary;
  } catch (const json::parse_error& e) {
    throw parax::IoError("cannot parse " + summary_path + ": " + e.what());
  }
  const parax::ProbeTable probes = parax::read_probe_csv(probes_path);
  const parax::CompareReport rep = parax::make_compare(summary, probes);

  ensure_dir(g.out_dir);
  const std::string path =
      g.out_dir + "/" + rep.scenario + "_compare.json";
  write_text(path, parax::compare_report_json(rep).dump(2) + "\n");

  std::cout << "compare: " << rep.scenario << "\n";
  for (const auto& r : rep.rows) {
    std::cout << "  " << (r.pass ? "[ok]  " : "[FAIL]") << " " << r.name
              << ": predicted " << r.predicted << ", measured " << r.measured;
    if (r.relative_discrepancy != 0)
      std::cout << ", rel " << r.relative_discrepancy;
    std::cout << "\n";
  }
  std::cout << "  rytov forms: quarter_tan2 " << rep.rytov_paper_quarter_tan2
            << ", quarter_theta2 " << rep.rytov_paper_quarter_theta2
            << ", half_theta2 " << rep.rytov_literature_half_theta2
            << ", measured " << rep.rytov_measured << " (band ["
            << rep.rytov_band_lo << ", " << rep.rytov_band_hi << "], "
            << (rep.rytov_in_band ? "inside" : "OUTSIDE") << ")\n";
  std::cout << "  report -> " << path << "\n";
  return rep.all_pass ? 0 : 1;
}

int run_scenario_dir(const GlobalOpts& g, const std::string& config_path) {
  const parax::ScenarioConfig cfg = load_config(config_path, g);
  GlobalOpts local = g;
  local.out_dir = g.out_dir + "/" + cfg.scenario;
  int rc = cmd_trace(local, config_path, false, false);
  if (rc != 0) return rc;
  rc = cmd_bpm(local, config_path, false);
  if (rc != 0) return rc;
  return cmd_compare(local,
                     local.out_dir + "/" + cfg.scenario + "_trace_summary.json",
                     local.out_dir + "/" + cfg.scenario + "_probes.csv");
}

int cmd_batch(const GlobalOpts& g, const std::string& dir, int jobs) {
  std::vector<std::string> configs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg")
      configs.push_back(e.path().string());
  std::sort(configs.begin(), configs.end());
  if (configs.empty())
    throw parax::ValidationError("batch: no .cfg files in " + dir);

  const int width = std::max(1, jobs);
  std::vector<std::pair<std::string, int>> results(configs.size());
  std::size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::future<int>> wave;
    std::vector<std::size_t> idx;
    for (int j = 0; j < width && next < configs.size(); ++j, ++next) {
      idx.push_back(next);
      const std::string path = configs[next];
      wave.push_back(std::async(std::launch::async, [&g, path]() {
        try {
          return run_scenario_dir(g, path);
        } catch (const parax::ValidationError&) {
          return 2;
        } catch (const parax::NumericDomainError&) {
          return 3;
        } catch (const parax::IoError&) {
          return 4;
        } catch (const std::exception&) {
          return 3;
        }
      }));
    }
    for (std::size_t j = 0; j < wave.size(); ++j)
      results[idx[j]] = {configs[idx[j]], wave[j].get()};
  }
  int worst = 0;
  for (const auto& [path, rc] : results) {
    std::cout << "batch: " << path << " -> exit " << rc << "\n";
    worst = std::max(worst, rc);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parax: polarized paraxial transport simulator"};
  app.set_version_flag("--version", std::string(parax::kVersion));
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out_dir, "output directory (default: .)");
  auto* seed_opt = app.add_option("--seed", g.seed, "override the config seed");

  bool inject_fault = false;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "run the residual checks");
  verify->add_flag("--inject-fault", inject_fault,
                   "perturb the algebra to exercise failure reporting")
      ->group("");  // hidden test hook
  verify->add_option("--report", verify_out, "also write the JSON report here");

  std::string trace_cfg;
  bool zeroth = false, strict = false;
  auto* trace = app.add_subcommand("trace", "ray trace for sigma in {-1,0,+1}");
  trace->add_option("config", trace_cfg, "scenario config file")->required();
  trace->add_flag("--zeroth-order", zeroth, "drop the Berry term (k^-1 -> 0)");
  trace->add_flag("--strict-paraxial", strict, "force p_z = n0");

  std::string bpm_cfg;
  bool snapshots = false;
  auto* bpm = app.add_subcommand("bpm", "full-wave split-step run, both helicities");
  bpm->add_option("config", bpm_cfg, "scenario config file")->required();
  bpm->add_flag("--snapshots", snapshots, "write start/end field snapshots");

  std::string cmp_summary, cmp_probes;
  auto* compare =
      app.add_subcommand("compare", "join a trace summary with bpm probes");
  compare->add_option("summary", cmp_summary, "trace summary JSON")->required();
  compare->add_option("probes", cmp_probes, "bpm probe CSV")->required();

  std::string batch_dir;
  int jobs = 2;
  auto* batch = app.add_subcommand("batch", "run every .cfg in a directory");
  batch->add_option("dir", batch_dir, "directory of scenario configs")->required();
  batch->add_option("--jobs", jobs, "parallel scenarios (default 2)");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*verify) return cmd_verify(g, inject_fault, verify_out);
    if (*trace) return cmd_trace(g, trace_cfg, zeroth, strict);
    if (*bpm) return cmd_bpm(g, bpm_cfg, snapshots);
    if (*compare) return cmd_compare(g, cmp_summary, cmp_probes);
    if (*batch) return cmd_batch(g, batch_dir, jobs);
  } catch (const parax::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const parax::NumericDomainError& e) {
    std::cerr << "numerical-domain error: " << e.what() << "\n";
    return 3;
  } catch (const parax::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
