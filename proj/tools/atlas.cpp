#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "atlas/checkers.hpp"
#include "atlas/linearizability.hpp"
#include "atlas/simulator.hpp"
#include "atlas/summary.hpp"

namespace fs = std::filesystem;
using namespace atlas;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct LoadedConfig {
  SimConfig config;
  Json document;  // full file, extra sections included
};

// Reads a config file; on any problem prints field-level messages and
// returns nullopt. Validation is optional because run applies command-line
// overrides first and validates the result.
std::optional<LoadedConfig> load_config(const std::string& path,
                                        bool validate = true) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open config: " << path << "\n";
    return std::nullopt;
  }
  LoadedConfig lc;
  try {
    in >> lc.document;
    lc.config = SimConfig::from_json(lc.document);
  } catch (const std::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return std::nullopt;
  }
  if (validate) {
    auto problems = lc.config.validate();
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
      return std::nullopt;
    }
  }
  return lc;
}

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  return true;
}

struct RunOpts {
  std::string config_path;
  std::string out_dir{"out"};
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  bool force_crashes{false};
  bool no_check{false};
  bool lin{false};
  std::uint64_t lin_budget{2'000'000};
};

int cmd_run(const RunOpts& opt) {
  auto loaded = load_config(opt.config_path, false);
  if (!loaded) return kUsage;
  SimConfig cfg = loaded->config;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.horizon) cfg.horizon = *opt.horizon;
  if (opt.force_crashes) cfg.allow_excess_crashes = true;
  auto problems = cfg.validate();
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
    return kUsage;
  }

  RunResult res = run_simulation(cfg);
  fs::create_directories(opt.out_dir);
  if (!write_file(fs::path(opt.out_dir) / "trace.jsonl", res.trace.to_jsonl()))
    return kUsage;

  Json out = RunSummary::from_trace(res.trace).to_json();
  out["horizon_reached"] = res.horizon_reached;
  out["complete"] = res.complete;

  bool failed = false;
  if (!opt.no_check) {
    CheckReport rep = check_trace(res.trace);
    out["checks"] = rep.to_json();
    failed = !rep.ok();
  }
  if (opt.lin) {
    LinResult lin = check_linearizability(res.trace, opt.lin_budget);
    out["linearizability"] = lin.to_json();
    failed = failed || !lin.ok();
  }
  std::string summary_text = out.dump(2) + "\n";
  if (!write_file(fs::path(opt.out_dir) / "summary.json", summary_text))
    return kUsage;
  std::cout << summary_text;
  return failed ? kCheckFailed : kOk;
}

struct SweepOpts {
  std::string config_path;
  std::string out_path;  // empty = stdout
  std::optional<std::uint32_t> seeds;
};

struct SweepCell {
  ProcId n;
  ProcId f;
  double rate;
  bool valid{true};
  double fast_ratio{0};
  double matching_ratio{0};
  double latency_mean{0};
  std::uint64_t recovered{0};
};

SweepCell run_cell(SimConfig cfg, ProcId n, ProcId f, double rate,
                   std::uint32_t seeds) {
  SweepCell cell{n, f, rate};
  cfg.n = n;
  cfg.f = f;
  cfg.workload.conflict_rate = rate;
  if (!cfg.validate().empty()) {
    cell.valid = false;
    return cell;
  }
  for (std::uint32_t s = 0; s < seeds; s++) {
    SimConfig c = cfg;
    c.seed = cfg.seed + s;
    RunSummary sum = RunSummary::from_trace(run_simulation(c).trace);
    cell.fast_ratio += sum.fast_path_ratio;
    cell.matching_ratio += sum.matching_ratio;
    cell.latency_mean += sum.commit_latency_mean;
    cell.recovered += sum.recovered;
  }
  cell.fast_ratio /= seeds;
  cell.matching_ratio /= seeds;
  cell.latency_mean /= seeds;
  return cell;
}

int cmd_sweep(const SweepOpts& opt) {
  auto loaded = load_config(opt.config_path);
  if (!loaded) return kUsage;
  const SimConfig& base = loaded->config;

  std::vector<ProcId> ns{base.n};
  std::vector<ProcId> fsv{base.f};
  std::vector<double> rates{base.workload.conflict_rate};
  std::uint32_t seeds = 3;
  if (loaded->document.contains("sweep")) {
    const Json& sw = loaded->document.at("sweep");
    if (sw.contains("n")) ns = sw.at("n").get<std::vector<ProcId>>();
    if (sw.contains("f")) fsv = sw.at("f").get<std::vector<ProcId>>();
    if (sw.contains("conflict_rate"))
      rates = sw.at("conflict_rate").get<std::vector<double>>();
    if (sw.contains("seeds")) seeds = sw.at("seeds").get<std::uint32_t>();
  }
  if (opt.seeds) seeds = *opt.seeds;

  std::vector<std::future<SweepCell>> futures;
  for (ProcId n : ns)
    for (ProcId f : fsv)
      for (double rate : rates)
        futures.push_back(std::async(std::launch::async, run_cell, base, n, f,
                                     rate, seeds));

  std::ostringstream csv;
  csv << "n,f,conflict_rate,seeds,fast_path_ratio,matching_ratio,"
         "commit_latency_mean,recovered\n";
  for (auto& fut : futures) {
    SweepCell cell = fut.get();
    if (!cell.valid) {
      std::cerr << "skipping invalid cell n=" << cell.n << " f=" << cell.f
                << "\n";
      continue;
    }
    csv << cell.n << "," << cell.f << "," << cell.rate << "," << seeds << ","
        << cell.fast_ratio << "," << cell.matching_ratio << ","
        << cell.latency_mean << "," << cell.recovered << "\n";
  }
  if (opt.out_path.empty()) {
    std::cout << csv.str();
    return kOk;
  }
  return write_file(opt.out_path, csv.str()) ? kOk : kUsage;
}

struct CheckOpts {
  std::string trace_path;
  bool lin{false};
  std::uint64_t lin_budget{2'000'000};
};

int cmd_check(const CheckOpts& opt) {
  std::ifstream in(opt.trace_path);
  if (!in) {
    std::cerr << "cannot open trace: " << opt.trace_path << "\n";
    return kUsage;
  }
  Trace tr;
  try {
    tr = Trace::from_jsonl(in);
  } catch (const ParseError& e) {
    std::cerr << "trace error at " << e.what() << "\n";
    return kUsage;
  }
  CheckReport rep = check_trace(tr);
  Json out = rep.to_json();
  bool failed = !rep.ok();
  if (opt.lin) {
    LinResult lin = check_linearizability(tr, opt.lin_budget);
    out["linearizability"] = lin.to_json();
    failed = failed || !lin.ok();
  }
  std::cout << out.dump(2) << "\n";
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leaderless replication protocol simulator and trace checker"};
  app.require_subcommand(1);

  RunOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("--config", run_opts.config_path, "SimConfig JSON file")
      ->required();
  run->add_option("--out", run_opts.out_dir,
                  "output directory for trace.jsonl and summary.json");
  run->add_option("--seed", run_opts.seed, "override the config seed");
  run->add_option("--horizon", run_opts.horizon, "override the time horizon");
  run->add_flag("--force-crashes", run_opts.force_crashes,
                "allow more than f crashes (safety-only runs)");
  run->add_flag("--no-check", run_opts.no_check, "skip trace checkers");
  run->add_flag("--lin", run_opts.lin, "also run the linearizability checker");
  run->add_option("--lin-budget", run_opts.lin_budget,
                  "linearizability search node budget");

  SweepOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid of runs over n, f, and conflict rate");
  sweep->add_option("--config", sweep_opts.config_path,
                    "base config, with an optional sweep section")
      ->required();
  sweep->add_option("--out", sweep_opts.out_path, "CSV path, stdout if absent");
  sweep->add_option("--seeds", sweep_opts.seeds, "seeds per cell");

  CheckOpts check_opts;
  CLI::App* check = app.add_subcommand("check", "check an existing trace file");
  check->add_option("trace", check_opts.trace_path, "trace JSONL path")
      ->required();
  check->add_flag("--lin", check_opts.lin,
                  "also run the linearizability checker");
  check->add_option("--lin-budget", check_opts.lin_budget,
                    "linearizability search node budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (run->parsed()) return cmd_run(run_opts);
  if (sweep->parsed()) return cmd_sweep(sweep_opts);
  return cmd_check(check_opts);
}
