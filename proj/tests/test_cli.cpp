#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "atlas/config.hpp"
#include "atlas/trace.hpp"

namespace fs = std::filesystem;
using atlas::Json;

namespace {

struct CliResult {
  int code{-1};
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  fs::path dir = fs::path(ATLAS_TEST_DIR) / "cli_scratch";
  fs::create_directories(dir);
  return dir;
}

CliResult cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch() / ("stdout" + std::to_string(counter) + ".txt");
  fs::path err = scratch() / ("stderr" + std::to_string(counter) + ".txt");
  counter++;
  std::string cmd = std::string(ATLAS_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int raw = std::system(cmd.c_str());
  CliResult r;
  if (WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const Json& doc) {
  fs::path p = scratch() / name;
  std::ofstream(p) << doc.dump(2) << "\n";
  return p;
}

Json small_config(atlas::ProcId n, atlas::ProcId f) {
  atlas::SimConfig cfg;
  cfg.n = n;
  cfg.f = f;
  cfg.workload.commands_per_client = 3;
  cfg.workload.conflict_rate = 0.5;
  return cfg.to_json();
}

}  // namespace

TEST_CASE("run writes a trace and a summary and exits zero") {
  fs::path cfg = write_config("ok.json", small_config(3, 1));
  fs::path out = scratch() / "run_ok";
  CliResult r = cli("run --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 0);

  Json summary = Json::parse(r.out);
  CHECK(summary.at("complete") == true);
  CHECK(summary.at("checks").at("ok") == true);
  CHECK(summary.at("fast_path_ratio") == 1.0);
  CHECK(!summary.contains("linearizability"));

  // the files on disk match what was printed
  CHECK(Json::parse(slurp(out / "summary.json")) == summary);
  atlas::Trace tr = atlas::Trace::from_jsonl_string(slurp(out / "trace.jsonl"));
  CHECK(tr.config.n == 3);
  CHECK(!tr.events.empty());
}

TEST_CASE("run respects seed overrides and stays reproducible") {
  fs::path cfg = write_config("seeded.json", small_config(3, 1));
  fs::path a = scratch() / "seed_a";
  fs::path b = scratch() / "seed_b";
  fs::path c = scratch() / "seed_c";
  CHECK(cli("run --config " + cfg.string() + " --seed 9 --out " + a.string()).code == 0);
  CHECK(cli("run --config " + cfg.string() + " --seed 9 --out " + b.string()).code == 0);
  CHECK(cli("run --config " + cfg.string() + " --seed 10 --out " + c.string()).code == 0);
  CHECK(slurp(a / "trace.jsonl") == slurp(b / "trace.jsonl"));
  CHECK(slurp(a / "trace.jsonl") != slurp(c / "trace.jsonl"));
}

TEST_CASE("run options toggle the checkers") {
  fs::path cfg = write_config("toggles.json", small_config(3, 1));
  fs::path out = scratch() / "run_toggles";

  CliResult quiet =
      cli("run --config " + cfg.string() + " --no-check --out " + out.string());
  CHECK(quiet.code == 0);
  CHECK(!Json::parse(quiet.out).contains("checks"));

  CliResult lin =
      cli("run --config " + cfg.string() + " --lin --out " + out.string());
  CHECK(lin.code == 0);
  Json summary = Json::parse(lin.out);
  CHECK(summary.at("linearizability").at("verdict") == "linearizable");
}

TEST_CASE("invalid configurations exit with the usage code") {
  SUBCASE("f out of range for n") {
    fs::path cfg = write_config("bad_f.json", small_config(4, 2));
    CliResult r = cli("run --config " + cfg.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
  }
  SUBCASE("file that is not json") {
    fs::path p = scratch() / "not_json.json";
    std::ofstream(p) << "nope\n";
    CliResult r = cli("run --config " + p.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("parse error") != std::string::npos);
  }
  SUBCASE("file that does not exist") {
    CliResult r = cli("run --config /no/such/file.json");
    CHECK(r.code == 2);
    CHECK(r.err.find("cannot open") != std::string::npos);
  }
  SUBCASE("missing required option") {
    CHECK(cli("run").code == 2);
  }
  SUBCASE("no subcommand at all") {
    CHECK(cli("").code == 2);
  }
}

TEST_CASE("excess crashes need an explicit override") {
  Json doc = small_config(3, 1);
  doc["crashes"] = Json::array({{{"proc", 2}, {"at", 60}}, {{"proc", 3}, {"at", 60}}});
  doc["horizon"] = 20000;
  fs::path cfg = write_config("two_down.json", doc);

  CliResult refused = cli("run --config " + cfg.string());
  CHECK(refused.code == 2);
  CHECK(refused.err.find("more than f crashes") != std::string::npos);

  fs::path out = scratch() / "run_forced";
  CliResult forced = cli("run --config " + cfg.string() + " --force-crashes --out " +
                         out.string());
  CHECK(forced.code == 0);  // safety holds even though the run cannot finish
  Json summary = Json::parse(forced.out);
  CHECK(summary.at("complete") == false);
  CHECK(summary.at("horizon_reached") == true);
  CHECK(summary.at("checks").at("ok") == true);
}

TEST_CASE("check verdicts map onto exit codes") {
  fs::path cfg = write_config("for_check.json", small_config(3, 1));
  fs::path out = scratch() / "run_for_check";
  REQUIRE(cli("run --config " + cfg.string() + " --out " + out.string()).code == 0);
  fs::path trace = out / "trace.jsonl";

  CHECK(cli("check " + trace.string()).code == 0);
  CHECK(cli("check --lin " + trace.string()).code == 0);

  // an execution of a dot nobody committed turns the trace rotten
  atlas::TraceEvent forged;
  forged.type = atlas::EventType::Execute;
  forged.proc = 1;
  forged.dot = atlas::Dot{9, 9};
  forged.batch = 99;
  fs::path rotten = scratch() / "rotten.jsonl";
  std::ofstream(rotten) << slurp(trace) << forged.to_json().dump() << "\n";
  CliResult bad = cli("check " + rotten.string());
  CHECK(bad.code == 1);
  Json rep = Json::parse(bad.out);
  CHECK(rep.at("ok") == false);
  CHECK(rep.at("issues").at(0).at("check") == "validity");

  // a truncated file is a usage problem, not a finding
  fs::path cut = scratch() / "cut.jsonl";
  std::ofstream(cut) << slurp(trace).substr(0, 40) << "\n";
  CliResult mangled = cli("check " + cut.string());
  CHECK(mangled.code == 2);
  CHECK(mangled.err.find("trace error at line") != std::string::npos);

  CHECK(cli("check /no/such/trace.jsonl").code == 2);
}

TEST_CASE("sweep emits one csv row per valid grid cell") {
  Json doc = small_config(3, 1);
  doc["workload"]["commands_per_client"] = 2;
  doc["sweep"] = {{"n", {3, 5}}, {"f", {1, 2}}, {"conflict_rate", {0.0, 1.0}},
                  {"seeds", 2}};
  fs::path cfg = write_config("sweep.json", doc);
  fs::path csv = scratch() / "grid.csv";
  CliResult r = cli("sweep --config " + cfg.string() + " --out " + csv.string());
  CHECK(r.code == 0);
  CHECK(r.err.find("skipping invalid cell n=3 f=2") != std::string::npos);

  std::istringstream in(slurp(csv));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "n,f,conflict_rate,seeds,fast_path_ratio,matching_ratio,"
        "commit_latency_mean,recovered");
  std::size_t rows = 0, f1_rows = 0;
  while (std::getline(in, line)) {
    rows++;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) fields.push_back(cell);
    REQUIRE(fields.size() == 8);
    CHECK(fields[3] == "2");
    if (fields[1] == "1") {
      f1_rows++;
      CHECK(fields[4] == "1");  // f=1 never leaves the fast path
    }
  }
  CHECK(rows == 6);  // 2x2x2 grid minus the two n=3,f=2 cells
  CHECK(f1_rows == 4);

  // without --out the table lands on stdout
  CliResult piped = cli("sweep --config " + cfg.string() + " --seeds 1");
  CHECK(piped.code == 0);
  CHECK(piped.out.rfind("n,f,conflict_rate", 0) == 0);
}

TEST_CASE("help is not an error") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("run --help").code == 0);
}
