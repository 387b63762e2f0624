#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpsm/error.hpp"
#include "mpsm/experiment.hpp"

using namespace mpsm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mpsm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MPSM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small(Ensemble e, const fs::path& dir) {
  ExperimentConfig c;
  c.n_sites = 6;
  c.local_dim = 2;
  c.bond_dim = 4;
  c.ensemble = e;
  c.samples = 30;
  c.chains = 2;
  c.burn_in_sweeps = 20;
  c.thin_sweeps = 2;
  c.seed = 5;
  c.out_dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("double formatting roundtrips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("config validation and json merge") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_sites = 1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = ExperimentConfig{};
  c.ensemble = Ensemble::fs;
  c.chains = 300;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = ExperimentConfig{};
  c.ensemble = Ensemble::central;
  c.n_sites = 30;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);

  ExperimentConfig base;
  base.seed = 77;
  const ExperimentConfig m =
      ExperimentConfig::from_json(nlohmann::json{{"n_sites", 8}, {"ensemble", "fs"}, {"format", "json"}}, base);
  CHECK(m.n_sites == 8);
  CHECK(m.ensemble == Ensemble::fs);
  CHECK(m.format == OutputFormat::json);
  CHECK(m.seed == 77);
  const ExperimentConfig r = ExperimentConfig::from_json(m.to_json());
  CHECK(r.to_json() == m.to_json());
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json{{"n_site", 8}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json{{"n_sites", "eight"}}), InvalidArgument);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("sample writes the documented tables") {
  const fs::path dir = scratch("sample");
  const SampleOutput out = cmd_sample(small(Ensemble::rmps, dir));
  CHECK(out.samples.size() == 30);
  const Table prof = read_table(dir / "profile.csv", kProfileHeader);
  CHECK(prof.rows.size() == 30 * 5);
  CHECK(prof.rows[0][0] == "rmps");
  const Table spec = read_table(dir / "spectrum.csv", kSpectrumHeader);
  CHECK(spec.rows.size() == 30 * (2 + 4 + 4 + 4 + 2));
  CHECK_FALSE(fs::exists(dir / "diagnostics.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "run_meta.json"));
  CHECK(meta["seed"] == 5);
  CHECK(meta["config"]["n_sites"] == 6);
  CHECK(meta.contains("eigen_version"));
  CHECK(meta["files"].size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on the thread count") {
  for (Ensemble e : {Ensemble::rmps, Ensemble::central, Ensemble::fs}) {
    const fs::path a = scratch("threads_a"), b = scratch("threads_b");
    set_thread_count(1);
    cmd_sample(small(e, a));
    set_thread_count(4);
    cmd_sample(small(e, b));
    set_thread_count(0);
    for (const char* f : {"profile.csv", "spectrum.csv"}) CHECK(slurp(a / f) == slurp(b / f));
    if (e == Ensemble::fs) {
      CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
      const Table d = read_table(a / "diagnostics.csv", kDiagnosticsHeader);
      CHECK(d.rows.size() == 2 * (20 + 15 * 2));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("json tables read back like csv") {
  const fs::path c = scratch("fmt_csv"), j = scratch("fmt_json");
  cmd_sample(small(Ensemble::central, c));
  ExperimentConfig cj = small(Ensemble::central, j);
  cj.format = OutputFormat::json;
  cmd_sample(cj);
  const Table tc = read_table(c / "spectrum.csv", kSpectrumHeader), tj = read_table(j / "spectrum.json", kSpectrumHeader);
  CHECK(tc.rows == tj.rows);
  fs::remove_all(c);
  fs::remove_all(j);
}

TEST_CASE("analyze") {
  const fs::path dir = scratch("analyze");
  ExperimentConfig cfg = small(Ensemble::rmps, dir);
  cfg.n_sites = 8;
  cfg.samples = 200;
  cmd_sample(cfg);
  AnalyzeOptions o;
  o.spectrum = dir / "spectrum.csv";
  o.profile = dir / "profile.csv";
  const nlohmann::json r = cmd_analyze(o);
  CHECK(r["cut"] == 2);
  CHECK(r["c"].get<double>() == doctest::Approx(0.5));
  CHECK(r["ks"].get<double>() < 0.2);
  CHECK(r["histogram"]["edges"].size() == 41);
  CHECK(r["moments"]["empirical"][0].get<double>() == doctest::Approx(1.0));
  CHECK(r["profile"]["flip_symmetry"].size() == 3);
  CHECK(fs::exists(dir / "analysis.json"));

  o.cut = 1;
  CHECK_THROWS_AS(cmd_analyze(o), InvalidArgument);
  o.cut.reset();
  o.law = "wigner";
  CHECK_THROWS_AS(cmd_analyze(o), InvalidArgument);

  std::ofstream(dir / "bad.csv") << kSpectrumHeader << "\nrmps,0,2,0,0.5,1.0\nrmps,0,2,1,oops,1.0\n";
  AnalyzeOptions b;
  b.spectrum = dir / "bad.csv";
  CHECK_THROWS_WITH_AS(cmd_analyze(b), doctest::Contains("bad.csv row 3"), ParseError);
  std::ofstream(dir / "empty.csv") << kSpectrumHeader << "\n";
  b.spectrum = dir / "empty.csv";
  CHECK_THROWS_WITH_AS(cmd_analyze(b), doctest::Contains("no data"), InsufficientData);
  std::ofstream(dir / "short.csv") << kSpectrumHeader << "\nrmps,0,2\n";
  b.spectrum = dir / "short.csv";
  CHECK_THROWS_WITH_AS(cmd_analyze(b), doctest::Contains("row 2"), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("paired z") {
  CHECK(paired_z({1, 2, 3, 4}, {1, 2, 3, 4}) == 0.0);
  CHECK(paired_z({2, 3, 5, 6}, {1, 2, 3, 4}) > 0.0);
  CHECK_THROWS_AS(paired_z({1}, {1}), InsufficientData);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("sample --n-sites nope") == 2);
  CHECK(run_cli("sample --n-sites 1 --out-dir " + dir.string()) == 2);
  CHECK(run_cli("sample --ensemble haar --out-dir " + dir.string()) == 2);
  CHECK(run_cli("sample --n-sites 4 --bond-dim 2 --samples 5 --out-dir /proc/mpsm_forbidden") == 3);
  CHECK(run_cli("verify --suite spectra --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "verify_report.json"));

  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"n_sites": 5, "bond_dim": 2, "samples": 7, "seed": 3})";
  CHECK(run_cli("sample --config " + (dir / "cfg.json").string() + " --samples 4 --out-dir " + (dir / "o").string()) == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "o" / "run_meta.json"));
  CHECK(meta["config"]["samples"] == 4);
  CHECK(meta["config"]["n_sites"] == 5);
  CHECK(run_cli("analyze --spectrum " + (dir / "o" / "spectrum.csv").string()) == 0);
  CHECK(run_cli("analyze --spectrum " + (dir / "missing.csv").string()) == 3);
  std::ofstream(dir / "empty.csv") << kSpectrumHeader << "\n";
  CHECK(run_cli("analyze --spectrum " + (dir / "empty.csv").string()) == 2);
  fs::remove_all(dir);
}
