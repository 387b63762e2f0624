// mpsm: sample, analyze and verify random MPS ensembles.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "mpsm/error.hpp"
#include "mpsm/experiment.hpp"
#include "mpsm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct SampleFlags {
  std::string config_file;
  std::optional<std::string> ensemble, out_dir, format;
  std::optional<int> n_sites, local_dim, bond_dim, chains, burn_in, thin;
  std::optional<std::size_t> samples;
  std::optional<double> step_size;
  std::optional<bool> adapt;
  std::optional<std::uint64_t> seed;
};

mpsm::ExperimentConfig merged_config(const SampleFlags& f) {
  mpsm::ExperimentConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw mpsm::IoError("cannot open config file " + f.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw mpsm::InvalidArgument("config file " + f.config_file + ": " + e.what());
    }
    c = mpsm::ExperimentConfig::from_json(j, c);
  }
  if (f.ensemble) c.ensemble = mpsm::parse_ensemble(*f.ensemble);
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.format) c.format = mpsm::parse_format(*f.format);
  if (f.n_sites) c.n_sites = *f.n_sites;
  if (f.local_dim) c.local_dim = *f.local_dim;
  if (f.bond_dim) c.bond_dim = *f.bond_dim;
  if (f.chains) c.chains = *f.chains;
  if (f.burn_in) c.burn_in_sweeps = *f.burn_in;
  if (f.thin) c.thin_sweeps = *f.thin;
  if (f.samples) c.samples = *f.samples;
  if (f.step_size) c.step_size = *f.step_size;
  if (f.adapt) c.adapt = *f.adapt;
  if (f.seed) c.seed = *f.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random matrix product state sampler"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: MPSM_THREADS or the OpenMP default)");

  SampleFlags sf;
  auto* sample = app.add_subcommand("sample", "Draw an ensemble and write profile/spectrum/diagnostics tables");
  sample->add_option("--config", sf.config_file, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  sample->add_option("--ensemble", sf.ensemble, "rmps, central or fs");
  sample->add_option("--n-sites", sf.n_sites);
  sample->add_option("--local-dim", sf.local_dim);
  sample->add_option("--bond-dim", sf.bond_dim);
  sample->add_option("--samples", sf.samples);
  sample->add_option("--chains", sf.chains, "Independent MH chains (fs)");
  sample->add_option("--burn-in", sf.burn_in, "Burn-in sweeps per chain (fs, default 50N)");
  sample->add_option("--thin", sf.thin, "Sweeps between samples (fs)");
  sample->add_option("--step-size", sf.step_size, "Initial proposal step (fs)");
  sample->add_option("--adapt", sf.adapt, "Adapt the step during burn-in (fs)");
  sample->add_option("--seed", sf.seed);
  sample->add_option("--out-dir", sf.out_dir);
  sample->add_option("--format", sf.format, "csv or json");
  sample->add_option("--threads", threads);

  mpsm::AnalyzeOptions ao;
  std::string spectrum_path, profile_path, analysis_out;
  auto* analyze = app.add_subcommand("analyze", "Compare a sampled spectrum with the Marchenko-Pastur law");
  analyze->add_option("--spectrum", spectrum_path, "spectrum.csv from `sample`")->required();
  analyze->add_option("--profile", profile_path, "profile.csv for flip-symmetry z-scores");
  analyze->add_option("--out", analysis_out, "Output file (default: analysis.json next to the spectrum)");
  analyze->add_option("--law", ao.law, "Reference law (mp)");
  analyze->add_option("--c", ao.c, "Aspect ratio (default 1/d, or 1/(2d-1) for fs)");
  analyze->add_option("--cut", ao.cut, "Cut to analyze (default: equilibrium cut)");
  analyze->add_option("--bins", ao.bins);
  analyze->add_option("--moments", ao.moments);

  mpsm::VerifyOptions vo;
  std::string suite = "all", verify_out = ".";
  auto* verify = app.add_subcommand("verify", "Run verification checks and write verify_report.json");
  verify->add_option("--suite", suite)->check(CLI::IsMember(mpsm::suite_names()));
  verify->add_option("--n-sites", vo.n_sites, "Chain length for the identity suite");
  verify->add_option("--bond-dim", vo.bond_dim, "Bond dimension for the identity suite");
  verify->add_option("--samples", vo.samples, "Monte Carlo sample count override");
  verify->add_option("--seed", vo.seed);
  verify->add_option("--out-dir", verify_out);
  verify->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    mpsm::set_thread_count(threads > 0 ? threads : mpsm::threads_from_env());

    if (sample->parsed()) {
      const mpsm::SampleOutput out = mpsm::cmd_sample(merged_config(sf));
      for (const auto& f : out.files) std::cout << f.string() << '\n';
      return kExitOk;
    }
    if (analyze->parsed()) {
      ao.spectrum = spectrum_path;
      ao.profile = profile_path;
      ao.output = analysis_out;
      const nlohmann::json res = mpsm::cmd_analyze(ao);
      std::cout << "cut " << res["cut"] << ", c = " << res["c"] << ", ks = " << res["ks"] << '\n';
      if (res.contains("profile")) std::cout << "max |flip z| = " << res["profile"]["max_abs_flip_z"] << '\n';
      return kExitOk;
    }
    if (verify->parsed()) {
      const mpsm::VerifyReport rep = mpsm::run_suite(suite, vo, [](const mpsm::CriterionReport& r) {
        std::cout << mpsm::summary_line(r) << std::endl;
      });
      std::filesystem::create_directories(verify_out);
      const auto path = std::filesystem::path(verify_out) / "verify_report.json";
      std::ofstream f(path);
      if (!f) throw mpsm::IoError("cannot write " + path.string());
      f << rep.to_json().dump(2) << '\n';
      return rep.passed() ? kExitOk : kExitVerifyFailed;
    }
  } catch (const mpsm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mpsm::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mpsm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mpsm::InsufficientData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitUsage;
}
