#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mpsm/batch.hpp"
#include "mpsm/sampler.hpp"

namespace mpsm {

enum class OutputFormat { csv, json };

std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& name);

struct ExperimentConfig {
  int n_sites = 10;
  int local_dim = 2;
  int bond_dim = 8;
  Ensemble ensemble = Ensemble::rmps;
  std::size_t samples = 200;
  int chains = 1;
  int burn_in_sweeps = -1;  // < 0: 50 * N
  int thin_sweeps = 1;
  double step_size = 0.1;
  bool adapt = true;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::csv;

  BondProfile profile() const { return {n_sites, local_dim, bond_dim}; }
  SamplerConfig sampler_config() const;
  /// Throws InvalidArgument on the first bad field.
  void validate() const;

  nlohmann::json to_json() const;
  /// Fields present in `j` override `base`; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base);
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

struct SampleOutput {
  std::vector<SampleSummary> samples;
  std::vector<ChainReport> chains;  // fs only
  std::vector<std::filesystem::path> files;
  double wall_seconds = 0.0;
};

/// Draws the configured ensemble and writes profile, spectrum, diagnostics
/// (fs only) and run_meta.json into out_dir.
SampleOutput cmd_sample(const ExperimentConfig& config, Execution exec = Execution::parallel);

struct AnalyzeOptions {
  std::filesystem::path spectrum;  // spectrum.csv / .json
  std::filesystem::path profile;   // optional profile.csv / .json
  std::filesystem::path output;    // analysis.json; empty: next to the spectrum file
  std::string law = "mp";
  std::optional<double> c;         // default: 1/d (rmps, central), 1/(2d-1) (fs)
  std::optional<int> cut;          // default: equilibrium cut of the ensemble
  int bins = 40;
  int moments = 8;
};

/// KS distance, histogram and moments of the scaled spectrum at one cut
/// against MP(c); flip-symmetry z-scores when a profile is given.
nlohmann::json cmd_analyze(const AnalyzeOptions& options);

/// A table written by cmd_sample, fields kept as text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
/// Reads the csv or json form; the header must equal `expected_header`.
Table read_table(const std::filesystem::path& path, const std::string& expected_header);

inline constexpr const char* kProfileHeader = "ensemble,sample,cut,entropy_bits,entropy_frac";
inline constexpr const char* kSpectrumHeader = "ensemble,sample,cut,index,eigenvalue,scaled_eigenvalue";
inline constexpr const char* kDiagnosticsHeader = "chain,sweep,log_weight,accept_rate,step_size";

/// Paired z-score of mean(a - b) for per-sample values.
double paired_z(const std::vector<double>& a, const std::vector<double>& b);

/// Worker count from MPSM_THREADS, 0 when unset.
int threads_from_env();

std::string version_string();

}  // namespace mpsm
