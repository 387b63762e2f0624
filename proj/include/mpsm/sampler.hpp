#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpsm/batch.hpp"
#include "mpsm/measure.hpp"
#include "mpsm/mps.hpp"
#include "mpsm/rng.hpp"

namespace mpsm {

struct SiteStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;

  bool operator==(const SiteStats&) const = default;
};

/// Mutable state of one Metropolis-Hastings chain targeting the FS measure.
///
/// Caches the right environments and the per-cut terms w_i log|Gamma_i| so
/// that a proposal at site j only recomputes Gamma_(j-1)..Gamma_1.
class ChainState {
public:
  ChainState(BondProfile profile, std::vector<ComplexMatrix> unitaries, RngStream rng, double sigma);

  const BondProfile& profile() const { return profile_; }
  const ComplexMatrix& unitary(int site) const { return unitaries_.at(static_cast<std::size_t>(site - 1)); }
  const std::vector<ComplexMatrix>& unitaries() const { return unitaries_; }
  const RightEnvironments& envs() const { return envs_; }
  double log_term(int cut) const { return log_terms_.at(static_cast<std::size_t>(cut)); }
  LogWeight log_weight() const { return {log_weight_}; }
  const RngStream& rng() const { return rng_; }
  double sigma() const { return sigma_; }
  void set_sigma(double sigma);
  const std::vector<SiteStats>& stats() const { return stats_; }
  /// Sum of log alpha over accepted moves since construction.
  double accepted_log_alpha() const { return accepted_log_alpha_; }

  Mps mps() const;

  /// |log_weight - sum of cached terms|.
  double cache_residual() const;
  /// max deviation of the cached environments from a fresh recurrence.
  double environment_residual() const;

  /// One proposal U_j -> U_j exp(sigma K) with K = i * GUE; returns acceptance.
  bool propose_and_step(int site);

  /// True when a move at `site` can change the weight (some w_i > 0 with i < site).
  bool site_is_active(int site) const;

  /// Restores counters when resuming from a checkpoint.
  void restore_counters(std::vector<SiteStats> stats, double accepted_log_alpha);

private:
  double refresh_from(int site, std::vector<ComplexMatrix>& gammas, std::vector<double>& terms,
                      const ComplexMatrix& isometry) const;

  BondProfile profile_;
  std::vector<ComplexMatrix> unitaries_;
  RightEnvironments envs_;
  std::vector<double> log_terms_;  // index = cut, 0 and N unused
  double log_weight_ = 0.0;
  RngStream rng_;
  double sigma_;
  std::vector<SiteStats> stats_;
  double accepted_log_alpha_ = 0.0;
};

/// RMPS draw from `rng`, which the chain then owns.
ChainState init_chain(const BondProfile& profile, RngStream rng, double sigma0);

bool propose_and_step(ChainState& state, int site);

struct SweepResult {
  double accept_rate = 0.0;         // accepted / N
  double active_accept_rate = 1.0;  // over sites whose move changes the weight
  int active_sites = 0;
};

/// One proposal per site, j = N down to 1.
SweepResult sweep(ChainState& state);

struct ChainDiagnostics {
  double autocorr_time = 0.0;
  double ess = 0.0;
  bool stationary = true;
  double geweke_z = 0.0;
};

/// Windowed integrated autocorrelation time (Sokal, c = 5), ESS = n / tau and
/// a split-trace mean comparison (first 10% vs last 50%).
ChainDiagnostics chain_diagnostics(std::span<const double> trace);

struct SamplerConfig {
  int n_sites = 6;
  int local_dim = 2;
  int max_bond = 4;
  std::size_t n_samples = 1;
  int burn_in_sweeps = -1;  // < 0: 50 * N
  int thin_sweeps = 1;
  double sigma0 = 0.1;
  bool adapt = true;
  std::uint64_t seed = 0;
  int chains = 1;
  bool keep_states = false;
  std::string checkpoint_dir;  // empty: no checkpoints
  int checkpoint_every = 0;

  BondProfile profile() const { return {n_sites, local_dim, max_bond}; }
  int effective_burn_in() const { return burn_in_sweeps < 0 ? 50 * n_sites : burn_in_sweeps; }
  std::size_t samples_for_chain(int chain) const;
  void validate() const;
};

struct ChainSample {
  int chain = 0;
  std::int64_t sweep = 0;  // sweeps completed when the sample was taken
  SampleSummary summary;
  std::vector<ComplexMatrix> unitaries;  // only with keep_states
};

struct ChainReport {
  int chain = 0;
  std::vector<double> log_weight_trace;  // one entry per sweep
  std::vector<double> accept_trace;
  std::vector<double> sigma_trace;
  std::vector<SiteStats> site_stats;
  std::optional<ChainDiagnostics> diagnostics;  // over post-burn-in sweeps
  double initial_log_weight = 0.0;
  double final_log_weight = 0.0;
  double accepted_log_alpha = 0.0;
  double final_sigma = 0.0;
  std::int64_t first_sweep = 0;
};

struct FsRun {
  std::vector<ChainSample> samples;  // chain-major, in sweep order
  std::vector<ChainReport> chains;
};

/// Runs `config.chains` independent chains (chain c uses stream (seed, c)),
/// each burning in with optional step-size adaptation, then emitting one
/// sample every thin_sweeps sweeps.
FsRun run_fs_sampler(const SamplerConfig& config, Execution exec = Execution::parallel);

/// Continues every chain from its checkpoint in `config.checkpoint_dir`;
/// only samples emitted after the checkpoint are returned.
FsRun resume_fs_sampler(const SamplerConfig& config, Execution exec = Execution::parallel);

/// Chain `chain` from an explicit starting point.
ChainReport run_chain(ChainState& state, const SamplerConfig& config, int chain, std::int64_t start_sweep,
                      std::vector<ChainSample>& samples);

}  // namespace mpsm
