#include "mpsm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <string>

#include "mpsm/checkpoint.hpp"
#include "mpsm/error.hpp"

namespace mpsm {

namespace {

constexpr double kTargetAcceptance = 0.35;
constexpr double kAdaptRate = 0.1;

double sum_terms(const std::vector<double>& terms, int first, int last) {
  double s = 0.0;
  for (int i = first; i <= last; ++i) {
    const double t = terms[static_cast<std::size_t>(i)];
    if (std::isinf(t)) return -std::numeric_limits<double>::infinity();
    s += t;
  }
  return s;
}

}  // namespace

ChainState::ChainState(BondProfile profile, std::vector<ComplexMatrix> unitaries, RngStream rng, double sigma)
    : profile_(std::move(profile)),
      unitaries_(std::move(unitaries)),
      envs_(right_environments(mps_from_unitaries(profile_, unitaries_))),
      log_terms_(static_cast<std::size_t>(profile_.n_sites()) + 1, 0.0),
      rng_(std::move(rng)),
      sigma_(sigma),
      stats_(static_cast<std::size_t>(profile_.n_sites())) {
  if (!(sigma >= 0.0)) throw InvalidArgument("ChainState: step size must be non-negative");
  for (int i = 1; i < profile_.n_sites(); ++i) {
    log_terms_[static_cast<std::size_t>(i)] = fs_log_term(envs_.gamma(i), profile_.weight(i));
  }
  log_weight_ = sum_terms(log_terms_, 1, profile_.n_sites() - 1);
}

void ChainState::set_sigma(double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("ChainState: step size must be non-negative");
  sigma_ = sigma;
}

Mps ChainState::mps() const { return mps_from_unitaries(profile_, unitaries_); }

double ChainState::cache_residual() const {
  const double s = sum_terms(log_terms_, 1, profile_.n_sites() - 1);
  if (std::isinf(s) && std::isinf(log_weight_)) return 0.0;
  return std::abs(s - log_weight_);
}

double ChainState::environment_residual() const {
  const RightEnvironments fresh = right_environments(mps());
  double worst = 0.0;
  for (int i = 0; i <= profile_.n_sites(); ++i) worst = std::max(worst, max_abs(fresh.gamma(i) - envs_.gamma(i)));
  return worst;
}

bool ChainState::site_is_active(int site) const {
  for (int i = 1; i < site; ++i)
    if (profile_.weight(i) > 0) return true;
  return false;
}

void ChainState::restore_counters(std::vector<SiteStats> stats, double accepted_log_alpha) {
  if (stats.size() != stats_.size()) throw InvalidArgument("restore_counters: wrong number of sites");
  stats_ = std::move(stats);
  accepted_log_alpha_ = accepted_log_alpha;
}

double ChainState::refresh_from(int site, std::vector<ComplexMatrix>& gammas, std::vector<double>& terms,
                                const ComplexMatrix& isometry) const {
  const int d = profile_.local_dim();
  gammas[static_cast<std::size_t>(site - 1)] = transfer_right(isometry, envs_.gamma(site), d);
  for (int i = site - 1; i >= 1; --i) {
    const auto ui = static_cast<std::size_t>(i);
    gammas[ui - 1] = transfer_right(unitaries_[ui - 1].leftCols(profile_.bond(i)), gammas[ui], d);
  }
  for (int i = 1; i < site; ++i) {
    terms[static_cast<std::size_t>(i)] = fs_log_term(gammas[static_cast<std::size_t>(i)], profile_.weight(i));
  }
  return sum_terms(terms, 1, site - 1);
}

bool ChainState::propose_and_step(int site) {
  if (site < 1 || site > profile_.n_sites()) throw InvalidArgument("propose_and_step: site out of range");
  const auto us = static_cast<std::size_t>(site);
  const int n = profile_.unitary_dim(site);

  const ComplexMatrix generator = Complex(0.0, sigma_) * gue_matrix(n, rng_);
  ComplexMatrix candidate = unitaries_[us - 1] * anti_hermitian_exp(generator);

  std::vector<ComplexMatrix> gammas(us);
  std::vector<double> terms(us, 0.0);
  const double new_sum = refresh_from(site, gammas, terms, candidate.leftCols(profile_.bond(site)));
  const double old_sum = sum_terms(log_terms_, 1, site - 1);

  double log_alpha;
  if (std::isinf(new_sum)) {
    log_alpha = -std::numeric_limits<double>::infinity();
  } else if (std::isinf(old_sum)) {
    log_alpha = std::numeric_limits<double>::infinity();
  } else {
    log_alpha = new_sum - old_sum;
  }

  const double u = rng_.uniform();
  auto& st = stats_[us - 1];
  ++st.proposed;
  if (!(std::log(u) < log_alpha)) return false;

  ++st.accepted;
  if (std::isfinite(log_alpha)) accepted_log_alpha_ += log_alpha;
  unitaries_[us - 1] = std::move(candidate);
  for (std::size_t i = 0; i < us; ++i) envs_.gamma(static_cast<int>(i)) = std::move(gammas[i]);
  for (int i = 1; i < site; ++i) log_terms_[static_cast<std::size_t>(i)] = terms[static_cast<std::size_t>(i)];
  log_weight_ = sum_terms(log_terms_, 1, profile_.n_sites() - 1);
  return true;
}

ChainState init_chain(const BondProfile& profile, RngStream rng, double sigma0) {
  if (!(sigma0 > 0.0)) throw InvalidArgument("init_chain: sigma0 must be positive");
  std::vector<ComplexMatrix> unitaries = sample_site_unitaries(profile, rng);
  return ChainState(profile, std::move(unitaries), std::move(rng), sigma0);
}

bool propose_and_step(ChainState& state, int site) { return state.propose_and_step(site); }

SweepResult sweep(ChainState& state) {
  const int n = state.profile().n_sites();
  int accepted = 0, active = 0, active_accepted = 0;
  for (int j = n; j >= 1; --j) {
    const bool ok = state.propose_and_step(j);
    accepted += ok;
    if (state.site_is_active(j)) {
      ++active;
      active_accepted += ok;
    }
  }
  SweepResult r;
  r.accept_rate = static_cast<double>(accepted) / n;
  r.active_sites = active;
  r.active_accept_rate = active > 0 ? static_cast<double>(active_accepted) / active : 1.0;
  return r;
}

ChainDiagnostics chain_diagnostics(std::span<const double> trace) {
  const std::size_t n = trace.size();
  if (n < 50) throw InsufficientData("chain_diagnostics: need at least 50 trace entries, got " + std::to_string(n));
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : trace) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);

  ChainDiagnostics out;
  if (!(c0 > 1e-300 * std::max(1.0, mean * mean))) {
    out.autocorr_time = static_cast<double>(n);
    out.ess = 1.0;
    out.stationary = true;
    return out;
  }

  double tau = 1.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) c += (trace[t] - mean) * (trace[t + lag] - mean);
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= 5.0 * tau) break;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  out.autocorr_time = tau;
  out.ess = static_cast<double>(n) / tau;

  const std::size_t na = std::max<std::size_t>(n / 10, 2);
  const std::size_t nb = std::max<std::size_t>(n / 2, 2);
  auto seg_stats = [&](std::size_t begin, std::size_t len) {
    double m = 0.0;
    for (std::size_t t = begin; t < begin + len; ++t) m += trace[t];
    m /= static_cast<double>(len);
    double v = 0.0;
    for (std::size_t t = begin; t < begin + len; ++t) v += (trace[t] - m) * (trace[t] - m);
    v /= static_cast<double>(len - 1);
    return std::pair{m, v};
  };
  const auto [ma, va] = seg_stats(0, na);
  const auto [mb, vb] = seg_stats(n - nb, nb);
  const double denom = std::sqrt(tau * (va / static_cast<double>(na) + vb / static_cast<double>(nb)));
  out.geweke_z = denom > 0.0 ? (ma - mb) / denom : 0.0;
  out.stationary = std::abs(out.geweke_z) < 3.0;
  return out;
}

std::size_t SamplerConfig::samples_for_chain(int chain) const {
  const auto c = static_cast<std::size_t>(chains);
  const auto idx = static_cast<std::size_t>(chain);
  return n_samples / c + (idx < n_samples % c ? 1 : 0);
}

void SamplerConfig::validate() const {
  (void)profile();
  if (n_samples < 1) throw InvalidArgument("sampler: n_samples must be >= 1");
  if (chains < 1) throw InvalidArgument("sampler: chains must be >= 1");
  if (static_cast<std::size_t>(chains) > n_samples) throw InvalidArgument("sampler: more chains than samples");
  if (thin_sweeps < 1) throw InvalidArgument("sampler: thin_sweeps must be >= 1");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw InvalidArgument("sampler: sigma0 must be positive");
  if (checkpoint_every < 0) throw InvalidArgument("sampler: checkpoint_every must be >= 0");
  if (checkpoint_every > 0 && checkpoint_dir.empty()) {
    throw InvalidArgument("sampler: checkpoint_every requires a checkpoint directory");
  }
}

ChainReport run_chain(ChainState& state, const SamplerConfig& config, int chain, std::int64_t start_sweep,
                      std::vector<ChainSample>& samples) {
  const std::int64_t burn = config.effective_burn_in();
  const std::int64_t thin = config.thin_sweeps;
  const std::int64_t total = burn + static_cast<std::int64_t>(config.samples_for_chain(chain)) * thin;

  ChainReport rep;
  rep.chain = chain;
  rep.first_sweep = start_sweep;
  rep.initial_log_weight = state.log_weight().value;
  const double alpha0 = state.accepted_log_alpha();

  for (std::int64_t s = start_sweep; s < total; ++s) {
    const double sigma_used = state.sigma();
    const SweepResult r = sweep(state);
    if (s < burn && config.adapt && r.active_sites > 0) {
      state.set_sigma(state.sigma() * std::exp(kAdaptRate * (r.active_accept_rate - kTargetAcceptance)));
    }
    rep.log_weight_trace.push_back(state.log_weight().value);
    rep.accept_trace.push_back(r.accept_rate);
    rep.sigma_trace.push_back(sigma_used);

    const std::int64_t done = s + 1;
    if (done > burn && (done - burn) % thin == 0) {
      ChainSample cs;
      cs.chain = chain;
      cs.sweep = done;
      const Mps mps = state.mps();
      cs.summary = summarize(mps, state.envs());
      if (config.keep_states) cs.unitaries = state.unitaries();
      samples.push_back(std::move(cs));
    }
    if (config.checkpoint_every > 0 && done % config.checkpoint_every == 0) {
      save_checkpoint(make_checkpoint(state, config, chain, done), checkpoint_path(config.checkpoint_dir, chain));
    }
  }

  rep.site_stats = state.stats();
  rep.final_log_weight = state.log_weight().value;
  rep.accepted_log_alpha = state.accepted_log_alpha() - alpha0;
  rep.final_sigma = state.sigma();

  const std::int64_t skip = std::max<std::int64_t>(0, burn - start_sweep);
  if (static_cast<std::int64_t>(rep.log_weight_trace.size()) - skip >= 50) {
    const std::span<const double> post(rep.log_weight_trace.data() + skip, rep.log_weight_trace.size() - skip);
    if (std::all_of(post.begin(), post.end(), [](double v) { return std::isfinite(v); })) {
      rep.diagnostics = chain_diagnostics(post);
    }
  }
  return rep;
}

namespace {

FsRun run_chains(const SamplerConfig& config, Execution exec, bool resume) {
  config.validate();
  const BondProfile profile = config.profile();
  if (config.checkpoint_every > 0) std::filesystem::create_directories(config.checkpoint_dir);

  std::vector<ChainReport> reports(static_cast<std::size_t>(config.chains));
  std::vector<std::vector<ChainSample>> per_chain(static_cast<std::size_t>(config.chains));

  auto work = [&](int c) {
    const auto uc = static_cast<std::size_t>(c);
    if (resume) {
      const Checkpoint cp = load_checkpoint(checkpoint_path(config.checkpoint_dir, c));
      ChainState state = restore_chain(cp, profile);
      reports[uc] = run_chain(state, config, c, cp.sweep_index, per_chain[uc]);
    } else {
      ChainState state = init_chain(profile, RngStream(config.seed, static_cast<std::uint64_t>(c)), config.sigma0);
      reports[uc] = run_chain(state, config, c, 0, per_chain[uc]);
    }
  };

  if (exec == Execution::parallel) {
    ExceptionSlot failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < config.chains; ++c) failure.run([&] { work(c); });
    failure.rethrow();
  } else {
    for (int c = 0; c < config.chains; ++c) work(c);
  }

  FsRun out;
  out.chains = std::move(reports);
  for (auto& v : per_chain)
    for (auto& s : v) out.samples.push_back(std::move(s));
  return out;
}

}  // namespace

FsRun run_fs_sampler(const SamplerConfig& config, Execution exec) { return run_chains(config, exec, false); }

FsRun resume_fs_sampler(const SamplerConfig& config, Execution exec) {
  if (config.checkpoint_dir.empty()) throw InvalidArgument("resume_fs_sampler: no checkpoint directory");
  return run_chains(config, exec, true);
}

}  // namespace mpsm
