#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "mpsm/checkpoint.hpp"
#include "mpsm/error.hpp"
#include "mpsm/sampler.hpp"

using namespace mpsm;

namespace {

SamplerConfig small_config() {
  SamplerConfig c;
  c.n_sites = 5;
  c.local_dim = 2;
  c.max_bond = 4;
  c.n_samples = 12;
  c.burn_in_sweeps = 30;
  c.thin_sweeps = 2;
  c.seed = 9;
  c.chains = 3;
  return c;
}

std::vector<double> ar1(std::size_t n, double phi, RngStream& rng) {
  std::vector<double> x(n);
  double v = rng.normal() / std::sqrt(1 - phi * phi);
  for (auto& e : x) {
    v = phi * v + rng.normal();
    e = v;
  }
  return x;
}

void check_same_samples(const std::vector<ChainSample>& a, const std::vector<ChainSample>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].chain == b[k].chain);
    CHECK(a[k].sweep == b[k].sweep);
    CHECK(a[k].summary.entropies == b[k].summary.entropies);
    CHECK(a[k].summary.log_weight == b[k].summary.log_weight);
  }
}

}  // namespace

TEST_CASE("cached environments track the chain") {
  const BondProfile p(6, 2, 4);
  ChainState s = init_chain(p, RngStream(1, 0), 0.3);
  for (int k = 0; k < 20; ++k) sweep(s);
  CHECK(s.cache_residual() < 1e-9);
  CHECK(s.environment_residual() < 1e-10);
  const LogWeight fresh = fs_log_weight(right_environments(s.mps()), p);
  CHECK(std::abs(fresh.value - s.log_weight().value) < 1e-9);
  std::uint64_t proposed = 0;
  for (const auto& st : s.stats()) proposed += st.proposed;
  CHECK(proposed == 20 * 6);
  CHECK_THROWS_AS(s.propose_and_step(0), InvalidArgument);
  CHECK_THROWS_AS(s.set_sigma(-1.0), InvalidArgument);
  CHECK_THROWS_AS(init_chain(p, RngStream(1, 0), 0.0), InvalidArgument);
}

TEST_CASE("two sites: the weight is constant so every move is accepted") {
  const BondProfile p(2, 2, 2);
  ChainState s = init_chain(p, RngStream(2, 0), 0.5);
  for (int k = 0; k < 30; ++k) CHECK(sweep(s).accept_rate == 1.0);
  CHECK_FALSE(s.site_is_active(1));
}

TEST_CASE("autocorrelation diagnostics") {
  RngStream rng(3, 0);
  std::vector<double> iid(20000);
  for (auto& v : iid) v = rng.normal();
  const ChainDiagnostics a = chain_diagnostics(iid);
  CHECK(std::abs(a.autocorr_time - 1.0) < 0.1);
  CHECK(a.stationary);

  // AR(1): tau = (1 + phi) / (1 - phi) = 19
  const ChainDiagnostics b = chain_diagnostics(ar1(200000, 0.9, rng));
  CHECK(std::abs(b.autocorr_time - 19.0) < 1.5);
  CHECK(b.ess == doctest::Approx(200000 / b.autocorr_time));

  const std::vector<double> flat(100, 2.0);
  CHECK(chain_diagnostics(flat).autocorr_time == 100.0);
  CHECK_THROWS_AS(chain_diagnostics(std::vector<double>(49, 0.0)), InsufficientData);

  std::vector<double> trend(2000);
  for (std::size_t t = 0; t < trend.size(); ++t) trend[t] = 0.01 * t + rng.normal();
  CHECK_FALSE(chain_diagnostics(trend).stationary);
}

TEST_CASE("sampler config validation") {
  SamplerConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.samples_for_chain(0) + c.samples_for_chain(1) + c.samples_for_chain(2) == 12);
  c.burn_in_sweeps = -1;
  CHECK(c.effective_burn_in() == 250);
  c = small_config();
  c.chains = 13;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config();
  c.thin_sweeps = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config();
  c.sigma0 = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config();
  c.checkpoint_every = 5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("chains are reproducible across execution modes") {
  const SamplerConfig c = small_config();
  const FsRun s = run_fs_sampler(c, Execution::serial);
  set_thread_count(3);
  const FsRun p = run_fs_sampler(c, Execution::parallel);
  set_thread_count(0);
  CHECK(s.samples.size() == 12);
  check_same_samples(s.samples, p.samples);
  for (int k = 0; k < 3; ++k) CHECK(s.chains[k].log_weight_trace == p.chains[k].log_weight_trace);
}

TEST_CASE("step size only adapts during burn-in") {
  SamplerConfig c = small_config();
  c.chains = 1;
  c.n_samples = 30;
  const FsRun r = run_fs_sampler(c, Execution::serial);
  const auto& sig = r.chains[0].sigma_trace;
  REQUIRE(sig.size() == 30 + 60);
  CHECK(sig[0] == c.sigma0);
  for (std::size_t t = 31; t < sig.size(); ++t) CHECK(sig[t] == sig[30]);
  CHECK(r.chains[0].diagnostics.has_value());

  c.adapt = false;
  const FsRun f = run_fs_sampler(c, Execution::serial);
  for (double v : f.chains[0].sigma_trace) CHECK(v == c.sigma0);
}

TEST_CASE("resuming from a checkpoint continues the chain exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "mpsm_test_resume";
  std::filesystem::remove_all(dir);
  SamplerConfig full = small_config();
  full.n_samples = 24;
  const FsRun reference = run_fs_sampler(full, Execution::serial);

  // stop after 4 samples per chain, checkpointing at the last sweep
  SamplerConfig first = small_config();
  first.checkpoint_dir = dir.string();
  first.checkpoint_every = 38;
  first.n_samples = 12;
  const FsRun head = run_fs_sampler(first, Execution::parallel);
  for (int c = 0; c < 3; ++c) CHECK(std::filesystem::exists(checkpoint_path(dir, c)));

  SamplerConfig rest = full;
  rest.checkpoint_dir = dir.string();
  const FsRun tail = resume_fs_sampler(rest, Execution::parallel);
  std::vector<ChainSample> expected;
  for (const auto& s : reference.samples)
    if (s.sweep > 38) expected.push_back(s);
  check_same_samples(tail.samples, expected);
  for (const auto& s : head.samples) CHECK(s.sweep <= 38);

  std::filesystem::remove_all(dir);
  CHECK_THROWS(resume_fs_sampler(rest, Execution::serial));
  rest.checkpoint_dir.clear();
  CHECK_THROWS_AS(resume_fs_sampler(rest, Execution::serial), InvalidArgument);
}
