#include "doctest.h"

#include <stdexcept>

#include "mpsm/batch.hpp"
#include "mpsm/error.hpp"

using namespace mpsm;

namespace {

bool same(const std::vector<SampleSummary>& a, const std::vector<SampleSummary>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].entropies != b[k].entropies || a[k].log_weight != b[k].log_weight) return false;
    for (std::size_t c = 0; c < a[k].spectra.size(); ++c)
      if (a[k].spectra[c] != b[k].spectra[c]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("ensemble names") {
  for (Ensemble e : {Ensemble::rmps, Ensemble::central, Ensemble::fs}) CHECK(parse_ensemble(to_string(e)) == e);
  CHECK_THROWS_AS(parse_ensemble("haar"), InvalidArgument);
}

TEST_CASE("map_samples is independent of the worker count") {
  const RngStream base(1, 0);
  auto draw = [](std::size_t k, RngStream& r) { return r.uniform() + static_cast<double>(k); };
  const auto s = map_samples_serial(1000, base, draw);
  for (int t : {1, 3, 8}) {
    set_thread_count(t);
    CHECK(map_samples_omp(1000, base, draw) == s);
  }
  set_thread_count(0);
}

TEST_CASE("sample summaries agree bitwise between kernels") {
  const RngStream base(2, 0);
  for (Ensemble e : {Ensemble::rmps, Ensemble::central}) {
    const BondProfile p(6, 2, 4);
    const auto s = sample_summaries_serial(p, e, 40, base);
    set_thread_count(4);
    CHECK(same(sample_summaries_omp(p, e, 40, base), s));
    set_thread_count(0);
    CHECK(same(sample_summaries(Execution::parallel, p, e, 40, base), s));
    CHECK(s[0].entropies.size() == 5);
    CHECK(s[0].spectra.size() == 5);
  }
  CHECK_THROWS_AS(sample_summaries_serial(BondProfile(4, 2, 2), Ensemble::fs, 4, base), InvalidArgument);
}

TEST_CASE("summaries from the MPS match the dense route") {
  RngStream rng(3, 0);
  const BondProfile p(6, 3, 5);
  const Mps m = sample_rmps(p, rng);
  const SampleSummary a = summarize(m, right_environments(m));
  const SampleSummary b = summarize_dense(to_statevector(m), p);
  for (std::size_t c = 0; c < a.entropies.size(); ++c) CHECK(std::abs(a.entropies[c] - b.entropies[c]) < 1e-10);
}

TEST_CASE("density accumulation") {
  const RngStream base(4, 0);
  const BondProfile p(4, 2, 2);
  // spans several blocks with a ragged tail
  const std::size_t n = 3 * kDensityBlock + 17;
  for (bool reweight : {false, true}) {
    const DensityEstimate s = accumulate_density_serial(p, reweight, n, base);
    set_thread_count(4);
    const DensityEstimate o = accumulate_density_omp(p, reweight, n, base);
    set_thread_count(0);
    CHECK(s.rho == o.rho);
    CHECK(s.weight_sum == o.weight_sum);
    CHECK(s.n_samples == n);
    CHECK(std::abs(s.rho.trace() - 1.0) < 1e-12);
    CHECK(hermiticity_residual(s.rho) < 1e-12);
    if (!reweight) CHECK(s.effective_sample_size() == doctest::Approx(double(n)));
    else CHECK(s.effective_sample_size() < double(n));
  }
  CHECK_THROWS_AS(accumulate_density_serial(BondProfile(11, 2, 2), false, 10, base), ResourceLimit);
  CHECK_THROWS_AS(accumulate_density_omp(BondProfile(11, 2, 2), false, 10, base), ResourceLimit);
}

TEST_CASE("exceptions escape parallel regions") {
  const RngStream base(5, 0);
  auto boom = [](std::size_t k, RngStream&) -> int {
    if (k == 37) throw std::runtime_error("sample 37");
    return 0;
  };
  CHECK_THROWS_WITH_AS(map_samples_omp(100, base, boom), "sample 37", std::runtime_error);
  ExceptionSlot slot;
  slot.run([] {});
  CHECK_NOTHROW(slot.rethrow());
  slot.run([] { throw InvalidArgument("first"); });
  slot.run([] { throw InvalidArgument("second"); });
  CHECK_THROWS_WITH(slot.rethrow(), "first");
}
