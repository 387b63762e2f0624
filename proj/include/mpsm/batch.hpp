#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <type_traits>
#include <vector>

#include "mpsm/mps.hpp"
#include "mpsm/rng.hpp"

namespace mpsm {

enum class Execution { serial, parallel };

enum class Ensemble { rmps, central, fs };

std::string to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& name);

/// Per-sample record shared by every ensemble.
struct SampleSummary {
  std::vector<double> entropies;     // bits, cuts 1..N-1
  std::vector<RealVector> spectra;   // ascending Schmidt spectrum per cut
  double log_weight = 0.0;           // FS correction; 0 for the central ensemble
};

SampleSummary summarize(const Mps& mps, const RightEnvironments& envs);
SampleSummary summarize_dense(const ComplexVector& psi, const BondProfile& profile);

/// Sets the worker count used by the OpenMP kernels (<= 0 keeps the runtime default).
void set_thread_count(int threads);
int thread_count();

/// Holds the first exception raised inside an OpenMP region.
class ExceptionSlot {
public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

/// fn(k, rng_k) for k in [0, n) with rng_k = base.split(k). Results land in
/// slot k, so output is independent of the worker count.
template <class Fn>
auto map_samples_serial(std::size_t n, const RngStream& base, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, RngStream&>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t, RngStream&>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    RngStream rng = base.split(k);
    out[k] = fn(k, rng);
  }
  return out;
}

template <class Fn>
auto map_samples_omp(std::size_t n, const RngStream& base, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, RngStream&>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t, RngStream&>> out(n);
  const auto count = static_cast<long long>(n);
  ExceptionSlot failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (long long k = 0; k < count; ++k) {
    failure.run([&] {
      RngStream rng = base.split(static_cast<std::size_t>(k));
      out[static_cast<std::size_t>(k)] = fn(static_cast<std::size_t>(k), rng);
    });
  }
  failure.rethrow();
  return out;
}

template <class Fn>
auto map_samples(Execution exec, std::size_t n, const RngStream& base, Fn&& fn) {
  return exec == Execution::parallel ? map_samples_omp(n, base, fn) : map_samples_serial(n, base, fn);
}

/// Independent draws from the RMPS or central-gauge ensembles.
std::vector<SampleSummary> sample_summaries_serial(const BondProfile& profile, Ensemble ensemble, std::size_t n,
                                                   const RngStream& base);
std::vector<SampleSummary> sample_summaries_omp(const BondProfile& profile, Ensemble ensemble, std::size_t n,
                                                const RngStream& base);
std::vector<SampleSummary> sample_summaries(Execution exec, const BondProfile& profile, Ensemble ensemble,
                                            std::size_t n, const RngStream& base);

/// Weighted Monte Carlo estimate of E[|psi><psi|] over RMPS draws, weight
/// exp(log_weight) when `reweight` is set.
struct DensityEstimate {
  ComplexMatrix rho;         // normalized by the weight sum
  double weight_sum = 0.0;   // in units of exp(log_scale)
  double weight_sq_sum = 0.0;
  double log_scale = 0.0;
  std::size_t n_samples = 0;

  double effective_sample_size() const;
};

inline constexpr std::size_t kDensityBlock = 256;

DensityEstimate accumulate_density_serial(const BondProfile& profile, bool reweight, std::size_t n,
                                          const RngStream& base);
DensityEstimate accumulate_density_omp(const BondProfile& profile, bool reweight, std::size_t n,
                                       const RngStream& base);

}  // namespace mpsm
