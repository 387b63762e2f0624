#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mpsm/batch.hpp"
#include "mpsm/mps.hpp"

namespace mpsm {

/// log of prod_i |Gamma_i|^(w_i); -inf when a weighted determinant vanishes.
struct LogWeight {
  double value = 0.0;

  bool vanishes() const;
};

/// w * log det(gamma), with 0 * log 0 treated as 0 for unweighted cuts.
double fs_log_term(const ComplexMatrix& gamma, int weight);

/// Density of the Fubini-Study measure relative to the RMPS measure.
LogWeight fs_log_weight(const RightEnvironments& envs, const BondProfile& profile);

/// sum_i w_i D_i log(1/D_i), attained when every Gamma_i = I/D_i.
double fs_log_weight_bound(const BondProfile& profile);

/// Gram matrix of tangent vectors at the reference point of the exponential
/// chart, one block per site.
struct MetricGram {
  ComplexMatrix matrix;
  std::vector<Eigen::Index> site_offsets;  // coordinate range of site i is [offsets[i-1], offsets[i])

  double max_cross_site_block() const;
  double hermiticity_residual() const;
  double log_det() const;
};

/// Central finite differences of the dense state in every coordinate of
/// every site chart U_i(x) = U_i exp(generator(x)), projected off |psi>.
MetricGram metric_gram_numeric(const BondProfile& profile, const std::vector<ComplexMatrix>& reference_unitaries,
                               double step);

struct PartitionEstimate {
  double z_hat = 0.0;
  double std_error = 0.0;
  double log_z_hat = 0.0;
  std::size_t n_samples = 0;
};

/// Monte Carlo estimate of Z = E_RMPS[exp(log_weight)].
PartitionEstimate partition_estimate(const BondProfile& profile, std::size_t n_samples, const RngStream& rng,
                                     Execution exec = Execution::parallel);

enum class IdentityEnsemble { rmps, fs_reweighted };

struct IdentityReport {
  double frobenius_rel_dev = 0.0;
  double max_offdiag = 0.0;
  double diag_spread = 0.0;
  double effective_samples = 0.0;
  std::size_t n_samples = 0;
};

/// Compares the sample average of |psi><psi| with I / d^N.
IdentityReport identity_resolution_check(const BondProfile& profile, IdentityEnsemble ensemble,
                                         std::size_t n_samples, const RngStream& rng,
                                         Execution exec = Execution::parallel);

using Observable = std::function<double(const Mps&, const RightEnvironments&)>;

Observable statevector_observable(std::function<double(const ComplexVector&)> f);
Observable cut_entropy_observable(int cut);

struct ReweightedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double effective_samples = 0.0;
  std::size_t n_samples = 0;
  bool degenerate_weights = false;
  std::string warning;
};

/// Self-normalized importance sampling of an FS expectation from RMPS draws.
ReweightedEstimate fs_expectation_reweighted(const Observable& observable, const BondProfile& profile,
                                             std::size_t n_samples, const RngStream& rng,
                                             Execution exec = Execution::parallel);

/// Same estimator on precomputed (value, log weight) pairs.
ReweightedEstimate self_normalized_estimate(const std::vector<double>& values, const std::vector<double>& log_weights);

}  // namespace mpsm
