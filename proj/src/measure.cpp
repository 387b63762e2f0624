#include "mpsm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpsm/error.hpp"
#include "mpsm/param.hpp"

namespace mpsm {

bool LogWeight::vanishes() const { return std::isinf(value) && value < 0.0; }

double fs_log_term(const ComplexMatrix& gamma, int weight) {
  if (weight == 0) return 0.0;
  return static_cast<double>(weight) * log_det_psd(gamma);
}

LogWeight fs_log_weight(const RightEnvironments& envs, const BondProfile& profile) {
  if (envs.n_sites() != profile.n_sites()) {
    throw InvalidArgument("fs_log_weight: environments do not match the profile");
  }
  double total = 0.0;
  for (int i = 1; i < profile.n_sites(); ++i) {
    const ComplexMatrix& g = envs.gamma(i);
    if (g.rows() != profile.bond(i)) throw InvalidArgument("fs_log_weight: Gamma_" + std::to_string(i) + " has wrong size");
    const double term = fs_log_term(g, profile.weight(i));
    if (std::isinf(term)) return {-std::numeric_limits<double>::infinity()};
    total += term;
  }
  return {total};
}

double fs_log_weight_bound(const BondProfile& profile) {
  double total = 0.0;
  for (int i = 1; i < profile.n_sites(); ++i) {
    const double di = profile.bond(i);
    total += profile.weight(i) * di * std::log(1.0 / di);
  }
  return total;
}

double MetricGram::max_cross_site_block() const {
  double worst = 0.0;
  const std::size_t n_sites = site_offsets.size() - 1;
  for (std::size_t a = 0; a < n_sites; ++a) {
    for (std::size_t b = 0; b < n_sites; ++b) {
      if (a == b) continue;
      const Eigen::Index r0 = site_offsets[a], r1 = site_offsets[a + 1];
      const Eigen::Index c0 = site_offsets[b], c1 = site_offsets[b + 1];
      if (r1 == r0 || c1 == c0) continue;
      worst = std::max(worst, max_abs(matrix.block(r0, c0, r1 - r0, c1 - c0)));
    }
  }
  return worst;
}

double MetricGram::hermiticity_residual() const { return mpsm::hermiticity_residual(matrix); }

double MetricGram::log_det() const { return log_det_psd(matrix); }

MetricGram metric_gram_numeric(const BondProfile& profile, const std::vector<ComplexMatrix>& reference, double step) {
  if (!(step >= 1e-5 && step <= 1e-3)) throw InvalidArgument("metric_gram_numeric: step must lie in [1e-5, 1e-3]");
  if (profile.hilbert_dim(kStatevectorLimit) == 0) throw ResourceLimit("metric_gram_numeric: d^N exceeds the dense guard");

  const int n = profile.n_sites();
  MetricGram out;
  out.site_offsets.push_back(0);
  for (int i = 1; i <= n; ++i) {
    out.site_offsets.push_back(out.site_offsets.back() +
                               static_cast<Eigen::Index>(profile.weight(i)) * profile.bond(i));
  }
  const Eigen::Index n_coords = out.site_offsets.back();

  const ComplexVector psi = to_statevector(mps_from_unitaries(profile, reference));
  ComplexMatrix tangents(psi.size(), n_coords);

  std::vector<ComplexMatrix> moved = reference;
  auto state_at = [&](int site, const ComplexMatrix& x) {
    auto& slot = moved[static_cast<std::size_t>(site - 1)];
    slot = exp_param(Coordinates{x}, reference[static_cast<std::size_t>(site - 1)]);
    ComplexVector v = to_statevector(mps_from_unitaries(profile, moved));
    slot = reference[static_cast<std::size_t>(site - 1)];
    return v;
  };

  for (int i = 1; i <= n; ++i) {
    const int w = profile.weight(i);
    const int dd = profile.bond(i);
    for (int r = 0; r < w; ++r) {
      for (int c = 0; c < dd; ++c) {
        ComplexMatrix x = ComplexMatrix::Zero(w, dd);
        x(r, c) = step;
        const ComplexVector d_re = (state_at(i, x) - state_at(i, -x)) / (2.0 * step);
        x(r, c) = Complex(0.0, step);
        const ComplexVector d_im = (state_at(i, x) - state_at(i, -x)) / (2.0 * step);
        ComplexVector wirtinger = 0.5 * (d_re - Complex(0.0, 1.0) * d_im);
        wirtinger -= psi * psi.dot(wirtinger);  // dot() conjugates the left operand
        tangents.col(out.site_offsets[static_cast<std::size_t>(i - 1)] + r * dd + c) = wirtinger;
      }
    }
  }
  out.matrix = tangents.adjoint() * tangents;
  return out;
}

PartitionEstimate partition_estimate(const BondProfile& profile, std::size_t n_samples, const RngStream& rng,
                                     Execution exec) {
  if (n_samples < 100) throw InvalidArgument("partition_estimate: need at least 100 samples");
  const std::vector<double> logw = map_samples(exec, n_samples, rng, [&](std::size_t, RngStream& r) {
    const Mps mps = sample_rmps(profile, r);
    return fs_log_weight(right_environments(mps), profile).value;
  });
  const double m = *std::max_element(logw.begin(), logw.end());
  PartitionEstimate out;
  out.n_samples = n_samples;
  if (!std::isfinite(m)) {
    out.log_z_hat = -std::numeric_limits<double>::infinity();
    return out;
  }
  double mean = 0.0;
  for (double v : logw) mean += std::exp(v - m);
  mean /= static_cast<double>(n_samples);
  double var = 0.0;
  for (double v : logw) {
    const double e = std::exp(v - m) - mean;
    var += e * e;
  }
  var /= static_cast<double>(n_samples - 1);
  out.log_z_hat = m + std::log(mean);
  out.z_hat = std::exp(out.log_z_hat);
  out.std_error = std::exp(m) * std::sqrt(var / static_cast<double>(n_samples));
  return out;
}

IdentityReport identity_resolution_check(const BondProfile& profile, IdentityEnsemble ensemble,
                                         std::size_t n_samples, const RngStream& rng, Execution exec) {
  const bool reweight = ensemble == IdentityEnsemble::fs_reweighted;
  const DensityEstimate est = exec == Execution::parallel ? accumulate_density_omp(profile, reweight, n_samples, rng)
                                                          : accumulate_density_serial(profile, reweight, n_samples, rng);
  const auto dim = est.rho.rows();
  const ComplexMatrix target = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  IdentityReport rep;
  rep.n_samples = est.n_samples;
  rep.effective_samples = est.effective_sample_size();
  rep.frobenius_rel_dev = (est.rho - target).norm() / target.norm();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < dim; ++i) {
    lo = std::min(lo, est.rho(i, i).real());
    hi = std::max(hi, est.rho(i, i).real());
    for (Eigen::Index j = 0; j < dim; ++j)
      if (i != j) rep.max_offdiag = std::max(rep.max_offdiag, std::abs(est.rho(i, j)));
  }
  rep.diag_spread = hi - lo;
  return rep;
}

Observable statevector_observable(std::function<double(const ComplexVector&)> f) {
  return [f = std::move(f)](const Mps& mps, const RightEnvironments&) { return f(to_statevector(mps)); };
}

Observable cut_entropy_observable(int cut) {
  return [cut](const Mps&, const RightEnvironments& envs) { return spectral_entropy(envs.spectrum(cut)); };
}

ReweightedEstimate self_normalized_estimate(const std::vector<double>& values, const std::vector<double>& log_weights) {
  if (values.empty() || values.size() != log_weights.size()) {
    throw InvalidArgument("self_normalized_estimate: need matching, non-empty inputs");
  }
  ReweightedEstimate out;
  out.n_samples = values.size();
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(m)) {
    out.degenerate_weights = true;
    out.warning = "all importance weights vanish";
    out.mean = std::numeric_limits<double>::quiet_NaN();
    out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  // shift by the first value so a constant observable is reproduced exactly
  const double shift = values.front();
  double wsum = 0.0, w2sum = 0.0, acc = 0.0;
  std::vector<double> w(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    w[k] = std::exp(log_weights[k] - m);
    wsum += w[k];
    w2sum += w[k] * w[k];
    acc += w[k] * (values[k] - shift);
  }
  const double centered = acc / wsum;
  out.mean = shift + centered;
  double var = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double e = (values[k] - shift) - centered;
    var += w[k] * w[k] * e * e;
  }
  out.std_error = std::sqrt(var) / wsum;
  out.effective_samples = wsum * wsum / w2sum;
  if (out.effective_samples < 10.0) {
    out.degenerate_weights = true;
    out.warning = "effective sample size " + std::to_string(out.effective_samples) + " < 10: weights are degenerate";
  }
  return out;
}

ReweightedEstimate fs_expectation_reweighted(const Observable& observable, const BondProfile& profile,
                                             std::size_t n_samples, const RngStream& rng, Execution exec) {
  struct Pair {
    double value = 0.0;
    double log_weight = 0.0;
  };
  const std::vector<Pair> draws = map_samples(exec, n_samples, rng, [&](std::size_t, RngStream& r) {
    const Mps mps = sample_rmps(profile, r);
    const RightEnvironments envs = right_environments(mps);
    return Pair{observable(mps, envs), fs_log_weight(envs, profile).value};
  });
  std::vector<double> values, logw;
  values.reserve(n_samples);
  logw.reserve(n_samples);
  for (const auto& p : draws) {
    values.push_back(p.value);
    logw.push_back(p.log_weight);
  }
  return self_normalized_estimate(values, logw);
}

}  // namespace mpsm
