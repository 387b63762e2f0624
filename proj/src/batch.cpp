#include "mpsm/batch.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpsm/error.hpp"
#include "mpsm/measure.hpp"

namespace mpsm {

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::rmps: return "rmps";
    case Ensemble::central: return "central";
    case Ensemble::fs: return "fs";
  }
  return "?";
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "rmps") return Ensemble::rmps;
  if (name == "central") return Ensemble::central;
  if (name == "fs") return Ensemble::fs;
  throw InvalidArgument("unknown ensemble '" + name + "' (expected rmps, central or fs)");
}

SampleSummary summarize(const Mps& mps, const RightEnvironments& envs) {
  SampleSummary s;
  for (int cut = 1; cut < mps.n_sites(); ++cut) {
    RealVector ev = envs.spectrum(cut);
    s.entropies.push_back(spectral_entropy(ev));
    s.spectra.push_back(std::move(ev));
  }
  s.log_weight = fs_log_weight(envs, mps.profile()).value;
  return s;
}

SampleSummary summarize_dense(const ComplexVector& psi, const BondProfile& profile) {
  SampleSummary s;
  for (int cut = 1; cut < profile.n_sites(); ++cut) {
    RealVector sp = schmidt_spectrum_dense(psi, cut, profile);
    // keep the D_cut leading values so shapes match the environment spectra
    RealVector head = sp.head(std::min<Eigen::Index>(sp.size(), profile.bond(cut))).reverse();
    s.entropies.push_back(spectral_entropy(sp));
    s.spectra.push_back(std::move(head));
  }
  return s;
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace {

SampleSummary draw_summary(const BondProfile& profile, Ensemble ensemble, RngStream& rng) {
  switch (ensemble) {
    case Ensemble::rmps: {
      const Mps mps = sample_rmps(profile, rng);
      return summarize(mps, right_environments(mps));
    }
    case Ensemble::central:
      return summarize_dense(sample_central_gauge(profile, rng), profile);
    case Ensemble::fs:
      break;
  }
  throw InvalidArgument("independent draws are only available for the rmps and central ensembles");
}

struct DensityBlock {
  ComplexMatrix sum;
  double weight_sum = 0.0;
  double weight_sq_sum = 0.0;
  double log_scale = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
};

DensityBlock density_block(const BondProfile& profile, bool reweight, std::size_t begin, std::size_t end,
                           const RngStream& base) {
  const auto dim = static_cast<Eigen::Index>(profile.hilbert_dim());
  std::vector<ComplexVector> states;
  std::vector<double> logw;
  states.reserve(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    RngStream rng = base.split(k);
    const Mps mps = sample_rmps(profile, rng);
    states.push_back(to_statevector(mps));
    logw.push_back(reweight ? fs_log_weight(right_environments(mps), profile).value : 0.0);
  }
  DensityBlock b;
  b.sum = ComplexMatrix::Zero(dim, dim);
  b.count = end - begin;
  b.log_scale = *std::max_element(logw.begin(), logw.end());
  if (!std::isfinite(b.log_scale)) return b;  // every weight vanished
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double w = std::exp(logw[k] - b.log_scale);
    if (w == 0.0) continue;
    b.sum.noalias() += w * (states[k] * states[k].adjoint());
    b.weight_sum += w;
    b.weight_sq_sum += w * w;
  }
  return b;
}

// Ordered merge with Kahan compensation on the matrix and weight sums.
DensityEstimate merge_blocks(const std::vector<DensityBlock>& blocks, Eigen::Index dim) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix comp = ComplexMatrix::Zero(dim, dim);
  double wsum = 0.0, wcomp = 0.0, w2sum = 0.0;
  double scale = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (const auto& b : blocks) {
    count += b.count;
    if (!std::isfinite(b.log_scale) || b.weight_sum == 0.0) continue;
    double factor = 1.0;
    if (b.log_scale > scale) {
      const double shrink = std::isfinite(scale) ? std::exp(scale - b.log_scale) : 0.0;
      sum *= shrink;
      comp *= shrink;
      wsum *= shrink;
      wcomp *= shrink;
      w2sum *= shrink * shrink;
      scale = b.log_scale;
    } else {
      factor = std::exp(b.log_scale - scale);
    }
    const ComplexMatrix y = factor * b.sum - comp;
    const ComplexMatrix t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const double wy = factor * b.weight_sum - wcomp;
    const double wt = wsum + wy;
    wcomp = (wt - wsum) - wy;
    wsum = wt;
    w2sum += factor * factor * b.weight_sq_sum;
  }
  DensityEstimate out;
  out.n_samples = count;
  out.log_scale = scale;
  out.weight_sum = wsum;
  out.weight_sq_sum = w2sum;
  out.rho = wsum > 0.0 ? ComplexMatrix(sum / wsum) : ComplexMatrix::Zero(dim, dim);
  return out;
}

void check_density_guard(const BondProfile& profile) {
  const std::uint64_t dim = profile.hilbert_dim(1u << 10);
  if (dim == 0) throw ResourceLimit("identity accumulation needs d^N <= 2^10");
}

}  // namespace

double DensityEstimate::effective_sample_size() const {
  return weight_sq_sum > 0.0 ? weight_sum * weight_sum / weight_sq_sum : 0.0;
}

std::vector<SampleSummary> sample_summaries_serial(const BondProfile& profile, Ensemble ensemble, std::size_t n,
                                                   const RngStream& base) {
  return map_samples_serial(n, base, [&](std::size_t, RngStream& rng) { return draw_summary(profile, ensemble, rng); });
}

std::vector<SampleSummary> sample_summaries_omp(const BondProfile& profile, Ensemble ensemble, std::size_t n,
                                                const RngStream& base) {
  return map_samples_omp(n, base, [&](std::size_t, RngStream& rng) { return draw_summary(profile, ensemble, rng); });
}

std::vector<SampleSummary> sample_summaries(Execution exec, const BondProfile& profile, Ensemble ensemble,
                                            std::size_t n, const RngStream& base) {
  return exec == Execution::parallel ? sample_summaries_omp(profile, ensemble, n, base)
                                     : sample_summaries_serial(profile, ensemble, n, base);
}

DensityEstimate accumulate_density_serial(const BondProfile& profile, bool reweight, std::size_t n,
                                          const RngStream& base) {
  check_density_guard(profile);
  const std::size_t n_blocks = (n + kDensityBlock - 1) / kDensityBlock;
  std::vector<DensityBlock> blocks(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    blocks[b] = density_block(profile, reweight, b * kDensityBlock, std::min(n, (b + 1) * kDensityBlock), base);
  }
  return merge_blocks(blocks, static_cast<Eigen::Index>(profile.hilbert_dim()));
}

DensityEstimate accumulate_density_omp(const BondProfile& profile, bool reweight, std::size_t n,
                                       const RngStream& base) {
  check_density_guard(profile);
  const std::size_t n_blocks = (n + kDensityBlock - 1) / kDensityBlock;
  std::vector<DensityBlock> blocks(n_blocks);
  const auto count = static_cast<long long>(n_blocks);
  ExceptionSlot failure;
#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < count; ++b) {
    failure.run([&] {
      const auto ub = static_cast<std::size_t>(b);
      blocks[ub] = density_block(profile, reweight, ub * kDensityBlock, std::min(n, (ub + 1) * kDensityBlock), base);
    });
  }
  failure.rethrow();
  return merge_blocks(blocks, static_cast<Eigen::Index>(profile.hilbert_dim()));
}

}  // namespace mpsm
