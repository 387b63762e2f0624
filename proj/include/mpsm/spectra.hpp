#pragma once

#include <functional>
#include <vector>

#include "mpsm/batch.hpp"
#include "mpsm/mps.hpp"

namespace mpsm {

/// Marchenko-Pastur law with unit mean and aspect ratio c in (0, 1].
class MpLaw {
public:
  explicit MpLaw(double c);

  double c() const { return c_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double density(double lambda) const;
  /// Tanh-sinh quadrature of the density from the lower edge.
  double cdf(double lambda) const;

private:
  double c_;
  double lower_;
  double upper_;
};

double mp_density(double lambda, double c);
double mp_cdf(double lambda, double c);

inline constexpr int kMaxSeriesOrder = 16;

/// m_1..m_K of MP(c) (Narayana polynomials).
std::vector<double> mp_moments(double c, int order);

/// Integrates lambda^k against the density; reference for mp_moments.
double mp_moment_quadrature(double c, int k);

/// Eigenvalues of Gamma_cut scaled by D_cut, pooled over samples. Only
/// saturated cuts are accepted.
std::vector<double> scaled_cut_eigenvalues(const std::vector<RightEnvironments>& envs, const BondProfile& profile,
                                           int cut);
std::vector<double> scaled_cut_eigenvalues(const std::vector<SampleSummary>& samples, const BondProfile& profile,
                                           int cut);

/// sup |F_n - F| over the empirical distribution of `samples`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Cut whose spectrum is compared to the MP law: the leftmost saturated cut
/// for RMPS (furthest from the right boundary, where Gamma_N = 1 seeds the
/// recursion), the middle cut otherwise.
int equilibrium_cut(const BondProfile& profile, Ensemble ensemble);

/// Coefficients M_1..M_K of M(z) = sum_n M_n z^n.
struct MomentSeries {
  std::vector<double> coefficients;

  int order() const { return static_cast<int>(coefficients.size()); }
};

/// Coefficients s_0..s_(K-1) of S(z) = sum_k s_k z^k.
struct STransform {
  std::vector<double> coefficients;

  int order() const { return static_cast<int>(coefficients.size()); }
};

/// S(z) = (1+z)/z M^<-1>(z) on truncated series.
STransform moments_to_stransform(const MomentSeries& m);
MomentSeries stransform_to_moments(const STransform& s);

/// S'(z) = (1 + z/d^2) / (1 + z/d) * S(z/d).
STransform transfer_stransform(const STransform& s, int local_dim);

/// 1 / (1 + c z) to K coefficients.
STransform mp_stransform(double c, int order);

double max_coefficient_deviation(const STransform& a, const STransform& b);

/// 1 / (2d - 1).
double fs_aspect_ratio(int local_dim);

}  // namespace mpsm
