#include "mpsm/spectra.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mpsm/error.hpp"

namespace mpsm {

namespace {

double integrate(double c, double a, double b, int power) {
  if (b <= a) return 0.0;
  const MpLaw law(c);
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double x) { return std::pow(x, power) * law.density(x); }, a, b, 1e-14);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_order(int order) {
  if (order < 1 || order > kMaxSeriesOrder) {
    throw InvalidArgument("series order must be in [1, " + std::to_string(kMaxSeriesOrder) + "]");
  }
}

// Series arithmetic runs in extended precision; the compositional inverse
// loses a few digits to cancellation at K ~ 16.
using Series = std::vector<long double>;

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, std::size_t len) {
  std::vector<T> out(len, T(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Compositional inverse of a(z) = a_1 z + a_2 z^2 + ..., coefficients
// indexed by power with a[0] = 0, same truncation.
Series inverse_series(const Series& a) {
  const std::size_t len = a.size();
  Series b(len, 0.0L);
  b[1] = 1.0L / a[1];
  for (std::size_t n = 2; n < len; ++n) {
    // [z^n] sum_{j>=2} a_j b^j only involves b_1..b_(n-1)
    Series power = b;
    long double acc = 0.0L;
    for (std::size_t j = 2; j <= n; ++j) {
      power = mul(power, b, len);
      acc += a[j] * power[n];
    }
    b[n] = -acc / a[1];
  }
  return b;
}

}  // namespace

MpLaw::MpLaw(double c) : c_(c) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("MP aspect ratio must be in (0, 1]");
  const double r = std::sqrt(c);
  lower_ = (1.0 - r) * (1.0 - r);
  upper_ = (1.0 + r) * (1.0 + r);
}

double MpLaw::density(double lambda) const {
  if (lambda <= lower_ || lambda >= upper_ || lambda <= 0.0) return 0.0;
  return std::sqrt((upper_ - lambda) * (lambda - lower_)) / (2.0 * std::numbers::pi * c_ * lambda);
}

double MpLaw::cdf(double lambda) const {
  if (lambda <= lower_) return 0.0;
  return integrate(c_, lower_, std::min(lambda, upper_), 0);
}

double mp_density(double lambda, double c) { return MpLaw(c).density(lambda); }

double mp_cdf(double lambda, double c) { return MpLaw(c).cdf(lambda); }

std::vector<double> mp_moments(double c, int order) {
  check_order(order);
  if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("MP aspect ratio must be in [0, 1]");
  std::vector<double> m(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += std::pow(c, j) / (j + 1) * binomial(k, j) * binomial(k - 1, j);
    m[static_cast<std::size_t>(k - 1)] = sum;
  }
  return m;
}

double mp_moment_quadrature(double c, int k) {
  const MpLaw law(c);
  return integrate(c, law.lower(), law.upper(), k);
}

std::vector<double> scaled_cut_eigenvalues(const std::vector<RightEnvironments>& envs, const BondProfile& profile,
                                           int cut) {
  if (!profile.is_saturated(cut)) {
    throw InvalidArgument("cut " + std::to_string(cut) + " is not saturated (D_cut < D_max)");
  }
  const double scale = profile.bond(cut);
  std::vector<double> out;
  for (const auto& e : envs) {
    const RealVector ev = e.spectrum(cut);
    for (double v : ev) out.push_back(scale * v);
  }
  return out;
}

std::vector<double> scaled_cut_eigenvalues(const std::vector<SampleSummary>& samples, const BondProfile& profile,
                                           int cut) {
  if (!profile.is_saturated(cut)) {
    throw InvalidArgument("cut " + std::to_string(cut) + " is not saturated (D_cut < D_max)");
  }
  const double scale = profile.bond(cut);
  std::vector<double> out;
  for (const auto& s : samples) {
    for (double v : s.spectra.at(static_cast<std::size_t>(cut - 1))) out.push_back(scale * v);
  }
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_distance needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return std::clamp(d, 0.0, 1.0);
}

int equilibrium_cut(const BondProfile& profile, Ensemble ensemble) {
  if (ensemble == Ensemble::rmps) {
    const auto cuts = profile.saturated_cuts();
    if (!cuts.empty()) return cuts.front();
  }
  return profile.mid_cut();
}

STransform moments_to_stransform(const MomentSeries& m) {
  check_order(m.order());
  const double m1 = m.coefficients[0];
  if (m1 == 0.0 || !std::isfinite(m1)) throw NonInvertibleSeries("M_1 = 0: moment series is not invertible");
  Series a{0.0L};
  a.insert(a.end(), m.coefficients.begin(), m.coefficients.end());
  const Series chi = inverse_series(a);
  STransform s;
  s.coefficients.resize(m.coefficients.size());
  for (std::size_t j = 0; j < s.coefficients.size(); ++j) s.coefficients[j] = static_cast<double>(chi[j + 1] + chi[j]);
  return s;
}

MomentSeries stransform_to_moments(const STransform& s) {
  check_order(s.order());
  if (s.coefficients[0] == 0.0 || !std::isfinite(s.coefficients[0])) {
    throw NonInvertibleSeries("S(0) = 0: series is not invertible");
  }
  // chi = z S(z) / (1+z)
  Series chi(s.coefficients.size() + 1, 0.0L);
  for (std::size_t j = 0; j < s.coefficients.size(); ++j) chi[j + 1] = s.coefficients[j] - chi[j];
  const Series m = inverse_series(chi);
  return {std::vector<double>(m.begin() + 1, m.end())};
}

STransform transfer_stransform(const STransform& s, int local_dim) {
  if (local_dim < 1) throw InvalidArgument("local dimension must be positive");
  const auto len = s.coefficients.size();
  const double d = local_dim;
  std::vector<double> prefactor(len, 0.0), scaled(len);
  double p = 1.0;
  for (std::size_t n = 0; n < len; ++n, p *= -1.0 / d) prefactor[n] = p;
  prefactor = mul({1.0, 1.0 / (d * d)}, prefactor, len);
  double q = 1.0;
  for (std::size_t n = 0; n < len; ++n, q /= d) scaled[n] = s.coefficients[n] * q;
  return {mul(prefactor, scaled, len)};
}

STransform mp_stransform(double c, int order) {
  check_order(order);
  STransform s;
  double p = 1.0;
  for (int n = 0; n < order; ++n, p *= -c) s.coefficients.push_back(p);
  return s;
}

double max_coefficient_deviation(const STransform& a, const STransform& b) {
  if (a.order() != b.order()) throw InvalidArgument("series orders differ");
  double dev = 0.0;
  for (std::size_t n = 0; n < a.coefficients.size(); ++n) {
    dev = std::max(dev, std::abs(a.coefficients[n] - b.coefficients[n]));
  }
  return dev;
}

double fs_aspect_ratio(int local_dim) {
  if (local_dim < 2) throw InvalidArgument("fs_aspect_ratio needs d >= 2");
  return 1.0 / (2.0 * local_dim - 1.0);
}

}  // namespace mpsm
