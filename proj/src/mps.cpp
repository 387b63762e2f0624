#include "mpsm/mps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpsm/error.hpp"

namespace mpsm {

namespace {

// min(base^exponent, cap) without overflow
int capped_power(int base, int exponent, int cap) {
  long long v = 1;
  for (int k = 0; k < exponent && v < cap; ++k) v *= base;
  return static_cast<int>(std::min<long long>(v, cap));
}

// Dense contraction of stacked site tensors (not necessarily isometric).
ComplexVector contract_dense(const BondProfile& profile, const std::vector<ComplexMatrix>& sites) {
  const std::uint64_t dim = profile.hilbert_dim(kStatevectorLimit + 1);
  if (dim == 0 || dim > kStatevectorLimit) {
    throw ResourceLimit("dense contraction: d^N exceeds the 2^24 desk-scale guard");
  }
  const int d = profile.local_dim();
  ComplexMatrix state = ComplexMatrix::Ones(1, 1);
  for (int i = 1; i <= profile.n_sites(); ++i) {
    const ComplexMatrix& s = sites[static_cast<std::size_t>(i - 1)];
    const auto dl = static_cast<Eigen::Index>(profile.bond(i - 1));
    const auto dr = static_cast<Eigen::Index>(profile.bond(i));
    ComplexMatrix next(state.rows() * d, dr);
    for (int n = 0; n < d; ++n) {
      const ComplexMatrix t = state * s.middleRows(n * dl, dl);
      for (Eigen::Index r = 0; r < state.rows(); ++r) next.row(r * d + n) = t.row(r);
    }
    state = std::move(next);
  }
  return state.col(0);
}

}  // namespace

BondProfile::BondProfile(int n_sites, int local_dim, int max_bond)
    : n_sites_(n_sites), local_dim_(local_dim), max_bond_(max_bond) {
  if (n_sites < 1) throw InvalidArgument("bond_profile: N must be >= 1");
  if (local_dim < 2) throw InvalidArgument("bond_profile: d must be >= 2");
  if (max_bond < 1) throw InvalidArgument("bond_profile: D_max must be >= 1");
  dims_.resize(static_cast<std::size_t>(n_sites) + 1);
  for (int i = 0; i <= n_sites; ++i) {
    dims_[static_cast<std::size_t>(i)] =
        std::min(capped_power(local_dim, i, max_bond), capped_power(local_dim, n_sites - i, max_bond));
  }
  weights_.resize(static_cast<std::size_t>(n_sites));
  for (int i = 1; i <= n_sites; ++i) weights_[static_cast<std::size_t>(i - 1)] = local_dim * bond(i - 1) - bond(i);
}

std::vector<int> BondProfile::saturated_cuts() const {
  std::vector<int> out;
  for (int i = 1; i < n_sites_; ++i)
    if (bond(i) == max_bond_) out.push_back(i);
  return out;
}

bool BondProfile::is_saturated(int cut) const {
  return cut >= 1 && cut < n_sites_ && bond(cut) == max_bond_;
}

std::uint64_t BondProfile::hilbert_dim(std::uint64_t limit) const {
  std::uint64_t v = 1;
  for (int i = 0; i < n_sites_; ++i) {
    if (v > limit / static_cast<std::uint64_t>(local_dim_)) return 0;
    v *= static_cast<std::uint64_t>(local_dim_);
  }
  return v;
}

BondProfile bond_profile(int n_sites, int local_dim, int max_bond) {
  return BondProfile(n_sites, local_dim, max_bond);
}

Mps::Mps(BondProfile profile, std::vector<ComplexMatrix> sites)
    : profile_(std::move(profile)), sites_(std::move(sites)) {
  if (static_cast<int>(sites_.size()) != profile_.n_sites()) {
    throw InvalidArgument("Mps: expected one tensor per site");
  }
  for (int i = 1; i <= profile_.n_sites(); ++i) {
    const ComplexMatrix& s = site(i);
    if (s.rows() != profile_.unitary_dim(i) || s.cols() != profile_.bond(i)) {
      throw InvalidArgument("Mps: site " + std::to_string(i) + " has shape " + std::to_string(s.rows()) +
                            "x" + std::to_string(s.cols()));
    }
  }
}

ComplexMatrix Mps::block(int i, int n) const {
  const int dl = profile_.bond(i - 1);
  return site(i).middleRows(static_cast<Eigen::Index>(n) * dl, dl);
}

double Mps::left_canonical_residual() const {
  double worst = 0.0;
  for (const auto& s : sites_) worst = std::max(worst, isometry_residual(s));
  return worst;
}

RealVector RightEnvironments::spectrum(int cut) const { return hermitian_eigenvalues(gamma(cut)); }

std::vector<ComplexMatrix> sample_site_unitaries(const BondProfile& profile, RngStream& rng) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(profile.n_sites()));
  for (int i = 1; i <= profile.n_sites(); ++i) out.push_back(haar_unitary(profile.unitary_dim(i), rng));
  return out;
}

Mps mps_from_unitaries(const BondProfile& profile, const std::vector<ComplexMatrix>& unitaries) {
  if (static_cast<int>(unitaries.size()) != profile.n_sites()) {
    throw InvalidArgument("mps_from_unitaries: expected one unitary per site");
  }
  std::vector<ComplexMatrix> sites;
  sites.reserve(unitaries.size());
  for (int i = 1; i <= profile.n_sites(); ++i) {
    const ComplexMatrix& u = unitaries[static_cast<std::size_t>(i - 1)];
    if (u.rows() != profile.unitary_dim(i) || u.cols() != u.rows()) {
      throw InvalidArgument("mps_from_unitaries: unitary for site " + std::to_string(i) + " has wrong size");
    }
    sites.push_back(u.leftCols(profile.bond(i)));
  }
  return Mps(profile, std::move(sites));
}

Mps sample_rmps(const BondProfile& profile, RngStream& rng) {
  return mps_from_unitaries(profile, sample_site_unitaries(profile, rng));
}

ComplexMatrix transfer_right(const ComplexMatrix& site, const ComplexMatrix& gamma, int local_dim) {
  const Eigen::Index dl = site.rows() / local_dim;
  const ComplexMatrix t = site * gamma;
  ComplexMatrix out = ComplexMatrix::Zero(dl, dl);
  for (int n = 0; n < local_dim; ++n) {
    out.noalias() += t.middleRows(n * dl, dl) * site.middleRows(n * dl, dl).adjoint();
  }
  return 0.5 * (out + out.adjoint());
}

RightEnvironments right_environments(const Mps& mps) {
  const int n = mps.n_sites();
  const int d = mps.profile().local_dim();
  std::vector<ComplexMatrix> gammas(static_cast<std::size_t>(n) + 1);
  gammas[static_cast<std::size_t>(n)] = ComplexMatrix::Ones(1, 1);
  for (int i = n; i >= 1; --i) {
    gammas[static_cast<std::size_t>(i - 1)] = transfer_right(mps.site(i), gammas[static_cast<std::size_t>(i)], d);
  }
  return RightEnvironments(std::move(gammas));
}

ComplexVector to_statevector(const Mps& mps) {
  std::vector<ComplexMatrix> sites;
  for (int i = 1; i <= mps.n_sites(); ++i) sites.push_back(mps.site(i));
  return contract_dense(mps.profile(), sites);
}

double spectral_entropy(const RealVector& p, double base) {
  double s = 0.0;
  for (double v : p)
    if (v > 0.0) s -= v * std::log(v);
  return s / std::log(base);
}

std::vector<double> entanglement_profile(const RightEnvironments& envs, double base) {
  std::vector<double> out;
  for (int i = 1; i < envs.n_sites(); ++i) out.push_back(spectral_entropy(envs.spectrum(i), base));
  return out;
}

RealVector schmidt_spectrum_dense(const ComplexVector& psi, int cut, const BondProfile& profile) {
  if (cut < 1 || cut >= profile.n_sites()) {
    throw InvalidArgument("schmidt_spectrum_dense: cut must lie in [1, N-1]");
  }
  const std::uint64_t total = profile.hilbert_dim(kStatevectorLimit);
  if (total == 0 || static_cast<std::uint64_t>(psi.size()) != total) {
    throw InvalidArgument("schmidt_spectrum_dense: statevector length does not match d^N");
  }
  const BondProfile left(cut, profile.local_dim(), 1);
  const auto rows = static_cast<Eigen::Index>(left.hilbert_dim());
  const Eigen::Index cols = psi.size() / rows;
  // psi index = left * cols + right: a row-major reshape, i.e. the transpose
  // of Eigen's column-major view.
  const Eigen::Map<const ComplexMatrix> m(psi.data(), cols, rows);
  // Eigen's divide-and-conquer SVD returns NaN on degenerate spectra (flat
  // central cuts), so diagonalize the smaller reduced density matrix instead.
  const ComplexMatrix rho = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint()) : ComplexMatrix(m.adjoint() * m);
  RealVector s = hermitian_eigenvalues(0.5 * (rho + rho.adjoint())).cwiseMax(0.0);
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

std::vector<double> dense_entanglement_profile(const ComplexVector& psi, const BondProfile& profile, double base) {
  std::vector<double> out;
  for (int cut = 1; cut < profile.n_sites(); ++cut) {
    out.push_back(spectral_entropy(schmidt_spectrum_dense(psi, cut, profile), base));
  }
  return out;
}

ComplexVector sample_central_gauge(const BondProfile& profile, RngStream& rng) {
  const int n = profile.n_sites();
  const int d = profile.local_dim();
  const int center = (n + 1) / 2;
  std::vector<ComplexMatrix> sites;
  sites.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int dl = profile.bond(i - 1);
    const int dr = profile.bond(i);
    if (i <= center) {
      sites.push_back(haar_unitary(d * dl, rng).leftCols(dr));
      continue;
    }
    // right isometry: B_n(a, b) = conj(V(n*dr + b, a)) so that sum_n B_n B_n^dagger = I
    const ComplexMatrix v = haar_unitary(d * dr, rng).leftCols(dl);
    ComplexMatrix stacked(d * dl, dr);
    for (int k = 0; k < d; ++k) stacked.middleRows(k * dl, dl) = v.middleRows(k * dr, dr).adjoint();
    sites.push_back(std::move(stacked));
  }
  ComplexVector psi = contract_dense(profile, sites);
  psi /= psi.norm();
  return psi;
}

}  // namespace mpsm
