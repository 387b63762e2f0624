#pragma once

#include <cstdint>
#include <vector>

#include "mpsm/linalg.hpp"
#include "mpsm/rng.hpp"

namespace mpsm {

/// Open-chain geometry. Bonds are numbered 0..N (bond i sits between sites i
/// and i+1), sites 1..N.
class BondProfile {
public:
  BondProfile(int n_sites, int local_dim, int max_bond);

  int n_sites() const { return n_sites_; }
  int local_dim() const { return local_dim_; }
  int max_bond() const { return max_bond_; }

  /// D_i = min(d^i, d^(N-i), D_max), i in [0, N].
  int bond(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  /// w_i = d*D_(i-1) - D_i, the number of rows of the site-i coordinate matrix (i in [1, N]).
  int weight(int site) const { return weights_.at(static_cast<std::size_t>(site - 1)); }
  /// Size of the site-i unitary, d*D_(i-1).
  int unitary_dim(int site) const { return local_dim_ * bond(site - 1); }

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<int>& weights() const { return weights_; }

  /// Cuts 1..N-1 with D_i = D_max.
  std::vector<int> saturated_cuts() const;
  bool is_saturated(int cut) const;
  int mid_cut() const { return n_sites_ / 2; }

  /// d^N if it fits below `limit`, else 0.
  std::uint64_t hilbert_dim(std::uint64_t limit = std::uint64_t{1} << 40) const;

  bool operator==(const BondProfile&) const = default;

private:
  int n_sites_;
  int local_dim_;
  int max_bond_;
  std::vector<int> dims_;
  std::vector<int> weights_;
};

BondProfile bond_profile(int n_sites, int local_dim, int max_bond);

/// Left-canonical MPS. Site i is stored as the stacked (d*D_(i-1)) x D_i
/// isometry whose row n*D_(i-1) + a holds A^[i]_n(a, :).
class Mps {
public:
  Mps(BondProfile profile, std::vector<ComplexMatrix> sites);

  const BondProfile& profile() const { return profile_; }
  int n_sites() const { return profile_.n_sites(); }
  /// Stacked isometry of site i in [1, N].
  const ComplexMatrix& site(int i) const { return sites_.at(static_cast<std::size_t>(i - 1)); }
  ComplexMatrix& site(int i) { return sites_.at(static_cast<std::size_t>(i - 1)); }
  /// D_(i-1) x D_i block A^[i]_n.
  ComplexMatrix block(int i, int n) const;

  /// max over sites of |sum_n A_n^dagger A_n - I|.
  double left_canonical_residual() const;

private:
  BondProfile profile_;
  std::vector<ComplexMatrix> sites_;
};

/// Gamma_0..Gamma_N with Gamma_N = [1]; the physically meaningful cuts are 1..N-1.
class RightEnvironments {
public:
  explicit RightEnvironments(std::vector<ComplexMatrix> gammas) : gammas_(std::move(gammas)) {}

  int n_sites() const { return static_cast<int>(gammas_.size()) - 1; }
  const ComplexMatrix& gamma(int i) const { return gammas_.at(static_cast<std::size_t>(i)); }
  ComplexMatrix& gamma(int i) { return gammas_.at(static_cast<std::size_t>(i)); }

  /// Eigenvalues of Gamma_cut, ascending.
  RealVector spectrum(int cut) const;

private:
  std::vector<ComplexMatrix> gammas_;
};

/// One independent Haar unitary of size d*D_(i-1) per site, drawn in site order.
std::vector<ComplexMatrix> sample_site_unitaries(const BondProfile& profile, RngStream& rng);

/// Keeps the first D_i columns of each site unitary.
Mps mps_from_unitaries(const BondProfile& profile, const std::vector<ComplexMatrix>& unitaries);

Mps sample_rmps(const BondProfile& profile, RngStream& rng);

/// sum_n A_n Gamma A_n^dagger for a stacked site isometry.
ComplexMatrix transfer_right(const ComplexMatrix& site, const ComplexMatrix& gamma, int local_dim);

RightEnvironments right_environments(const Mps& mps);

inline constexpr std::uint64_t kStatevectorLimit = std::uint64_t{1} << 24;

/// Dense amplitudes, index = sum_i n_i d^(N-i) (site 1 most significant).
ComplexVector to_statevector(const Mps& mps);

/// -sum p log_base p over the strictly positive entries.
double spectral_entropy(const RealVector& probabilities, double base = 2.0);

std::vector<double> entanglement_profile(const RightEnvironments& envs, double base = 2.0);

/// Squared singular values of the d^cut x d^(N-cut) reshaping, descending.
RealVector schmidt_spectrum_dense(const ComplexVector& psi, int cut, const BondProfile& profile);

/// Entropies at every cut of a dense state.
std::vector<double> dense_entanglement_profile(const ComplexVector& psi, const BondProfile& profile,
                                               double base = 2.0);

/// Haar left-isometries on sites 1..ceil(N/2), Haar right-isometries on the
/// rest, contracted densely and normalized.
ComplexVector sample_central_gauge(const BondProfile& profile, RngStream& rng);

}  // namespace mpsm
