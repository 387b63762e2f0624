#pragma once

#include "mpsm/linalg.hpp"

namespace mpsm {

/// Gauge-fixed coordinates of one site: a w x D complex matrix x. For a
/// uniform site w = (d-1)D; boundary sites use w_i x D_i.
struct Coordinates {
  ComplexMatrix x;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
  /// Eigenvalues of sqrt(x^dagger x), i.e. the singular values of x padded
  /// with zeros to length D, ascending.
  RealVector xhat_spectrum() const;
};

/// [[0_D, -x^dagger], [x, 0_w]]
ComplexMatrix coordinate_generator(const ComplexMatrix& x);

/// U0 * exp(generator(x)); U0 must be (w + D) x (w + D).
ComplexMatrix exp_param(const Coordinates& coords, const ComplexMatrix& reference);
ComplexMatrix exp_param(const Coordinates& coords);

/// Inverse of exp_param with U0 = I on the principal branch. `d * block`
/// must equal the size of U; only its first `block` columns are used.
Coordinates extract_coordinates(const ComplexMatrix& u, int local_dim, int block);

/// Jacobian from Lebesgue measure on x to the Haar measure (up to a constant):
///   prod_k (sin^2 s_k / s_k^2)^(D(d-2)) * prod_k sin(2 s_k)/(2 s_k)
///     * prod_{k<l} ((sin^2 s_k - sin^2 s_l)/(s_k^2 - s_l^2))^2
/// over the eigenvalues s_k of x-hat.
double jacobian(const Coordinates& coords, int local_dim, int block);
/// Same formula evaluated directly on a spectrum.
double jacobian_from_spectrum(const RealVector& s, int local_dim, int block);

/// exp(-(Dd/3) Tr x-hat^2), with Dd = rows + cols of x.
double jacobian_first_order(const Coordinates& coords);

}  // namespace mpsm
