#pragma once

#include <Eigen/Dense>

#include <complex>

#include "mpsm/rng.hpp"

namespace mpsm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

struct PolarFactors {
  ComplexMatrix isometry;  // m x n, U_C
  ComplexMatrix gram;      // n x n, W = C^dagger C
};

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// columns of Q rephased by R_jj / |R_jj|.
ComplexMatrix haar_unitary(int n, RngStream& rng);

/// Hermitian matrix with independent Gaussian entries (unit variance on the
/// diagonal, E|h_ij|^2 = 1 off the diagonal).
ComplexMatrix gue_matrix(int n, RngStream& rng);

Eigensystem hermitian_eigensystem(const ComplexMatrix& h);
RealVector hermitian_eigenvalues(const ComplexMatrix& h);

/// Sum of log-eigenvalues of a PSD matrix; -inf once any eigenvalue drops
/// below kSingularityFloor.
double log_det_psd(const ComplexMatrix& g);

inline constexpr double kSingularityFloor = 1e-300;

/// C = U_C sqrt(W) for m >= n; throws DegeneratePolar when C is rank deficient.
PolarFactors polar_decompose(const ComplexMatrix& c);

/// exp(K) for anti-Hermitian K via the eigendecomposition of iK.
ComplexMatrix anti_hermitian_exp(const ComplexMatrix& k);

double max_abs(const ComplexMatrix& m);
double hermiticity_residual(const ComplexMatrix& m);
/// max |U^dagger U - I|
double isometry_residual(const ComplexMatrix& u);

/// Scale-aware tolerance: tol * max(1, max|m|).
double scaled_tolerance(const ComplexMatrix& m, double tol);

}  // namespace mpsm
