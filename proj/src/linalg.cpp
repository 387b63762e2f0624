#include "mpsm/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mpsm/error.hpp"

namespace mpsm {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_hermitian(const ComplexMatrix& h, const char* what) {
  require_square(h, what);
  const double r = hermiticity_residual(h);
  if (!(r < scaled_tolerance(h, 1e-10))) {
    throw ContractViolation(std::string(what) + ": input is not Hermitian (residual " +
                            std::to_string(r) + ")");
  }
}

}  // namespace

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

double isometry_residual(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols()));
}

double scaled_tolerance(const ComplexMatrix& m, double tol) { return tol * std::max(1.0, max_abs(m)); }

ComplexMatrix haar_unitary(int n, RngStream& rng) {
  if (n < 1) throw InvalidArgument("haar_unitary: dimension must be >= 1, got " + std::to_string(n));
  ComplexMatrix z(n, n);
  // column-major fill keeps the draw order fixed
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();

  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

ComplexMatrix gue_matrix(int n, RngStream& rng) {
  ComplexMatrix h(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = rng.normal();
    for (int i = j + 1; i < n; ++i) {
      h(i, j) = rng.complex_normal();
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& h) {
  require_hermitian(h, "hermitian_eigensystem");
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::ComputeEigenvectors);
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
  require_hermitian(h, "hermitian_eigenvalues");
  if (h.rows() == 1) return RealVector::Constant(1, h(0, 0).real());
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double log_det_psd(const ComplexMatrix& g) {
  const RealVector ev = hermitian_eigenvalues(g);
  const double trace = std::abs(g.trace().real());
  if (ev.minCoeff() < -1e-10 * std::max(trace, 1e-300)) {
    throw ContractViolation("log_det_psd: matrix is indefinite (min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
  }
  double acc = 0.0;
  for (double lambda : ev) {
    if (lambda <= kSingularityFloor) return -std::numeric_limits<double>::infinity();
    acc += std::log(lambda);
  }
  return acc;
}

PolarFactors polar_decompose(const ComplexMatrix& c) {
  if (c.rows() < c.cols() || c.cols() == 0) {
    throw InvalidArgument("polar_decompose: need m >= n >= 1");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0 || s(s.size() - 1) <= 1e-13 * smax) {
    throw DegeneratePolar("polar_decompose: matrix is rank deficient");
  }
  PolarFactors out;
  out.isometry = svd.matrixU() * svd.matrixV().adjoint();
  out.gram = svd.matrixV() * s.array().square().matrix().asDiagonal() * svd.matrixV().adjoint();
  out.gram = 0.5 * (out.gram + out.gram.adjoint()).eval();
  return out;
}

ComplexMatrix anti_hermitian_exp(const ComplexMatrix& k) {
  require_square(k, "anti_hermitian_exp");
  const double r = max_abs(k + k.adjoint());
  if (!(r < scaled_tolerance(k, 1e-10))) {
    throw ContractViolation("anti_hermitian_exp: input is not anti-Hermitian");
  }
  const auto n = k.rows();
  if (max_abs(k) == 0.0) return ComplexMatrix::Identity(n, n);
  // iK is Hermitian: iK = V diag(l) V^dagger  =>  exp(K) = V diag(exp(-i l)) V^dagger
  const ComplexMatrix ik = Complex(0.0, 1.0) * k;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (ik + ik.adjoint()), Eigen::ComputeEigenvectors);
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace mpsm
