#include "mpsm/param.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mpsm/error.hpp"

namespace mpsm {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kMergeGap = 1e-6;

double sinc(double s) { return std::abs(s) < 1e-8 ? 1.0 - s * s / 6.0 : std::sin(s) / s; }

// arcsin(sqrt(t)) / sqrt(t), continuous at t = 0
double arcsin_sqrt_ratio(double t) {
  if (t < 1e-12) return 1.0 + t / 6.0;
  const double r = std::sqrt(t);
  return std::asin(r) / r;
}

void check_shape(const ComplexMatrix& x, int local_dim, int block) {
  if (block < 1 || local_dim < 2 || x.cols() != block || x.rows() != static_cast<Eigen::Index>(local_dim - 1) * block) {
    throw InvalidArgument("coordinates must be (d-1)D x D; got " + std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()) + " for d=" + std::to_string(local_dim) +
                          ", D=" + std::to_string(block));
  }
}

}  // namespace

RealVector Coordinates::xhat_spectrum() const {
  RealVector out = RealVector::Zero(x.cols());
  if (x.size() == 0) return out;
  Eigen::JacobiSVD<ComplexMatrix> svd(x);
  const RealVector& s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) out(k) = s(k);
  std::sort(out.data(), out.data() + out.size());
  return out;
}

ComplexMatrix coordinate_generator(const ComplexMatrix& x) {
  const Eigen::Index w = x.rows();
  const Eigen::Index dd = x.cols();
  ComplexMatrix k = ComplexMatrix::Zero(w + dd, w + dd);
  k.block(dd, 0, w, dd) = x;
  k.block(0, dd, dd, w) = -x.adjoint();
  return k;
}

ComplexMatrix exp_param(const Coordinates& coords, const ComplexMatrix& reference) {
  const Eigen::Index n = coords.rows() + coords.cols();
  if (reference.rows() != n || reference.cols() != n) {
    throw InvalidArgument("exp_param: reference unitary must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  return reference * anti_hermitian_exp(coordinate_generator(coords.x));
}

ComplexMatrix exp_param(const Coordinates& coords) {
  const Eigen::Index n = coords.rows() + coords.cols();
  return exp_param(coords, ComplexMatrix::Identity(n, n));
}

Coordinates extract_coordinates(const ComplexMatrix& u, int local_dim, int block) {
  if (block < 1 || u.rows() != u.cols() || u.rows() != static_cast<Eigen::Index>(local_dim) * block) {
    throw InvalidArgument("extract_coordinates: unitary size must equal d*D");
  }
  const ComplexMatrix a = u.topLeftCorner(block, block);
  const ComplexMatrix c = u.block(block, 0, u.rows() - block, block);

  const ComplexMatrix w = c.adjoint() * c;
  const Eigensystem ws = hermitian_eigensystem(0.5 * (w + w.adjoint()));
  if (ws.values.maxCoeff() >= 1.0 - 1e-12) {
    throw OutOfBranch("extract_coordinates: W has an eigenvalue at 1 (x-hat reaches pi/2)");
  }

  PolarFactors pa;
  try {
    pa = polar_decompose(a);
  } catch (const DegeneratePolar&) {
    throw DegeneratePolar("extract_coordinates: A block is singular, gauge is undetermined");
  }

  // x = U_C arcsin(sqrt W) U_A^dagger = C g(W) U_A^dagger with g(t) = arcsin(sqrt t)/sqrt t,
  // which stays well defined when C is rank deficient.
  RealVector g(ws.values.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = arcsin_sqrt_ratio(std::max(0.0, ws.values(k)));
  const ComplexMatrix gw = ws.vectors * g.asDiagonal() * ws.vectors.adjoint();
  return Coordinates{c * gw * pa.isometry.adjoint()};
}

double jacobian_from_spectrum(const RealVector& s, int local_dim, int block) {
  for (double v : s) {
    if (!(v >= 0.0) || v >= kHalfPi) {
      throw OutOfBranch("jacobian: x-hat eigenvalue outside [0, pi/2)");
    }
  }
  const double power = static_cast<double>(block) * (local_dim - 2);
  double log_j = 0.0;
  for (double sk : s) {
    const double sc = sinc(sk);
    if (power != 0.0) log_j += power * std::log(sc * sc);
    log_j += std::log(sinc(2.0 * sk));
  }
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    for (Eigen::Index l = k + 1; l < s.size(); ++l) {
      const double a = s(k);
      const double b = s(l);
      double ratio;
      if (std::abs(a - b) < kMergeGap) {
        ratio = sinc(a + b);  // d(sin^2 s)/d(s^2) at the midpoint
      } else {
        // sin^2 a - sin^2 b = sin(a+b) sin(a-b); a^2 - b^2 = (a+b)(a-b)
        ratio = sinc(a + b) * sinc(a - b);
      }
      log_j += 2.0 * std::log(std::abs(ratio));
    }
  }
  return std::exp(log_j);
}

double jacobian(const Coordinates& coords, int local_dim, int block) {
  check_shape(coords.x, local_dim, block);
  return jacobian_from_spectrum(coords.xhat_spectrum(), local_dim, block);
}

double jacobian_first_order(const Coordinates& coords) {
  const double dd = static_cast<double>(coords.rows() + coords.cols());
  return std::exp(-(dd / 3.0) * coords.x.squaredNorm());
}

}  // namespace mpsm
