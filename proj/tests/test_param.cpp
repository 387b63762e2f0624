#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "mpsm/error.hpp"
#include "mpsm/param.hpp"

using namespace mpsm;

namespace {

ComplexMatrix random_x(int rows, int cols, double radius, RngStream& rng) {
  ComplexMatrix x(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) x(i, j) = rng.complex_normal();
  return x * (radius / Eigen::JacobiSVD<ComplexMatrix>(x).singularValues()(0));
}

// Expectation of f(a, b) under a symmetric density on [0, pi/2)^2, midpoint rule.
double grid_mean(const std::function<double(double, double)>& density, const std::function<double(double, double)>& f) {
  const int n = 600;
  const double h = std::numbers::pi / 2.0 / n;
  double z = 0, s = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = (i + 0.5) * h, b = (j + 0.5) * h;
      const double p = density(a, b);
      z += p;
      s += p * f(a, b);
    }
  }
  return s / z;
}

}  // namespace

TEST_CASE("exp_param is unitary and its inverse recovers x") {
  RngStream rng(1, 0);
  for (auto [d, dd] : {std::pair{2, 1}, {2, 2}, {3, 2}, {2, 4}, {4, 3}}) {
    for (int k = 0; k < 20; ++k) {
      const ComplexMatrix x = random_x((d - 1) * dd, dd, rng.uniform() * 1.4, rng);
      const ComplexMatrix u = exp_param(Coordinates{x});
      CHECK(isometry_residual(u) < 1e-12);
      CHECK(max_abs(extract_coordinates(u, d, dd).x - x) < 1e-9);
    }
  }
}

TEST_CASE("rank-deficient coordinates roundtrip") {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 0) = 0.7;
  const Coordinates back = extract_coordinates(exp_param(Coordinates{x}), 2, 2);
  CHECK(max_abs(back.x - x) < 1e-12);
  CHECK(max_abs(extract_coordinates(ComplexMatrix::Identity(4, 4), 2, 2).x) == 0.0);
}

TEST_CASE("exp_param with a reference point") {
  RngStream rng(2, 0);
  const ComplexMatrix u0 = haar_unitary(6, rng);
  const ComplexMatrix x = random_x(4, 2, 0.5, rng);
  const ComplexMatrix u = exp_param(Coordinates{x}, u0);
  CHECK(max_abs(u0.adjoint() * u - exp_param(Coordinates{x})) < 1e-12);
  CHECK_THROWS_AS(exp_param(Coordinates{x}, haar_unitary(5, rng)), InvalidArgument);
}

TEST_CASE("branch and shape errors") {
  // x-hat = pi/2 sends the A block to zero
  ComplexMatrix x = ComplexMatrix::Zero(1, 1);
  x(0, 0) = std::numbers::pi / 2.0;
  CHECK_THROWS_AS(extract_coordinates(exp_param(Coordinates{x}), 2, 1), OutOfBranch);
  CHECK_THROWS_AS(extract_coordinates(ComplexMatrix::Identity(5, 5), 2, 2), InvalidArgument);
  CHECK_THROWS_AS(jacobian(Coordinates{ComplexMatrix::Zero(3, 2)}, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(jacobian_from_spectrum(RealVector::Constant(1, 2.0), 2, 1), OutOfBranch);
}

TEST_CASE("jacobian values") {
  CHECK(jacobian(Coordinates{ComplexMatrix::Zero(2, 2)}, 2, 2) == 1.0);
  // d = 2, D = 1: sin(2s) / 2s
  const double s = 0.8;
  CHECK(jacobian_from_spectrum(RealVector::Constant(1, s), 2, 1) == doctest::Approx(std::sin(2 * s) / (2 * s)));
  // equal eigenvalues use the confluent limit
  RealVector pair(2);
  pair << 0.5, 0.5 + 1e-9;
  RealVector split(2);
  split << 0.5, 0.5 + 1e-4;
  CHECK(jacobian_from_spectrum(pair, 2, 2) ==
        doctest::Approx(jacobian_from_spectrum(split, 2, 2)).epsilon(1e-4));
}

TEST_CASE("first-order expansion") {
  RngStream rng(3, 0);
  for (auto [d, dd] : {std::pair{2, 1}, {2, 2}, {3, 2}, {2, 4}}) {
    ComplexMatrix x(static_cast<Eigen::Index>((d - 1) * dd), dd);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.complex_normal();
    x *= 0.1 / x.norm();
    const Coordinates c{x};
    CHECK(std::abs(jacobian(c, d, dd) - jacobian_first_order(c)) < 1e-3);
    // the gap is fourth order: halving x shrinks it ~16x
    const Coordinates h{0.5 * x};
    const double g1 = std::abs(jacobian(c, d, dd) - jacobian_first_order(c));
    const double g2 = std::abs(jacobian(h, d, dd) - jacobian_first_order(h));
    CHECK(g2 < g1 / 8);
  }
}

TEST_CASE("single-qubit pushforward is sin^2 distributed") {
  // |<0|psi>|^2 is uniform for Haar states, so sin^2(x-hat) is uniform
  RngStream rng(4, 0);
  const int n = 20000;
  std::vector<double> u;
  for (int i = 0; i < n; ++i) {
    const double s = extract_coordinates(haar_unitary(2, rng), 2, 1).xhat_spectrum()(0);
    u.push_back(std::sin(s) * std::sin(s));
  }
  std::sort(u.begin(), u.end());
  double ks = 0;
  for (int i = 0; i < n; ++i) ks = std::max({ks, u[i] - double(i) / n, double(i + 1) / n - u[i]});
  CHECK(ks < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("two-dimensional pushforward selects the squared-spectrum Vandermonde") {
  // d = 2, D = 2: 2x2 complex x with singular values (a, b). Lebesgue measure
  // contributes a b (a^2 - b^2)^2; the library Jacobian should turn this into
  // the truncated-Haar law. The alternative with Vandermonde(x-hat) in the
  // denominator is tested as the competing hypothesis.
  RngStream rng(5, 0);
  const int n = 20000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const RealVector sp = extract_coordinates(haar_unitary(4, rng), 2, 2).xhat_spectrum();
    const double v = sp.maxCoeff();
    s1 += v;
    s2 += v * v;
  }
  const double mc = s1 / n, se = std::sqrt((s2 / n - mc * mc) / n);

  auto lebesgue = [](double a, double b) { return a * b * (a * a - b * b) * (a * a - b * b); };
  auto library = [&](double a, double b) {
    RealVector s(2);
    s << a, b;
    return lebesgue(a, b) * jacobian_from_spectrum(s, 2, 2);
  };
  auto alternative = [&](double a, double b) {
    const double num = std::sin(a) * std::sin(a) - std::sin(b) * std::sin(b);
    return lebesgue(a, b) * std::sin(2 * a) / (2 * a) * std::sin(2 * b) / (2 * b) * num * num /
           ((a - b) * (a - b) + 1e-300);
  };
  auto smax = [](double a, double b) { return std::max(a, b); };
  const double e_lib = grid_mean(library, smax);
  const double e_alt = grid_mean(alternative, smax);
  CHECK(std::abs(mc - e_lib) < 4 * se);
  CHECK(std::abs(mc - e_alt) > 10 * se);
}
