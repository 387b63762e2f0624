#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mpsm/error.hpp"
#include "mpsm/mps.hpp"

using namespace mpsm;

namespace {

Mps bell_pair() {
  const BondProfile p(2, 2, 2);
  ComplexMatrix s1 = ComplexMatrix::Identity(2, 2);
  ComplexMatrix s2 = ComplexMatrix::Zero(4, 1);
  s2(0, 0) = s2(3, 0) = 1.0 / std::numbers::sqrt2;
  return Mps(p, {s1, s2});
}

}  // namespace

TEST_CASE("bond profile") {
  const BondProfile p(10, 2, 8);
  CHECK(p.dims() == std::vector<int>{1, 2, 4, 8, 8, 8, 8, 8, 4, 2, 1});
  CHECK(p.weights() == std::vector<int>{0, 0, 0, 8, 8, 8, 8, 12, 6, 3});
  CHECK(p.saturated_cuts() == std::vector<int>{3, 4, 5, 6, 7});
  CHECK(p.mid_cut() == 5);
  CHECK(p.hilbert_dim() == 1024);
  CHECK(p.hilbert_dim(1000) == 0);
  CHECK(BondProfile(10, 3, 27).saturated_cuts() == std::vector<int>{3, 4, 5, 6, 7});
  CHECK_THROWS_AS(BondProfile(0, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(BondProfile(4, 1, 2), InvalidArgument);
  CHECK_THROWS_AS(BondProfile(4, 2, 0), InvalidArgument);
}

TEST_CASE("bell pair") {
  const Mps m = bell_pair();
  const ComplexVector psi = to_statevector(m);
  CHECK(std::abs(psi(0) - 1.0 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(psi(3) - 1.0 / std::numbers::sqrt2) < 1e-15);
  const RightEnvironments envs = right_environments(m);
  const RealVector sp = envs.spectrum(1);
  CHECK(sp(0) == doctest::Approx(0.5));
  CHECK(sp(1) == doctest::Approx(0.5));
  CHECK(spectral_entropy(sp) == doctest::Approx(1.0));
  CHECK(schmidt_spectrum_dense(psi, 1, m.profile())(0) == doctest::Approx(0.5));
}

TEST_CASE("product states carry no entanglement") {
  RngStream rng(1, 0);
  const BondProfile p(5, 3, 1);
  const Mps m = sample_rmps(p, rng);
  for (double s : entanglement_profile(right_environments(m))) CHECK(std::abs(s) < 1e-12);
  const ComplexVector c = sample_central_gauge(p, rng);
  CHECK(std::abs(c.norm() - 1.0) < 1e-12);
  for (double s : dense_entanglement_profile(c, p)) CHECK(std::abs(s) < 1e-10);
}

TEST_CASE("rmps samples are left canonical with unit-trace environments") {
  RngStream rng(2, 0);
  const BondProfile p(7, 2, 6);
  for (int k = 0; k < 5; ++k) {
    const Mps m = sample_rmps(p, rng);
    CHECK(m.left_canonical_residual() < 1e-12);
    const RightEnvironments envs = right_environments(m);
    for (int i = 0; i <= 7; ++i) CHECK(std::abs(envs.gamma(i).trace() - 1.0) < 1e-10);
    CHECK(std::abs(to_statevector(m).norm() - 1.0) < 1e-12);
    // rank bound
    for (int cut = 1; cut < 7; ++cut) {
      const RealVector ev = envs.spectrum(cut);
      CHECK((ev.array() > 1e-12).count() <= p.bond(cut));
    }
  }
}

TEST_CASE("environment spectra match dense Schmidt spectra") {
  RngStream rng(3, 0);
  for (int d : {2, 3}) {
    const BondProfile p(d == 2 ? 8 : 6, d, 5);
    const Mps m = sample_rmps(p, rng);
    const RightEnvironments envs = right_environments(m);
    const ComplexVector psi = to_statevector(m);
    for (int cut = 1; cut < p.n_sites(); ++cut) {
      const RealVector env = envs.spectrum(cut), dense = schmidt_spectrum_dense(psi, cut, p);
      for (Eigen::Index i = 0; i < env.size(); ++i) CHECK(std::abs(env(env.size() - 1 - i) - dense(i)) < 1e-12);
    }
  }
}

TEST_CASE("gauge transformations leave the state unchanged") {
  RngStream rng(4, 0);
  const BondProfile p(5, 2, 4);
  Mps m = sample_rmps(p, rng);
  const ComplexVector before = to_statevector(m);
  const int i = 2, dd = p.bond(i);
  const ComplexMatrix x = haar_unitary(dd, rng);
  m.site(i) = m.site(i) * x;
  for (int n = 0; n < 2; ++n) m.site(i + 1).middleRows(n * dd, dd) = x.adjoint() * m.site(i + 1).middleRows(n * dd, dd);
  CHECK((to_statevector(m) - before).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("local unitaries leave the environment spectra unchanged") {
  RngStream rng(5, 0);
  const BondProfile p(6, 3, 5);
  Mps m = sample_rmps(p, rng);
  const RightEnvironments before = right_environments(m);
  const int site = 3, dl = p.bond(site - 1);
  const ComplexMatrix v = haar_unitary(3, rng);
  const ComplexMatrix old = m.site(site);
  for (int n = 0; n < 3; ++n) {
    ComplexMatrix block = ComplexMatrix::Zero(dl, p.bond(site));
    for (int k = 0; k < 3; ++k) block += v(n, k) * old.middleRows(k * dl, dl);
    m.site(site).middleRows(n * dl, dl) = block;
  }
  const RightEnvironments after = right_environments(m);
  for (int cut = 1; cut < 6; ++cut) CHECK((after.spectrum(cut) - before.spectrum(cut)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("central gauge has a flat spectrum at the centre") {
  RngStream rng(6, 0);
  const BondProfile p(10, 2, 8);
  for (int k = 0; k < 20; ++k) {
    const ComplexVector psi = sample_central_gauge(p, rng);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
    // left and right halves are orthonormal families, so the centre cut is maximally mixed
    const RealVector s = schmidt_spectrum_dense(psi, 5, p);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(s(i) - 0.125) < 1e-12);
    CHECK(std::abs(spectral_entropy(s) - 3.0) < 1e-10);
  }
}

TEST_CASE("statevector guard") {
  RngStream rng(7, 0);
  const BondProfile p(25, 2, 2);
  const Mps m = sample_rmps(p, rng);
  CHECK_THROWS_AS(to_statevector(m), ResourceLimit);
}
