#include <doctest.h>

#include <cmath>

#include "qleb/gaussian.hpp"
#include "support/error_kind.hpp"
#include "support/random_states.hpp"

using namespace qleb;
using qleb::testing::Rng;
using qleb::testing::thrown_kind;

namespace {

const complex I1{0.0, 1.0};

CMatrix spin_j() {
  CMatrix j(2, 2);
  j << 1.0, -I1, I1, 1.0;
  return j;
}

CVector cv(std::initializer_list<complex> v) {
  CVector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (complex z : v) out(k++) = z;
  return out;
}

GaussianParams random_params(Rng& rng, Index d) {
  const CMatrix g = testing::ginibre(rng, d, d);
  GaussianParams p{RVector(d), g * g.adjoint() / static_cast<double>(d)};
  for (Index i = 0; i < d; ++i) p.h(i) = rng.normal();
  return p;
}

}  // namespace

TEST_SUITE("gaussian") {
  TEST_CASE("validation") {
    CHECK(validate(GaussianParams{RVector::Zero(2), spin_j()}));
    CMatrix bad(2, 2);
    bad << 1.0, -2.0 * I1, 2.0 * I1, 1.0;
    CHECK_FALSE(validate(GaussianParams{RVector::Zero(2), bad}));
    CHECK(validate(GaussianParams{RVector::Zero(3), CMatrix::Identity(3, 3)}));
    CHECK_FALSE(validate(GaussianParams{RVector::Zero(3), CMatrix::Identity(2, 2)}));
    CHECK(thrown_kind([&] { gaussian_qcf(GaussianParams{RVector::Zero(2), bad}, {cv({1.0, 0.0})}); }) ==
          ErrorKind::InvalidParams);

    ExtendedGaussianParams e{RVector::Zero(1), CMatrix::Identity(1, 1), cv({2.0}), 1.0};
    CHECK_FALSE(validate(e));
    e.kappa = cv({0.5});
    CHECK(validate(e));
    e.s2 = 0.0;
    e.kappa = cv({0.0});
    CHECK(validate(e));
  }

  TEST_CASE("fixed evaluations") {
    const GaussianParams spin{RVector::Zero(2), spin_j()};
    const complex v = gaussian_qcf(spin, {cv({1.0, 0.0})});
    CHECK(v.real() == doctest::Approx(std::exp(-0.5)));
    CHECK(v.imag() == doctest::Approx(0.0));

    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
      const GaussianParams p = random_params(rng, 3);
      const CVector xi = testing::random_real_query(rng, 3, 1)[0];
      const RVector x = xi.real();
      const complex expect = std::exp(I1 * x.dot(p.h) - 0.5 * x.dot(p.V() * x));
      CHECK(std::abs(gaussian_qcf(p, {xi}) - expect) < 1e-14);
      CHECK(std::abs(gaussian_qcf(p, {xi, CVector(-xi)}) - 1.0) < 1e-14);
    }
  }

  TEST_CASE("Hermitian symmetry and contraction on real queries") {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
      const Index d = rng.integer(1, 4);
      const GaussianParams p = random_params(rng, d);
      const QcfQuery q = testing::random_real_query(rng, d, rng.integer(1, 3));
      QcfQuery rev;
      for (auto it = q.rbegin(); it != q.rend(); ++it) rev.push_back(-*it);
      const complex v = gaussian_qcf(p, q);
      CHECK(std::abs(std::conj(v) - gaussian_qcf(p, rev)) < 1e-13);
      CHECK(std::abs(v) <= 1.0 + 1e-14);
    }
  }

  TEST_CASE("commuting case reduces to the classical characteristic function") {
    Rng rng(43);
    for (int t = 0; t < 100; ++t) {
      const Index d = rng.integer(1, 4);
      const RMatrix a = testing::ginibre(rng, d, d).real();
      const GaussianParams p{testing::random_real_query(rng, d, 1)[0].real(),
                             (a * a.transpose()).cast<complex>()};
      const QcfQuery q = testing::random_real_query(rng, d, rng.integer(1, 3));
      RVector total = RVector::Zero(d);
      for (const auto& xi : q) total += xi.real();
      const complex classical = std::exp(I1 * total.dot(p.h) - 0.5 * total.dot(p.V() * total));
      CHECK(std::abs(gaussian_qcf(p, q) - classical) < 1e-12);
    }
  }

  TEST_CASE("complex arguments continue the real formula") {
    const GaussianParams p{RVector::Zero(1), CMatrix::Identity(1, 1)};
    // E[e^{sX}] for X ~ N(0, 1) is e^{s^2/2}; s = 1 means xi = -i
    CHECK(gaussian_qcf(p, {cv({-I1})}).real() == doctest::Approx(std::exp(0.5)));
  }

  TEST_CASE("lecam_shift") {
    Rng rng(44);
    for (int t = 0; t < 20; ++t) {
      ExtendedGaussianParams e = testing::random_extended(rng, 3);
      const GaussianParams s = lecam_shift(e);
      CHECK((s.h - (e.mu + e.kappa.real())).norm() < 1e-15);
      CHECK((s.J - e.Sigma).norm() == 0.0);
      e.kappa.setZero();
      CHECK((lecam_shift(e).h - e.mu).norm() == 0.0);
    }
    ExtendedGaussianParams bad{RVector::Zero(1), CMatrix::Identity(1, 1), cv({2.0}), 1.0};
    CHECK(thrown_kind([&] { lecam_shift(bad); }) == ErrorKind::InvalidParams);
  }

  TEST_CASE("sandwiched value equals the shifted Gaussian") {
    Rng rng(45);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Index d = rng.integer(1, 4);
      const ExtendedGaussianParams e = testing::random_extended(rng, d);
      const QcfQuery q = testing::random_real_query(rng, d, 1 + t % 3);
      worst = std::max(worst, std::abs(sandwiched_gaussian_qcf(e, q) - gaussian_qcf(lecam_shift(e), q)));
    }
    CHECK(worst <= 1e-10);
    const ExtendedGaussianParams e = testing::random_extended(rng, 2);
    CHECK(std::abs(sandwiched_gaussian_qcf(e, {}) - 1.0) < 1e-15);
    CHECK(thrown_kind([&] { sandwiched_gaussian_qcf(e, {cv({I1, 0.0})}); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("spin-model extended parameters reproduce N(h, J)") {
    const RVector h = (RVector(2) << 1.0, 0.5).finished();
    const CMatrix j = spin_j();
    const ExtendedGaussianParams e{RVector::Zero(2), j, j * h.cast<complex>(), h.dot(j.real() * h)};
    REQUIRE(validate(e));
    const GaussianParams target{h, j};
    Rng rng(46);
    for (int t = 0; t < 20; ++t) {
      const QcfQuery q = testing::random_real_query(rng, 2, 1 + t % 3);
      CHECK(std::abs(sandwiched_gaussian_qcf(e, q) - gaussian_qcf(target, q)) <= 1e-10);
    }
  }

  TEST_CASE("query length mismatch") {
    const GaussianParams p{RVector::Zero(2), spin_j()};
    CHECK(thrown_kind([&] { gaussian_qcf(p, {cv({1.0})}); }) == ErrorKind::DimMismatch);
  }
}
