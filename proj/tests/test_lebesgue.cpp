#include <doctest.h>

#include <cmath>

#include "qleb/lebesgue.hpp"
#include "qleb/presets.hpp"
#include "support/error_kind.hpp"
#include "support/oracles.hpp"
#include "support/random_states.hpp"

using namespace qleb;
using qleb::testing::Rng;
using qleb::testing::thrown_kind;

namespace {

HermitianMatrix m2(complex a, complex b, complex c, complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return HermitianMatrix(m);
}

// the four decomposition invariants, relative to the scale of sigma
void check_invariants(const LebesgueDecomposition& dec, const HermitianMatrix& sigma, const HermitianMatrix& rho,
                      const ToleranceConfig& tol) {
  const double s = sigma.frobenius();
  CHECK(((dec.ac + dec.perp).mat() - sigma.mat()).norm() <= tol.eq_rel * s);
  CHECK(std::abs(trace_inner(rho, dec.perp)) <= tol.eq_rel * rho.trace() * sigma.trace());
  CHECK((dec.sqrt_lr.mat() * rho.mat() * dec.sqrt_lr.mat() - dec.ac.mat()).norm() <= tol.eq_rel * s);
  if (dec.ac.frobenius() > tol.eq_rel * s) CHECK(is_abs_continuous(dec.ac, rho, tol));
}

}  // namespace

TEST_SUITE("lebesgue") {
  TEST_CASE("density matrix validation") {
    const ToleranceConfig tol;
    CHECK(thrown_kind([&] { DensityMatrix d(m2(0.6, 0, 0, 0.6), tol); }) == ErrorKind::NotNormalized);
    CHECK(thrown_kind([&] { DensityMatrix d(m2(1.2, 0, 0, -0.2), tol); }) == ErrorKind::NotPSD);
    CHECK(thrown_kind([&] { DensityMatrix d(m2(0, 0, 0, 0), tol, true); }) == ErrorKind::ZeroState);
    DensityMatrix sub(m2(0.25, 0, 0, 0.25), tol, true);
    CHECK(sub.trace() == doctest::Approx(0.5));
  }

  TEST_CASE("excision examples") {
    const ToleranceConfig tol;
    const auto lim = presets::pseudo_likelihood_limits(tol);
    const auto ex = excision(lim.sigma, lim.rho, tol);
    REQUIRE(ex.dim() == 1);
    CHECK(ex(0, 0).real() == doctest::Approx(0.5));
    CHECK(std::abs(excision(m2(0, 0, 0, 1), m2(1, 0, 0, 0), tol)(0, 0)) == 0.0);
    Rng rng(21);
    const HermitianMatrix rho = testing::random_faithful(rng, 4);
    const HermitianMatrix sigma = testing::random_state(rng, 4, 2);
    const auto e = excision(sigma, rho, tol);
    REQUIRE(e.dim() == 4);
    const auto se = eig_hermitian(e), ss = eig_hermitian(sigma);
    CHECK((se.eigenvalues - ss.eigenvalues).norm() < 1e-13);
  }

  TEST_CASE("singularity and absolute continuity predicates") {
    const ToleranceConfig tol;
    const HermitianMatrix e0 = m2(1, 0, 0, 0), e1 = m2(0, 0, 0, 1);
    CHECK(is_singular(e0, e1, tol));
    CHECK_FALSE(is_abs_continuous(e1, e0, tol));
    const auto lim = presets::pseudo_likelihood_limits(tol);
    CHECK_FALSE(is_singular(lim.rho, lim.sigma, tol));
    CHECK(is_abs_continuous(lim.sigma, lim.rho, tol));
    CHECK(is_abs_continuous(lim.rho, lim.sigma, tol));
    CHECK(is_mutually_ac(lim.rho, lim.sigma, tol));
    const HermitianMatrix faithful = m2(0.7, 0.1, 0.1, 0.3);
    CHECK_FALSE(is_singular(faithful, faithful, tol));
    CHECK(is_abs_continuous(e0, faithful, tol));
    CHECK(is_abs_continuous(lim.sigma.mat(), faithful, tol));
    CHECK_FALSE(is_mutually_ac(e0, e1, tol));
    CHECK(thrown_kind([&] { is_abs_continuous(HermitianMatrix::zero(2), e0, tol); }) == ErrorKind::ZeroState);
  }

  TEST_CASE("identical faithful states give R = I") {
    const ToleranceConfig tol;
    const HermitianMatrix rho = m2(0.6, complex(0.1, 0.2), complex(0.1, -0.2), 0.4);
    const auto dec = lebesgue_decompose(rho, rho, tol);
    CHECK(rel_frobenius_diff(dec.ac.mat(), rho.mat()) < 1e-12);
    CHECK(dec.perp.frobenius() < 1e-12);
    CHECK(rel_frobenius_diff(dec.sqrt_lr.mat(), CMatrix::Identity(2, 2)) < 1e-12);
  }

  TEST_CASE("sigma = rho rank deficient gives the support projector") {
    const ToleranceConfig tol;
    Rng rng(22);
    const HermitianMatrix rho = testing::random_state(rng, 4, 2);
    const auto r = sqrt_likelihood_ratio(rho, rho, tol);
    CHECK(rel_frobenius_diff(r.mat(), support_projector(rho, tol).mat()) < 1e-10);
  }

  TEST_CASE("pseudo-likelihood pair has the closed-form ratio") {
    const ToleranceConfig tol = tolerance_profile("fine");
    for (long long n : {1LL, 2LL, 10LL, 1000LL, 1000000LL}) {
      const auto p = presets::pseudo_likelihood_pair(n, tol);
      const auto r = sqrt_likelihood_ratio(p.sigma, p.rho, tol);
      CHECK(rel_frobenius_diff(r.mat(), presets::pseudo_likelihood_ratio(n).mat()) <= 1e-10);
    }
  }

  TEST_CASE("orthogonal-limit pair at n = 2") {
    const ToleranceConfig tol;
    const auto p = presets::orthogonal_limit_pair(2, tol);
    const auto r = sqrt_likelihood_ratio(p.sigma, p.rho, tol);
    const HermitianMatrix expect = m2(1, 2, 2, 4) * (1.0 / std::sqrt(5.0));
    CHECK(rel_frobenius_diff(r.mat(), expect.mat()) < 1e-12);
    // gamma on the kernel of rho leaves R rho R unchanged
    const CMatrix bumped = r.mat() + 0.7 * m2(0, 0, 0, 1).mat();
    CHECK((bumped * p.rho.mat().mat() * bumped - r.mat() * p.rho.mat().mat() * r.mat()).norm() < 1e-14);
  }

  TEST_CASE("singular pairs short-circuit") {
    const ToleranceConfig tol;
    const auto dec = lebesgue_decompose(m2(0, 0, 0, 1), m2(1, 0, 0, 0), tol);
    CHECK(dec.ac.frobenius() == 0.0);
    CHECK(dec.sqrt_lr.frobenius() == 0.0);
    CHECK(dec.perp(1, 1).real() == 1.0);
  }

  TEST_CASE("faithful sigma gives d1 = 0 and ac mutually ac to rho") {
    const ToleranceConfig tol;
    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
      const Index d = rng.integer(2, 6);
      const HermitianMatrix rho = testing::random_state(rng, d, rng.integer(1, static_cast<int>(d)));
      const HermitianMatrix sigma = testing::random_faithful(rng, d);
      const auto dec = lebesgue_decompose(sigma, rho, tol);
      CHECK(dec.split.dims()[0] == 0);
      CHECK(is_mutually_ac(dec.ac, rho, tol));
    }
  }

  TEST_CASE("support split is an orthonormal basis with the right pieces") {
    const ToleranceConfig tol;
    Rng rng(24);
    for (int t = 0; t < 200; ++t) {
      const auto pair = testing::random_pair(rng);
      if (is_singular(pair.rho, pair.sigma, tol)) continue;
      const auto dec = lebesgue_decompose(pair.sigma, pair.rho, tol);
      const auto& s = dec.split;
      const Index d = pair.rho.dim();
      CMatrix all(d, d);
      all << s.basis_1, s.basis_2, s.basis_3;
      CHECK((all.adjoint() * all - CMatrix::Identity(d, d)).norm() <= tol.eq_rel);
      CHECK((pair.rho.mat() * s.basis_3).norm() <= tol.eq_rel);
      CHECK((pair.sigma.mat() * s.basis_1).norm() <= tol.eq_rel);
      CHECK(s.basis_3.cols() == d - numerical_rank(pair.rho, tol));
    }
  }

  TEST_CASE("block oracle, closed form and library agree on random pairs") {
    const ToleranceConfig tol;
    Rng rng(25);
    int nonsingular = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto pair = testing::random_pair(rng);
      const auto dec = lebesgue_decompose(pair.sigma, pair.rho, tol);
      check_invariants(dec, pair.sigma, pair.rho, tol);
      CHECK(std::abs(dec.ac.trace() + dec.perp.trace() - 1.0) < 1e-12);
      const auto oracle = testing::block_decompose(pair.sigma.mat(), pair.rho.mat());
      CHECK((dec.ac.mat() - oracle.ac).norm() <= 1e-8);
      CHECK((dec.perp.mat() - oracle.perp).norm() <= 1e-8);
      const CMatrix rc = sqrt_lr_closed_form(pair.sigma, pair.rho, tol).mat();
      const CMatrix ac_cf = rc * pair.rho.mat() * rc;
      CHECK((ac_cf - oracle.ac).norm() <= 1e-8);
      CHECK((pair.sigma.mat() - ac_cf - oracle.perp).norm() <= 1e-8);
      if (!pair.constructed_singular) ++nonsingular;
    }
    CHECK(nonsingular > 600);
  }

  TEST_CASE("decomposition is unitarily covariant") {
    const ToleranceConfig tol;
    Rng rng(26);
    for (int t = 0; t < 200; ++t) {
      const auto pair = testing::random_pair(rng);
      const CMatrix u = testing::random_unitary(rng, pair.rho.dim());
      const auto dec = lebesgue_decompose(pair.sigma, pair.rho, tol);
      const auto rot = lebesgue_decompose(pair.sigma.congruence(u), pair.rho.congruence(u), tol);
      CHECK((rot.ac.mat() - u * dec.ac.mat() * u.adjoint()).norm() <= tol.eq_rel);
      CHECK((rot.perp.mat() - u * dec.perp.mat() * u.adjoint()).norm() <= tol.eq_rel);
    }
  }

  TEST_CASE("singularity is symmetric and matches excision and support tests") {
    const ToleranceConfig tol;
    Rng rng(27);
    for (int t = 0; t < 1000; ++t) {
      const auto pair = testing::random_pair(rng);
      const bool sing = is_singular(pair.rho, pair.sigma, tol);
      CHECK(sing == is_singular(pair.sigma, pair.rho, tol));
      CHECK(sing == pair.constructed_singular);
      const bool excision_zero =
          excision(pair.sigma, pair.rho, tol).frobenius() <= tol.eq_rel * pair.sigma.frobenius();
      CHECK(sing == excision_zero);
      const CMatrix overlap = support_projector(pair.rho, tol).mat() * support_projector(pair.sigma, tol).mat();
      CHECK(sing == (overlap.norm() <= tol.eq_rel));
    }
  }

  TEST_CASE("absolute continuity iff rho = R sigma R for the constructed R") {
    const ToleranceConfig tol;
    Rng rng(28);
    int ac_count = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto pair = testing::random_pair(rng);
      const auto& a = pair.rho;
      const auto& b = pair.sigma;
      const CMatrix r = sqrt_likelihood_ratio(a, b, tol).mat();
      const bool reproduces = (r * b.mat() * r - a.mat()).norm() <= 1e-8 * a.frobenius();
      const bool ac = is_abs_continuous(a, b, tol);
      CHECK(ac == reproduces);
      ac_count += ac;
    }
    CHECK(ac_count > 200);
    CHECK(ac_count < 800);
  }

  TEST_CASE("quantum log-likelihood") {
    const ToleranceConfig tol;
    const HermitianMatrix rho = m2(0.6, complex(0.1, 0.2), complex(0.1, -0.2), 0.4);
    CHECK(quantum_log_likelihood(rho, rho, tol).frobenius() < 1e-12);
    const auto diag = quantum_log_likelihood(m2(0.2, 0, 0, 0.8), m2(0.5, 0, 0, 0.5), tol);
    CHECK(diag(0, 0).real() == doctest::Approx(std::log(0.4)));
    CHECK(diag(1, 1).real() == doctest::Approx(std::log(1.6)));
    Rng rng(29);
    for (int t = 0; t < 100; ++t) {
      const Index d = rng.integer(2, 5);
      const HermitianMatrix r = testing::random_faithful(rng, d), s = testing::random_faithful(rng, d);
      const auto ll = quantum_log_likelihood(s, r, tol);
      const CMatrix half = herm_exp(ll * 0.5).mat();
      CHECK((half * r.mat() * half - s.mat()).norm() <= tol.eq_rel * s.frobenius());
    }
    CHECK(thrown_kind([&] { quantum_log_likelihood(rho, m2(1, 0, 0, 0), tol); }) == ErrorKind::NotStrictlyPositive);
  }

  TEST_CASE("fidelity affinity equals Tr rho R") {
    const ToleranceConfig tol;
    Rng rng(30);
    for (int t = 0; t < 200; ++t) {
      const auto pair = testing::random_pair(rng);
      const auto r = sqrt_likelihood_ratio(pair.sigma, pair.rho, tol);
      CHECK(fidelity_affinity(pair.sigma, pair.rho, tol) ==
            doctest::Approx(trace_inner(pair.rho, r).real()).epsilon(1e-9).scale(1.0));
    }
  }

  TEST_CASE("zero and mismatched inputs") {
    const ToleranceConfig tol;
    CHECK(thrown_kind([&] { lebesgue_decompose(HermitianMatrix::zero(2), m2(1, 0, 0, 0), tol); }) ==
          ErrorKind::ZeroState);
    CHECK(thrown_kind([&] { lebesgue_decompose(m2(1, 0, 0, 0), HermitianMatrix::identity(3), tol); }) ==
          ErrorKind::DimMismatch);
  }
}
