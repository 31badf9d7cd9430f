#include <doctest.h>

#include <cmath>

#include "qleb/presets.hpp"
#include "qleb/qlan.hpp"
#include "support/error_kind.hpp"
#include "support/models.hpp"
#include "support/random_states.hpp"

using namespace qleb;
using qleb::testing::Rng;
using qleb::testing::thrown_kind;

namespace {

const complex I1{0.0, 1.0};

RVector vec(std::initializer_list<double> v) {
  RVector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

std::vector<std::vector<RVector>> spiral(int k) {
  std::vector<std::vector<RVector>> out;
  for (int i = 0; i < k; ++i) {
    const double r = 0.25 + 1.75 * i / (k - 1.0), a = 6.0 * M_PI * i / k;
    out.push_back({vec({r * std::cos(a), r * std::sin(a)})});
  }
  return out;
}

}  // namespace

TEST_SUITE("qlan") {
  TEST_CASE("spin model SLDs are the Pauli matrices") {
    const ToleranceConfig tol;
    const auto model = presets::spin_pure_model(tol);
    for (Index i = 0; i < 2; ++i) {
      const SldResult s = sld(model, RVector::Zero(2), i, tol);
      CHECK(rel_frobenius_diff(s.L.mat(), presets::pauli(static_cast<int>(i) + 1).mat()) < 1e-12);
      CHECK(s.residual <= 1e-10);
      CHECK_FALSE(s.inconsistent);
    }
  }

  TEST_CASE("maximally mixed state gives L = d A") {
    const ToleranceConfig tol;
    Rng rng(51);
    for (Index d = 2; d <= 5; ++d) {
      HermitianMatrix a = testing::random_hermitian(rng, d);
      a = a - HermitianMatrix::identity(d) * (a.trace() / static_cast<double>(d));
      const SldResult s = sld_from_derivative(HermitianMatrix::identity(d) * (1.0 / static_cast<double>(d)), a, tol);
      CHECK(rel_frobenius_diff(s.L.mat(), (a * static_cast<double>(d)).mat()) < 1e-12);
    }
  }

  TEST_CASE("Lyapunov residual on random faithful states") {
    const ToleranceConfig tol;
    Rng rng(52);
    for (int t = 0; t < 100; ++t) {
      const HermitianMatrix rho = testing::random_faithful(rng, 4);
      HermitianMatrix dir = testing::random_hermitian(rng, 4);
      dir = dir - rho * dir.trace();
      const SldResult s = sld_from_derivative(rho, dir, tol);
      const CMatrix res = rho.mat() * s.L.mat() + s.L.mat() * rho.mat() - 2.0 * dir.mat();
      CHECK(res.norm() <= 1e-10);
      CHECK(s.residual <= 1e-10);
      CHECK(std::abs(trace_inner(rho, s.L)) <= 1e-10);
    }
  }

  TEST_CASE("kernel components of the derivative are flagged and projected") {
    const ToleranceConfig tol;
    const HermitianMatrix rho = HermitianMatrix::diagonal(vec({1.0, 0.0}));
    CMatrix d(2, 2);
    d << 0.0, 0.3, 0.3, 0.2;
    const SldResult s = sld_from_derivative(rho, HermitianMatrix(d), tol);
    CHECK(s.inconsistent);
    CHECK(s.kernel_leak == doctest::Approx(0.2));
    CHECK(s.L(1, 1) == complex(0.0, 0.0));
    CHECK(s.residual <= 1e-14);
    d(1, 1) = 0.0;
    CHECK_FALSE(sld_from_derivative(rho, HermitianMatrix(d), tol).inconsistent);
  }

  TEST_CASE("finite differences agree with supplied derivatives") {
    Rng rng(53);
    for (int t = 0; t < 30; ++t) {
      ParametricModel m = testing::random_faithful_model(rng, rng.integer(2, 5));
      const RVector th = vec({rng.uniform(-0.5, 0.5)});
      const HermitianMatrix exact = model_derivative(m, th, 0);
      m.deriv_at = nullptr;
      const HermitianMatrix fd = model_derivative(m, th, 0);
      CHECK((fd.mat() - exact.mat()).norm() <= 1e-8);
    }
    const auto spin = presets::spin_pure_model();
    ParametricModel fd_spin = spin;
    fd_spin.deriv_at = nullptr;
    for (const RVector& th : {vec({0.0, 0.0}), vec({0.3, -0.2}), vec({1e-4, 2e-4})}) {
      for (Index i = 0; i < 2; ++i) {
        CHECK((model_derivative(fd_spin, th, i).mat() - model_derivative(spin, th, i).mat()).norm() <= 1e-8);
      }
    }
  }

  TEST_CASE("derivative errors") {
    ParametricModel empty;
    empty.num_params = 1;
    CHECK(thrown_kind([&] { model_derivative(empty, vec({0.0}), 0); }) == ErrorKind::DerivativeUnavailable);
    ParametricModel invalid;
    invalid.num_params = 1;
    invalid.state_at = [](const RVector& t) {
      return DensityMatrix(HermitianMatrix::diagonal(vec({1.0 + t(0), 0.0})));
    };
    CHECK(thrown_kind([&] { model_derivative(invalid, vec({0.0}), 0); }) == ErrorKind::DerivativeUnavailable);
    CHECK(thrown_kind([&] { model_derivative(invalid, vec({0.0}), 3); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("QFI examples") {
    const ToleranceConfig tol;
    const auto model = presets::spin_pure_model(tol);
    const RVector th = RVector::Zero(2);
    const HermitianMatrix rho = model.state_at(th).mat();
    const CMatrix j = qfi_matrix(rho, {sld(model, th, 0, tol).L, sld(model, th, 1, tol).L}, tol);
    CMatrix expect(2, 2);
    expect << 1.0, -I1, I1, 1.0;
    CHECK((j - expect).norm() <= 1e-12);
    CHECK(is_psd(HermitianMatrix::hermitian_part(j), tol));

    // two-outcome classical family p(t) = (1 + t) / 3
    const HermitianMatrix diag_rho = HermitianMatrix::diagonal(vec({1.0 / 3.0, 2.0 / 3.0}));
    const HermitianMatrix diag_d = HermitianMatrix::diagonal(vec({1.0 / 3.0, -1.0 / 3.0}));
    const CMatrix jc = qfi_matrix(diag_rho, {sld_from_derivative(diag_rho, diag_d, tol).L}, tol);
    const double fisher = (1.0 / 9.0) / (1.0 / 3.0) + (1.0 / 9.0) / (2.0 / 3.0);
    CHECK(jc(0, 0).real() == doctest::Approx(fisher));
    CHECK(jc(0, 0).imag() == 0.0);

    const HermitianMatrix e0 = HermitianMatrix::diagonal(vec({0.5, 0.5}));
    CHECK(qfi_matrix(e0, {presets::pauli(3)}, tol)(0, 0).real() == doctest::Approx(1.0));
    CHECK(thrown_kind([&] { qfi_matrix(e0, {HermitianMatrix::identity(2)}, tol); }) == ErrorKind::CenteringViolated);
  }

  TEST_CASE("QFI is Hermitian PSD on random models") {
    const ToleranceConfig tol;
    Rng rng(54);
    for (int t = 0; t < 50; ++t) {
      const Index d = rng.integer(2, 5);
      const HermitianMatrix rho = testing::random_faithful(rng, d);
      std::vector<HermitianMatrix> ls;
      for (int k = 0; k < 3; ++k) {
        HermitianMatrix dir = testing::random_hermitian(rng, d);
        ls.push_back(sld_from_derivative(rho, dir - rho * dir.trace(), tol).L);
      }
      const CMatrix j = qfi_matrix(rho, ls, tol);
      CHECK((j - j.adjoint()).norm() <= 1e-12 * (1.0 + j.norm()));
      CHECK(is_psd(HermitianMatrix::hermitian_part(j), tol));
    }
  }

  TEST_CASE("iid quasi-characteristic function") {
    const HermitianMatrix e1 = HermitianMatrix::diagonal(vec({1.0, 0.0}));
    const std::vector<HermitianMatrix> obs{presets::pauli(1)};
    CHECK(iid_qcf(e1, obs, {vec({0.0})}, 1000) == complex(1.0, 0.0));
    const complex v = iid_qcf(e1, obs, {vec({1.0})}, 1000000);
    // a 10^6-th power amplifies per-factor roundoff by 10^6
    CHECK(v.real() == doctest::Approx(std::pow(std::cos(1e-3), 1e6)).epsilon(1e-9));
    CHECK(std::abs(v - std::exp(-0.5)) <= 1e-3);

    Rng rng(55);
    for (int t = 0; t < 20; ++t) {
      const HermitianMatrix rho = testing::random_faithful(rng, 3);
      const std::vector<HermitianMatrix> b{testing::random_hermitian(rng, 3), testing::random_hermitian(rng, 3)};
      const std::vector<RVector> xis{vec({0.3, -0.2}), vec({0.1, 0.5})};
      CHECK(iid_qcf(rho, b, xis, 1) == quasi_characteristic(rho, b, xis));
      const long long n = 37;
      std::vector<RVector> scaled;
      for (const auto& x : xis) scaled.push_back(x / std::sqrt(static_cast<double>(n)));
      const complex single = quasi_characteristic(rho, b, scaled);
      CHECK(std::abs(iid_qcf(rho, b, xis, n) - std::pow(single, static_cast<double>(n))) <= 1e-12);
    }
    CHECK(int_power(complex(0.0, 1.0), 6) == complex(-1.0, 0.0));
    CHECK(thrown_kind([&] { iid_qcf(e1, obs, {vec({1.0})}, 0); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("Le Cam third lemma on the spin models") {
    const ToleranceConfig tol;
    const RVector h = vec({1.0, 0.5});
    for (const auto& model :
         {presets::spin_pure_model(tol), presets::spin_perturbed_model(presets::cubic_perturbation(), tol)}) {
      const auto rep = lecam3_numeric_check(model, RVector::Zero(2), {}, h, {100, 10000, 1000000}, spiral(20), tol);
      CHECK((rep.target.h - h).norm() <= 1e-10);
      CHECK(rep.decreasing);
      CHECK(rep.rows.back().max_deviation <= 1e-3);
    }
  }

  TEST_CASE("Le Cam check with h = 0 is the plain CLT error") {
    const ToleranceConfig tol;
    const auto model = presets::spin_pure_model(tol);
    const auto rep = lecam3_numeric_check(model, RVector::Zero(2), {}, RVector::Zero(2), {100, 10000}, spiral(5), tol);
    CHECK(rep.target.h.norm() == 0.0);
    const HermitianMatrix rho = model.state_at(RVector::Zero(2)).mat();
    const std::vector<HermitianMatrix> obs{presets::pauli(1), presets::pauli(2)};
    for (const auto& row : rep.rows) {
      double worst = 0.0;
      for (const auto& q : spiral(5)) {
        worst = std::max(worst, std::abs(iid_qcf(rho, obs, q, row.n) - gaussian_qcf(rep.target, {q[0].cast<complex>()})));
      }
      CHECK(row.max_deviation == doctest::Approx(worst).epsilon(1e-9));
    }
  }

  TEST_CASE("square-root expansion on the spin model") {
    const ToleranceConfig tol;
    const auto rep = sqrt_expansion_check(presets::spin_pure_model(tol), RVector::Zero(2), {0.08, 0.04, 0.02, 0.01},
                                          0.01, tol);
    CHECK(rep.coeff_rel_err <= 1e-3);
    CHECK((rep.expected + 0.125 * RMatrix::Identity(2, 2)).norm() <= 1e-12);
    REQUIRE(rep.residual_order.has_value());
    CHECK(*rep.residual_order > 2.0);
  }

  TEST_CASE("square-root expansion on the cubic perturbation") {
    const ToleranceConfig tol;
    const auto rep = sqrt_expansion_check(presets::spin_perturbed_model(presets::cubic_perturbation(), tol),
                                          RVector::Zero(2), {0.08, 0.04, 0.02, 0.01}, 0.01, tol);
    REQUIRE(rep.deficit_order.has_value());
    CHECK(*rep.deficit_order == doctest::Approx(3.0).epsilon(0.05));
    REQUIRE(rep.residual_order.has_value());
    CHECK(*rep.residual_order > 2.0);
  }

  TEST_CASE("version hook replaces R") {
    const ToleranceConfig tol;
    int calls = 0;
    const VersionHook hook = [&](const HermitianMatrix& s, const HermitianMatrix& r) {
      ++calls;
      return sqrt_lr_closed_form(s, r, tol);
    };
    const auto rep =
        sqrt_expansion_check(presets::spin_pure_model(tol), RVector::Zero(2), {0.04, 0.02}, 0.02, tol, hook);
    CHECK(calls > 0);
    CHECK(rep.coeff_rel_err <= 1e-2);
  }

  TEST_CASE("h = 0 gives B(0) = 0") {
    const ToleranceConfig tol;
    const auto model = presets::spin_pure_model(tol);
    const HermitianMatrix rho = model.state_at(RVector::Zero(2)).mat();
    const auto r = sqrt_likelihood_ratio(rho, rho, tol);
    CHECK(std::abs(trace_inner(rho, r).real() - 1.0) <= 1e-14);
  }

  TEST_CASE("rate scan verdicts") {
    const RVector h = vec({1.0, 0.5});
    const auto grid = log_grid(1, 100000000, 5);
    auto scan = [&](auto f, auto g) { return rate_scan(RateScan{f, g, h, grid}); };
    const auto cubic = [](const RVector& t) { return std::pow(t.norm(), 3); };
    const auto quad = [](const RVector& t) { return t.squaredNorm(); };
    const auto zero = [](const RVector&) { return 0.0; };
    const auto sqrt_n = [](double n) { return std::sqrt(n); };
    const auto lin = [](double n) { return n; };
    CHECK(scan(cubic, sqrt_n).verdict == Verdict::Contiguous);
    CHECK(scan(quad, sqrt_n).verdict == Verdict::NotContiguous);
    CHECK(scan(zero, lin).verdict == Verdict::Contiguous);
    const auto quarter = [](double n) { return std::pow(n, 0.25); };
    CHECK(scan(zero, quarter).verdict == Verdict::NotContiguous);
    const auto short_scan = rate_scan(RateScan{cubic, sqrt_n, h, {1, 2, 3}});
    CHECK(short_scan.verdict == Verdict::Inconclusive);
    CHECK(thrown_kind([&] { rate_scan(RateScan{cubic, sqrt_n, h, {}}); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("model registry") {
    CHECK(presets::model_by_name("spin-pure").num_params == 2);
    CHECK(presets::model_by_name("spin-perturbed:f=cubic").dim == 2);
    CHECK(thrown_kind([] { presets::model_by_name("nope"); }) == ErrorKind::InvalidArgument);
  }
}

TEST_SUITE("qlan-rate-band") {
  // Doubling n on the spin model must shrink the Le Cam deviation by a factor
  // in [1.2, 2.0].
  TEST_CASE("doubling band for the spin model") {
    const ToleranceConfig tol;
    std::vector<long long> grid;
    for (long long n = 10000; n <= 1280000; n *= 2) grid.push_back(n);
    const auto rep =
        lecam3_numeric_check(presets::spin_pure_model(tol), RVector::Zero(2), {}, vec({1.0, 0.5}), grid, spiral(20), tol);
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
      const double ratio = rep.rows[k - 1].max_deviation / rep.rows[k].max_deviation;
      INFO("n = " << rep.rows[k].n << ", ratio = " << ratio);
      CHECK(ratio >= 1.2);
      CHECK(ratio <= 2.0);
    }
  }
}
