#include <doctest.h>

#include <cstring>

#include <omp.h>

#include "qleb/kernels.hpp"
#include "qleb/presets.hpp"
#include "support/random_states.hpp"

using namespace qleb;
using qleb::testing::Rng;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
bool same_bits(complex a, complex b) { return same_bits(a.real(), b.real()) && same_bits(a.imag(), b.imag()); }
bool same_bits(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(complex) * static_cast<std::size_t>(a.size())) == 0;
}

// runs f under 1 and 4 OpenMP threads
template <class F>
void with_thread_counts(F&& f) {
  const int saved = omp_get_max_threads();
  for (int t : {1, 4}) {
    omp_set_num_threads(t);
    f(t);
  }
  omp_set_num_threads(saved);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("Kakutani summands match the serial loop bit for bit") {
    const ToleranceConfig tol;
    const auto fam = presets::qubit_product_sqrt(tol);
    const auto ref = kernels::reference::kakutani_summands(fam.factors, 3000, tol);
    with_thread_counts([&](int) {
      const auto par = kernels::kakutani_summands(fam.factors, 3000, tol);
      REQUIRE(par.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(same_bits(par[i], ref[i]));
    });
  }

  TEST_CASE("batch decomposition matches the serial loop bit for bit") {
    const ToleranceConfig tol;
    Rng rng(61);
    std::vector<std::pair<HermitianMatrix, HermitianMatrix>> pairs;
    for (int t = 0; t < 300; ++t) {
      const auto p = testing::random_pair(rng);
      pairs.emplace_back(p.sigma, p.rho);
    }
    const auto ref = kernels::reference::decompose_batch(pairs, tol);
    with_thread_counts([&](int) {
      const auto par = kernels::decompose_batch(pairs, tol);
      REQUIRE(par.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(same_bits(par[i].ac.mat(), ref[i].ac.mat()));
        CHECK(same_bits(par[i].perp.mat(), ref[i].perp.mat()));
        CHECK(same_bits(par[i].sqrt_lr.mat(), ref[i].sqrt_lr.mat()));
      }
    });
  }

  TEST_CASE("batch iid quasi-CF matches the serial loop bit for bit") {
    Rng rng(62);
    const HermitianMatrix rho = testing::random_faithful(rng, 3);
    const std::vector<HermitianMatrix> obs{testing::random_hermitian(rng, 3), testing::random_hermitian(rng, 3)};
    std::vector<std::vector<RVector>> queries;
    for (int q = 0; q < 64; ++q) {
      std::vector<RVector> one;
      for (int t = 0; t < 1 + q % 3; ++t) one.push_back(testing::random_real_query(rng, 2, 1)[0].real());
      queries.push_back(one);
    }
    const auto ref = kernels::reference::iid_qcf_batch(rho, obs, queries, 12345);
    with_thread_counts([&](int) {
      const auto par = kernels::iid_qcf_batch(rho, obs, queries, 12345);
      REQUIRE(par.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(same_bits(par[i], ref[i]));
    });
  }

  TEST_CASE("the lowest failing index is the one reported") {
    const ToleranceConfig tol;
    auto factors = [](long long i) {
      if (i == 5 || i == 50) {
        CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
        a(0, 0) = 1.0;
        b(1, 1) = 1.0;
        return StatePair{DensityMatrix(a), DensityMatrix(b)};
      }
      const DensityMatrix r(HermitianMatrix::identity(2) * 0.5);
      return StatePair{r, r};
    };
    with_thread_counts([&](int) {
      try {
        kernels::kakutani_summands(factors, 100, tol);
        FAIL("expected FactorNotAC");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FactorNotAC);
        CHECK(std::string(e.what()).find("sigma_5 ") != std::string::npos);
      }
    });
  }

  TEST_CASE("max_threads reports a positive count") { CHECK(kernels::max_threads() >= 1); }
}
