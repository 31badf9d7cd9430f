#include "qleb/kernels.hpp"

#include <exception>
#include <optional>
#include <sstream>

#include <omp.h>

namespace qleb::kernels {

namespace {

double kakutani_one(const std::function<StatePair(long long)>& factors, long long i, const ToleranceConfig& tol) {
  const StatePair p = factors(i);
  if (!is_abs_continuous(p.sigma, p.rho, tol)) {
    std::ostringstream os;
    os << "sigma_" << i << " is not absolutely continuous with respect to rho_" << i;
    throw Error(ErrorKind::FactorNotAC, os.str());
  }
  return 1.0 - fidelity_affinity(p.sigma.mat(), p.rho.mat(), tol);
}

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<double> kakutani_summands(const std::function<StatePair(long long)>& factors, long long horizon,
                                      const ToleranceConfig& tol) {
  const auto count = static_cast<std::size_t>(std::max(horizon, 0LL));
  std::vector<double> out(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < static_cast<long long>(count); ++k) {
    try {
      out[k] = kakutani_one(factors, k + 1, tol);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

std::vector<LebesgueDecomposition> decompose_batch(const std::vector<std::pair<HermitianMatrix, HermitianMatrix>>& pairs,
                                                   const ToleranceConfig& tol) {
  std::vector<std::optional<LebesgueDecomposition>> slots(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long k = 0; k < static_cast<long long>(pairs.size()); ++k) {
    try {
      slots[k] = lebesgue_decompose(pairs[k].first, pairs[k].second, tol);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  rethrow_first(errors);
  std::vector<LebesgueDecomposition> out;
  out.reserve(pairs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<complex> iid_qcf_batch(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs,
                                   const std::vector<std::vector<RVector>>& queries, long long n) {
  std::vector<complex> out(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < static_cast<long long>(queries.size()); ++k) {
    try {
      out[k] = iid_qcf(base, obs, queries[k], n);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

namespace reference {

std::vector<double> kakutani_summands(const std::function<StatePair(long long)>& factors, long long horizon,
                                      const ToleranceConfig& tol) {
  std::vector<double> out;
  for (long long i = 1; i <= horizon; ++i) out.push_back(kakutani_one(factors, i, tol));
  return out;
}

std::vector<LebesgueDecomposition> decompose_batch(const std::vector<std::pair<HermitianMatrix, HermitianMatrix>>& pairs,
                                                   const ToleranceConfig& tol) {
  std::vector<LebesgueDecomposition> out;
  out.reserve(pairs.size());
  for (const auto& [sigma, rho] : pairs) out.push_back(lebesgue_decompose(sigma, rho, tol));
  return out;
}

std::vector<complex> iid_qcf_batch(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs,
                                   const std::vector<std::vector<RVector>>& queries, long long n) {
  std::vector<complex> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(iid_qcf(base, obs, q, n));
  return out;
}

}  // namespace reference
}  // namespace qleb::kernels
