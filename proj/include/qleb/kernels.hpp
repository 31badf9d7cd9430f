#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qleb/contiguity.hpp"
#include "qleb/lebesgue.hpp"
#include "qleb/qlan.hpp"

// OpenMP batch kernels. Every loop writes its own slot and all reductions run
// serially afterwards, so results are bitwise identical to the plain loops in
// `reference` for any thread count. The first failing index (lowest) is the
// one rethrown.
namespace qleb::kernels {

/// s_i = 1 - Tr sqrt(sqrt(sigma_i) rho_i sqrt(sigma_i)) for i = 1..horizon.
/// Throws FactorNotAC for the first i with sigma_i not << rho_i.
std::vector<double> kakutani_summands(const std::function<StatePair(long long)>& factors, long long horizon,
                                      const ToleranceConfig& tol);

/// lebesgue_decompose(sigma, rho) for each (sigma, rho).
std::vector<LebesgueDecomposition> decompose_batch(const std::vector<std::pair<HermitianMatrix, HermitianMatrix>>& pairs,
                                                   const ToleranceConfig& tol);

/// iid_qcf(base, obs, query, n) for each query.
std::vector<complex> iid_qcf_batch(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs,
                                   const std::vector<std::vector<RVector>>& queries, long long n);

/// Threads OpenMP would use for the kernels above.
int max_threads();

namespace reference {

std::vector<double> kakutani_summands(const std::function<StatePair(long long)>& factors, long long horizon,
                                      const ToleranceConfig& tol);
std::vector<LebesgueDecomposition> decompose_batch(const std::vector<std::pair<HermitianMatrix, HermitianMatrix>>& pairs,
                                                   const ToleranceConfig& tol);
std::vector<complex> iid_qcf_batch(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs,
                                   const std::vector<std::vector<RVector>>& queries, long long n);

}  // namespace reference
}  // namespace qleb::kernels
