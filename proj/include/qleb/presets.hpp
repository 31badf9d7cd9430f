#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qleb/contiguity.hpp"
#include "qleb/qlan.hpp"

// Worked families shipped with the library: two-level sequences with known
// likelihood ratios, a three-block family in dimension 2n+2, qubit product
// families, and the spin-1/2 pure-state model with its rank-dropping
// perturbation.
namespace qleb::presets {

/// Pauli matrix sigma_k, k in {1, 2, 3}.
HermitianMatrix pauli(int k);

// ---- faithful pair with a diverging likelihood ratio entry

/// rho = (1/2n^3) diag(2n^3 - 1, 1), sigma = [[n^2, n^2+1], [n^2+1, n^2+2n+2]] / 2(n^2+n+1).
StatePair pseudo_likelihood_pair(long long n, const ToleranceConfig& tol = {});
/// diag(1, 0) and [[1, 1], [1, 1]] / 2.
StatePair pseudo_likelihood_limits(const ToleranceConfig& tol = {});
/// n / sqrt(2(n^2+n+1)) [[1, 1], [1, 2n+1]].
HermitianMatrix pseudo_likelihood_ratio(long long n);
/// Same with the (2,2) entry replaced by 1.
HermitianMatrix pseudo_likelihood_modified(long long n);
StateSequence pseudo_likelihood_sequence(long long horizon, const ToleranceConfig& tol = {});

// ---- pure pair whose limits are orthogonal

/// rho = diag(1, 0), sigma = [[1, n], [n, n^2]] / (1 + n^2).
StatePair orthogonal_limit_pair(long long n, const ToleranceConfig& tol = {});
StatePair orthogonal_limit_limits(const ToleranceConfig& tol = {});
StateSequence orthogonal_limit_sequence(long long horizon, const ToleranceConfig& tol = {});

// ---- three-block family, dimension 2n + 2 (block sizes n, 2, n)

BlockSet three_block_blocks(long long n);
/// Full states assembled from the blocks (n x n identities, so keep n small).
StatePair three_block_states(long long n, const ToleranceConfig& tol = {});
/// Blocks only; the inner pair is the pseudo-likelihood pair up to scaling.
BlockSequence three_block_sequence(long long horizon, const ToleranceConfig& tol = {});

// ---- qubit product families against rho = I/2

/// sigma_t = [[2t^2+2t+1, 2t], [2t, 2t^2-2t+1]] / (4t^2 + 2) paired with I/2.
StatePair qubit_factor(double t, const ToleranceConfig& tol = {});
/// 1 - sqrt(2t^2 / (2t^2 + 1)) without cancellation.
double qubit_summand(double t);
/// factors sigma_i (convergent series).
ProductFamily qubit_product_linear(const ToleranceConfig& tol = {});
/// factors sigma_sqrt(i) (divergent series).
ProductFamily qubit_product_sqrt(const ToleranceConfig& tol = {});

// ---- spin-1/2 models

/// (1/2)(I + tanh|x|/|x| (theta_1 s_1 + theta_2 s_2) + sech|x| s_3), pure for every theta.
HermitianMatrix spin_state_matrix(const RVector& theta);
/// Analytic d/dtheta_i of the above.
HermitianMatrix spin_state_derivative(const RVector& theta, Index i);
ParametricModel spin_pure_model(const ToleranceConfig& tol = {});

/// e^{-f} rho~_theta + (1 - e^{-f}) |e2><e2|.
struct Perturbation {
  std::string name;
  std::function<double(const RVector&)> f;
  std::function<RVector(const RVector&)> grad;
};
Perturbation cubic_perturbation();      // |theta|^3
Perturbation quadratic_perturbation();  // |theta|^2
ParametricModel spin_perturbed_model(const Perturbation& p, const ToleranceConfig& tol = {});

enum class OverlapScaling { SqrtN, QuarterN };

/// Tensor powers of (rho~_0, rho~_{h/g(n)}) with n copies, g(n) = sqrt n or
/// n^{1/4}. Declared limits: trace 1, overlap e^{-|h|^2/4} for sqrt n and 0
/// otherwise.
PureSequence spin_overlap_sequence(const RVector& h, OverlapScaling g, long long horizon,
                                   const ToleranceConfig& tol = {});
/// (1/2 (1 + sech(|h|/g(n))))^n.
double spin_overlap_closed_form(const RVector& h, OverlapScaling g, long long n);

/// Names accepted by the command-line front end.
std::vector<std::string> sequence_preset_names();
std::vector<std::string> model_names();
/// "spin-pure" or "spin-perturbed:f=cubic" / "spin-perturbed:f=quadratic".
/// Throws InvalidArgument for anything else.
ParametricModel model_by_name(const std::string& name, const ToleranceConfig& tol = {});

}  // namespace qleb::presets
