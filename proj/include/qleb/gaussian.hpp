#pragma once

#include <vector>

#include "qleb/matcore.hpp"

namespace qleb {

/// N(h, J) with J = V + iS Hermitian PSD.
struct GaussianParams {
  RVector h;
  CMatrix J;

  Index dim() const { return h.size(); }
  RMatrix V() const { return J.real(); }
  RMatrix S() const { return J.imag(); }
};

/// (mu, Sigma, kappa, s^2) as in the quantum Le Cam third lemma; the joint
/// covariance [[Sigma, kappa], [kappa*, s^2]] must be PSD.
struct ExtendedGaussianParams {
  RVector mu;
  CMatrix Sigma;
  CVector kappa;
  double s2 = 0.0;

  Index dim() const { return mu.size(); }
  CMatrix joint_covariance() const;
};

/// xi_1 .. xi_r, each of length d. Complex entries are allowed for the
/// analytically continued formula.
using QcfQuery = std::vector<CVector>;

bool validate(const GaussianParams& params, const ToleranceConfig& tol = {});
bool validate(const ExtendedGaussianParams& ext, const ToleranceConfig& tol = {});

/// exp( sum_t [ i xi_t.h - 1/2 xi_t^T J xi_t ] - sum_{t<u} xi_u^T J xi_t ),
/// plain transposes throughout, so the contraction pairs the second index of
/// J with the earlier vector. Throws InvalidParams for invalid params.
complex gaussian_qcf(const GaussianParams& params, const QcfQuery& q, const ToleranceConfig& tol = {});

/// (mu + Re kappa, Sigma).
GaussianParams lecam_shift(const ExtendedGaussianParams& ext, const ToleranceConfig& tol = {});

/// phi(e^{L/2} prod_t e^{i xi_t.X} e^{L/2}) evaluated on the (d+1)-mode
/// Gaussian N((mu, -s^2/2), [[Sigma, kappa], [kappa*, s^2]]) with the end
/// vectors (0, -i/2). Queries must be real; r = 0 is allowed.
complex sandwiched_gaussian_qcf(const ExtendedGaussianParams& ext, const QcfQuery& q,
                                const ToleranceConfig& tol = {});

}  // namespace qleb
