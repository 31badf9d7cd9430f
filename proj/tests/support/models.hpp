#pragma once

#include "qleb/qlan.hpp"
#include "support/random_states.hpp"

namespace qleb::testing {

/// One-parameter faithful model rho(t) = (A + t B) / Tr(A + t B) with A
/// positive definite and B Hermitian, scaled so that A + t B stays positive
/// for |t| < 10; the derivative is supplied exactly.
inline ParametricModel random_faithful_model(Rng& rng, Index d) {
  const HermitianMatrix ah = random_faithful(rng, d);
  const CMatrix a = ah.mat();
  const CMatrix h = random_hermitian(rng, d).mat();
  const double hn = Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues().cwiseAbs().maxCoeff();
  const CMatrix b = h * (0.1 * eig_hermitian(ah).lambda_min() / hn);
  ParametricModel m;
  m.dim = d;
  m.num_params = 1;
  m.state_at = [a, b](const RVector& t) {
    const CMatrix x = a + t(0) * b;
    return DensityMatrix(HermitianMatrix::hermitian_part(x / x.trace().real()));
  };
  m.deriv_at = [a, b](const RVector& t, Index) {
    const CMatrix x = a + t(0) * b;
    const double tr = x.trace().real();
    return HermitianMatrix::hermitian_part((b - b.trace().real() * x / tr) / tr);
  };
  return m;
}

}  // namespace qleb::testing
