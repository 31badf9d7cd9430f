#pragma once

#include <array>

#include "qleb/matcore.hpp"

namespace qleb {

/// PSD Hermitian matrix with unit trace, or trace in (0, 1] when
/// `subnormalized` is set (block pieces of larger states).
class DensityMatrix {
 public:
  explicit DensityMatrix(const HermitianMatrix& m, const ToleranceConfig& tol = {}, bool subnormalized = false,
                         double trace_tol = 1e-10);
  DensityMatrix(const CMatrix& m, const ToleranceConfig& tol = {}, bool subnormalized = false,
                double trace_tol = 1e-10);

  const HermitianMatrix& mat() const { return mat_; }
  Index dim() const { return mat_.dim(); }
  double trace() const { return mat_.trace(); }
  bool subnormalized() const { return subnormalized_; }
  double trace_tol() const { return trace_tol_; }

 private:
  HermitianMatrix mat_;
  bool subnormalized_;
  double trace_tol_;
};

/// H = H1 (+) H2 (+) H3 with H3 = ker rho, H2 = supp of the excision of sigma
/// onto supp rho, H1 its kernel inside supp rho. Columns are in the full space.
struct SupportSplit {
  CMatrix basis_1;
  CMatrix basis_2;
  CMatrix basis_3;

  std::array<Index, 3> dims() const { return {basis_1.cols(), basis_2.cols(), basis_3.cols()}; }
};

struct LebesgueDecomposition {
  HermitianMatrix ac;
  HermitianMatrix perp;
  HermitianMatrix sqrt_lr;  // canonical R, zero on the singular block
  SupportSplit split;
};

/// sigma compressed to supp rho, in rho's phase-fixed eigenbasis (support
/// columns in ascending eigenvalue order). rank(rho) x rank(rho).
HermitianMatrix excision(const HermitianMatrix& sigma, const HermitianMatrix& rho, const ToleranceConfig& tol);
HermitianMatrix excision(const DensityMatrix& sigma, const DensityMatrix& rho, const ToleranceConfig& tol);

/// Tr(rho sigma) <= eq_rel * Tr rho * Tr sigma.
bool is_singular(const HermitianMatrix& rho, const HermitianMatrix& sigma, const ToleranceConfig& tol);
bool is_singular(const DensityMatrix& rho, const DensityMatrix& sigma, const ToleranceConfig& tol);

/// a << b: the excision of b onto supp a is strictly positive.
bool is_abs_continuous(const HermitianMatrix& a, const HermitianMatrix& b, const ToleranceConfig& tol);
bool is_abs_continuous(const DensityMatrix& a, const DensityMatrix& b, const ToleranceConfig& tol);

bool is_mutually_ac(const HermitianMatrix& rho, const HermitianMatrix& sigma, const ToleranceConfig& tol);
bool is_mutually_ac(const DensityMatrix& rho, const DensityMatrix& sigma, const ToleranceConfig& tol);

/// Lebesgue decomposition of sigma with respect to rho.
///
/// Works on the simultaneous block form. R0 = sigma0 # rho0^-1 is formed on
/// the rho side and polished by at most a few Newton steps on R0 rho0 R0 =
/// sigma0; R = E* (0 (+) R0 (+) 0) E.
LebesgueDecomposition lebesgue_decompose(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                         const ToleranceConfig& tol);
LebesgueDecomposition lebesgue_decompose(const DensityMatrix& sigma, const DensityMatrix& rho,
                                         const ToleranceConfig& tol);

/// Canonical square-root likelihood ratio of sigma relative to rho.
HermitianMatrix sqrt_likelihood_ratio(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                      const ToleranceConfig& tol);
HermitianMatrix sqrt_likelihood_ratio(const DensityMatrix& sigma, const DensityMatrix& rho,
                                      const ToleranceConfig& tol);

/// sqrt(sigma) (sqrt(sqrt(sigma) rho sqrt(sigma)))^+ sqrt(sigma). Same R as
/// above in exact arithmetic; loses accuracy when rho is badly conditioned.
HermitianMatrix sqrt_lr_closed_form(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                    const ToleranceConfig& tol);

/// Tr sqrt(sqrt(sigma) rho sqrt(sigma)) = Tr rho R.
double fidelity_affinity(const HermitianMatrix& sigma, const HermitianMatrix& rho, const ToleranceConfig& tol);

/// 2 log(sigma # rho^-1). Both strictly positive.
HermitianMatrix quantum_log_likelihood(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                       const ToleranceConfig& tol);

}  // namespace qleb
