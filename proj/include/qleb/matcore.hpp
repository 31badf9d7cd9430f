#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "qleb/errors.hpp"
#include "qleb/tolerance.hpp"

namespace qleb {

using complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense complex square matrix with a Hermiticity contract.
///
/// The checked constructor rejects matrices whose asymmetry exceeds
/// `tol_hermitian * (1 + max|a_ij|)` and stores the exact Hermitian part, so
/// downstream spectral code never sees roundoff asymmetry.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& m, double tol_hermitian = ToleranceConfig{}.hermitian);

  /// Hermitian part (m + m*)/2 without validation. For results of internal
  /// computations that are Hermitian up to roundoff.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  static HermitianMatrix zero(Index dim);
  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(const RVector& diag);

  Index dim() const { return mat_.rows(); }
  const CMatrix& mat() const { return mat_; }
  complex operator()(Index i, Index j) const { return mat_(i, j); }

  double trace() const { return mat_.trace().real(); }
  double frobenius() const { return mat_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double s) const;

  /// X A X* for arbitrary X with matching column count.
  HermitianMatrix congruence(const CMatrix& x) const;

 private:
  struct Unchecked {};
  HermitianMatrix(Unchecked, CMatrix m) : mat_(std::move(m)) {}
  CMatrix mat_;
};

/// Throws Error{NonHermitian} naming the worst offending entry.
void check_hermitian(const CMatrix& m, double tol_hermitian);

struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, orthonormal, phase fixed

  Index dim() const { return eigenvalues.size(); }
  double lambda_max() const { return dim() ? eigenvalues(dim() - 1) : 0.0; }
  double lambda_min() const { return dim() ? eigenvalues(0) : 0.0; }
  CMatrix reconstruct() const;
};

/// Ascending eigenvalues; each eigenvector has its first component above
/// 1e-12 in modulus rotated to the positive real axis.
SpectralDecomposition eig_hermitian(const HermitianMatrix& a);
SpectralDecomposition eig_hermitian(const CMatrix& a, const ToleranceConfig& tol);

/// Spectrum of a PSD matrix with the tolerance policy applied: eigenvalues
/// at or below rank_rel * lambda_max (including admissible negatives down to
/// -psd_floor * lambda_max) are set to exactly zero. Throws NotPSD otherwise.
SpectralDecomposition psd_spectrum(const HermitianMatrix& a, const ToleranceConfig& tol);

/// V diag(f(lambda)) V*. The single code path behind every matrix function.
HermitianMatrix spectral_apply(const SpectralDecomposition& spec, const std::function<double(double)>& f);

bool is_psd(const HermitianMatrix& a, const ToleranceConfig& tol);
bool is_strictly_positive(const HermitianMatrix& a, const ToleranceConfig& tol);
Index numerical_rank(const HermitianMatrix& a, const ToleranceConfig& tol);

/// Orthonormal columns spanning supp A (eigenvalue above the rank cutoff),
/// in ascending eigenvalue order.
CMatrix support_basis(const HermitianMatrix& a, const ToleranceConfig& tol);
/// Orthonormal columns spanning ker A.
CMatrix kernel_basis(const HermitianMatrix& a, const ToleranceConfig& tol);

HermitianMatrix support_projector(const HermitianMatrix& a, const ToleranceConfig& tol);
HermitianMatrix psd_sqrt(const HermitianMatrix& a, const ToleranceConfig& tol);
HermitianMatrix psd_pinv(const HermitianMatrix& a, const ToleranceConfig& tol);
/// log on supp A, zero on ker A.
HermitianMatrix psd_log_on_support(const HermitianMatrix& a, const ToleranceConfig& tol);
HermitianMatrix herm_exp(const HermitianMatrix& a);
/// exp(i t A), unitary.
CMatrix expi(const HermitianMatrix& a, double t = 1.0);

/// Operator geometric mean A # B = sqrt(A) (A^-1/2 B A^-1/2)^1/2 sqrt(A), the
/// unique positive X with X A^-1 X = B. Both arguments strictly positive.
HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b, const ToleranceConfig& tol);

complex trace_inner(const CMatrix& a, const CMatrix& b);
complex trace_inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// ||a - b||_F / max(||b||_F, tiny)
double rel_frobenius_diff(const CMatrix& a, const CMatrix& b);

}  // namespace qleb
