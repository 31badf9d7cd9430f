#include "qleb/matcore.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qleb {

namespace {

constexpr double kPhaseThreshold = 1e-12;

void fix_phases(CMatrix& vecs) {
  for (Index c = 0; c < vecs.cols(); ++c) {
    for (Index r = 0; r < vecs.rows(); ++r) {
      const double mag = std::abs(vecs(r, c));
      if (mag > kPhaseThreshold) {
        vecs.col(c) *= std::conj(vecs(r, c)) / mag;
        vecs(r, c) = complex(mag, 0.0);
        break;
      }
    }
  }
}

double max_abs_entry(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol_hermitian) {
  check_hermitian(m, tol_hermitian);
  mat_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimMismatch, "matrix is not square");
  }
  return HermitianMatrix(Unchecked{}, 0.5 * (m + m.adjoint()));
}

HermitianMatrix HermitianMatrix::zero(Index dim) { return HermitianMatrix(Unchecked{}, CMatrix::Zero(dim, dim)); }

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(Unchecked{}, CMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& diag) {
  return HermitianMatrix(Unchecked{}, diag.cast<complex>().asDiagonal().toDenseMatrix());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  if (dim() != other.dim()) throw Error(ErrorKind::DimMismatch, "operator+");
  return HermitianMatrix(Unchecked{}, mat_ + other.mat_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  if (dim() != other.dim()) throw Error(ErrorKind::DimMismatch, "operator-");
  return HermitianMatrix(Unchecked{}, mat_ - other.mat_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(Unchecked{}, mat_ * s); }

HermitianMatrix HermitianMatrix::congruence(const CMatrix& x) const {
  if (x.cols() != dim()) throw Error(ErrorKind::DimMismatch, "congruence");
  return hermitian_part(x * mat_ * x.adjoint());
}

void check_hermitian(const CMatrix& m, double tol_hermitian) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimMismatch, "matrix is not square");
  }
  if (m.rows() < 1) {
    throw Error(ErrorKind::DimMismatch, "matrix has dimension 0");
  }
  const double bound = tol_hermitian * (1.0 + max_abs_entry(m));
  double worst = 0.0;
  Index wi = 0, wj = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i; j < m.cols(); ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > worst || !std::isfinite(d)) {
        worst = std::isfinite(d) ? d : std::numeric_limits<double>::infinity();
        wi = i;
        wj = j;
      }
    }
  }
  if (!(worst <= bound)) {
    std::ostringstream os;
    os << "entry (" << wi << "," << wj << ") differs from conj of entry (" << wj << "," << wi << ") by " << worst;
    throw Error(ErrorKind::NonHermitian, os.str());
  }
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition eig_hermitian(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "eigensolver did not converge");
  }
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(out.eigenvectors);
  return out;
}

SpectralDecomposition eig_hermitian(const CMatrix& a, const ToleranceConfig& tol) {
  return eig_hermitian(HermitianMatrix(a, tol.hermitian));
}

SpectralDecomposition psd_spectrum(const HermitianMatrix& a, const ToleranceConfig& tol) {
  SpectralDecomposition spec = eig_hermitian(a);
  const double lmax = spec.lambda_max();
  if (lmax <= 0.0) {
    if (spec.lambda_min() < 0.0) {
      throw Error(ErrorKind::NotPSD, "matrix has no positive eigenvalue");
    }
    spec.eigenvalues.setZero();
    return spec;
  }
  const double floor = -tol.psd_floor * lmax;
  const double cutoff = tol.rank_rel * lmax;
  for (Index k = 0; k < spec.dim(); ++k) {
    double& lam = spec.eigenvalues(k);
    if (lam < floor) {
      std::ostringstream os;
      os << "eigenvalue " << lam << " below admissible floor " << floor;
      throw Error(ErrorKind::NotPSD, os.str());
    }
    if (lam <= cutoff) lam = 0.0;
  }
  return spec;
}

HermitianMatrix spectral_apply(const SpectralDecomposition& spec, const std::function<double(double)>& f) {
  RVector fl(spec.dim());
  for (Index k = 0; k < spec.dim(); ++k) fl(k) = f(spec.eigenvalues(k));
  return HermitianMatrix::hermitian_part(spec.eigenvectors * fl.cast<complex>().asDiagonal() *
                                         spec.eigenvectors.adjoint());
}

bool is_psd(const HermitianMatrix& a, const ToleranceConfig& tol) {
  try {
    psd_spectrum(a, tol);
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotPSD) return false;
    throw;
  }
}

bool is_strictly_positive(const HermitianMatrix& a, const ToleranceConfig& tol) {
  const SpectralDecomposition spec = eig_hermitian(a);
  const double lmax = spec.lambda_max();
  return lmax > 0.0 && spec.lambda_min() > tol.rank_rel * lmax;
}

Index numerical_rank(const HermitianMatrix& a, const ToleranceConfig& tol) {
  const SpectralDecomposition spec = psd_spectrum(a, tol);
  return (spec.eigenvalues.array() > 0.0).count();
}

namespace {

CMatrix select_columns(const SpectralDecomposition& spec, bool support) {
  Index count = 0;
  for (Index k = 0; k < spec.dim(); ++k) count += ((spec.eigenvalues(k) > 0.0) == support);
  CMatrix out(spec.dim(), count);
  Index c = 0;
  for (Index k = 0; k < spec.dim(); ++k) {
    if ((spec.eigenvalues(k) > 0.0) == support) out.col(c++) = spec.eigenvectors.col(k);
  }
  return out;
}

}  // namespace

CMatrix support_basis(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return select_columns(psd_spectrum(a, tol), true);
}

CMatrix kernel_basis(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return select_columns(psd_spectrum(a, tol), false);
}

HermitianMatrix support_projector(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return spectral_apply(psd_spectrum(a, tol), [](double l) { return l > 0.0 ? 1.0 : 0.0; });
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return spectral_apply(psd_spectrum(a, tol), [](double l) { return std::sqrt(l); });
}

HermitianMatrix psd_pinv(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return spectral_apply(psd_spectrum(a, tol), [](double l) { return l > 0.0 ? 1.0 / l : 0.0; });
}

HermitianMatrix psd_log_on_support(const HermitianMatrix& a, const ToleranceConfig& tol) {
  return spectral_apply(psd_spectrum(a, tol), [](double l) { return l > 0.0 ? std::log(l) : 0.0; });
}

HermitianMatrix herm_exp(const HermitianMatrix& a) {
  return spectral_apply(eig_hermitian(a), [](double l) { return std::exp(l); });
}

CMatrix expi(const HermitianMatrix& a, double t) {
  const SpectralDecomposition spec = eig_hermitian(a);
  CVector phase(spec.dim());
  for (Index k = 0; k < spec.dim(); ++k) phase(k) = std::polar(1.0, t * spec.eigenvalues(k));
  return spec.eigenvectors * phase.asDiagonal() * spec.eigenvectors.adjoint();
}

HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b, const ToleranceConfig& tol) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "geometric_mean");
  if (!is_strictly_positive(a, tol) || !is_strictly_positive(b, tol)) {
    throw Error(ErrorKind::NotStrictlyPositive, "geometric_mean needs strictly positive arguments");
  }
  const SpectralDecomposition sa = eig_hermitian(a);
  const HermitianMatrix a_half = spectral_apply(sa, [](double l) { return std::sqrt(l); });
  const HermitianMatrix a_inv_half = spectral_apply(sa, [](double l) { return 1.0 / std::sqrt(l); });
  const HermitianMatrix inner = b.congruence(a_inv_half.mat());
  const HermitianMatrix inner_sqrt = psd_sqrt(inner, tol);
  return inner_sqrt.congruence(a_half.mat());
}

complex trace_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) throw Error(ErrorKind::DimMismatch, "trace_inner");
  return (a.transpose().array() * b.array()).sum();
}

complex trace_inner(const HermitianMatrix& a, const HermitianMatrix& b) { return trace_inner(a.mat(), b.mat()); }

double rel_frobenius_diff(const CMatrix& a, const CMatrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

}  // namespace qleb
