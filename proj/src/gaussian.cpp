#include "qleb/gaussian.hpp"

#include <cmath>
#include <sstream>

namespace qleb {

namespace {

bool hermitian_psd(const CMatrix& m, const ToleranceConfig& tol) {
  if (m.rows() != m.cols() || m.rows() < 1 || !m.allFinite()) return false;
  try {
    check_hermitian(m, tol.hermitian);
    return is_psd(HermitianMatrix::hermitian_part(m), tol);
  } catch (const Error&) {
    return false;
  }
}

void require_valid(const GaussianParams& p, const ToleranceConfig& tol) {
  if (!validate(p, tol)) throw Error(ErrorKind::InvalidParams, "Gaussian parameters are not a valid (h, J) pair");
}

void require_valid(const ExtendedGaussianParams& e, const ToleranceConfig& tol) {
  if (!validate(e, tol)) {
    throw Error(ErrorKind::InvalidParams, "extended Gaussian parameters: joint covariance is not Hermitian PSD");
  }
}

}  // namespace

CMatrix ExtendedGaussianParams::joint_covariance() const {
  const Index d = dim();
  CMatrix m(d + 1, d + 1);
  m.topLeftCorner(d, d) = Sigma;
  m.topRightCorner(d, 1) = kappa;
  m.bottomLeftCorner(1, d) = kappa.adjoint();
  m(d, d) = s2;
  return m;
}

bool validate(const GaussianParams& params, const ToleranceConfig& tol) {
  if (params.h.size() < 1 || params.J.rows() != params.h.size() || params.J.cols() != params.h.size()) return false;
  if (!params.h.allFinite()) return false;
  return hermitian_psd(params.J, tol);
}

bool validate(const ExtendedGaussianParams& ext, const ToleranceConfig& tol) {
  const Index d = ext.dim();
  if (d < 1 || ext.Sigma.rows() != d || ext.Sigma.cols() != d || ext.kappa.size() != d) return false;
  if (!ext.mu.allFinite() || !std::isfinite(ext.s2) || ext.s2 < 0.0) return false;
  return hermitian_psd(ext.joint_covariance(), tol);
}

complex gaussian_qcf(const GaussianParams& params, const QcfQuery& q, const ToleranceConfig& tol) {
  require_valid(params, tol);
  const Index d = params.dim();
  for (const CVector& xi : q) {
    if (xi.size() != d) throw Error(ErrorKind::DimMismatch, "query vector length differs from the number of modes");
  }
  const CVector h = params.h.cast<complex>();
  const complex i1(0.0, 1.0);
  complex expo = 0.0;
  // running sum of earlier vectors: sum_{t<u} xi_u^T J xi_t = xi_u^T J (sum_{t<u} xi_t)
  CVector earlier = CVector::Zero(d);
  for (const CVector& xi : q) {
    const CVector jxi = params.J * xi;
    expo += i1 * xi.cwiseProduct(h).sum();
    expo -= 0.5 * xi.cwiseProduct(jxi).sum();
    expo -= xi.cwiseProduct(params.J * earlier).sum();
    earlier += xi;
  }
  return std::exp(expo);
}

GaussianParams lecam_shift(const ExtendedGaussianParams& ext, const ToleranceConfig& tol) {
  require_valid(ext, tol);
  return GaussianParams{ext.mu + ext.kappa.real(), ext.Sigma};
}

complex sandwiched_gaussian_qcf(const ExtendedGaussianParams& ext, const QcfQuery& q, const ToleranceConfig& tol) {
  require_valid(ext, tol);
  const Index d = ext.dim();
  GaussianParams big{RVector(d + 1), ext.joint_covariance()};
  big.h.head(d) = ext.mu;
  big.h(d) = -0.5 * ext.s2;

  CVector end = CVector::Zero(d + 1);
  end(d) = complex(0.0, -0.5);
  QcfQuery bq;
  bq.reserve(q.size() + 2);
  bq.push_back(end);
  for (const CVector& xi : q) {
    if (xi.size() != d) throw Error(ErrorKind::DimMismatch, "query vector length differs from the number of modes");
    if (xi.imag().cwiseAbs().maxCoeff() != 0.0) {
      throw Error(ErrorKind::InvalidArgument, "sandwiched evaluation takes real query vectors");
    }
    CVector v = CVector::Zero(d + 1);
    v.head(d) = xi;
    bq.push_back(v);
  }
  bq.push_back(end);
  return gaussian_qcf(big, bq, tol);
}

}  // namespace qleb
