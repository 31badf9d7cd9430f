#include "qleb/lebesgue.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qleb {

DensityMatrix::DensityMatrix(const HermitianMatrix& m, const ToleranceConfig& tol, bool subnormalized, double trace_tol)
    : mat_(m), subnormalized_(subnormalized), trace_tol_(trace_tol) {
  psd_spectrum(mat_, tol);
  const double tr = mat_.trace();
  if (!(tr > 0.0)) {
    throw Error(ErrorKind::ZeroState, "state has zero trace");
  }
  if (subnormalized_) {
    if (tr > 1.0 + trace_tol_) {
      std::ostringstream os;
      os << "subnormalized state has trace " << tr << " > 1";
      throw Error(ErrorKind::NotNormalized, os.str());
    }
  } else if (std::abs(tr - 1.0) > trace_tol_) {
    std::ostringstream os;
    os << "trace " << tr << " differs from 1 by more than " << trace_tol_;
    throw Error(ErrorKind::NotNormalized, os.str());
  }
}

DensityMatrix::DensityMatrix(const CMatrix& m, const ToleranceConfig& tol, bool subnormalized, double trace_tol)
    : DensityMatrix(HermitianMatrix(m, tol.hermitian), tol, subnormalized, trace_tol) {}

namespace {

void require_nonzero(const HermitianMatrix& a, const char* name) {
  if (a.frobenius() == 0.0) {
    throw Error(ErrorKind::ZeroState, std::string(name) + " is the zero operator");
  }
}

struct Columns {
  CMatrix support;
  CMatrix kernel;
};

Columns split_columns(const SpectralDecomposition& spec) {
  Index r = 0;
  for (Index k = 0; k < spec.dim(); ++k) r += spec.eigenvalues(k) > 0.0;
  Columns out{CMatrix(spec.dim(), r), CMatrix(spec.dim(), spec.dim() - r)};
  Index s = 0, z = 0;
  for (Index k = 0; k < spec.dim(); ++k) {
    if (spec.eigenvalues(k) > 0.0) {
      out.support.col(s++) = spec.eigenvectors.col(k);
    } else {
      out.kernel.col(z++) = spec.eigenvectors.col(k);
    }
  }
  return out;
}

Columns rho_columns(const HermitianMatrix& rho, const ToleranceConfig& tol) {
  require_nonzero(rho, "rho");
  Columns cols = split_columns(psd_spectrum(rho, tol));
  if (cols.support.cols() == 0) {
    throw Error(ErrorKind::ZeroState, "rho has no eigenvalue above the rank cutoff");
  }
  return cols;
}

// rho0^-1/2 (rho0^1/2 sigma0 rho0^1/2)^1/2 rho0^-1/2
CMatrix geometric_mean_rho_side(const CMatrix& rho0, const CMatrix& sigma0) {
  const SpectralDecomposition sr = eig_hermitian(HermitianMatrix::hermitian_part(rho0));
  RVector half(sr.dim()), inv_half(sr.dim());
  for (Index k = 0; k < sr.dim(); ++k) {
    const double l = std::max(sr.eigenvalues(k), 0.0);
    half(k) = std::sqrt(l);
    inv_half(k) = l > 0.0 ? 1.0 / half(k) : 0.0;
  }
  const CMatrix& v = sr.eigenvectors;
  const CMatrix rh = v * half.cast<complex>().asDiagonal() * v.adjoint();
  const CMatrix rih = v * inv_half.cast<complex>().asDiagonal() * v.adjoint();
  const SpectralDecomposition sm = eig_hermitian(HermitianMatrix::hermitian_part(rh * sigma0 * rh));
  const HermitianMatrix msqrt = spectral_apply(sm, [](double l) { return std::sqrt(std::max(l, 0.0)); });
  return HermitianMatrix::hermitian_part(rih * msqrt.mat() * rih).mat();
}

double riccati_residual(const CMatrix& r0, const CMatrix& rho0, const CMatrix& sigma0) {
  return (sigma0 - r0 * rho0 * r0).norm() / std::max(sigma0.norm(), std::numeric_limits<double>::min());
}

// Newton steps on X rho0 X = sigma0. A step is kept only if it lowers the
// residual.
CMatrix polish_riccati(CMatrix r0, const CMatrix& rho0, const CMatrix& sigma0, int max_steps = 3) {
  double res = riccati_residual(r0, rho0, sigma0);
  for (int step = 0; step < max_steps && res > 0.0; ++step) {
    const SpectralDecomposition sr = eig_hermitian(HermitianMatrix::hermitian_part(r0));
    if (sr.lambda_min() <= 0.0) break;
    const HermitianMatrix rh = spectral_apply(sr, [](double l) { return std::sqrt(l); });
    const SpectralDecomposition sk = eig_hermitian(HermitianMatrix::hermitian_part(rh.mat() * rho0 * rh.mat()));
    const CMatrix w = rh.mat() * sk.eigenvectors;
    const CMatrix winv = sk.eigenvectors.adjoint() *
                         spectral_apply(sr, [](double l) { return 1.0 / std::sqrt(l); }).mat();
    const CMatrix c = sigma0 - r0 * rho0 * r0;
    CMatrix y = winv * c * winv.adjoint();
    for (Index i = 0; i < y.rows(); ++i) {
      for (Index j = 0; j < y.cols(); ++j) {
        y(i, j) /= sk.eigenvalues(i) + sk.eigenvalues(j);
      }
    }
    const CMatrix cand = HermitianMatrix::hermitian_part(r0 + w * y * w.adjoint()).mat();
    const double cand_res = riccati_residual(cand, rho0, sigma0);
    if (!(cand_res < res)) break;
    r0 = cand;
    res = cand_res;
  }
  return r0;
}

LebesgueDecomposition singular_decomposition(const HermitianMatrix& sigma, const Columns& cols) {
  const Index d = sigma.dim();
  return LebesgueDecomposition{HermitianMatrix::zero(d), sigma, HermitianMatrix::zero(d),
                               SupportSplit{cols.support, CMatrix(d, 0), cols.kernel}};
}

}  // namespace

HermitianMatrix excision(const HermitianMatrix& sigma, const HermitianMatrix& rho, const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "excision");
  const Columns cols = rho_columns(rho, tol);
  return HermitianMatrix::hermitian_part(cols.support.adjoint() * sigma.mat() * cols.support);
}

HermitianMatrix excision(const DensityMatrix& sigma, const DensityMatrix& rho, const ToleranceConfig& tol) {
  return excision(sigma.mat(), rho.mat(), tol);
}

bool is_singular(const HermitianMatrix& rho, const HermitianMatrix& sigma, const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "is_singular");
  require_nonzero(rho, "rho");
  require_nonzero(sigma, "sigma");
  const double overlap = trace_inner(rho, sigma).real();
  return overlap <= tol.eq_rel * rho.trace() * sigma.trace();
}

bool is_singular(const DensityMatrix& rho, const DensityMatrix& sigma, const ToleranceConfig& tol) {
  return is_singular(rho.mat(), sigma.mat(), tol);
}

bool is_abs_continuous(const HermitianMatrix& a, const HermitianMatrix& b, const ToleranceConfig& tol) {
  // a roundoff-only excision would pass the relative test against itself
  if (is_singular(a, b, tol)) return false;
  const HermitianMatrix e = excision(b, a, tol);
  return is_strictly_positive(e, tol);
}

bool is_abs_continuous(const DensityMatrix& a, const DensityMatrix& b, const ToleranceConfig& tol) {
  return is_abs_continuous(a.mat(), b.mat(), tol);
}

bool is_mutually_ac(const HermitianMatrix& rho, const HermitianMatrix& sigma, const ToleranceConfig& tol) {
  return is_abs_continuous(rho, sigma, tol) && is_abs_continuous(sigma, rho, tol);
}

bool is_mutually_ac(const DensityMatrix& rho, const DensityMatrix& sigma, const ToleranceConfig& tol) {
  return is_mutually_ac(rho.mat(), sigma.mat(), tol);
}

LebesgueDecomposition lebesgue_decompose(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                         const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "lebesgue_decompose");
  require_nonzero(sigma, "sigma");
  const Columns cols = rho_columns(rho, tol);
  if (is_singular(rho, sigma, tol)) return singular_decomposition(sigma, cols);

  const CMatrix& p = cols.support;
  const CMatrix& k = cols.kernel;
  const HermitianMatrix sig_e = HermitianMatrix::hermitian_part(p.adjoint() * sigma.mat() * p);
  const Columns inner = split_columns(psd_spectrum(sig_e, tol));
  if (inner.support.cols() == 0) return singular_decomposition(sigma, cols);

  // With H1 = 0 keep rho's eigenbasis so rho0 stays diagonal.
  const bool case1 = inner.kernel.cols() == 0;
  const CMatrix h1 = case1 ? CMatrix(p.rows(), 0) : CMatrix(p * inner.kernel);
  const CMatrix h2 = case1 ? p : CMatrix(p * inner.support);

  const CMatrix rho0 = HermitianMatrix::hermitian_part(h2.adjoint() * rho.mat() * h2).mat();
  const CMatrix sigma0 = HermitianMatrix::hermitian_part(h2.adjoint() * sigma.mat() * h2).mat();
  const CMatrix alpha = h2.adjoint() * sigma.mat() * k;
  const CMatrix beta = k.adjoint() * sigma.mat() * k;

  const CMatrix r0 = polish_riccati(geometric_mean_rho_side(rho0, sigma0), rho0, sigma0);

  const Eigen::LDLT<CMatrix> sigma0_ldlt(sigma0);
  const CMatrix f = sigma0_ldlt.solve(alpha);
  const CMatrix t = h2 + k * f.adjoint();

  return LebesgueDecomposition{
      HermitianMatrix::hermitian_part(t * sigma0 * t.adjoint()),
      HermitianMatrix::hermitian_part(k * (beta - alpha.adjoint() * f) * k.adjoint()),
      HermitianMatrix::hermitian_part(t * r0 * t.adjoint()),
      SupportSplit{h1, h2, k},
  };
}

LebesgueDecomposition lebesgue_decompose(const DensityMatrix& sigma, const DensityMatrix& rho,
                                         const ToleranceConfig& tol) {
  return lebesgue_decompose(sigma.mat(), rho.mat(), tol);
}

HermitianMatrix sqrt_likelihood_ratio(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                      const ToleranceConfig& tol) {
  return lebesgue_decompose(sigma, rho, tol).sqrt_lr;
}

HermitianMatrix sqrt_likelihood_ratio(const DensityMatrix& sigma, const DensityMatrix& rho,
                                      const ToleranceConfig& tol) {
  return sqrt_likelihood_ratio(sigma.mat(), rho.mat(), tol);
}

namespace {

// zero threshold for the spectrum of sqrt(sigma) rho sqrt(sigma): the usual
// relative cutoff, but never below the roundoff left by the congruence
double middle_cutoff(const SpectralDecomposition& spec, const HermitianMatrix& sigma, const HermitianMatrix& rho,
                     const ToleranceConfig& tol) {
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(sigma.dim()) *
                       sigma.frobenius() * rho.frobenius();
  return std::max(tol.rank_rel * spec.lambda_max(), noise);
}

}  // namespace

HermitianMatrix sqrt_lr_closed_form(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                    const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "sqrt_lr_closed_form");
  require_nonzero(sigma, "sigma");
  require_nonzero(rho, "rho");
  const HermitianMatrix s = psd_sqrt(sigma, tol);
  const SpectralDecomposition spec = eig_hermitian(rho.congruence(s.mat()));
  const double cut = middle_cutoff(spec, sigma, rho, tol);
  const HermitianMatrix mp = spectral_apply(spec, [cut](double l) { return l > cut ? 1.0 / std::sqrt(l) : 0.0; });
  return mp.congruence(s.mat());
}

double fidelity_affinity(const HermitianMatrix& sigma, const HermitianMatrix& rho, const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "fidelity_affinity");
  const HermitianMatrix s = psd_sqrt(sigma, tol);
  const SpectralDecomposition spec = eig_hermitian(rho.congruence(s.mat()));
  const double cut = middle_cutoff(spec, sigma, rho, tol);
  double acc = 0.0;
  for (Index k = 0; k < spec.dim(); ++k) {
    if (spec.eigenvalues(k) > cut) acc += std::sqrt(spec.eigenvalues(k));
  }
  return acc;
}

HermitianMatrix quantum_log_likelihood(const HermitianMatrix& sigma, const HermitianMatrix& rho,
                                       const ToleranceConfig& tol) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "quantum_log_likelihood");
  if (!is_strictly_positive(sigma, tol) || !is_strictly_positive(rho, tol)) {
    throw Error(ErrorKind::NotStrictlyPositive, "log-likelihood needs faithful states");
  }
  const CMatrix r = polish_riccati(geometric_mean_rho_side(rho.mat(), sigma.mat()), rho.mat(), sigma.mat());
  return spectral_apply(eig_hermitian(HermitianMatrix::hermitian_part(r)),
                        [](double l) { return 2.0 * std::log(l); });
}

}  // namespace qleb
