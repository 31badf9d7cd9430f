#include "qleb/qlan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qleb/kernels.hpp"

namespace qleb {

HermitianMatrix model_derivative(const ParametricModel& model, const RVector& theta, Index i) {
  if (i < 0 || i >= model.num_params || theta.size() != model.num_params) {
    throw Error(ErrorKind::InvalidArgument, "parameter index or theta length does not match the model");
  }
  if (model.deriv_at) return model.deriv_at(theta, i);
  if (!model.state_at) throw Error(ErrorKind::DerivativeUnavailable, "model has no state map");
  if (!(model.fd_step > 0.0)) throw Error(ErrorKind::DerivativeUnavailable, "finite-difference step must be positive");
  auto central = [&](double step) {
    RVector up = theta, down = theta;
    up(i) += step;
    down(i) -= step;
    return (model.state_at(up).mat() - model.state_at(down).mat()) * (0.5 / step);
  };
  try {
    const HermitianMatrix d1 = central(model.fd_step);
    const HermitianMatrix d2 = central(0.5 * model.fd_step);
    return (d2 * 4.0 - d1) * (1.0 / 3.0);
  } catch (const Error& e) {
    throw Error(ErrorKind::DerivativeUnavailable, std::string("finite differences failed: ") + e.what());
  }
}

SldResult sld_from_derivative(const HermitianMatrix& rho, const HermitianMatrix& drho, const ToleranceConfig& tol) {
  if (rho.dim() != drho.dim()) throw Error(ErrorKind::DimMismatch, "sld");
  const SpectralDecomposition spec = psd_spectrum(rho, tol);
  const CMatrix& v = spec.eigenvectors;
  const CMatrix d = v.adjoint() * drho.mat() * v;
  const Index n = spec.dim();
  CMatrix l = CMatrix::Zero(n, n);
  double leak = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double s = spec.eigenvalues(j) + spec.eigenvalues(k);
      if (s > 0.0) {
        l(j, k) = 2.0 * d(j, k) / s;
      } else {
        leak += std::norm(d(j, k));
      }
    }
  }
  leak = std::sqrt(leak);
  const HermitianMatrix lfull = HermitianMatrix::hermitian_part(v * l * v.adjoint());

  CMatrix res = v.adjoint() * (rho.mat() * lfull.mat() + lfull.mat() * rho.mat() - 2.0 * drho.mat()) * v;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      if (spec.eigenvalues(j) + spec.eigenvalues(k) <= 0.0) res(j, k) = 0.0;
    }
  }
  return SldResult{lfull, res.norm(), leak, leak > tol.eq_rel * (1.0 + drho.frobenius())};
}

SldResult sld(const ParametricModel& model, const RVector& theta0, Index i, const ToleranceConfig& tol) {
  const DensityMatrix rho = model.state_at(theta0);
  return sld_from_derivative(rho.mat(), model_derivative(model, theta0, i), tol);
}

CMatrix qfi_matrix(const HermitianMatrix& rho, const std::vector<HermitianMatrix>& slds, const ToleranceConfig& tol) {
  const auto d = static_cast<Index>(slds.size());
  for (Index i = 0; i < d; ++i) {
    if (slds[i].dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "qfi_matrix");
    const double c = std::abs(trace_inner(rho, slds[i]));
    if (c > tol.eq_rel * (1.0 + slds[i].frobenius())) {
      std::ostringstream os;
      os << "Tr rho L_" << i << " = " << c << " is not zero";
      throw Error(ErrorKind::CenteringViolated, os.str());
    }
  }
  CMatrix j(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) j(a, b) = trace_inner(rho.mat(), slds[b].mat() * slds[a].mat());
  }
  return 0.5 * (j + j.adjoint());
}

complex quasi_characteristic(const HermitianMatrix& rho, const std::vector<HermitianMatrix>& obs,
                             const std::vector<RVector>& xis) {
  CMatrix prod = CMatrix::Identity(rho.dim(), rho.dim());
  for (const RVector& xi : xis) {
    if (xi.size() != static_cast<Index>(obs.size())) {
      throw Error(ErrorKind::DimMismatch, "query length differs from the number of observables");
    }
    HermitianMatrix gen = HermitianMatrix::zero(rho.dim());
    for (std::size_t k = 0; k < obs.size(); ++k) {
      if (obs[k].dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "observable dimension");
      gen = gen + obs[k] * xi(static_cast<Index>(k));
    }
    prod = prod * expi(gen);
  }
  return trace_inner(rho.mat(), prod);
}

complex int_power(complex z, long long n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative power");
  complex acc = 1.0;
  while (n > 0) {
    if (n & 1) acc *= z;
    z *= z;
    n >>= 1;
  }
  return acc;
}

complex iid_qcf(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs, const std::vector<RVector>& xis,
                long long n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "number of copies must be positive");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<RVector> scaled;
  scaled.reserve(xis.size());
  for (const RVector& xi : xis) scaled.push_back(xi * scale);
  return int_power(quasi_characteristic(base, obs, scaled), n);
}

complex iid_qcf(const IIDExperiment& exp, const std::vector<RVector>& xis) {
  return iid_qcf(exp.base.mat(), exp.obs, xis, exp.n);
}

LeCamReport lecam3_numeric_check(const ParametricModel& model, const RVector& theta0,
                                 const std::vector<HermitianMatrix>& obs, const RVector& h,
                                 const std::vector<long long>& n_grid, const std::vector<std::vector<RVector>>& xi_grid,
                                 const ToleranceConfig& tol) {
  if (h.size() != model.num_params) throw Error(ErrorKind::DimMismatch, "shift length differs from the parameter count");
  const DensityMatrix rho0 = model.state_at(theta0);
  std::vector<HermitianMatrix> slds;
  for (Index i = 0; i < model.num_params; ++i) slds.push_back(sld(model, theta0, i, tol).L);
  const std::vector<HermitianMatrix>& b = obs.empty() ? slds : obs;

  const auto db = static_cast<Index>(b.size());
  const Index d = model.num_params;
  CMatrix sigma(db, db), tau(db, d);
  for (Index i = 0; i < db; ++i) {
    for (Index j = 0; j < db; ++j) sigma(i, j) = trace_inner(rho0.mat().mat(), b[j].mat() * b[i].mat());
    for (Index j = 0; j < d; ++j) tau(i, j) = trace_inner(rho0.mat().mat(), slds[j].mat() * b[i].mat());
  }
  sigma = 0.5 * (sigma + sigma.adjoint());

  LeCamReport rep{GaussianParams{tau.real() * h, sigma}, sigma, tau, {}, true};
  std::vector<complex> expected;
  for (const auto& q : xi_grid) {
    QcfQuery cq;
    for (const RVector& xi : q) cq.push_back(xi.cast<complex>());
    expected.push_back(gaussian_qcf(rep.target, cq, tol));
  }
  for (long long n : n_grid) {
    const RVector theta = theta0 + h / std::sqrt(static_cast<double>(n));
    const DensityMatrix rho_n = model.state_at(theta);
    const std::vector<complex> vals = kernels::iid_qcf_batch(rho_n.mat(), b, xi_grid, n);
    double worst = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) worst = std::max(worst, std::abs(vals[k] - expected[k]));
    if (!rep.rows.empty() && !(worst < rep.rows.back().max_deviation)) rep.decreasing = false;
    rep.rows.push_back({n, worst});
  }
  return rep;
}

namespace {

std::vector<RVector> expansion_directions(Index d) {
  std::vector<RVector> dirs;
  for (Index i = 0; i < d; ++i) dirs.push_back(RVector::Unit(d, i));
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      dirs.push_back((RVector::Unit(d, i) + RVector::Unit(d, j)) / std::sqrt(2.0));
      dirs.push_back((RVector::Unit(d, i) - RVector::Unit(d, j)) / std::sqrt(2.0));
    }
  }
  return dirs;
}

// slope of log|y| against log x over points with |y| above the floor
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(std::abs(y[k]) > floor)) continue;
    const double lx = std::log(x[k]), ly = std::log(std::abs(y[k]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double var = sxx - sx * sx / count;
  if (!(var > 0.0)) return std::nullopt;
  return (sxy - sx * sy / count) / var;
}

}  // namespace

ExpansionReport sqrt_expansion_check(const ParametricModel& model, const RVector& theta0,
                                     const std::vector<double>& scales, double fit_scale,
                                     const ToleranceConfig& tol, const VersionHook& version) {
  const Index d = model.num_params;
  const DensityMatrix rho0 = model.state_at(theta0);
  std::vector<HermitianMatrix> slds;
  for (Index i = 0; i < d; ++i) slds.push_back(sld(model, theta0, i, tol).L);

  ExpansionReport rep;
  rep.J = qfi_matrix(rho0.mat(), slds, tol);
  rep.expected = -0.125 * rep.J.real();

  auto evaluate = [&](const RVector& hvec) {
    const DensityMatrix sigma = model.state_at(theta0 + hvec);
    const HermitianMatrix r = version ? version(sigma.mat(), rho0.mat()) : sqrt_likelihood_ratio(sigma, rho0, tol);
    const double tr_r = trace_inner(rho0.mat(), r).real();
    const double tr_r2 = trace_inner(rho0.mat().mat(), r.mat() * r.mat()).real();
    return std::pair<double, double>{tr_r - 1.0, 1.0 - tr_r2};
  };

  const std::vector<RVector> dirs = expansion_directions(d);
  for (double s : scales) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const RVector hvec = dirs[k] * s;
      const auto [b, deficit] = evaluate(hvec);
      rep.rows.push_back({s, static_cast<Index>(k), b, hvec.dot(rep.expected * hvec), deficit});
    }
  }

  // least squares for the symmetric Q at the fit scale
  const Index unknowns = d * (d + 1) / 2;
  RMatrix a(static_cast<Index>(dirs.size()), unknowns);
  RVector y(static_cast<Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const RVector hvec = dirs[k] * fit_scale;
    Index c = 0;
    for (Index i = 0; i < d; ++i) {
      for (Index j = i; j < d; ++j) a(static_cast<Index>(k), c++) = (i == j ? 1.0 : 2.0) * hvec(i) * hvec(j);
    }
    y(static_cast<Index>(k)) = evaluate(hvec).first;
  }
  const RVector q = a.colPivHouseholderQr().solve(y);
  rep.fitted = RMatrix(d, d);
  Index c = 0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) rep.fitted(i, j) = rep.fitted(j, i) = q(c++);
  }
  rep.coeff_max_abs_err = (rep.fitted - rep.expected).cwiseAbs().maxCoeff();
  const double scale = std::max(rep.expected.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  rep.coeff_rel_err = rep.coeff_max_abs_err / scale;

  constexpr double floor = 1e-14;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    std::vector<double> xs, res, def;
    for (const ExpansionRow& row : rep.rows) {
      if (row.direction != static_cast<Index>(k)) continue;
      xs.push_back(row.scale);
      res.push_back(row.tr_rho_b - row.quadratic);
      def.push_back(row.trace_deficit);
    }
    const auto ro = loglog_slope(xs, res, floor);
    if (ro && (!rep.residual_order || *ro < *rep.residual_order)) rep.residual_order = ro;
    const auto dord = loglog_slope(xs, def, floor);
    if (dord && (!rep.deficit_order || *dord < *rep.deficit_order)) rep.deficit_order = dord;
  }
  return rep;
}

RateScanReport rate_scan(const RateScan& scan) {
  if (scan.grid.empty()) throw Error(ErrorKind::InvalidArgument, "rate scan grid is empty");
  RateScanReport rep;
  for (long long n : scan.grid) {
    const double gn = scan.g(static_cast<double>(n));
    if (!(gn > 0.0)) throw Error(ErrorKind::InvalidArgument, "g(n) must be positive");
    const double nd = static_cast<double>(n);
    rep.rows.push_back({n, nd * scan.f(scan.h / gn), nd / (gn * gn)});
  }
  const std::size_t count = rep.rows.size();
  const std::size_t take = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(count * 0.25)));
  const std::size_t start = count > take ? count - take : 0;

  auto slack = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
  bool first_nonincreasing = true, first_nondecreasing = true, ratio_increasing = true;
  double first_min = rep.rows[start].n_f, ratio_max = rep.rows[start].ratio;
  for (std::size_t k = start; k < count; ++k) {
    first_min = std::min(first_min, rep.rows[k].n_f);
    ratio_max = std::max(ratio_max, rep.rows[k].ratio);
    if (k == start) continue;
    const RateRow &a = rep.rows[k - 1], &b = rep.rows[k];
    if (b.n_f > a.n_f + slack(a.n_f)) first_nonincreasing = false;
    if (b.n_f < a.n_f - slack(a.n_f)) first_nondecreasing = false;
    if (!(b.ratio > a.ratio)) ratio_increasing = false;
  }
  const RateRow& last = rep.rows.back();
  rep.first_to_zero = last.n_f <= scan.eps && first_nonincreasing;
  rep.first_stays_away = first_min > scan.eps && first_nondecreasing;
  rep.ratio_bounded = ratio_max <= scan.ratio_bound;
  rep.ratio_unbounded = ratio_increasing && last.ratio > scan.ratio_bound;

  if (rep.first_to_zero && rep.ratio_bounded) {
    rep.verdict = Verdict::Contiguous;
    rep.notes = "n f(h/g(n)) tends to zero and n/g(n)^2 stays bounded";
  } else if (rep.first_stays_away || rep.ratio_unbounded) {
    rep.verdict = Verdict::NotContiguous;
    rep.notes = rep.first_stays_away ? "n f(h/g(n)) stays away from zero" : "n/g(n)^2 grows past the declared bound";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "trends over the tail of the grid are ambiguous";
  }
  return rep;
}

}  // namespace qleb
