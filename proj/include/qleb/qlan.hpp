#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qleb/contiguity.hpp"
#include "qleb/gaussian.hpp"
#include "qleb/lebesgue.hpp"

namespace qleb {

/// theta -> rho_theta with optional analytic derivatives.
struct ParametricModel {
  Index dim = 0;
  Index num_params = 0;
  std::function<DensityMatrix(const RVector&)> state_at;
  std::function<HermitianMatrix(const RVector&, Index)> deriv_at;  // may be empty
  double fd_step = 1e-5;
};

/// d rho / d theta_i: analytic when supplied, otherwise central differences
/// with one Richardson step, (4 D(h/2) - D(h)) / 3.
HermitianMatrix model_derivative(const ParametricModel& model, const RVector& theta, Index i);

struct SldResult {
  HermitianMatrix L;
  double residual;    // ||rho L + L rho - 2 d rho||_F with the ker-ker block dropped
  double kernel_leak; // ||ker-ker block of d rho||_F, projected away
  bool inconsistent;  // kernel_leak above tolerance
};

/// Canonical SLD in rho's eigenbasis: L_jk = 2 drho_jk / (l_j + l_k), zero
/// where both eigenvalues vanish.
SldResult sld_from_derivative(const HermitianMatrix& rho, const HermitianMatrix& drho, const ToleranceConfig& tol);
SldResult sld(const ParametricModel& model, const RVector& theta0, Index i, const ToleranceConfig& tol);

/// J_ij = Tr rho L_j L_i. Throws CenteringViolated if some Tr rho L_i is
/// not zero.
CMatrix qfi_matrix(const HermitianMatrix& rho, const std::vector<HermitianMatrix>& slds, const ToleranceConfig& tol);

/// Tr rho prod_t exp(i xi_t . X).
complex quasi_characteristic(const HermitianMatrix& rho, const std::vector<HermitianMatrix>& obs,
                             const std::vector<RVector>& xis);

/// z^n by binary powering.
complex int_power(complex z, long long n);

struct IIDExperiment {
  DensityMatrix base;
  std::vector<HermitianMatrix> slds;
  std::vector<HermitianMatrix> obs;
  RVector h;
  long long n = 1;
};

/// (Tr base prod_t exp(i xi_t . B / sqrt n))^n, the quasi-CF of the collective
/// observables (1/sqrt n) sum_k B^(k) on base^{(x)n}.
complex iid_qcf(const IIDExperiment& exp, const std::vector<RVector>& xis);
complex iid_qcf(const HermitianMatrix& base, const std::vector<HermitianMatrix>& obs,
                const std::vector<RVector>& xis, long long n);

struct LeCamRow {
  long long n;
  double max_deviation;
};

struct LeCamReport {
  GaussianParams target;  // N((Re tau) h, Sigma)
  CMatrix Sigma;
  CMatrix tau;
  std::vector<LeCamRow> rows;
  bool decreasing;
};

/// Compares iid_qcf under rho_{theta0 + h/sqrt n} with the Gaussian limit on
/// every query, for every n. Empty `obs` means the SLDs at theta0.
LeCamReport lecam3_numeric_check(const ParametricModel& model, const RVector& theta0,
                                 const std::vector<HermitianMatrix>& obs, const RVector& h,
                                 const std::vector<long long>& n_grid, const std::vector<std::vector<RVector>>& xi_grid,
                                 const ToleranceConfig& tol);

struct ExpansionRow {
  double scale;
  Index direction;
  double tr_rho_b;        // Tr rho R_h - 1
  double quadratic;       // -(1/8) h^T (Re J) h
  double trace_deficit;   // 1 - Tr rho R_h^2
};

struct ExpansionReport {
  CMatrix J;
  RMatrix fitted;    // least-squares Q with Tr rho B(h) ~ h^T Q h at fit_scale
  RMatrix expected;  // -(1/8) Re J
  double coeff_max_abs_err;
  double coeff_rel_err;
  std::optional<double> residual_order;  // of Tr rho B(h) + (1/8) h^T Re J h
  std::optional<double> deficit_order;   // of 1 - Tr rho R_h^2
  std::vector<ExpansionRow> rows;
};

/// Optional replacement for the canonical R_h (the version is not unique on
/// singular models).
using VersionHook = std::function<HermitianMatrix(const HermitianMatrix& sigma, const HermitianMatrix& rho)>;

ExpansionReport sqrt_expansion_check(const ParametricModel& model, const RVector& theta0,
                                     const std::vector<double>& scales, double fit_scale,
                                     const ToleranceConfig& tol, const VersionHook& version = {});

struct RateScan {
  std::function<double(const RVector&)> f;
  std::function<double(double)> g;
  RVector h;
  std::vector<long long> grid;
  double eps = 1e-3;
  double ratio_bound = 100.0;
};

struct RateRow {
  long long n;
  double n_f;    // n f(h / g(n))
  double ratio;  // n / g(n)^2
};

struct RateScanReport {
  std::vector<RateRow> rows;
  bool first_to_zero;
  bool first_stays_away;
  bool ratio_bounded;
  bool ratio_unbounded;
  Verdict verdict;
  std::string notes;
};

RateScanReport rate_scan(const RateScan& scan);

}  // namespace qleb
