#include "qleb/presets.hpp"

#include <cmath>

namespace qleb::presets {

namespace {

constexpr complex I1(0.0, 1.0);

HermitianMatrix real2(double a, double b, double c) {
  CMatrix m(2, 2);
  m << a, b, b, c;
  return HermitianMatrix(m);
}

std::vector<long long> default_grid(long long horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  return log_grid(1, horizon, 10);
}

// tanh x / x
double spin_a(double x) {
  if (x < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
  }
  return std::tanh(x) / x;
}

// a'(x) / x
double spin_da_over_x(double x) {
  if (x < 1e-3) {
    const double x2 = x * x;
    return -2.0 / 3.0 + 8.0 * x2 / 15.0 - 34.0 * x2 * x2 / 105.0;
  }
  const double s = 1.0 / std::cosh(x);
  return (x * s * s - std::tanh(x)) / (x * x * x);
}

// b'(x) / x with b = sech
double spin_db_over_x(double x) {
  if (x < 1e-3) {
    const double x2 = x * x;
    return -1.0 + 5.0 * x2 / 6.0 - 61.0 * x2 * x2 / 120.0;
  }
  return -std::tanh(x) / (std::cosh(x) * x);
}

void require_two(const RVector& theta) {
  if (theta.size() != 2) throw Error(ErrorKind::DimMismatch, "spin models take two parameters");
}

}  // namespace

HermitianMatrix pauli(int k) {
  CMatrix m(2, 2);
  switch (k) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I1, I1, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error(ErrorKind::InvalidArgument, "Pauli index must be 1, 2 or 3");
  }
  return HermitianMatrix(m);
}

StatePair pseudo_likelihood_pair(long long n, const ToleranceConfig& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  const double nd = static_cast<double>(n);
  const double n3 = 2.0 * nd * nd * nd;
  const double d = 2.0 * (nd * nd + nd + 1.0);
  return {DensityMatrix(real2((n3 - 1.0) / n3, 0.0, 1.0 / n3), tol),
          DensityMatrix(real2(nd * nd / d, (nd * nd + 1.0) / d, (nd * nd + 2.0 * nd + 2.0) / d), tol)};
}

StatePair pseudo_likelihood_limits(const ToleranceConfig& tol) {
  return {DensityMatrix(real2(1.0, 0.0, 0.0), tol), DensityMatrix(real2(0.5, 0.5, 0.5), tol)};
}

HermitianMatrix pseudo_likelihood_ratio(long long n) {
  const double nd = static_cast<double>(n);
  const double c = nd / std::sqrt(2.0 * (nd * nd + nd + 1.0));
  return real2(c, c, c * (2.0 * nd + 1.0));
}

HermitianMatrix pseudo_likelihood_modified(long long n) {
  const double nd = static_cast<double>(n);
  const double c = nd / std::sqrt(2.0 * (nd * nd + nd + 1.0));
  return real2(c, c, c);
}

StateSequence pseudo_likelihood_sequence(long long horizon, const ToleranceConfig& tol) {
  return {[tol](long long n) { return pseudo_likelihood_pair(n, tol); }, pseudo_likelihood_limits(tol), horizon,
          default_grid(horizon)};
}

StatePair orthogonal_limit_pair(long long n, const ToleranceConfig& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  const double nd = static_cast<double>(n);
  const double d = 1.0 + nd * nd;
  return {DensityMatrix(real2(1.0, 0.0, 0.0), tol), DensityMatrix(real2(1.0 / d, nd / d, nd * nd / d), tol)};
}

StatePair orthogonal_limit_limits(const ToleranceConfig& tol) {
  return {DensityMatrix(real2(1.0, 0.0, 0.0), tol), DensityMatrix(real2(0.0, 0.0, 1.0), tol)};
}

StateSequence orthogonal_limit_sequence(long long horizon, const ToleranceConfig& tol) {
  return {[tol](long long n) { return orthogonal_limit_pair(n, tol); }, orthogonal_limit_limits(tol), horizon,
          default_grid(horizon)};
}

BlockSet three_block_blocks(long long n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  const double nd = static_cast<double>(n);
  const Index k = static_cast<Index>(n);
  const double n3 = 4.0 * nd * nd * nd;
  const double c = 1.0 / ((nd + 1.0) * (nd + 1.0) * (nd + 1.0));
  const double s = (1.0 - 1.0 / (2.0 * nd)) / (2.0 * (nd * nd + nd + 1.0));

  BlockSet b;
  b.rho0 = CMatrix::Zero(2, 2);
  b.rho0(0, 0) = (2.0 * nd * nd * nd - 1.0) / n3;
  b.rho0(1, 1) = 1.0 / n3;
  b.rho1 = CMatrix::Constant(k, 2, c);
  b.rho2 = CMatrix::Identity(k, k) * (1.0 / (2.0 * nd));
  b.sigma0 = CMatrix(2, 2);
  b.sigma0 << s * nd * nd, s * (nd * nd + 1.0), s * (nd * nd + 1.0), s * (nd * nd + 2.0 * nd + 2.0);
  b.sigma1 = CMatrix::Constant(2, k, c);
  b.sigma2 = CMatrix::Identity(k, k) * (1.0 / (2.0 * nd * nd));
  return b;
}

StatePair three_block_states(long long n, const ToleranceConfig& tol) {
  const BlockSet b = three_block_blocks(n);
  const Index k = static_cast<Index>(n), d = 2 * k + 2;
  CMatrix rho = CMatrix::Zero(d, d), sigma = CMatrix::Zero(d, d);
  rho.block(0, 0, k, k) = b.rho2;
  rho.block(0, k, k, 2) = b.rho1;
  rho.block(k, 0, 2, k) = b.rho1.adjoint();
  rho.block(k, k, 2, 2) = b.rho0;
  sigma.block(k, k, 2, 2) = b.sigma0;
  sigma.block(k, k + 2, 2, k) = b.sigma1;
  sigma.block(k + 2, k, k, 2) = b.sigma1.adjoint();
  sigma.block(k + 2, k + 2, k, k) = b.sigma2;
  return {DensityMatrix(rho, tol), DensityMatrix(sigma, tol)};
}

BlockSequence three_block_sequence(long long horizon, const ToleranceConfig& tol) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  BlockSequence seq;
  seq.blocks = three_block_blocks;
  seq.grid = log_grid(1, horizon, 5);
  seq.inner = InnerCriterion::Limit;
  seq.inner_limits = pseudo_likelihood_limits(tol);
  return seq;
}

StatePair qubit_factor(double t, const ToleranceConfig& tol) {
  if (!(t >= 1.0)) throw Error(ErrorKind::InvalidArgument, "qubit family parameter must be at least 1");
  const double d = 4.0 * t * t + 2.0;
  return {DensityMatrix(real2(0.5, 0.0, 0.5), tol),
          DensityMatrix(real2((2.0 * t * t + 2.0 * t + 1.0) / d, 2.0 * t / d, (2.0 * t * t - 2.0 * t + 1.0) / d), tol)};
}

double qubit_summand(double t) {
  const double x = 2.0 * t * t / (2.0 * t * t + 1.0);
  return 1.0 / ((2.0 * t * t + 1.0) * (1.0 + std::sqrt(x)));
}

ProductFamily qubit_product_linear(const ToleranceConfig& tol) {
  return {[tol](long long i) { return qubit_factor(static_cast<double>(i), tol); },
          SeriesClosedForm{[](long long i) { return qubit_summand(static_cast<double>(i)); }, true}};
}

ProductFamily qubit_product_sqrt(const ToleranceConfig& tol) {
  return {[tol](long long i) { return qubit_factor(std::sqrt(static_cast<double>(i)), tol); },
          SeriesClosedForm{[](long long i) { return qubit_summand(std::sqrt(static_cast<double>(i))); }, false}};
}

HermitianMatrix spin_state_matrix(const RVector& theta) {
  require_two(theta);
  const double x = theta.norm();
  const double a = spin_a(x), b = 1.0 / std::cosh(x);
  const CMatrix m = 0.5 * (CMatrix::Identity(2, 2) + a * theta(0) * pauli(1).mat() + a * theta(1) * pauli(2).mat() +
                           b * pauli(3).mat());
  return HermitianMatrix::hermitian_part(m);
}

HermitianMatrix spin_state_derivative(const RVector& theta, Index i) {
  require_two(theta);
  if (i < 0 || i > 1) throw Error(ErrorKind::InvalidArgument, "spin parameter index must be 0 or 1");
  const double x = theta.norm();
  const CMatrix ts = theta(0) * pauli(1).mat() + theta(1) * pauli(2).mat();
  const CMatrix m = 0.5 * (spin_da_over_x(x) * theta(i) * ts + spin_a(x) * pauli(static_cast<int>(i) + 1).mat() +
                           spin_db_over_x(x) * theta(i) * pauli(3).mat());
  return HermitianMatrix::hermitian_part(m);
}

ParametricModel spin_pure_model(const ToleranceConfig& tol) {
  ParametricModel m;
  m.dim = 2;
  m.num_params = 2;
  m.state_at = [tol](const RVector& theta) { return DensityMatrix(spin_state_matrix(theta), tol); };
  m.deriv_at = spin_state_derivative;
  return m;
}

Perturbation cubic_perturbation() {
  return {"cubic", [](const RVector& t) { return std::pow(t.norm(), 3); },
          [](const RVector& t) -> RVector { return 3.0 * t.norm() * t; }};
}

Perturbation quadratic_perturbation() {
  return {"quadratic", [](const RVector& t) { return t.squaredNorm(); },
          [](const RVector& t) -> RVector { return 2.0 * t; }};
}

ParametricModel spin_perturbed_model(const Perturbation& p, const ToleranceConfig& tol) {
  const HermitianMatrix e2 = HermitianMatrix::diagonal(RVector::Unit(2, 1));
  ParametricModel m;
  m.dim = 2;
  m.num_params = 2;
  m.state_at = [p, e2, tol](const RVector& theta) {
    const double w = std::exp(-p.f(theta));
    return DensityMatrix(spin_state_matrix(theta) * w + e2 * (1.0 - w), tol);
  };
  m.deriv_at = [p, e2](const RVector& theta, Index i) {
    const double w = std::exp(-p.f(theta));
    const double df = p.grad(theta)(i);
    return (spin_state_derivative(theta, i) - spin_state_matrix(theta) * df) * w + e2 * (df * w);
  };
  return m;
}

double spin_overlap_closed_form(const RVector& h, OverlapScaling g, long long n) {
  const double nd = static_cast<double>(n);
  const double gn = g == OverlapScaling::SqrtN ? std::sqrt(nd) : std::pow(nd, 0.25);
  return std::pow(0.5 * (1.0 + 1.0 / std::cosh(h.norm() / gn)), nd);
}

PureSequence spin_overlap_sequence(const RVector& h, OverlapScaling g, long long horizon, const ToleranceConfig& tol) {
  require_two(h);
  auto site = [h, g, tol](long long n) {
    const double nd = static_cast<double>(n);
    const double gn = g == OverlapScaling::SqrtN ? std::sqrt(nd) : std::pow(nd, 0.25);
    const RVector zero = RVector::Zero(2);
    return StatePair{DensityMatrix(spin_state_matrix(zero), tol), DensityMatrix(spin_state_matrix(h / gn), tol)};
  };
  PureSequence seq = tensor_power_sequence(site, [](long long n) { return n; }, default_grid(horizon), tol);
  seq.trace_limit = 1.0;
  seq.overlap_limit = g == OverlapScaling::SqrtN ? std::exp(-h.squaredNorm() / 4.0) : 0.0;
  return seq;
}

std::vector<std::string> sequence_preset_names() {
  return {"example-4.1", "example-4.3", "sec-7.1", "sec-7.2-n", "sec-7.2-sqrt-n", "spin-overlap"};
}

std::vector<std::string> model_names() {
  return {"spin-pure", "spin-perturbed:f=cubic", "spin-perturbed:f=quadratic"};
}

ParametricModel model_by_name(const std::string& name, const ToleranceConfig& tol) {
  if (name == "spin-pure") return spin_pure_model(tol);
  if (name == "spin-perturbed:f=cubic" || name == "spin-perturbed") return spin_perturbed_model(cubic_perturbation(), tol);
  if (name == "spin-perturbed:f=quadratic") return spin_perturbed_model(quadratic_perturbation(), tol);
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
}

}  // namespace qleb::presets
