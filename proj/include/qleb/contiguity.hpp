#pragma once

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qleb/lebesgue.hpp"

namespace qleb {

enum class Verdict { Contiguous, NotContiguous, Inconclusive };
enum class Criterion { LimitCriterion, PureCriterion, Kakutani, BlockCriterion, DiagnosticsOnly };

const char* to_string(Verdict v);
const char* to_string(Criterion c);

struct EvidenceSample {
  long long n;
  std::string statistic;
  double value;
};

struct ContiguityReport {
  Verdict verdict = Verdict::Inconclusive;
  Criterion criterion_used = Criterion::DiagnosticsOnly;
  std::vector<EvidenceSample> evidence;
  // scalar summaries in insertion order (fitted exponents, horizon values, flags)
  std::vector<std::pair<std::string, double>> summary;
  std::string notes;

  std::optional<double> summary_value(const std::string& key) const;
};

struct StatePair {
  DensityMatrix rho;
  DensityMatrix sigma;
};

/// n -> (rho^(n), sigma^(n)) sampled on `grid`, optionally with declared
/// limiting states (rho^(inf), sigma^(inf)).
struct StateSequence {
  std::function<StatePair(long long)> eval;
  std::optional<StatePair> declared_limits;
  long long horizon = 0;
  std::vector<long long> grid;
};

/// Thresholds used when turning finite samples into verdicts.
struct CriterionThresholds {
  double trace_eps = 1e-3;          // |Tr rho R^2 - 1| at the horizon
  double overlap_eps = 1e-6;        // overlap must stay above this
  double limit_confirm = 5e-3;      // Frobenius distance to declared limits at the horizon
  double kakutani_margin = 0.15;    // around exponent 1
  double kakutani_floor = 1e-13;    // summands at or below count as zero
  double block_trace_floor = 1e-3;  // lower bound for Tr rho0 over the tail
  double block_sigma0_eps = 1e-3;   // |Tr sigma0 - 1| at the horizon
};

/// Roughly `per_decade` log-spaced integers in [first, last], both ends
/// included, strictly increasing.
std::vector<long long> log_grid(long long first, long long last, int per_decade = 10);

/// Tr rho R^2 P where P projects onto eigenvalues of R above M.
double tail_mass(const HermitianMatrix& rho, const HermitianMatrix& r, double m, const ToleranceConfig& tol);

/// Tr rho O^2.
double l2_norm_sq(const HermitianMatrix& rho, const HermitianMatrix& o);

/// Verdict from the limiting states: Contiguous iff sigma^(inf) << rho^(inf).
ContiguityReport limit_criterion(const StateSequence& seq, const ToleranceConfig& tol,
                                 const CriterionThresholds& th = {});

/// Pure-state statistics at one n.
struct PureStatistics {
  double trace_r2;  // Tr rho R^2
  double overlap;   // Tr rho sigma
};

/// Sampled statistics for the pure-state criterion. Either built from a
/// StateSequence (each rho checked for rank one) or from tensor powers of a
/// single-site pair, where both statistics are n-th powers.
struct PureSequence {
  std::function<PureStatistics(long long)> stats;
  std::vector<long long> grid;
  std::optional<double> trace_limit;
  std::optional<double> overlap_limit;
};

PureSequence pure_sequence(const StateSequence& seq, const ToleranceConfig& tol);

/// rho^(n) = rho_1(n)^{(x)copies(n)} and likewise sigma. Single-site states
/// must be pure.
PureSequence tensor_power_sequence(std::function<StatePair(long long)> single_site,
                                   std::function<long long(long long)> copies, std::vector<long long> grid,
                                   const ToleranceConfig& tol);

ContiguityReport pure_criterion(const PureSequence& seq, const CriterionThresholds& th = {});
ContiguityReport pure_criterion(const StateSequence& seq, const ToleranceConfig& tol,
                                const CriterionThresholds& th = {});

/// Analytic summand 1 - Tr rho_i R_i together with the user's classification
/// of the series.
struct SeriesClosedForm {
  std::function<double(long long)> summand;
  bool convergent;
};

struct ProductFamily {
  std::function<StatePair(long long)> factors;
  std::optional<SeriesClosedForm> closed_form;
};

ContiguityReport kakutani_criterion(const ProductFamily& fam, long long horizon, const ToleranceConfig& tol,
                                    const CriterionThresholds& th = {});

/// Decay exponent p of s_i ~ i^-p by least squares of log s_i on log i over
/// i in [first, last] with s_i above `floor`. Empty if fewer than two points.
std::optional<double> fit_decay_exponent(const std::vector<double>& s, long long first, long long last,
                                         double floor);

/// Blocks of rho and sigma relative to H1 (+) H2 (+) H3:
///   rho   = [[rho2, rho1, 0], [rho1*, rho0, 0], [0, 0, 0]]
///   sigma = [[0, 0, 0], [0, sigma0, sigma1], [0, sigma1*, sigma2]]
struct BlockSet {
  CMatrix rho0, rho1, rho2;
  CMatrix sigma0, sigma1, sigma2;
};

enum class InnerCriterion { Limit, Pure };

struct BlockSequence {
  std::function<StatePair(long long)> states;
  std::function<BlockSet(long long)> blocks;
  std::vector<long long> grid;
  InnerCriterion inner = InnerCriterion::Limit;
  // limits of the normalized inner pair (rho0/Tr rho0, sigma0/Tr sigma0)
  std::optional<StatePair> inner_limits;
  std::optional<double> inner_trace_limit;
  std::optional<double> inner_overlap_limit;
};

/// Reassembles the full states from blocks (throws BlocksInconsistent on
/// mismatch), checks the positivity and trace hypotheses and hands the
/// normalized inner pair to the limit or pure criterion. Never returns
/// NotContiguous: the hypotheses are only sufficient.
ContiguityReport block_criterion_diagnostics(const BlockSequence& seq, const ToleranceConfig& tol,
                                             const CriterionThresholds& th = {});

/// Tr rho R^2 and Tr rho sigma over the grid with no verdict.
ContiguityReport sequence_diagnostics(const StateSequence& seq, const ToleranceConfig& tol);

/// One (xi_t, eta_t) list, r <= 3 in practice.
struct DQuery {
  std::vector<double> xi;
  std::vector<double> eta;
};

struct DInfinitesimalRow {
  long long n;
  double max_deviation;
};

/// max over queries of |Tr rho prod e^{i(xi_t Z + eta_t O)} - Tr rho prod e^{i xi_t Z}|
/// for each n. A diagnostic only; the definition quantifies over every grid.
std::vector<DInfinitesimalRow> d_infinitesimal_diagnostic(
    const std::function<std::tuple<HermitianMatrix, HermitianMatrix, HermitianMatrix>(long long)>& rho_z_o,
    const std::vector<long long>& grid, const std::vector<DQuery>& queries);

}  // namespace qleb
