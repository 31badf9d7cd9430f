#include "qleb/contiguity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qleb/kernels.hpp"

namespace qleb {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Contiguous: return "Contiguous";
    case Verdict::NotContiguous: return "NotContiguous";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::LimitCriterion: return "LimitCriterion";
    case Criterion::PureCriterion: return "PureCriterion";
    case Criterion::Kakutani: return "Kakutani";
    case Criterion::BlockCriterion: return "BlockCriterion";
    case Criterion::DiagnosticsOnly: return "DiagnosticsOnly";
  }
  return "Unknown";
}

std::optional<double> ContiguityReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<long long> log_grid(long long first, long long last, int per_decade) {
  if (first < 1 || last < first || per_decade < 1) {
    throw Error(ErrorKind::InvalidArgument, "log_grid needs 1 <= first <= last");
  }
  std::set<long long> pts{first, last};
  const double lo = std::log10(static_cast<double>(first));
  const double hi = std::log10(static_cast<double>(last));
  const int steps = static_cast<int>(std::ceil((hi - lo) * per_decade));
  for (int k = 1; k < steps; ++k) {
    const double v = std::pow(10.0, lo + (hi - lo) * k / steps);
    pts.insert(std::clamp(static_cast<long long>(std::llround(v)), first, last));
  }
  return {pts.begin(), pts.end()};
}

double tail_mass(const HermitianMatrix& rho, const HermitianMatrix& r, double m, const ToleranceConfig& tol) {
  if (rho.dim() != r.dim()) throw Error(ErrorKind::DimMismatch, "tail_mass");
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "truncation level M must be positive");
  const SpectralDecomposition spec = psd_spectrum(r, tol);
  double acc = 0.0;
  for (Index k = 0; k < spec.dim(); ++k) {
    const double lam = spec.eigenvalues(k);
    if (lam > m) {
      const CVector v = spec.eigenvectors.col(k);
      acc += lam * lam * (v.adjoint() * rho.mat() * v)(0, 0).real();
    }
  }
  return std::max(acc, 0.0);
}

double l2_norm_sq(const HermitianMatrix& rho, const HermitianMatrix& o) {
  if (rho.dim() != o.dim()) throw Error(ErrorKind::DimMismatch, "l2_norm_sq");
  return std::max(trace_inner(rho.mat(), o.mat() * o.mat()).real(), 0.0);
}

namespace {

std::vector<long long> checked_grid(const std::vector<long long>& grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "sample grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 1 || (k > 0 && grid[k] <= grid[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "sample grid must be strictly increasing positive integers");
    }
  }
  return grid;
}

double trace_r2(const HermitianMatrix& rho, const HermitianMatrix& r) {
  return trace_inner(rho.mat(), r.mat() * r.mat()).real();
}

// last quarter of the samples (at least two)
std::size_t tail_start(std::size_t count, double fraction) {
  const auto take = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(count * fraction)));
  return count > take ? count - take : 0;
}

}  // namespace

ContiguityReport limit_criterion(const StateSequence& seq, const ToleranceConfig& tol, const CriterionThresholds& th) {
  if (!seq.declared_limits) {
    throw Error(ErrorKind::MissingLimits, "limit criterion needs declared limiting states");
  }
  const auto grid = checked_grid(seq.grid);
  const StatePair& lim = *seq.declared_limits;
  const Index d = lim.rho.dim();
  if (lim.sigma.dim() != d) throw Error(ErrorKind::DimMismatch, "declared limits differ in dimension");

  ContiguityReport rep;
  rep.criterion_used = Criterion::LimitCriterion;
  double rho_dist = 0.0, sigma_dist = 0.0;
  for (long long n : grid) {
    const StatePair p = seq.eval(n);
    if (p.rho.dim() != d || p.sigma.dim() != d) {
      std::ostringstream os;
      os << "dimension at n = " << n << " differs from the limits' dimension " << d;
      throw Error(ErrorKind::DimVaries, os.str());
    }
    rho_dist = (p.rho.mat().mat() - lim.rho.mat().mat()).norm();
    sigma_dist = (p.sigma.mat().mat() - lim.sigma.mat().mat()).norm();
    rep.evidence.push_back({n, "rho_limit_distance", rho_dist});
    rep.evidence.push_back({n, "sigma_limit_distance", sigma_dist});
  }
  const bool ac = is_abs_continuous(lim.sigma, lim.rho, tol);
  const bool confirmed = rho_dist <= th.limit_confirm && sigma_dist <= th.limit_confirm;
  rep.summary = {{"rho_limit_distance", rho_dist},
                 {"sigma_limit_distance", sigma_dist},
                 {"limits_confirmed", confirmed ? 1.0 : 0.0},
                 {"sigma_inf_ac_rho_inf", ac ? 1.0 : 0.0}};
  if (!confirmed) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "samples at the horizon are not within the confirmation distance of the declared limits";
  } else {
    rep.verdict = ac ? Verdict::Contiguous : Verdict::NotContiguous;
    rep.notes = ac ? "limiting sigma is absolutely continuous with respect to limiting rho"
                   : "limiting sigma is not absolutely continuous with respect to limiting rho";
  }
  return rep;
}

PureSequence pure_sequence(const StateSequence& seq, const ToleranceConfig& tol) {
  PureSequence out;
  out.grid = checked_grid(seq.grid);
  out.stats = [eval = seq.eval, tol](long long n) {
    const StatePair p = eval(n);
    if (numerical_rank(p.rho.mat(), tol) != 1) {
      std::ostringstream os;
      os << "rho at n = " << n << " is not rank one";
      throw Error(ErrorKind::NotPure, os.str());
    }
    const HermitianMatrix r = sqrt_likelihood_ratio(p.sigma, p.rho, tol);
    return PureStatistics{trace_r2(p.rho.mat(), r), trace_inner(p.rho.mat(), p.sigma.mat()).real()};
  };
  // Tr rho sigma is continuous in the states; Tr rho R^2 is not, so only the
  // overlap limit follows from declared limiting states.
  if (seq.declared_limits) {
    const StatePair& lim = *seq.declared_limits;
    out.overlap_limit = trace_inner(lim.rho.mat(), lim.sigma.mat()).real();
  }
  return out;
}

PureSequence tensor_power_sequence(std::function<StatePair(long long)> single_site,
                                   std::function<long long(long long)> copies, std::vector<long long> grid,
                                   const ToleranceConfig& tol) {
  PureSequence out;
  out.grid = checked_grid(grid);
  out.stats = [site = std::move(single_site), copies = std::move(copies), tol](long long n) {
    const StatePair p = site(n);
    if (numerical_rank(p.rho.mat(), tol) != 1) {
      std::ostringstream os;
      os << "single-site rho at n = " << n << " is not rank one";
      throw Error(ErrorKind::NotPure, os.str());
    }
    const long long k = copies(n);
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "copy count must be positive");
    const HermitianMatrix r = sqrt_likelihood_ratio(p.sigma, p.rho, tol);
    const double t1 = trace_r2(p.rho.mat(), r);
    const double o1 = trace_inner(p.rho.mat(), p.sigma.mat()).real();
    return PureStatistics{std::pow(t1, static_cast<double>(k)), std::pow(std::max(o1, 0.0), static_cast<double>(k))};
  };
  return out;
}

ContiguityReport pure_criterion(const PureSequence& seq, const CriterionThresholds& th) {
  const auto grid = checked_grid(seq.grid);
  ContiguityReport rep;
  rep.criterion_used = Criterion::PureCriterion;

  std::vector<PureStatistics> samples;
  samples.reserve(grid.size());
  for (long long n : grid) {
    samples.push_back(seq.stats(n));
    rep.evidence.push_back({n, "trace_rho_r2", samples.back().trace_r2});
    rep.evidence.push_back({n, "overlap", samples.back().overlap});
  }
  const PureStatistics& last = samples.back();
  double min_overlap = last.overlap;
  for (const auto& s : samples) min_overlap = std::min(min_overlap, s.overlap);

  bool monotone = true;
  for (std::size_t k = tail_start(samples.size(), 0.25) + 1; k < samples.size(); ++k) {
    if (std::abs(samples[k].trace_r2 - 1.0) > std::abs(samples[k - 1].trace_r2 - 1.0) + 1e-15) monotone = false;
  }
  const bool trace_at_horizon = std::abs(last.trace_r2 - 1.0) <= th.trace_eps;
  const bool trace_declared_one = seq.trace_limit && std::abs(*seq.trace_limit - 1.0) <= th.trace_eps;
  const bool trace_declared_off = seq.trace_limit && !trace_declared_one;
  const bool overlap_declared_zero = seq.overlap_limit && *seq.overlap_limit <= th.overlap_eps;

  rep.summary = {{"trace_rho_r2_at_horizon", last.trace_r2},
                 {"overlap_at_horizon", last.overlap},
                 {"min_overlap", min_overlap},
                 {"trace_tail_monotone", monotone ? 1.0 : 0.0}};
  if (seq.trace_limit) rep.summary.emplace_back("declared_trace_limit", *seq.trace_limit);
  if (seq.overlap_limit) rep.summary.emplace_back("declared_overlap_limit", *seq.overlap_limit);

  if (trace_declared_off) {
    rep.verdict = Verdict::NotContiguous;
    rep.notes = "declared limit of Tr rho R^2 differs from 1";
  } else if (overlap_declared_zero && last.overlap <= th.overlap_eps) {
    rep.verdict = Verdict::NotContiguous;
    rep.notes = "overlap declared to vanish and sampled overlap is below threshold at the horizon";
  } else if (trace_at_horizon && (trace_declared_one || monotone) && min_overlap >= th.overlap_eps &&
             !overlap_declared_zero) {
    rep.verdict = Verdict::Contiguous;
    rep.notes = "Tr rho R^2 tends to 1 and the overlap stays bounded away from 0";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "samples do not settle the pure-state criterion";
  }
  return rep;
}

ContiguityReport pure_criterion(const StateSequence& seq, const ToleranceConfig& tol, const CriterionThresholds& th) {
  return pure_criterion(pure_sequence(seq, tol), th);
}

std::optional<double> fit_decay_exponent(const std::vector<double>& s, long long first, long long last,
                                         double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long long count = 0;
  for (long long i = std::max(first, 1LL); i <= last && i <= static_cast<long long>(s.size()); ++i) {
    const double v = s[static_cast<std::size_t>(i - 1)];
    if (!(v > floor)) continue;
    const double x = std::log(static_cast<double>(i));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double c = static_cast<double>(count);
  const double var = sxx - sx * sx / c;
  if (!(var > 0.0)) return std::nullopt;
  return -(sxy - sx * sy / c) / var;
}

ContiguityReport kakutani_criterion(const ProductFamily& fam, long long horizon, const ToleranceConfig& tol,
                                    const CriterionThresholds& th) {
  if (horizon < 2) throw Error(ErrorKind::InvalidArgument, "Kakutani horizon must be at least 2");
  const std::vector<double> s = kernels::kakutani_summands(fam.factors, horizon, tol);

  ContiguityReport rep;
  rep.criterion_used = Criterion::Kakutani;
  std::vector<double> partial(s.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) partial[k] = acc += s[k];
  for (long long i : log_grid(1, horizon, 10)) {
    rep.evidence.push_back({i, "summand", s[static_cast<std::size_t>(i - 1)]});
    rep.evidence.push_back({i, "partial_sum", partial[static_cast<std::size_t>(i - 1)]});
  }

  const long long first = horizon / 2;
  bool tail_vanishes = true;
  for (long long i = first; i <= horizon; ++i) {
    if (s[static_cast<std::size_t>(i - 1)] > th.kakutani_floor) tail_vanishes = false;
  }
  const std::optional<double> p = fit_decay_exponent(s, first, horizon, th.kakutani_floor);

  rep.summary.emplace_back("horizon", static_cast<double>(horizon));
  rep.summary.emplace_back("partial_sum", acc);
  if (p) rep.summary.emplace_back("fitted_exponent", *p);

  if (fam.closed_form) {
    double worst = 0.0;
    for (long long i = 1; i <= horizon; ++i) {
      worst = std::max(worst, std::abs(fam.closed_form->summand(i) - s[static_cast<std::size_t>(i - 1)]));
    }
    rep.summary.emplace_back("closed_form_max_abs_diff", worst);
    rep.summary.emplace_back("declared_convergent", fam.closed_form->convergent ? 1.0 : 0.0);
    rep.verdict = fam.closed_form->convergent ? Verdict::Contiguous : Verdict::NotContiguous;
    rep.notes = fam.closed_form->convergent ? "declared convergent summand series" : "declared divergent summand series";
    return rep;
  }

  if (tail_vanishes) {
    rep.verdict = Verdict::Contiguous;
    rep.notes = "summands over the second half of the horizon vanish";
  } else if (!p) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "too few positive summands to fit a decay exponent";
  } else if (*p > 1.0 + th.kakutani_margin) {
    rep.verdict = Verdict::Contiguous;
    rep.notes = "summands decay faster than 1/i";
  } else if (*p < 1.0 - th.kakutani_margin) {
    rep.verdict = Verdict::NotContiguous;
    rep.notes = "summands decay slower than 1/i";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "fitted exponent within the margin around 1";
  }
  return rep;
}

namespace {

bool positive_definite(const CMatrix& m) {
  if (m.rows() == 0) return true;
  const Eigen::LLT<CMatrix> llt(0.5 * (m + m.adjoint()));
  return llt.info() == Eigen::Success;
}

CMatrix assemble_rho(const BlockSet& b, Index d1, Index d2, Index d3) {
  CMatrix m = CMatrix::Zero(d1 + d2 + d3, d1 + d2 + d3);
  m.block(0, 0, d1, d1) = b.rho2;
  m.block(0, d1, d1, d2) = b.rho1;
  m.block(d1, 0, d2, d1) = b.rho1.adjoint();
  m.block(d1, d1, d2, d2) = b.rho0;
  return m;
}

CMatrix assemble_sigma(const BlockSet& b, Index d1, Index d2, Index d3) {
  CMatrix m = CMatrix::Zero(d1 + d2 + d3, d1 + d2 + d3);
  m.block(d1, d1, d2, d2) = b.sigma0;
  m.block(d1, d1 + d2, d2, d3) = b.sigma1;
  m.block(d1 + d2, d1, d3, d2) = b.sigma1.adjoint();
  m.block(d1 + d2, d1 + d2, d3, d3) = b.sigma2;
  return m;
}

void require_shape(const CMatrix& m, Index rows, Index cols, const char* name, long long n) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " at n = " << n << " has shape " << m.rows() << "x" << m.cols() << ", expected " << rows << "x"
       << cols;
    throw Error(ErrorKind::BlocksInconsistent, os.str());
  }
}

void require_match(const CMatrix& assembled, const HermitianMatrix& state, const char* name, long long n,
                   const ToleranceConfig& tol) {
  if (assembled.rows() != state.dim()) {
    std::ostringstream os;
    os << name << " at n = " << n << " has dimension " << state.dim() << " but blocks add up to "
       << assembled.rows();
    throw Error(ErrorKind::BlocksInconsistent, os.str());
  }
  const double diff = (assembled - state.mat()).norm();
  if (diff > tol.eq_rel * (1.0 + state.frobenius())) {
    std::ostringstream os;
    os << "reassembled " << name << " at n = " << n << " differs from the supplied state by " << diff;
    throw Error(ErrorKind::BlocksInconsistent, os.str());
  }
}

DensityMatrix normalized(const CMatrix& m, const ToleranceConfig& tol) {
  const HermitianMatrix h = HermitianMatrix::hermitian_part(m);
  return DensityMatrix(h * (1.0 / h.trace()), tol);
}

}  // namespace

ContiguityReport block_criterion_diagnostics(const BlockSequence& seq, const ToleranceConfig& tol,
                                             const CriterionThresholds& th) {
  const auto grid = checked_grid(seq.grid);
  ContiguityReport rep;
  rep.criterion_used = Criterion::BlockCriterion;

  bool rho_pd = true, sigma_pd = true;
  std::vector<double> tr_rho0, tr_sigma0;
  for (long long n : grid) {
    const BlockSet b = seq.blocks(n);
    const Index d1 = b.rho2.rows(), d2 = b.rho0.rows(), d3 = b.sigma2.rows();
    require_shape(b.rho2, d1, d1, "rho2", n);
    require_shape(b.rho1, d1, d2, "rho1", n);
    require_shape(b.rho0, d2, d2, "rho0", n);
    require_shape(b.sigma0, d2, d2, "sigma0", n);
    require_shape(b.sigma1, d2, d3, "sigma1", n);
    require_shape(b.sigma2, d3, d3, "sigma2", n);
    if (seq.states) {
      const StatePair p = seq.states(n);
      require_match(assemble_rho(b, d1, d2, d3), p.rho.mat(), "rho", n, tol);
      require_match(assemble_sigma(b, d1, d2, d3), p.sigma.mat(), "sigma", n, tol);
    }
    CMatrix rb(d1 + d2, d1 + d2), sb(d2 + d3, d2 + d3);
    rb << b.rho2, b.rho1, b.rho1.adjoint(), b.rho0;
    sb << b.sigma0, b.sigma1, b.sigma1.adjoint(), b.sigma2;
    const bool rp = positive_definite(rb), sp = positive_definite(sb);
    rho_pd = rho_pd && rp;
    sigma_pd = sigma_pd && sp;
    tr_rho0.push_back(b.rho0.trace().real());
    tr_sigma0.push_back(b.sigma0.trace().real());
    rep.evidence.push_back({n, "trace_rho0", tr_rho0.back()});
    rep.evidence.push_back({n, "trace_sigma0", tr_sigma0.back()});
    rep.evidence.push_back({n, "rho_blocks_positive", rp ? 1.0 : 0.0});
    rep.evidence.push_back({n, "sigma_blocks_positive", sp ? 1.0 : 0.0});
  }

  double tail_min_rho0 = tr_rho0.back();
  for (std::size_t k = tail_start(tr_rho0.size(), 0.5); k < tr_rho0.size(); ++k) {
    tail_min_rho0 = std::min(tail_min_rho0, tr_rho0[k]);
  }
  const bool hyp_rho0 = tail_min_rho0 >= th.block_trace_floor;
  const bool hyp_sigma0 = std::abs(tr_sigma0.back() - 1.0) <= th.block_sigma0_eps;

  ContiguityReport inner_rep;
  bool inner_ok = false;
  if (hyp_rho0 && tail_min_rho0 > 0.0 && std::all_of(tr_sigma0.begin(), tr_sigma0.end(), [](double t) { return t > 0.0; })) {
    StateSequence inner;
    inner.grid = grid;
    inner.horizon = grid.back();
    inner.declared_limits = seq.inner_limits;
    inner.eval = [blocks = seq.blocks, tol](long long n) {
      const BlockSet b = blocks(n);
      return StatePair{normalized(b.rho0, tol), normalized(b.sigma0, tol)};
    };
    if (seq.inner == InnerCriterion::Limit) {
      inner_rep = limit_criterion(inner, tol, th);
    } else {
      PureSequence ps = pure_sequence(inner, tol);
      if (seq.inner_trace_limit) ps.trace_limit = seq.inner_trace_limit;
      if (seq.inner_overlap_limit) ps.overlap_limit = seq.inner_overlap_limit;
      inner_rep = pure_criterion(ps, th);
    }
    inner_ok = inner_rep.verdict == Verdict::Contiguous;
    for (const auto& e : inner_rep.evidence) rep.evidence.push_back({e.n, "inner." + e.statistic, e.value});
  }

  rep.summary = {{"rho_blocks_positive", rho_pd ? 1.0 : 0.0},
                 {"sigma_blocks_positive", sigma_pd ? 1.0 : 0.0},
                 {"tail_min_trace_rho0", tail_min_rho0},
                 {"trace_sigma0_at_horizon", tr_sigma0.back()},
                 {"hypothesis_trace_rho0", hyp_rho0 ? 1.0 : 0.0},
                 {"hypothesis_trace_sigma0", hyp_sigma0 ? 1.0 : 0.0},
                 {"hypothesis_inner_pair", inner_ok ? 1.0 : 0.0}};

  if (rho_pd && sigma_pd && hyp_rho0 && hyp_sigma0 && inner_ok) {
    rep.verdict = Verdict::Contiguous;
    rep.notes = "all block hypotheses verified";
  } else {
    rep.verdict = Verdict::Inconclusive;
    std::ostringstream os;
    os << "unverified hypotheses:";
    if (!rho_pd) os << " rho_blocks_positive";
    if (!sigma_pd) os << " sigma_blocks_positive";
    if (!hyp_rho0) os << " trace_rho0";
    if (!hyp_sigma0) os << " trace_sigma0";
    if (!inner_ok) os << " inner_pair";
    rep.notes = os.str();
  }
  return rep;
}

ContiguityReport sequence_diagnostics(const StateSequence& seq, const ToleranceConfig& tol) {
  const auto grid = checked_grid(seq.grid);
  ContiguityReport rep;
  rep.criterion_used = Criterion::DiagnosticsOnly;
  rep.verdict = Verdict::Inconclusive;
  for (long long n : grid) {
    const StatePair p = seq.eval(n);
    const HermitianMatrix r = sqrt_likelihood_ratio(p.sigma, p.rho, tol);
    rep.evidence.push_back({n, "trace_rho_r2", trace_r2(p.rho.mat(), r)});
    rep.evidence.push_back({n, "overlap", trace_inner(p.rho.mat(), p.sigma.mat()).real()});
  }
  rep.notes = "no theorem hypothesis was verified; statistics only";
  return rep;
}

std::vector<DInfinitesimalRow> d_infinitesimal_diagnostic(
    const std::function<std::tuple<HermitianMatrix, HermitianMatrix, HermitianMatrix>(long long)>& rho_z_o,
    const std::vector<long long>& grid, const std::vector<DQuery>& queries) {
  std::vector<DInfinitesimalRow> out;
  for (long long n : checked_grid(grid)) {
    const auto [rho, z, o] = rho_z_o(n);
    if (z.dim() != rho.dim() || o.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "d_infinitesimal");
    double worst = 0.0;
    for (const DQuery& q : queries) {
      if (q.xi.size() != q.eta.size()) throw Error(ErrorKind::InvalidArgument, "xi and eta lengths differ");
      CMatrix with = CMatrix::Identity(rho.dim(), rho.dim());
      CMatrix without = with;
      for (std::size_t t = 0; t < q.xi.size(); ++t) {
        with = with * expi(z * q.xi[t] + o * q.eta[t]);
        without = without * expi(z, q.xi[t]);
      }
      worst = std::max(worst, std::abs(trace_inner(rho.mat(), with) - trace_inner(rho.mat(), without)));
    }
    out.push_back({n, worst});
  }
  return out;
}

}  // namespace qleb
