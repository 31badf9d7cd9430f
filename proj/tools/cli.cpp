#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "qleb/contiguity.hpp"
#include "qleb/gaussian.hpp"
#include "qleb/lebesgue.hpp"
#include "qleb/presets.hpp"
#include "qleb/qlan.hpp"

namespace qleb::cli {

namespace {

using io::InputError;
using io::json;

struct Globals {
  std::string output = "json";
  std::string out_file;
  std::string profile;
  std::optional<double> tol_hermitian, tol_rank_rel, tol_psd_floor, tol_recon, tol_ortho, tol_eq_rel;

  ToleranceConfig tolerances() const {
    ToleranceConfig tol = profile.empty() ? tolerance_from_environment() : tolerance_profile(profile);
    if (tol_hermitian) tol.hermitian = *tol_hermitian;
    if (tol_rank_rel) tol.rank_rel = *tol_rank_rel;
    if (tol_psd_floor) tol.psd_floor = *tol_psd_floor;
    if (tol_recon) tol.recon = *tol_recon;
    if (tol_ortho) tol.ortho = *tol_ortho;
    if (tol_eq_rel) tol.eq_rel = *tol_eq_rel;
    tol.validate();
    return tol;
  }
};

// A finished command: the report body and the exit code it earned.
struct Outcome {
  json result;
  int code = Ok;
};

json report(const std::string& command, const json& inputs, const ToleranceConfig& tol, const json& result) {
  json r;
  r["command"] = command;
  r["inputs_digest"] = io::fnv1a_hex(inputs.dump());
  r["result"] = result;
  r["tolerances"] = io::tolerance_to_json(tol);
  r["version"] = kVersion;
  return r;
}

json labelled(const HermitianMatrix& m, const std::string& label) { return io::matrix_to_json(m.mat(), label); }

DensityMatrix load_state(const std::string& path, const std::string& name, const ToleranceConfig& tol,
                         bool subnormalized, json& inputs) {
  const json doc = io::read_json_file(path);
  const CMatrix m = io::matrix_from_json(doc, name);
  inputs[name] = io::matrix_to_json(m);
  return DensityMatrix(HermitianMatrix(m, tol.hermitian), tol, subnormalized);
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string sigma_path, rho_path;
  bool subnormalized = false;
};

Outcome cmd_decompose(const DecomposeArgs& a, const ToleranceConfig& tol, json& inputs) {
  const DensityMatrix sigma = load_state(a.sigma_path, "sigma", tol, a.subnormalized, inputs);
  const DensityMatrix rho = load_state(a.rho_path, "rho", tol, a.subnormalized, inputs);
  inputs["subnormalized"] = a.subnormalized;
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "sigma and rho have different dimensions");

  const LebesgueDecomposition dec = lebesgue_decompose(sigma, rho, tol);
  const CMatrix& s = sigma.mat().mat();
  const double scale = std::max(s.norm(), 1e-300);
  const double recon = (dec.ac.mat() + dec.perp.mat() - s).norm() / scale;
  const double rrr = (dec.sqrt_lr.mat() * rho.mat().mat() * dec.sqrt_lr.mat() - dec.ac.mat()).norm() / scale;
  const double orth = std::abs(trace_inner(rho.mat(), dec.perp));
  const bool singular = is_singular(rho, sigma, tol);
  bool ac_ok = true;
  if (dec.ac.frobenius() > 0.0) ac_ok = is_abs_continuous(dec.ac, rho.mat(), tol);

  const bool pass = recon <= tol.eq_rel && rrr <= tol.eq_rel && orth <= tol.eq_rel && ac_ok;
  const auto dims = dec.split.dims();

  Outcome o;
  o.result["ac"] = labelled(dec.ac, "ac");
  o.result["perp"] = labelled(dec.perp, "perp");
  o.result["sqrt_lr"] = labelled(dec.sqrt_lr, "sqrt_lr");
  o.result["split_dims"] = json::array({dims[0], dims[1], dims[2]});
  json checks;
  checks["reconstruction"] = recon;
  checks["ac_equals_r_rho_r"] = rrr;
  checks["perp_overlap"] = orth;
  checks["singularity"] = singular;
  checks["ac_predicate"] = ac_ok;
  checks["passed"] = pass;
  o.result["checks"] = checks;
  o.code = pass ? Ok : CheckFailure;
  return o;
}

// --------------------------------------------------------------- contiguity

struct ContiguityArgs {
  std::string criterion;
  std::string spec_path;
  std::string preset;
  std::optional<long long> horizon;
  std::string grid;
  std::string h = "1,0.5";
  std::string g = "sqrt";
  CriterionThresholds th;
};

// Whatever a preset or inline spec can supply.
struct Family {
  std::optional<StateSequence> sequence;
  std::optional<PureSequence> pure;
  std::optional<ProductFamily> product;
  std::optional<BlockSequence> blocks;
  long long horizon = 0;
};

std::vector<long long> grid_for(const ContiguityArgs& a, long long horizon) {
  if (!a.grid.empty()) return io::parse_int_list(a.grid, "--grid");
  return log_grid(1, horizon, 10);
}

StatePair pair_from_json(const json& j, const std::string& where, const ToleranceConfig& tol) {
  if (!j.is_object() || !j.contains("rho") || !j.contains("sigma")) {
    throw InputError(where + ": expected an object with \"rho\" and \"sigma\"");
  }
  return {DensityMatrix(HermitianMatrix(io::matrix_from_json(j["rho"], where + ".rho"), tol.hermitian), tol),
          DensityMatrix(HermitianMatrix(io::matrix_from_json(j["sigma"], where + ".sigma"), tol.hermitian), tol)};
}

Family preset_family(const std::string& name, const ContiguityArgs& a, const ToleranceConfig& tol) {
  Family f;
  if (name == "example-4.1" || name == "example-4.3") {
    f.horizon = a.horizon.value_or(10000);
    f.sequence = name == "example-4.1" ? presets::pseudo_likelihood_sequence(f.horizon, tol)
                                       : presets::orthogonal_limit_sequence(f.horizon, tol);
    f.sequence->grid = grid_for(a, f.horizon);
  } else if (name == "sec-7.1") {
    f.horizon = a.horizon.value_or(1000);
    f.blocks = presets::three_block_sequence(f.horizon, tol);
    if (!a.grid.empty()) f.blocks->grid = io::parse_int_list(a.grid, "--grid");
  } else if (name == "sec-7.2-n" || name == "sec-7.2-sqrt-n") {
    f.horizon = a.horizon.value_or(10000);
    f.product = name == "sec-7.2-n" ? presets::qubit_product_linear(tol) : presets::qubit_product_sqrt(tol);
  } else if (name == "spin-overlap") {
    f.horizon = a.horizon.value_or(1000000);
    presets::OverlapScaling g;
    if (a.g == "sqrt") {
      g = presets::OverlapScaling::SqrtN;
    } else if (a.g == "quarter") {
      g = presets::OverlapScaling::QuarterN;
    } else {
      throw InputError("--g must be 'sqrt' or 'quarter'");
    }
    f.pure = presets::spin_overlap_sequence(io::parse_real_list(a.h, "--h"), g, f.horizon, tol);
    if (!a.grid.empty()) f.pure->grid = io::parse_int_list(a.grid, "--grid");
  } else {
    std::string known;
    for (const auto& n : presets::sequence_preset_names()) known += " " + n;
    throw InputError("unknown preset '" + name + "'; known:" + known);
  }
  return f;
}

Family spec_family(const json& spec, const ContiguityArgs& a, const ToleranceConfig& tol) {
  if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string()) {
    throw InputError("spec: expected an object with a \"family\" string");
  }
  const std::string kind = spec["family"].get<std::string>();
  Family f;
  if (kind == "preset") {
    if (!spec.contains("name") || !spec["name"].is_string()) throw InputError("spec: preset needs \"name\"");
    return preset_family(spec["name"].get<std::string>(), a, tol);
  }
  if (kind == "constant") {
    const StatePair p = pair_from_json(spec, "spec", tol);
    f.horizon = a.horizon.value_or(100);
    StateSequence seq{[p](long long) { return p; }, std::nullopt, f.horizon, grid_for(a, f.horizon)};
    if (spec.value("declare_limits", true)) seq.declared_limits = p;
    f.sequence = seq;
    f.product = ProductFamily{[p](long long) { return p; }, std::nullopt};
    return f;
  }
  if (kind == "samples") {
    if (!spec.contains("samples") || !spec["samples"].is_array() || spec["samples"].empty()) {
      throw InputError("spec: \"samples\" must be a non-empty array");
    }
    auto table = std::make_shared<std::map<long long, StatePair>>();
    std::vector<long long> grid;
    for (std::size_t k = 0; k < spec["samples"].size(); ++k) {
      const json& s = spec["samples"][k];
      const std::string where = "spec.samples[" + std::to_string(k) + "]";
      if (!s.contains("n") || !s["n"].is_number_integer() || s["n"].get<long long>() < 1) {
        throw InputError(where + ": \"n\" must be a positive integer");
      }
      const long long n = s["n"].get<long long>();
      if (!grid.empty() && n <= grid.back()) throw InputError(where + ": n must increase");
      table->emplace(n, pair_from_json(s, where, tol));
      grid.push_back(n);
    }
    f.horizon = grid.back();
    StateSequence seq{[table](long long n) { return table->at(n); }, std::nullopt, f.horizon, grid};
    if (spec.contains("limits")) seq.declared_limits = pair_from_json(spec["limits"], "spec.limits", tol);
    f.sequence = seq;
    return f;
  }
  if (kind == "blocks") {
    BlockSet b;
    b.rho0 = io::rect_from_json(spec.value("rho0", json::array()), "spec.rho0");
    b.rho1 = io::rect_from_json(spec.value("rho1", json::array()), "spec.rho1");
    b.rho2 = io::rect_from_json(spec.value("rho2", json::array()), "spec.rho2");
    b.sigma0 = io::rect_from_json(spec.value("sigma0", json::array()), "spec.sigma0");
    b.sigma1 = io::rect_from_json(spec.value("sigma1", json::array()), "spec.sigma1");
    b.sigma2 = io::rect_from_json(spec.value("sigma2", json::array()), "spec.sigma2");
    // 0 x 0 placeholders become empty blocks of the right shape
    if (b.rho1.size() == 0) b.rho1 = CMatrix::Zero(b.rho2.rows(), b.rho0.rows());
    if (b.sigma1.size() == 0) b.sigma1 = CMatrix::Zero(b.sigma0.rows(), b.sigma2.rows());
    f.horizon = a.horizon.value_or(100);
    BlockSequence seq;
    seq.blocks = [b](long long) { return b; };
    seq.grid = grid_for(a, f.horizon);
    const std::string inner = spec.value("inner", std::string("limit"));
    if (inner == "limit") {
      seq.inner = InnerCriterion::Limit;
    } else if (inner == "pure") {
      seq.inner = InnerCriterion::Pure;
    } else {
      throw InputError("spec.inner must be 'limit' or 'pure'");
    }
    if (spec.contains("inner_limits")) seq.inner_limits = pair_from_json(spec["inner_limits"], "spec.inner_limits", tol);
    f.blocks = seq;
    return f;
  }
  throw InputError("spec: unknown family '" + kind + "' (preset, constant, samples, blocks)");
}

json report_body(const ContiguityReport& rep) {
  json r;
  r["verdict"] = to_string(rep.verdict);
  r["criterion_used"] = to_string(rep.criterion_used);
  json summary = json::object();
  for (const auto& [k, v] : rep.summary) summary[k] = v;
  r["summary"] = summary;
  json ev = json::array();
  for (const auto& e : rep.evidence) ev.push_back({{"n", e.n}, {"statistic", e.statistic}, {"value", e.value}});
  r["evidence"] = ev;
  r["notes"] = rep.notes;
  return r;
}

Outcome cmd_contiguity(const ContiguityArgs& a, const ToleranceConfig& tol, json& inputs) {
  inputs["criterion"] = a.criterion;
  Family f;
  if (!a.preset.empty() && !a.spec_path.empty()) throw InputError("give either --preset or a spec file, not both");
  if (!a.preset.empty()) {
    inputs["preset"] = a.preset;
    f = preset_family(a.preset, a, tol);
  } else if (!a.spec_path.empty()) {
    const json spec = io::read_json_file(a.spec_path);
    inputs["spec"] = spec;
    f = spec_family(spec, a, tol);
  } else {
    throw InputError("a --preset or a spec file is required");
  }
  inputs["horizon"] = f.horizon;
  inputs["grid"] = a.grid;
  inputs["h"] = a.h;
  inputs["g"] = a.g;
  inputs["thresholds"] = {{"trace_eps", a.th.trace_eps},
                          {"overlap_eps", a.th.overlap_eps},
                          {"limit_confirm", a.th.limit_confirm},
                          {"kakutani_margin", a.th.kakutani_margin}};

  const std::string source = a.preset.empty() ? "spec" : "preset '" + a.preset + "'";
  auto missing = [&](const char* what) {
    return InputError(source + " does not supply " + std::string(what) + " for the " + a.criterion + " criterion");
  };

  ContiguityReport rep;
  if (a.criterion == "limit") {
    if (!f.sequence) throw missing("a state sequence");
    rep = limit_criterion(*f.sequence, tol, a.th);
  } else if (a.criterion == "pure") {
    if (f.pure) {
      rep = pure_criterion(*f.pure, a.th);
    } else if (f.sequence) {
      rep = pure_criterion(*f.sequence, tol, a.th);
    } else {
      throw missing("a pure-state sequence");
    }
  } else if (a.criterion == "kakutani") {
    if (!f.product) throw missing("a product family");
    rep = kakutani_criterion(*f.product, f.horizon, tol, a.th);
  } else if (a.criterion == "block") {
    if (!f.blocks) throw missing("a block family");
    rep = block_criterion_diagnostics(*f.blocks, tol, a.th);
  } else if (a.criterion == "diagnostics") {
    if (!f.sequence) throw missing("a state sequence");
    rep = sequence_diagnostics(*f.sequence, tol);
  } else {
    throw InputError("unknown criterion '" + a.criterion + "'");
  }
  return {report_body(rep), Ok};
}

// ----------------------------------------------------------------- gaussian

struct GaussianArgs {
  std::string op;
  std::string params_path;
  std::string query_path;
  std::vector<std::string> xi;
  double agree_tol = 1e-10;
};

GaussianParams gaussian_from_json(const json& j) {
  if (!j.is_object() || !j.contains("h") || !j.contains("J")) throw InputError("params: need \"h\" and \"J\"");
  return {io::rvector_from_json(j["h"], "params.h"), io::matrix_from_json(j["J"], "params.J")};
}

ExtendedGaussianParams extended_from_json(const json& j) {
  if (!j.is_object() || !j.contains("mu") || !j.contains("Sigma") || !j.contains("kappa") || !j.contains("s2")) {
    throw InputError("params: need \"mu\", \"Sigma\", \"kappa\" and \"s2\"");
  }
  if (!j["s2"].is_number()) throw InputError("params.s2: expected a number");
  ExtendedGaussianParams e;
  e.mu = io::rvector_from_json(j["mu"], "params.mu");
  e.Sigma = io::matrix_from_json(j["Sigma"], "params.Sigma");
  e.kappa = io::cvector_from_json(j["kappa"], "params.kappa");
  e.s2 = j["s2"].get<double>();
  return e;
}

QcfQuery query_from(const GaussianArgs& a, json& inputs) {
  QcfQuery q;
  if (!a.query_path.empty()) {
    const json doc = io::read_json_file(a.query_path);
    if (!doc.is_object() || !doc.contains("xis") || !doc["xis"].is_array()) {
      throw InputError("query: expected an object with an \"xis\" array");
    }
    for (std::size_t t = 0; t < doc["xis"].size(); ++t) {
      q.push_back(io::cvector_from_json(doc["xis"][t], "query.xis[" + std::to_string(t) + "]"));
    }
    inputs["query"] = doc;
  }
  for (const auto& s : a.xi) q.push_back(io::parse_real_list(s, "--xi").cast<complex>());
  inputs["xi"] = a.xi;
  return q;
}

Outcome cmd_gaussian(const GaussianArgs& a, const ToleranceConfig& tol, json& inputs) {
  const json params = io::read_json_file(a.params_path);
  inputs["op"] = a.op;
  inputs["params"] = params;
  Outcome o;
  if (a.op == "qcf") {
    const GaussianParams p = gaussian_from_json(params);
    const QcfQuery q = query_from(a, inputs);
    if (q.empty()) throw InputError("qcf needs at least one query vector (--xi or --query)");
    const complex v = gaussian_qcf(p, q, tol);
    o.result["value"] = io::complex_to_json(v);
    o.result["abs"] = std::abs(v);
  } else if (a.op == "shift") {
    const GaussianParams p = lecam_shift(extended_from_json(params), tol);
    o.result["h"] = io::rvector_to_json(p.h);
    o.result["J"] = io::matrix_to_json(p.J, "J");
  } else if (a.op == "sandwich") {
    const ExtendedGaussianParams e = extended_from_json(params);
    const QcfQuery q = query_from(a, inputs);
    const complex s = sandwiched_gaussian_qcf(e, q, tol);
    const GaussianParams shifted = lecam_shift(e, tol);
    const complex g = q.empty() ? complex(1.0, 0.0) : gaussian_qcf(shifted, q, tol);
    const double diff = std::abs(s - g);
    inputs["agree_tol"] = a.agree_tol;
    o.result["sandwiched"] = io::complex_to_json(s);
    o.result["shifted"] = io::complex_to_json(g);
    o.result["shifted_h"] = io::rvector_to_json(shifted.h);
    o.result["abs_diff"] = diff;
    o.result["agree"] = diff <= a.agree_tol;
    o.code = diff <= a.agree_tol ? Ok : CheckFailure;
  } else {
    throw InputError("unknown gaussian operation '" + a.op + "'");
  }
  return o;
}

// --------------------------------------------------------------------- qlan

struct QlanArgs {
  std::string op;
  std::string model = "spin-pure";
  std::string theta;
  int index = 0;
  std::string h = "1,0.5";
  std::string n = "1e2,1e4,1e6";
  int xi_points = 20;
  double threshold = 1e-3;
  std::string scales = "0.1,0.05,0.025,0.0125";
  double fit_scale = 1e-2;
  std::string f = "cubic";
  std::string g = "sqrt";
  long long horizon = 100000000;
  std::string grid;
  double eps = 1e-3;
  double ratio_bound = 100.0;
};

json row_matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// K single-vector queries on a widening spiral, radius 0.25 .. 2.
std::vector<std::vector<RVector>> spiral_queries(int k, Index d) {
  std::vector<std::vector<RVector>> out;
  for (int t = 0; t < k; ++t) {
    const double angle = 2.0 * M_PI * t / k;
    const double radius = 0.25 + 1.75 * t / std::max(1, k - 1);
    RVector xi = RVector::Zero(d);
    xi(0) = radius * std::cos(angle);
    if (d > 1) xi(1) = radius * std::sin(angle);
    out.push_back({xi});
  }
  return out;
}

Outcome cmd_qlan(const QlanArgs& a, const ToleranceConfig& tol, json& inputs) {
  inputs["op"] = a.op;
  Outcome o;

  if (a.op == "rate-scan") {
    RateScan scan;
    if (a.f == "cubic") {
      scan.f = [](const RVector& t) { return std::pow(t.norm(), 3); };
    } else if (a.f == "quadratic") {
      scan.f = [](const RVector& t) { return t.squaredNorm(); };
    } else if (a.f == "zero") {
      scan.f = [](const RVector&) { return 0.0; };
    } else {
      throw InputError("--f must be cubic, quadratic or zero");
    }
    if (a.g == "sqrt") {
      scan.g = [](double n) { return std::sqrt(n); };
    } else if (a.g == "quarter") {
      scan.g = [](double n) { return std::pow(n, 0.25); };
    } else if (a.g == "linear") {
      scan.g = [](double n) { return n; };
    } else {
      throw InputError("--g must be sqrt, quarter or linear");
    }
    scan.h = io::parse_real_list(a.h, "--h");
    if (a.horizon < 1) throw InputError("--horizon must be positive");
    scan.grid = a.grid.empty() ? log_grid(1, a.horizon, 5) : io::parse_int_list(a.grid, "--grid");
    scan.eps = a.eps;
    scan.ratio_bound = a.ratio_bound;
    inputs["f"] = a.f;
    inputs["g"] = a.g;
    inputs["h"] = io::rvector_to_json(scan.h);
    inputs["grid"] = scan.grid;
    inputs["eps"] = a.eps;
    inputs["ratio_bound"] = a.ratio_bound;
    const RateScanReport rep = rate_scan(scan);
    json rows = json::array();
    for (const auto& r : rep.rows) rows.push_back({{"n", r.n}, {"n_f", r.n_f}, {"ratio", r.ratio}});
    o.result["verdict"] = to_string(rep.verdict);
    o.result["first_to_zero"] = rep.first_to_zero;
    o.result["first_stays_away"] = rep.first_stays_away;
    o.result["ratio_bounded"] = rep.ratio_bounded;
    o.result["ratio_unbounded"] = rep.ratio_unbounded;
    o.result["notes"] = rep.notes;
    o.result["rows"] = rows;
    return o;
  }

  const ParametricModel model = presets::model_by_name(a.model, tol);
  const RVector theta = a.theta.empty() ? RVector::Zero(model.num_params) : io::parse_real_list(a.theta, "--theta");
  if (theta.size() != model.num_params) throw InputError("--theta length differs from the model's parameter count");
  inputs["model"] = a.model;
  inputs["theta"] = io::rvector_to_json(theta);

  if (a.op == "sld") {
    if (a.index < 0 || a.index >= model.num_params) throw InputError("--index out of range");
    inputs["index"] = a.index;
    const SldResult s = sld(model, theta, a.index, tol);
    const bool ok = s.residual <= tol.recon * (1.0 + s.L.frobenius());
    o.result["L"] = labelled(s.L, "L_" + std::to_string(a.index));
    o.result["residual"] = s.residual;
    o.result["kernel_leak"] = s.kernel_leak;
    o.result["inconsistent_derivative"] = s.inconsistent;
    o.result["residual_ok"] = ok;
    o.code = ok ? Ok : CheckFailure;
  } else if (a.op == "qfi") {
    const DensityMatrix rho = model.state_at(theta);
    std::vector<HermitianMatrix> slds;
    json ls = json::array();
    for (Index i = 0; i < model.num_params; ++i) {
      slds.push_back(sld(model, theta, i, tol).L);
      ls.push_back(labelled(slds.back(), "L_" + std::to_string(i)));
    }
    const CMatrix j = qfi_matrix(rho.mat(), slds, tol);
    o.result["J"] = io::matrix_to_json(j, "J");
    o.result["slds"] = ls;
    o.result["hermitian_psd"] = is_psd(HermitianMatrix::hermitian_part(j), tol);
  } else if (a.op == "clt-check") {
    const RVector h = io::parse_real_list(a.h, "--h");
    const std::vector<long long> ns = io::parse_int_list(a.n, "--n");
    if (a.xi_points < 1) throw InputError("--xi-points must be positive");
    inputs["h"] = io::rvector_to_json(h);
    inputs["n"] = ns;
    inputs["xi_points"] = a.xi_points;
    inputs["threshold"] = a.threshold;
    const auto queries = spiral_queries(a.xi_points, model.num_params);
    const LeCamReport rep = lecam3_numeric_check(model, theta, {}, h, ns, queries, tol);
    json rows = json::array();
    for (const auto& r : rep.rows) rows.push_back({{"n", r.n}, {"max_deviation", r.max_deviation}});
    const bool within = rep.rows.back().max_deviation <= a.threshold;
    o.result["target_h"] = io::rvector_to_json(rep.target.h);
    o.result["Sigma"] = io::matrix_to_json(rep.Sigma, "Sigma");
    o.result["tau"] = io::matrix_to_json(rep.tau, "tau");
    o.result["rows"] = rows;
    o.result["decreasing"] = rep.decreasing;
    o.result["within_threshold"] = within;
    o.code = within && rep.decreasing ? Ok : CheckFailure;
  } else if (a.op == "expansion") {
    const RVector sc = io::parse_real_list(a.scales, "--scales");
    inputs["scales"] = io::rvector_to_json(sc);
    inputs["fit_scale"] = a.fit_scale;
    const ExpansionReport rep =
        sqrt_expansion_check(model, theta, std::vector<double>(sc.data(), sc.data() + sc.size()), a.fit_scale, tol);
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"scale", r.scale},
                      {"direction", r.direction},
                      {"tr_rho_b", r.tr_rho_b},
                      {"quadratic", r.quadratic},
                      {"trace_deficit", r.trace_deficit}});
    }
    o.result["J"] = io::matrix_to_json(rep.J, "J");
    o.result["fitted"] = row_matrix_json(rep.fitted);
    o.result["expected"] = row_matrix_json(rep.expected);
    o.result["coeff_max_abs_err"] = rep.coeff_max_abs_err;
    o.result["coeff_rel_err"] = rep.coeff_rel_err;
    o.result["residual_order"] = optional_json(rep.residual_order);
    o.result["deficit_order"] = optional_json(rep.deficit_order);
    o.result["rows"] = rows;
  } else {
    throw InputError("unknown qlan operation '" + a.op + "'");
  }
  return o;
}

void add_globals(CLI::App& app, Globals& g) {
  app.add_option("--output", g.output, "json (one line) or pretty")
      ->check(CLI::IsMember({"json", "pretty"}))
      ->capture_default_str();
  app.add_option("--out-file", g.out_file, "write the report here instead of stdout");
  app.add_option("--tol-profile", g.profile, "default, fine or loose (overrides QLEB_TOL_PROFILE)");
  app.add_option("--tol-hermitian", g.tol_hermitian);
  app.add_option("--tol-rank-rel", g.tol_rank_rel);
  app.add_option("--tol-psd-floor", g.tol_psd_floor);
  app.add_option("--tol-recon", g.tol_recon);
  app.add_option("--tol-ortho", g.tol_ortho);
  app.add_option("--tol-eq-rel", g.tol_eq_rel);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lebesgue decomposition, contiguity and q-LAN numerics", "qleb"};
  app.set_help_flag("--help", "print help and exit");  // -h is left free for the --h shift option
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Globals globals;
  add_globals(app, globals);

  std::function<Outcome(const ToleranceConfig&, json&)> action;
  std::string command;

  DecomposeArgs dec;
  auto* sub_dec = app.add_subcommand("decompose", "Lebesgue decomposition of sigma with respect to rho");
  sub_dec->add_option("sigma", dec.sigma_path, "sigma MatrixDocument")->required();
  sub_dec->add_option("rho", dec.rho_path, "rho MatrixDocument")->required();
  sub_dec->add_flag("--subnormalized", dec.subnormalized, "accept trace in (0, 1]");
  sub_dec->fallthrough();
  sub_dec->callback([&] {
    command = "decompose";
    action = [&](const ToleranceConfig& tol, json& in) { return cmd_decompose(dec, tol, in); };
  });

  ContiguityArgs con;
  auto* sub_con = app.add_subcommand("contiguity", "contiguity criteria on sequences of state pairs");
  sub_con->require_subcommand(1);
  sub_con->fallthrough();
  for (const char* crit : {"limit", "pure", "kakutani", "block", "diagnostics"}) {
    auto* c = sub_con->add_subcommand(crit);
    c->add_option("spec", con.spec_path, "family spec JSON");
    c->add_option("--preset", con.preset, "named family");
    c->add_option("--horizon", con.horizon, "largest n sampled");
    c->add_option("--grid", con.grid, "comma-separated n values");
    c->add_option("--h", con.h, "shift for spin-overlap")->capture_default_str();
    c->add_option("--g", con.g, "sqrt or quarter for spin-overlap")->capture_default_str();
    c->add_option("--trace-eps", con.th.trace_eps)->capture_default_str();
    c->add_option("--overlap-eps", con.th.overlap_eps)->capture_default_str();
    c->add_option("--limit-confirm", con.th.limit_confirm)->capture_default_str();
    c->add_option("--kakutani-margin", con.th.kakutani_margin)->capture_default_str();
    c->fallthrough();
    c->callback([&, crit] {
      con.criterion = crit;
      command = std::string("contiguity ") + crit;
      action = [&](const ToleranceConfig& tol, json& in) { return cmd_contiguity(con, tol, in); };
    });
  }

  GaussianArgs gau;
  auto* sub_gau = app.add_subcommand("gaussian", "quantum Gaussian quasi-characteristic functions");
  sub_gau->require_subcommand(1);
  sub_gau->fallthrough();
  for (const char* op : {"qcf", "shift", "sandwich"}) {
    auto* c = sub_gau->add_subcommand(op);
    c->add_option("--params", gau.params_path, "GaussianParams or ExtendedGaussianParams JSON")->required();
    if (std::string(op) != "shift") {
      c->add_option("--query", gau.query_path, "JSON with an \"xis\" array");
      c->add_option("--xi", gau.xi, "one query vector, comma-separated (repeatable)");
    }
    if (std::string(op) == "sandwich") c->add_option("--agree-tol", gau.agree_tol)->capture_default_str();
    c->fallthrough();
    c->callback([&, op] {
      gau.op = op;
      command = std::string("gaussian ") + op;
      action = [&](const ToleranceConfig& tol, json& in) { return cmd_gaussian(gau, tol, in); };
    });
  }

  QlanArgs ql;
  auto* sub_ql = app.add_subcommand("qlan", "SLD, QFI and local asymptotic normality checks");
  sub_ql->require_subcommand(1);
  sub_ql->fallthrough();
  for (const char* op : {"sld", "qfi", "clt-check", "expansion", "rate-scan"}) {
    auto* c = sub_ql->add_subcommand(op);
    const std::string o = op;
    if (o != "rate-scan") {
      c->add_option("--model", ql.model, "spin-pure or spin-perturbed:f=cubic|quadratic")->capture_default_str();
      c->add_option("--theta", ql.theta, "base point, comma-separated (default 0)");
    }
    if (o == "sld") c->add_option("--index", ql.index, "parameter index, from 0")->capture_default_str();
    if (o == "clt-check" || o == "rate-scan") c->add_option("--h", ql.h)->capture_default_str();
    if (o == "clt-check") {
      c->add_option("--n", ql.n, "comma-separated copy numbers")->capture_default_str();
      c->add_option("--xi-points", ql.xi_points)->capture_default_str();
      c->add_option("--threshold", ql.threshold)->capture_default_str();
    }
    if (o == "expansion") {
      c->add_option("--scales", ql.scales)->capture_default_str();
      c->add_option("--fit-scale", ql.fit_scale)->capture_default_str();
    }
    if (o == "rate-scan") {
      c->add_option("--f", ql.f, "cubic, quadratic or zero")->capture_default_str();
      c->add_option("--g", ql.g, "sqrt, quarter or linear")->capture_default_str();
      c->add_option("--horizon", ql.horizon)->capture_default_str();
      c->add_option("--grid", ql.grid, "comma-separated n values");
      c->add_option("--eps", ql.eps)->capture_default_str();
      c->add_option("--ratio-bound", ql.ratio_bound)->capture_default_str();
    }
    c->fallthrough();
    c->callback([&, op] {
      ql.op = op;
      command = std::string("qlan ") + op;
      action = [&](const ToleranceConfig& tol, json& in) { return cmd_qlan(ql, tol, in); };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : InputFailure;
  }

  try {
    const ToleranceConfig tol = globals.tolerances();
    json inputs;
    inputs["command"] = command;
    const Outcome o = action(tol, inputs);
    const json rep = report(command, inputs, tol, o.result);
    const std::string text = globals.output == "pretty" ? rep.dump(2) : rep.dump();
    if (globals.out_file.empty()) {
      out << text << '\n';
    } else {
      std::ofstream f(globals.out_file, std::ios::binary);
      if (!f) throw InputError("cannot write '" + globals.out_file + "'");
      f << text << '\n';
    }
    if (o.code == CheckFailure) err << "qleb: numeric check failed; see the report\n";
    return o.code;
  } catch (const InputError& e) {
    err << "qleb: " << e.what() << '\n';
    return InputFailure;
  } catch (const Error& e) {
    err << "qleb: " << e.what() << '\n';
    return InputFailure;
  } catch (const std::exception& e) {
    err << "qleb: internal error: " << e.what() << '\n';
    return Internal;
  }
}

}  // namespace qleb::cli
