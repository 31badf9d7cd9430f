#include "qleb/tolerance.hpp"

#include <cstdlib>

#include "qleb/errors.hpp"

namespace qleb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotStrictlyPositive: return "NotStrictlyPositive";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::MissingLimits: return "MissingLimits";
    case ErrorKind::DimVaries: return "DimVaries";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::FactorNotAC: return "FactorNotAC";
    case ErrorKind::BlocksInconsistent: return "BlocksInconsistent";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorKind::InconsistentDerivative: return "InconsistentDerivative";
    case ErrorKind::CenteringViolated: return "CenteringViolated";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void ToleranceConfig::validate() const {
  for (double v : {hermitian, rank_rel, psd_floor, recon, ortho, eq_rel}) {
    if (!(v > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be strictly positive");
    }
  }
  if (!(rank_rel < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rank_rel must be < 1");
  }
}

ToleranceConfig tolerance_profile(std::string_view name) {
  ToleranceConfig tol;
  if (name == "default" || name.empty()) {
    return tol;
  }
  if (name == "fine") {
    tol.rank_rel = 1e-22;
    tol.psd_floor = 1e-14;
    return tol;
  }
  if (name == "loose") {
    tol.hermitian = 1e-8;
    tol.rank_rel = 1e-7;
    tol.psd_floor = 1e-8;
    tol.recon = 1e-8;
    tol.ortho = 1e-8;
    tol.eq_rel = 1e-6;
    return tol;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown tolerance profile '" + std::string(name) + "'");
}

std::vector<std::string> tolerance_profile_names() { return {"default", "fine", "loose"}; }

ToleranceConfig tolerance_from_environment() {
  const char* env = std::getenv("QLEB_TOL_PROFILE");
  return tolerance_profile(env ? std::string_view(env) : std::string_view("default"));
}

}  // namespace qleb
