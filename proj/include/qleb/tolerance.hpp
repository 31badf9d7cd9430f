#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qleb {

/// Numerical thresholds shared by every module.
///
/// All values are relative: `rank_rel` and `psd_floor` scale with the largest
/// eigenvalue of the matrix under test, `hermitian` with its largest entry,
/// `eq_rel` with the Frobenius norm of the reference matrix.
struct ToleranceConfig {
  double hermitian = 1e-10;
  double rank_rel = 1e-9;
  double psd_floor = 1e-10;
  double recon = 1e-10;
  double ortho = 1e-10;
  double eq_rel = 1e-8;

  /// Throws Error{InvalidArgument} unless every field is strictly positive
  /// and rank_rel < 1.
  void validate() const;
};

/// Named profiles: "default", "fine" (resolves eigenvalues down to 1e-22 of
/// the spectral radius; meant for exactly representable inputs) and "loose".
ToleranceConfig tolerance_profile(std::string_view name);

std::vector<std::string> tolerance_profile_names();

/// Profile selected by the QLEB_TOL_PROFILE environment variable, or the
/// default profile when unset.
ToleranceConfig tolerance_from_environment();

}  // namespace qleb
