#pragma once

namespace wqisa::tol {

// Shared numerical tolerances. Tests and acceptance checks read these
// instead of repeating literals.
inline constexpr double partition_of_unity = 1e-12;
inline constexpr double knot_insertion = 1e-10;
inline constexpr double linear_reproduction = 1e-12;
inline constexpr double estimator_oracle = 1e-12;
inline constexpr double covariance_psd = 1e-10;
inline constexpr double variance_bound = 1e-12;
inline constexpr double bound_check = 1e-12;
inline constexpr double monotone_slope = 1e-10;
inline constexpr double convex_second_difference = 1e-8;
inline constexpr double continuity = 1e-8;

}  // namespace wqisa::tol
