#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wqisa/fitter.hpp"

namespace wqisa {

enum class monotonicity { increasing, decreasing, neither };
enum class convexity { convex, concave, neither };

std::string to_string(monotonicity m);
std::string to_string(convexity c);

struct monotone_result {
  monotonicity kind = monotonicity::neither;
  bool constant = false;  // reported as increasing
};

struct convex_result {
  convexity kind = convexity::neither;
  bool affine = false;      // reported as convex
  bool continuous = true;   // false when an interior knot has multiplicity p+1
};

/// Classifies a sequence; differences within 1e-12 of the value scale count as ties.
monotone_result classify_monotone(std::span<const double> values);

/// Classifies the divided differences dc_i = (c_i - c_{i-1}) / (t_{i+p} - t_i),
/// carrying dc_{i-1} forward where t_i == t_{i+p}.
convex_result classify_convex(std::span<const double> coefficients, const knot_vector& kv);

/// Classification of every coefficient slice along `axis` of a tensor spline.
monotone_result coefficient_monotonicity(const spline_function& f, std::size_t axis);
convex_result coefficient_convexity(const spline_function& f, std::size_t axis);

/// w-monotonicity of a univariate cloud: classifies y_w at the given sites.
monotone_result w_monotone_check(const point_cloud& cloud, const weight_spec& weight,
                                 std::span<const double> knot_averages,
                                 empty_support_policy policy = empty_support_policy::error);

/// Axis-wise w-monotonicity on the estimator grid of a tensor space.
monotone_result w_monotone_check(const point_cloud& cloud, const weight_spec& weight, const tensor_space& space,
                                 std::size_t axis, const fit_policy& policy = {});

/// w-convexity of a univariate cloud over the regular knot vector kv.
convex_result w_convex_check(const point_cloud& cloud, const weight_spec& weight, const knot_vector& kv,
                             empty_support_policy policy = empty_support_policy::error);

convex_result w_convex_check(const point_cloud& cloud, const weight_spec& weight, const tensor_space& space,
                             std::size_t axis, const fit_policy& policy = {});

}  // namespace wqisa
