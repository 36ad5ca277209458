#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wqisa/point_cloud.hpp"
#include "wqisa/spline.hpp"
#include "wqisa/weights.hpp"

namespace wqisa {

enum class empty_support_policy {
  error,    // abort, listing every knot average with no weighted points
  nearest,  // fall back to the 1-NN estimate at that knot average
};

struct fit_policy {
  empty_support_policy empty_support = empty_support_policy::error;
  // Points outside the domain box are clipped onto it for weighting unless dropped.
  bool drop_outside = false;
  std::size_t threads = 0;  // 0: WQISA_THREADS or hardware concurrency
};

struct fit_diagnostics {
  std::vector<std::size_t> support_sizes;   // per coefficient, flat order
  std::vector<std::size_t> fallback_cells;  // coefficients filled by the 1-NN fallback
  std::size_t estimator_calls = 0;
  std::size_t weight_lookups = 0;
  std::size_t clipped_points = 0;
  std::size_t dropped_points = 0;
  std::vector<std::string> warnings;
};

/// A fitted weighted quasi-interpolant: spline with estimator coefficients.
class wqisa_model {
 public:
  wqisa_model(spline_function spline, weight_spec weight, fit_policy policy, std::size_t effective_count,
              fit_diagnostics diagnostics);

  const spline_function& spline() const noexcept { return spline_; }
  const tensor_space& space() const noexcept { return spline_.space(); }
  const weight_spec& weight() const noexcept { return weight_; }
  const fit_policy& policy() const noexcept { return policy_; }
  std::size_t effective_count() const noexcept { return effective_count_; }
  const fit_diagnostics& diagnostics() const noexcept { return diagnostics_; }

  double operator()(std::span<const double> u) const { return spline_(u); }

 private:
  spline_function spline_;
  weight_spec weight_;
  fit_policy policy_;
  std::size_t effective_count_;
  fit_diagnostics diagnostics_;
};

/// The cloud as the estimator sees it: predictors clipped to (or rows dropped
/// outside) the domain box, with the map back to original row indices.
struct prepared_cloud {
  neighbor_context context;
  std::vector<std::size_t> original_rows;
  std::size_t clipped = 0;
  std::size_t dropped = 0;
};

prepared_cloud prepare_cloud(const point_cloud& cloud, const tensor_space& space, const fit_policy& policy);

/// y_w(u) = sum y w_u(x) / sum w_u(x). Throws `empty-support` when no point
/// carries weight at u.
double estimate_control_point(const neighbor_context& ctx, const weight_spec& weight, std::span<const double> u);

/// Normalized weights that define the coefficient at u, applying the
/// empty-support policy. Indices refer to the context's cloud.
sparse_weights control_point_weights(const neighbor_context& ctx, const weight_spec& weight,
                                     std::span<const double> u, empty_support_policy policy);

/// Estimator weights for every coefficient of the space, flat order.
std::vector<sparse_weights> coefficient_weights(const neighbor_context& ctx, const tensor_space& space,
                                                const weight_spec& weight, const fit_policy& policy,
                                                fit_diagnostics* diagnostics = nullptr);

/// Knot-average site of a flat coefficient index.
std::vector<double> coefficient_site(const tensor_space& space, std::size_t flat);

wqisa_model fit(const point_cloud& cloud, const tensor_space& space, const weight_spec& weight,
                const fit_policy& policy = {});

double evaluate(const wqisa_model& model, std::span<const double> u);

struct global_bounds_result {
  double lo;
  double hi;
  bool verified;  // every coefficient lies in [lo, hi]
};

global_bounds_result global_bounds(const wqisa_model& model, const point_cloud& cloud);

struct local_bounds_result {
  double alpha;
  double beta;
  std::vector<std::size_t> points;  // P_cell, original row indices, ascending
};

/// Bounds on the model over the knot cell whose span index per axis is
/// `cell[k]` in [p_k, n_k - 1].
local_bounds_result local_bounds(const wqisa_model& model, const point_cloud& cloud,
                                 std::span<const std::size_t> cell);

/// Rows that carry weight for at least one coefficient, ascending.
std::vector<std::size_t> effective_points(const wqisa_model& model, const point_cloud& cloud);

struct outlier_filter_result {
  point_cloud cloud;
  std::vector<std::size_t> kept;
  std::vector<std::size_t> removed;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Residual quartile filter against a pilot fit with the given space and
/// weight: keeps rows with residual in [Q1 - factor IQR, Q3 + factor IQR].
outlier_filter_result iqr_outlier_filter(const point_cloud& cloud, const tensor_space& space,
                                         const weight_spec& weight, double factor = 1.5,
                                         const fit_policy& policy = {});

}  // namespace wqisa
