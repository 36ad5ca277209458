#include "wqisa/shape.hpp"

#include <algorithm>
#include <cmath>

#include "wqisa/error.hpp"

namespace wqisa {

namespace {

double tie_tolerance(std::span<const double> values) {
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  return 1e-12 * scale;
}

struct trend {
  bool up = true;
  bool down = true;
};

trend sequence_trend(std::span<const double> v, double tol) {
  trend t;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - tol) t.up = false;
    if (v[i] > v[i - 1] + tol) t.down = false;
  }
  return t;
}

std::vector<double> divided_differences(std::span<const double> c, const knot_vector& kv) {
  const auto p = static_cast<std::size_t>(kv.degree());
  std::vector<double> dc;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double h = kv[i + p] - kv[i];
    if (h > 0.0) dc.push_back((c[i] - c[i - 1]) / h);
    else if (!dc.empty()) dc.push_back(dc.back());
  }
  return dc;
}

bool is_continuous(const knot_vector& kv) {
  const auto p = static_cast<std::size_t>(kv.degree());
  for (std::size_t j = p + 1; j < kv.size(); ++j)
    if (kv.multiplicity(kv[j]) > p) return false;
  return true;
}

// Calls fn(slice) for every 1-D coefficient slice along axis.
template <class Fn>
void for_each_slice(const spline_function& f, std::size_t axis, Fn&& fn) {
  const tensor_space& space = f.space();
  const std::size_t n = space.extent(axis);
  const std::size_t inner = space.stride(axis);
  const std::size_t outer = space.size() / (n * inner);
  const auto c = f.coefficients();
  std::vector<double> slice(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) {
      for (std::size_t i = 0; i < n; ++i) slice[i] = c[(o * n + i) * inner + in];
      fn(std::span<const double>(slice));
    }
}

spline_function estimator_grid(const point_cloud& cloud, const weight_spec& weight, const tensor_space& space,
                               const fit_policy& policy) {
  return fit(cloud, space, weight, policy).spline();
}

}  // namespace

std::string to_string(monotonicity m) {
  switch (m) {
    case monotonicity::increasing: return "increasing";
    case monotonicity::decreasing: return "decreasing";
    case monotonicity::neither: return "neither";
  }
  return "neither";
}

std::string to_string(convexity c) {
  switch (c) {
    case convexity::convex: return "convex";
    case convexity::concave: return "concave";
    case convexity::neither: return "neither";
  }
  return "neither";
}

monotone_result classify_monotone(std::span<const double> values) {
  const trend t = sequence_trend(values, tie_tolerance(values));
  monotone_result r;
  r.constant = t.up && t.down;
  r.kind = t.up ? monotonicity::increasing : t.down ? monotonicity::decreasing : monotonicity::neither;
  return r;
}

convex_result classify_convex(std::span<const double> coefficients, const knot_vector& kv) {
  if (coefficients.size() != kv.size()) fail("shape-mismatch", "coefficient count differs from basis dimension");
  convex_result r;
  r.continuous = is_continuous(kv);
  const std::vector<double> dc = divided_differences(coefficients, kv);
  const trend t = sequence_trend(dc, tie_tolerance(dc));
  r.affine = t.up && t.down;
  if (!r.continuous) return r;
  r.kind = t.up ? convexity::convex : t.down ? convexity::concave : convexity::neither;
  return r;
}

monotone_result coefficient_monotonicity(const spline_function& f, std::size_t axis) {
  if (axis >= f.space().dim()) fail("index-out-of-range", "axis index out of range");
  bool up = true;
  bool down = true;
  bool constant = true;
  for_each_slice(f, axis, [&](std::span<const double> s) {
    const monotone_result m = classify_monotone(s);
    up = up && m.kind == monotonicity::increasing;
    down = down && (m.kind == monotonicity::decreasing || m.constant);
    constant = constant && m.constant;
  });
  monotone_result r;
  r.constant = constant;
  r.kind = up ? monotonicity::increasing : down ? monotonicity::decreasing : monotonicity::neither;
  return r;
}

convex_result coefficient_convexity(const spline_function& f, std::size_t axis) {
  if (axis >= f.space().dim()) fail("index-out-of-range", "axis index out of range");
  const knot_vector& kv = f.space().axis(axis);
  bool convex = true;
  bool concave = true;
  bool affine = true;
  bool continuous = true;
  for_each_slice(f, axis, [&](std::span<const double> s) {
    const convex_result c = classify_convex(s, kv);
    continuous = c.continuous;
    convex = convex && c.kind == convexity::convex;
    concave = concave && (c.kind == convexity::concave || (c.affine && c.continuous));
    affine = affine && c.affine;
  });
  convex_result r;
  r.continuous = continuous;
  r.affine = affine;
  r.kind = convex ? convexity::convex : concave ? convexity::concave : convexity::neither;
  return r;
}

monotone_result w_monotone_check(const point_cloud& cloud, const weight_spec& weight,
                                 std::span<const double> knot_averages, empty_support_policy policy) {
  if (cloud.dim() != 1) fail("dimension-mismatch", "univariate check needs a 1-D cloud");
  const neighbor_context ctx(cloud);
  std::vector<double> values;
  for (double xi : knot_averages) {
    const double u[1] = {xi};
    const sparse_weights w = control_point_weights(ctx, weight, u, policy);
    if (w.indices.empty()) fail("empty-support", "knot average " + std::to_string(xi) + " has empty weight support");
    double v = 0.0;
    for (std::size_t e = 0; e < w.indices.size(); ++e) v += w.lambda[e] * cloud.y(w.indices[e]);
    values.push_back(v);
  }
  return classify_monotone(values);
}

monotone_result w_monotone_check(const point_cloud& cloud, const weight_spec& weight, const tensor_space& space,
                                 std::size_t axis, const fit_policy& policy) {
  return coefficient_monotonicity(estimator_grid(cloud, weight, space, policy), axis);
}

convex_result w_convex_check(const point_cloud& cloud, const weight_spec& weight, const knot_vector& kv,
                             empty_support_policy policy) {
  if (cloud.dim() != 1) fail("dimension-mismatch", "univariate check needs a 1-D cloud");
  fit_policy fp;
  fp.empty_support = policy;
  const tensor_space space({kv});
  return coefficient_convexity(estimator_grid(cloud, weight, space, fp), 0);
}

convex_result w_convex_check(const point_cloud& cloud, const weight_spec& weight, const tensor_space& space,
                             std::size_t axis, const fit_policy& policy) {
  return coefficient_convexity(estimator_grid(cloud, weight, space, policy), axis);
}

}  // namespace wqisa
