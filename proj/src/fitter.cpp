#include "wqisa/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqisa/error.hpp"
#include "wqisa/parallel.hpp"

namespace wqisa {

namespace {

std::string format_site(std::span<const double> u) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t k = 0; k < u.size(); ++k) os << (k ? ", " : "") << u[k];
  os << ')';
  return os.str();
}

double weighted_mean(const sparse_weights& w, const point_cloud& cloud) {
  double value = 0.0;
  for (std::size_t e = 0; e < w.indices.size(); ++e) value += w.lambda[e] * cloud.y(w.indices[e]);
  return value;
}

[[noreturn]] void fail_empty(const std::vector<std::vector<double>>& sites) {
  std::string msg = std::to_string(sites.size()) + " knot average(s) have empty weight support:";
  for (std::size_t i = 0; i < sites.size() && i < 10; ++i) msg += " " + format_site(sites[i]);
  if (sites.size() > 10) msg += " ...";
  fail("empty-support", msg);
}

}  // namespace

wqisa_model::wqisa_model(spline_function spline, weight_spec weight, fit_policy policy,
                         std::size_t effective_count, fit_diagnostics diagnostics)
    : spline_(std::move(spline)),
      weight_(weight),
      policy_(policy),
      effective_count_(effective_count),
      diagnostics_(std::move(diagnostics)) {}

prepared_cloud prepare_cloud(const point_cloud& cloud, const tensor_space& space, const fit_policy& policy) {
  const std::size_t d = space.dim();
  if (cloud.dim() != d)
    fail("dimension-mismatch", "cloud has " + std::to_string(cloud.dim()) + " predictors, space has " +
                                   std::to_string(d) + " axes");
  const std::vector<double> lo = space.lower();
  const std::vector<double> hi = space.upper();
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> rows;
  x.reserve(cloud.size() * d);
  y.reserve(cloud.size());
  rows.reserve(cloud.size());
  std::size_t clipped = 0;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto xi = cloud.x(i);
    bool outside = false;
    for (std::size_t k = 0; k < d; ++k) outside = outside || xi[k] < lo[k] || xi[k] > hi[k];
    if (outside && policy.drop_outside) {
      ++dropped;
      continue;
    }
    if (outside) ++clipped;
    for (std::size_t k = 0; k < d; ++k) x.push_back(std::clamp(xi[k], lo[k], hi[k]));
    y.push_back(cloud.y(i));
    rows.push_back(i);
  }
  if (y.empty()) fail("empty-input", "no cloud point lies inside the domain box");
  return {neighbor_context(point_cloud(d, std::move(x), std::move(y))), std::move(rows), clipped, dropped};
}

double estimate_control_point(const neighbor_context& ctx, const weight_spec& weight, std::span<const double> u) {
  const sparse_weights w = weights_at(weight, u, ctx);
  if (w.indices.empty()) fail("empty-support", "knot average " + format_site(u) + " has empty weight support");
  return weighted_mean(w, ctx.cloud());
}

sparse_weights control_point_weights(const neighbor_context& ctx, const weight_spec& weight,
                                     std::span<const double> u, empty_support_policy policy) {
  sparse_weights w = weights_at(weight, u, ctx);
  if (w.indices.empty() && policy == empty_support_policy::nearest) {
    const auto nb = ctx.tree().knn(u, 1);
    w.indices = {nb.front().index};
    w.lambda = {1.0};
    w.lookups += 1;
  }
  return w;
}

std::vector<double> coefficient_site(const tensor_space& space, std::size_t flat) {
  const auto multi = space.multi_index(flat);
  std::vector<double> u(space.dim());
  for (std::size_t k = 0; k < space.dim(); ++k) {
    const knot_vector& kv = space.axis(k);
    const auto p = static_cast<std::size_t>(kv.degree());
    double sum = 0.0;
    for (std::size_t j = multi[k] + 1; j <= multi[k] + p; ++j) sum += kv[j];
    u[k] = std::clamp(sum / static_cast<double>(p), kv[multi[k] + 1], kv[multi[k] + p]);
  }
  return u;
}

std::vector<sparse_weights> coefficient_weights(const neighbor_context& ctx, const tensor_space& space,
                                                const weight_spec& weight, const fit_policy& policy,
                                                fit_diagnostics* diagnostics) {
  weight.validate();
  std::vector<sparse_weights> rows(space.size());
  parallel_for(space.size(), policy.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t c = begin; c < end; ++c)
      rows[c] = control_point_weights(ctx, weight, coefficient_site(space, c), policy.empty_support);
  });
  std::vector<std::vector<double>> empty;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].indices.empty()) empty.push_back(coefficient_site(space, c));
    if (diagnostics) {
      diagnostics->support_sizes.push_back(rows[c].indices.size());
      diagnostics->weight_lookups += rows[c].lookups;
      ++diagnostics->estimator_calls;
    }
  }
  if (!empty.empty()) fail_empty(empty);
  return rows;
}

wqisa_model fit(const point_cloud& cloud, const tensor_space& space, const weight_spec& weight,
                const fit_policy& policy) {
  weight.validate();
  prepared_cloud prep = prepare_cloud(cloud, space, policy);
  const neighbor_context& ctx = prep.context;
  const std::size_t n_points = ctx.cloud().size();

  fit_diagnostics diag;
  diag.clipped_points = prep.clipped;
  diag.dropped_points = prep.dropped;
  if (weight.family == weight_family::knn && weight.k > n_points)
    diag.warnings.push_back("knn k=" + std::to_string(weight.k) + " exceeds the " + std::to_string(n_points) +
                            " available points; clamped to k=" + std::to_string(n_points));
  if (prep.clipped > 0)
    diag.warnings.push_back(std::to_string(prep.clipped) + " point(s) outside the domain clipped for weighting");

  const std::size_t dim = space.size();
  const std::size_t workers = worker_count(policy.threads);
  std::vector<double> coefficients(dim);
  std::vector<std::size_t> support(dim);
  std::vector<std::size_t> lookups(dim);
  std::vector<char> fallback(dim, 0);
  std::vector<std::vector<char>> used(workers, std::vector<char>(n_points, 0));

  parallel_for(dim, policy.threads, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& mark = used[worker];
    for (std::size_t c = begin; c < end; ++c) {
      const std::vector<double> u = coefficient_site(space, c);
      sparse_weights w = weights_at(weight, u, ctx);
      lookups[c] = w.lookups;
      if (w.indices.empty()) {
        if (policy.empty_support == empty_support_policy::error) continue;
        w = control_point_weights(ctx, weight, u, policy.empty_support);
        fallback[c] = 1;
        lookups[c] = w.lookups;
      }
      support[c] = w.indices.size();
      coefficients[c] = weighted_mean(w, ctx.cloud());
      for (std::size_t i : w.indices) mark[i] = 1;
    }
  });

  std::vector<std::vector<double>> empty;
  for (std::size_t c = 0; c < dim; ++c) {
    if (support[c] == 0) empty.push_back(coefficient_site(space, c));
    if (fallback[c]) diag.fallback_cells.push_back(c);
    diag.weight_lookups += lookups[c];
  }
  if (!empty.empty()) fail_empty(empty);
  diag.estimator_calls = dim;
  diag.support_sizes = std::move(support);
  if (!diag.fallback_cells.empty())
    diag.warnings.push_back(std::to_string(diag.fallback_cells.size()) +
                            " coefficient(s) used the nearest-neighbor fallback");

  std::size_t effective = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    bool any = false;
    for (const auto& m : used) any = any || m[i];
    effective += any ? 1 : 0;
  }

  spline_function spline(space, std::move(coefficients));
  return wqisa_model(std::move(spline), weight, policy, effective, std::move(diag));
}

double evaluate(const wqisa_model& model, std::span<const double> u) { return model(u); }

global_bounds_result global_bounds(const wqisa_model& model, const point_cloud& cloud) {
  const double lo = cloud.y_min();
  const double hi = cloud.y_max();
  bool ok = true;
  for (double c : model.spline().coefficients()) ok = ok && c >= lo && c <= hi;
  return {lo, hi, ok};
}

local_bounds_result local_bounds(const wqisa_model& model, const point_cloud& cloud,
                                 std::span<const std::size_t> cell) {
  const tensor_space& space = model.space();
  if (cell.size() != space.dim()) fail("dimension-mismatch", "cell needs one span index per axis");
  std::vector<std::size_t> first(space.dim());
  std::vector<std::size_t> extent(space.dim());
  std::size_t count = 1;
  for (std::size_t k = 0; k < space.dim(); ++k) {
    const auto p = static_cast<std::size_t>(space.axis(k).degree());
    if (cell[k] < p || cell[k] >= space.extent(k))
      fail("invalid-cell", "span index " + std::to_string(cell[k]) + " on axis " + std::to_string(k) +
                               " outside [" + std::to_string(p) + ", " + std::to_string(space.extent(k) - 1) + "]");
    first[k] = cell[k] - p;
    extent[k] = p + 1;
    count *= p + 1;
  }

  const prepared_cloud prep = prepare_cloud(cloud, space, model.policy());
  std::vector<char> in_cell(prep.context.cloud().size(), 0);
  std::vector<std::size_t> local(space.dim(), 0);
  for (std::size_t e = 0; e < count; ++e) {
    std::vector<std::size_t> multi(space.dim());
    for (std::size_t k = 0; k < space.dim(); ++k) multi[k] = first[k] + local[k];
    const auto u = coefficient_site(space, space.flat_index(multi));
    const sparse_weights w = control_point_weights(prep.context, model.weight(), u, model.policy().empty_support);
    if (w.indices.empty()) fail("empty-support", "knot average " + format_site(u) + " has empty weight support");
    for (std::size_t i : w.indices) in_cell[i] = 1;
    for (std::size_t k = space.dim(); k-- > 0;) {
      if (++local[k] < extent[k]) break;
      local[k] = 0;
    }
  }

  local_bounds_result out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}};
  for (std::size_t i = 0; i < in_cell.size(); ++i) {
    if (!in_cell[i]) continue;
    const double y = prep.context.cloud().y(i);
    out.alpha = std::min(out.alpha, y);
    out.beta = std::max(out.beta, y);
    out.points.push_back(prep.original_rows[i]);
  }
  return out;
}

std::vector<std::size_t> effective_points(const wqisa_model& model, const point_cloud& cloud) {
  const prepared_cloud prep = prepare_cloud(cloud, model.space(), model.policy());
  std::vector<char> used(prep.context.cloud().size(), 0);
  for (std::size_t c = 0; c < model.space().size(); ++c) {
    const auto u = coefficient_site(model.space(), c);
    const sparse_weights w = control_point_weights(prep.context, model.weight(), u, model.policy().empty_support);
    for (std::size_t i : w.indices) used[i] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (used[i]) out.push_back(prep.original_rows[i]);
  return out;
}

namespace {

// Linear-interpolation sample quantile (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

outlier_filter_result iqr_outlier_filter(const point_cloud& cloud, const tensor_space& space,
                                         const weight_spec& weight, double factor, const fit_policy& policy) {
  if (cloud.size() < 4) fail("too-few-points", "outlier filter needs at least 4 points");
  if (!(factor >= 0.0)) fail("invalid-argument", "outlier factor must be nonnegative");
  const wqisa_model pilot = fit(cloud, space, weight, policy);
  const std::vector<double> lo = space.lower();
  const std::vector<double> hi = space.upper();

  std::vector<double> residual(cloud.size());
  std::vector<double> u(cloud.dim());
  double scale = 1.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.x(i);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::clamp(x[k], lo[k], hi[k]);
    residual[i] = cloud.y(i) - pilot(u);
    scale = std::max(scale, std::abs(cloud.y(i)));
  }
  std::vector<double> sorted = residual;
  std::sort(sorted.begin(), sorted.end());
  outlier_filter_result out{cloud, {}, {}, quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
  const double iqr = out.q3 - out.q1;
  // Rounding-level residuals must not trip the fences.
  const double slack = 1e-12 * scale;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const bool keep = iqr == 0.0 || (residual[i] >= out.q1 - factor * iqr - slack &&
                                     residual[i] <= out.q3 + factor * iqr + slack);
    (keep ? out.kept : out.removed).push_back(i);
  }
  if (!out.removed.empty()) out.cloud = cloud.subset(out.kept);
  return out;
}

}  // namespace wqisa
