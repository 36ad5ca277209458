#include "wqisa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "wqisa/error.hpp"
#include "wqisa/kd_tree.hpp"

namespace wqisa {

error_report dispersion(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size())
    fail("length-mismatch", "observed and predicted sequences differ in length");
  if (observed.empty()) fail("empty-set", "dispersion needs at least one value");
  const std::size_t n = observed.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = observed[i] - predicted[i];

  error_report out;
  double sq = 0.0, ab = 0.0, sum = 0.0;
  for (double v : r) {
    sq += v * v;
    ab += std::abs(v);
    sum += v;
  }
  const double nd = static_cast<double>(n);
  out.mse = sq / nd;
  out.mae = ab / nd;
  out.rmse = std::sqrt(out.mse);
  out.mean = sum / nd;
  double var = 0.0;
  for (double v : r) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / nd);

  std::sort(r.begin(), r.end());
  out.min = r.front();
  out.max = r.back();
  out.median = n % 2 == 1 ? r[n / 2] : 0.5 * (r[n / 2 - 1] + r[n / 2]);
  return out;
}

point_set records(const point_cloud& cloud) {
  point_set out{cloud.dim() + 1, {}};
  out.coords.reserve(cloud.size() * out.dim);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.x(i);
    out.coords.insert(out.coords.end(), x.begin(), x.end());
    out.coords.push_back(cloud.y(i));
  }
  return out;
}

double directed_hausdorff(const point_set& a, const point_set& b) {
  if (a.size() == 0 || b.size() == 0) fail("empty-set", "directed Hausdorff distance needs nonempty sets");
  if (a.dim != b.dim) fail("shape-mismatch", "point sets differ in dimension");
  const kd_tree tree(b.dim, b.coords);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, tree.knn(a.at(i), 1).front().distance);
  return worst;
}

double directed_hausdorff_normalized(const point_set& a, const point_set& b, double diameter) {
  if (!(diameter > 0.0) || !std::isfinite(diameter))
    fail("zero-diameter", "reference diameter must be positive and finite");
  return directed_hausdorff(a, b) / diameter;
}

double directed_hausdorff_normalized(const point_set& a, const point_set& b, const point_cloud& reference) {
  return directed_hausdorff_normalized(a, b, cloud_diameter(reference).value);
}

double jaccard(std::span<const cell_key> a, std::span<const cell_key> b) {
  const std::set<cell_key> sa(a.begin(), a.end());
  const std::set<cell_key> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) fail("both-empty", "Jaccard index of two empty sets is undefined");
  std::size_t common = 0;
  for (const auto& k : sa) common += sb.count(k);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::vector<cell_key> snap_to_grid(const point_set& points, double cell) {
  if (!(cell > 0.0) || !std::isfinite(cell)) fail("invalid-cell", "grid cell size must be positive and finite");
  std::vector<cell_key> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell_key key;
    for (double v : points.at(i)) key.push_back(static_cast<std::int64_t>(std::floor(v / cell)));
    out.push_back(std::move(key));
  }
  return out;
}

double default_jaccard_cell(const point_set& a, const point_set& b) {
  const std::size_t d = a.size() > 0 ? a.dim : b.dim;
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const point_set* s : {&a, &b}) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      const auto p = s->at(i);
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
  }
  double diag = 0.0;
  for (std::size_t k = 0; k < d; ++k)
    if (hi[k] >= lo[k]) diag += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  diag = std::sqrt(diag);
  return diag > 0.0 ? diag / 512.0 : 1.0;
}

double jaccard_points(const point_set& a, const point_set& b, double cell) {
  if (a.size() > 0 && b.size() > 0 && a.dim != b.dim) fail("shape-mismatch", "point sets differ in dimension");
  if (cell <= 0.0) cell = default_jaccard_cell(a, b);
  const auto ka = snap_to_grid(a, cell);
  const auto kb = snap_to_grid(b, cell);
  return jaccard(ka, kb);
}

double band_coverage(const point_cloud& cloud, const wqisa_model& model, const coefficient_covariance& cov,
                     double alpha) {
  if (cloud.size() == 0) fail("empty-set", "band coverage needs at least one point");
  const auto lo = model.space().lower();
  const auto hi = model.space().upper();
  std::vector<double> x(cloud.dim());
  std::size_t inside = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto xi = cloud.x(i);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(xi[k], lo[k], hi[k]);
    const band b = se_band(model, cov, x, alpha);
    if (cloud.y(i) >= b.lo && cloud.y(i) <= b.hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(cloud.size());
}

}  // namespace wqisa
