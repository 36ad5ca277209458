#include "wqisa/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wqisa/error.hpp"

namespace wqisa {

point_cloud::point_cloud(std::size_t dim, std::vector<double> predictors, std::vector<double> responses)
    : dim_(dim), x_(std::move(predictors)), y_(std::move(responses)) {
  if (dim_ == 0) fail("invalid-dimension", "predictor dimension must be at least 1");
  if (y_.empty()) fail("empty-input", "point cloud needs at least one point");
  if (x_.size() != y_.size() * dim_)
    fail("dimension-mismatch", "predictor array holds " + std::to_string(x_.size()) + " values, expected " +
                                   std::to_string(y_.size() * dim_));
  for (double v : x_)
    if (!std::isfinite(v)) fail("invalid-value", "non-finite predictor");
  for (double v : y_)
    if (!std::isfinite(v)) fail("invalid-value", "non-finite response");
  lo_.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(dim_));
  hi_ = lo_;
  for (std::size_t i = 1; i < size(); ++i)
    for (std::size_t k = 0; k < dim_; ++k) {
      lo_[k] = std::min(lo_[k], x_[i * dim_ + k]);
      hi_[k] = std::max(hi_[k], x_[i * dim_ + k]);
    }
  const auto [mn, mx] = std::minmax_element(y_.begin(), y_.end());
  y_min_ = *mn;
  y_max_ = *mx;
}

point_cloud point_cloud::subset(std::span<const std::size_t> rows) const {
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(rows.size() * dim_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto xr = this->x(r);
    x.insert(x.end(), xr.begin(), xr.end());
    y.push_back(y_[r]);
  }
  return point_cloud(dim_, std::move(x), std::move(y));
}

point_cloud point_cloud::with_responses(std::vector<double> responses) const {
  return point_cloud(dim_, x_, std::move(responses));
}

diameter_result cloud_diameter(const point_cloud& cloud, std::size_t exact_limit) {
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dim();
  if (n > exact_limit) {
    double s = (cloud.y_max() - cloud.y_min()) * (cloud.y_max() - cloud.y_min());
    for (std::size_t k = 0; k < d; ++k) s += (cloud.upper()[k] - cloud.lower()[k]) * (cloud.upper()[k] - cloud.lower()[k]);
    return {std::sqrt(s), false};
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = (cloud.y(i) - cloud.y(j)) * (cloud.y(i) - cloud.y(j));
      const auto a = cloud.x(i);
      const auto b = cloud.x(j);
      for (std::size_t k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      best = std::max(best, s);
    }
  return {std::sqrt(best), true};
}

}  // namespace wqisa
