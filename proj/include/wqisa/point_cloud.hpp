#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wqisa {

/// N records (x, y) with predictors x in R^d and response y.
/// Predictors are stored row-major.
class point_cloud {
 public:
  point_cloud(std::size_t dim, std::vector<double> predictors, std::vector<double> responses);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return y_.size(); }

  std::span<const double> x(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
  double y(std::size_t i) const { return y_[i]; }
  std::span<const double> predictors() const noexcept { return x_; }
  std::span<const double> responses() const noexcept { return y_; }

  std::span<const double> lower() const noexcept { return lo_; }
  std::span<const double> upper() const noexcept { return hi_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }

  point_cloud subset(std::span<const std::size_t> rows) const;
  point_cloud with_responses(std::vector<double> responses) const;

 private:
  std::size_t dim_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  double y_min_ = 0.0;
  double y_max_ = 0.0;
};

struct diameter_result {
  double value = 0.0;
  bool exact = true;  // false: bounding-box diagonal fallback
};

/// Diameter of the (x, y) records. Exact pairwise maximum up to `exact_limit`
/// points, otherwise the (x, y) bounding-box diagonal.
diameter_result cloud_diameter(const point_cloud& cloud, std::size_t exact_limit = 5000);

}  // namespace wqisa
