#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wqisa/inference.hpp"
#include "wqisa/point_cloud.hpp"

namespace wqisa {

/// Residual statistics of observed against predicted values, residual = observed - predicted.
struct error_report {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population standard deviation
  std::optional<double> hausdorff;
  std::optional<double> jaccard;
  std::optional<double> band_coverage;
};

error_report dispersion(std::span<const double> observed, std::span<const double> predicted);

/// Flat row-major point set in R^dim.
struct point_set {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> at(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

/// The (x, y) records of a cloud as points in R^{d+1}.
point_set records(const point_cloud& cloud);

/// max over a in A of min over b in B of |a - b|, without normalization.
double directed_hausdorff(const point_set& a, const point_set& b);

/// Directed Hausdorff distance divided by `diameter`.
double directed_hausdorff_normalized(const point_set& a, const point_set& b, double diameter);

/// Directed Hausdorff distance divided by the diameter of the reference cloud's records.
double directed_hausdorff_normalized(const point_set& a, const point_set& b, const point_cloud& reference);

/// A discrete set element, e.g. integer grid coordinates.
using cell_key = std::vector<std::int64_t>;

/// |A ∩ B| / |A ∪ B| with duplicates ignored.
double jaccard(std::span<const cell_key> a, std::span<const cell_key> b);

/// Snaps each point to floor(x / cell) per coordinate.
std::vector<cell_key> snap_to_grid(const point_set& points, double cell);

/// Default snapping cell: 1/512 of the bounding-box diagonal of both sets together.
double default_jaccard_cell(const point_set& a, const point_set& b);

/// Jaccard index of two point sets after grid snapping; cell <= 0 picks the default.
double jaccard_points(const point_set& a, const point_set& b, double cell = 0.0);

/// Fraction of cloud records whose response lies inside the standard-error
/// band at its predictor (clipped onto the domain box).
double band_coverage(const point_cloud& cloud, const wqisa_model& model, const coefficient_covariance& cov,
                     double alpha);

}  // namespace wqisa
