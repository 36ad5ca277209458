#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wqisa {

struct neighbor {
  std::size_t index;
  double distance;
};

/// Static k-d tree over d-dimensional points (row-major input).
///
/// Nodes split at the median of the axis with the largest spread; leaves hold
/// at most `leaf_size` points. Distances are compared squared and reported as
/// true Euclidean distances.
class kd_tree {
 public:
  static constexpr std::size_t leaf_size = 16;

  kd_tree(std::size_t dim, std::span<const double> points);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return order_.size(); }

  /// The k nearest points ordered by (distance, index); ties at equal distance
  /// go to the lower index.
  std::vector<neighbor> knn(std::span<const double> u, std::size_t k) const;

  /// Indices of all points with |x - u| <= r, unordered.
  std::vector<std::size_t> radius_query(std::span<const double> u, double r) const;

  /// Structural check used by tests: every index appears once and every
  /// node respects its split.
  bool validate() const;

 private:
  struct node {
    std::size_t begin;
    std::size_t end;
    std::size_t left = 0;   // 0 marks a leaf (the root is never a child)
    std::size_t right = 0;
    std::size_t axis = 0;
    double split = 0.0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  double coord(std::size_t slot, std::size_t k) const { return coords_[slot * dim_ + k]; }
  double dist2(std::size_t slot, std::span<const double> u) const;

  std::size_t dim_;
  std::vector<std::size_t> order_;  // slot -> original index
  std::vector<double> coords_;      // coordinates in slot order
  std::vector<node> nodes_;
};

}  // namespace wqisa
