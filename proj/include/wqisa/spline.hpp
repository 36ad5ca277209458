#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wqisa/knot_vector.hpp"

namespace wqisa {

/// Tensor product of d regular univariate spline spaces, all degrees >= 1.
/// Coefficients are stored row-major: the last axis varies fastest.
class tensor_space {
 public:
  explicit tensor_space(std::vector<knot_vector> axes);

  std::size_t dim() const noexcept { return axes_.size(); }
  const knot_vector& axis(std::size_t k) const { return axes_[k]; }
  std::span<const knot_vector> axes() const noexcept { return axes_; }

  /// n_k along axis k.
  std::size_t extent(std::size_t k) const { return axes_[k].size(); }
  /// Product of all n_k.
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  std::size_t flat_index(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;

  bool contains(std::span<const double> u) const;
  std::vector<double> lower() const;
  std::vector<double> upper() const;

  /// Knot averages along every axis, indexed [axis][i].
  std::vector<std::vector<double>> greville() const;

  friend bool operator==(const tensor_space&, const tensor_space&) = default;

 private:
  std::vector<knot_vector> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// Convenience: uniform regular knot vectors on [lo_k, hi_k] with n_k functions of degree p_k.
tensor_space make_uniform_space(std::span<const double> lo, std::span<const double> hi,
                                std::span<const std::size_t> n, std::span<const int> degree);

/// Nonzero tensor basis values at a point.
struct basis_block {
  std::vector<std::size_t> first;   // first active index per axis (span - p)
  std::vector<std::size_t> extent;  // p_k + 1 per axis
  std::vector<double> values;       // row-major over the local block

  /// Calls fn(flat coefficient index, basis value) for every entry of the block.
  template <class Fn>
  void for_each(const tensor_space& space, Fn&& fn) const;
};

basis_block basis_row(const tensor_space& space, std::span<const double> u);

class spline_function {
 public:
  spline_function(tensor_space space, std::vector<double> coefficients);

  const tensor_space& space() const noexcept { return space_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }

  double operator()(std::span<const double> u) const;

 private:
  tensor_space space_;
  std::vector<double> coefficients_;
};

double spline_eval(const spline_function& f, std::span<const double> u);

/// Inserts z once into the knot vector of `axis`; the returned spline equals f pointwise.
spline_function insert_knot(const spline_function& f, std::size_t axis, double z);

template <class Fn>
void basis_block::for_each(const tensor_space& space, Fn&& fn) const {
  const std::size_t d = first.size();
  std::vector<std::size_t> local(d, 0);
  for (std::size_t e = 0; e < values.size(); ++e) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < d; ++k) flat += (first[k] + local[k]) * space.stride(k);
    fn(flat, values[e]);
    for (std::size_t k = d; k-- > 0;) {
      if (++local[k] < extent[k]) break;
      local[k] = 0;
    }
  }
}

}  // namespace wqisa
