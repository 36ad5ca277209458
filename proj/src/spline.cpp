#include "wqisa/spline.hpp"

#include <string>

#include "wqisa/error.hpp"

namespace wqisa {

tensor_space::tensor_space(std::vector<knot_vector> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) fail("invalid-space", "tensor space needs at least one axis");
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (axes_[k].degree() < 1) fail("invalid-degree", "axis " + std::to_string(k) + " has degree < 1");
    if (!axes_[k].is_regular()) fail("not-regular", "axis " + std::to_string(k) + " knot vector is not regular");
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= axes_[k].size();
  }
}

std::size_t tensor_space::flat_index(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dim(); ++k) flat += multi[k] * strides_[k];
  return flat;
}

std::vector<std::size_t> tensor_space::multi_index(std::size_t flat) const {
  std::vector<std::size_t> multi(dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    multi[k] = flat / strides_[k];
    flat %= strides_[k];
  }
  return multi;
}

bool tensor_space::contains(std::span<const double> u) const {
  if (u.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k)
    if (!(u[k] >= axes_[k].lower() && u[k] <= axes_[k].upper())) return false;
  return true;
}

std::vector<double> tensor_space::lower() const {
  std::vector<double> lo;
  for (const auto& kv : axes_) lo.push_back(kv.lower());
  return lo;
}

std::vector<double> tensor_space::upper() const {
  std::vector<double> hi;
  for (const auto& kv : axes_) hi.push_back(kv.upper());
  return hi;
}

std::vector<std::vector<double>> tensor_space::greville() const {
  std::vector<std::vector<double>> xi;
  for (const auto& kv : axes_) xi.push_back(knot_averages(kv));
  return xi;
}

tensor_space make_uniform_space(std::span<const double> lo, std::span<const double> hi,
                                std::span<const std::size_t> n, std::span<const int> degree) {
  const std::size_t d = lo.size();
  if (hi.size() != d || n.size() != d || degree.size() != d)
    fail("dimension-mismatch", "per-axis parameter lists differ in length");
  std::vector<knot_vector> axes;
  for (std::size_t k = 0; k < d; ++k) axes.push_back(make_uniform_regular(lo[k], hi[k], n[k], degree[k]));
  return tensor_space(std::move(axes));
}

basis_block basis_row(const tensor_space& space, std::span<const double> u) {
  if (!space.contains(u)) fail("out-of-domain", "evaluation point outside the spline domain");
  const std::size_t d = space.dim();
  basis_block block;
  block.first.resize(d);
  block.extent.resize(d);
  std::vector<std::vector<double>> per_axis(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    const auto& kv = space.axis(k);
    const auto p = static_cast<std::size_t>(kv.degree());
    const std::size_t mu = kv.find_span(u[k]);
    per_axis[k].resize(p + 1);
    kv.basis_funs(mu, u[k], per_axis[k]);
    block.first[k] = mu - p;
    block.extent[k] = p + 1;
    total *= p + 1;
  }
  block.values.assign(total, 1.0);
  // Outer product, last axis fastest.
  std::size_t repeat = total;
  for (std::size_t k = 0; k < d; ++k) {
    repeat /= block.extent[k];
    for (std::size_t e = 0; e < total; ++e) block.values[e] *= per_axis[k][(e / repeat) % block.extent[k]];
  }
  return block;
}

spline_function::spline_function(tensor_space space, std::vector<double> coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space_.size())
    fail("shape-mismatch", "coefficient count " + std::to_string(coefficients_.size()) + " != space dimension " +
                               std::to_string(space_.size()));
}

double spline_function::operator()(std::span<const double> u) const {
  const basis_block block = basis_row(space_, u);
  double value = 0.0;
  block.for_each(space_, [&](std::size_t flat, double b) { value += coefficients_[flat] * b; });
  return value;
}

double spline_eval(const spline_function& f, std::span<const double> u) { return f(u); }

spline_function insert_knot(const spline_function& f, std::size_t axis, double z) {
  const tensor_space& space = f.space();
  if (axis >= space.dim()) fail("index-out-of-range", "axis index out of range");
  const knot_vector& kv = space.axis(axis);
  if (!(z > kv.lower() && z < kv.upper()))
    fail("knot-outside-domain", "inserted knot must lie strictly inside the domain");
  const auto p = static_cast<std::size_t>(kv.degree());
  if (kv.multiplicity(z) + 1 > p + 1) fail("multiplicity-overflow", "knot multiplicity would exceed p+1");

  const std::size_t mu = kv.find_span(z);
  const auto old_knots = kv.knots();
  std::vector<double> knots(old_knots.begin(), old_knots.end());
  knots.insert(knots.begin() + static_cast<std::ptrdiff_t>(mu + 1), z);

  // Boehm weights: new coefficient i blends old i-1 and i for mu-p+1 <= i <= mu.
  const std::size_t n = kv.size();
  std::vector<double> alpha(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    if (i + p <= mu) alpha[i] = 1.0;
    else if (i > mu) alpha[i] = 0.0;
    else alpha[i] = (z - kv[i]) / (kv[i + p] - kv[i]);
  }

  std::vector<knot_vector> axes(space.axes().begin(), space.axes().end());
  axes[axis] = knot_vector(kv.degree(), std::move(knots));
  tensor_space refined(std::move(axes));

  std::vector<double> out(refined.size());
  const auto old = f.coefficients();
  const std::size_t outer = space.size() / (n * space.stride(axis));
  const std::size_t inner = space.stride(axis);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const auto src = [&](std::size_t i) { return old[(o * n + i) * inner + in]; };
      for (std::size_t i = 0; i <= n; ++i) {
        double c;
        if (alpha[i] == 1.0 && i < n) c = src(i);
        else if (alpha[i] == 0.0) c = src(i - 1);
        else c = alpha[i] * src(i) + (1.0 - alpha[i]) * src(i - 1);
        out[(o * (n + 1) + i) * inner + in] = c;
      }
    }
  }
  return spline_function(std::move(refined), std::move(out));
}

}  // namespace wqisa
