#include "wqisa/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "wqisa/error.hpp"

namespace wqisa {

kd_tree::kd_tree(std::size_t dim, std::span<const double> points) : dim_(dim) {
  if (dim_ == 0) fail("invalid-dimension", "k-d tree dimension must be at least 1");
  if (points.empty()) fail("empty-input", "k-d tree needs at least one point");
  if (points.size() % dim_ != 0) fail("dimension-mismatch", "point array length is not a multiple of dim");
  const std::size_t n = points.size() / dim_;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  coords_.assign(points.begin(), points.end());
  nodes_.reserve(2 * (n / leaf_size + 1));
  build(0, n);

  // Reorder coordinates into slot order for locality during queries.
  std::vector<double> sorted(coords_.size());
  for (std::size_t s = 0; s < n; ++s)
    std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(order_[s] * dim_), dim_,
                sorted.begin() + static_cast<std::ptrdiff_t>(s * dim_));
  coords_ = std::move(sorted);
}

std::size_t kd_tree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size) return id;

  // coords_ is still in original order here; read through order_.
  const auto at = [&](std::size_t slot, std::size_t k) { return coords_[order_[slot] * dim_ + k]; };
  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double lo = at(begin, k);
    double hi = lo;
    for (std::size_t s = begin + 1; s < end; ++s) {
      lo = std::min(lo, at(s, k));
      hi = std::max(hi, at(s, k));
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = k;
    }
  }
  if (widest <= 0.0) return id;  // all points coincide: keep as one leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     return coords_[a * dim_ + axis] < coords_[b * dim_ + axis];
                   });
  const double split = coords_[order_[mid] * dim_ + axis];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  return id;
}

double kd_tree::dist2(std::size_t slot, std::span<const double> u) const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double t = coords_[slot * dim_ + k] - u[k];
    s += t * t;
  }
  return s;
}

std::vector<neighbor> kd_tree::knn(std::span<const double> u, std::size_t k) const {
  if (u.size() != dim_) fail("dimension-mismatch", "query point has wrong dimension");
  if (k < 1 || k > size())
    fail("k-out-of-range", "k = " + std::to_string(k) + " outside [1, " + std::to_string(size()) + "]");

  using entry = std::pair<double, std::size_t>;  // (squared distance, index), max-heap
  std::priority_queue<entry> heap;
  const auto offer = [&](double d2, std::size_t index) {
    if (heap.size() < k) heap.emplace(d2, index);
    else if (entry{d2, index} < heap.top()) {
      heap.pop();
      heap.emplace(d2, index);
    }
  };

  std::vector<std::size_t> stack{0};
  std::vector<double> gap{0.0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    const double g = gap.back();
    stack.pop_back();
    gap.pop_back();
    // Equal distance may still hide a lower index, so prune only on strict excess.
    if (heap.size() == k && g > heap.top().first) continue;
    const node& nd = nodes_[id];
    if (nd.left == 0) {
      for (std::size_t s = nd.begin; s < nd.end; ++s) offer(dist2(s, u), order_[s]);
      continue;
    }
    const double diff = u[nd.axis] - nd.split;
    const std::size_t near = diff <= 0.0 ? nd.left : nd.right;
    const std::size_t far = diff <= 0.0 ? nd.right : nd.left;
    stack.push_back(far);
    gap.push_back(std::max(g, diff * diff));
    stack.push_back(near);
    gap.push_back(g);
  }

  std::vector<neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

std::vector<std::size_t> kd_tree::radius_query(std::span<const double> u, double r) const {
  if (u.size() != dim_) fail("dimension-mismatch", "query point has wrong dimension");
  if (!(r > 0.0)) fail("invalid-radius", "radius must be positive");
  const double r2 = r * r;
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const node& nd = nodes_[stack.back()];
    stack.pop_back();
    if (nd.left == 0) {
      for (std::size_t s = nd.begin; s < nd.end; ++s)
        if (dist2(s, u) <= r2) out.push_back(order_[s]);
      continue;
    }
    const double diff = u[nd.axis] - nd.split;
    if (diff <= 0.0 || diff * diff <= r2) stack.push_back(nd.left);
    if (diff >= 0.0 || diff * diff <= r2) stack.push_back(nd.right);
  }
  return out;
}

bool kd_tree::validate() const {
  std::vector<bool> seen(size(), false);
  for (std::size_t idx : order_) {
    if (idx >= size() || seen[idx]) return false;
    seen[idx] = true;
  }
  for (const node& nd : nodes_) {
    if (nd.left == 0) continue;
    const node& l = nodes_[nd.left];
    const node& r = nodes_[nd.right];
    for (std::size_t s = l.begin; s < l.end; ++s)
      if (coord(s, nd.axis) > nd.split) return false;
    for (std::size_t s = r.begin; s < r.end; ++s)
      if (coord(s, nd.axis) < nd.split) return false;
  }
  return true;
}

}  // namespace wqisa
