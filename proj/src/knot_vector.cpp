#include "wqisa/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wqisa/error.hpp"

namespace wqisa {

knot_vector::knot_vector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) fail("invalid-degree", "degree must be nonnegative");
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < p + 2)
    fail("too-few-functions", "knot vector of degree " + std::to_string(degree_) + " needs at least " +
                                  std::to_string(p + 2) + " knots");
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (!std::isfinite(knots_[j])) fail("invalid-knots", "knots must be finite");
    if (j > 0 && knots_[j] < knots_[j - 1]) fail("invalid-knots", "knots must be nondecreasing");
  }
  std::size_t run = 1;
  for (std::size_t j = 1; j < knots_.size(); ++j) {
    run = knots_[j] == knots_[j - 1] ? run + 1 : 1;
    if (run > p + 1)
      fail("multiplicity-overflow", "knot " + std::to_string(knots_[j]) + " repeated more than p+1 times");
  }
}

bool knot_vector::is_regular() const noexcept {
  const auto p = static_cast<std::size_t>(degree_);
  const std::size_t n = size();
  if (n < p + 1) return false;
  if (knots_[0] != knots_[p] || knots_[n] != knots_[n + p]) return false;
  for (std::size_t j = 0; j < n; ++j)
    if (!(knots_[j] < knots_[j + p + 1])) return false;
  return true;
}

std::size_t knot_vector::multiplicity(double z) const noexcept {
  const auto range = std::equal_range(knots_.begin(), knots_.end(), z);
  return static_cast<std::size_t>(range.second - range.first);
}

std::size_t knot_vector::find_span(double x) const {
  if (!(x >= lower() && x <= upper()))
    fail("out-of-domain", "abscissa " + std::to_string(x) + " outside [" + std::to_string(lower()) + ", " +
                              std::to_string(upper()) + "]");
  const auto p = static_cast<std::size_t>(degree_);
  const std::size_t n = size();
  if (x == upper()) {
    std::size_t mu = n - 1;
    while (mu > p && !(knots_[mu] < knots_[mu + 1])) --mu;
    return mu;
  }
  const auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p),
                                   knots_.begin() + static_cast<std::ptrdiff_t>(n + 1), x);
  const auto mu = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::clamp(mu, p, n - 1);
}

void knot_vector::basis_funs(std::size_t span, double x, std::span<double> out) const {
  // Triangular Cox-de Boor recurrence over the p+1 functions active on the span.
  const auto p = static_cast<std::size_t>(degree_);
  double left[64];
  double right[64];
  if (p >= 64) fail("invalid-degree", "degree too large for local evaluation");
  out[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

knot_vector make_uniform_regular(double a, double b, std::size_t n, int p) {
  if (p < 1) fail("invalid-degree", "degree must be at least 1");
  if (!(a < b)) fail("invalid-domain", "domain requires a < b");
  const auto pp = static_cast<std::size_t>(p);
  if (n < pp + 1) fail("too-few-functions", "n must be at least p+1");
  std::vector<double> t;
  t.reserve(n + pp + 1);
  t.insert(t.end(), pp + 1, a);
  const std::size_t intervals = n - pp;
  for (std::size_t j = 1; j < intervals; ++j)
    t.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(intervals));
  t.insert(t.end(), pp + 1, b);
  return knot_vector(p, std::move(t));
}

double bspline_eval(const knot_vector& kv, std::size_t i, double x) {
  const std::size_t n = kv.size();
  if (i >= n) fail("index-out-of-range", "basis index " + std::to_string(i) + " >= " + std::to_string(n));
  const auto p = static_cast<std::size_t>(kv.degree());
  const auto all = kv.knots();
  const auto local = all.subspan(i, p + 2);
  if (!(local.front() < local.back())) return 0.0;
  if (x < local.front() || x > local.back()) return 0.0;

  // Degree-0 indicators on [t_j, t_{j+1}); at the global right end the last
  // nonempty interval is closed so the basis keeps its left limit.
  const bool right_end = x == all.back();
  std::vector<double> N(p + 1);
  for (std::size_t j = 0; j <= p; ++j) {
    const bool inside = local[j] <= x && x < local[j + 1];
    const bool closing = right_end && local[j] < local[j + 1] && local[j + 1] == x;
    N[j] = inside || closing ? 1.0 : 0.0;
  }
  for (std::size_t k = 1; k <= p; ++k) {
    double saved = N[0] == 0.0 ? 0.0 : (x - local[0]) * N[0] / (local[k] - local[0]);
    for (std::size_t j = 0; j + k <= p; ++j) {
      const double lo = local[j + 1];
      const double hi = local[j + k + 1];
      if (N[j + 1] == 0.0) {
        N[j] = saved;
        saved = 0.0;
      } else {
        const double temp = N[j + 1] / (hi - lo);
        N[j] = saved + (hi - x) * temp;
        saved = (x - lo) * temp;
      }
    }
  }
  return N[0];
}

std::vector<double> knot_averages(const knot_vector& kv) {
  if (kv.degree() < 1) fail("invalid-degree", "knot averages need degree >= 1");
  const auto p = static_cast<std::size_t>(kv.degree());
  std::vector<double> xi(kv.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1; j <= i + p; ++j) sum += kv[j];
    // Clamp so repeated boundary knots average to themselves exactly.
    xi[i] = std::clamp(sum / static_cast<double>(p), kv[i + 1], kv[i + p]);
  }
  return xi;
}

}  // namespace wqisa
