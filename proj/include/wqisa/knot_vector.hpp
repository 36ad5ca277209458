#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wqisa {

/// Degree plus a nondecreasing global knot sequence t_0..t_{n+p}.
///
/// Indices are zero-based throughout: basis function i lives on the local
/// knot vector t_i..t_{i+p+1}, i in [0, n). A vector is (p+1)-regular when
/// n >= p+1, the first and last p+1 knots coincide, and t_j < t_{j+p+1}.
class knot_vector {
 public:
  knot_vector(int degree, std::vector<double> knots);

  int degree() const noexcept { return degree_; }
  std::span<const double> knots() const noexcept { return knots_; }
  double operator[](std::size_t j) const noexcept { return knots_[j]; }

  /// Basis dimension n = #knots - p - 1.
  std::size_t size() const noexcept { return knots_.size() - static_cast<std::size_t>(degree_) - 1; }

  /// Boundary knots a = t_p and b = t_n.
  double lower() const noexcept { return knots_[static_cast<std::size_t>(degree_)]; }
  double upper() const noexcept { return knots_[size()]; }

  bool is_regular() const noexcept;
  std::size_t multiplicity(double z) const noexcept;

  /// Knot span mu in [p, n-1] with t_mu <= x < t_{mu+1}. At x == b the last
  /// nonempty span is returned so the basis takes its left limit there.
  /// Requires a regular vector and x in [a, b].
  std::size_t find_span(double x) const;

  /// The p+1 nonzero basis values B_{mu-p..mu}(x) for span mu.
  void basis_funs(std::size_t span, double x, std::span<double> out) const;

  friend bool operator==(const knot_vector&, const knot_vector&) = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

/// p+1 copies of a, n-p-1 uniformly spaced interior knots, p+1 copies of b.
knot_vector make_uniform_regular(double a, double b, std::size_t n, int p);

/// Value of the i-th B-spline of kv at x, evaluated on its local knots only.
double bspline_eval(const knot_vector& kv, std::size_t i, double x);

/// Greville abscissae xi_i = (t_{i+1} + ... + t_{i+p}) / p, i in [0, n).
std::vector<double> knot_averages(const knot_vector& kv);

}  // namespace wqisa
