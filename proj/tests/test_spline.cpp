#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "support.hpp"
#include "wqisa/knot_vector.hpp"
#include "wqisa/spline.hpp"
#include "wqisa/tolerances.hpp"

using namespace wqisa;

namespace {

std::vector<double> knots_of(const knot_vector& kv) { return {kv.knots().begin(), kv.knots().end()}; }

// Full-basis evaluation, used as the reference for the local-block evaluator.
double full_sum(const knot_vector& kv, std::span<const double> c, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < kv.size(); ++i) s += c[i] * bspline_eval(kv, i, x);
  return s;
}

}  // namespace

TEST_CASE("uniform regular knot vectors") {
  CHECK(knots_of(make_uniform_regular(0, 1, 3, 2)) == std::vector<double>{0, 0, 0, 1, 1, 1});
  CHECK(knots_of(make_uniform_regular(0, 2, 4, 2)) == std::vector<double>{0, 0, 0, 1, 2, 2, 2});
  CHECK(knots_of(make_uniform_regular(0, 1, 5, 1)) == std::vector<double>{0, 0, 0.25, 0.5, 0.75, 1, 1});
  CHECK(make_uniform_regular(-2, 2, 15, 2).is_regular());
  CHECK_FAILS_WITH(make_uniform_regular(1, 1, 3, 2), "invalid-domain");
  CHECK_FAILS_WITH(make_uniform_regular(0, 1, 2, 2), "too-few-functions");
  CHECK_FAILS_WITH(make_uniform_regular(0, 1, 2, 0), "invalid-degree");
}

TEST_CASE("knot vector validation") {
  CHECK_FAILS_WITH(knot_vector(1, {0, 2, 1}), "invalid-knots");
  CHECK_FAILS_WITH(knot_vector(1, {0, 0, 0, 1}), "multiplicity-overflow");
  CHECK_FAILS_WITH(knot_vector(-1, {0, 1}), "invalid-degree");
  const knot_vector kv(2, {0, 0, 0, 1, 1, 2, 2, 2});
  CHECK(kv.size() == 5);
  CHECK(kv.multiplicity(1.0) == 2);
  CHECK(kv.is_regular());
  CHECK_FALSE(knot_vector(1, {0, 1, 2}).is_regular());
}

TEST_CASE("bspline_eval small cases") {
  const knot_vector k0(0, {0, 1});
  CHECK(bspline_eval(k0, 0, 0.5) == 1.0);
  CHECK(bspline_eval(k0, 0, 1.5) == 0.0);
  const knot_vector k1(1, {0, 1, 2});
  CHECK(bspline_eval(k1, 0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bspline_eval(k1, 0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  const knot_vector k2(2, {0, 1, 2, 3});
  // (x^2/2 at the first piece, -(x-1.5)^2 + 3/4 on the middle piece)
  CHECK(std::abs(bspline_eval(k2, 0, 1.5) - 0.75) <= 1e-15);
  CHECK(bspline_eval(k2, 0, -0.1) == 0.0);
  CHECK(bspline_eval(k2, 0, 3.1) == 0.0);
  CHECK_FAILS_WITH(bspline_eval(k2, 1, 1.0), "index-out-of-range");
}

TEST_CASE("bspline_eval matches the naive recursion") {
  rng gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + static_cast<int>(gen.below(4));
    const std::size_t n = static_cast<std::size_t>(p) + 1 + gen.below(6);
    std::vector<double> interior(n - p - 1);
    for (auto& v : interior) v = std::round(gen.uniform(0.0, 1.0) * 8.0) / 8.0;  // repeated knots on purpose
    std::sort(interior.begin(), interior.end());
    std::vector<double> t(p + 1, 0.0);
    t.insert(t.end(), interior.begin(), interior.end());
    t.insert(t.end(), p + 1, 1.0);
    bool ok = true;
    for (std::size_t j = 0; j + p + 1 < t.size(); ++j) ok = ok && t[j] < t[j + p + 1];
    if (!ok) continue;
    const knot_vector kv(p, t);
    for (int s = 0; s < 20; ++s) {
      const double x = gen.uniform(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(bspline_eval(kv, i, x) - testing::cox_de_boor(t, i, p, x)) <= 1e-13);
    }
  }
}

TEST_CASE("right boundary takes the left limit") {
  const knot_vector kv = make_uniform_regular(0, 1, 3, 2);
  CHECK(bspline_eval(kv, 2, 1.0) == 1.0);
  CHECK(bspline_eval(kv, 0, 1.0) == 0.0);
}

TEST_CASE("knot averages") {
  CHECK(knot_averages(knot_vector(2, {0, 0, 0, 1, 2, 2, 2})) == std::vector<double>{0, 0.5, 1.5, 2});
  CHECK(knot_averages(knot_vector(2, {0, 0, 0, 1, 1, 1})) == std::vector<double>{0, 0.5, 1});
  CHECK(knot_averages(knot_vector(1, {0, 0, 0.25, 0.5, 0.75, 1, 1})) ==
        std::vector<double>{0, 0.25, 0.5, 0.75, 1});
}

TEST_CASE("basis_row examples") {
  const double lo1[] = {0.0}, hi1[] = {1.0};
  const std::size_t n3[] = {3};
  const int p2[] = {2};
  const tensor_space s1 = make_uniform_space(lo1, hi1, n3, p2);
  const double u0[] = {0.0};
  const basis_block b = basis_row(s1, u0);
  CHECK(b.first == std::vector<std::size_t>{0});
  CHECK(b.values == std::vector<double>{1, 0, 0});

  const double lo2[] = {0.0, 0.0}, hi2[] = {1.0, 1.0};
  const std::size_t n33[] = {3, 4};
  const int p22[] = {2, 2};
  const tensor_space s2 = make_uniform_space(lo2, hi2, n33, p22);
  const double corner[] = {0.0, 0.0};
  double total = 0.0;
  basis_row(s2, corner).for_each(s2, [&](std::size_t flat, double v) {
    total += v;
    if (flat == 0) CHECK(v == 1.0);
    else CHECK(v == 0.0);
  });
  CHECK(total == 1.0);
  const double outside[] = {1.5, 0.0};
  CHECK_FAILS_WITH(basis_row(s2, outside), "out-of-domain");
}

TEST_CASE("partition of unity and nonnegativity") {
  rng gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + gen.below(3);
    std::vector<double> lo(d), hi(d);
    std::vector<std::size_t> n(d);
    std::vector<int> p(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = gen.uniform(-3, 0);
      hi[k] = lo[k] + gen.uniform(0.5, 4);
      p[k] = 1 + static_cast<int>(gen.below(3));
      n[k] = static_cast<std::size_t>(p[k]) + 1 + gen.below(8);
    }
    const tensor_space s = make_uniform_space(lo, hi, n, p);
    std::vector<double> u(d);
    for (int i = 0; i < 1000 / 20; ++i) {
      for (std::size_t k = 0; k < d; ++k) u[k] = gen.uniform(lo[k], hi[k]);
      if (i == 0) u = hi;
      double sum = 0.0;
      bool nonneg = true;
      basis_row(s, u).for_each(s, [&](std::size_t, double v) {
        sum += v;
        nonneg = nonneg && v >= 0.0;
      });
      CHECK(std::abs(sum - 1.0) <= tol::partition_of_unity);
      CHECK(nonneg);
    }
  }
}

TEST_CASE("spline evaluation") {
  rng gen(5);
  const knot_vector kv(3, {0, 0, 0, 0, 0.2, 0.2, 0.7, 1, 1, 1, 1});
  const tensor_space s({kv});
  std::vector<double> c(kv.size());
  for (auto& v : c) v = gen.normal();

  const spline_function seven(s, std::vector<double>(kv.size(), 7.0));
  const spline_function f(s, c);
  const spline_function linear(s, knot_averages(kv));
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    const double u[] = {x};
    CHECK(std::abs(seven(u) - 7.0) <= 1e-12);
    CHECK(std::abs(f(u) - full_sum(kv, c, x)) <= 1e-12);
    CHECK(std::abs(linear(u) - x) <= tol::linear_reproduction);
  }
  std::vector<double> unit(kv.size(), 0.0);
  unit[3] = 1.0;
  const spline_function b3(s, unit);
  for (int i = 0; i < 100; ++i) {
    const double u[] = {gen.uniform()};
    CHECK(std::abs(spline_eval(b3, u) - bspline_eval(kv, 3, u[0])) <= 1e-14);
  }
  CHECK_FAILS_WITH(spline_function(s, std::vector<double>(3, 0.0)), "shape-mismatch");
}

TEST_CASE("continuity at knots of multiplicity m is C^(p-m)") {
  // p = 3 with a double knot at 0.4: value and first derivative agree across it.
  const knot_vector kv(3, {0, 0, 0, 0, 0.4, 0.4, 1, 1, 1, 1});
  const tensor_space s({kv});
  rng gen(9);
  std::vector<double> c(kv.size());
  for (auto& v : c) v = gen.normal();
  const spline_function f(s, c);
  auto at = [&](double x) {
    const double u[] = {x};
    return f(u);
  };
  CHECK(std::abs(at(std::nextafter(0.4, 0.0)) - at(0.4)) <= tol::continuity);
  const double h = 1e-6;
  const double left_slope = (at(0.4) - at(0.4 - h)) / h;
  const double right_slope = (at(0.4 + h) - at(0.4)) / h;
  CHECK(std::abs(left_slope - right_slope) <= 1e-3);
}

TEST_CASE("knot insertion preserves the function") {
  rng gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + static_cast<int>(gen.below(3));
    const std::size_t n = static_cast<std::size_t>(p) + 1 + gen.below(6);
    const double lo[] = {-1.0}, hi[] = {2.0};
    const std::size_t ns[] = {n};
    const int ps[] = {p};
    const tensor_space s = make_uniform_space(lo, hi, ns, ps);
    std::vector<double> c(n);
    for (auto& v : c) v = gen.normal();
    const spline_function f(s, c);
    const double z = gen.uniform(-0.99, 1.99);
    const spline_function g = insert_knot(f, 0, z);
    CHECK(g.space().extent(0) == n + 1);
    double drift = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double u[] = {-1.0 + 3.0 * i / 99.0};
      drift = std::max(drift, std::abs(f(u) - g(u)));
    }
    CHECK(drift <= tol::knot_insertion);
  }

  const double lo[] = {0.0}, hi[] = {1.0};
  const std::size_t ns[] = {4};
  const int ps[] = {2};
  const tensor_space s = make_uniform_space(lo, hi, ns, ps);
  const spline_function constant(s, std::vector<double>(4, 2.5));
  const spline_function c2 = insert_knot(constant, 0, 0.3);
  for (double v : c2.coefficients()) CHECK(std::abs(v - 2.5) <= 1e-14);

  spline_function lin(s, knot_averages(s.axis(0)));
  lin = insert_knot(insert_knot(insert_knot(lin, 0, 0.8), 0, 0.8), 0, 0.8);
  CHECK(lin.space().axis(0).multiplicity(0.8) == 3);
  for (int i = 0; i <= 50; ++i) {
    const double u[] = {i / 50.0};
    CHECK(std::abs(lin(u) - u[0]) <= tol::linear_reproduction);
  }
  CHECK_FAILS_WITH(insert_knot(lin, 0, 0.8), "multiplicity-overflow");
  CHECK_FAILS_WITH(insert_knot(lin, 0, 0.0), "knot-outside-domain");
  CHECK_FAILS_WITH(insert_knot(lin, 0, 1.5), "knot-outside-domain");
}

TEST_CASE("tensor knot insertion along each axis") {
  rng gen(4);
  const double lo[] = {0.0, -1.0}, hi[] = {1.0, 1.0};
  const std::size_t ns[] = {5, 4};
  const int ps[] = {2, 3};
  const tensor_space s = make_uniform_space(lo, hi, ns, ps);
  std::vector<double> c(s.size());
  for (auto& v : c) v = gen.normal();
  const spline_function f(s, c);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double z = axis == 0 ? 0.37 : 0.1;
    const spline_function g = insert_knot(f, axis, z);
    for (int i = 0; i < 100; ++i) {
      const double u[] = {gen.uniform(0, 1), gen.uniform(-1, 1)};
      CHECK(std::abs(f(u) - g(u)) <= tol::knot_insertion);
    }
  }
}
