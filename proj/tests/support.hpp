#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <doctest.h>

#include "wqisa/error.hpp"
#include "wqisa/point_cloud.hpp"
#include "wqisa/random.hpp"

// Asserts that `expr` throws wqisa::error with the given code.
#define CHECK_FAILS_WITH(expr, expected_code)                    \
  do {                                                           \
    std::string got_code_ = "<no throw>";                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const wqisa::error& e_) {                           \
      got_code_ = e_.code();                                     \
    }                                                            \
    CHECK(got_code_ == std::string(expected_code));              \
  } while (0)

namespace testing {

// Naive Cox-de Boor recursion over the global knot vector with 0/0 = 0 and
// half-open indicator intervals.
inline double cox_de_boor(std::span<const double> t, std::size_t i, int p, double x) {
  if (p == 0) return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  double left = 0.0, right = 0.0;
  const double dl = t[i + p] - t[i];
  const double dr = t[i + p + 1] - t[i + 1];
  if (dl != 0.0) left = (x - t[i]) / dl * cox_de_boor(t, i, p - 1, x);
  if (dr != 0.0) right = (t[i + p + 1] - x) / dr * cox_de_boor(t, i + 1, p - 1, x);
  return left + right;
}

inline wqisa::point_cloud random_cloud(wqisa::rng& gen, std::size_t n, std::size_t d, double lo = 0.0,
                                       double hi = 1.0,
                                       const std::function<double(std::span<const double>)>& f = {}) {
  std::vector<double> x(n * d), y(n);
  for (auto& v : x) v = gen.uniform(lo, hi);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> xi(x.data() + i * d, d);
    y[i] = f ? f(xi) : gen.normal();
  }
  return wqisa::point_cloud(d, std::move(x), std::move(y));
}

}  // namespace testing
