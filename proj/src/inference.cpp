#include "wqisa/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wqisa/error.hpp"
#include "wqisa/parallel.hpp"
#include "wqisa/random.hpp"

namespace wqisa {

namespace {

template <std::size_t N>
double horner(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

double sparse_dot(const sparse_weights& a, const sparse_weights& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (b.indices[j] < a.indices[i]) {
      ++j;
    } else {
      sum += a.lambda[i] * b.lambda[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    fail("invalid-probability", "quantile probability must lie in [0, 1]");
  }
  static constexpr double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2, 1.9715909503065514427e+3,
                                 1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1,
                                 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3,
                                 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4,
                                 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0,  5.76949722146069140550e0,
                                 3.64784832476320460504e0,  1.27045825245236838258e0,  2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0,
                                 1.67638483018380384940e0,
                                 6.89767334985100004550e-1,
                                 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2,
                                 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0,  1.78482653991729133580e0,
                                 2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1,
                                 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2,
                                 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5,
                                 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    value = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -value : value;
}

coefficient_covariance::coefficient_covariance(std::vector<sparse_weights> rows, double sigma2,
                                               std::size_t n_points)
    : rows_(std::move(rows)), sigma2_(sigma2), n_points_(n_points) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) fail("invalid-noise", "noise variance must be finite and >= 0");
  if (rows_.size() <= dense_limit) {
    const std::size_t m = rows_.size();
    dense_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        const double v = sigma2_ * sparse_dot(rows_[i], rows_[j]);
        dense_[i * m + j] = v;
        dense_[j * m + i] = v;
      }
    }
  }
}

double coefficient_covariance::operator()(std::size_t i, std::size_t j) const {
  if (i >= rows_.size() || j >= rows_.size()) fail("index-out-of-range", "covariance index out of range");
  if (!dense_.empty()) return dense_[i * rows_.size() + j];
  return sigma2_ * sparse_dot(rows_[i], rows_[j]);
}

std::vector<double> coefficient_covariance::dense() const {
  if (!dense_.empty()) return dense_;
  const std::size_t m = rows_.size();
  std::vector<double> out(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = sigma2_ * sparse_dot(rows_[i], rows_[j]);
  return out;
}

coefficient_covariance covariance(const point_cloud& cloud, const tensor_space& space, const weight_spec& weight,
                                  noise_model noise, const fit_policy& policy) {
  if (!(noise.sigma_eps >= 0.0)) fail("invalid-noise", "noise standard deviation must be >= 0");
  const prepared_cloud prep = prepare_cloud(cloud, space, policy);
  auto rows = coefficient_weights(prep.context, space, weight, policy);
  return coefficient_covariance(std::move(rows), noise.sigma_eps * noise.sigma_eps, prep.context.cloud().size());
}

coefficient_covariance covariance(const wqisa_model& model, const point_cloud& cloud, noise_model noise) {
  return covariance(cloud, model.space(), model.weight(), noise, model.policy());
}

double variance_at(const wqisa_model& model, const coefficient_covariance& cov, std::span<const double> u) {
  if (cov.size() != model.space().size()) fail("shape-mismatch", "covariance does not match the model's space");
  const basis_block block = basis_row(model.space(), u);
  // Var = sigma^2 |sum_i B_i(u) lambda_i|^2, accumulated as a sparse vector over points.
  std::vector<std::pair<std::size_t, double>> acc;
  block.for_each(model.space(), [&](std::size_t flat, double b) {
    if (b == 0.0) return;
    const sparse_weights& row = cov.row(flat);
    for (std::size_t t = 0; t < row.indices.size(); ++t) acc.emplace_back(row.indices[t], b * row.lambda[t]);
  });
  std::sort(acc.begin(), acc.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  double sum = 0.0;
  for (std::size_t i = 0; i < acc.size();) {
    double v = 0.0;
    std::size_t j = i;
    for (; j < acc.size() && acc[j].first == acc[i].first; ++j) v += acc[j].second;
    sum += v * v;
    i = j;
  }
  return cov.sigma2() * sum;
}

band se_band(const wqisa_model& model, const coefficient_covariance& cov, std::span<const double> u, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail("invalid-alpha", "alpha must lie in (0, 1)");
  const double center = model(u);
  const double half = normal_quantile(1.0 - alpha) * std::sqrt(std::max(0.0, variance_at(model, cov, u)));
  return {center - half, center, center + half};
}

double estimate_noise_sigma(const wqisa_model& model, const point_cloud& cloud) {
  if (cloud.size() == 0) fail("too-few-points", "noise estimate needs at least one point");
  const auto lo = model.space().lower();
  const auto hi = model.space().upper();
  std::vector<double> x(cloud.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto xi = cloud.x(i);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(xi[k], lo[k], hi[k]);
    const double r = cloud.y(i) - model(x);
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(cloud.size()));
}

namespace {

struct design_weights {
  std::vector<sparse_weights> rows;
  std::vector<double> truth;  // f at the original predictor of each prepared point
};

design_weights prepare_design(const point_cloud& design, const truth_function& f, const tensor_space& space,
                              const weight_spec& weight, const fit_policy& policy) {
  const prepared_cloud prep = prepare_cloud(design, space, policy);
  design_weights out;
  out.rows = coefficient_weights(prep.context, space, weight, policy);
  out.truth.resize(prep.original_rows.size());
  for (std::size_t k = 0; k < prep.original_rows.size(); ++k) out.truth[k] = f(design.x(prep.original_rows[k]));
  return out;
}

expected_coefficient summarize(const sparse_weights& row, const std::vector<double>& truth) {
  expected_coefficient c{0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t t = 0; t < row.indices.size(); ++t) {
    const double v = truth[row.indices[t]];
    c.expected += row.lambda[t] * v;
    c.lo = std::min(c.lo, v);
    c.hi = std::max(c.hi, v);
  }
  return c;
}

}  // namespace

std::vector<expected_coefficient> expected_coefficients(const point_cloud& design, const truth_function& f,
                                                        const tensor_space& space, const weight_spec& weight,
                                                        const fit_policy& policy) {
  const design_weights dw = prepare_design(design, f, space, weight, policy);
  std::vector<expected_coefficient> out;
  out.reserve(dw.rows.size());
  for (const auto& row : dw.rows) out.push_back(summarize(row, dw.truth));
  return out;
}

bias_bounds bias_bounds_at(const point_cloud& design, const truth_function& f, const tensor_space& space,
                           const weight_spec& weight, std::span<const double> u, const fit_policy& policy) {
  const design_weights dw = prepare_design(design, f, space, weight, policy);
  const basis_block block = basis_row(space, u);
  bias_bounds out{};
  out.alpha = std::numeric_limits<double>::infinity();
  out.beta = -std::numeric_limits<double>::infinity();
  block.for_each(space, [&](std::size_t flat, double b) {
    const expected_coefficient c = summarize(dw.rows[flat], dw.truth);
    out.expected_fit += b * c.expected;
    if (b == 0.0) return;
    out.alpha = std::min(out.alpha, c.lo);
    out.beta = std::max(out.beta, c.hi);
  });
  out.truth = f(u);
  const double bias = out.expected_fit - out.truth;
  out.squared_bias = bias * bias;
  const double edge = out.expected_fit <= out.truth ? out.alpha : out.beta;
  out.squared_bias_bound = (edge - out.truth) * (edge - out.truth);
  return out;
}

std::vector<std::vector<std::size_t>> make_fold_assignments(std::size_t n_points, std::size_t folds,
                                                            std::size_t repeats, std::uint64_t seed) {
  if (folds < 2 || folds > n_points)
    fail("fold-too-small", "fold count " + std::to_string(folds) + " must lie in [2, " + std::to_string(n_points) +
                               "]");
  if (repeats == 0) fail("invalid-repeats", "at least one CV repeat is required");
  rng gen(seed);
  std::vector<std::vector<std::size_t>> out(repeats, std::vector<std::size_t>(n_points));
  std::vector<std::size_t> order(n_points);
  for (auto& assignment : out) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    gen.shuffle(std::span<std::size_t>(order));
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t begin = f * n_points / folds;
      const std::size_t end = (f + 1) * n_points / folds;
      for (std::size_t pos = begin; pos < end; ++pos) assignment[order[pos]] = f;
    }
  }
  return out;
}

cv_result kfold_cv(const point_cloud& cloud, std::span<const cv_candidate> candidates, std::size_t folds,
                   std::size_t repeats, std::uint64_t seed, const fit_policy& policy,
                   std::optional<std::vector<double>> domain_lo, std::optional<std::vector<double>> domain_hi) {
  const auto assignments = make_fold_assignments(cloud.size(), folds, repeats, seed);
  return kfold_cv(cloud, candidates, assignments, folds, policy, std::move(domain_lo), std::move(domain_hi));
}

cv_result kfold_cv(const point_cloud& cloud, std::span<const cv_candidate> candidates,
                   const std::vector<std::vector<std::size_t>>& assignments, std::size_t folds,
                   const fit_policy& policy, std::optional<std::vector<double>> domain_lo,
                   std::optional<std::vector<double>> domain_hi) {
  if (candidates.empty()) fail("empty-grid", "cross-validation needs at least one candidate");
  if (folds < 2 || folds > cloud.size()) fail("fold-too-small", "fold count must lie in [2, N]");
  if (assignments.empty()) fail("invalid-repeats", "at least one CV repeat is required");
  for (const auto& a : assignments) {
    if (a.size() != cloud.size()) fail("shape-mismatch", "fold assignment length differs from the cloud size");
    for (std::size_t f : a)
      if (f >= folds) fail("shape-mismatch", "fold id out of range");
  }
  const std::size_t d = cloud.dim();
  const std::vector<double> lo = domain_lo ? *domain_lo : std::vector<double>(cloud.lower().begin(), cloud.lower().end());
  const std::vector<double> hi = domain_hi ? *domain_hi : std::vector<double>(cloud.upper().begin(), cloud.upper().end());
  if (lo.size() != d || hi.size() != d) fail("shape-mismatch", "domain dimension differs from the cloud");

  // Folds are independent work units; candidates within a fold share the split.
  struct unit {
    std::size_t repeat, fold;
  };
  std::vector<unit> units;
  for (std::size_t r = 0; r < assignments.size(); ++r)
    for (std::size_t f = 0; f < folds; ++f) units.push_back({r, f});

  const std::size_t m = candidates.size();
  std::vector<double> sq_error(units.size() * m, 0.0);
  std::vector<char> failed(units.size() * m, 0);
  fit_policy inner = policy;
  inner.threads = 1;

  auto run = [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      const auto& a = assignments[units[w].repeat];
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < a.size(); ++i) (a[i] == units[w].fold ? test : train).push_back(i);
      if (train.empty() || test.empty()) fail("fold-too-small", "a fold has no training or no held-out points");
      const point_cloud train_cloud = cloud.subset(train);
      for (std::size_t c = 0; c < m; ++c) {
        try {
          const tensor_space space = make_uniform_space(lo, hi, candidates[c].n, candidates[c].degree);
          const wqisa_model model = fit(train_cloud, space, candidates[c].weight, inner);
          double sum = 0.0;
          for (std::size_t i : test) {
            const double r = cloud.y(i) - model(cloud.x(i));
            sum += r * r;
          }
          sq_error[w * m + c] = sum;
        } catch (const error&) {
          failed[w * m + c] = 1;
        }
      }
    }
  };
  const std::size_t threads = worker_count(policy.threads);
  if (threads <= 1 || units.size() < 2) {
    run(0, units.size(), 0);
  } else {
    // parallel_for runs serially below its chunking threshold; split by unit here instead.
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      const std::size_t t = std::min(threads, units.size());
      for (std::size_t k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
          try {
            for (std::size_t w = k; w < units.size(); w += t) run(w, w + 1, k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  cv_result out;
  out.folds = folds;
  out.repeats = assignments.size();
  const double total = static_cast<double>(cloud.size() * assignments.size());
  for (std::size_t c = 0; c < m; ++c) {
    out.grid.push_back(candidates[c].value);
    bool any_failed = false;
    double sum = 0.0;
    for (std::size_t w = 0; w < units.size(); ++w) {
      any_failed = any_failed || failed[w * m + c];
      sum += sq_error[w * m + c];
    }
    out.scores.push_back(any_failed ? std::numeric_limits<double>::infinity() : sum / total);
  }
  // Scores within rounding of the minimum tie; ties go to the smallest candidate value.
  const double y_scale = std::max({1.0, std::abs(cloud.y_min()), std::abs(cloud.y_max())});
  const double min_score = *std::min_element(out.scores.begin(), out.scores.end());
  const double tie = 1e-12 * min_score + (1e-12 * y_scale) * (1e-12 * y_scale);
  std::size_t best = m;
  for (std::size_t c = 0; c < m; ++c) {
    if (!(out.scores[c] <= min_score + tie)) continue;
    if (best == m || out.grid[c] < out.grid[best]) best = c;
  }
  if (best == m) best = 0;
  out.best_index = best;
  out.best = out.grid[best];
  return out;
}

}  // namespace wqisa
