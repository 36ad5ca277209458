#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wqisa/fitter.hpp"

namespace wqisa {

/// i.i.d. residuals with zero mean and standard deviation sigma_eps.
struct noise_model {
  double sigma_eps = 0.0;
};

/// Standard normal quantile Phi^{-1}(p), Wichura's AS241 (PPND16) rational
/// approximation, relative accuracy about 1e-16.
double normal_quantile(double p);

/// Cov(c_i, c_j) = sigma^2 sum_k lambda_ik lambda_jk, where lambda_i are the
/// normalized estimator weights of coefficient i. Rows are kept sparse; the
/// dense matrix is materialized only on request.
class coefficient_covariance {
 public:
  static constexpr std::size_t dense_limit = 4096;

  coefficient_covariance(std::vector<sparse_weights> rows, double sigma2, std::size_t n_points);

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t points() const noexcept { return n_points_; }
  double sigma2() const noexcept { return sigma2_; }
  const sparse_weights& row(std::size_t i) const { return rows_[i]; }

  double operator()(std::size_t i, std::size_t j) const;

  /// Row-major size() x size() matrix; eagerly held when size() <= dense_limit.
  std::vector<double> dense() const;

 private:
  std::vector<sparse_weights> rows_;
  double sigma2_;
  std::size_t n_points_;
  std::vector<double> dense_;
};

coefficient_covariance covariance(const point_cloud& cloud, const tensor_space& space, const weight_spec& weight,
                                  noise_model noise, const fit_policy& policy = {});

coefficient_covariance covariance(const wqisa_model& model, const point_cloud& cloud, noise_model noise);

/// Var[f_w(u)] = sum_ij Cov(c_i, c_j) B_i(u) B_j(u), evaluated on the active block.
double variance_at(const wqisa_model& model, const coefficient_covariance& cov, std::span<const double> u);

struct band {
  double lo;
  double center;
  double hi;
};

/// f_w(u) -/+ z_{1-alpha} sqrt(Var), with z_{1-alpha} the (1-alpha) normal quantile.
band se_band(const wqisa_model& model, const coefficient_covariance& cov, std::span<const double> u, double alpha);

/// Residual plug-in estimate sqrt(mean (y - f_w(x))^2); predictors are clipped to the domain.
double estimate_noise_sigma(const wqisa_model& model, const point_cloud& cloud);

using truth_function = std::function<double(std::span<const double>)>;

struct expected_coefficient {
  double expected;  // E[c_j] = sum_k lambda_jk f(x_k)
  double lo;        // min f over the nonzero-weight points
  double hi;
};

/// Expected estimator coefficients under y = f(x) + noise, for a design
/// (the cloud's predictors; its responses are ignored).
std::vector<expected_coefficient> expected_coefficients(const point_cloud& design, const truth_function& f,
                                                        const tensor_space& space, const weight_spec& weight,
                                                        const fit_policy& policy = {});

struct bias_bounds {
  double expected_fit;        // E[f_w(u)]
  double truth;               // f(u)
  double alpha;               // min f over the active index union
  double beta;                // max f over the active index union
  double squared_bias;        // (E[f_w(u)] - f(u))^2
  double squared_bias_bound;  // (alpha - f)^2 if E <= f, else (beta - f)^2
};

bias_bounds bias_bounds_at(const point_cloud& design, const truth_function& f, const tensor_space& space,
                           const weight_spec& weight, std::span<const double> u, const fit_policy& policy = {});

/// One point of a cross-validation grid.
struct cv_candidate {
  double value;                    // grid label (e.g. n or k)
  std::vector<std::size_t> n;      // basis functions per axis
  std::vector<int> degree;         // degree per axis
  weight_spec weight;
};

struct cv_result {
  std::vector<double> grid;
  std::vector<double> scores;  // mean held-out squared error; +inf on fit failure
  double best = 0.0;
  std::size_t best_index = 0;
  std::size_t folds = 0;
  std::size_t repeats = 0;
};

/// Fold id per row for each repeat: seeded shuffle, then near-equal split.
std::vector<std::vector<std::size_t>> make_fold_assignments(std::size_t n_points, std::size_t folds,
                                                            std::size_t repeats, std::uint64_t seed);

/// K-fold CV over candidates. The spline domain is the bounding box of the
/// full cloud (or `domain_lo/hi` when given) so held-out points are always inside.
cv_result kfold_cv(const point_cloud& cloud, std::span<const cv_candidate> candidates, std::size_t folds,
                   std::size_t repeats, std::uint64_t seed, const fit_policy& policy = {},
                   std::optional<std::vector<double>> domain_lo = {},
                   std::optional<std::vector<double>> domain_hi = {});

cv_result kfold_cv(const point_cloud& cloud, std::span<const cv_candidate> candidates,
                   const std::vector<std::vector<std::size_t>>& assignments, std::size_t folds,
                   const fit_policy& policy = {}, std::optional<std::vector<double>> domain_lo = {},
                   std::optional<std::vector<double>> domain_hi = {});

}  // namespace wqisa
