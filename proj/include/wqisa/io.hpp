#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wqisa/fitter.hpp"
#include "wqisa/inference.hpp"
#include "wqisa/metrics.hpp"

namespace wqisa {

enum class cloud_format { automatic, xyz, csv };

cloud_format parse_cloud_format(std::string_view text);

/// One point per line, whitespace- or comma-separated; `#` lines and blank
/// lines are skipped. The last column is the response.
point_cloud parse_cloud(std::string_view text, cloud_format format = cloud_format::automatic);
point_cloud load_cloud(const std::string& path, cloud_format format = cloud_format::automatic);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

void write_cloud(std::ostream& out, const point_cloud& cloud, char separator = ' ');
void save_cloud(const std::string& path, const point_cloud& cloud);

enum class synthetic_kind { sine, sine_outliers, variable_noise };

synthetic_kind parse_synthetic_kind(std::string_view text);
std::string to_string(synthetic_kind kind);

struct synthetic_params {
  double lo = -2.0;
  double hi = 2.0;
  double sigma = 1.0;              // sine, sine_outliers: noise standard deviation
  double frequency = 1.0;          // sine: y = sin(frequency * pi * x)
  double outlier_fraction = 0.05;  // sine_outliers
  double outlier_magnitude = 10.0;
};

struct synthetic_data {
  point_cloud cloud;
  truth_function truth;
};

/// variable_noise uses f(x) = sin(pi x / 2) with noise variance s(x) = exp(-1 / (4 (1 + exp(4x - 2)))).
synthetic_data gen_synthetic(synthetic_kind kind, std::size_t n, std::uint64_t seed,
                             const synthetic_params& params = {});

double variable_noise_variance(double x);

enum class normalization { none, max, range };

normalization parse_normalization(std::string_view text);
std::string to_string(normalization mode);

/// Divisor applied to residuals: 1, max |y|, or max y - min y of the reference.
double normalization_scale(normalization mode, std::span<const double> reference);

struct cv_config {
  std::size_t n_min = 5;
  std::size_t n_max = 50;
  std::size_t folds = 5;
  std::size_t repeats = 5;
};

struct fit_config {
  std::string input;
  cloud_format format = cloud_format::automatic;
  std::vector<int> degree{2};
  std::vector<std::size_t> n{15};
  weight_spec weight = weight_spec::knn(10);
  fit_policy policy;
  bool outlier_filter = false;
  double outlier_factor = 1.5;
  std::optional<std::vector<double>> domain_lo;
  std::optional<std::vector<double>> domain_hi;
  std::uint64_t seed = 1;
  double alpha = 0.025;
  std::optional<double> noise_sigma;  // unset: residual plug-in estimate
  normalization norm = normalization::none;
  cv_config cv;
  std::size_t grid_points = 0;  // per axis; 0: 256, or 64 when d = 2
  std::string output;
  std::string report;

  /// Per-axis vectors broadcast to dimension d (a single entry repeats).
  std::vector<int> degrees_for(std::size_t d) const;
  std::vector<std::size_t> n_for(std::size_t d) const;
};

fit_config config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const fit_config& config);
fit_config load_config(const std::string& path);

/// Spline space on the configured domain, defaulting to the cloud's bounding box.
tensor_space space_for(const fit_config& config, const point_cloud& cloud);

struct saved_model {
  wqisa_model model;
  point_cloud training;
  double noise_sigma;
  bool noise_estimated;
};

nlohmann::json model_to_json(const wqisa_model& model, const point_cloud& training, double noise_sigma,
                             bool noise_estimated);
saved_model model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const error_report& report);
nlohmann::json to_json(const cv_result& result);

struct grid_options {
  std::size_t points_per_axis = 0;  // 0: 256, or 64 when d = 2
  double alpha = 0.025;
};

/// Regular grid over the model's domain, one row per point with columns
/// u_1..u_d,f,var,lo,hi; the last axis varies fastest.
void write_grid(std::ostream& out, const wqisa_model& model, const coefficient_covariance& cov,
                const grid_options& options);

nlohmann::json error_json(const std::string& code, const std::string& message);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace wqisa
