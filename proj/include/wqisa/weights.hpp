#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wqisa/kd_tree.hpp"
#include "wqisa/point_cloud.hpp"

namespace wqisa {

enum class weight_family { knn, characteristic, gaussian, exponential, idw };

/// One Parzen-window family and its parameters.
struct weight_spec {
  weight_family family = weight_family::knn;
  std::size_t k = 0;     // knn
  double r = 0.0;        // characteristic
  double sigma = 0.0;    // gaussian, exponential
  // Gaussian exponent uses |x-u| by default; set to use |x-u|^2 instead.
  bool gaussian_squared_norm = false;

  static weight_spec knn(std::size_t k);
  static weight_spec characteristic(double r);
  static weight_spec gaussian(double sigma, bool squared_norm = false);
  static weight_spec exponential(double sigma);
  static weight_spec idw();

  void validate() const;
  bool bounded_support() const noexcept {
    return family == weight_family::knn || family == weight_family::characteristic;
  }

  friend bool operator==(const weight_spec&, const weight_spec&) = default;
};

std::string to_string(weight_family family);
/// Compact form such as "knn:k=9", "gaussian:sigma=0.5,squared=1", "idw".
std::string to_string(const weight_spec& spec);
weight_spec parse_weight_spec(std::string_view text);

/// The cloud a family of weight functions is evaluated against, with its
/// spatial index. Immutable once built.
class neighbor_context {
 public:
  explicit neighbor_context(point_cloud cloud);

  const point_cloud& cloud() const noexcept { return cloud_; }
  const kd_tree& tree() const noexcept { return tree_; }

 private:
  point_cloud cloud_;
  kd_tree tree_;
};

/// Translation-invariant kernel value as a function of |x - u| (characteristic,
/// gaussian and exponential only).
double kernel_value(const weight_spec& spec, double distance);

/// w_u(x_i) for the i-th cloud point.
double weight_eval(const weight_spec& spec, std::span<const double> u, std::size_t i, const neighbor_context& ctx);

/// Effective k after clamping to the cloud size.
std::size_t effective_k(const weight_spec& spec, const neighbor_context& ctx);

struct weight_support {
  enum class kind { ball, points, unbounded };
  kind type = kind::unbounded;
  double radius = 0.0;                // ball
  std::vector<std::size_t> indices;   // points
};

weight_support support_of(const weight_spec& spec, std::span<const double> u, const neighbor_context& ctx);

/// Nonzero weights at u, normalized to sum to one. `lookups` counts the cloud
/// points whose weight was evaluated. Empty `indices` means empty support.
struct sparse_weights {
  std::vector<std::size_t> indices;  // ascending
  std::vector<double> lambda;
  std::size_t lookups = 0;
};

sparse_weights weights_at(const weight_spec& spec, std::span<const double> u, const neighbor_context& ctx);

}  // namespace wqisa
