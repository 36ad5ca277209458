#include "wqisa/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "wqisa/error.hpp"

namespace wqisa {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

// log of the gaussian/exponential kernel, for shifted evaluation
double log_kernel(const weight_spec& spec, double d) {
  switch (spec.family) {
    case weight_family::gaussian:
      return spec.gaussian_squared_norm ? -(d * d) / (2.0 * spec.sigma * spec.sigma)
                                        : -d / (2.0 * spec.sigma * spec.sigma);
    case weight_family::exponential:
      return -d / (std::sqrt(2.0) * spec.sigma);
    default:
      fail("invalid-weight", "log kernel requested for a non-smooth family");
  }
}

double parse_number(std::string_view text, std::string_view key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail("invalid-weight", "cannot parse value of '" + std::string(key) + "': '" + std::string(text) + "'");
  return value;
}

}  // namespace

weight_spec weight_spec::knn(std::size_t k) {
  weight_spec s;
  s.family = weight_family::knn;
  s.k = k;
  s.validate();
  return s;
}

weight_spec weight_spec::characteristic(double r) {
  weight_spec s;
  s.family = weight_family::characteristic;
  s.r = r;
  s.validate();
  return s;
}

weight_spec weight_spec::gaussian(double sigma, bool squared_norm) {
  weight_spec s;
  s.family = weight_family::gaussian;
  s.sigma = sigma;
  s.gaussian_squared_norm = squared_norm;
  s.validate();
  return s;
}

weight_spec weight_spec::exponential(double sigma) {
  weight_spec s;
  s.family = weight_family::exponential;
  s.sigma = sigma;
  s.validate();
  return s;
}

weight_spec weight_spec::idw() {
  weight_spec s;
  s.family = weight_family::idw;
  return s;
}

void weight_spec::validate() const {
  switch (family) {
    case weight_family::knn:
      if (k < 1) fail("invalid-weight", "knn weight needs k >= 1");
      break;
    case weight_family::characteristic:
      if (!(r > 0.0) || !std::isfinite(r)) fail("invalid-weight", "characteristic weight needs r > 0");
      break;
    case weight_family::gaussian:
    case weight_family::exponential:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("invalid-weight", to_string(family) + " weight needs sigma > 0");
      break;
    case weight_family::idw:
      break;
  }
}

std::string to_string(weight_family family) {
  switch (family) {
    case weight_family::knn: return "knn";
    case weight_family::characteristic: return "characteristic";
    case weight_family::gaussian: return "gaussian";
    case weight_family::exponential: return "exponential";
    case weight_family::idw: return "idw";
  }
  return "unknown";
}

std::string to_string(const weight_spec& spec) {
  const auto num = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  switch (spec.family) {
    case weight_family::knn: return "knn:k=" + std::to_string(spec.k);
    case weight_family::characteristic: return "characteristic:r=" + num(spec.r);
    case weight_family::gaussian:
      return "gaussian:sigma=" + num(spec.sigma) + (spec.gaussian_squared_norm ? ",squared=1" : "");
    case weight_family::exponential: return "exponential:sigma=" + num(spec.sigma);
    case weight_family::idw: return "idw";
  }
  return "unknown";
}

weight_spec parse_weight_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  weight_spec spec;
  if (name == "knn") spec.family = weight_family::knn;
  else if (name == "characteristic") spec.family = weight_family::characteristic;
  else if (name == "gaussian") spec.family = weight_family::gaussian;
  else if (name == "exponential") spec.family = weight_family::exponential;
  else if (name == "idw") spec.family = weight_family::idw;
  else fail("invalid-weight", "unknown weight family '" + std::string(name) + "'");

  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) fail("invalid-weight", "expected key=value in '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const double value = parse_number(item.substr(eq + 1), key);
    if (key == "k" && spec.family == weight_family::knn) {
      if (value < 1 || value != std::floor(value)) fail("invalid-weight", "k must be a positive integer");
      spec.k = static_cast<std::size_t>(value);
    } else if (key == "r" && spec.family == weight_family::characteristic) {
      spec.r = value;
    } else if (key == "sigma" &&
               (spec.family == weight_family::gaussian || spec.family == weight_family::exponential)) {
      spec.sigma = value;
    } else if (key == "squared" && spec.family == weight_family::gaussian) {
      spec.gaussian_squared_norm = value != 0.0;
    } else {
      fail("invalid-weight", "parameter '" + std::string(key) + "' does not apply to " + std::string(name));
    }
  }
  spec.validate();
  return spec;
}

neighbor_context::neighbor_context(point_cloud cloud)
    : cloud_(std::move(cloud)), tree_(cloud_.dim(), cloud_.predictors()) {}

double kernel_value(const weight_spec& spec, double d) {
  switch (spec.family) {
    case weight_family::characteristic: return d <= spec.r ? 1.0 : 0.0;
    case weight_family::gaussian:
    case weight_family::exponential: return std::exp(log_kernel(spec, d));
    default: fail("invalid-weight", to_string(spec.family) + " weight is not translation invariant");
  }
}

std::size_t effective_k(const weight_spec& spec, const neighbor_context& ctx) {
  return std::min(spec.k, ctx.cloud().size());
}

double weight_eval(const weight_spec& spec, std::span<const double> u, std::size_t i, const neighbor_context& ctx) {
  const point_cloud& cloud = ctx.cloud();
  const auto x = cloud.x(i);
  switch (spec.family) {
    case weight_family::characteristic:
      // Closed ball, compared squared like the radius query.
      return distance2(x, u) <= spec.r * spec.r ? 1.0 : 0.0;
    case weight_family::gaussian:
    case weight_family::exponential:
      return kernel_value(spec, distance(x, u));
    case weight_family::knn: {
      const std::size_t k = effective_k(spec, ctx);
      for (const neighbor& nb : ctx.tree().knn(u, k))
        if (nb.index == i) return 1.0 / static_cast<double>(k);
      return 0.0;
    }
    case weight_family::idw: {
      std::size_t coincident = 0;
      for (std::size_t j = 0; j < cloud.size(); ++j)
        if (distance2(cloud.x(j), u) == 0.0) ++coincident;
      const double d = distance(x, u);
      if (coincident == 0) return 1.0 / d;
      return d == 0.0 ? 1.0 / static_cast<double>(coincident) : 0.0;
    }
  }
  return 0.0;
}

weight_support support_of(const weight_spec& spec, std::span<const double> u, const neighbor_context& ctx) {
  weight_support s;
  switch (spec.family) {
    case weight_family::characteristic:
      s.type = weight_support::kind::ball;
      s.radius = spec.r;
      break;
    case weight_family::knn: {
      s.type = weight_support::kind::points;
      for (const neighbor& nb : ctx.tree().knn(u, effective_k(spec, ctx))) s.indices.push_back(nb.index);
      std::sort(s.indices.begin(), s.indices.end());
      break;
    }
    default:
      s.type = weight_support::kind::unbounded;
  }
  return s;
}

sparse_weights weights_at(const weight_spec& spec, std::span<const double> u, const neighbor_context& ctx) {
  const point_cloud& cloud = ctx.cloud();
  sparse_weights out;
  switch (spec.family) {
    case weight_family::knn: {
      const std::size_t k = effective_k(spec, ctx);
      for (const neighbor& nb : ctx.tree().knn(u, k)) out.indices.push_back(nb.index);
      std::sort(out.indices.begin(), out.indices.end());
      out.lambda.assign(k, 1.0 / static_cast<double>(k));
      out.lookups = k;
      return out;
    }
    case weight_family::characteristic: {
      out.indices = ctx.tree().radius_query(u, spec.r);
      std::sort(out.indices.begin(), out.indices.end());
      out.lookups = out.indices.size();
      out.lambda.assign(out.indices.size(), out.indices.empty() ? 0.0 : 1.0 / static_cast<double>(out.indices.size()));
      return out;
    }
    case weight_family::gaussian:
    case weight_family::exponential: {
      // Shift the exponent by its maximum: the ratio of weights is unchanged
      // and far query points no longer underflow to an empty support.
      std::vector<double> logw(cloud.size());
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        logw[i] = log_kernel(spec, distance(cloud.x(i), u));
        top = std::max(top, logw[i]);
      }
      double total = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double w = std::exp(logw[i] - top);
        if (w > 0.0) {
          out.indices.push_back(i);
          out.lambda.push_back(w);
          total += w;
        }
      }
      for (double& l : out.lambda) l /= total;
      out.lookups = cloud.size();
      return out;
    }
    case weight_family::idw: {
      out.lookups = cloud.size();
      for (std::size_t i = 0; i < cloud.size(); ++i)
        if (distance2(cloud.x(i), u) == 0.0) out.indices.push_back(i);
      if (!out.indices.empty()) {
        out.lambda.assign(out.indices.size(), 1.0 / static_cast<double>(out.indices.size()));
        return out;
      }
      double total = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double w = 1.0 / distance(cloud.x(i), u);
        out.indices.push_back(i);
        out.lambda.push_back(w);
        total += w;
      }
      for (double& l : out.lambda) l /= total;
      return out;
    }
  }
  return out;
}

}  // namespace wqisa
