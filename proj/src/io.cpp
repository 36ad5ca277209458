#include "wqisa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wqisa/error.hpp"
#include "wqisa/random.hpp"

namespace wqisa {

namespace {

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line, bool commas) {
  std::vector<std::string_view> out;
  if (commas) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t begin = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

template <class T>
std::vector<T> broadcast(const std::vector<T>& v, std::size_t d, const char* what) {
  if (v.size() == d) return v;
  if (v.size() == 1) return std::vector<T>(d, v.front());
  fail("shape-mismatch", std::string(what) + " has " + std::to_string(v.size()) + " entries for dimension " +
                             std::to_string(d));
}

std::string policy_name(empty_support_policy p) { return p == empty_support_policy::error ? "error" : "nearest"; }

empty_support_policy parse_policy(std::string_view text) {
  if (text == "error") return empty_support_policy::error;
  if (text == "nearest") return empty_support_policy::nearest;
  fail("invalid-config", "unknown empty-support policy '" + std::string(text) + "'");
}

}  // namespace

cloud_format parse_cloud_format(std::string_view text) {
  if (text == "auto") return cloud_format::automatic;
  if (text == "xyz") return cloud_format::xyz;
  if (text == "csv") return cloud_format::csv;
  fail("invalid-config", "unknown cloud format '" + std::string(text) + "'");
}

point_cloud parse_cloud(std::string_view text, cloud_format format) {
  std::vector<double> x, y;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const bool commas = format == cloud_format::csv ||
                        (format == cloud_format::automatic && line.find(',') != std::string_view::npos);
    const auto tokens = split_line(line, commas);
    if (tokens.size() < 2)
      fail("parse-error", "line " + std::to_string(line_no) + ": expected at least 2 columns, found " +
                              std::to_string(tokens.size()));
    if (columns == 0) columns = tokens.size();
    if (tokens.size() != columns)
      fail("inconsistent-columns", "line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                       " columns, found " + std::to_string(tokens.size()));
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      double v;
      if (!parse_double(tokens[c], v))
        fail("parse-error", "line " + std::to_string(line_no) + ": '" + std::string(tokens[c]) +
                                "' is not a finite number");
      (c + 1 == tokens.size() ? y : x).push_back(v);
    }
  }
  if (y.empty()) fail("parse-error", "no data rows");
  return point_cloud(columns - 1, std::move(x), std::move(y));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io-error", "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io-error", "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail("io-error", "write to '" + path + "' failed");
}

point_cloud load_cloud(const std::string& path, cloud_format format) { return parse_cloud(read_text(path), format); }

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_cloud(std::ostream& out, const point_cloud& cloud, char separator) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (double v : cloud.x(i)) out << format_number(v) << separator;
    out << format_number(cloud.y(i)) << '\n';
  }
}

void save_cloud(const std::string& path, const point_cloud& cloud) {
  std::ostringstream ss;
  write_cloud(ss, cloud, path.ends_with(".csv") ? ',' : ' ');
  write_text(path, ss.str());
}

synthetic_kind parse_synthetic_kind(std::string_view text) {
  if (text == "sine") return synthetic_kind::sine;
  if (text == "sine_outliers") return synthetic_kind::sine_outliers;
  if (text == "variable_noise") return synthetic_kind::variable_noise;
  fail("unknown-kind", "unknown synthetic kind '" + std::string(text) + "'");
}

std::string to_string(synthetic_kind kind) {
  switch (kind) {
    case synthetic_kind::sine: return "sine";
    case synthetic_kind::sine_outliers: return "sine_outliers";
    case synthetic_kind::variable_noise: return "variable_noise";
  }
  return "sine";
}

double variable_noise_variance(double x) { return std::exp(-1.0 / (4.0 * (1.0 + std::exp(4.0 * x - 2.0)))); }

synthetic_data gen_synthetic(synthetic_kind kind, std::size_t n, std::uint64_t seed, const synthetic_params& params) {
  if (n == 0) fail("too-few-points", "synthetic cloud needs N >= 1");
  if (!(params.lo < params.hi)) fail("invalid-domain", "synthetic domain needs lo < hi");
  if (!(params.sigma >= 0.0)) fail("invalid-noise", "noise standard deviation must be >= 0");
  if (!(params.outlier_fraction >= 0.0 && params.outlier_fraction <= 1.0))
    fail("invalid-config", "outlier fraction must lie in [0, 1]");

  truth_function truth;
  if (kind == synthetic_kind::variable_noise) {
    truth = [](std::span<const double> u) { return std::sin(std::numbers::pi / 2.0 * u[0]); };
  } else {
    const double w = params.frequency * std::numbers::pi;
    truth = [w](std::span<const double> u) { return std::sin(w * u[0]); };
  }

  rng gen(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = gen.uniform(params.lo, params.hi);
    const double sd = kind == synthetic_kind::variable_noise ? std::sqrt(variable_noise_variance(x[i])) : params.sigma;
    y[i] = truth(std::span<const double>(&x[i], 1)) + sd * gen.normal();
  }
  if (kind == synthetic_kind::sine_outliers) {
    const auto count = static_cast<std::size_t>(std::llround(params.outlier_fraction * static_cast<double>(n)));
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    gen.shuffle(std::span<std::size_t>(rows));
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t i = rows[t];
      const double sign = gen.below(2) == 0 ? -1.0 : 1.0;
      y[i] = truth(std::span<const double>(&x[i], 1)) + sign * params.outlier_magnitude;
    }
  }
  return {point_cloud(1, std::move(x), std::move(y)), std::move(truth)};
}

normalization parse_normalization(std::string_view text) {
  if (text == "none") return normalization::none;
  if (text == "max") return normalization::max;
  if (text == "range") return normalization::range;
  fail("invalid-config", "unknown normalization '" + std::string(text) + "'");
}

std::string to_string(normalization mode) {
  switch (mode) {
    case normalization::none: return "none";
    case normalization::max: return "max";
    case normalization::range: return "range";
  }
  return "none";
}

double normalization_scale(normalization mode, std::span<const double> reference) {
  if (mode == normalization::none) return 1.0;
  if (reference.empty()) fail("empty-set", "normalization needs reference values");
  const auto [lo, hi] = std::minmax_element(reference.begin(), reference.end());
  const double scale = mode == normalization::max ? std::max(std::abs(*lo), std::abs(*hi)) : *hi - *lo;
  if (!(scale > 0.0)) fail("zero-scale", "normalization scale is zero");
  return scale;
}

std::vector<int> fit_config::degrees_for(std::size_t d) const { return broadcast(degree, d, "degree"); }
std::vector<std::size_t> fit_config::n_for(std::size_t d) const { return broadcast(n, d, "n"); }

fit_config config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("invalid-config", "configuration must be a JSON object");
  fit_config c;
  try {
    auto as_vector = [](const nlohmann::json& v, auto tag) {
      using T = decltype(tag);
      if (v.is_array()) return v.get<std::vector<T>>();
      return std::vector<T>{v.get<T>()};
    };
    if (j.contains("input")) c.input = j.at("input").get<std::string>();
    if (j.contains("format")) c.format = parse_cloud_format(j.at("format").get<std::string>());
    if (j.contains("degree")) c.degree = as_vector(j.at("degree"), int{});
    if (j.contains("n")) c.n = as_vector(j.at("n"), std::size_t{});
    if (j.contains("weight")) c.weight = parse_weight_spec(j.at("weight").get<std::string>());
    if (j.contains("policy")) c.policy.empty_support = parse_policy(j.at("policy").get<std::string>());
    if (j.contains("drop_outside")) c.policy.drop_outside = j.at("drop_outside").get<bool>();
    if (j.contains("threads")) c.policy.threads = j.at("threads").get<std::size_t>();
    if (j.contains("outlier_filter")) {
      const auto& o = j.at("outlier_filter");
      if (o.is_boolean()) {
        c.outlier_filter = o.get<bool>();
      } else {
        c.outlier_filter = o.value("enabled", true);
        c.outlier_factor = o.value("factor", c.outlier_factor);
      }
    }
    if (j.contains("domain")) {
      const auto& dom = j.at("domain");
      if (!dom.is_null()) {
        c.domain_lo = as_vector(dom.at("lo"), double{});
        c.domain_hi = as_vector(dom.at("hi"), double{});
      }
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("noise_sigma") && !j.at("noise_sigma").is_null()) c.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("normalization")) c.norm = parse_normalization(j.at("normalization").get<std::string>());
    if (j.contains("cv")) {
      const auto& v = j.at("cv");
      c.cv.n_min = v.value("n_min", c.cv.n_min);
      c.cv.n_max = v.value("n_max", c.cv.n_max);
      c.cv.folds = v.value("folds", c.cv.folds);
      c.cv.repeats = v.value("repeats", c.cv.repeats);
    }
    if (j.contains("grid_points")) c.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("report")) c.report = j.at("report").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail("invalid-config", e.what());
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("invalid-alpha", "alpha must lie in (0, 1)");
  if (c.outlier_factor < 0.0) fail("invalid-config", "outlier factor must be >= 0");
  return c;
}

nlohmann::json to_json(const fit_config& c) {
  nlohmann::json j;
  j["input"] = c.input;
  j["format"] = c.format == cloud_format::automatic ? "auto" : c.format == cloud_format::xyz ? "xyz" : "csv";
  j["degree"] = c.degree;
  j["n"] = c.n;
  j["weight"] = to_string(c.weight);
  j["policy"] = policy_name(c.policy.empty_support);
  j["drop_outside"] = c.policy.drop_outside;
  j["threads"] = c.policy.threads;
  j["outlier_filter"] = {{"enabled", c.outlier_filter}, {"factor", c.outlier_factor}};
  if (c.domain_lo && c.domain_hi)
    j["domain"] = {{"lo", *c.domain_lo}, {"hi", *c.domain_hi}};
  else
    j["domain"] = nullptr;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["noise_sigma"] = c.noise_sigma ? nlohmann::json(*c.noise_sigma) : nlohmann::json(nullptr);
  j["normalization"] = to_string(c.norm);
  j["cv"] = {{"n_min", c.cv.n_min}, {"n_max", c.cv.n_max}, {"folds", c.cv.folds}, {"repeats", c.cv.repeats}};
  j["grid_points"] = c.grid_points;
  j["output"] = c.output;
  j["report"] = c.report;
  return j;
}

fit_config load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail("invalid-config", "'" + path + "': " + e.what());
  }
  return config_from_json(j);
}

tensor_space space_for(const fit_config& config, const point_cloud& cloud) {
  const std::size_t d = cloud.dim();
  std::vector<double> lo(cloud.lower().begin(), cloud.lower().end());
  std::vector<double> hi(cloud.upper().begin(), cloud.upper().end());
  if (config.domain_lo) lo = broadcast(*config.domain_lo, d, "domain lo");
  if (config.domain_hi) hi = broadcast(*config.domain_hi, d, "domain hi");
  const auto n = config.n_for(d);
  const auto p = config.degrees_for(d);
  return make_uniform_space(lo, hi, n, p);
}

nlohmann::json model_to_json(const wqisa_model& model, const point_cloud& training, double noise_sigma,
                             bool noise_estimated) {
  nlohmann::json j;
  j["format"] = "wqisa-model";
  j["version"] = 1;
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& kv : model.space().axes()) axes.push_back({{"degree", kv.degree()}, {"knots", kv.knots()}});
  j["axes"] = axes;
  j["coefficients"] = std::vector<double>(model.spline().coefficients().begin(), model.spline().coefficients().end());
  j["weight"] = to_string(model.weight());
  j["policy"] = policy_name(model.policy().empty_support);
  j["drop_outside"] = model.policy().drop_outside;
  j["effective_count"] = model.effective_count();
  j["noise_sigma"] = noise_sigma;
  j["noise_estimated"] = noise_estimated;
  j["training"] = {{"dim", training.dim()},
                   {"x", std::vector<double>(training.predictors().begin(), training.predictors().end())},
                   {"y", std::vector<double>(training.responses().begin(), training.responses().end())}};
  return j;
}

saved_model model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "wqisa-model") fail("invalid-model", "not a wqisa model file");
    std::vector<knot_vector> axes;
    for (const auto& a : j.at("axes")) axes.emplace_back(a.at("degree").get<int>(), a.at("knots").get<std::vector<double>>());
    tensor_space space(std::move(axes));
    spline_function spline(std::move(space), j.at("coefficients").get<std::vector<double>>());
    fit_policy policy;
    policy.empty_support = parse_policy(j.at("policy").get<std::string>());
    policy.drop_outside = j.value("drop_outside", false);
    const auto& t = j.at("training");
    point_cloud training(t.at("dim").get<std::size_t>(), t.at("x").get<std::vector<double>>(),
                         t.at("y").get<std::vector<double>>());
    wqisa_model model(std::move(spline), parse_weight_spec(j.at("weight").get<std::string>()), policy,
                      j.at("effective_count").get<std::size_t>(), {});
    return {std::move(model), std::move(training), j.at("noise_sigma").get<double>(),
            j.value("noise_estimated", false)};
  } catch (const nlohmann::json::exception& e) {
    fail("invalid-model", e.what());
  }
}

nlohmann::json to_json(const error_report& r) {
  nlohmann::json j = {{"mse", r.mse},   {"mae", r.mae},   {"rmse", r.rmse},     {"min", r.min},
                      {"max", r.max},   {"mean", r.mean}, {"median", r.median}, {"std", r.std}};
  if (r.hausdorff) j["hausdorff"] = *r.hausdorff;
  if (r.jaccard) j["jaccard"] = *r.jaccard;
  if (r.band_coverage) j["band_coverage"] = *r.band_coverage;
  return j;
}

nlohmann::json to_json(const cv_result& r) {
  nlohmann::json scores = nlohmann::json::array();
  for (double s : r.scores) scores.push_back(std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr));
  return {{"grid", r.grid}, {"scores", scores},   {"best", r.best},
          {"best_index", r.best_index}, {"folds", r.folds}, {"repeats", r.repeats}};
}

void write_grid(std::ostream& out, const wqisa_model& model, const coefficient_covariance& cov,
                const grid_options& options) {
  const tensor_space& space = model.space();
  const std::size_t d = space.dim();
  std::size_t m = options.points_per_axis;
  if (m == 0) m = d == 2 ? 64 : 256;
  if (m < 2) fail("invalid-config", "grid needs at least 2 points per axis");
  const auto lo = space.lower();
  const auto hi = space.upper();
  const double z = normal_quantile(1.0 - options.alpha);

  for (std::size_t k = 0; k < d; ++k) out << "u_" << (k + 1) << ',';
  out << "f,var,lo,hi\n";
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> u(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= m;
  for (std::size_t row = 0; row < total; ++row) {
    for (std::size_t k = 0; k < d; ++k) {
      u[k] = idx[k] + 1 == m ? hi[k] : lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx[k]) / static_cast<double>(m - 1);
      out << format_number(u[k]) << ',';
    }
    const double f = model(u);
    const double var = variance_at(model, cov, u);
    const double half = z * std::sqrt(std::max(0.0, var));
    out << format_number(f) << ',' << format_number(var) << ',' << format_number(f - half) << ','
        << format_number(f + half) << '\n';
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
}

nlohmann::json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace wqisa
