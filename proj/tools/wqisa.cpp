// Command-line driver: fit, eval, cv, metrics, gen and demo.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wqisa/error.hpp"
#include "wqisa/fitter.hpp"
#include "wqisa/inference.hpp"
#include "wqisa/io.hpp"
#include "wqisa/metrics.hpp"
#include "wqisa/shape.hpp"

using json = nlohmann::json;
using namespace wqisa;

namespace {

struct overrides {
  std::string config;
  std::string input;
  std::string format;
  std::vector<int> degree;
  std::vector<std::size_t> n;
  std::string weight;
  std::string policy;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::string out;
  std::size_t threads = 0;
  bool filter = false;
  double filter_factor = 0.0;
  double noise_sigma = 0.0;
  std::string normalization;
  std::size_t grid_points = 0;
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  std::size_t folds = 0;
  std::size_t repeats = 0;
};

void add_common(CLI::App* cmd, overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--degree", o.degree, "spline degree per axis");
  cmd->add_option("--n", o.n, "basis functions per axis");
  cmd->add_option("--weight", o.weight, "weight family, e.g. knn:k=9, gaussian:sigma=0.5, idw");
  cmd->add_option("--policy", o.policy, "empty-support policy: error|nearest");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--alpha", o.alpha, "band uses the (1 - alpha) normal quantile");
  cmd->add_option("--out", o.out, "output path");
  cmd->add_option("--threads", o.threads, "worker threads (0: WQISA_THREADS or all cores)");
}

void add_input(CLI::App* cmd, overrides& o) {
  cmd->add_option("--input,-i", o.input, "point cloud file (xyz or csv)");
  cmd->add_option("--format", o.format, "cloud format: auto|xyz|csv");
}

fit_config resolve(CLI::App* cmd, const overrides& o) {
  fit_config c = o.config.empty() ? fit_config{} : load_config(o.config);
  auto given = [&](const char* name) { return cmd->get_option_no_throw(name) && cmd->count(name) > 0; };
  if (given("--input")) c.input = o.input;
  if (given("--format")) c.format = parse_cloud_format(o.format);
  if (given("--degree")) c.degree = o.degree;
  if (given("--n")) c.n = o.n;
  if (given("--weight")) c.weight = parse_weight_spec(o.weight);
  if (given("--policy")) {
    if (o.policy != "error" && o.policy != "nearest") fail("invalid-config", "unknown policy '" + o.policy + "'");
    c.policy.empty_support = o.policy == "nearest" ? empty_support_policy::nearest : empty_support_policy::error;
  }
  if (given("--seed")) c.seed = o.seed;
  if (given("--alpha")) c.alpha = o.alpha;
  if (given("--out")) c.output = o.out;
  if (given("--threads")) c.policy.threads = o.threads;
  if (given("--filter")) c.outlier_filter = o.filter;
  if (given("--filter-factor")) c.outlier_factor = o.filter_factor;
  if (given("--noise-sigma")) c.noise_sigma = o.noise_sigma;
  if (given("--normalization")) c.norm = parse_normalization(o.normalization);
  if (given("--grid-points")) c.grid_points = o.grid_points;
  if (given("--n-min")) c.cv.n_min = o.n_min;
  if (given("--n-max")) c.cv.n_max = o.n_max;
  if (given("--folds")) c.cv.folds = o.folds;
  if (given("--repeats")) c.cv.repeats = o.repeats;
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("invalid-alpha", "alpha must lie in (0, 1)");
  return c;
}

point_cloud input_cloud(const fit_config& c) {
  if (c.input.empty()) fail("invalid-config", "no input cloud given (use --input or the config's \"input\")");
  return load_cloud(c.input, c.format);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text(path, text);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void print_warnings(const fit_diagnostics& diag) {
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << '\n';
}

json shape_flags(const wqisa_model& model) {
  json axes = json::array();
  for (std::size_t k = 0; k < model.space().dim(); ++k) {
    const monotone_result m = coefficient_monotonicity(model.spline(), k);
    const convex_result c = coefficient_convexity(model.spline(), k);
    axes.push_back({{"axis", k},
                    {"monotonicity", to_string(m.kind)},
                    {"constant", m.constant},
                    {"convexity", to_string(c.kind)},
                    {"affine", c.affine},
                    {"continuous", c.continuous}});
  }
  return axes;
}

std::vector<double> predictions(const wqisa_model& model, const point_cloud& cloud) {
  const auto lo = model.space().lower();
  const auto hi = model.space().upper();
  std::vector<double> out(cloud.size()), x(cloud.dim());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto xi = cloud.x(i);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(xi[k], lo[k], hi[k]);
    out[i] = model(x);
  }
  return out;
}

error_report model_errors(const wqisa_model& model, const point_cloud& cloud, const coefficient_covariance& cov,
                          const fit_config& c) {
  const std::vector<double> pred = predictions(model, cloud);
  const double scale = normalization_scale(c.norm, cloud.responses());
  std::vector<double> obs(cloud.responses().begin(), cloud.responses().end());
  std::vector<double> fit_values = pred;
  for (auto& v : obs) v /= scale;
  for (auto& v : fit_values) v /= scale;
  error_report r = dispersion(obs, fit_values);

  point_set fitted{cloud.dim() + 1, {}};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.x(i);
    fitted.coords.insert(fitted.coords.end(), x.begin(), x.end());
    fitted.coords.push_back(pred[i]);
  }
  const diameter_result diam = cloud_diameter(cloud);
  if (diam.value > 0.0) r.hausdorff = directed_hausdorff_normalized(records(cloud), fitted, diam.value);
  r.band_coverage = band_coverage(cloud, model, cov, c.alpha);
  return r;
}

std::vector<cv_candidate> n_grid(const fit_config& c, std::size_t d) {
  if (c.cv.n_min > c.cv.n_max) fail("invalid-config", "cv n_min exceeds n_max");
  std::vector<cv_candidate> out;
  for (std::size_t n = c.cv.n_min; n <= c.cv.n_max; ++n)
    out.push_back({static_cast<double>(n), std::vector<std::size_t>(d, n), c.degrees_for(d), c.weight});
  return out;
}

std::string cv_csv(const cv_result& r) {
  std::ostringstream ss;
  ss << "n,cv\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) ss << format_number(r.grid[i]) << ',' << format_number(r.scores[i]) << '\n';
  return ss.str();
}

struct fit_outcome {
  wqisa_model model;
  point_cloud training;
  double sigma;
  bool estimated;
  json report;
};

fit_outcome run_fit(const fit_config& c, const point_cloud& raw) {
  const auto t0 = std::chrono::steady_clock::now();
  json timings;
  point_cloud cloud = raw;
  json filter_info = nullptr;
  const tensor_space space = space_for(c, raw);
  if (c.outlier_filter) {
    const auto tf = std::chrono::steady_clock::now();
    outlier_filter_result filtered = iqr_outlier_filter(raw, space, c.weight, c.outlier_factor, c.policy);
    filter_info = {{"kept", filtered.kept.size()}, {"removed", filtered.removed.size()}, {"q1", filtered.q1},
                   {"q3", filtered.q3}};
    cloud = std::move(filtered.cloud);
    timings["filter_ms"] = ms_since(tf);
  }
  const auto tfit = std::chrono::steady_clock::now();
  wqisa_model model = fit(cloud, space, c.weight, c.policy);
  timings["fit_ms"] = ms_since(tfit);
  print_warnings(model.diagnostics());

  const bool estimated = !c.noise_sigma.has_value();
  const double sigma = estimated ? estimate_noise_sigma(model, cloud) : *c.noise_sigma;
  const auto tcov = std::chrono::steady_clock::now();
  const coefficient_covariance cov = covariance(model, cloud, {sigma});
  timings["covariance_ms"] = ms_since(tcov);

  const global_bounds_result gb = global_bounds(model, cloud);
  json report;
  report["config"] = to_json(c);
  report["error_report"] = to_json(model_errors(model, cloud, cov, c));
  report["bounds"] = {{"global", {{"lo", gb.lo}, {"hi", gb.hi}, {"verified", gb.verified}}}};
  report["shape_flags"] = shape_flags(model);
  report["effective_count"] = model.effective_count();
  report["noise"] = {{"sigma", sigma}, {"estimated", estimated}};
  report["outlier_filter"] = filter_info;
  report["warnings"] = model.diagnostics().warnings;
  timings["total_ms"] = ms_since(t0);
  report["timings"] = timings;
  return {std::move(model), std::move(cloud), sigma, estimated, std::move(report)};
}

int cmd_fit(CLI::App* cmd, const overrides& o, const std::string& report_path) {
  fit_config c = resolve(cmd, o);
  if (!report_path.empty()) c.report = report_path;
  const point_cloud raw = input_cloud(c);
  fit_outcome r = run_fit(c, raw);
  const std::string model_path = c.output.empty() ? "model.json" : c.output;
  write_text(model_path, model_to_json(r.model, r.training, r.sigma, r.estimated).dump(2) + "\n");
  const std::string rp = c.report.empty() ? model_path + ".report.json" : c.report;
  write_text(rp, r.report.dump(2) + "\n");
  std::cout << json{{"model", model_path}, {"report", rp}, {"effective_count", r.model.effective_count()}}.dump()
            << '\n';
  return 0;
}

int cmd_eval(CLI::App* cmd, const overrides& o, const std::string& model_path) {
  const fit_config c = resolve(cmd, o);
  saved_model saved = model_from_json(json::parse(read_text(model_path)));
  const coefficient_covariance cov = covariance(saved.model, saved.training, {saved.noise_sigma});
  std::ostringstream ss;
  write_grid(ss, saved.model, cov, {c.grid_points, c.alpha});
  emit(c.output, ss.str());
  return 0;
}

int cmd_cv(CLI::App* cmd, const overrides& o, const std::string& curve_path) {
  const fit_config c = resolve(cmd, o);
  const point_cloud cloud = input_cloud(c);
  const auto candidates = n_grid(c, cloud.dim());
  const cv_result r = kfold_cv(cloud, candidates, c.cv.folds, c.cv.repeats, c.seed, c.policy, c.domain_lo, c.domain_hi);
  if (!curve_path.empty()) write_text(curve_path, cv_csv(r));
  json best = {{"n", std::vector<std::size_t>(cloud.dim(), static_cast<std::size_t>(r.best))},
               {"degree", c.degrees_for(cloud.dim())},
               {"weight", to_string(c.weight)}};
  emit(c.output, json{{"cv", to_json(r)}, {"best", best}}.dump(2) + "\n");
  return 0;
}

int cmd_metrics(CLI::App* cmd, const overrides& o, const std::string& model_path, const std::string& reference,
                double cell) {
  const fit_config c = resolve(cmd, o);
  const point_cloud cloud = input_cloud(c);
  json out;
  if (!model_path.empty()) {
    saved_model saved = model_from_json(json::parse(read_text(model_path)));
    const coefficient_covariance cov = covariance(saved.model, saved.training, {saved.noise_sigma});
    out["model"] = to_json(model_errors(saved.model, cloud, cov, c));
  }
  if (!reference.empty()) {
    const point_cloud other = load_cloud(reference, c.format);
    const point_set a = records(cloud);
    const point_set b = records(other);
    const double diam = cloud_diameter(cloud).value;
    out["reference"] = {{"hausdorff_to_reference", directed_hausdorff_normalized(a, b, diam)},
                        {"hausdorff_from_reference", directed_hausdorff_normalized(b, a, diam)},
                        {"jaccard", jaccard_points(a, b, cell)}};
    if (other.size() == cloud.size() && other.dim() == cloud.dim()) {
      const double scale = normalization_scale(c.norm, cloud.responses());
      std::vector<double> obs(cloud.responses().begin(), cloud.responses().end());
      std::vector<double> ref(other.responses().begin(), other.responses().end());
      for (auto& v : obs) v /= scale;
      for (auto& v : ref) v /= scale;
      out["reference"]["error_report"] = to_json(dispersion(obs, ref));
    }
  }
  if (out.empty()) fail("invalid-config", "metrics needs --model or --reference");
  out["normalization"] = to_string(c.norm);
  emit(c.output, out.dump(2) + "\n");
  return 0;
}

int cmd_gen(CLI::App* cmd, const overrides& o, const std::string& kind, std::size_t count,
            const synthetic_params& params) {
  const fit_config c = resolve(cmd, o);
  const synthetic_data data = gen_synthetic(parse_synthetic_kind(kind), count, c.seed, params);
  if (c.output.empty() || c.output == "-")
    write_cloud(std::cout, data.cloud);
  else
    save_cloud(c.output, data.cloud);
  return 0;
}

int cmd_demo(CLI::App* cmd, const overrides& o, std::size_t count, double sigma) {
  fit_config c = resolve(cmd, o);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (!given("--degree") && o.config.empty()) c.degree = {2};
  if (!given("--weight") && o.config.empty()) c.weight = weight_spec::knn(10);
  const std::filesystem::path dir = c.output.empty() ? "demo_out" : c.output;
  std::filesystem::create_directories(dir);

  synthetic_params params;
  params.sigma = sigma;
  const synthetic_data data = gen_synthetic(synthetic_kind::sine, count, c.seed, params);
  save_cloud((dir / "data.xyz").string(), data.cloud);

  const auto candidates = n_grid(c, 1);
  const cv_result r = kfold_cv(data.cloud, candidates, c.cv.folds, c.cv.repeats, c.seed, c.policy);
  write_text((dir / "cv.csv").string(), cv_csv(r));

  c.n = {static_cast<std::size_t>(r.best)};
  c.input = (dir / "data.xyz").string();
  if (!c.noise_sigma) c.noise_sigma = sigma;
  fit_outcome f = run_fit(c, data.cloud);
  write_text((dir / "model.json").string(), model_to_json(f.model, f.training, f.sigma, f.estimated).dump(2) + "\n");
  write_text((dir / "report.json").string(), f.report.dump(2) + "\n");
  const coefficient_covariance cov = covariance(f.model, f.training, {f.sigma});
  std::ostringstream grid;
  write_grid(grid, f.model, cov, {c.grid_points, c.alpha});
  write_text((dir / "grid.csv").string(), grid.str());

  std::cout << json{{"best_n", r.best}, {"in_range", r.best >= 10 && r.best <= 20}, {"output", dir.string()}}.dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted quasi-interpolant spline approximation of point clouds"};
  app.require_subcommand(1);

  overrides o;
  std::string report_path, model_path, reference, kind = "sine", curve_path;
  std::size_t count = 300;
  double cell = 0.0, demo_sigma = 1.0;
  synthetic_params params;

  auto add_fit_extras = [&](CLI::App* cmd) {
    cmd->add_flag("--filter", o.filter, "remove residual outliers (IQR rule) before fitting");
    cmd->add_option("--filter-factor", o.filter_factor, "IQR fence factor");
    cmd->add_option("--noise-sigma", o.noise_sigma, "known noise standard deviation (default: residual estimate)");
    cmd->add_option("--normalization", o.normalization, "error normalization: none|max|range");
    cmd->add_option("--grid-points", o.grid_points, "grid points per axis");
  };
  auto add_cv_extras = [&](CLI::App* cmd) {
    cmd->add_option("--n-min", o.n_min, "smallest n in the CV grid");
    cmd->add_option("--n-max", o.n_max, "largest n in the CV grid");
    cmd->add_option("--folds", o.folds, "number of folds K");
    cmd->add_option("--repeats", o.repeats, "number of CV repeats");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model and write model + report JSON");
  add_common(fit_cmd, o);
  add_input(fit_cmd, o);
  add_fit_extras(fit_cmd);
  fit_cmd->add_option("--report", report_path, "report JSON path (default <out>.report.json)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "sample a model on a regular grid to CSV");
  add_common(eval_cmd, o);
  add_fit_extras(eval_cmd);
  eval_cmd->add_option("--model,-m", model_path, "model JSON")->required();

  CLI::App* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation over n");
  add_common(cv_cmd, o);
  add_input(cv_cmd, o);
  add_cv_extras(cv_cmd);
  cv_cmd->add_option("--curve", curve_path, "CV curve CSV path");

  CLI::App* metrics_cmd = app.add_subcommand("metrics", "compare a cloud against a model or a second cloud");
  add_common(metrics_cmd, o);
  add_input(metrics_cmd, o);
  add_fit_extras(metrics_cmd);
  metrics_cmd->add_option("--model,-m", model_path, "model JSON");
  metrics_cmd->add_option("--reference,-r", reference, "second point cloud");
  metrics_cmd->add_option("--cell", cell, "Jaccard grid cell (default: diagonal / 512)");

  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic cloud");
  add_common(gen_cmd, o);
  gen_cmd->add_option("--kind", kind, "sine|sine_outliers|variable_noise");
  gen_cmd->add_option("--count,-N", count, "number of points");
  gen_cmd->add_option("--sigma", params.sigma, "noise standard deviation");
  gen_cmd->add_option("--frequency", params.frequency, "y = sin(frequency * pi * x)");
  gen_cmd->add_option("--fraction", params.outlier_fraction, "outlier fraction");
  gen_cmd->add_option("--magnitude", params.outlier_magnitude, "outlier offset");
  gen_cmd->add_option("--lo", params.lo, "domain lower end");
  gen_cmd->add_option("--hi", params.hi, "domain upper end");

  CLI::App* demo_cmd = app.add_subcommand("demo", "sine data, CV over n, fit and band export");
  add_common(demo_cmd, o);
  add_fit_extras(demo_cmd);
  add_cv_extras(demo_cmd);
  demo_cmd->add_option("--count,-N", count, "number of points");
  demo_cmd->add_option("--sigma", demo_sigma, "noise standard deviation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_cmd, o, report_path);
    if (eval_cmd->parsed()) return cmd_eval(eval_cmd, o, model_path);
    if (metrics_cmd->parsed()) return cmd_metrics(metrics_cmd, o, model_path, reference, cell);
    if (gen_cmd->parsed()) return cmd_gen(gen_cmd, o, kind, count, params);
    if (cv_cmd->parsed()) return cmd_cv(cv_cmd, o, curve_path);
    if (demo_cmd->parsed()) return cmd_demo(demo_cmd, o, count, demo_sigma);
  } catch (const error& e) {
    std::cerr << error_json(e.code(), e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal-error", e.what()).dump() << '\n';
    return 1;
  }
  return 0;
}
