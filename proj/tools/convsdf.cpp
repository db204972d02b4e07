// convsdf command line: distance fields, derivatives, inside/outside
// classification and the experiment protocols.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid input or flags,
// 3 insufficient arithmetic precision. Failures print one line to stderr:
//   error: <kind>: <message>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "convsdf/derivatives.hpp"
#include "convsdf/distance.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/experiments.hpp"
#include "convsdf/field_io.hpp"
#include "convsdf/geometry_io.hpp"
#include "convsdf/parallel.hpp"
#include "convsdf/sign.hpp"
#include "convsdf/sweeping.hpp"

namespace fs = std::filesystem;
using convsdf::Json;

namespace {

// --config files: one JSON object whose keys are long flag names, with a
// nested object per subcommand, e.g. {"threads": 1, "dt": {"tau": 1e-3}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    collect(j, {}, out);
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config value for '" + key + "' must be a string, number or boolean");
  }

  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, v] : j.items()) {
      if (v.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(v, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(scalar(e, key));
      } else {
        item.inputs.push_back(scalar(v, key));
      }
      out.push_back(std::move(item));
    }
  }
};

struct GridFlags {
  std::vector<double> min, max;
  double spacing = 0.0;
  std::vector<std::size_t> counts;

  void add(CLI::App* app) {
    app->add_option("--min", min, "Lower grid corner, one value per axis")->required()->expected(1, 3);
    app->add_option("--max", max, "Upper grid corner, one value per axis")->required()->expected(1, 3);
    auto* s = app->add_option("--spacing", spacing, "Grid spacing h");
    auto* c = app->add_option("--counts", counts, "Node counts per axis")->expected(1, 3);
    s->excludes(c);
  }

  convsdf::GridSpec grid() const {
    if (!counts.empty()) return convsdf::GridSpec::from_counts(min, max, counts);
    if (spacing == 0.0) throw convsdf::ValidationError("either --spacing or --counts is required");
    return convsdf::GridSpec::from_bounds(min, max, spacing);
  }
};

struct Common {
  std::string out = ".";
  unsigned threads = 0;
};

// Field sink: a directory of <name>.eik files, or EIKFLD01 records on stdout.
class Sink {
 public:
  explicit Sink(const std::string& out) : out_(out) {
    if (out_ != "-") fs::create_directories(out_);
  }

  bool to_stdout() const { return out_ == "-"; }

  void field(const convsdf::ScalarField& f, const std::string& name, const Json& meta) {
    if (to_stdout()) {
      convsdf::write_field(std::cout, f, name, meta);
      std::cout.flush();
    } else {
      convsdf::write_field((fs::path(out_) / (name + ".eik")).string(), f, name, meta);
    }
  }

  void text(const std::string& file, const std::string& content) {
    if (to_stdout()) {
      std::cout << content;
      return;
    }
    std::ofstream o(fs::path(out_) / file, std::ios::binary);
    if (!o) throw convsdf::ValidationError("cannot write '" + (fs::path(out_) / file).string() + "'");
    o << content;
  }

  template <class Fn>
  void stream(const std::string& file, Fn fn) {
    if (to_stdout()) return;
    std::ofstream o(fs::path(out_) / file, std::ios::binary);
    if (!o) throw convsdf::ValidationError("cannot write '" + (fs::path(out_) / file).string() + "'");
    fn(o);
  }

 private:
  std::string out_;
};

void warn_precision(const convsdf::GridSpec& g, const convsdf::PrecisionConfig& cfg) {
  if (!cfg.is_big() && cfg.tau < convsdf::PrecisionConfig::native_tau_floor(g))
    std::cerr << "warning: tau " << cfg.tau << " is below the f64 floor " << convsdf::PrecisionConfig::native_tau_floor(g)
              << " for this grid (diagonal/700); use --precision big:"
              << convsdf::PrecisionConfig::recommended_bits(g, cfg.tau) << '\n';
}

struct SourceFlags {
  std::string points;
  double tau = 1e-3;
  std::string precision = "big:512";

  void add(CLI::App* app) {
    app->add_option("--points", points, "Source points CSV (2 or 3 columns)")->required();
    app->add_option("--tau", tau, "Smoothing parameter tau")->capture_default_str();
    app->add_option("--precision", precision, "f64, big:<bits> or auto")->capture_default_str();
  }

  convsdf::PrecisionConfig config(const convsdf::PointSet& ps, const convsdf::GridSpec& g) const {
    auto cfg = convsdf::resolve_precision(precision, tau, ps, g);
    warn_precision(g, cfg);
    return cfg;
  }

  std::vector<convsdf::Point> load(const convsdf::GridSpec& g) const {
    int dim = 0;
    auto pts = convsdf::read_points_csv(points, dim);
    if (dim != g.dim())
      throw convsdf::ValidationError("points have " + std::to_string(dim) + " coordinates but the grid is " +
                                     std::to_string(g.dim()) + "D");
    return pts;
  }

  Json meta(const convsdf::PrecisionConfig& cfg) const {
    return {{"tau", cfg.tau}, {"precision", cfg.label()}, {"points", points}};
  }
};

Json untrusted_meta(Json meta, const std::vector<std::size_t>& nodes) {
  meta["untrusted_nodes"] = nodes;
  return meta;
}

int run_dt(const GridFlags& gf, const SourceFlags& sf, const std::string& method, int iterations, bool clamp,
           bool csv, Sink& sink) {
  auto g = gf.grid();
  auto pts = sf.load(g);
  Json meta = {{"method", method}, {"points", sf.points}};
  convsdf::ScalarField out(g, std::vector<double>(g.size(), 0.0));
  std::string name;
  if (method == "exact") {
    out = convsdf::r_exact(pts, g);
    name = "R";
  } else if (method == "sweep") {
    int it = iterations > 0 ? iterations : (g.dim() == 3 ? 15 : 10);
    out = convsdf::fast_sweep(convsdf::snap_points(pts, g), g, it);
    meta["iterations"] = it;
    name = "sweep";
  } else {
    auto ps = convsdf::snap_points(pts, g);
    auto cfg = method == "fft" ? sf.config(ps, g)
                               : convsdf::PrecisionConfig::parse(sf.precision == "auto" ? "f64" : sf.precision, sf.tau);
    meta["tau"] = cfg.tau;
    meta["precision"] = cfg.label();
    out = method == "fft" ? convsdf::s_fft(ps, g, cfg) : convsdf::s_direct(pts, g, cfg);
    if (clamp) out = convsdf::clamp_nonneg(out);
    meta["clamp_nonneg"] = clamp;
    name = "S";
  }
  sink.field(out, name, meta);
  if (csv) sink.stream(name + ".csv", [&](std::ostream& o) { convsdf::write_field_csv(o, out, name); });
  return 0;
}

int run_grad(const GridFlags& gf, const SourceFlags& sf, bool magnitude, Sink& sink) {
  auto g = gf.grid();
  auto ps = convsdf::snap_points(sf.load(g), g);
  auto cfg = sf.config(ps, g);
  auto r = convsdf::gradient(ps, g, cfg);
  Json meta = untrusted_meta(sf.meta(cfg), r.untrusted);
  static const char* names[] = {"S_x", "S_y", "S_z"};
  for (int d = 0; d < g.dim(); ++d) sink.field(r.gradient[d], names[d], meta);
  sink.field(r.distance, "S", sf.meta(cfg));
  if (magnitude) sink.field(convsdf::gradient_magnitude(r.gradient), "grad_magnitude", meta);
  return 0;
}

int run_hessian(const GridFlags& gf, const SourceFlags& sf, bool magnitude, bool curvature, Sink& sink) {
  auto g = gf.grid();
  auto ps = convsdf::snap_points(sf.load(g), g);
  auto cfg = sf.config(ps, g);
  auto r = convsdf::hessian_2d(ps, g, cfg);
  Json meta = untrusted_meta(sf.meta(cfg), r.untrusted);
  sink.field(r.xx, "S_xx", meta);
  sink.field(r.yy, "S_yy", meta);
  sink.field(r.xy, "S_xy", meta);
  sink.field(r.gradient[0], "S_x", meta);
  sink.field(r.gradient[1], "S_y", meta);
  sink.field(r.distance, "S", sf.meta(cfg));
  if (magnitude) sink.field(convsdf::gradient_magnitude(r.gradient), "grad_magnitude", meta);
  if (curvature) {
    auto c = convsdf::curvature(r);
    sink.field(c.gaussian, "gaussian_curvature", meta);
    sink.field(c.mean, "mean_curvature", meta);
  }
  return 0;
}

struct SignFlags {
  std::string curve, mesh, distance_field, precision = "f64";
  std::optional<double> threshold;
};

int run_sign(const GridFlags& gf, const SignFlags& sf, Sink& sink) {
  auto g = gf.grid();
  if (sf.curve.empty() == sf.mesh.empty()) throw convsdf::ValidationError("give exactly one of --curve or --mesh");
  // the kernels carry no exponential, so tau only satisfies validation
  auto cfg = convsdf::PrecisionConfig::parse(sf.precision, 1.0);
  std::optional<convsdf::FieldFile> distance;
  if (!sf.distance_field.empty()) {
    distance = convsdf::read_field(sf.distance_field);
    if (!(distance->field.grid() == g)) throw convsdf::ValidationError("--distance-field is on a different grid");
  }
  const bool planar = !sf.curve.empty();
  const auto mode = planar ? convsdf::SignMode::winding2d : convsdf::SignMode::degree3d;
  Json meta = {{"precision", cfg.label()}};
  if (planar) {
    meta["curve"] = sf.curve;
  } else {
    meta["mesh"] = sf.mesh;
  }
  convsdf::SignField field =
      planar ? convsdf::winding_field(convsdf::read_curve_csv(sf.curve), g, cfg)
             : convsdf::degree_field(convsdf::triangulate_and_orient(convsdf::read_mesh(sf.mesh)), g, cfg);
  auto cls = convsdf::classify(field.mu, field.flagged, mode, sf.threshold);
  if (sf.threshold) meta["threshold"] = *sf.threshold;
  meta["flagged_nodes"] = field.flagged;
  sink.field(field.mu, "mu", meta);
  std::vector<double> mask(g.size());
  std::size_t interior = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mask[i] = cls.inside[i];
    interior += cls.inside[i];
  }
  sink.field(convsdf::ScalarField(g, std::move(mask)), "inside", meta);
  sink.stream("inside.csv", [&](std::ostream& o) { convsdf::write_mask_csv(o, cls.inside); });
  if (distance) {
    Json m = meta;
    m["distance_field"] = sf.distance_field;
    sink.field(convsdf::signed_distance(distance->field, cls.inside), "signed_distance", m);
  }
  Json summary = {{"grid", convsdf::grid_to_json(g)},
                  {"mode", mode == convsdf::SignMode::winding2d ? "winding2d" : "degree3d"},
                  {"interior_nodes", interior},
                  {"low_confidence_nodes", field.flagged.size()}};
  if (sink.to_stdout()) {
    std::cerr << summary.dump() << '\n';
  } else {
    sink.text("sign.json", summary.dump(2) + "\n");
  }
  return 0;
}

struct ExperimentFlags {
  std::string name;
  std::optional<int> trials, iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sources;
  std::optional<std::string> precision, sign_precision, zero_policy;
  std::vector<double> taus;
};

int run_experiment(const ExperimentFlags& ef, Sink& sink) {
  auto cfg = convsdf::ExperimentConfig::defaults(ef.name);
  if (ef.trials) cfg.trials = *ef.trials;
  if (ef.seed) cfg.seed = *ef.seed;
  if (ef.iterations) cfg.iterations = *ef.iterations;
  if (ef.sources) cfg.sources = *ef.sources;
  if (ef.precision) cfg.precision = *ef.precision;
  if (ef.sign_precision) cfg.sign_precision = *ef.sign_precision;
  if (ef.zero_policy) cfg.zero_policy = convsdf::parse_zero_policy(*ef.zero_policy);
  if (!ef.taus.empty()) cfg.taus = ef.taus;
  if (cfg.precision != "auto") convsdf::PrecisionConfig::parse(cfg.precision, 1.0);
  convsdf::PrecisionConfig::parse(cfg.sign_precision, 1.0);
  auto report = convsdf::run_experiment(cfg);
  if (sink.to_stdout()) {
    std::cout << report.json.dump(2) << '\n';
  } else {
    sink.text(ef.name + ".json", report.json.dump(2) + "\n");
    sink.text(ef.name + ".csv", report.csv);
  }
  return 0;
}

int run_info(const std::string& path) {
  std::cout << convsdf::read_field_header(path).dump(2) << '\n';
  return 0;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << "error: " << kind << ": " << one_line(msg) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution-based distance fields, derivatives and inside/outside classification"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with flag values (nested object per subcommand)");
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "Output directory, or - for stdout")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker thread cap (0 = all cores)")->capture_default_str();

  GridFlags dt_grid, grad_grid, hess_grid, sign_grid;
  SourceFlags dt_src, grad_src, hess_src;
  std::string method = "fft";
  int iterations = 0;
  bool clamp = false, csv = false, grad_mag = false, hess_mag = false, hess_curv = false;

  auto* dt = app.add_subcommand("dt", "Distance field of a point set");
  dt_grid.add(dt);
  dt_src.add(dt);
  dt->add_option("--method", method, "fft, direct, exact or sweep")
      ->check(CLI::IsMember({"fft", "direct", "exact", "sweep"}))
      ->capture_default_str();
  dt->add_option("--iterations", iterations, "Fast sweeping iterations (default 10 in 2D, 15 in 3D)")
      ->check(CLI::PositiveNumber);
  dt->add_flag("--clamp-nonneg", clamp, "Clamp negative S values near sources to zero");
  dt->add_flag("--csv", csv, "Also write the field as CSV");

  auto* grad = app.add_subcommand("grad", "Gradient of the distance field");
  grad_grid.add(grad);
  grad_src.add(grad);
  grad->add_flag("--with-magnitude", grad_mag, "Also write the gradient magnitude");

  auto* hess = app.add_subcommand("hessian", "Second derivatives of the 2D distance field");
  hess_grid.add(hess);
  hess_src.add(hess);
  hess->add_flag("--with-magnitude", hess_mag, "Also write the gradient magnitude");
  hess->add_flag("--with-curvature", hess_curv, "Also write Gaussian and mean curvature of the graph of S");

  SignFlags sign_flags;
  auto* sign = app.add_subcommand("sign", "Winding number or topological degree and inside/outside mask");
  sign_grid.add(sign);
  sign->add_option("--curve", sign_flags.curve, "Closed curve CSV (2 columns)");
  sign->add_option("--mesh", sign_flags.mesh, "Closed mesh (.obj or 9-column CSV)");
  sign->add_option("--precision", sign_flags.precision, "f64 or big:<bits>")->capture_default_str();
  sign->add_option("--threshold", sign_flags.threshold, "Classify mu >= threshold as inside");
  sign->add_option("--distance-field", sign_flags.distance_field, "Field file with S on the same grid");

  ExperimentFlags ef;
  auto* exp = app.add_subcommand("experiment", "Run a named protocol: example1 .. example5");
  exp->add_option("name", ef.name, "Protocol name")->required();
  exp->add_option("--trials", ef.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
  exp->add_option("--seed", ef.seed, "Base seed");
  exp->add_option("--iterations", ef.iterations, "Fast sweeping iterations")->check(CLI::PositiveNumber);
  exp->add_option("--sources", ef.sources, "Random sources per trial")->check(CLI::PositiveNumber);
  exp->add_option("--precision", ef.precision, "Distance precision, f64, big:<bits> or auto");
  exp->add_option("--sign-precision", ef.sign_precision, "Winding number precision");
  exp->add_option("--zero-policy", ef.zero_policy, "exclude or count_as_zero");
  exp->add_option("--taus", ef.taus, "Tau values");

  std::string info_path;
  auto* info = app.add_subcommand("info", "Print the JSON header of a field file");
  info->add_option("file", info_path, "Field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    convsdf::set_max_threads(common.threads);
    if (*info) return run_info(info_path);
    Sink sink(common.out);
    if (*dt) return run_dt(dt_grid, dt_src, method, iterations, clamp, csv, sink);
    if (*grad) return run_grad(grad_grid, grad_src, grad_mag, sink);
    if (*hess) return run_hessian(hess_grid, hess_src, hess_mag, hess_curv, sink);
    if (*sign) return run_sign(sign_grid, sign_flags, sink);
    if (*exp) return run_experiment(ef, sink);
  } catch (const convsdf::ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const convsdf::PrecisionError& e) {
    return fail("precision", e.what(), 3);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
