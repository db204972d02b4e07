#ifndef CONVSDF_EXPERIMENTS_HPP
#define CONVSDF_EXPERIMENTS_HPP

// Named experiment protocols on the grids of the original study, with
// seeded sampling so every report is reproducible from its embedded config.
//
//   example1  tau sweep of the convolution error, random node sources
//   example2  convolution vs fast sweeping, random node sources
//   example3  closed-curve sources: errors, gradient magnitudes, winding
//   example4  convolution vs fast sweeping on a 3D surface point cloud
//   example5  topological degree classification of closed meshes

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "convsdf/derivatives.hpp"
#include "convsdf/distance.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"
#include "convsdf/metrics.hpp"
#include "convsdf/shapes.hpp"
#include "convsdf/sign.hpp"
#include "convsdf/sweeping.hpp"

namespace convsdf {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 1;
  int trials = 1;
  std::vector<double> min, max;
  double spacing = 0.0;
  std::vector<double> taus;
  std::string precision = "big:512";
  std::string sign_precision = "f64";
  std::size_t sources = 0;
  bool with_replacement = true;
  ZeroPolicy zero_policy = ZeroPolicy::count_as_zero;
  int iterations = 10;
  std::vector<std::string> shapes;

  GridSpec grid() const { return GridSpec::from_bounds(min, max, spacing); }

  static ExperimentConfig defaults(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    if (name == "example1") {
      c.trials = 20;
      c.min = {-0.121, -0.121};
      c.max = {0.121, 0.121};
      c.spacing = 1.0 / 512;
      for (int i = 1; i <= 9; ++i) c.taus.push_back(5e-5 * i);
      c.sources = 5000;
    } else if (name == "example2") {
      c.trials = 10;
      c.min = {-0.123, -0.123};
      c.max = {0.123, 0.123};
      c.spacing = 1.0 / 1024;
      c.taus = {1e-4};
      c.sources = 10000;
      c.iterations = 10;
    } else if (name == "example3") {
      c.trials = 1;
      c.min = {-0.125, -0.125};
      c.max = {0.125, 0.125};
      c.spacing = 1.0 / 1024;
      c.taus = {3e-4};
      c.precision = "auto";
      c.iterations = 10;
      c.shapes = {"blob-a", "blob-b", "blob-c"};
      c.zero_policy = ZeroPolicy::exclude;
    } else if (name == "example4") {
      c.trials = 1;
      c.min = {-0.117, -0.086, -0.047};
      c.max = {0.117, 0.086, 0.047};
      c.spacing = 1.0 / 256;
      c.taus = {4e-4};
      c.iterations = 15;
      c.zero_policy = ZeroPolicy::exclude;
    } else if (name == "example5") {
      c.trials = 1;
      c.min = {-0.125, -0.125, -0.125};
      c.max = {0.125, 0.125, 0.125};
      c.spacing = 1.0 / 256;
      c.taus = {};
      c.precision = "f64";
      c.shapes = {"cube", "sphere", "cylinder"};
    } else {
      throw ValidationError("unknown experiment '" + std::string(name) + "' (expected example1..example5)");
    }
    return c;
  }

  void validate() const {
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (min.size() != max.size() || min.empty()) throw ValidationError("experiment bounds are inconsistent");
    if (!(spacing > 0.0)) throw ValidationError("spacing must be positive");
    for (double t : taus)
      if (!(t > 0.0)) throw ValidationError("tau values must be positive");
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
  }

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["seed"] = seed;
    j["trials"] = trials;
    j["min"] = min;
    j["max"] = max;
    j["spacing"] = spacing;
    j["counts"] = grid().counts();
    j["taus"] = taus;
    j["precision"] = precision;
    j["sign_precision"] = sign_precision;
    j["sources"] = sources;
    j["with_replacement"] = with_replacement;
    j["zero_policy"] = to_string(zero_policy);
    j["iterations"] = iterations;
    j["shapes"] = shapes;
    return j;
  }
};

/// A finished experiment: the JSON report and a flat CSV table.
struct ExperimentReport {
  Json json;
  std::string csv;
};

namespace detail {

inline std::string csv_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

inline PrecisionConfig precision_for(const ExperimentConfig& c, double tau, const PointSet& ps, const GridSpec& g) {
  return resolve_precision(c.precision, tau, ps, g);
}

}  // namespace detail

/// Per-tau statistics of the convolution error over seeded trials.
struct TauSweepRow {
  double tau;
  double mean;       // mean over trials of the per-trial error
  double max;        // max over trials of the per-trial error
  double min;
  double bound;      // tau log K
  std::vector<double> trials;
};

/// Mean error strictly increasing, and growing slower than tau itself.
struct SublinearCheck {
  bool monotone = true;
  bool sublinear = true;
  std::vector<double> error_ratios;
  std::vector<double> tau_ratios;
};

inline SublinearCheck check_sublinear(const std::vector<TauSweepRow>& rows) {
  SublinearCheck c;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    double er = rows[i + 1].mean / rows[i].mean, tr = rows[i + 1].tau / rows[i].tau;
    c.error_ratios.push_back(er);
    c.tau_ratios.push_back(tr);
    c.monotone = c.monotone && rows[i + 1].mean > rows[i].mean;
    c.sublinear = c.sublinear && er < tr;
  }
  return c;
}

/// Example-1 protocol: random node sources, one FFT distance per tau.
inline std::vector<TauSweepRow> tau_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  GridSpec grid = cfg.grid();
  std::vector<TauSweepRow> rows;
  for (double tau : cfg.taus) rows.push_back({tau, 0.0, 0.0, 0.0, 0.0, {}});
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(Rng::trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    auto nodes = sample_nodes(rng, grid.size(), cfg.sources, cfg.with_replacement);
    PointSet ps = point_set_from_nodes(grid, nodes);
    ScalarField r = r_exact(ps, grid);
    for (auto& row : rows) {
      ScalarField s = s_fft(ps, grid, detail::precision_for(cfg, row.tau, ps, grid));
      row.trials.push_back(percentage_error(s, r, cfg.zero_policy).mean);
    }
  }
  for (auto& row : rows) {
    row.bound = row.tau * std::log(static_cast<double>(cfg.sources));
    double sum = 0;
    row.max = row.trials.front();
    row.min = row.trials.front();
    for (double e : row.trials) {
      sum += e;
      row.max = std::max(row.max, e);
      row.min = std::min(row.min, e);
    }
    row.mean = sum / static_cast<double>(row.trials.size());
  }
  return rows;
}

struct BaselineTrial {
  double convolution;
  double sweeping;
  std::size_t sources;
};

struct BaselineSummary {
  std::vector<BaselineTrial> trials;
  double convolution_mean = 0.0;
  double sweeping_mean = 0.0;
  double ratio = 0.0;  // convolution_mean / sweeping_mean
};

namespace detail {
inline BaselineTrial baseline_trial(const PointSet& ps, const GridSpec& grid, const ExperimentConfig& cfg) {
  ScalarField r = r_exact(ps, grid);
  ScalarField s = s_fft(ps, grid, precision_for(cfg, cfg.taus.at(0), ps, grid));
  ScalarField u = fast_sweep(ps, grid, cfg.iterations);
  return {percentage_error(s, r, cfg.zero_policy).mean, percentage_error(u, r, cfg.zero_policy).mean,
          ps.unique_nodes().size()};
}

inline PointSet baseline_sources(Rng& rng, const GridSpec& grid, const ExperimentConfig& cfg) {
  if (grid.dim() == 3) {
    Point lo{grid.origin(0), grid.origin(1), grid.origin(2)};
    auto cloud = shapes::creature_points(rng, lo, grid.max_corner(), 0.5 * grid.spacing());
    // both methods see the point set as represented on the grid
    PointSet snapped = snap_points(cloud, grid);
    return point_set_from_nodes(grid, snapped.unique_nodes());
  }
  return point_set_from_nodes(grid, sample_nodes(rng, grid.size(), cfg.sources, cfg.with_replacement));
}
}  // namespace detail

/// Convolution and fast sweeping on identical sources; errors against the
/// exact distance of the grid point set.
inline BaselineSummary compare_baselines(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.taus.empty()) throw ValidationError("baseline comparison needs a tau");
  GridSpec grid = cfg.grid();
  BaselineSummary out;
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(Rng::trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    out.trials.push_back(detail::baseline_trial(detail::baseline_sources(rng, grid, cfg), grid, cfg));
  }
  for (const auto& tr : out.trials) {
    out.convolution_mean += tr.convolution;
    out.sweeping_mean += tr.sweeping;
  }
  out.convolution_mean /= static_cast<double>(out.trials.size());
  out.sweeping_mean /= static_cast<double>(out.trials.size());
  out.ratio = out.convolution_mean / out.sweeping_mean;
  return out;
}

/// Example-3 measurements for one closed curve.
struct CurveResult {
  std::string shape;
  std::size_t vertices = 0;
  std::string precision;
  double convolution_error = 0.0;
  double sweeping_error = 0.0;
  double magnitude_fraction = 0.0;  // non-source nodes with |grad S| >= 0.9
  double magnitude_max = 0.0;
  double near_binary = 0.0;         // unflagged mu within 0.25 of 0 or 1
  std::size_t interior = 0;
  double even_odd_agreement = 0.0;  // vs the even-odd rule, nodes > h from the curve
};

inline std::vector<Point> experiment_curve(const ExperimentConfig& cfg, std::size_t index) {
  GridSpec grid = cfg.grid();
  Rng rng(Rng::trial_seed(cfg.seed, 1000 + index));
  auto raw = shapes::blob_curve(rng, {0.0, 0.0, 0.0}, 0.07, 5, 0.25 * grid.spacing());
  return shapes::snap_curve(raw, grid);
}

inline CurveResult run_curve(const ExperimentConfig& cfg, std::size_t index) {
  GridSpec grid = cfg.grid();
  auto poly = experiment_curve(cfg, index);
  PointSet ps = snap_points(poly, grid);
  PrecisionConfig pc = detail::precision_for(cfg, cfg.taus.at(0), ps, grid);
  CurveResult out;
  out.shape = cfg.shapes.at(index);
  out.vertices = poly.size();
  out.precision = pc.label();

  ScalarField r = r_exact(ps, grid);
  GradientResult gr = gradient(ps, grid, pc);
  out.convolution_error = percentage_error(gr.distance, r, cfg.zero_policy).mean;
  out.sweeping_error = percentage_error(fast_sweep(ps, grid, cfg.iterations), r, cfg.zero_policy).mean;

  ScalarField mag = gradient_magnitude(gr.gradient);
  std::vector<char> source(grid.size(), 0);
  for (std::size_t n : ps.unique_nodes()) source[n] = 1;
  std::size_t counted = 0, good = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.magnitude_max = std::max(out.magnitude_max, mag[i]);
    if (source[i]) continue;
    ++counted;
    good += mag[i] >= 0.9;
  }
  out.magnitude_fraction = static_cast<double>(good) / static_cast<double>(counted);

  Curve2D curve(poly);
  SignField sf = winding_field(curve, grid, PrecisionConfig::parse(cfg.sign_precision, pc.tau));
  Classification cls = classify(sf.mu, sf.flagged, SignMode::winding2d);
  std::size_t binary = 0, band = 0, agree = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.interior += cls.inside[i];
    if (!source[i]) binary += std::min(std::abs(sf.mu[i]), std::abs(sf.mu[i] - 1.0)) <= 0.25;
    if (r[i] > grid.spacing()) {
      ++band;
      agree += static_cast<bool>(cls.inside[i]) == shapes::inside_even_odd(poly, grid.position(i));
    }
  }
  out.near_binary = static_cast<double>(binary) / static_cast<double>(counted);
  out.even_odd_agreement = static_cast<double>(agree) / static_cast<double>(band);
  return out;
}

/// Example-5 measurements for one closed mesh.
struct MeshResult {
  std::string shape;
  std::size_t triangles = 0;
  std::size_t interior = 0;
  double agreement = 0.0;  // vs analytic membership, nodes > h from the surface
  double mu_inside_mean = 0.0;
};

inline std::vector<Triangle> experiment_mesh(std::string_view name) {
  if (name == "cube") return shapes::cube(0.08, 40);
  if (name == "sphere") return shapes::sphere(0.09, 5);
  if (name == "cylinder") return shapes::cylinder(0.06, 0.09, 96, 48, 16);
  throw ValidationError("unknown mesh '" + std::string(name) + "' (expected cube, sphere or cylinder)");
}

/// Signed distance to the analytic shape (negative inside).
inline double analytic_signed_distance(std::string_view name, const Point& p) {
  if (name == "cube") {
    double q[3], outside = 0.0, inside = -1e300;
    for (int d = 0; d < 3; ++d) {
      q[d] = std::abs(p[d]) - 0.08;
      outside += std::max(q[d], 0.0) * std::max(q[d], 0.0);
      inside = std::max(inside, q[d]);
    }
    return std::sqrt(outside) + std::min(inside, 0.0);
  }
  if (name == "sphere") return vec::norm(p) - 0.09;
  if (name == "cylinder") {
    double dr = std::hypot(p[0], p[1]) - 0.06, dz = std::abs(p[2]) - 0.09;
    return std::min(std::max(dr, dz), 0.0) + std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
  }
  throw ValidationError("unknown mesh '" + std::string(name) + "'");
}

inline MeshResult run_mesh(const ExperimentConfig& cfg, const std::string& name) {
  GridSpec grid = cfg.grid();
  Surface3D surface = triangulate_and_orient(experiment_mesh(name));
  PrecisionConfig pc = PrecisionConfig::parse(cfg.precision, 1.0);
  SignField sf = degree_field(surface, grid, pc);
  Classification cls = classify(sf.mu, sf.flagged, SignMode::degree3d);
  MeshResult out;
  out.shape = name;
  out.triangles = surface.size();
  std::size_t band = 0, agree = 0, inside_count = 0;
  double inside_sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.interior += cls.inside[i];
    double sd = analytic_signed_distance(name, grid.position(i));
    if (std::abs(sd) > grid.spacing()) {
      ++band;
      agree += static_cast<bool>(cls.inside[i]) == (sd < 0.0);
      if (sd < 0.0 && !cls.low_confidence[i]) {
        ++inside_count;
        inside_sum += sf.mu[i];
      }
    }
  }
  out.agreement = static_cast<double>(agree) / static_cast<double>(band);
  out.mu_inside_mean = inside_count ? inside_sum / static_cast<double>(inside_count) : 0.0;
  return out;
}

/// Runs a named protocol and builds its reports.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Json j;
  j["experiment"] = cfg.name;
  j["config"] = cfg.to_json();
  std::ostringstream csv;
  using detail::csv_number;

  if (cfg.name == "example1") {
    auto rows = tau_sweep(cfg);
    auto check = check_sublinear(rows);
    Json table = Json::array();
    csv << "tau,mean_error,max_error,min_error,bound\n";
    for (const auto& r : rows) {
      table.push_back({{"tau", r.tau}, {"mean_error", r.mean}, {"max_error", r.max}, {"min_error", r.min},
                       {"bound", r.bound}, {"trial_errors", r.trials}});
      csv << csv_number(r.tau) << ',' << csv_number(r.mean) << ',' << csv_number(r.max) << ','
          << csv_number(r.min) << ',' << csv_number(r.bound) << '\n';
    }
    j["results"] = table;
    j["growth"] = {{"monotone", check.monotone}, {"sublinear", check.sublinear},
                   {"error_ratios", check.error_ratios}, {"tau_ratios", check.tau_ratios}};
  } else if (cfg.name == "example2" || cfg.name == "example4") {
    auto s = compare_baselines(cfg);
    Json table = Json::array();
    csv << "trial,sources,convolution_error,sweeping_error\n";
    for (std::size_t t = 0; t < s.trials.size(); ++t) {
      const auto& tr = s.trials[t];
      table.push_back({{"trial", t}, {"sources", tr.sources}, {"convolution_error", tr.convolution},
                       {"sweeping_error", tr.sweeping}});
      csv << t << ',' << tr.sources << ',' << csv_number(tr.convolution) << ',' << csv_number(tr.sweeping) << '\n';
    }
    j["results"] = table;
    j["summary"] = {{"convolution_mean", s.convolution_mean}, {"sweeping_mean", s.sweeping_mean},
                    {"ratio", s.ratio}};
  } else if (cfg.name == "example3") {
    Json table = Json::array();
    csv << "shape,vertices,convolution_error,sweeping_error,magnitude_fraction,magnitude_max,near_binary,interior,"
           "even_odd_agreement\n";
    for (std::size_t k = 0; k < cfg.shapes.size(); ++k) {
      auto r = run_curve(cfg, k);
      table.push_back({{"shape", r.shape}, {"vertices", r.vertices}, {"precision", r.precision}, {"convolution_error", r.convolution_error},
                       {"sweeping_error", r.sweeping_error}, {"magnitude_fraction", r.magnitude_fraction},
                       {"magnitude_max", r.magnitude_max}, {"near_binary", r.near_binary},
                       {"interior", r.interior}, {"even_odd_agreement", r.even_odd_agreement}});
      csv << r.shape << ',' << r.vertices << ',' << csv_number(r.convolution_error) << ','
          << csv_number(r.sweeping_error) << ',' << csv_number(r.magnitude_fraction) << ','
          << csv_number(r.magnitude_max) << ',' << csv_number(r.near_binary) << ',' << r.interior << ','
          << csv_number(r.even_odd_agreement) << '\n';
    }
    j["results"] = table;
  } else if (cfg.name == "example5") {
    Json table = Json::array();
    csv << "shape,triangles,interior,agreement,mu_inside_mean\n";
    for (const auto& name : cfg.shapes) {
      auto r = run_mesh(cfg, name);
      table.push_back({{"shape", r.shape}, {"triangles", r.triangles}, {"interior", r.interior},
                       {"agreement", r.agreement}, {"mu_inside_mean", r.mu_inside_mean}});
      csv << r.shape << ',' << r.triangles << ',' << r.interior << ',' << csv_number(r.agreement) << ','
          << csv_number(r.mu_inside_mean) << '\n';
    }
    j["results"] = table;
  } else {
    throw ValidationError("unknown experiment '" + cfg.name + "'");
  }
  return {j, csv.str()};
}

}  // namespace convsdf

#endif  // CONVSDF_EXPERIMENTS_HPP
