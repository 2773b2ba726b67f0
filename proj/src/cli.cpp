#include "oulab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "oulab/config.hpp"
#include "oulab/field.hpp"
#include "oulab/geometry.hpp"
#include "oulab/inverse.hpp"
#include "oulab/semigroup.hpp"

namespace oulab {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
  ExperimentConfig config;
  fs::path out_dir;
  std::ostream& log;
};

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

// ---- commands ---------------------------------------------------------------

void cmd_simulate(Context& ctx) {
  const auto& c = ctx.config;
  const GridState u0 = initial_state(c);
  const auto states = trajectory(u0, c.drift, c.theta, c.time_samples);
  std::ostringstream csv;
  csv << "t,norm\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double t = i + 1 == states.size() ? c.theta : c.theta * i / c.time_samples;
    char name[32];
    std::snprintf(name, sizeof name, "u_%03zu.ougs", i);
    save_state((ctx.out_dir / name).string(), states[i]);
    csv << g17(t) << ',' << g17(l2_norm(states[i])) << '\n';
  }
  write_text(ctx.out_dir / "norms.csv", csv.str());
  ctx.log << "simulate: wrote " << states.size() << " states and norms.csv\n";
}

void cmd_constants(Context& ctx) {
  const auto& c = ctx.config;
  const auto k = convexity_constants(c.drift, c.theta, c.sampling);
  const auto check = verify_qt_lower_bound(c.drift, c.theta, k, c.verify_sampling);
  Json j;
  j["theta"] = k.theta;
  j["c1"] = k.c1;
  j["c2"] = k.c2;
  j["c"] = k.c;
  j["kappa"] = k.kappa;
  j["argmin_t"] = k.argmin_t;
  j["argmin_xi"] = vec_json(k.argmin_xi);
  j["argmax_t"] = k.argmax_t;
  j["argmax_xi"] = vec_json(k.argmax_xi);
  j["qt_bound"] = {{"passed", check.passed},
                   {"min_slack", check.min_slack},
                   {"min_normalized_slack", check.min_normalized_slack},
                   {"witness_t", check.witness_t},
                   {"witness_xi", vec_json(check.witness_xi)},
                   {"samples", check.samples}};
  write_json(ctx.out_dir / "constants.json", j);
  ctx.log << "constants: c = " << g17(k.c) << ", kappa = " << g17(k.kappa)
          << (check.passed ? "" : " (lower-bound check FAILED)") << '\n';
}

void cmd_verify_convexity(Context& ctx) {
  const auto& c = ctx.config;
  const auto k = convexity_constants(c.drift, c.theta, c.sampling);
  const auto report = log_convexity_verify(initial_state(c), c.drift, k, c.time_samples);
  std::ostringstream csv;
  csv << "t,weight,norm,bound,ratio\n";
  for (const auto& r : report.rows) {
    csv << g17(r.t) << ',' << g17(r.weight) << ',' << g17(r.norm) << ',' << g17(r.bound) << ','
        << g17(r.ratio) << '\n';
  }
  write_text(ctx.out_dir / "convexity.csv", csv.str());
  Json j;
  j["c"] = k.c;
  j["kappa"] = k.kappa;
  j["initial_norm"] = report.initial_norm;
  j["final_norm"] = report.final_norm;
  j["max_ratio"] = report.max_ratio;
  j["passed"] = report.passed;
  write_json(ctx.out_dir / "convexity.json", j);
  ctx.log << "verify-convexity: max ratio " << g17(report.max_ratio) << '\n';
}

void cmd_thickness(Context& ctx) {
  const auto& c = ctx.config;
  const auto report = thickness_check(c.omega, c.window, c.thickness_resolution);
  Json j;
  j["gamma"] = c.omega.gamma();
  j["cube"] = vec_json(c.omega.cube());
  j["passed"] = report.passed;
  j["min_ratio"] = report.min_ratio;
  j["witness"] = vec_json(report.witness);
  j["tolerance"] = report.tolerance;
  j["samples"] = report.samples;
  j["exact"] = report.exact;
  if (c.geometric_delta > 0.0) {
    const auto g =
        geometric_condition_check(c.omega, c.geometric_delta, c.geometric_radius, c.window);
    j["geometric"] = {{"delta", c.geometric_delta},
                      {"radius", c.geometric_radius},
                      {"passed", g.passed},
                      {"worst_distance", g.worst_distance},
                      {"worst_point", vec_json(g.worst_point)},
                      {"samples", g.samples}};
  }
  write_json(ctx.out_dir / "thickness.json", j);
  ctx.log << "thickness: " << (report.passed ? "thick" : "NOT thick") << ", min ratio "
          << g17(report.min_ratio) << '\n';
}

void cmd_observability(Context& ctx) {
  const auto& c = ctx.config;
  const auto ensemble =
      c.ensemble_kind == "standard"
          ? standard_ensemble(c.grid, c.seed)
          : gaussian_mixture_ensemble(c.grid, c.ensemble_count, c.seed);
  const auto report = observability_ratio(ensemble, c.drift, c.omega, c.theta, c.time_samples,
                                          c.observability_cap);
  Json j;
  j["theta"] = c.theta;
  j["members"] = ensemble.size();
  j["ratios"] = vec_json(report.ratios);
  j["max_ratio"] = report.max_ratio;
  j["cap"] = report.cap;
  j["within_cap"] = report.within_cap;
  write_json(ctx.out_dir / "observability.json", j);
  ctx.log << "observability: max ratio " << g17(report.max_ratio) << '\n';
}

void cmd_reconstruct(Context& ctx) {
  const auto& c = ctx.config;
  const GridState u0 = initial_state(c);
  ObservationRecord record = observe(u0, c.drift, c.omega, c.theta, c.time_samples);
  if (c.reconstruct_noise > 0.0) {
    double peak = 0.0;
    for (const auto& s : record.masked_states) {
      for (double v : s.values()) peak = std::max(peak, std::abs(v));
    }
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& s : record.masked_states) {
      for (std::size_t i = 0; i < s.values().size(); ++i) {
        const double z = gauss(rng);
        if (record.mask.cells[i]) s[i] += c.reconstruct_noise * peak * z;
      }
    }
  }
  const auto result =
      reconstruct(record, c.drift, c.reconstruct_alpha, c.reconstruct_iterations);
  save_state((ctx.out_dir / "estimate.ougs").string(), result.estimate);
  const double error = l2_norm(result.estimate - u0) / l2_norm(u0);
  Json j;
  j["alpha"] = c.reconstruct_alpha;
  j["noise"] = c.reconstruct_noise;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["relative_residual"] = result.relative_residual;
  j["relative_error"] = error;
  j["l2_time_norm"] = record.l2_time_norm;
  j["h1_time_norm"] = record.h1_time_norm;
  write_json(ctx.out_dir / "reconstruct.json", j);
  ctx.log << "reconstruct: relative error " << g17(error) << " after " << result.iterations
          << " iterations\n";
}

void cmd_sweep(Context& ctx) {
  const auto& c = ctx.config;
  const auto curve = stability_sweep(initial_state(c), c.drift, c.omega, c.theta, c.sweep);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  write_text(ctx.out_dir / "curve.csv", csv.str());
  Json j;
  j["C"] = curve.C;
  j["C1"] = curve.C1;
  j["coverage"] = curve.coverage;
  j["overall_coverage"] = curve.overall_coverage;
  j["inversion_fraction"] = curve.inversion_fraction;
  j["noiseless_relative_error"] = curve.noiseless_relative_error;
  j["rows"] = curve.rows.size();
  write_json(ctx.out_dir / "fit.json", j);
  ctx.log << "sweep: C = " << g17(curve.C) << ", coverage " << g17(curve.coverage) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ornstein-Uhlenbeck backward-problem experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  long seed = -1;

  const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>> commands{
      {"simulate", {"trajectory snapshots and norms", cmd_simulate}},
      {"constants", {"convexity constants and the Q_t lower-bound check", cmd_constants}},
      {"verify-convexity", {"logarithmic convexity ratios", cmd_verify_convexity}},
      {"thickness", {"thickness certificate of the observation set", cmd_thickness}},
      {"observability", {"empirical observability ratios", cmd_observability}},
      {"reconstruct", {"Tikhonov reconstruction of the initial datum", cmd_reconstruct}},
      {"sweep", {"noise sweep and stability-curve fit", cmd_sweep}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [run] output)");
    sub->add_option("--seed", seed, "seed (overrides [run] seed)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string name;
  for (const auto* sub : app.get_subcommands()) name = sub->get_name();

  try {
    ExperimentConfig config = parse_experiment(ConfigFile::load(config_path));
    if (seed >= 0) {
      config.seed = static_cast<std::uint64_t>(seed);
      config.sweep.seed = config.seed;
    }
    fs::path dir = out_dir.empty() ? fs::path(config.output) : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    Context ctx{std::move(config), dir, out};
    commands.at(name).second(ctx);
    return kExitOk;
  } catch (const InvalidInput& e) {
    err << "oulab " << name << ": configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainTruncation& e) {
    err << "oulab " << name << ": numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const DegenerateCase& e) {
    err << "oulab " << name << ": numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const OutOfRegime& e) {
    err << "oulab " << name << ": numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::exception& e) {
    err << "oulab " << name << ": solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace oulab
