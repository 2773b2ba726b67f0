#include "oulab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace oulab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits on whitespace and commas.
std::vector<std::string> tokens(const std::string& s) {
  std::string spaced = s;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool to_double(const std::string& token, double& value) {
  char* end = nullptr;
  value = std::strtod(token.c_str(), &end);
  return end != token.c_str() && *end == '\0';
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
  ConfigFile file;
  file.source_ = source;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    const std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    }
    if (section.empty()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": key '" + key +
                        "' appears before any [section]");
    }
    auto& slot = file.entries_[section];
    if (slot.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": [" + section + "] " + key +
                        ": duplicate key (first set on line " +
                        std::to_string(slot[key].line) + ")");
    }
    slot[key] = Entry{trim(line.substr(eq + 1)), line_no};
  }
  return file;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
  const auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& message) const {
  const Entry* e = find(section, key);
  const std::string where = e ? source_ + ":" + std::to_string(e->line) : source_;
  throw ConfigError(where + ": [" + section + "] " + key + ": " + message);
}

std::string ConfigFile::text(const std::string& section, const std::string& key,
                             const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!to_double(e->value, v) || !std::isfinite(v)) {
    fail(section, key, "expected a finite number, got '" + e->value + "'");
  }
  return v;
}

long ConfigFile::integer(const std::string& section, const std::string& key,
                         long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const long v = std::strtol(e->value.c_str(), &end, 10);
  if (end == e->value.c_str() || *end != '\0') {
    fail(section, key, "expected an integer, got '" + e->value + "'");
  }
  return v;
}

std::vector<double> ConfigFile::numbers(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& t : tokens(e->value)) {
    double v = 0.0;
    if (!to_double(t, v) || std::isnan(v)) fail(section, key, "not a number: '" + t + "'");
    out.push_back(v);
  }
  return out;
}

void ConfigFile::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& [section, keys] : entries_) {
    for (const auto& [key, entry] : keys) {
      const std::string name = section + "." + key;
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": [" + section + "] " +
                          key + ": unknown key");
      }
    }
  }
}

ExperimentConfig parse_experiment(const ConfigFile& f) {
  f.reject_unknown({
      "grid.dim", "grid.half_width", "grid.points",
      "drift.matrix",
      "time.theta", "time.samples",
      "initial.kind", "initial.variance", "initial.amplitude", "initial.center", "initial.path",
      "omega.set", "omega.window", "omega.resolution", "omega.delta", "omega.radius",
      "convexity.time_samples", "convexity.direction_samples", "convexity.refine_tolerance",
      "convexity.verify_time_samples", "convexity.verify_direction_samples",
      "admissible.kind", "admissible.R", "admissible.epsilon",
      "stability.C", "stability.C1", "stability.K", "stability.p", "stability.s",
      "sweep.noise_levels", "sweep.reps", "sweep.alpha_floor", "sweep.alpha_scale",
      "sweep.iterations", "sweep.calibration_reps",
      "reconstruct.alpha", "reconstruct.iterations", "reconstruct.noise",
      "ensemble.kind", "ensemble.count", "ensemble.cap",
      "run.seed", "run.output",
  });

  ExperimentConfig c;
  // Re-raise library validation errors with the offending key.
  auto guarded = [&f](const char* section, const char* key, auto&& make) {
    try {
      return make();
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      f.fail(section, key, e.what());
    }
  };

  const int dim = static_cast<int>(f.integer("grid", "dim", 1));
  const double half_width = f.number("grid", "half_width", 20.0);
  const int points = static_cast<int>(f.integer("grid", "points", 256));
  c.grid = guarded("grid", "points", [&] { return GridSpec(dim, half_width, points); });

  const auto entries = f.numbers("drift", "matrix", std::vector<double>(dim * dim, 0.0));
  if (static_cast<int>(entries.size()) != dim * dim) {
    f.fail("drift", "matrix", "expected " + std::to_string(dim * dim) +
                                  " row-major entries for dim = " + std::to_string(dim));
  }
  c.drift = guarded("drift", "matrix", [&] { return DriftMatrix::from_rows(entries); });

  c.theta = f.number("time", "theta", 1.0);
  if (!(c.theta > 0.0)) f.fail("time", "theta", "must be positive");
  c.time_samples = static_cast<int>(f.integer("time", "samples", 16));
  if (c.time_samples < 1) f.fail("time", "samples", "must be positive");

  const std::string kind = f.text("initial", "kind", "gaussian");
  if (kind == "gaussian") {
    c.initial.kind = InitialKind::kGaussian;
  } else if (kind == "mixture") {
    c.initial.kind = InitialKind::kMixture;
  } else if (kind == "band_limited") {
    c.initial.kind = InitialKind::kBandLimited;
  } else if (kind == "file") {
    c.initial.kind = InitialKind::kFile;
  } else {
    f.fail("initial", "kind", "expected gaussian, mixture, band_limited or file");
  }
  c.initial.variance = f.number("initial", "variance", 1.0);
  if (!(c.initial.variance > 0.0)) f.fail("initial", "variance", "must be positive");
  c.initial.amplitude = f.number("initial", "amplitude", 1.0);
  c.initial.center = f.numbers("initial", "center", std::vector<double>(dim, 0.0));
  if (static_cast<int>(c.initial.center.size()) != dim) {
    f.fail("initial", "center", "expected " + std::to_string(dim) + " coordinates");
  }
  c.initial.path = f.text("initial", "path", "");
  if (c.initial.kind == InitialKind::kFile && c.initial.path.empty()) {
    f.fail("initial", "path", "required when kind = file");
  }

  c.omega_text = f.text("omega", "set", "full");
  c.omega = guarded("omega", "set", [&] {
    std::string text = c.omega_text;
    std::replace(text.begin(), text.end(), '|', '\n');
    return parse_thick_set(text, dim);
  });
  const double l = c.grid.half_width();
  std::vector<double> window_default;
  for (int i = 0; i < dim; ++i) {
    window_default.push_back(-l);
    window_default.push_back(l);
  }
  const auto window = f.numbers("omega", "window", window_default);
  if (static_cast<int>(window.size()) != 2 * dim) {
    f.fail("omega", "window", "expected lo/hi pairs for each of the " + std::to_string(dim) +
                                  " axes");
  }
  for (int i = 0; i < dim; ++i) {
    if (!(window[2 * i] < window[2 * i + 1])) f.fail("omega", "window", "needs lo < hi");
    c.window.lo.push_back(window[2 * i]);
    c.window.hi.push_back(window[2 * i + 1]);
  }
  c.thickness_resolution = static_cast<int>(f.integer("omega", "resolution", 64));
  if (c.thickness_resolution < 64) f.fail("omega", "resolution", "must be >= 64");
  c.geometric_delta = f.number("omega", "delta", 0.0);
  c.geometric_radius = f.number("omega", "radius", 0.0);
  if (c.geometric_delta < 0.0) f.fail("omega", "delta", "must be >= 0");
  if (c.geometric_delta > 0.0 && !(c.geometric_radius > 0.0)) {
    f.fail("omega", "radius", "must be positive when delta is set");
  }

  c.sampling.time_samples = static_cast<int>(f.integer("convexity", "time_samples", 64));
  c.sampling.direction_samples =
      static_cast<int>(f.integer("convexity", "direction_samples", 64));
  c.sampling.refine_tolerance = f.number("convexity", "refine_tolerance", 1e-6);
  if (c.sampling.time_samples < 2) f.fail("convexity", "time_samples", "must be >= 2");
  if (c.sampling.direction_samples < 2) f.fail("convexity", "direction_samples", "must be >= 2");
  if (!(c.sampling.refine_tolerance > 0.0)) {
    f.fail("convexity", "refine_tolerance", "must be positive");
  }
  c.verify_sampling.time_samples =
      static_cast<int>(f.integer("convexity", "verify_time_samples", 1000));
  c.verify_sampling.direction_samples =
      static_cast<int>(f.integer("convexity", "verify_direction_samples", 100));
  if (c.verify_sampling.time_samples < 2) {
    f.fail("convexity", "verify_time_samples", "must be >= 2");
  }
  if (c.verify_sampling.direction_samples < 2) {
    f.fail("convexity", "verify_direction_samples", "must be >= 2");
  }

  const std::string admissible = f.text("admissible", "kind", "graph");
  if (admissible == "graph") {
    c.admissible.kind = AdmissibleClass::Kind::kGraphNormBall;
  } else if (admissible == "sobolev") {
    c.admissible.kind = AdmissibleClass::Kind::kSobolevBall;
  } else {
    f.fail("admissible", "kind", "expected graph or sobolev");
  }
  c.admissible.radius = f.number("admissible", "R", 1e3);
  c.admissible.epsilon = f.number("admissible", "epsilon", 0.5);
  guarded("admissible", "R", [&] {
    c.admissible.validate();
    return 0;
  });

  c.stability.C = f.number("stability", "C", 1.0);
  c.stability.C1 = f.number("stability", "C1", 0.0);
  c.stability.K = f.number("stability", "K", 1.0);
  c.stability.p = f.number("stability", "p", 1.5);
  c.stability.s = f.number("stability", "s", 0.25);
  c.stability.epsilon = c.admissible.epsilon;
  if (!(c.stability.C > 0.0)) f.fail("stability", "C", "must be positive");
  if (c.stability.C1 < 0.0) f.fail("stability", "C1", "must be >= 0 (0 selects it from data)");
  guarded("stability", "p", [&] {
    c.stability.validate_heat();
    return 0;
  });

  c.sweep.noise_levels = f.numbers(
      "sweep", "noise_levels",
      {0.0, 1e-6, 3.1622776601683795e-6, 1e-5, 3.1622776601683795e-5, 1e-4,
       3.1622776601683795e-4, 1e-3, 3.1622776601683795e-3, 1e-2});
  if (c.sweep.noise_levels.empty()) f.fail("sweep", "noise_levels", "must not be empty");
  for (double v : c.sweep.noise_levels) {
    if (!(v >= 0.0) || !std::isfinite(v)) f.fail("sweep", "noise_levels", "must be >= 0");
  }
  c.sweep.reps = static_cast<int>(f.integer("sweep", "reps", 5));
  c.sweep.calibration_reps = static_cast<int>(f.integer("sweep", "calibration_reps", 2));
  if (c.sweep.reps < 2) f.fail("sweep", "reps", "must be >= 2");
  if (c.sweep.calibration_reps < 1 || c.sweep.calibration_reps >= c.sweep.reps) {
    f.fail("sweep", "calibration_reps", "must lie in [1, reps)");
  }
  c.sweep.alpha_floor = f.number("sweep", "alpha_floor", c.sweep.alpha_floor);
  c.sweep.alpha_scale = f.number("sweep", "alpha_scale", c.sweep.alpha_scale);
  if (!(c.sweep.alpha_floor > 0.0)) f.fail("sweep", "alpha_floor", "must be positive");
  if (c.sweep.alpha_scale < 0.0) f.fail("sweep", "alpha_scale", "must be >= 0");
  c.sweep.iterations = static_cast<int>(f.integer("sweep", "iterations", c.sweep.iterations));
  if (c.sweep.iterations < 1) f.fail("sweep", "iterations", "must be positive");
  c.sweep.k = c.time_samples;
  c.sweep.C1 = c.stability.C1;
  c.sweep.admissible = c.admissible;

  c.reconstruct_alpha = f.number("reconstruct", "alpha", 1e-10);
  if (!(c.reconstruct_alpha > 0.0)) f.fail("reconstruct", "alpha", "must be positive");
  c.reconstruct_iterations = static_cast<int>(f.integer("reconstruct", "iterations", 400));
  if (c.reconstruct_iterations < 1) f.fail("reconstruct", "iterations", "must be positive");
  c.reconstruct_noise = f.number("reconstruct", "noise", 0.0);
  if (c.reconstruct_noise < 0.0) f.fail("reconstruct", "noise", "must be >= 0");

  c.ensemble_kind = f.text("ensemble", "kind", "standard");
  if (c.ensemble_kind != "standard" && c.ensemble_kind != "mixture") {
    f.fail("ensemble", "kind", "expected standard or mixture");
  }
  c.ensemble_count = static_cast<int>(f.integer("ensemble", "count", 8));
  if (c.ensemble_count < 1) f.fail("ensemble", "count", "must be positive");
  c.observability_cap = f.number("ensemble", "cap", 1e3);
  if (!(c.observability_cap > 0.0)) f.fail("ensemble", "cap", "must be positive");

  const long seed = f.integer("run", "seed", 1);
  if (seed < 0) f.fail("run", "seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.sweep.seed = c.seed;
  c.output = f.text("run", "output", ".");
  return c;
}

GridState initial_state(const ExperimentConfig& config) {
  const auto& spec = config.grid;
  switch (config.initial.kind) {
    case InitialKind::kGaussian: {
      const auto& ic = config.initial;
      return sample(spec, [&](const double* x) {
        double r2 = 0.0;
        for (int d = 0; d < spec.dim(); ++d) r2 += (x[d] - ic.center[d]) * (x[d] - ic.center[d]);
        return ic.amplitude * std::exp(-r2 / (2.0 * ic.variance));
      });
    }
    case InitialKind::kMixture:
      return gaussian_mixture_ensemble(spec, 1, config.seed).front();
    case InitialKind::kBandLimited:
      return band_limited_ensemble(spec, 1, config.seed, 2.0, config.initial.variance).front();
    case InitialKind::kFile: {
      GridState s = load_state(config.initial.path);
      if (!(s.spec() == spec)) {
        throw ConfigError("initial state '" + config.initial.path +
                          "' does not match the [grid] section");
      }
      return s;
    }
  }
  throw ConfigError("unknown initial kind");
}

}  // namespace oulab
