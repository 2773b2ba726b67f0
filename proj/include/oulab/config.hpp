#pragma once

// Experiment configuration: an INI-style file with [sections] and
// `key = value` lines. '#' and ';' start comments.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oulab/errors.hpp"
#include "oulab/geometry.hpp"
#include "oulab/grid.hpp"
#include "oulab/inverse.hpp"
#include "oulab/linops.hpp"

namespace oulab {

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Raw key/value store that remembers where each entry came from.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigFile parse(std::istream& in, const std::string& source = "<config>");
  static ConfigFile parse(const std::string& text, const std::string& source = "<config>");
  static ConfigFile load(const std::string& path);

  const std::string& source() const { return source_; }
  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;

  /// Throws ConfigError on the first key not in `known` ("section.key").
  void reject_unknown(const std::vector<std::string>& known) const;

  /// "<source>:<line>: [section] key: message"
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> entries_;
};

enum class InitialKind { kGaussian, kMixture, kBandLimited, kFile };

struct InitialSpec {
  InitialKind kind = InitialKind::kGaussian;
  double variance = 1.0;
  double amplitude = 1.0;
  std::vector<double> center;
  std::string path;
};

struct ExperimentConfig {
  GridSpec grid{1, 20.0, 256};
  DriftMatrix drift = DriftMatrix::zero(1);
  double theta = 1.0;
  int time_samples = 16;
  InitialSpec initial;

  std::string omega_text = "full";
  ThickSet omega = ThickSet::full(1);
  Box window;
  int thickness_resolution = 64;
  double geometric_delta = 0.0;  // 0 skips the interior-ball check
  double geometric_radius = 0.0;

  SamplingSpec sampling;
  SamplingSpec verify_sampling{1000, 100, 1e-6};

  AdmissibleClass admissible{AdmissibleClass::Kind::kGraphNormBall, 1e3, 0.5};
  StabilityParams stability;
  SweepOptions sweep;

  double reconstruct_alpha = 1e-10;
  int reconstruct_iterations = 400;
  double reconstruct_noise = 0.0;

  std::string ensemble_kind = "standard";
  int ensemble_count = 8;
  double observability_cap = 1e3;

  std::uint64_t seed = 1;
  std::string output = ".";
};

/// Validates every field; messages name the file, line and key.
ExperimentConfig parse_experiment(const ConfigFile& file);

/// The initial datum described by the config.
GridState initial_state(const ExperimentConfig& config);

}  // namespace oulab
