#pragma once

// The backward problem: logarithmic convexity, observation records,
// observability ratios, conditional stability bounds and reconstruction of
// the initial datum from masked trajectories.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oulab/field.hpp"
#include "oulab/geometry.hpp"
#include "oulab/linops.hpp"
#include "oulab/semigroup.hpp"

namespace oulab {

// ---- logarithmic convexity --------------------------------------------------

struct ConvexityRow {
  double t = 0.0;
  double weight = 0.0;  // c t / theta
  double norm = 0.0;    // ||T(t) u0||
  double bound = 0.0;   // kappa ||u0||^{1-w} ||T(theta) u0||^{w}
  double ratio = 0.0;
};

struct ConvexityReport {
  double max_ratio = 0.0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  std::vector<ConvexityRow> rows;
  bool passed = false;  // max_ratio <= 1 + 1e-4
};

/// Evaluates ||T(t)u0|| <= kappa ||u0||^{1-ct/theta} ||T(theta)u0||^{ct/theta}
/// at t_i = i theta / k, i = 0..k.
ConvexityReport log_convexity_verify(const GridState& u0, const DriftMatrix& b,
                                     const ConvexityConstants& constants, int k);

/// The same for every member, sharing the semigroup steps.
std::vector<ConvexityReport> log_convexity_verify(const std::vector<GridState>& ensemble,
                                                  const DriftMatrix& b,
                                                  const ConvexityConstants& constants, int k);

// ---- observations -----------------------------------------------------------

/// The measurement u|_{(0,theta) x omega} at t_i = i theta / k, i = 1..k.
/// The state at t = 0 only enters the time norms.
struct ObservationRecord {
  double theta = 0.0;
  std::vector<double> times;
  /// Composite trapezoid weights of `times` on [0, theta] (t = 0 excluded).
  std::vector<double> weights;
  std::vector<GridState> masked_states;
  GridState initial_masked;
  Mask mask;
  double l2_time_norm = 0.0;  // ||u||_{L^2(0,theta; L^2(omega))}
  double h1_time_norm = 0.0;  // ||u||_{H^1(0,theta; L^2(omega))}
};

/// Samples the trajectory at k + 1 equispaced times. u_t is A u(t).
ObservationRecord observe(const GridState& u0, const DriftMatrix& b, const ThickSet& set,
                          double theta, int k, DecayGuard guard = DecayGuard::kCheck);

struct ObservabilityReport {
  std::vector<double> ratios;  // ||u(theta)|| / ||u||_{L^2(0,theta;L^2(omega))}
  double max_ratio = 0.0;
  double cap = 1e3;
  bool within_cap = false;
};

ObservabilityReport observability_ratio(const std::vector<GridState>& ensemble,
                                        const DriftMatrix& b, const ThickSet& set,
                                        double theta, int k, double cap = 1e3);

// ---- ensembles --------------------------------------------------------------

struct EnsembleOptions {
  double min_variance = 0.5;
  double max_variance = 1.5;
  double max_shift = 1.0;
  int max_components = 3;
};

/// Random mixtures of shifted isotropic Gaussians
/// sum_j a_j exp(-|x - s_j|^2 / (2 v_j)).
std::vector<GridState> gaussian_mixture_ensemble(const GridSpec& spec, int count,
                                                 std::uint64_t seed,
                                                 const EnsembleOptions& options = {});

/// Gaussian windows exp(-|x|^2 / (2v)) times a random trigonometric
/// polynomial with frequencies up to `band`.
std::vector<GridState> band_limited_ensemble(const GridSpec& spec, int count,
                                             std::uint64_t seed, double band = 2.0,
                                             double variance = 1.0);

/// The observability ensemble: the unit Gaussian, unit Gaussians shifted by
/// +-1 along every axis, and four band-limited states from `seed`.
std::vector<GridState> standard_ensemble(const GridSpec& spec, std::uint64_t seed = 20240601);

// ---- stability bounds -------------------------------------------------------

struct AdmissibleClass {
  enum class Kind { kGraphNormBall, kSobolevBall };
  Kind kind = Kind::kGraphNormBall;
  double radius = 1.0;
  double epsilon = 0.5;  // only for kSobolevBall

  void validate() const;
  double norm(const GridState& u0, const DriftMatrix& b) const;
  bool contains(const GridState& u0, const DriftMatrix& b) const;
};

struct StabilityParams {
  double C = 1.0;
  double C1 = 1.0;
  double K = 1.0;
  double p = 1.5;
  double s = 0.25;
  double epsilon = 0.5;

  /// Checks p in (1, 1/(1-eps)), s in (0, 1 - 1/p).
  void validate_heat() const;
};

/// -C / log(C1 obs); requires 0 < C1 obs < 1.
double stability_bound_h1(double obs_h1, const StabilityParams& params);

struct HelperInequality {
  double lhs = 0.0;  // (tau - 1)/log tau + tau
  double rhs = 0.0;  // -(1 + e^{-2})/log tau
  double slack = 0.0;
};

HelperInequality helper_inequality_check(double tau);

/// K ((obs^p - 1)/log obs)^{s/p}, with the limit K p^{s/p} at obs = 1.
double stability_bound_heat(double obs_l2, const StabilityParams& params);
/// K (-log obs)^{-s/p} for obs < 1; never below stability_bound_heat.
double stability_bound_heat_simplified(double obs_l2, const StabilityParams& params);

struct SmoothingRow {
  double t = 0.0;
  double derivative_norm = 0.0;  // ||Delta U(t) u0||
  double ratio = 0.0;            // t^{1-eps} ||u_t(t)|| / ||u0||_{H^{2 eps}, homogeneous}
};

struct SmoothingReport {
  double epsilon = 0.0;
  double bound = 0.0;  // ((1-eps)/e)^{1-eps}
  double max_ratio = 0.0;
  std::vector<SmoothingRow> rows;
  bool passed = false;  // max_ratio <= bound + 1e-6
};

/// Heat case only.
SmoothingReport smoothing_estimate_check(const GridState& u0, double epsilon,
                                         const std::vector<double>& times);

// ---- reconstruction ---------------------------------------------------------

struct ReconstructionResult {
  GridState estimate;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> objective_history;
};

/// J(v) = sum_i w_i ||mask (T(t_i) v - obs_i)||^2 + alpha ||v||^2.
class ReconstructionProblem {
 public:
  ReconstructionProblem(const ObservationRecord& record, const DriftMatrix& b, double alpha);

  double objective(const GridState& v) const;
  /// grad J = 2 (H v - rhs).
  GridState gradient(const GridState& v) const;
  /// H v = sum_i w_i T_i^* M T_i v + alpha v.
  GridState normal_operator(const GridState& v) const;
  const GridState& rhs() const { return rhs_; }

  /// Conjugate gradients on H v = rhs from v = 0.
  ReconstructionResult solve(int max_iterations, double tolerance = 1e-8) const;

 private:
  const ObservationRecord& record_;
  double alpha_;
  std::vector<SemigroupStep> steps_;
  GridState rhs_;
  double data_energy_ = 0.0;
};

ReconstructionResult reconstruct(const ObservationRecord& record, const DriftMatrix& b,
                                 double alpha, int iterations);

// ---- stability sweep --------------------------------------------------------

struct StabilityRow {
  double obs_norm = 0.0;    // ||T(.) e0||_{H^1(0,theta;L^2(omega))}, e0 = estimate - u0
  double true_norm = 0.0;   // ||u0||
  double recon_error = 0.0; // ||e0||
  double bound = 0.0;       // -C / log(C1 obs_norm)
  double noise_level = 0.0;
  int rep = 0;
};

struct SweepOptions {
  std::vector<double> noise_levels;
  int reps = 5;
  std::uint64_t seed = 1;
  int k = 16;
  int iterations = 400;
  double alpha_floor = 1e-10;
  double alpha_scale = 1e-2;
  /// Reps [0, calibration_reps) fix C; the rest only test the fitted curve.
  int calibration_reps = 2;
  /// C1 <= 0 selects C1 = 1 / (e max obs_norm).
  double C1 = 0.0;
  AdmissibleClass admissible{AdmissibleClass::Kind::kGraphNormBall, 1e3, 0.5};
};

struct StabilityCurve {
  std::vector<StabilityRow> rows;  // sorted by obs_norm
  double C = 0.0;
  double C1 = 0.0;
  double coverage = 0.0;          // fraction of held-out rows with recon_error <= bound
  double overall_coverage = 0.0;  // the same over all rows
  double inversion_fraction = 0.0;
  double noiseless_relative_error = 0.0;
};

StabilityCurve stability_sweep(const GridState& u0, const DriftMatrix& b, const ThickSet& set,
                               double theta, const SweepOptions& options);

/// CSV with header obs_norm,true_norm,recon_error,bound.
void write_curve_csv(std::ostream& out, const StabilityCurve& curve);

}  // namespace oulab
