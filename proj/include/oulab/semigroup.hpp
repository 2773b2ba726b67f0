#pragma once

// The heat semigroup U(t), the drift group S(t) f = f(e^{tB} .), and the
// Ornstein-Uhlenbeck semigroup T(t) f = S(t)(g_t * f) acting on GridStates.
// Convolution with g_t is applied as the Fourier multiplier
// e^{-<Q_t xi, xi>}; the flow is evaluated by exact trigonometric
// interpolation, split into one-dimensional line passes.

#include <vector>

#include "oulab/field.hpp"
#include "oulab/kernels.hpp"
#include "oulab/linops.hpp"

namespace oulab {

/// Factorization of f -> f(E x) on a grid into an axis permutation followed
/// by one affine line pass per axis.
class FlowPlan {
 public:
  FlowPlan(const GridSpec& grid, const Matrix& flow);

  bool is_identity() const { return identity_; }
  const std::vector<int>& permutation() const { return permutation_; }
  const std::vector<kernels::LinePass>& passes() const { return passes_; }

  /// f(E x). Each intermediate and the output must pass the decay guard.
  GridState apply(const GridState& state, DecayGuard guard = DecayGuard::kCheck) const;
  /// The exact transpose of apply.
  GridState apply_adjoint(const GridState& state, DecayGuard guard = DecayGuard::kCheck) const;

 private:
  GridSpec grid_;
  bool identity_ = false;
  std::vector<int> permutation_;
  std::vector<kernels::LinePass> passes_;
};

/// Everything needed to apply T(t) for one (B, t): Q_t and e^{tB}.
class SemigroupStep {
 public:
  SemigroupStep(DriftMatrix b, double t);

  const DriftMatrix& drift() const { return drift_; }
  double time() const { return t_; }
  const CovarianceMatrix& covariance() const { return covariance_; }
  const Matrix& flow() const { return flow_; }

 private:
  DriftMatrix drift_;
  double t_;
  CovarianceMatrix covariance_;
  Matrix flow_;
};

/// U(t) f: multiplies the spectrum by e^{-|xi|^2 t}.
GridState heat_apply(const GridState& state, double t);

/// S(t) f = f(e^{tB} x).
GridState drift_apply(const GridState& state, const DriftMatrix& b, double t);

/// Multiplies the spectrum by e^{-<Q xi, xi>}.
GridState covariance_multiplier_apply(const GridState& state, const Matrix& q);

/// T(t) f = S(t)(g_t * f).
GridState ou_apply(const GridState& state, const SemigroupStep& step,
                   DecayGuard guard = DecayGuard::kCheck);

/// T(t)^* with respect to the discrete L^2 inner product.
GridState ou_adjoint_apply(const GridState& state, const SemigroupStep& step,
                           DecayGuard guard = DecayGuard::kCheck);

/// u(t_i) = T(t_i) u0 for t_i = i theta / k, i = 0..k, each from u0 directly.
std::vector<GridState> trajectory(const GridState& u0, const DriftMatrix& b,
                                  double theta, int k);

}  // namespace oulab
