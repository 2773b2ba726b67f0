#include "oulab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "fft.hpp"
#include "oulab/errors.hpp"

namespace oulab {

namespace {

using Complex = std::complex<double>;

// Line-pass coefficients for g(x) = f~(E' x). Pass k rewrites argument k
// from y_k to x_k, with
//   y_k = sum_{i<=k} a_i x_i + sum_{i>k} b_i y_i,
//   a = E'[k, :k+1] - E'[k, k+1:] S^{-1} E'[k+1:, :k+1],
//   b = E'[k, k+1:] S^{-1},  S = E'[k+1:, k+1:].
std::vector<kernels::LinePass> passes_for(const Matrix& e) {
  const int n = static_cast<int>(e.rows());
  std::vector<kernels::LinePass> passes;
  for (int k = 0; k < n; ++k) {
    kernels::LinePass pass;
    pass.axis = k;
    pass.coeffs.assign(n, 0.0);
    const int rest = n - k - 1;
    if (rest == 0) {
      for (int i = 0; i < n; ++i) pass.coeffs[i] = e(k, i);
    } else {
      const Matrix s = e.bottomRightCorner(rest, rest);
      const Eigen::RowVectorXd row_tail = e.block(k, k + 1, 1, rest);
      const Eigen::RowVectorXd b = s.transpose().partialPivLu().solve(row_tail.transpose()).transpose();
      const Eigen::RowVectorXd a =
          e.block(k, 0, 1, k + 1) - b * e.block(k + 1, 0, rest, k + 1);
      for (int i = 0; i <= k; ++i) pass.coeffs[i] = a(i);
      for (int i = 0; i < rest; ++i) pass.coeffs[k + 1 + i] = b(i);
    }
    passes.push_back(std::move(pass));
  }
  return passes;
}

double smallest_pivot(const std::vector<kernels::LinePass>& passes) {
  double p = std::numeric_limits<double>::infinity();
  for (const auto& pass : passes) {
    const double a = std::abs(pass.coeffs[pass.axis]);
    p = std::isfinite(a) ? std::min(p, a) : 0.0;
  }
  return p;
}

// out[idx_z] = in[idx_y] with idx_y[perm[i]] = idx_z[i].
GridState permute_axes(const GridState& in, const std::vector<int>& perm, bool inverse) {
  const auto& spec = in.spec();
  GridState out(spec);
  const int n = spec.dim();
  const std::size_t m = spec.points();
  int iz[3] = {0, 0, 0};
  int iy[3] = {0, 0, 0};
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    spec.unflatten(flat, iz);
    for (int i = 0; i < n; ++i) iy[perm[i]] = iz[i];
    std::size_t src = 0;
    for (int d = 0; d < n; ++d) src = src * m + iy[d];
    if (inverse) {
      out[src] = in[flat];
    } else {
      out[flat] = in[src];
    }
  }
  return out;
}

}  // namespace

FlowPlan::FlowPlan(const GridSpec& grid, const Matrix& flow) : grid_(grid) {
  const int n = grid.dim();
  if (flow.rows() != n || flow.cols() != n) {
    throw InvalidInput("flow matrix dimension does not match the grid");
  }
  if (!flow.allFinite()) throw InvalidInput("flow matrix has non-finite entries");
  identity_ = flow == Matrix::Identity(n, n);
  permutation_.resize(n);
  std::iota(permutation_.begin(), permutation_.end(), 0);
  if (identity_) return;

  // Pick the row order whose passes have the best-conditioned scale factors.
  std::vector<int> perm = permutation_;
  double best = -1.0;
  do {
    Matrix permuted(n, n);
    for (int i = 0; i < n; ++i) permuted.row(i) = flow.row(perm[i]);
    auto candidate = passes_for(permuted);
    const double pivot = smallest_pivot(candidate);
    if (pivot > best * (1.0 + 1e-12)) {
      best = pivot;
      permutation_ = perm;
      passes_ = std::move(candidate);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!(best > 0.0)) throw InvalidInput("flow matrix is singular");
}

GridState FlowPlan::apply(const GridState& state, DecayGuard guard) const {
  if (!(state.spec() == grid_)) throw InvalidInput("flow plan used on a different grid");
  if (identity_) return state;
  const bool checked = guard == DecayGuard::kCheck;
  if (checked) check_decay(state, kDefaultDecayThreshold, "drift input");
  const bool permuted = !std::is_sorted(permutation_.begin(), permutation_.end());
  GridState current = permuted ? permute_axes(state, permutation_, false) : state;
  GridState next(grid_);
  for (std::size_t k = 0; k < passes_.size(); ++k) {
    kernels::resample_lines(grid_, passes_[k], current.values(), next.values());
    std::swap(current, next);
    if (checked) {
      check_decay(current, kDefaultDecayThreshold,
                  k + 1 == passes_.size() ? "drift output" : "drift intermediate");
    }
  }
  return current;
}

GridState FlowPlan::apply_adjoint(const GridState& state, DecayGuard guard) const {
  if (!(state.spec() == grid_)) throw InvalidInput("flow plan used on a different grid");
  if (identity_) return state;
  const bool checked = guard == DecayGuard::kCheck;
  if (checked) check_decay(state, kDefaultDecayThreshold, "adjoint drift input");
  GridState current = state;
  GridState next(grid_);
  for (std::size_t k = passes_.size(); k-- > 0;) {
    kernels::resample_lines_adjoint(grid_, passes_[k], current.values(), next.values());
    std::swap(current, next);
  }
  const bool permuted = !std::is_sorted(permutation_.begin(), permutation_.end());
  if (permuted) current = permute_axes(current, permutation_, true);
  if (checked) check_decay(current, kDefaultDecayThreshold, "adjoint drift output");
  return current;
}

SemigroupStep::SemigroupStep(DriftMatrix b, double t)
    : drift_(std::move(b)), t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidInput("semigroup step needs a finite time t >= 0");
  }
  covariance_ = oulab::covariance(drift_, t, 1e-12 * std::max(1.0, t));
  flow_ = t == 0.0 ? Matrix::Identity(drift_.dim(), drift_.dim())
                   : matrix_exponential(drift_, t);
}

GridState covariance_multiplier_apply(const GridState& state, const Matrix& q) {
  const auto& spec = state.spec();
  const int n = spec.dim();
  if (q.rows() != n) throw InvalidInput("covariance dimension does not match grid");
  std::vector<Complex> data(state.values().begin(), state.values().end());
  fft::forward(data, spec.dims());
  const int m = spec.points();
  std::vector<double> freq(m);
  for (int j = 0; j < m; ++j) freq[j] = spec.frequency(j);
  // Rows along the last axis; xi[n-1] varies within a row.
  const auto rows = static_cast<long>(data.size() / m);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    int index[3] = {0, 0, 0};
    spec.unflatten(static_cast<std::size_t>(r) * m, index);
    double xi[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d + 1 < n; ++d) xi[d] = freq[index[d]];
    // form = a + 2 b xi_last + q_last,last xi_last^2.
    double a = 0.0;
    double b = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = 0; j + 1 < n; ++j) a += xi[i] * q(i, j) * xi[j];
      b += 0.5 * (q(i, n - 1) + q(n - 1, i)) * xi[i];
    }
    const double c = q(n - 1, n - 1);
    Complex* row = data.data() + r * m;
    for (int j = 0; j < m; ++j) {
      const double x = freq[j];
      row[j] *= std::exp(-(a + 2.0 * b * x + c * x * x));
    }
  }
  fft::backward(data, spec.dims());
  const double inv = 1.0 / static_cast<double>(data.size());
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * inv;
  return GridState(spec, std::move(out));
}

GridState heat_apply(const GridState& state, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidInput("heat_apply: t must be finite and >= 0");
  }
  if (t == 0.0) return state;
  const int n = state.spec().dim();
  return covariance_multiplier_apply(state, t * Matrix::Identity(n, n));
}

GridState drift_apply(const GridState& state, const DriftMatrix& b, double t) {
  if (b.dim() != state.spec().dim()) {
    throw InvalidInput("drift_apply: drift dimension does not match grid");
  }
  if (t == 0.0) return state;
  return FlowPlan(state.spec(), matrix_exponential(b, t)).apply(state);
}

GridState ou_apply(const GridState& state, const SemigroupStep& step, DecayGuard guard) {
  if (step.drift().dim() != state.spec().dim()) {
    throw InvalidInput("ou_apply: drift dimension does not match grid");
  }
  if (step.time() == 0.0) return state;
  const GridState smoothed = covariance_multiplier_apply(state, step.covariance().q);
  return FlowPlan(state.spec(), step.flow()).apply(smoothed, guard);
}

GridState ou_adjoint_apply(const GridState& state, const SemigroupStep& step,
                           DecayGuard guard) {
  if (step.drift().dim() != state.spec().dim()) {
    throw InvalidInput("ou_adjoint_apply: drift dimension does not match grid");
  }
  if (step.time() == 0.0) return state;
  const GridState pulled = FlowPlan(state.spec(), step.flow()).apply_adjoint(state, guard);
  return covariance_multiplier_apply(pulled, step.covariance().q);
}

std::vector<GridState> trajectory(const GridState& u0, const DriftMatrix& b,
                                  double theta, int k) {
  if (!(theta > 0.0)) throw InvalidInput("trajectory: theta must be positive");
  if (k < 1) throw InvalidInput("trajectory: k must be positive");
  std::vector<GridState> out;
  out.reserve(k + 1);
  out.push_back(u0);
  for (int i = 1; i <= k; ++i) {
    const SemigroupStep step(b, theta * i / k);
    out.push_back(ou_apply(u0, step));
  }
  return out;
}

}  // namespace oulab
