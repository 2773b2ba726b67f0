#pragma once

// Small dense linear algebra for the drift matrix B: matrix exponentials,
// the covariance matrices Q_t = int_0^t e^{sB} e^{sB^T} ds, and the
// logarithmic-convexity constants derived from them.

#include <Eigen/Dense>
#include <vector>

namespace oulab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// The real N x N drift matrix B of the Ornstein-Uhlenbeck operator.
class DriftMatrix {
 public:
  explicit DriftMatrix(Matrix entries);

  static DriftMatrix zero(int n);
  static DriftMatrix scalar(double b);
  /// Row-major entries; the count must be a perfect square.
  static DriftMatrix from_rows(const std::vector<double>& row_major);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double trace() const { return trace_; }

  bool operator==(const DriftMatrix& other) const {
    return entries_ == other.entries_;
  }

 private:
  Matrix entries_;
  double trace_;
};

/// e^{A} by scaling and squaring with a degree-13 Pade approximant.
Matrix expm(const Matrix& a);

/// e^{tB}. Negative t is allowed since the drift flow is a group.
Matrix matrix_exponential(const DriftMatrix& b, double t);

struct CovarianceMatrix {
  double t = 0.0;
  Matrix q;
  /// Estimated absolute error per entry reported by the integrator.
  double error_estimate = 0.0;
};

enum class CovarianceMethod {
  kQuadrature,    // adaptive Gauss-Kronrod on the defining integral
  kLyapunovOde,   // Dormand-Prince on Q' = I + BQ + QB^T, Q(0) = 0
};

/// Q_t to absolute tolerance `tol` per entry. Tolerances below rounding
/// level are floored at about 1e-14 max|Q_t|.
CovarianceMatrix covariance(const DriftMatrix& b, double t, double tol,
                            CovarianceMethod method = CovarianceMethod::kQuadrature);

/// <Q xi, xi>.
double quadratic_form(const Matrix& q, const Vector& xi);

/// Sampling resolution for the convexity constants and the (t, xi) checks.
struct SamplingSpec {
  int time_samples = 64;
  int direction_samples = 64;
  double refine_tolerance = 1e-6;
};

/// Deterministic unit directions: {-1, +1} for N = 1, a uniform angular grid
/// for N = 2 and a Fibonacci sphere for N = 3.
std::vector<Vector> sphere_directions(int n, int count);

/// Constants c1 <= <Q_t xi, xi>/t <= c2 on [0, theta] x S^{N-1}, their ratio
/// c = c1/c2 and kappa = exp(|tr B|/2 (1 - c) theta).
struct ConvexityConstants {
  double theta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c = 0.0;
  double kappa = 1.0;
  /// Where the extremal values of beta(t, xi) were found.
  double argmin_t = 0.0;
  double argmax_t = 0.0;
  Vector argmin_xi;
  Vector argmax_xi;
  DriftMatrix drift = DriftMatrix::zero(1);

  /// Exponent w(t) = c t / theta of the convexity estimate.
  double weight(double t) const { return c * t / theta; }
};

ConvexityConstants convexity_constants(const DriftMatrix& b, double theta,
                                       const SamplingSpec& sampling = {});

struct QtBoundReport {
  bool passed = false;
  /// Smallest <Q_t xi,xi> - c (t/theta) <Q_theta xi,xi> over the samples.
  double min_slack = 0.0;
  /// The same slack divided by max(1, <Q_theta xi, xi>).
  double min_normalized_slack = 0.0;
  double witness_t = 0.0;
  Vector witness_xi;
  int samples = 0;
};

/// Evaluates the lower bound <Q_t xi, xi> >= c (t/theta) <Q_theta xi, xi> on a
/// (t, xi) grid. Passing means the normalized slack stays above -1e-9.
QtBoundReport verify_qt_lower_bound(const DriftMatrix& b, double theta,
                                    const ConvexityConstants& constants,
                                    const SamplingSpec& samples);

}  // namespace oulab
