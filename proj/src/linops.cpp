#include "oulab/linops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <string>

#include "oulab/errors.hpp"

namespace oulab {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

DriftMatrix::DriftMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw InvalidInput("drift matrix must be square with n >= 1");
  }
  if (!all_finite(entries_)) {
    throw InvalidInput("drift matrix has non-finite entries");
  }
  trace_ = entries_.trace();
}

DriftMatrix DriftMatrix::zero(int n) {
  if (n < 1) throw InvalidInput("drift matrix dimension must be >= 1");
  return DriftMatrix(Matrix::Zero(n, n));
}

DriftMatrix DriftMatrix::scalar(double b) {
  return DriftMatrix(Matrix::Constant(1, 1, b));
}

DriftMatrix DriftMatrix::from_rows(const std::vector<double>& row_major) {
  const auto n = static_cast<int>(std::lround(std::sqrt(row_major.size())));
  if (n < 1 || static_cast<std::size_t>(n) * n != row_major.size()) {
    throw InvalidInput("drift matrix needs n*n entries, got " +
                       std::to_string(row_major.size()));
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = row_major[i * n + j];
  return DriftMatrix(std::move(m));
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("expm: matrix must be square");
  if (!all_finite(a)) throw InvalidInput("expm: non-finite entries");
  const auto n = a.rows();
  if (a.isZero(0.0)) return Matrix::Identity(n, n);
  // Higham (2005) degree-13 coefficients.
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  const Matrix as = a / std::ldexp(1.0, squarings);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                         b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = as * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

Matrix matrix_exponential(const DriftMatrix& b, double t) {
  if (!std::isfinite(t)) throw InvalidInput("matrix_exponential: t is not finite");
  return expm(t * b.matrix());
}

double quadratic_form(const Matrix& q, const Vector& xi) {
  return xi.dot(q * xi);
}

namespace {

// Gauss-Kronrod 7-15 nodes on [-1, 1] (non-negative half).
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  Matrix value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<Matrix(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Matrix fc = f(center);
  Matrix kronrod = kKronrodWeights[7] * fc;
  Matrix gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const Matrix pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  Panel p{lo, hi, half * kronrod, 0.0};
  p.error = half * (kronrod - gauss).cwiseAbs().maxCoeff();
  return p;
}

CovarianceMatrix covariance_quadrature(const DriftMatrix& b, double t, double tol) {
  const Matrix& bm = b.matrix();
  auto integrand = [&bm](double s) {
    const Matrix e = expm(s * bm);
    return Matrix(e * e.transpose());
  };
  constexpr int kMaxPanels = 20000;
  std::priority_queue<Panel> panels;
  panels.push(gauss_kronrod(integrand, 0.0, t));
  double total_error = panels.top().error;
  Matrix running = panels.top().value;
  // Absolute tolerances below rounding level are floored relative to |Q|.
  auto target = [&] { return std::max(tol, 1e-14 * running.cwiseAbs().maxCoeff()); };
  while (total_error > target()) {
    if (static_cast<int>(panels.size()) >= kMaxPanels) {
      throw ConvergenceError("covariance quadrature did not reach tolerance",
                             total_error);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Panel left = gauss_kronrod(integrand, worst.lo, mid);
    Panel right = gauss_kronrod(integrand, mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    running += left.value + right.value - worst.value;
    panels.push(std::move(left));
    panels.push(std::move(right));
  }
  // Sum panels in order of position so the result does not depend on the
  // heap layout.
  std::vector<Panel> ordered;
  ordered.reserve(panels.size());
  while (!panels.empty()) {
    ordered.push_back(panels.top());
    panels.pop();
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  Matrix q = Matrix::Zero(b.dim(), b.dim());
  double err = 0.0;
  for (const auto& p : ordered) {
    q += p.value;
    err += p.error;
  }
  return {t, 0.5 * (q + q.transpose()), err};
}

CovarianceMatrix covariance_ode(const DriftMatrix& b, double t, double tol) {
  // Dormand-Prince 5(4) with the 5th order solution propagated.
  const Matrix& bm = b.matrix();
  const auto n = b.dim();
  const Matrix id = Matrix::Identity(n, n);
  auto rhs = [&](const Matrix& q) -> Matrix {
    return id + bm * q + q * bm.transpose();
  };
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  Matrix q = Matrix::Zero(n, n);
  if (t == 0.0) return {0.0, q, 0.0};

  const double local_tol = 1e-3 * tol;
  double s = 0.0;
  double h = std::min(t, 1e-3);
  double accumulated = 0.0;
  Matrix k1 = rhs(q);
  constexpr long kMaxSteps = 2'000'000;
  for (long step = 0; s < t; ++step) {
    if (step >= kMaxSteps) {
      throw ConvergenceError("Lyapunov ODE integration exceeded step budget",
                             accumulated);
    }
    h = std::min(h, t - s);
    const Matrix k2 = rhs(q + h * (a21 * k1));
    const Matrix k3 = rhs(q + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = rhs(q + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 = rhs(q + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix k6 =
        rhs(q + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Matrix next = q + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = rhs(next);
    const Matrix err_m =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = local_tol * (1.0 + next.cwiseAbs().maxCoeff());
    const double err = err_m.cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      s += h;
      q = next;
      k1 = k7;
      accumulated += err * scale;
    }
    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * t) {
      throw ConvergenceError("Lyapunov ODE step size underflow", accumulated);
    }
  }
  return {t, 0.5 * (q + q.transpose()), accumulated};
}

}  // namespace

CovarianceMatrix covariance(const DriftMatrix& b, double t, double tol,
                            CovarianceMethod method) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidInput("covariance: t must be a finite nonnegative number");
  }
  if (!(tol > 0.0)) throw InvalidInput("covariance: tolerance must be positive");
  if (t == 0.0) return {0.0, Matrix::Zero(b.dim(), b.dim()), 0.0};
  switch (method) {
    case CovarianceMethod::kQuadrature:
      return covariance_quadrature(b, t, tol);
    case CovarianceMethod::kLyapunovOde:
      return covariance_ode(b, t, tol);
  }
  throw InvalidInput("covariance: unknown method");
}

std::vector<Vector> sphere_directions(int n, int count) {
  std::vector<Vector> dirs;
  if (n == 1) {
    dirs.push_back(Vector::Constant(1, -1.0));
    dirs.push_back(Vector::Constant(1, 1.0));
    return dirs;
  }
  if (count < 1) throw InvalidInput("sphere_directions: count must be positive");
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / count;
      Vector v(2);
      v << std::cos(phi), std::sin(phi);
      dirs.push_back(v);
    }
    return dirs;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      Vector v(3);
      v << r * std::cos(phi), r * std::sin(phi), z;
      dirs.push_back(v);
    }
    return dirs;
  }
  throw InvalidInput("sphere_directions: only N <= 3 is supported");
}

namespace {

/// Memoized beta(t, xi) = <Q_t xi, xi>/t with beta(0, xi) = |xi|^2.
class BetaField {
 public:
  BetaField(const DriftMatrix& b) : b_(b) {}

  const Matrix& q(double t) {
    auto it = cache_.find(t);
    if (it == cache_.end()) {
      const double tol = std::max(1e-300, 1e-12 * t);
      it = cache_.emplace(t, covariance(b_, t, tol).q).first;
    }
    return it->second;
  }

  double beta(double t, const Vector& xi) {
    if (t == 0.0) return xi.squaredNorm();
    return quadratic_form(q(t), xi) / t;
  }

 private:
  const DriftMatrix& b_;
  std::map<double, Matrix> cache_;
};

struct Extremum {
  double value;
  double t;
  Vector xi;
};

// Tangent basis at a unit vector in R^3.
std::pair<Vector, Vector> tangent_basis(const Vector& xi) {
  Vector helper = Vector::Zero(3);
  int k = 0;
  xi.cwiseAbs().minCoeff(&k);
  helper(k) = 1.0;
  Vector e1 = helper - helper.dot(xi) * xi;
  e1.normalize();
  Vector e2(3);
  e2 << xi(1) * e1(2) - xi(2) * e1(1), xi(2) * e1(0) - xi(0) * e1(2),
      xi(0) * e1(1) - xi(1) * e1(0);
  return {e1, e2};
}

// Nested local refinement of an extremum of beta around a sampled optimum.
// Each round evaluates a 5-point stencil per parameter at the current step,
// moves to the best point, and halves the step.
Extremum refine(BetaField& field, Extremum best, double theta, double dt0,
                double dangle0, bool minimize, double rel_tol) {
  const int n = static_cast<int>(best.xi.size());
  auto better = [minimize](double a, double b) { return minimize ? a < b : a > b; };
  static constexpr std::array<double, 5> offsets = {-1.0, -0.5, 0.0, 0.5, 1.0};
  double dt = dt0;
  double dangle = dangle0;
  constexpr int kMinRounds = 12;
  constexpr int kMaxRounds = 80;
  for (int round = 0; round < kMaxRounds; ++round) {
    const double previous = best.value;
    Extremum candidate = best;
    std::vector<double> times;
    for (double o : offsets) times.push_back(std::clamp(best.t + o * dt, 0.0, theta));

    auto consider = [&](double t, const Vector& xi) {
      const double v = field.beta(t, xi);
      if (better(v, candidate.value)) candidate = {v, t, xi};
    };

    if (n == 1) {
      for (double t : times) consider(t, best.xi);
    } else if (n == 2) {
      const double phi0 = std::atan2(best.xi(1), best.xi(0));
      for (double t : times) {
        for (double o : offsets) {
          Vector xi(2);
          xi << std::cos(phi0 + o * dangle), std::sin(phi0 + o * dangle);
          consider(t, xi);
        }
      }
    } else {
      const auto [e1, e2] = tangent_basis(best.xi);
      for (double t : times) {
        for (double ou : offsets) {
          for (double ov : offsets) {
            Vector xi = best.xi + ou * dangle * e1 + ov * dangle * e2;
            xi.normalize();
            consider(t, xi);
          }
        }
      }
    }
    best = candidate;
    dt *= 0.5;
    dangle *= 0.5;
    const double change =
        std::abs(best.value - previous) / std::max(std::abs(previous), 1e-300);
    if (round + 1 >= kMinRounds && change < rel_tol) break;
  }
  return best;
}

}  // namespace

ConvexityConstants convexity_constants(const DriftMatrix& b, double theta,
                                       const SamplingSpec& sampling) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw InvalidInput("convexity_constants: theta must be positive");
  }
  if (sampling.time_samples < 1 || sampling.direction_samples < 1) {
    throw InvalidInput("convexity_constants: sampling counts must be positive");
  }
  const int n = b.dim();
  BetaField field(b);
  const auto dirs = sphere_directions(n, sampling.direction_samples);

  Extremum lo{std::numeric_limits<double>::infinity(), 0.0, dirs.front()};
  Extremum hi{-std::numeric_limits<double>::infinity(), 0.0, dirs.front()};
  for (int j = 0; j <= sampling.time_samples; ++j) {
    const double t = theta * j / sampling.time_samples;
    for (const auto& xi : dirs) {
      const double v = field.beta(t, xi);
      if (v < lo.value) lo = {v, t, xi};
      if (v > hi.value) hi = {v, t, xi};
    }
  }

  const double dt = theta / sampling.time_samples;
  const double dangle = n == 2 ? 2.0 * std::numbers::pi / sampling.direction_samples
                               : std::sqrt(4.0 * std::numbers::pi /
                                           sampling.direction_samples);
  lo = refine(field, lo, theta, dt, dangle, true, sampling.refine_tolerance);
  hi = refine(field, hi, theta, dt, dangle, false, sampling.refine_tolerance);

  ConvexityConstants out;
  out.theta = theta;
  out.c1 = lo.value;
  out.c2 = hi.value;
  out.c = out.c1 / out.c2;
  out.kappa = std::exp(std::abs(b.trace()) / 2.0 * (1.0 - out.c) * theta);
  out.argmin_t = lo.t;
  out.argmax_t = hi.t;
  out.argmin_xi = lo.xi;
  out.argmax_xi = hi.xi;
  out.drift = b;
  return out;
}

QtBoundReport verify_qt_lower_bound(const DriftMatrix& b, double theta,
                                    const ConvexityConstants& constants,
                                    const SamplingSpec& samples) {
  if (!(constants.drift == b) || constants.theta != theta) {
    throw InvalidInput(
        "verify_qt_lower_bound: constants were computed for a different (B, theta)");
  }
  if (samples.time_samples < 1) {
    throw InvalidInput("verify_qt_lower_bound: need at least one time sample");
  }
  const auto dirs = sphere_directions(b.dim(), samples.direction_samples);
  const Matrix q_theta = covariance(b, theta, 1e-13 * std::max(1.0, theta)).q;
  std::vector<double> q_theta_forms;
  q_theta_forms.reserve(dirs.size());
  for (const auto& xi : dirs) q_theta_forms.push_back(quadratic_form(q_theta, xi));

  QtBoundReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.min_normalized_slack = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= samples.time_samples; ++j) {
    const double t = theta * j / samples.time_samples;
    const Matrix q_t = j == samples.time_samples
                           ? q_theta
                           : covariance(b, t, std::max(1e-300, 1e-13 * t)).q;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const double slack = quadratic_form(q_t, dirs[d]) -
                           constants.c * (t / theta) * q_theta_forms[d];
      const double normalized = slack / std::max(1.0, q_theta_forms[d]);
      ++report.samples;
      if (normalized < report.min_normalized_slack) {
        report.min_normalized_slack = normalized;
        report.min_slack = slack;
        report.witness_t = t;
        report.witness_xi = dirs[d];
      }
    }
  }
  report.passed = report.min_normalized_slack >= -1e-9;
  return report;
}

}  // namespace oulab
