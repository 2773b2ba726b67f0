// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is nonzero if any criterion fails, except for criteria listed
// in kKnownDefects, whose failure is expected and reported as such.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "oulab/cli.hpp"
#include "oulab/errors.hpp"
#include "oulab/geometry.hpp"
#include "oulab/inverse.hpp"
#include "oulab/linops.hpp"
#include "oulab/semigroup.hpp"

using namespace oulab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// The t = theta endpoint of the convexity estimate has ratio
// (||T(theta)u0|| / ||u0||)^{1-c} / kappa, which equals 1/kappa only when
// c = 1. Drifts with c < 1 cannot meet the stated endpoint identity.
const std::set<int> kKnownDefects = {4};

GridState gaussian(const GridSpec& g, double v, const Vector& s) {
  return sample(g, [&](const double* x) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) r2 += (x[d] - s[d]) * (x[d] - s[d]);
    return std::exp(-r2 / (2.0 * v));
  });
}

double max_abs(const GridState& s) {
  double m = 0.0;
  for (double v : s.values()) m = std::max(m, std::abs(v));
  return m;
}

ThickSet half_line_pattern() {
  auto s = ThickSet::periodic({1.0}, {Box{{0.0}, {0.5}}});
  s.with_thickness(0.5, {1.0});
  return s;
}

DriftMatrix random_drift(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return DriftMatrix(m);
}

// ---- 1 ----------------------------------------------------------------------

Outcome covariance_correctness() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> time(0.1, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_drift(rng, dim(rng));
    const double t = time(rng);
    const Matrix qa = covariance(b, t, 1e-11).q;
    const Matrix qb = covariance(b, t, 1e-11, CovarianceMethod::kLyapunovOde).q;
    worst = std::max(worst, (qa - qb).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-8, fmt("quadrature vs ODE max diff %.3g > 1e-8", worst));
  o.note(fmt("quadrature vs ODE max diff %.2e", worst));

  double worst_identity = 0.0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<DriftMatrix> drifts = {DriftMatrix::zero(n)};
    if (n > 1) {
      const Matrix a = random_drift(rng, n).matrix();
      drifts.emplace_back(Matrix(a - a.transpose()));
    }
    for (const auto& b : drifts) {
      for (double t : {0.3, 1.0, 2.5}) {
        const Matrix expected = t * Matrix::Identity(n, n);
        for (auto method : {CovarianceMethod::kQuadrature, CovarianceMethod::kLyapunovOde}) {
          const Matrix q = covariance(b, t, 1e-12, method).q;
          worst_identity = std::max(worst_identity, (q - expected).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  o.require(worst_identity <= 1e-10, fmt("skew/zero Q_t - tI = %.3g > 1e-10", worst_identity));
  o.note(fmt("skew/zero |Q_t - tI| %.2e", worst_identity));
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome convexity_constants_check() {
  Outcome o;
  const auto k = convexity_constants(DriftMatrix::scalar(1.0), 1.0);
  const auto ref = oracle::scalar_constants(1.0, 1.0);
  o.require(std::abs(k.c1 - 1.0) <= 1e-6, fmt("c1 = %.9f", k.c1));
  o.require(std::abs(k.c2 - (std::exp(2.0) - 1.0) / 2.0) <= 1e-6, fmt("c2 = %.9f", k.c2));
  o.require(std::abs(k.c - ref.c) <= 1e-5 && std::abs(k.c - 0.313035) <= 1e-5,
            fmt("c = %.9f", k.c));
  o.require(std::abs(k.kappa - ref.kappa) <= 1e-5,
            fmt("kappa = %.9f, oracle %.9f", k.kappa, ref.kappa));
  o.note(fmt("c1 %.7f c2 %.7f c %.7f", k.c1, k.c2, k.c));
  o.note(fmt("kappa %.7f", k.kappa));

  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dim(1, 3);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = random_drift(rng, dim(rng));
    const auto constants = convexity_constants(b, 1.0);
    const auto r = verify_qt_lower_bound(b, 1.0, constants, SamplingSpec{1000, 100, 1e-6});
    worst = std::min(worst, r.min_normalized_slack);
  }
  o.require(worst >= -1e-9, fmt("quadratic-form slack %.3g < -1e-9", worst));
  o.note(fmt("min quadratic-form slack over 20 drifts %.2e", worst));
  return o;
}

// ---- 3 and 4 share one ensemble pass ----------------------------------------

struct DriftCase {
  const char* name;
  DriftMatrix b;
  GridSpec grid;
};

struct EnsembleStudy {
  double max_ratio = 0.0;
  double worst_start = 0.0;       // max |ratio(0) kappa - 1|
  double worst_end_exact = 0.0;   // the same at t = theta, drifts with c = 1
  double worst_end_other = 0.0;   // the same at t = theta, drifts with c < 1
  double worst_bound = 0.0;       // max ||T(t)f|| / (e^{-t trB/2} ||f||)
  long evaluations = 0;
};

EnsembleStudy ensemble_study() {
  const std::vector<DriftCase> cases = {
      {"0", DriftMatrix::zero(1), GridSpec(1, 16.0, 1024)},
      {"[1]", DriftMatrix::scalar(1.0), GridSpec(1, 16.0, 1024)},
      {"rotation", DriftMatrix::from_rows({0, 1, -1, 0}), GridSpec(2, 12.0, 128)},
      {"diag(1,-2)", DriftMatrix::from_rows({1, 0, 0, -2}), GridSpec(2, 52.0, 256)},
      {"[[1,1],[0,-1]]", DriftMatrix::from_rows({1, 1, 0, -1}), GridSpec(2, 24.0, 256)},
  };
  EnsembleStudy s;
  for (const auto& dc : cases) {
    const auto start = std::chrono::steady_clock::now();
    const auto ensemble = gaussian_mixture_ensemble(dc.grid, 100, 4242);
    for (double theta : {0.5, 1.0}) {
      const auto constants = convexity_constants(dc.b, theta);
      const auto reports = log_convexity_verify(ensemble, dc.b, constants, 19);
      for (std::size_t m = 0; m < reports.size(); ++m) {
        const auto& r = reports[m];
        s.max_ratio = std::max(s.max_ratio, r.max_ratio);
        s.worst_start =
            std::max(s.worst_start, std::abs(r.rows.front().ratio * constants.kappa - 1.0));
        const double end = std::abs(r.rows.back().ratio * constants.kappa - 1.0);
        if (constants.c == 1.0) {
          s.worst_end_exact = std::max(s.worst_end_exact, end);
        } else {
          s.worst_end_other = std::max(s.worst_end_other, end);
        }
        for (const auto& row : r.rows) {
          const double bound = std::exp(-row.t * dc.b.trace() / 2.0) * r.initial_norm;
          s.worst_bound = std::max(s.worst_bound, row.norm / bound);
        }
        s.evaluations += static_cast<long>(r.rows.size());
      }
    }
    std::printf("     drift %-16s %.1fs\n", dc.name,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return s;
}

Outcome semigroup_fidelity(const EnsembleStudy& study) {
  Outcome o;
  const GridSpec g(2, 12.0, 128);
  Vector shift(2);
  shift << 0.5, -0.7;
  const GridState f = gaussian(g, 0.8, shift);
  const double heat = max_abs(ou_apply(f, SemigroupStep(DriftMatrix::zero(2), 0.6)) -
                              heat_apply(f, 0.6));
  o.require(heat <= 1e-10, fmt("B = 0 vs heat %.3g", heat));

  const GridSpec g2(2, 16.0, 128);
  Vector s(2);
  s << 0.6, -0.4;
  const GridState f2 = gaussian(g2, 1.0, s);
  double pointwise = 0.0;
  for (const auto& b : {DriftMatrix::from_rows({0, 1, -1, 0}), DriftMatrix::from_rows({1, 0, 0, -1}),
                        DriftMatrix::from_rows({0.5, 1, 0, -0.5}),
                        DriftMatrix::from_rows({-0.3, 0.2, 0.4, 0.1})}) {
    const SemigroupStep step(b, 0.5);
    const GridState u = ou_apply(f2, step);
    const GridState expected = sample(g2, [&](const double* x) {
      Vector xv(2);
      xv << x[0], x[1];
      return oracle::ou_gaussian(step.flow(), step.covariance().q, 1.0, s, xv);
    });
    pointwise = std::max(pointwise, max_abs(u - expected));
  }
  o.require(pointwise <= 1e-8, fmt("Gaussian closed form %.3g", pointwise));

  const auto b = DriftMatrix::from_rows({0.4, 1.0, -0.6, -0.3});
  const GridState once = ou_apply(f2, SemigroupStep(b, 0.7));
  const GridState twice = ou_apply(ou_apply(f2, SemigroupStep(b, 0.3)), SemigroupStep(b, 0.4));
  const double law = l2_norm(once - twice) / l2_norm(once);
  o.require(law <= 1e-7, fmt("semigroup law %.3g", law));
  // Norm identity for the drift group on decayed band-limited states.
  double edn = 0.0;
  for (const auto& b : {DriftMatrix::scalar(1.0), DriftMatrix::scalar(-0.5)}) {
    const GridSpec g1(1, 16.0, 1024);
    for (const auto& u : band_limited_ensemble(g1, 10, 303)) {
      for (double t : {0.5, -0.5}) {
        const double ratio = l2_norm(drift_apply(u, b, t)) /
                             (std::exp(-t * b.trace() / 2.0) * l2_norm(u));
        edn = std::max(edn, std::abs(ratio - 1.0));
      }
    }
  }
  for (const auto& b : {DriftMatrix::from_rows({0, 1, -1, 0}), DriftMatrix::from_rows({1, 0, 0, -2}),
                        DriftMatrix::from_rows({1, 1, 0, -1})}) {
    const GridSpec g2d(2, 16.0, 128);
    for (const auto& u : band_limited_ensemble(g2d, 10, 304)) {
      for (double t : {0.5, -0.25}) {
        const double ratio = l2_norm(drift_apply(u, b, t)) /
                             (std::exp(-t * b.trace() / 2.0) * l2_norm(u));
        edn = std::max(edn, std::abs(ratio - 1.0));
      }
    }
  }
  o.require(edn <= 1e-6, fmt("drift norm identity %.3g", edn));
  o.require(study.worst_bound <= 1.0 + 1e-6, fmt("norm bound ratio %.9f", study.worst_bound));

  o.note(fmt("heat %.1e closed form %.1e law %.1e", heat, pointwise, law));
  o.note(fmt("norm identity %.1e", edn));
  o.note(fmt("max norm/bound %.9f", study.worst_bound));
  return o;
}

Outcome log_convexity(const EnsembleStudy& study) {
  Outcome o;
  o.require(study.max_ratio <= 1.0 + 1e-4, fmt("max ratio %.9f", study.max_ratio));
  o.require(study.worst_start <= 1e-12, fmt("t = 0 ratio off 1/kappa by %.3g", study.worst_start));
  o.require(study.worst_end_exact <= 1e-12,
            fmt("t = theta ratio off 1/kappa by %.3g for c = 1", study.worst_end_exact));
  o.require(study.worst_end_other <= 1e-12,
            fmt("t = theta ratio off 1/kappa by up to %.3g for drifts with c < 1",
                study.worst_end_other));
  o.note(fmt("max ratio %.9f over %.0f evaluations", study.max_ratio,
             static_cast<double>(study.evaluations)));
  o.note(fmt("endpoint error t = 0: %.1e, t = theta with c = 1: %.1e", study.worst_start,
             study.worst_end_exact));
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome helper_inequality() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    double tau = u(rng);
    while (tau == 0.0) tau = u(rng);
    worst = std::min(worst, helper_inequality_check(tau).slack);
  }
  o.require(worst >= -1e-12, fmt("min slack %.3g", worst));
  const auto eq = helper_inequality_check(std::exp(-2.0));
  const double sides = (1.0 + std::exp(-2.0)) / 2.0;
  o.require(std::abs(eq.slack) <= 1e-12, fmt("slack at e^-2 = %.3g", eq.slack));
  o.require(std::abs(eq.lhs - sides) <= 1e-12 && std::abs(eq.rhs - sides) <= 1e-12,
            fmt("sides at e^-2: %.12f %.12f", eq.lhs, eq.rhs));
  o.note(fmt("min slack %.3e; sides at e^-2 %.6f %.6f", worst, eq.lhs, eq.rhs));
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome smoothing() {
  Outcome o;
  const double l = 10.0;
  const GridSpec g(1, l, 256);
  std::vector<double> times;
  for (int i = -40; i <= 20; ++i) times.push_back(std::pow(10.0, i / 10.0));
  std::vector<GridState> data = {gaussian(g, 1.0, Vector::Zero(1)),
                                 gaussian(g, 0.3, Vector::Constant(1, 0.5))};
  for (auto& s : band_limited_ensemble(g, 6, 606)) data.push_back(std::move(s));
  double margin = -std::numeric_limits<double>::infinity();
  double sharp = 0.0;
  for (double eps : {0.25, 0.5, 0.75}) {
    const double bound = oracle::smoothing_constant(eps);
    for (const auto& u0 : data) {
      const auto r = smoothing_estimate_check(u0, eps, times);
      margin = std::max(margin, r.max_ratio - bound);
    }
    for (int mode : {1, 3, 7}) {
      const double xi0 = M_PI * mode / l;
      const GridState m = sample(g, [&](const double* x) { return std::cos(xi0 * x[0]); });
      const auto r = smoothing_estimate_check(m, eps, {(1.0 - eps) / (xi0 * xi0)});
      sharp = std::max(sharp, std::abs(r.rows[0].ratio - bound));
    }
  }
  o.require(margin <= 1e-6, fmt("ratio exceeds bound by %.3g", margin));
  o.require(sharp <= 1e-8, fmt("single-mode sharpness off by %.3g", sharp));
  o.note(fmt("max ratio - bound %.3e; single-mode error %.1e", margin, sharp));
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome thickness() {
  Outcome o;
  const auto periodic = thickness_check(half_line_pattern(), Box{{-10}, {10}}, 64);
  o.require(periodic.passed && periodic.exact, "half-interval pattern not certified");
  o.require(std::abs(periodic.min_ratio - 0.5) <= 1e-12,
            fmt("half-interval ratio %.15f", periodic.min_ratio));
  auto bounded = ThickSet::boxes(1, {Box{{-1.0}, {1.0}}});
  bounded.with_thickness(0.5, {1.0});
  const auto fail = thickness_check(bounded, Box{{-10}, {10}}, 64);
  o.require(!fail.passed && fail.witness.size() == 1, "bounded set did not fail with a witness");
  auto full = ThickSet::full(2);
  full.with_thickness(1.0, {1.0, 1.0});
  const auto ok = thickness_check(full, Box{{-3, -3}, {3, 3}}, 64);
  o.require(ok.passed && ok.min_ratio == 1.0, "full box ratio is not 1");
  o.note(fmt("pattern margin %.1e; bounded witness x = %g; full ratio %g",
             periodic.min_ratio - 0.5, fail.witness.empty() ? 0.0 : fail.witness[0],
             ok.min_ratio));
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Outcome observability() {
  Outcome o;
  const GridSpec g(1, 16.0, 1024);
  const double theta = 1.0;
  const auto ensemble = standard_ensemble(g);
  const auto b = DriftMatrix::zero(1);
  const auto thick = observability_ratio(ensemble, b, half_line_pattern(), theta, 32);
  bool finite = true;
  for (double r : thick.ratios) finite = finite && std::isfinite(r);
  o.require(finite, "non-finite ratio on the thick set");
  o.require(thick.within_cap, fmt("max ratio %.6g above cap %.6g", thick.max_ratio, thick.cap));
  const auto full = observability_ratio(ensemble, b, ThickSet::full(1), theta, 32);
  o.require(full.max_ratio <= 1.0 / std::sqrt(theta) + 1e-6,
            fmt("full-box ratio %.9f", full.max_ratio));
  bool degenerate = false;
  try {
    observability_ratio(ensemble, b, ThickSet::empty(1), theta, 32);
  } catch (const DegenerateCase&) {
    degenerate = true;
  }
  o.require(degenerate, "empty set did not raise the degenerate-case error");
  o.note(fmt("thick max ratio %.6f; full-box max %.9f", thick.max_ratio, full.max_ratio));
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome reconstruction() {
  Outcome o;
  const GridSpec g(1, 16.0, 256);
  const auto b = DriftMatrix::scalar(0.5);
  const GridState u0 = gaussian(g, 1.0, Vector::Constant(1, -0.3));
  const auto rec = observe(u0, b, ThickSet::full(1), 1.0, 16);
  const auto result = reconstruct(rec, b, 1e-12, 400);
  const double rel = l2_norm(result.estimate - u0) / l2_norm(u0);
  o.require(rel <= 1e-3, fmt("noiseless full-box relative error %.3g", rel));

  std::mt19937_64 rng(909);
  std::normal_distribution<double> n(0.0, 1.0);
  auto random_decayed = [&](double v) {
    const GridState w = gaussian(g, v, Vector::Constant(1, n(rng)));
    GridState s(g);
    for (std::size_t i = 0; i < s.values().size(); ++i) s[i] = w[i] * n(rng);
    return heat_apply(s, 0.01);
  };
  double adjoint = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GridState u = random_decayed(1.0);
    const GridState v = random_decayed(1.5);
    const SemigroupStep step(b, 0.3);
    const double lhs = inner_product(ou_apply(u, step), v);
    const double rhs = inner_product(u, ou_adjoint_apply(v, step));
    adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::abs(lhs));
  }
  o.require(adjoint <= 1e-9, fmt("adjoint identity %.3g", adjoint));

  const auto masked = observe(u0, b, half_line_pattern(), 1.0, 8);
  const ReconstructionProblem problem(masked, b, 1e-3);
  double gradient = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const GridState v = random_decayed(1.5);
    const GridState d = random_decayed(0.7);
    const double h = 1e-3;
    const double fd = (problem.objective(v + h * d) - problem.objective(v - h * d)) / (2.0 * h);
    const double ad = inner_product(problem.gradient(v), d);
    gradient = std::max(gradient, std::abs(fd - ad) / std::abs(ad));
  }
  o.require(gradient <= 1e-5, fmt("gradient vs finite differences %.3g", gradient));
  o.note(fmt("relative error %.2e (%g CG steps)", rel, result.iterations));
  o.note(fmt("adjoint %.1e gradient %.1e", adjoint, gradient));
  return o;
}

// ---- 10 ---------------------------------------------------------------------

Outcome stability_curve() {
  Outcome o;
  const GridSpec g(1, 16.0, 256);
  SweepOptions opt;
  for (int i = 0; i <= 8; ++i) opt.noise_levels.push_back(std::pow(10.0, -6.0 + 0.5 * i));
  opt.reps = 5;
  opt.calibration_reps = 2;
  opt.seed = 1010;
  opt.k = 16;
  const auto curve = stability_sweep(gaussian(g, 1.0, Vector::Zero(1)), DriftMatrix::scalar(0.5),
                                     half_line_pattern(), 1.0, opt);
  o.require(curve.coverage >= 0.9, fmt("held-out coverage %.3f < 0.9", curve.coverage));
  o.require(curve.inversion_fraction <= 0.1,
            fmt("inversion fraction %.3f > 0.1", curve.inversion_fraction));
  o.note(fmt("C %.4g C1 %.4g", curve.C, curve.C1));
  o.note(fmt("coverage %.3f (held out) %.3f (all)", curve.coverage, curve.overall_coverage));
  o.note(fmt("inversions %.3f", curve.inversion_fraction));
  return o;
}

// ---- 11 ---------------------------------------------------------------------

int run_tool(std::vector<std::string> args, std::string& err) {
  args.insert(args.begin(), "oulab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, errs;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, errs);
  err = errs.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir =
      fs::temp_directory_path() / ("oulab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "experiment.ini";
  std::ofstream(cfg) << R"([grid]
dim = 1
half_width = 16
points = 256

[drift]
matrix = 0.5

[time]
theta = 1
samples = 8

[initial]
kind = mixture

[omega]
set = periodic 1 | box 0 0.5 | thickness 0.5 1
window = -10 10
delta = 0.36
radius = 0.1

[sweep]
noise_levels = 0 1e-4 1e-2
reps = 3
calibration_reps = 1

[ensemble]
kind = mixture
count = 4

[reconstruct]
noise = 1e-3
)";
  int files = 0;
  for (const std::string cmd : {"simulate", "constants", "verify-convexity", "thickness",
                                "observability", "reconstruct", "sweep"}) {
    const fs::path a = dir / (cmd + "_a");
    const fs::path b = dir / (cmd + "_b");
    std::string err;
    const int ca = run_tool({cmd, "--config", cfg.string(), "--out", a.string(), "--seed", "11"}, err);
    const int cb = run_tool({cmd, "--config", cfg.string(), "--out", b.string(), "--seed", "11"}, err);
    if (ca != kExitOk || cb != kExitOk) {
      o.require(false, cmd + " exited with " + std::to_string(ca) + "/" + std::to_string(cb) +
                           ": " + err);
      continue;
    }
    int here = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path twin = b / entry.path().filename();
      o.require(fs::exists(twin) && slurp(entry.path()) == slurp(twin),
                cmd + ": " + entry.path().filename().string() + " differs");
      ++here;
    }
    o.require(here > 0, cmd + " wrote no artifacts");
    files += here;
  }
  fs::remove_all(dir);
  o.note("7 commands, " + std::to_string(files) + " artifacts compared");
  return o;
}

}  // namespace

int main() {
  int unexpected = 0;
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool known = kKnownDefects.count(id) > 0;
    if (!o.pass) {
      ++failed;
      if (!known) ++unexpected;
    }
    std::printf("%-4s %2d %-28s %s [%.1fs]%s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs, !o.pass && known ? " (known defect)" : "");
    std::fflush(stdout);
  };

  EnsembleStudy study;
  report(1, "covariance", covariance_correctness);
  report(2, "convexity-constants", convexity_constants_check);
  bool study_ok = true;
  std::string study_error;
  const auto start = std::chrono::steady_clock::now();
  try {
    study = ensemble_study();
  } catch (const std::exception& e) {
    study_ok = false;
    study_error = e.what();
  }
  const double study_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("     ensemble pass for 3 and 4: %.1fs\n", study_secs);
  auto need_study = [&](Outcome (*f)(const EnsembleStudy&)) {
    return [&, f]() -> Outcome {
      if (!study_ok) throw Error("ensemble pass failed: " + study_error);
      return f(study);
    };
  };
  report(3, "semigroup-fidelity", need_study(semigroup_fidelity));
  report(4, "log-convexity", need_study(log_convexity));
  report(5, "helper-inequality", helper_inequality);
  report(6, "smoothing", smoothing);
  report(7, "thickness", thickness);
  report(8, "observability", observability);
  report(9, "reconstruction", reconstruction);
  report(10, "stability-curve", stability_curve);
  report(11, "determinism", determinism);
  std::printf("%d of 11 criteria passed; %d unexpected failure(s)\n", 11 - failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
