#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "oulab/errors.hpp"
#include "oulab/semigroup.hpp"

using namespace oulab;

namespace {

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

}  // namespace

TEST_CASE("heat semigroup on a Gaussian") {
  const GridSpec g(1, 20.0, 256);
  const GridState f = gaussian(g, 1.0, Vector::Zero(1));
  for (double t : {0.1, 0.5, 2.0}) {
    const GridState u = heat_apply(f, t);
    const GridState expected = sample(
        g, [&](const double* x) { return oracle::heat_gaussian(1, 1.0, t, x[0] * x[0]); });
    CHECK(max_abs(u - expected) < 1e-12);
  }
  CHECK(heat_apply(f, 0.0).values() == f.values());
  CHECK_THROWS_AS(heat_apply(f, -1.0), InvalidInput);
}

TEST_CASE("zero drift reduces to the heat semigroup") {
  const GridSpec g(2, 12.0, 64);
  Vector s(2);
  s << 0.5, -0.7;
  const GridState f = gaussian(g, 0.8, s);
  const SemigroupStep step(DriftMatrix::zero(2), 0.6);
  CHECK(max_abs(ou_apply(f, step) - heat_apply(f, 0.6)) < 1e-13);
}

TEST_CASE("OU evolution of a Gaussian matches the closed form pointwise") {
  const GridSpec g(2, 16.0, 128);
  Vector s(2);
  s << 0.6, -0.4;
  const GridState f = gaussian(g, 1.0, s);
  for (const auto& b : {DriftMatrix::from_rows({0, 1, -1, 0}), DriftMatrix::from_rows({1, 0, 0, -1}),
                        DriftMatrix::from_rows({0.5, 1, 0, -0.5}),
                        DriftMatrix::from_rows({-0.3, 0.2, 0.4, 0.1})}) {
    const SemigroupStep step(b, 0.5);
    const GridState u = ou_apply(f, step);
    const GridState expected = sample(g, [&](const double* x) {
      Vector xv(2);
      xv << x[0], x[1];
      return oracle::ou_gaussian(step.flow(), step.covariance().q, 1.0, s, xv);
    });
    CHECK(max_abs(u - expected) < 1e-9);
  }
}

TEST_CASE("semigroup law T(t+s) = T(t) T(s)") {
  const GridSpec g(2, 16.0, 96);
  Vector s(2);
  s << 0.3, 0.2;
  const GridState f = gaussian(g, 1.0, s);
  const auto b = DriftMatrix::from_rows({0.4, 1.0, -0.6, -0.3});
  const GridState once = ou_apply(f, SemigroupStep(b, 0.7));
  const GridState twice = ou_apply(ou_apply(f, SemigroupStep(b, 0.3)), SemigroupStep(b, 0.4));
  CHECK(l2_norm(once - twice) < 1e-8 * l2_norm(once));
}

TEST_CASE("drift flow: norm identity and group property") {
  const GridSpec g(2, 14.0, 96);
  Vector s(2);
  s << -0.5, 0.4;
  const GridState f = gaussian(g, 0.9, s);
  const auto b = DriftMatrix::from_rows({0.5, 0.8, -0.2, -0.9});
  for (double t : {0.3, -0.3}) {
    const GridState sf = drift_apply(f, b, t);
    CHECK(l2_norm(sf) == doctest::Approx(std::exp(-t * b.trace() / 2.0) * l2_norm(f)).epsilon(1e-9));
  }
  const GridState back = drift_apply(drift_apply(f, b, 0.4), b, -0.4);
  CHECK(l2_norm(back - f) < 1e-9 * l2_norm(f));
}

TEST_CASE("permuted flow plans") {
  const GridSpec g(2, 10.0, 64);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const FlowPlan plan(g, swap);
  CHECK(plan.permutation() == std::vector<int>{1, 0});
  Vector s(2);
  s << 1.0, -0.5;
  const GridState f = gaussian(g, 1.0, s);
  const GridState swapped = plan.apply(f);
  Vector t(2);
  t << -0.5, 1.0;
  CHECK(max_abs(swapped - gaussian(g, 1.0, t)) < 1e-12);
  CHECK_THROWS_AS(FlowPlan(g, Matrix::Zero(2, 2)), InvalidInput);
}

TEST_CASE("adjoints satisfy <T u, v> = <u, T* v>") {
  const GridSpec g(2, 12.0, 64);
  Vector s1(2), s2(2);
  s1 << 0.5, 0.0;
  s2 << -0.3, 0.6;
  const GridState u = gaussian(g, 1.0, s1);
  const GridState v = gaussian(g, 1.2, s2);
  for (const auto& b : {DriftMatrix::from_rows({0, 1, -1, 0}), DriftMatrix::from_rows({1, 1, 0, -1}),
                        DriftMatrix::from_rows({0.2, -0.5, 0.9, 0.4})}) {
    const SemigroupStep step(b, 0.5);
    const double lhs = inner_product(ou_apply(u, step), v);
    const double rhs = inner_product(u, ou_adjoint_apply(v, step));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs) + 1e-15);
  }
}

TEST_CASE("contraction bound ||T(t) f|| <= e^{-t tr B / 2} ||f||") {
  const GridSpec g(1, 20.0, 256);
  for (double b : {-1.0, 0.0, 1.0}) {
    for (double shift : {0.0, 1.0}) {
      Vector s(1);
      s << shift;
      const GridState f = gaussian(g, 1.0, s);
      for (double t : {0.25, 1.0}) {
        const double n = l2_norm(ou_apply(f, SemigroupStep(DriftMatrix::scalar(b), t)));
        CHECK(n <= std::exp(-t * b / 2.0) * l2_norm(f) * (1.0 + 1e-6));
      }
    }
  }
}

TEST_CASE("trajectory and guards") {
  const GridSpec g(1, 10.0, 128);
  const GridState f = gaussian(g, 1.0, Vector::Zero(1));
  const auto traj = trajectory(f, DriftMatrix::scalar(0.5), 1.0, 4);
  REQUIRE(traj.size() == 5);
  CHECK(traj[0].values() == f.values());
  CHECK(max_abs(traj[4] - ou_apply(f, SemigroupStep(DriftMatrix::scalar(0.5), 1.0))) == 0.0);
  CHECK_THROWS_AS(trajectory(f, DriftMatrix::scalar(0.5), 0.0, 4), InvalidInput);
  CHECK_THROWS_AS(SemigroupStep(DriftMatrix::scalar(1.0), -1.0), InvalidInput);
  // A contracting drift spreads the state out to the box edge.
  CHECK_THROWS_AS(ou_apply(f, SemigroupStep(DriftMatrix::scalar(-2.0), 1.0)), DomainTruncation);
  CHECK_THROWS_AS(ou_apply(f, SemigroupStep(DriftMatrix::zero(2), 1.0)), InvalidInput);
}
