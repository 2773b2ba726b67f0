#include <doctest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "oulab/errors.hpp"
#include "oulab/linops.hpp"

using namespace oulab;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("drift matrix validation") {
  CHECK_THROWS_AS(DriftMatrix(Matrix(2, 3)), InvalidInput);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(DriftMatrix{bad}, InvalidInput);
  CHECK_THROWS_AS(DriftMatrix::from_rows({1, 2, 3}), InvalidInput);
  const auto b = DriftMatrix::from_rows({1, 2, 3, 4});
  CHECK(b.dim() == 2);
  CHECK(b.matrix()(1, 0) == 3.0);
  CHECK(b.trace() == 5.0);
}

TEST_CASE("expm matches Eigen's MatrixFunctions on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const double scale = trial < 30 ? 1.0 : 8.0;
    const Matrix a = random_matrix(rng, n, scale);
    const Matrix ours = expm(a);
    const Matrix ref = a.exp();
    CHECK((ours - ref).norm() <= 1e-12 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("expm special cases") {
  CHECK(expm(Matrix::Zero(3, 3)).isIdentity(0.0));
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  const Matrix e = expm(0.7 * rot);
  CHECK(e(0, 0) == doctest::Approx(std::cos(0.7)).epsilon(1e-15));
  CHECK(e(0, 1) == doctest::Approx(std::sin(0.7)).epsilon(1e-15));
  const auto b = DriftMatrix::from_rows({0.3, 1.0, -0.5, 0.2});
  const Matrix prod = matrix_exponential(b, 0.4) * matrix_exponential(b, -0.4);
  CHECK((prod - Matrix::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("covariance of scalar drifts against the closed form") {
  for (double b : {-2.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double t : {0.01, 0.5, 1.0, 3.0}) {
      const double expected = oracle::scalar_covariance(b, t);
      for (auto method : {CovarianceMethod::kQuadrature, CovarianceMethod::kLyapunovOde}) {
        const auto q = covariance(DriftMatrix::scalar(b), t, 1e-12, method);
        CHECK(q.q(0, 0) == doctest::Approx(expected).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("covariance: the two integrators agree and satisfy the Lyapunov identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const DriftMatrix b(random_matrix(rng, n, 2.0));
    const double t = 0.25 + 0.05 * trial;
    const auto qa = covariance(b, t, 1e-12, CovarianceMethod::kQuadrature);
    const auto qb = covariance(b, t, 1e-12, CovarianceMethod::kLyapunovOde);
    CHECK((qa.q - qb.q).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((qa.q - qa.q.transpose()).norm() == 0.0);
    const Matrix e = matrix_exponential(b, t);
    const Matrix lhs = e * e.transpose() - Matrix::Identity(n, n);
    const Matrix rhs = b.matrix() * qa.q + qa.q * b.matrix().transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, lhs.norm()));
    // Positive definite for t > 0.
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(qa.q).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("covariance: t = 0 and skew drifts") {
  const auto b = DriftMatrix::from_rows({0, 1, -1, 0});
  CHECK(covariance(b, 0.0, 1e-12).q.isZero(0.0));
  const auto q = covariance(b, 2.0, 1e-12).q;
  CHECK((q - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(covariance(b, -1.0, 1e-12), InvalidInput);
}

TEST_CASE("sphere directions are unit vectors") {
  for (int n = 1; n <= 3; ++n) {
    const auto dirs = sphere_directions(n, 40);
    CHECK(!dirs.empty());
    for (const auto& d : dirs) CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(sphere_directions(1, 40).size() == 2);
}

TEST_CASE("convexity constants: scalar drifts against the 1-D oracle") {
  for (double b : {-1.5, -0.3, 0.3, 1.0, 2.0}) {
    for (double theta : {0.5, 1.0}) {
      const auto k = convexity_constants(DriftMatrix::scalar(b), theta);
      const auto o = oracle::scalar_constants(b, theta);
      CHECK(k.c1 == doctest::Approx(o.c1).epsilon(1e-6));
      CHECK(k.c2 == doctest::Approx(o.c2).epsilon(1e-6));
      CHECK(k.c == doctest::Approx(o.c).epsilon(1e-6));
      CHECK(k.kappa == doctest::Approx(o.kappa).epsilon(1e-6));
    }
  }
}

TEST_CASE("convexity constants: trivial drifts give c = kappa = 1") {
  for (const auto& b : {DriftMatrix::zero(2), DriftMatrix::from_rows({0, 1, -1, 0})}) {
    const auto k = convexity_constants(b, 1.0);
    CHECK(k.c == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(k.kappa == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Q_t lower bound holds on random drifts") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const DriftMatrix b(random_matrix(rng, 2, 2.0));
    const auto k = convexity_constants(b, 1.0);
    CHECK(k.c > 0.0);
    CHECK(k.c <= 1.0);
    const auto r = verify_qt_lower_bound(b, 1.0, k, SamplingSpec{200, 30, 1e-6});
    CHECK(r.passed);
    CHECK(r.min_normalized_slack >= -1e-9);
  }
}

TEST_CASE("Q_t lower bound detects inflated constants") {
  const auto b = DriftMatrix::scalar(1.0);
  auto k = convexity_constants(b, 1.0);
  k.c *= 1.5;
  CHECK_FALSE(verify_qt_lower_bound(b, 1.0, k, SamplingSpec{100, 2, 1e-6}).passed);
  CHECK_THROWS_AS(verify_qt_lower_bound(DriftMatrix::scalar(2.0), 1.0, k, {}), InvalidInput);
}
