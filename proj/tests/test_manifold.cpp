#include "doctest.h"
#include "ruchan/manifold.hpp"

#include <cmath>

using namespace ruchan;

namespace {

bool feasible(const Mat& t, double tol = 1e-10) {
  const int m = static_cast<int>(t.rows());
  return (t * t.adjoint() - Mat::Identity(m, m)).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("random right-unitary samples are feasible and deterministic") {
  for (auto [m, k] : {std::pair{1, 1}, {4, 4}, {4, 8}, {9, 12}}) {
    Rng rng(61);
    const Mat t = random_right_unitary(m, k, rng);
    CHECK(feasible(t, 1e-12));
  }
  Rng a(62), b(62);
  const Mat ta = random_right_unitary(3, 5, a);
  const Mat tb = random_right_unitary(3, 5, b);
  CHECK((ta - tb).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(63);
  CHECK_THROWS_AS(random_right_unitary(4, 3, rng), shape_error);
}

TEST_CASE("tangent projection lands in the tangent space and is idempotent") {
  Rng rng(64);
  const Mat t = random_right_unitary(3, 5, rng);
  const Mat g = rng.gaussian(3, 5);
  const Mat x = tangent_project(t, g);
  // Tangency: X T^dag + T X^dag = 0.
  CHECK((x * t.adjoint() + t * x.adjoint()).norm() < 1e-12);
  // Projection leaves tangent vectors alone.
  CHECK((tangent_project(t, x) - x).norm() < 1e-12);
  // T itself is normal, so its projection vanishes.
  CHECK(tangent_project(t, t).norm() < 1e-12);
}

TEST_CASE("retraction is the identity on feasible points and scale-free") {
  Rng rng(65);
  const Mat t = random_right_unitary(4, 6, rng);
  CHECK((retract(t) - t).norm() < 1e-12);
  CHECK((retract((2.0 * t).eval()) - t).norm() < 1e-12);

  const Mat e = rng.gaussian(4, 6);
  const Mat nearby = retract(t + 0.01 * e);
  CHECK(feasible(nearby, 1e-12));
  CHECK((nearby - t).norm() < 0.02 * e.norm());
}

TEST_CASE("retracted steps stay first-order consistent") {
  Rng rng(66);
  const Mat t = random_right_unitary(3, 4, rng);
  const Mat x = tangent_project(t, rng.gaussian(3, 4));
  const auto gap = [&](double s) {
    return (retract(t + s * x) - (t + s * x)).norm();
  };
  // The retraction correction is O(s^2): shrinking s tenfold shrinks the
  // gap about a hundredfold.
  const double g1 = gap(1e-3);
  const double g2 = gap(1e-4);
  CHECK(g2 < g1 / 50.0);
}

TEST_CASE("retraction rejects rank-deficient input") {
  Mat x(2, 3);
  x.row(0) << 1, 2, 3;
  x.row(1) << 2, 4, 6;  // parallel rows
  CHECK_THROWS_AS(retract(x), numerical_error);
  CHECK_THROWS_AS(retract(Mat::Identity(3, 2)), shape_error);
}

TEST_CASE("scalar phase alignment reaches the analytic optimum") {
  // min over |t| = 1 of Re(conj(c) t) is -|c| at t = -c/|c|.
  const cplx c(0.8, -0.6);
  Mat cm(1, 1);
  cm(0, 0) = c;
  const Objective f = [&](const Mat& t, double) {
    return re_dot(cm, t);
  };
  const Gradient g = [&](const Mat&, double) { return cm; };
  OptimizerConfig cfg;
  cfg.restarts = 2;
  const OptimizerResult res = minimize(f, g, 1, 1, cfg);
  CHECK(std::abs(res.best_value - (-1.0)) < 1e-8);
  CHECK(std::abs(res.best_t(0, 0) - (-c)) < 1e-6);
  CHECK(res.converged);
}

TEST_CASE("matrix nearness objective: descent, feasibility, determinism") {
  // f(T) = ||T - A||_F^2 with gradient 2 (T - A).
  Rng rng(67);
  const Mat a = rng.gaussian(3, 6);
  const Objective f = [&](const Mat& t, double) {
    return (t - a).squaredNorm();
  };
  const Gradient g = [&](const Mat& t, double) { return Mat(2.0 * (t - a)); };

  OptimizerConfig cfg;
  cfg.restarts = 3;
  cfg.seed = 99;
  const OptimizerResult res = minimize(f, g, 3, 6, cfg);

  CHECK(feasible(res.best_t));
  CHECK(std::abs(res.best_value - f(res.best_t, 0.0)) < 1e-12);
  REQUIRE(res.restart_traces.size() == 3);
  for (const auto& trace : res.restart_traces)
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] + 1e-15);

  // Identical configuration reproduces the identical result.
  const OptimizerResult res2 = minimize(f, g, 3, 6, cfg);
  CHECK(res.best_value == res2.best_value);
  REQUIRE(res2.restart_traces.size() == 3);
  for (int r = 0; r < 3; ++r) {
    REQUIRE(res.restart_traces[r].size() == res2.restart_traces[r].size());
    for (std::size_t i = 0; i < res.restart_traces[r].size(); ++i)
      CHECK(res.restart_traces[r][i] == res2.restart_traces[r][i]);
  }
}

TEST_CASE("analytic gradients match finite differences under the halved "
          "convention") {
  // df = Re<grad, E> means grad(i,j) is recovered from real and imaginary
  // coordinate differences.
  Rng rng(68);
  const Mat a = rng.gaussian(2, 3);
  const Objective f = [&](const Mat& t, double) {
    return (t - a).squaredNorm();
  };
  const Gradient g = [&](const Mat& t, double) { return Mat(2.0 * (t - a)); };

  const Mat t = random_right_unitary(2, 3, rng);
  const Mat grad = g(t, 0.0);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat e = Mat::Zero(2, 3);
      e(i, j) = 1.0;
      const double re =
          (f(t + h * e, 0.0) - f(t - h * e, 0.0)) / (2.0 * h);
      e(i, j) = cplx(0.0, 1.0);
      const double im =
          (f(t + h * e, 0.0) - f(t - h * e, 0.0)) / (2.0 * h);
      CHECK(std::abs(cplx(re, im) - grad(i, j)) < 1e-6);
    }
}

TEST_CASE("optimizer raises on non-finite objectives and bad configs") {
  const Objective f = [](const Mat&, double) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  const Gradient g = [](const Mat& t, double) { return Mat(0.0 * t); };
  OptimizerConfig cfg;
  cfg.restarts = 1;
  CHECK_THROWS_AS(minimize(f, g, 2, 2, cfg), numerical_error);

  OptimizerConfig none;
  none.restarts = 0;
  const Objective ok = [](const Mat&, double) { return 0.0; };
  CHECK_THROWS_AS(minimize(ok, g, 2, 2, none), precondition_error);

  OptimizerConfig one;
  one.restarts = 1;
  CHECK_THROWS_AS(minimize(ok, g, 2, 2, one, {Mat::Zero(3, 3)}), shape_error);
}
