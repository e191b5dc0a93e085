#pragma once

// Optimization on the manifold of m x K complex matrices with orthonormal
// rows (T T^dag = identity, K >= m): random points, tangent projection, polar
// retraction, and a projected conjugate-gradient descent with Armijo
// backtracking, nonsmoothness handled by a decreasing smoothing parameter.
//
// Objectives are real functions of the complex matrix T.  Gradients follow
// the convention grad = 2 d/d(conj T), so the first-order expansion along a
// tangent direction E reads f(T + h E) = f(T) + h Re<grad, E> + O(h^2) with
// <A, B> = Re Tr[A^dag B].

#include "ruchan/core.hpp"

#include <functional>

namespace ruchan {

inline double re_dot(const Mat& a, const Mat& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

// Returns T with orthonormal rows, drawn as the polar factor of a Ginibre
// matrix; deterministic for a fixed rng state.
inline Mat random_right_unitary(int m, int k, Rng& rng);

// Project an ambient direction G onto the tangent space at T,
// { X : X T^dag + T X^dag = 0 }: subtract the symmetric part of G T^dag
// applied back to T.
inline Mat tangent_project(const Mat& t, const Mat& g) {
  if (g.rows() != t.rows() || g.cols() != t.cols())
    throw shape_error("tangent_project: direction shape mismatch");
  const Mat s = 0.5 * (g * t.adjoint() + t * g.adjoint());
  return g - s * t;
}

// Polar retraction: the closest matrix with orthonormal rows,
// (X X^dag)^{-1/2} X.  Requires full row rank; inputs with a condition
// number beyond ~1e12 are rejected rather than amplified.
inline Mat retract(const Mat& x) {
  const int m = static_cast<int>(x.rows());
  if (x.cols() < m)
    throw shape_error("retract: fewer columns than rows");
  Mat gram = x * x.adjoint();
  hermitize(gram);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  if (es.info() != Eigen::Success)
    throw numerical_error("retract: eigensolver failed");
  const RVec lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (lmax <= 0.0 || lam.minCoeff() < 1e-24 * lmax)
    throw numerical_error("retract: input is numerically row-rank deficient");
  RVec inv(lam.size());
  for (int i = 0; i < lam.size(); ++i) inv(i) = 1.0 / std::sqrt(lam(i));
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint() *
         x;
}

inline Mat random_right_unitary(int m, int k, Rng& rng) {
  if (m < 1 || k < m)
    throw shape_error("random_right_unitary: need K >= m >= 1");
  return retract(rng.gaussian(m, k));
}

// f(T, eps): objective value at smoothing level eps (eps = 0 means the exact,
// possibly nonsmooth objective).  Smooth objectives simply ignore eps.
using Objective = std::function<double(const Mat&, double)>;
using Gradient  = std::function<Mat(const Mat&, double)>;

struct OptimizerConfig {
  int max_iters = 2000;      // per restart, across all smoothing stages
  double grad_tol = 1e-10;   // projected-gradient norm target
  double stall_tol = 1e-13;  // relative decrease treated as "no progress"
  int stall_patience = 3;    // stalled iterations before tightening eps
  double eps_start = 1e-3;
  double eps_floor = 1e-9;
  int restarts = 8;
  std::uint64_t seed = 12345;
  double armijo_c = 1e-4;
  int ls_max = 45;           // halvings per line search
};

struct OptimizerResult {
  double best_value = std::numeric_limits<double>::infinity();
  Mat best_t;
  int iterations = 0;   // total across restarts
  bool converged = false;
  std::vector<double> restart_values;              // best per restart
  std::vector<std::vector<double>> restart_traces; // running best per iter
};

namespace detail {

struct RestartOutcome {
  double best_value;
  Mat best_t;
  int iterations;
  bool converged;
  std::vector<double> trace;
};

inline RestartOutcome minimize_one(const Objective& f, const Gradient& g,
                                   Mat t, const OptimizerConfig& cfg,
                                   int restart_idx) {
  const auto bad = [&](const char* what) {
    return numerical_error(std::string("minimize: non-finite ") + what +
                           " at restart " + std::to_string(restart_idx));
  };
  double eps = cfg.eps_start;
  double ft = f(t, eps);
  if (!std::isfinite(ft)) throw bad("objective");
  Mat grad = tangent_project(t, g(t, eps));
  if (!is_finite(grad)) throw bad("gradient");
  Mat dir = -grad;

  RestartOutcome out;
  out.best_value = f(t, 0.0);
  out.best_t = t;
  out.iterations = 0;
  out.converged = false;
  out.trace.push_back(out.best_value);

  double step = 1.0 / std::max(1.0, grad.norm());
  double bb_step = 0.0;  // Barzilai-Borwein estimate from the last step
  int stalled = 0;

  const auto refresh = [&]() {
    ft = f(t, eps);
    grad = tangent_project(t, g(t, eps));
    if (!std::isfinite(ft)) throw bad("objective");
    if (!is_finite(grad)) throw bad("gradient");
    dir = -grad;
    bb_step = 0.0;
    stalled = 0;
  };

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    ++out.iterations;
    if (grad.norm() < cfg.grad_tol) {
      if (eps <= cfg.eps_floor) {
        out.converged = true;
        break;
      }
      eps = std::max(eps / 2.0, cfg.eps_floor);
      refresh();
      out.trace.push_back(out.best_value);
      continue;
    }

    double slope = re_dot(grad, dir);
    if (!(slope < 0.0)) {  // lost conjugacy; fall back to steepest descent
      dir = -grad;
      slope = re_dot(grad, dir);
    }

    double alpha = (bb_step > 0.0 && std::isfinite(bb_step))
                       ? std::clamp(bb_step, 1e-12, 1e6)
                       : std::min(step * 2.0, 1e6);
    Mat t_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < cfg.ls_max; ++ls) {
      bool feasible = true;
      try {
        t_new = retract(t + alpha * dir);
      } catch (const numerical_error&) {
        feasible = false;  // trial step left the retraction's domain; shrink
      }
      if (feasible) {
        f_new = f(t_new, eps);
        if (!std::isfinite(f_new)) throw bad("objective");
        if (f_new <= ft + cfg.armijo_c * alpha * slope) {
          accepted = true;
          break;
        }
      }
      alpha /= 2.0;
    }

    if (!accepted) {
      if (eps > cfg.eps_floor) {
        eps = std::max(eps / 2.0, cfg.eps_floor);
        refresh();
        out.trace.push_back(out.best_value);
        continue;
      }
      break;  // no descent available at the smoothing floor
    }

    const double raw = f(t_new, 0.0);
    if (raw < out.best_value) {
      out.best_value = raw;
      out.best_t = t_new;
    }
    out.trace.push_back(out.best_value);

    Mat grad_new = tangent_project(t_new, g(t_new, eps));
    if (!is_finite(grad_new)) throw bad("gradient");

    const double sy = re_dot(t_new - t, grad_new - grad);
    bb_step = (sy > 0.0) ? (t_new - t).squaredNorm() / sy : 0.0;

    // Polak-Ribiere+ with projected transport of the old quantities.
    const Mat grad_old_tx = tangent_project(t_new, grad);
    const double denom = re_dot(grad, grad);
    double beta = 0.0;
    if (denom > 0.0)
      beta = std::max(0.0, re_dot(grad_new, grad_new - grad_old_tx) / denom);
    dir = -grad_new + beta * tangent_project(t_new, dir);

    const double decrease = ft - f_new;
    if (decrease < cfg.stall_tol * std::max(1.0, std::abs(ft)))
      ++stalled;
    else
      stalled = 0;

    t = std::move(t_new);
    ft = f_new;
    grad = std::move(grad_new);
    step = alpha;

    if (stalled >= cfg.stall_patience) {
      if (eps <= cfg.eps_floor) break;
      eps = std::max(eps / 2.0, cfg.eps_floor);
      refresh();
      out.trace.push_back(out.best_value);
    }
  }
  return out;
}

}  // namespace detail

// Multi-start minimization.  Restart r starts from initial_guesses[r] when
// provided, otherwise from a random point seeded by (cfg.seed, r); identical
// configurations therefore reproduce identical traces.
inline OptimizerResult minimize(const Objective& f, const Gradient& g, int m,
                                int k, const OptimizerConfig& cfg,
                                const std::vector<Mat>& initial_guesses = {}) {
  if (cfg.restarts < 1)
    throw precondition_error("minimize: need at least one restart");
  if (m < 1 || k < m) throw shape_error("minimize: need K >= m >= 1");
  OptimizerResult res;
  for (int r = 0; r < cfg.restarts; ++r) {
    Mat t0;
    if (r < static_cast<int>(initial_guesses.size())) {
      t0 = initial_guesses[static_cast<std::size_t>(r)];
      if (t0.rows() != m || t0.cols() != k)
        throw shape_error("minimize: initial guess has wrong shape");
    } else {
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      t0 = random_right_unitary(m, k, rng);
    }
    auto one = detail::minimize_one(f, g, std::move(t0), cfg, r);
    res.iterations += one.iterations;
    res.restart_values.push_back(one.best_value);
    res.restart_traces.push_back(std::move(one.trace));
    if (one.best_value < res.best_value) {
      res.best_value = one.best_value;
      res.best_t = one.best_t;
      res.converged = one.converged;
    }
  }
  return res;
}

}  // namespace ruchan
