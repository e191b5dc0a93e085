#pragma once

// Distance from a bipartite state (Choi state of a doubly stochastic map) to
// the set of mixtures of maximally entangled states, via minimization of the
// column-norm objective
//
//   D_{2,1}(rho, T) = sum_j || ( (T^dag A_i T)_jj )_i ||_2 ,
//   A_i = rho^{1/2} (tau_i (x) 1) rho^{1/2},
//
// over right-unitary T.  Zero value certifies a decomposition into maximally
// entangled states (equivalently: the underlying map is a mixture of
// unitaries).  Also: reduction-based lower bounds, pure-state and rank-2
// closed forms, the inversion onto the Birkhoff-polytope distance scale, and
// entanglement measures estimated over the same ensemble parameterization.

#include "ruchan/core.hpp"
#include "ruchan/ensemble.hpp"
#include "ruchan/manifold.hpp"
#include "ruchan/qstate.hpp"

namespace ruchan {

namespace detail {

// v(i, j) = (T^dag A_i T)_jj; real because the A_i are Hermitian.
inline RMat diag_forms(const ProblemInstance& inst, const Mat& t) {
  const int n = static_cast<int>(inst.a.size());
  RMat v(n, t.cols());
  for (int i = 0; i < n; ++i) {
    const Mat y = inst.a[static_cast<std::size_t>(i)] * t;
    v.row(i) = t.conjugate().cwiseProduct(y).colwise().sum().real();
  }
  return v;
}

inline double d21_value(const ProblemInstance& inst, const Mat& t,
                        double eps) {
  const RMat v = diag_forms(inst, t);
  double f = 0.0;
  for (int j = 0; j < v.cols(); ++j)
    f += std::sqrt(v.col(j).squaredNorm() + eps * eps) - eps;
  return f;
}

inline Mat d21_gradient(const ProblemInstance& inst, const Mat& t,
                        double eps) {
  const int n = static_cast<int>(inst.a.size());
  const RMat v = diag_forms(inst, t);
  Mat grad = Mat::Zero(t.rows(), t.cols());
  RVec s(v.cols());
  for (int j = 0; j < v.cols(); ++j)
    s(j) = std::sqrt(v.col(j).squaredNorm() + eps * eps);
  for (int i = 0; i < n; ++i) {
    const Mat y = inst.a[static_cast<std::size_t>(i)] * t;
    for (int j = 0; j < t.cols(); ++j)
      if (s(j) > 0.0) grad.col(j) += (2.0 * v(i, j) / s(j)) * y.col(j);
  }
  return grad;
}

// Smooth proxy sum_ij v_ij^2, used to polish near-zero incumbents.
inline double sos_value(const ProblemInstance& inst, const Mat& t) {
  return diag_forms(inst, t).squaredNorm();
}

inline Mat sos_gradient(const ProblemInstance& inst, const Mat& t) {
  const int n = static_cast<int>(inst.a.size());
  const RMat v = diag_forms(inst, t);
  Mat grad = Mat::Zero(t.rows(), t.cols());
  for (int i = 0; i < n; ++i) {
    const Mat y = inst.a[static_cast<std::size_t>(i)] * t;
    for (int j = 0; j < t.cols(); ++j)
      grad.col(j) += (4.0 * v(i, j)) * y.col(j);
  }
  return grad;
}

// Eigensystem used for the deterministic starting point.  For d = 2 the
// Bell-type-basis route of qubit_eigen_offdiag_check is reused so degenerate
// mixtures of maximally entangled states start at an exact solution.
inline std::pair<Mat, RVec> start_eigensystem(const BipartiteState& s) {
  const Mat rho = require_hermitian(s.matrix, 1e-10, "distance input");
  if (s.d == 2) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Mat magic(4, 4);
    const cplx i1(0.0, 1.0);
    magic.col(0) << 1, 0, 0, 1;
    magic.col(1) << i1, 0, 0, -i1;
    magic.col(2) << 0, i1, i1, 0;
    magic.col(3) << 0, 1, -1, 0;
    magic *= inv_sqrt2;
    const Mat in_magic = magic.adjoint() * rho * magic;
    if (in_magic.imag().norm() <= 1e-8 * std::max(1.0, rho.norm())) {
      Eigen::SelfAdjointEigenSolver<RMat> es(in_magic.real());
      if (es.info() == Eigen::Success) {
        Mat u = (magic * es.eigenvectors().cast<cplx>()).rowwise().reverse();
        for (Eigen::Index j = 0; j < u.cols(); ++j) fix_phase(u.col(j));
        return {std::move(u), es.eigenvalues().reverse()};
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.info() != Eigen::Success)
    throw numerical_error("distance: eigensolver failed");
  Mat u = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < u.cols(); ++j) fix_phase(u.col(j));
  return {std::move(u), es.eigenvalues().reverse()};
}

}  // namespace detail

// General (p, q) evaluation: per ensemble column the l_p norm over basis
// indices, then the l_q norm over columns.  T must be right-unitary.
inline double d_pq_objective(const BipartiteState& s, const Mat& t, double p,
                             double q) {
  if (p < 1.0 || q < 1.0)
    throw domain_error("d_pq_objective: need p, q >= 1");
  const int m = s.d * s.d;
  if (t.rows() != m) throw shape_error("d_pq_objective: T must have d^2 rows");
  if (t.cols() < m)
    throw feasibility_error("d_pq_objective: cardinality below d^2");
  if ((t * t.adjoint() - Mat::Identity(m, m)).norm() > 1e-8)
    throw feasibility_error("d_pq_objective: T T^dag != identity");
  const ProblemInstance inst = build_problem_p(s);
  const RMat v = detail::diag_forms(inst, t);
  double acc = 0.0;
  for (int j = 0; j < v.cols(); ++j) {
    double col = 0.0;
    for (int i = 0; i < v.rows(); ++i)
      col += std::pow(std::abs(v(i, j)), p);
    acc += std::pow(col, q / p);
  }
  return std::pow(acc, 1.0 / q);
}

// Distance of a pure state: sqrt(sum_i <tau_i (x) 1>^2) with the expectation
// in |psi>, evaluated against the equivalent Frobenius form
// sqrt(2) ||sigma - 1/d|| as a consistency check.  (The sum-of-expectations
// form is evaluated directly rather than via Tr[sigma^2] - 1/d, which
// cancels catastrophically near zero.)
inline double pure_value(const Vec& psi) {
  const int n = static_cast<int>(psi.size());
  const int d = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (d < 2 || d * d != n)
    throw shape_error("pure_value: length is not d^2 with d >= 2");
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw precondition_error("pure_value: vector is not normalized");
  const Mat mt = matrixify(psi);
  const Mat sigma = mt * mt.adjoint();
  double sum_sq = 0.0;
  for (const auto& el : gellmann_basis(d)) {
    const double expect = (sigma * el.matrix).trace().real();
    sum_sq += expect * expect;
  }
  const double form_a = std::sqrt(sum_sq);
  const double form_b = std::sqrt(2.0) * dist_to_maximally_mixed(sigma);
  if (std::abs(form_a - form_b) > 1e-12)
    throw numerical_error("pure_value: equivalent forms disagree");
  return form_b;
}

// sqrt(2) * max of the two reduction defects; a lower bound on the distance
// for any state, tight on pure states and on rank-2 two-qubit states.
inline double lower_bound_reductions(const BipartiteState& s) {
  const Mat rho = require_hermitian(s.matrix, 1e-10,
                                    "lower_bound_reductions input");
  const int d = s.d;
  const double r1 = dist_to_maximally_mixed(ptrace_first(rho, d, d));
  const double r2 = dist_to_maximally_mixed(ptrace_second(rho, d, d));
  return std::sqrt(2.0) * std::max(r1, r2);
}

// Closed-form distance for two-qubit states of rank at most 2.  For higher
// rank the same expression is only conjectured; it is returned solely when
// the caller opts in.
inline double rank2_qubit_closed_form(const BipartiteState& s,
                                      bool allow_conjecture = false) {
  if (s.d != 2)
    throw domain_error("rank2_qubit_closed_form: defined for d = 2 only");
  const Mat rho = require_hermitian(s.matrix, 1e-10,
                                    "rank2_qubit_closed_form input");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.info() != Eigen::Success)
    throw numerical_error("rank2_qubit_closed_form: eigensolver failed");
  RVec lam = es.eigenvalues();  // ascending
  const double lmax = std::max(lam.maxCoeff(), 0.0);
  int rank = 0;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) > 1e-9 * std::max(1.0, lmax)) ++rank;
  if (rank > 2 && !allow_conjecture)
    throw precondition_error(
        "rank2_qubit_closed_form: rank exceeds 2; value is conjectural "
        "(opt in to evaluate anyway)");
  return lower_bound_reductions(s);
}

// Map a Hilbert-Schmidt distance value D to the corresponding upper bound on
// the distance of the induced doubly stochastic matrix from the Birkhoff
// polytope: sqrt(2 - 4 / (d D^2 + 2)).  Monotone, zero at zero, and never
// exceeds sqrt(d) * D.
inline double property6_relation(double d_value, int d) {
  if (d < 2) throw domain_error("property6_relation: need d >= 2");
  const double dmax = std::sqrt(2.0 * (d - 1) / d);
  if (!(d_value >= -1e-12) || d_value > dmax + 1e-9)
    throw domain_error("property6_relation: value outside [0, sqrt(2(d-1)/d)]");
  const double clipped = std::clamp(d_value, 0.0, dmax);
  return std::sqrt(2.0 - 4.0 / (static_cast<double>(d) * clipped * clipped + 2.0));
}

enum class Verdict { ru_numerical, not_ru_certified, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ru_numerical: return "RU_numerical";
    case Verdict::not_ru_certified: return "NOT_RU_certified";
    default: return "UNDECIDED";
  }
}

struct DistanceOptions {
  int cardinality = 0;    // ensemble size K; 0 selects d^2
  bool escalate = false;  // sweep K through {d^2, 2 d^2, d^4}
  int restarts = 0;       // 0 selects 8 for d = 2, 16 for d >= 3
  std::uint64_t seed = 12345;
  double member_tol = 1e-6;  // upper bound below this -> RU_numerical
  double cert_tol = 1e-8;    // reduction bound above this -> NOT_RU_certified
  OptimizerConfig opt;       // per-restart iteration/tolerance knobs
};

struct DistanceReport {
  int d = 0;
  int cardinality = 0;  // columns of best_t
  double upper = std::numeric_limits<double>::infinity();
  double lower_reduction = 0.0;
  double m_upper = 0.0;  // property6_relation(upper, d)
  Verdict verdict = Verdict::undecided;
  bool converged = false;
  int iterations = 0;
  Mat best_t;
  std::vector<EnsembleMember> certificate;
  double ensemble_route_value = 0.0;  // sum_j p_j * pure_value(psi_j)
  std::vector<double> restart_values;
  std::vector<std::vector<double>> restart_traces;
  std::vector<std::string> diagnostics;  // optimizer failures, if any
};

// Full distance estimation: multi-start projected CG on the smoothed
// D_{2,1} objective, restart 0 from the eigendecomposition ensemble, each
// restart polished against the smooth sum-of-squares proxy, optional
// cardinality escalation with zero-padded warm starts.
inline DistanceReport distance(const BipartiteState& s,
                               const DistanceOptions& options = {}) {
  const int d = s.d;
  const int m = d * d;
  const Mat rho = require_hermitian(s.matrix, 1e-10, "distance input");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw precondition_error("distance: input trace != 1");
  const ProblemInstance inst = build_problem_p(s);

  const int restarts =
      options.restarts > 0 ? options.restarts : (d == 2 ? 8 : 16);
  std::vector<int> ladder;
  if (options.escalate) {
    ladder = {m, 2 * m, m * m};
  } else {
    const int k = options.cardinality > 0 ? options.cardinality : m;
    if (k < m)
      throw feasibility_error("distance: cardinality below d^2 is infeasible");
    ladder = {k};
  }

  const Objective f = [&inst](const Mat& t, double eps) {
    return detail::d21_value(inst, t, eps);
  };
  const Gradient g = [&inst](const Mat& t, double eps) {
    return detail::d21_gradient(inst, t, eps);
  };
  const Objective sos_f = [&inst](const Mat& t, double) {
    return detail::sos_value(inst, t);
  };
  const Gradient sos_g = [&inst](const Mat& t, double) {
    return detail::sos_gradient(inst, t);
  };

  const auto [evec, eval] = detail::start_eigensystem(s);
  (void)eval;

  DistanceReport rep;
  rep.d = d;

  OptimizerConfig one = options.opt;
  one.restarts = 1;
  OptimizerConfig polish = one;
  polish.eps_start = polish.eps_floor;  // proxy is smooth; skip the schedule

  for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
    const int k = ladder[stage];
    for (int r = 0; r < restarts; ++r) {
      Mat t0;
      if (r == 0) {
        // Deterministic start: previous-stage incumbent when escalating,
        // otherwise the eigendecomposition ensemble, zero-padded to K.
        const Mat base = (stage == 0 || rep.best_t.size() == 0)
                             ? evec
                             : rep.best_t;
        t0 = Mat::Zero(m, k);
        t0.block(0, 0, m, static_cast<int>(base.cols())) = base;
      } else {
        Rng rng(mix_seed(options.seed,
                         static_cast<std::uint64_t>(stage) * 1000 +
                             static_cast<std::uint64_t>(r)));
        t0 = random_right_unitary(m, k, rng);
      }

      try {
        auto res = minimize(f, g, m, k, one, {t0});
        auto pol = minimize(sos_f, sos_g, m, k, polish, {res.best_t});
        const double polished = detail::d21_value(inst, pol.best_t, 0.0);

        double value = res.best_value;
        Mat best = res.best_t;
        if (polished < value) {
          value = polished;
          best = pol.best_t;
        }
        auto trace = std::move(res.restart_traces.front());
        trace.push_back(value);

        rep.iterations += res.iterations + pol.iterations;
        rep.restart_values.push_back(value);
        rep.restart_traces.push_back(std::move(trace));
        if (value < rep.upper) {
          rep.upper = value;
          rep.best_t = std::move(best);
          rep.converged = res.converged;
        }
      } catch (const numerical_error& e) {
        // A failed restart is diagnosable but not fatal: the remaining
        // restarts still bound D from above, and the verdict degrades to
        // UNDECIDED if every one of them fails.
        rep.diagnostics.push_back("stage " + std::to_string(stage) +
                                  " restart " + std::to_string(r) + ": " +
                                  e.what());
      }
    }
  }

  rep.lower_reduction = lower_bound_reductions(s);
  if (rep.best_t.size() > 0) {
    rep.cardinality = static_cast<int>(rep.best_t.cols());
    rep.m_upper = property6_relation(std::min(rep.upper,
                                              std::sqrt(2.0 * (d - 1) / d)),
                                     d);
    rep.certificate = ensemble_from(s, rep.best_t);
    for (const auto& mbr : rep.certificate)
      if (!mbr.negligible)
        rep.ensemble_route_value += mbr.weight * pure_value(mbr.state);
  }

  if (rep.lower_reduction > options.cert_tol)
    rep.verdict = Verdict::not_ru_certified;
  else if (rep.upper < options.member_tol)
    rep.verdict = Verdict::ru_numerical;
  else
    rep.verdict = Verdict::undecided;
  return rep;
}

// ---------------------------------------------------------------------------
// Entanglement measures over the same ensemble parameterization.

struct AssistanceValue {
  double printed = 0.0;     // || rho^{1/2} (sy (x) sy) rho^{1/2} ||_1
  double conjugated = 0.0;  // || rho^{1/2} (sy (x) sy) conj(rho)^{1/2} ||_1
  bool differ = false;
};

// Two-qubit concurrence of assistance.  Both published variants of the
// closed form are reported: they coincide on real states but differ on
// complex ones, where only the conjugated variant reproduces the pure-state
// concurrence |<psi| sy (x) sy |conj(psi)>|.
inline AssistanceValue concurrence_of_assistance(const BipartiteState& s) {
  if (s.d != 2)
    throw domain_error("concurrence_of_assistance: defined for d = 2 only");
  const Mat root = sqrtm_psd(s.matrix, -1e-10,
                             "concurrence_of_assistance input");
  Mat sy(2, 2);
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  const Mat syy = kron(sy, sy);
  AssistanceValue out;
  out.printed = trace_norm(root * syy * root);
  out.conjugated = trace_norm(root * syy * root.conjugate());
  out.differ = std::abs(out.printed - out.conjugated) > 1e-10;
  return out;
}

namespace detail {

struct EoaTerms {
  double value = 0.0;  // sum_j [ -Tr sigma_j log2 sigma_j + p_j log2 p_j ]
};

inline double xlog2x(double x) {
  return x > 1e-300 ? x * std::log2(x) : 0.0;
}

inline double eoa_value(const Mat& sqrt_rho, const Mat& t) {
  const int d = static_cast<int>(std::lround(std::sqrt(double(t.rows()))));
  const Mat z = sqrt_rho * t;
  double f = 0.0;
  for (int j = 0; j < z.cols(); ++j) {
    const double p = z.col(j).squaredNorm();
    if (p <= kWeightFloor) continue;
    const Mat mt = matrixify(Vec(z.col(j)));
    Mat sigma = mt * mt.adjoint();
    hermitize(sigma);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    double ent = 0.0;
    for (int i = 0; i < d; ++i) ent -= xlog2x(std::max(es.eigenvalues()(i), 0.0));
    f += ent + xlog2x(p);
  }
  return f;
}

inline Mat eoa_gradient(const Mat& sqrt_rho, const Mat& t) {
  const int d = static_cast<int>(std::lround(std::sqrt(double(t.rows()))));
  const Mat z = sqrt_rho * t;
  Mat grad = Mat::Zero(t.rows(), t.cols());
  const double lam_floor = 1e-18;
  for (int j = 0; j < z.cols(); ++j) {
    const double p = z.col(j).squaredNorm();
    if (p <= kWeightFloor) continue;
    const Mat mt = matrixify(Vec(z.col(j)));
    Mat sigma = mt * mt.adjoint();
    hermitize(sigma);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    RVec loglam(d);
    for (int i = 0; i < d; ++i)
      loglam(i) = std::log2(std::max(es.eigenvalues()(i), lam_floor));
    const Mat log_sigma = es.eigenvectors() * loglam.asDiagonal() *
                          es.eigenvectors().adjoint();
    const Mat x = std::log2(p) * Mat::Identity(d, d) - log_sigma;
    grad.col(j) = 2.0 * (sqrt_rho * dematrixify(x * mt));
  }
  return grad;
}

}  // namespace detail

// Entanglement of assistance: the ensemble-maximal average entanglement
// entropy, estimated by multi-start minimization of the negated objective.
// Random starts only; the eigendecomposition start is an exact critical
// point with zero gradient for product eigenbases and would stall there.
inline double eoa_estimate(const BipartiteState& s, OptimizerConfig cfg = {},
                           int cardinality = 0) {
  const int d = s.d;
  const int m = d * d;
  const int k = cardinality > 0 ? cardinality : m;
  if (k < m)
    throw feasibility_error("eoa_estimate: cardinality below d^2");
  const Mat root = sqrtm_psd(s.matrix, -1e-10, "eoa_estimate input");
  const Objective f = [&root](const Mat& t, double) {
    return -detail::eoa_value(root, t);
  };
  const Gradient g = [&root](const Mat& t, double) {
    return -detail::eoa_gradient(root, t);
  };
  cfg.eps_start = cfg.eps_floor;  // objective is smooth where finite
  const OptimizerResult res = minimize(f, g, m, k, cfg);
  return -res.best_value;
}

}  // namespace ruchan
