#pragma once

// Pure-state ensembles of a bipartite density matrix via the square-root
// parameterization Z = rho^{1/2} T with right-unitary T, the quadratic-form
// family A_i = rho^{1/2} (tau_i (x) 1) rho^{1/2} whose diagonal zeros certify
// decompositions into maximally entangled states, a constructive rotation
// scheme that zeroes the diagonal of a traceless Hermitian matrix, and a
// closed-form two-qubit certificate based on the eigenvalue decomposition.

#include "ruchan/core.hpp"
#include "ruchan/gellmann.hpp"
#include "ruchan/qstate.hpp"

namespace ruchan {

inline constexpr double kWeightFloor = 1e-14;

// Maximal entanglement test: the reduction of |psi><psi| onto the first
// factor must be maximally mixed.  The equivalent coordinate test (vanishing
// tau expectations) is evaluated as a cross-check; the two are tied by
// || (<psi|tau_i (x) 1|psi>)_i ||_2 = sqrt(2) * || Tr_2 psi psi^dag - I/d ||_F.
inline bool is_max_entangled(const Vec& psi, double tol = 1e-10) {
  const int n = static_cast<int>(psi.size());
  const int d = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (d < 2 || d * d != n)
    throw shape_error("is_max_entangled: length is not d^2 with d >= 2");
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw precondition_error("is_max_entangled: vector is not normalized");
  const Mat mt = matrixify(psi);
  const Mat red = mt * mt.adjoint();
  const double defect = dist_to_maximally_mixed(red);

  double coord_sq = 0.0;
  for (const auto& e : gellmann_basis(d)) {
    const double t = (red * e.matrix).trace().real();
    coord_sq += t * t;
  }
  if (std::abs(std::sqrt(coord_sq) - std::sqrt(2.0) * defect) > 1e-10)
    throw numerical_error("is_max_entangled: equivalent criteria disagree");
  return defect <= tol;
}

// The d^2-1 Hermitian matrices A_i = rho^{1/2} (tau_i (x) 1) rho^{1/2}.
// A right-unitary T with diag(T^dag A_i T) = 0 for all i exhibits rho as a
// mixture of maximally entangled states.
struct ProblemInstance {
  int d = 0;
  Mat sqrt_rho;        // (d^2) x (d^2)
  std::vector<Mat> a;  // d^2-1 matrices, canonical basis order
};

inline ProblemInstance build_problem_p(const BipartiteState& s) {
  const int d = s.d;
  const Mat root = sqrtm_psd(s.matrix, -1e-10, "build_problem_p input");
  ProblemInstance inst;
  inst.d = d;
  inst.sqrt_rho = root;
  const Mat eye = Mat::Identity(d, d);
  inst.a.reserve(static_cast<std::size_t>(d) * d - 1);
  for (const auto& e : gellmann_basis(d))
    inst.a.push_back(root * kron(e.matrix, eye) * root);
  return inst;
}

// Square-root factor of an ensemble: Z = rho^{1/2} T, columns sqrt(p_j)|psi_j>.
struct EnsembleFactor {
  int d = 0;
  Mat sqrt_rho;
  Mat t;  // d^2 x K, orthonormal rows
  Mat z;  // d^2 x K
};

struct EnsembleMember {
  double weight = 0.0;
  Vec state;               // normalized, unset when negligible
  bool negligible = false; // weight below kWeightFloor
};

inline EnsembleFactor ensemble_factor(const BipartiteState& s, const Mat& t) {
  const int d = s.d;
  const int m = d * d;
  if (t.rows() != m)
    throw shape_error("ensemble_factor: T must have d^2 rows");
  if (t.cols() < m)
    throw feasibility_error(
        "ensemble_factor: cardinality below d^2; rows cannot be orthonormal");
  if ((t * t.adjoint() - Mat::Identity(m, m)).norm() > 1e-8)
    throw feasibility_error("ensemble_factor: T T^dag != identity");
  EnsembleFactor f;
  f.d = d;
  f.sqrt_rho = sqrtm_psd(s.matrix, -1e-10, "ensemble_factor input");
  f.t = t;
  f.z = f.sqrt_rho * t;
  return f;
}

// Extract the weighted pure states.  Weights below kWeightFloor are kept in
// the list (so indices line up with T's columns) but flagged negligible.
inline std::vector<EnsembleMember> ensemble_from(const BipartiteState& s,
                                                 const Mat& t) {
  const EnsembleFactor f = ensemble_factor(s, t);
  std::vector<EnsembleMember> out(static_cast<std::size_t>(f.z.cols()));
  for (int j = 0; j < f.z.cols(); ++j) {
    const double w = f.z.col(j).squaredNorm();
    auto& mbr = out[static_cast<std::size_t>(j)];
    mbr.weight = w;
    if (w <= kWeightFloor) {
      mbr.negligible = true;
    } else {
      mbr.state = f.z.col(j) / std::sqrt(w);
    }
  }
  return out;
}

namespace detail {

// Unitary Givens rotation in the (p, q) plane that zeroes the p-th diagonal
// entry of the Hermitian block [[a, c], [conj(c), b]] with a > 0 > b.
// Returns {cos t, e^{-i phi} sin t} defining the first rotated column.
inline std::pair<double, cplx> zero_rotation(double a, double b, cplx c) {
  const double phi = (std::abs(c) == 0.0) ? 0.0 : std::arg(c);
  const double half_sum = 0.5 * (a + b);
  const double half_diff = 0.5 * (a - b);
  const double r = std::hypot(half_diff, std::abs(c));
  // ab < 0 gives r >= |half_sum|, so the equation r cos(2t - s) = -half_sum
  // always has a solution.
  double gamma = (r == 0.0) ? 0.0 : -half_sum / r;
  gamma = std::clamp(gamma, -1.0, 1.0);
  const double s = std::atan2(std::abs(c), half_diff);
  const double theta = 0.5 * (s + std::acos(gamma));
  return {std::cos(theta), std::polar(std::sin(theta), -phi)};
}

}  // namespace detail

struct OffDiagResult {
  Mat t;              // unitary with diag(T^dag A T) ~ 0
  int rotations = 0;  // at most n-1
};

// Constructively rotate a traceless Hermitian matrix to zero diagonal.
// Each step pairs the most positive diagonal entry with the most negative
// one and annihilates the smaller-magnitude entry with a complex Givens
// rotation confined to that plane, so previously zeroed entries stay zero
// and at most n-1 rotations are needed.
inline OffDiagResult off_diagonalize(const Mat& a_in, double tol = 1e-13) {
  Mat m = require_hermitian(a_in, 1e-10, "off_diagonalize input");
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, m.norm());
  if (std::abs(m.trace().real()) > 1e-10 * scale)
    throw precondition_error("off_diagonalize: input is not traceless");

  Mat t = Mat::Identity(n, n);
  int rotations = 0;
  for (int step = 0; step < n; ++step) {
    int p = 0, q = 0;
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double di = m(i, i).real();
      if (di > mx) { mx = di; p = i; }
      if (di < mn) { mn = di; q = i; }
    }
    if (std::max(std::abs(mx), std::abs(mn)) <= tol * scale) break;
    if (!(mx > 0.0 && mn < 0.0))
      throw numerical_error("off_diagonalize: pivot lost positivity split");

    // Zero the smaller-magnitude member of the pair.
    if (std::abs(mx) > std::abs(mn)) std::swap(p, q);
    const double a = m(p, p).real();
    const double b = m(q, q).real();
    const auto [ct, st] = detail::zero_rotation(a, b, m(p, q));

    Mat g = Mat::Identity(n, n);
    g(p, p) = ct;
    g(q, p) = st;           // e^{-i phi} sin t
    g(p, q) = -std::conj(st);
    g(q, q) = ct;
    m = (g.adjoint() * m * g).eval();
    m(p, p) = 0.0;  // analytic zero; scrub the roundoff residue
    t = (t * g).eval();
    ++rotations;
  }
  return {std::move(t), rotations};
}

// Two-qubit certificate: eigendecompose rho, form W = U diag(sqrt lambda),
// and report max_i max_j |(W^dag (tau_i (x) 1) W)_jj|.  States that are
// mixtures of maximally entangled states admit an eigenbasis of maximally
// entangled vectors, so the value vanishes for them.
//
// Degenerate spectra need care: a generic eigensolver picks arbitrary
// eigenvectors inside a degenerate block.  In the Bell-type basis
//   e1=(|00>+|11>)/sqrt2, e2=i(|00>-|11>)/sqrt2,
//   e3=i(|01>+|10>)/sqrt2, e4=(|01>-|10>)/sqrt2
// a state with both reductions maximally mixed is real symmetric, and any
// real eigenvector in that basis maps back to a maximally entangled state.
// When the input is real symmetric in this basis (within 1e-8 relative) the
// eigendecomposition is done there over the reals, which hands every
// degenerate block maximally entangled eigenvectors for free.
inline double qubit_eigen_offdiag_check(const BipartiteState& s) {
  if (s.d != 2)
    throw domain_error("qubit_eigen_offdiag_check: defined for d = 2 only");
  const Mat rho = require_hermitian(s.matrix, 1e-10,
                                    "qubit_eigen_offdiag_check input");
  const Mat half = Mat::Identity(2, 2) * 0.5;
  const double defect = std::max((ptrace_first(rho, 2, 2) - half).norm(),
                                 (ptrace_second(rho, 2, 2) - half).norm());
  if (defect > 1e-10)
    throw precondition_error(
        "qubit_eigen_offdiag_check: both reductions must equal identity/2 "
        "(defect " + std::to_string(defect) + ")");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat magic(4, 4);
  const cplx i1(0.0, 1.0);
  magic.col(0) << 1, 0, 0, 1;
  magic.col(1) << i1, 0, 0, -i1;
  magic.col(2) << 0, i1, i1, 0;
  magic.col(3) << 0, 1, -1, 0;
  magic *= inv_sqrt2;

  const Mat in_magic = magic.adjoint() * rho * magic;
  const double scale = std::max(1.0, rho.norm());
  const double asym = in_magic.imag().norm();

  Mat u;   // eigenvectors (columns)
  RVec lam;
  if (asym <= 1e-8 * scale) {
    Eigen::SelfAdjointEigenSolver<RMat> es(in_magic.real());
    if (es.info() != Eigen::Success)
      throw numerical_error("qubit_eigen_offdiag_check: eigensolver failed");
    u = magic * es.eigenvectors().cast<cplx>();
    lam = es.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    if (es.info() != Eigen::Success)
      throw numerical_error("qubit_eigen_offdiag_check: eigensolver failed");
    u = es.eigenvectors();
    lam = es.eigenvalues();
  }

  Mat w = u;
  for (int j = 0; j < 4; ++j) w.col(j) *= std::sqrt(std::max(lam(j), 0.0));

  double worst = 0.0;
  const Mat eye = Mat::Identity(2, 2);
  for (const auto& e : gellmann_basis(2)) {
    const Mat q = w.adjoint() * kron(e.matrix, eye) * w;
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(q(j, j)));
  }
  return worst;
}

}  // namespace ruchan
