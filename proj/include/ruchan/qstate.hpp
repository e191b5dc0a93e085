#pragma once

// Bipartite states on C^d (x) C^d, Choi representations of channels, Kraus
// extraction, duals, and the reshape between vectors on the product space and
// d x d coefficient matrices.
//
// Tensor index convention: |i,j> = |i> (x) |j> sits at component i*d + j.
// Factor 1 is the channel output side, factor 2 the input side, so for a
// Choi state trace-preserving reads Tr_1 Phi = I/d and unital reads
// Tr_2 Phi = I/d.

#include "ruchan/core.hpp"
#include "ruchan/gellmann.hpp"

namespace ruchan {

// Unit-trace positive semidefinite operator on C^d (x) C^d.  Kept as plain
// data; operations that need PSD/trace guarantees validate on entry.
struct BipartiteState {
  int d = 0;      // local dimension
  Mat matrix;     // (d^2) x (d^2)
};

inline BipartiteState make_state(int d, Mat m) {
  if (d < 2) throw shape_error("make_state: need d >= 2");
  if (m.rows() != d * d || m.cols() != d * d)
    throw shape_error("make_state: matrix is not d^2 x d^2");
  return {d, std::move(m)};
}

// Channel in Kraus form, Phi(rho) = sum_k K_k rho K_k^dag.
struct KrausChannel {
  int d = 0;
  std::vector<Mat> kraus;

  Mat apply(const Mat& rho) const {
    Mat out = Mat::Zero(d, d);
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  }
  // sum K^dag K = I
  bool is_trace_preserving(double tol = 1e-10) const {
    Mat s = Mat::Zero(d, d);
    for (const auto& k : kraus) s += k.adjoint() * k;
    return (s - Mat::Identity(d, d)).norm() <= tol;
  }
  // sum K K^dag = I
  bool is_unital(double tol = 1e-10) const {
    Mat s = Mat::Zero(d, d);
    for (const auto& k : kraus) s += k * k.adjoint();
    return (s - Mat::Identity(d, d)).norm() <= tol;
  }
};

inline KrausChannel make_channel(int d, std::vector<Mat> kraus) {
  if (d < 2) throw shape_error("make_channel: need d >= 2");
  if (kraus.empty()) throw shape_error("make_channel: no Kraus operators");
  for (const auto& k : kraus)
    if (k.rows() != d || k.cols() != d)
      throw shape_error("make_channel: Kraus operator is not d x d");
  return {d, std::move(kraus)};
}

// |I> = (1/sqrt d) sum_i |i,i>, the normalized maximally entangled vector.
inline Vec max_entangled_vector(int d) {
  if (d < 2) throw shape_error("max_entangled_vector: need d >= 2");
  Vec v = Vec::Zero(d * d);
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) v(i * d + i) = c;
  return v;
}

// Coefficient matrix of |psi> = sum_ij a_ij |i,j>: matrixify(psi)(i,j) = a_ij.
// Frobenius norm equals the vector norm; the reduced state on factor 1 is
// psi_tilde psi_tilde^dag; singular values are the Schmidt coefficients.
inline Mat matrixify(const Vec& psi) {
  const int n = static_cast<int>(psi.size());
  const int d = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (d < 2 || d * d != n)
    throw shape_error("matrixify: length is not a square d^2 with d >= 2");
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = psi(i * d + j);
  return m;
}

// Inverse reshape.
inline Vec dematrixify(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d || d < 2) throw shape_error("dematrixify: not square");
  Vec v(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v(i * d + j) = m(i, j);
  return v;
}

// Choi state of a channel: (Phi (x) id) |I><I| = (1/d) sum_k vec(K_k)vec(K_k)^dag
// written with the matrixification above, i.e. unit trace iff the channel is
// trace-preserving.
inline BipartiteState choi_of(const KrausChannel& ch) {
  const int d = ch.d;
  if (d < 2) throw shape_error("choi_of: need d >= 2");
  Mat choi = Mat::Zero(d * d, d * d);
  const double c = 1.0 / static_cast<double>(d);
  for (const auto& k : ch.kraus) {
    const Vec v = dematrixify(k);
    choi += c * (v * v.adjoint());
  }
  return {d, std::move(choi)};
}

// Kraus operators from a Choi state: eigendecompose, keep eigenvalues above
// the relative rank cutoff d^2 * eps * lambda_max, and rescale so that
// choi_of(kraus_of(Phi)) = Phi.  Negative eigenvalues beyond -1e-10 (relative)
// mean the input is not a CP map.
inline KrausChannel kraus_of(const BipartiteState& s) {
  const int d = s.d;
  const Mat choi = require_hermitian(s.matrix, 1e-10, "kraus_of input");
  Eigen::SelfAdjointEigenSolver<Mat> es(choi);
  if (es.info() != Eigen::Success)
    throw numerical_error("kraus_of: eigensolver failed");
  const RVec lam = es.eigenvalues();
  const double lmax = std::max(lam.cwiseAbs().maxCoeff(), 0.0);
  if (lam.minCoeff() < -1e-10 * std::max(1.0, lmax))
    throw precondition_error("kraus_of: Choi matrix is not positive semidefinite");
  const double cutoff =
      static_cast<double>(d) * d * std::numeric_limits<double>::epsilon() * lmax;
  std::vector<Mat> kraus;
  for (int i = static_cast<int>(lam.size()) - 1; i >= 0; --i) {
    if (lam(i) <= cutoff) continue;
    Vec v = es.eigenvectors().col(i);
    fix_phase(v);
    kraus.push_back(std::sqrt(static_cast<double>(d) * lam(i)) * matrixify(v));
  }
  if (kraus.empty())
    throw precondition_error("kraus_of: Choi matrix is numerically zero");
  return {d, std::move(kraus)};
}

// Dual (adjoint) channel: K_k -> K_k^dag.  Swaps the trace-preserving and
// unital properties.
inline KrausChannel dual_channel(const KrausChannel& ch) {
  std::vector<Mat> kraus;
  kraus.reserve(ch.kraus.size());
  for (const auto& k : ch.kraus) kraus.push_back(k.adjoint().eval());
  return {ch.d, std::move(kraus)};
}

struct StateFlags {
  bool is_psd = false;
  bool trace_preserving = false;  // Tr_1 = I/d within tol (Frobenius)
  bool unital = false;            // Tr_2 = I/d within tol
  bool in_doubly_stochastic = false;  // both reductions maximally mixed
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  double dist_tp = 0.0;      // || Tr_1 - I/d ||_F
  double dist_unital = 0.0;  // || Tr_2 - I/d ||_F
};

// Classify a bipartite state as the Choi state of a CP / CPT / unital map.
// The flags are computed independently and reported separately.
inline StateFlags classify(const BipartiteState& s, double tol = 1e-8) {
  const int d = s.d;
  const Mat rho = require_hermitian(s.matrix, 1e-10, "classify input");
  StateFlags f;
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.info() != Eigen::Success)
    throw numerical_error("classify: eigensolver failed");
  f.min_eigenvalue = es.eigenvalues().minCoeff();
  f.trace = rho.trace().real();
  f.is_psd = f.min_eigenvalue >= -tol;
  f.dist_tp = dist_to_maximally_mixed(ptrace_first(rho, d, d));
  f.dist_unital = dist_to_maximally_mixed(ptrace_second(rho, d, d));
  f.trace_preserving = f.dist_tp <= tol;
  f.unital = f.dist_unital <= tol;
  f.in_doubly_stochastic = f.trace_preserving && f.unital;
  return f;
}

}  // namespace ruchan
