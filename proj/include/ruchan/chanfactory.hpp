#pragma once

// Constructions of channels as Choi states: random CP maps of prescribed
// Kraus rank, multiplicative projections onto the trace-preserving and unital
// constraint sets with the alternating-projection generator for random doubly
// stochastic maps, reference channels, and Kraus-operator independence tests
// for extremality of CPT and doubly stochastic maps.

#include "ruchan/core.hpp"
#include "ruchan/qstate.hpp"

#include <string>

namespace ruchan {

// Choi state B B^dag / Tr[B B^dag] with B a d^2 x rank Ginibre matrix.
// Almost surely of Kraus rank exactly `rank`.
inline BipartiteState random_cp(int d, int rank, std::uint64_t seed) {
  if (d < 2) throw shape_error("random_cp: need d >= 2");
  if (rank < 1 || rank > d * d)
    throw shape_error("random_cp: rank must lie in 1..d^2");
  Rng rng(seed);
  const Mat b = rng.gaussian(d * d, rank);
  Mat choi = b * b.adjoint();
  hermitize(choi);
  choi /= choi.trace().real();
  return {d, std::move(choi)};
}

// Conjugate by 1 (x) G with G = (d Tr_1 rho)^{-1/2}: maps the CP cone onto
// the trace-preserving slice (Tr_1 = I/d exactly, hence unit trace), keeps
// positivity and never increases the Kraus rank.  Idempotent.
inline BipartiteState project_tp(const BipartiteState& s) {
  const int d = s.d;
  const Mat rho = require_hermitian(s.matrix, 1e-10, "project_tp input");
  const Mat g = inv_sqrtm_psd(static_cast<double>(d) * ptrace_first(rho, d, d),
                              1e-14, "project_tp reduction");
  Mat out = kron(Mat::Identity(d, d), g) * rho *
            kron(Mat::Identity(d, d), g);
  hermitize(out);
  return {d, std::move(out)};
}

// Conjugate by G (x) 1 with G = (d Tr_2 rho)^{-1/2}: same construction for
// the unital slice (Tr_2 = I/d exactly).
inline BipartiteState project_unital(const BipartiteState& s) {
  const int d = s.d;
  const Mat rho = require_hermitian(s.matrix, 1e-10, "project_unital input");
  const Mat g = inv_sqrtm_psd(static_cast<double>(d) * ptrace_second(rho, d, d),
                              1e-14, "project_unital reduction");
  Mat out = kron(g, Mat::Identity(d, d)) * rho *
            kron(g, Mat::Identity(d, d));
  hermitize(out);
  return {d, std::move(out)};
}

struct PocsTrace {
  int iterations = 0;  // full tp+unital sweeps
  std::vector<std::pair<double, double>> defects;  // (dist_tp, dist_unital)
  bool converged = false;
};

// Random doubly stochastic map of prescribed Kraus rank: alternate the two
// projections from a random CP seed until both reduction defects fall below
// tol (Frobenius).  Rank is preserved along the way.
inline std::pair<BipartiteState, PocsTrace> random_doubly_stochastic(
    int d, int rank, std::uint64_t seed, double tol = 1e-10,
    int max_iters = 500) {
  BipartiteState s = random_cp(d, rank, seed);
  PocsTrace trace;
  for (int it = 0; it < max_iters; ++it) {
    s = project_tp(s);
    s = project_unital(s);
    ++trace.iterations;
    const double dt = dist_to_maximally_mixed(ptrace_first(s.matrix, d, d));
    const double du = dist_to_maximally_mixed(ptrace_second(s.matrix, d, d));
    trace.defects.emplace_back(dt, du);
    if (std::max(dt, du) <= tol) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged)
    throw numerical_error(
        "random_doubly_stochastic: alternating projections did not reach "
        "tolerance within the iteration budget");
  return {std::move(s), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Reference channels.

inline KrausChannel example_identity(int d) {
  if (d < 2) throw shape_error("example_identity: need d >= 2");
  return {d, {Mat::Identity(d, d)}};
}

// Replaces every input by |0><0|; Choi is |0><0| (x) I/d.
inline KrausChannel example_loss(int d) {
  if (d < 2) throw shape_error("example_loss: need d >= 2");
  std::vector<Mat> kraus;
  for (int i = 0; i < d; ++i) {
    Mat k = Mat::Zero(d, d);
    k(0, i) = 1.0;
    kraus.push_back(std::move(k));
  }
  return {d, std::move(kraus)};
}

// Depolarizing channel rho -> (1-p) rho + p I/d written as the uniform
// mixture of the d^2 discrete Weyl unitaries, so it is random unitary by
// construction.
inline KrausChannel example_depolarizing(int d, double p) {
  if (d < 2) throw shape_error("example_depolarizing: need d >= 2");
  if (p < 0.0 || p > 1.0)
    throw domain_error("example_depolarizing: p must lie in [0, 1]");
  Mat shift = Mat::Zero(d, d);   // X |i> = |i+1 mod d>
  for (int i = 0; i < d; ++i) shift((i + 1) % d, i) = 1.0;
  Mat clock = Mat::Zero(d, d);   // Z |i> = w^i |i>
  for (int i = 0; i < d; ++i)
    clock(i, i) = std::polar(1.0, 2.0 * kPi * i / d);
  std::vector<Mat> kraus;
  for (int a = 0; a < d; ++a) {
    Mat xa = Mat::Identity(d, d);
    for (int t = 0; t < a; ++t) xa = (shift * xa).eval();
    for (int b = 0; b < d; ++b) {
      Mat zb = Mat::Identity(d, d);
      for (int t = 0; t < b; ++t) zb = (clock * zb).eval();
      const double w = (a == 0 && b == 0)
                           ? 1.0 - p + p / (d * d)
                           : p / (d * d);
      kraus.push_back(std::sqrt(w) * xa * zb);
    }
  }
  return {d, std::move(kraus)};
}

// Spin-j irreducible channel rho -> sum_k J_k rho J_k / (j(j+1)) with
// j = (d-1)/2; defined for odd d >= 3.  Extremal among doubly stochastic
// maps yet not a mixture of unitaries.
inline KrausChannel example_landau_streater(int d) {
  if (d < 3 || d % 2 == 0)
    throw shape_error("example_landau_streater: need odd d >= 3");
  const double j = 0.5 * (d - 1);
  Mat jp = Mat::Zero(d, d);  // raising operator, basis ordered m = j .. -j
  for (int k = 1; k < d; ++k)
    jp(k - 1, k) = std::sqrt(static_cast<double>(k) * (2.0 * j - k + 1.0));
  const Mat jm = jp.adjoint();
  Mat j3 = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) j3(k, k) = j - k;
  const double norm = std::sqrt(j * (j + 1.0));
  std::vector<Mat> kraus;
  kraus.push_back((jp + jm) / (2.0 * norm));
  kraus.push_back((jp - jm) / (cplx(0.0, 2.0) * norm));
  kraus.push_back(j3 / norm);
  return {d, std::move(kraus)};
}

// Mixture sum_i p_i U_i rho U_i^dag with Haar-like unitaries (polar factors
// of Ginibre matrices) and full-support random weights.
inline KrausChannel random_unitary_mixture(int d, int count,
                                           std::uint64_t seed) {
  if (d < 2) throw shape_error("random_unitary_mixture: need d >= 2");
  if (count < 1) throw shape_error("random_unitary_mixture: need count >= 1");
  Rng rng(seed);
  const RVec w = rng.weights(count);
  std::vector<Mat> kraus;
  for (int i = 0; i < count; ++i) {
    const Mat g = rng.gaussian(d, d);
    Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat u = svd.matrixU() * svd.matrixV().adjoint();
    kraus.push_back(std::sqrt(w(i)) * u);
  }
  return {d, std::move(kraus)};
}

// Dispatcher used by the CLI.  `param` feeds the depolarizing strength,
// `count` the mixture size.
inline KrausChannel example_channel(const std::string& kind, int d,
                                    double param = 1.0, int count = 2,
                                    std::uint64_t seed = 12345) {
  if (kind == "identity") return example_identity(d);
  if (kind == "loss") return example_loss(d);
  if (kind == "depolarizing") return example_depolarizing(d, param);
  if (kind == "landau_streater" || kind == "landau-streater")
    return example_landau_streater(d);
  if (kind == "random_unitary_mixture" || kind == "unitary-mixture")
    return random_unitary_mixture(d, count, seed);
  throw parse_error("example_channel: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Extremality via Kraus-product independence.

struct ExtremalityResult {
  bool independent = false;
  int rank = 0;    // numerical rank of the stacked family
  int needed = 0;  // R^2
};

namespace detail {

// Numerical rank of a family of matrices, each flattened to a row; the
// threshold is sigma_max * count * 1e-10.
inline ExtremalityResult family_rank(const std::vector<Vec>& rows) {
  const int n = static_cast<int>(rows.size());
  Mat stack(n, rows.front().size());
  for (int i = 0; i < n; ++i) stack.row(i) = rows[static_cast<std::size_t>(i)];
  Eigen::JacobiSVD<Mat> svd(stack);
  const RVec sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double thresh = smax * n * 1e-10;
  ExtremalityResult res;
  res.needed = n;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++res.rank;
  res.independent = (smax > 0.0) && (res.rank == n);
  return res;
}

}  // namespace detail

// A CPT map with Kraus operators {K_k} is extremal among CPT maps iff the
// R^2 products {K_k^dag K_l} are linearly independent.
inline ExtremalityResult extremal_cpt_check(const KrausChannel& ch) {
  const int r = static_cast<int>(ch.kraus.size());
  if (r < 1) throw shape_error("extremal_cpt_check: empty channel");
  std::vector<Vec> rows;
  rows.reserve(static_cast<std::size_t>(r) * r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l)
      rows.push_back(dematrixify(ch.kraus[static_cast<std::size_t>(k)].adjoint() *
                                 ch.kraus[static_cast<std::size_t>(l)]));
  return detail::family_rank(rows);
}

// A doubly stochastic map is extremal in the doubly stochastic set iff the
// R^2 block pairs K_k K_l^dag (+) K_l^dag K_k are linearly independent.
inline ExtremalityResult extremal_unital_cpt_check(const KrausChannel& ch) {
  const int r = static_cast<int>(ch.kraus.size());
  if (r < 1) throw shape_error("extremal_unital_cpt_check: empty channel");
  const int d = ch.d;
  std::vector<Vec> rows;
  rows.reserve(static_cast<std::size_t>(r) * r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) {
      const Mat a = ch.kraus[static_cast<std::size_t>(k)] *
                    ch.kraus[static_cast<std::size_t>(l)].adjoint();
      const Mat b = ch.kraus[static_cast<std::size_t>(l)].adjoint() *
                    ch.kraus[static_cast<std::size_t>(k)];
      Vec row(2 * d * d);
      row.head(d * d) = dematrixify(a);
      row.tail(d * d) = dematrixify(b);
      rows.push_back(std::move(row));
    }
  return detail::family_rank(rows);
}

// ---------------------------------------------------------------------------
// Saturation experiment: how often random channels at the critical Kraus
// rank are extremal.

struct SaturationRow {
  int d = 0;
  std::string branch;  // "cpt" or "unital"
  int rank = 0;        // Kraus rank sampled
  int trials = 0;
  int extremal = 0;
  int failures = 0;    // trials discarded for non-convergence
  double fraction = 0.0;
};

// CPT branch: random rank-d CPT maps (single exact projection), tested with
// the CPT criterion.  Unital branch: random doubly stochastic maps at rank
// floor(sqrt(2) * d), tested with the doubly stochastic criterion.  The
// alternating projections run at 1e-12 so that residual infeasibility stays
// well below the independence threshold.
inline std::vector<SaturationRow> saturation_experiment(int d_max, int trials,
                                                        std::uint64_t seed) {
  if (d_max < 2) throw shape_error("saturation_experiment: need d_max >= 2");
  if (trials < 1) throw shape_error("saturation_experiment: need trials >= 1");
  std::vector<SaturationRow> rows;
  for (int d = 2; d <= d_max; ++d) {
    SaturationRow cpt;
    cpt.d = d;
    cpt.branch = "cpt";
    cpt.rank = d;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t s =
          mix_seed(seed, (static_cast<std::uint64_t>(d) << 32) |
                             static_cast<std::uint64_t>(2 * t));
      const BipartiteState choi = project_tp(random_cp(d, d, s));
      const auto res = extremal_cpt_check(kraus_of(choi));
      ++cpt.trials;
      if (res.independent) ++cpt.extremal;
    }
    cpt.fraction = cpt.trials ? double(cpt.extremal) / cpt.trials : 0.0;
    rows.push_back(std::move(cpt));

    SaturationRow uni;
    uni.d = d;
    uni.branch = "unital";
    uni.rank = static_cast<int>(std::floor(std::sqrt(2.0) * d));
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t s =
          mix_seed(seed, (static_cast<std::uint64_t>(d) << 32) |
                             static_cast<std::uint64_t>(2 * t + 1));
      try {
        const auto [choi, trace] =
            random_doubly_stochastic(d, uni.rank, s, 1e-12, 500);
        const auto res = extremal_unital_cpt_check(kraus_of(choi));
        ++uni.trials;
        if (res.independent) ++uni.extremal;
      } catch (const numerical_error&) {
        ++uni.failures;
      }
    }
    uni.fraction = uni.trials ? double(uni.extremal) / uni.trials : 0.0;
    rows.push_back(std::move(uni));
  }
  return rows;
}

}  // namespace ruchan
