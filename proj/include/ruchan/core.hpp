#pragma once

// Shared scalar/matrix aliases, error taxonomy, deterministic sampling and
// small dense-matrix helpers used throughout the library.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ruchan {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. Everything the library throws derives from ruchan::error,
// so callers can map library failures to a single exit path.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed sizes (non-square, mismatched dimensions, d < 2).
struct shape_error : error {
  using error::error;
};
// Input violates a documented mathematical precondition (not PSD, not
// traceless, not unitary, wrong rank, ...).
struct precondition_error : error {
  using error::error;
};
// A feasibility constraint of an algorithm cannot be met (K < rank, ...).
struct feasibility_error : error {
  using error::error;
};
// Scalar argument outside the mathematical domain of a formula.
struct domain_error : error {
  using error::error;
};
// Non-finite values or irrecoverable loss of precision at runtime.
struct numerical_error : error {
  using error::error;
};
// Malformed input files / unknown schema.
struct parse_error : error {
  using error::error;
};

// ---------------------------------------------------------------------------
// Deterministic sampling.
//
// std::normal_distribution is implementation-defined, so reproducible output
// across standard libraries requires rolling the Gaussian transform by hand.
// Box-Muller over 53-bit uniforms from mt19937_64 is bit-stable everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (one value per draw keeps the stream
  // layout independent of call parity).
  double gauss() {
    const double u = uniform_pos();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
  }

  cplx cgauss() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  // Matrix with i.i.d. standard complex Gaussian entries (Ginibre ensemble).
  Mat gaussian(int rows, int cols) {
    Mat g(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) g(i, j) = cgauss();
    return g;
  }

  // Probability vector with a full-support Dirichlet(1,...,1)-like law
  // (normalized exponentials).
  RVec weights(int n) {
    RVec w(n);
    for (int i = 0; i < n; ++i) w(i) = -std::log(uniform_pos());
    w /= w.sum();
    return w;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 step; used to derive independent per-restart seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Dense helpers.

inline void hermitize(Mat& a) { a = ((a + a.adjoint()) / 2.0).eval(); }

// Deterministic eigenvector gauge: rotate the global phase so the first
// component of non-negligible magnitude is real positive.  Reports stay
// byte-stable under eigensolver phase freedom.
inline void fix_phase(Eigen::Ref<Vec> v, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > tol) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

inline double hermiticity_defect(const Mat& a) {
  return (a - a.adjoint()).norm();
}

// Symmetrize within tolerance, throw beyond it.  Most state-consuming
// operations funnel their inputs through this.
inline Mat require_hermitian(const Mat& a, double tol = 1e-10,
                             const char* what = "matrix") {
  if (a.rows() != a.cols())
    throw shape_error(std::string(what) + ": not square");
  const double scale = std::max(1.0, a.norm());
  if (hermiticity_defect(a) > tol * scale)
    throw precondition_error(std::string(what) + ": not Hermitian");
  Mat h = a;
  hermitize(h);
  return h;
}

// Trace out the first tensor factor of a (d1*d2)x(d1*d2) matrix, leaving a
// d2 x d2 matrix on the second factor.  Index convention: row i1*d2+i2.
inline Mat ptrace_first(const Mat& rho, int d1, int d2) {
  Mat out = Mat::Zero(d2, d2);
  for (int k = 0; k < d1; ++k)
    out += rho.block(k * d2, k * d2, d2, d2);
  return out;
}

// Trace out the second tensor factor, leaving a d1 x d1 matrix on the first.
inline Mat ptrace_second(const Mat& rho, int d1, int d2) {
  Mat out = Mat::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < d2; ++k) s += rho(i * d2 + k, j * d2 + k);
      out(i, j) = s;
    }
  return out;
}

// Eigendecomposition-based PSD square root.  Eigenvalues below zero are
// clipped at 0 provided they exceed `clip` (default -1e-10); anything more
// negative is a genuine positivity violation.
inline Mat sqrtm_psd(const Mat& h_in, double clip = -1e-10,
                     const char* what = "matrix") {
  Mat h = require_hermitian(h_in, 1e-10, what);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    throw numerical_error(std::string(what) + ": eigensolver failed");
  RVec lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < clip * scale)
      throw precondition_error(std::string(what) + ": not positive semidefinite");
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

// (H)^{-1/2} for positive definite H; eigenvalues are floored at
// floor_rel * lambda_max to keep near-singular inputs from exploding.
inline Mat inv_sqrtm_psd(const Mat& h_in, double floor_rel = 1e-14,
                         const char* what = "matrix") {
  Mat h = require_hermitian(h_in, 1e-10, what);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    throw numerical_error(std::string(what) + ": eigensolver failed");
  RVec lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (lmax <= 0.0)
    throw precondition_error(std::string(what) + ": not positive definite");
  RVec inv(lam.size());
  for (int i = 0; i < lam.size(); ++i)
    inv(i) = 1.0 / std::sqrt(std::max(lam(i), floor_rel * lmax));
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// Schatten-1 norm (sum of singular values).
inline double trace_norm(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().sum();
}

// Frobenius distance to the maximally mixed state of matching size.
inline double dist_to_maximally_mixed(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  return (a - Mat::Identity(d, d) / static_cast<double>(d)).norm();
}

inline bool is_finite(const Mat& a) { return a.allFinite(); }

// Kronecker product; thin wrapper so call sites stay uniform.
inline Mat kron(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace ruchan
