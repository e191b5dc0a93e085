#pragma once

// Generalized Gell-Mann basis for traceless Hermitian d x d matrices,
// Bloch (coherence-vector) coordinates, and the real rotation induced on
// those coordinates by unitary conjugation.
//
// Normalization: Tr[tau_i tau_j] = 2 delta_ij, so the d = 2 basis is exactly
// {sigma_x, sigma_y, sigma_z} and d = 3 reproduces the eight Gell-Mann
// matrices.  Together with tau_0 = sqrt(2/d) * I the set is a complete
// orthogonal basis of Hermitian d x d matrices.

#include "ruchan/core.hpp"

namespace ruchan {

enum class TauKind { x, y, z };

struct BasisElement {
  int index = 0;  // 1 .. d^2-1, position in the canonical ordering
  TauKind kind = TauKind::x;
  int k = 0;  // x/y: first index of the (k,l) pair; z: the k parameter
  int l = 0;  // x/y: second index; unused for z
  Mat matrix;
};

// Canonical ordering: all tau_{x;kl} with (k,l) lexicographic (k < l), then
// all tau_{y;kl} in the same order, then tau_{z;k} for k = 1 .. d-1.
inline std::vector<BasisElement> gellmann_basis(int d) {
  if (d < 2) throw domain_error("gellmann_basis: need d >= 2");
  std::vector<BasisElement> out;
  out.reserve(static_cast<std::size_t>(d) * d - 1);
  int idx = 1;
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      Mat m = Mat::Zero(d, d);
      m(k, l) = 1.0;
      m(l, k) = 1.0;
      out.push_back({idx++, TauKind::x, k, l, std::move(m)});
    }
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      Mat m = Mat::Zero(d, d);
      m(l, k) = cplx(0.0, 1.0);
      m(k, l) = cplx(0.0, -1.0);
      out.push_back({idx++, TauKind::y, k, l, std::move(m)});
    }
  for (int k = 1; k < d; ++k) {
    Mat m = Mat::Zero(d, d);
    const double c = std::sqrt(2.0 / (static_cast<double>(k) * k + k));
    for (int i = 0; i < k; ++i) m(i, i) = c;
    m(k, k) = -c * static_cast<double>(k);
    out.push_back({idx++, TauKind::z, k, 0, std::move(m)});
  }
  return out;
}

// Completion element tau_0 = sqrt(2/d) * identity.
inline Mat gellmann_tau0(int d) {
  if (d < 2) throw domain_error("gellmann_tau0: need d >= 2");
  return std::sqrt(2.0 / d) * Mat::Identity(d, d);
}

struct BlochVector {
  int d = 0;
  RVec entries;  // length d^2-1, canonical basis order
};

// Coordinates rho_i = Tr[rho tau_i] / 2.  Requires Hermitian input (within
// 1e-10, symmetrized before expanding); entries are then exactly real.
inline BlochVector bloch_vector(const Mat& rho_in) {
  const Mat rho = require_hermitian(rho_in, 1e-10, "bloch_vector input");
  const int d = static_cast<int>(rho.rows());
  const auto basis = gellmann_basis(d);
  BlochVector bv;
  bv.d = d;
  bv.entries.resize(d * d - 1);
  for (const auto& e : basis)
    bv.entries(e.index - 1) = 0.5 * (e.matrix * rho).trace().real();
  return bv;
}

// Inverse expansion: rho = (Tr[rho]/d) I + sum_i v_i tau_i.
inline Mat bloch_reconstruct(const BlochVector& bv, double trace = 1.0) {
  const int d = bv.d;
  if (bv.entries.size() != d * d - 1)
    throw shape_error("bloch_reconstruct: entry count != d^2-1");
  Mat rho = (trace / d) * Mat::Identity(d, d);
  const auto basis = gellmann_basis(d);
  for (const auto& e : basis) rho += bv.entries(e.index - 1) * e.matrix;
  return rho;
}

// Real orthogonal image of conjugation: O(j,i) = Tr[U tau_i U^dag tau_j] / 2,
// the block acting on traceless coordinates (the tau_0 direction is fixed and
// decoupled, so it is omitted).  Satisfies bloch(U rho U^dag) = O * bloch(rho)
// and O O^T = identity.
inline RMat conjugation_rotation(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  if (u.cols() != d) throw shape_error("conjugation_rotation: not square");
  if ((u.adjoint() * u - Mat::Identity(d, d)).norm() > 1e-10)
    throw feasibility_error("conjugation_rotation: input not unitary");
  const auto basis = gellmann_basis(d);
  const int n = d * d - 1;
  RMat o(n, n);
  for (const auto& ei : basis) {
    const Mat rotated = u * ei.matrix * u.adjoint();
    for (const auto& ej : basis)
      o(ej.index - 1, ei.index - 1) =
          0.5 * (rotated * ej.matrix).trace().real();
  }
  return o;
}

}  // namespace ruchan
