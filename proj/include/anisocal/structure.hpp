#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "anisocal/set_kind.hpp"
#include "anisocal/tensors.hpp"

namespace anisocal::structure {

// Parameter layouts (all trainable, box-constrained):
//   G2:   [g1, g2, g3, phi1, phi2, phi3]
//         g in [0,1], phi1 in [0,pi], phi2 in [-pi/2,pi/2], phi3 in [-pi,pi]
//   G4/G6:[a1, th1, ph1, a2, th2, ph2, a3, th3, ph3]
//         a in [0,1], th in [0,pi], ph in [0,2pi]
//   Pair: two G2 blocks back to back (12 scalars)

struct ParamBox {
  std::vector<double> lo, hi;
};

/// Box constraints for the trainable structure parameters of a set kind.
ParamBox param_box(SetKind kind);

/// Three-angle rotation matrix used by the G2 ansatz and the sampler.
template <class T>
TMat3<T> rotation_from_angles(const T& p1, const T& p2, const T& p3) {
  using std::cos;
  using std::sin;
  const T c1 = cos(p1), s1 = sin(p1);
  const T c2 = cos(p2), s2 = sin(p2);
  const T c3 = cos(p3), s3 = sin(p3);
  TMat3<T> Q;
  Q(0, 0) = c1 * c2;
  Q(0, 1) = c1 * s2 * s3 - c3 * s1;
  Q(0, 2) = s1 * s3 + c1 * c3 * s2;
  Q(1, 0) = c2 * s1;
  Q(1, 1) = c1 * c3 + s1 * s2 * s3;
  Q(1, 2) = c3 * s1 * s2 - c1 * s3;
  Q(2, 0) = -s2;
  Q(2, 1) = c2 * s3;
  Q(2, 2) = c2 * c3;
  return Q;
}

/// Trace-one, positive semi-definite 2nd-order tensor from 6 parameters.
/// Smooth on the interior; assumes g1+g2+g3 > 0 (validated double entry
/// point below).
template <class T>
TSym3<T> g2_core(const T* p) {
  const T sum = p[0] + p[1] + p[2];
  const TMat3<T> Q = rotation_from_angles(p[3], p[4], p[5]);
  TSym3<T> G;
  for (int a = 0; a < 6; ++a) {
    static constexpr int vi[6] = {0, 1, 2, 1, 0, 0};
    static constexpr int vj[6] = {0, 1, 2, 2, 2, 1};
    const int i = vi[a], j = vj[a];
    T s = Q(i, 0) * p[0] * Q(j, 0);
    s += Q(i, 1) * p[1] * Q(j, 1);
    s += Q(i, 2) * p[2] * Q(j, 2);
    G[a] = s / sum;
  }
  return G;
}

/// The three generator vectors A_alpha = a * N(theta, phi) of the 4th/6th
/// order ansatz.
template <class T>
std::array<std::array<T, 3>, 3> builder_vectors(const T* p) {
  using std::cos;
  using std::sin;
  std::array<std::array<T, 3>, 3> A;
  for (int al = 0; al < 3; ++al) {
    const T a = p[3 * al + 0];
    const T th = p[3 * al + 1];
    const T ph = p[3 * al + 2];
    A[static_cast<std::size_t>(al)] = {a * sin(th) * cos(ph), a * sin(th) * sin(ph), a * cos(th)};
  }
  return A;
}

template <class T>
TVec6<T> dyad_mandel(const std::array<T, 3>& v) {
  TSym3<T> s;
  s[0] = v[0] * v[0];
  s[1] = v[1] * v[1];
  s[2] = v[2] * v[2];
  s[3] = v[1] * v[2];
  s[4] = v[0] * v[2];
  s[5] = v[0] * v[1];
  return to_mandel(s);
}

/// Mandel operator of the normalized 4th-order tensor: sum_a T_a T_a^T / n,
/// n = sum_a |A_a|^4. Also returns ghat = G:1 (Mandel vector).
template <class T>
void g4_core(const T* p, TMat66<T>& op, TVec6<T>& ghat) {
  const auto A = builder_vectors(p);
  TMat66<T> S{};
  T n(0.0);
  for (int al = 0; al < 3; ++al) {
    const TVec6<T> t = dyad_mandel(A[static_cast<std::size_t>(al)]);
    const T len2 = A[static_cast<std::size_t>(al)][0] * A[static_cast<std::size_t>(al)][0] +
                   A[static_cast<std::size_t>(al)][1] * A[static_cast<std::size_t>(al)][1] +
                   A[static_cast<std::size_t>(al)][2] * A[static_cast<std::size_t>(al)][2];
    n += len2 * len2;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) S(i, j) += t[i] * t[j];
  }
  const T inv = T(1.0) / n;
  for (int k = 0; k < 36; ++k) op.a[static_cast<std::size_t>(k)] = S.a[static_cast<std::size_t>(k)] * inv;
  const TVec6<T> one = to_mandel(sym3_identity<T>());
  ghat = matvec66(op, one);
}

/// Mandel trilinear form of the normalized 6th-order tensor:
/// W = sum_a T_a x T_a x T_a / n, n = sum_a |A_a|^6. Also W(1, ., .) and
/// W(1, 1, .).
template <class T>
void g6_core(const T* p, TW666<T>& w, TMat66<T>& m1, TVec6<T>& t1) {
  const auto A = builder_vectors(p);
  TW666<T> W{};
  T n(0.0);
  for (int al = 0; al < 3; ++al) {
    const TVec6<T> t = dyad_mandel(A[static_cast<std::size_t>(al)]);
    const T len2 = A[static_cast<std::size_t>(al)][0] * A[static_cast<std::size_t>(al)][0] +
                   A[static_cast<std::size_t>(al)][1] * A[static_cast<std::size_t>(al)][1] +
                   A[static_cast<std::size_t>(al)][2] * A[static_cast<std::size_t>(al)][2];
    n += len2 * len2 * len2;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) W(i, j, k) += t[i] * t[j] * t[k];
  }
  const T inv = T(1.0) / n;
  for (std::size_t k = 0; k < 216; ++k) w.a[k] = W.a[k] * inv;
  const TVec6<T> one = to_mandel(sym3_identity<T>());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      T s = w(0, i, j) * one[0];
      for (int k = 1; k < 6; ++k) s += w(k, i, j) * one[k];
      m1(i, j) = s;
    }
  t1 = matvec66(m1, one);
}

// Validated double entry points matching the spec contracts.

/// Throws DegenerateWeights when g1+g2+g3 < 1e-8.
Sym3 build_g2(std::span<const double> params);

/// Throws DegenerateVectors when the normalizer sum |A|^4 <= 1e-12.
Sym4Full build_g4(std::span<const double> params);

/// Throws DegenerateVectors when the normalizer sum |A|^6 <= 1e-12.
Sym6Full build_g6(std::span<const double> params);

// ---------------------------------------------------------------------------
// StructureSpec: parameters plus realized tensor values.
// ---------------------------------------------------------------------------

struct StructureSpec {
  SetKind kind = SetKind::Iso;
  std::vector<double> params;

  // realized values (filled by make_structure for the relevant kind)
  Sym3 g{};
  Sym3 g_second{};
  Sym4Full g4{};
  Sym6Full g6{};
};

StructureSpec make_structure(SetKind kind, std::vector<double> params);

// ---------------------------------------------------------------------------
// Symmetry classification
// ---------------------------------------------------------------------------

enum class SymmetryLabel {
  Isotropic,
  TransverselyIsotropic,
  Orthotropic,
  Tetragonal,
  Cubic,
  Hexagonal,
  Monoclinic,
  Triclinic,
  Indeterminate
};

std::string symmetry_name(SymmetryLabel s);

struct Classification {
  SymmetryLabel label = SymmetryLabel::Indeterminate;
  // diagnostics, all nonnegative
  std::array<double, 2> eig_gaps{};
  double w_norm = 0.0;
  double v1_norm = 0.0;
  double v2_norm = 0.0;
  std::array<double, 3> axis{};  // preferred axis when the label has one
};

/// Classify a realized structure. `tol` merges nearly equal eigenvalues /
/// vector lengths (relative); `pair_tol` is the two-orders-of-magnitude
/// threshold of the pair tests (|v_a| < pair_tol |w|, |w| < pair_tol scale).
Classification classify(const StructureSpec& spec, double tol = 0.05, double pair_tol = 0.02);

/// Pair classification directly from two realized tensors.
Classification classify_pair(const Sym3& g1, const Sym3& g2, double tol = 0.05,
                             double pair_tol = 0.02);

}  // namespace anisocal::structure
