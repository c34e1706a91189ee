#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "anisocal/errors.hpp"

namespace anisocal {

inline constexpr double kSqrt2 = 1.4142135623730950488;

// ---------------------------------------------------------------------------
// Small dense 3D tensor types, templated on the scalar so the structure-tensor
// parameter tangents can be pushed through with Dual scalars. Storage is flat
// by value, no dynamic shapes.
// ---------------------------------------------------------------------------

template <class T>
struct TMat3 {
  std::array<T, 9> a{};
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }
};

/// Symmetric 3x3, components stored in (11,22,33,23,13,12) order.
template <class T>
struct TSym3 {
  std::array<T, 6> a{};
  T& operator[](int k) { return a[static_cast<std::size_t>(k)]; }
  const T& operator[](int k) const { return a[static_cast<std::size_t>(k)]; }

  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(sym_index(i, j))]; }

  static int sym_index(int i, int j) {
    if (i == j) return i;
    const int s = i + j;  // 23->5? no: pairs {1,2}->3, {0,2}->4, {0,1}->5
    if (s == 3) return 3;  // (1,2)
    if (s == 2) return 4;  // (0,2)
    return 5;              // (0,1)
  }
};

/// Mandel 6-vector: (S11, S22, S33, sqrt2*S23, sqrt2*S13, sqrt2*S12).
template <class T>
struct TVec6 {
  std::array<T, 6> a{};
  T& operator[](int k) { return a[static_cast<std::size_t>(k)]; }
  const T& operator[](int k) const { return a[static_cast<std::size_t>(k)]; }
};

/// Mandel 6x6 operator on Sym3 (row-major).
template <class T>
struct TMat66 {
  std::array<T, 36> a{};
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(6 * i + j)]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(6 * i + j)]; }
};

/// Symmetric trilinear form on Sym3 in Mandel coordinates (6x6x6).
template <class T>
struct TW666 {
  std::array<T, 216> a{};
  T& operator()(int i, int j, int k) { return a[static_cast<std::size_t>((i * 6 + j) * 6 + k)]; }
  const T& operator()(int i, int j, int k) const {
    return a[static_cast<std::size_t>((i * 6 + j) * 6 + k)];
  }
};

using Mat3 = TMat3<double>;
using Sym3 = TSym3<double>;
using Vec6 = TVec6<double>;
using Mat66 = TMat66<double>;
using W666 = TW666<double>;

// ---------------------------------------------------------------------------
// Basic algebra
// ---------------------------------------------------------------------------

template <class T>
TMat3<T> mat3_identity() {
  TMat3<T> r;
  r(0, 0) = T(1.0); r(1, 1) = T(1.0); r(2, 2) = T(1.0);
  return r;
}

inline Mat3 eye3() { return mat3_identity<double>(); }

template <class T>
TSym3<T> sym3_identity() {
  TSym3<T> r;
  r[0] = T(1.0); r[1] = T(1.0); r[2] = T(1.0);
  return r;
}

template <class T>
TMat3<T> operator*(const TMat3<T>& A, const TMat3<T>& B) {
  TMat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s = A(i, 0) * B(0, j);
      s += A(i, 1) * B(1, j);
      s += A(i, 2) * B(2, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
TMat3<T> operator+(const TMat3<T>& A, const TMat3<T>& B) {
  TMat3<T> r;
  for (int k = 0; k < 9; ++k) r.a[k] = A.a[k] + B.a[k];
  return r;
}

template <class T>
TMat3<T> operator-(const TMat3<T>& A, const TMat3<T>& B) {
  TMat3<T> r;
  for (int k = 0; k < 9; ++k) r.a[k] = A.a[k] - B.a[k];
  return r;
}

template <class T, class S>
TMat3<T> operator*(const TMat3<T>& A, S s) {
  TMat3<T> r;
  for (int k = 0; k < 9; ++k) r.a[k] = A.a[k] * s;
  return r;
}

template <class T>
TMat3<T> transpose(const TMat3<T>& A) {
  TMat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = A(j, i);
  return r;
}

template <class T>
T det3(const TMat3<T>& A) {
  return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
         A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
         A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

template <class T>
T trace3(const TMat3<T>& A) { return A(0, 0) + A(1, 1) + A(2, 2); }

/// cof(A) = det(A) A^{-T}, evaluated as the matrix of 2x2 minors.
template <class T>
TMat3<T> cof3(const TMat3<T>& A) {
  TMat3<T> r;
  r(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  r(0, 1) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  r(0, 2) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  r(1, 0) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  r(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  r(1, 2) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  r(2, 0) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  r(2, 1) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  r(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return r;
}

template <class T>
TMat3<T> inv3(const TMat3<T>& A) {
  const T d = det3(A);
  const TMat3<T> c = cof3(A);
  TMat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = c(j, i) / d;
  return r;
}

// ---------------------------------------------------------------------------
// Sym3 helpers
// ---------------------------------------------------------------------------

template <class T>
TMat3<T> to_mat(const TSym3<T>& S) {
  TMat3<T> r;
  r(0, 0) = S[0]; r(1, 1) = S[1]; r(2, 2) = S[2];
  r(1, 2) = S[3]; r(2, 1) = S[3];
  r(0, 2) = S[4]; r(2, 0) = S[4];
  r(0, 1) = S[5]; r(1, 0) = S[5];
  return r;
}

/// Symmetric part of a general matrix as Sym3.
template <class T>
TSym3<T> sym_part(const TMat3<T>& A) {
  TSym3<T> r;
  r[0] = A(0, 0); r[1] = A(1, 1); r[2] = A(2, 2);
  r[3] = (A(1, 2) + A(2, 1)) * 0.5;
  r[4] = (A(0, 2) + A(2, 0)) * 0.5;
  r[5] = (A(0, 1) + A(1, 0)) * 0.5;
  return r;
}

template <class T>
TSym3<T> operator+(const TSym3<T>& A, const TSym3<T>& B) {
  TSym3<T> r;
  for (int k = 0; k < 6; ++k) r[k] = A[k] + B[k];
  return r;
}

template <class T>
TSym3<T> operator-(const TSym3<T>& A, const TSym3<T>& B) {
  TSym3<T> r;
  for (int k = 0; k < 6; ++k) r[k] = A[k] - B[k];
  return r;
}

template <class T, class S>
TSym3<T> operator*(const TSym3<T>& A, S s) {
  TSym3<T> r;
  for (int k = 0; k < 6; ++k) r[k] = A[k] * s;
  return r;
}

template <class T>
T trace_sym(const TSym3<T>& S) { return S[0] + S[1] + S[2]; }

/// A.B for symmetric A, B (result is general, use sym_part when A,B commute).
template <class T>
TMat3<T> mul_sym(const TSym3<T>& A, const TSym3<T>& B) {
  return to_mat(A) * to_mat(B);
}

/// X^2 for symmetric X (symmetric result).
template <class T>
TSym3<T> square_sym(const TSym3<T>& X) {
  return sym_part(mul_sym(X, X));
}

template <class T>
T ddot_sym(const TSym3<T>& A, const TSym3<T>& B) {
  return A[0] * B[0] + A[1] * B[1] + A[2] * B[2] +
         (A[3] * B[3] + A[4] * B[4] + A[5] * B[5]) * 2.0;
}

template <class T>
T det_sym(const TSym3<T>& S) { return det3(to_mat(S)); }

/// tr(cof S) evaluated from 2x2 minors (polynomial, no inverse).
template <class T>
T trace_cof_sym(const TSym3<T>& S) {
  return (S[1] * S[2] - S[3] * S[3]) + (S[0] * S[2] - S[4] * S[4]) +
         (S[0] * S[1] - S[5] * S[5]);
}

template <class T>
TSym3<T> cof_sym(const TSym3<T>& S) {
  return sym_part(cof3(to_mat(S)));
}

// ---------------------------------------------------------------------------
// Mandel maps. vec6/mat66 represent Sym3 vectors and minor-symmetric operators
// in an orthonormal basis, so contractions become plain dot/matrix products.
// ---------------------------------------------------------------------------

template <class T>
TVec6<T> to_mandel(const TSym3<T>& S) {
  TVec6<T> r;
  r[0] = S[0]; r[1] = S[1]; r[2] = S[2];
  r[3] = S[3] * kSqrt2; r[4] = S[4] * kSqrt2; r[5] = S[5] * kSqrt2;
  return r;
}

template <class T>
TSym3<T> from_mandel(const TVec6<T>& v) {
  TSym3<T> r;
  r[0] = v[0]; r[1] = v[1]; r[2] = v[2];
  r[3] = v[3] * (1.0 / kSqrt2); r[4] = v[4] * (1.0 / kSqrt2); r[5] = v[5] * (1.0 / kSqrt2);
  return r;
}

template <class T>
T dot6(const TVec6<T>& a, const TVec6<T>& b) {
  T s = a[0] * b[0];
  for (int k = 1; k < 6; ++k) s += a[k] * b[k];
  return s;
}

template <class T>
TVec6<T> operator+(const TVec6<T>& a, const TVec6<T>& b) {
  TVec6<T> r;
  for (int k = 0; k < 6; ++k) r[k] = a[k] + b[k];
  return r;
}

template <class T, class S>
TVec6<T> operator*(const TVec6<T>& a, S s) {
  TVec6<T> r;
  for (int k = 0; k < 6; ++k) r[k] = a[k] * s;
  return r;
}

template <class T>
TVec6<T> matvec66(const TMat66<T>& A, const TVec6<T>& x) {
  TVec6<T> r;
  for (int i = 0; i < 6; ++i) {
    T s = A(i, 0) * x[0];
    for (int j = 1; j < 6; ++j) s += A(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

template <class T>
TMat66<T> matmul66(const TMat66<T>& A, const TMat66<T>& B) {
  TMat66<T> r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      T s = A(i, 0) * B(0, j);
      for (int k = 1; k < 6; ++k) s += A(i, k) * B(k, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
TMat66<T> operator+(const TMat66<T>& A, const TMat66<T>& B) {
  TMat66<T> r;
  for (int k = 0; k < 36; ++k) r.a[k] = A.a[k] + B.a[k];
  return r;
}

template <class T, class S>
TMat66<T> operator*(const TMat66<T>& A, S s) {
  TMat66<T> r;
  for (int k = 0; k < 36; ++k) r.a[k] = A.a[k] * s;
  return r;
}

template <class T>
TMat66<T> transpose66(const TMat66<T>& A) {
  TMat66<T> r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = A(j, i);
  return r;
}

template <class T>
TMat66<T> outer66(const TVec6<T>& a, const TVec6<T>& b) {
  TMat66<T> r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = a[i] * b[j];
  return r;
}

template <class T>
TMat66<T> identity66() {
  TMat66<T> r;
  for (int i = 0; i < 6; ++i) r(i, i) = T(1.0);
  return r;
}

/// Mandel matrix of the self-adjoint operator Y -> X.Y + Y.X (X symmetric).
template <class T>
TMat66<T> smul_op(const TSym3<T>& X) {
  // representative index pairs for each Mandel slot
  static constexpr int vi[6] = {0, 1, 2, 1, 0, 0};
  static constexpr int vj[6] = {0, 1, 2, 2, 2, 1};
  static constexpr double w[6] = {1.0, 1.0, 1.0, kSqrt2, kSqrt2, kSqrt2};
  const TMat3<T> Xm = to_mat(X);
  TMat66<T> r;
  for (int a = 0; a < 6; ++a) {
    const int i = vi[a], j = vj[a];
    for (int b = 0; b < 6; ++b) {
      const int k = vi[b], l = vj[b];
      // tensor components of the operator, minor-symmetrized in (k,l):
      // O_{ij,kl} = 1/2 [ X_ik d_jl + X_il d_jk + d_ik X_jl + d_il X_jk ]
      T comp = (Xm(i, k) * double(j == l) + Xm(i, l) * double(j == k) +
                Xm(j, l) * double(i == k) + Xm(j, k) * double(i == l)) * 0.5;
      r(a, b) = comp * (w[a] * w[b]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// 4th-order tangent in full 3x3x3x3 storage, A_{iJkL}, double only.
// ---------------------------------------------------------------------------

struct Tangent4 {
  std::array<double, 81> a{};
  double& operator()(int i, int J, int k, int L) {
    return a[static_cast<std::size_t>(((i * 3 + J) * 3 + k) * 3 + L)];
  }
  const double& operator()(int i, int J, int k, int L) const {
    return a[static_cast<std::size_t>(((i * 3 + J) * 3 + k) * 3 + L)];
  }
  Tangent4& operator+=(const Tangent4& o) {
    for (int k = 0; k < 81; ++k) a[static_cast<std::size_t>(k)] += o.a[static_cast<std::size_t>(k)];
    return *this;
  }
  Tangent4& axpy(double s, const Tangent4& o) {
    for (int k = 0; k < 81; ++k) a[static_cast<std::size_t>(k)] += s * o.a[static_cast<std::size_t>(k)];
    return *this;
  }
};

double frob(const Tangent4& A);
double frob(const Mat3& A);
double frob(const Sym3& A);

// ---------------------------------------------------------------------------
// Kinematics
// ---------------------------------------------------------------------------

struct Kinematics {
  Sym3 C;     // right Cauchy-Green, F^T F
  double J;   // det F
  Sym3 cofC;  // det(C) C^{-T}
  Sym3 E;     // Green-Lagrange, (C-1)/2
};

/// Throws NonInvertible when det F <= 1e-12.
Kinematics kinematics(const Mat3& F);

// ---------------------------------------------------------------------------
// Spectral decomposition with eigenvalue merging (double only)
// ---------------------------------------------------------------------------

struct Spectral {
  int n_groups = 0;                  // number of distinct (merged) eigenvalues
  std::array<double, 3> lambda{};    // merged eigenvalues, ascending, first n_groups valid
  std::array<Sym3, 3> projector{};   // eigenprojectors, first n_groups valid
  std::array<double, 3> raw{};       // raw eigenvalues ascending
  std::array<std::array<double, 3>, 3> axes{};  // raw eigenvectors (columns), axes[i] is i-th
};

/// Eigenvalues closer than merge_tol * (lambda_max - lambda_min) are merged
/// into one group; the group eigenvalue is the mean, the projector the sum of
/// the member dyads.
Spectral spectral_sym3(const Sym3& S, double merge_tol);

// ---------------------------------------------------------------------------
// Voigt maps (order 11,22,33,23,13,12; raw components, no factor-2 scaling)
// ---------------------------------------------------------------------------

struct VoigtMat {
  std::array<double, 36> a{};
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(6 * i + j)]; }
  const double& operator()(int i, int j) const { return a[static_cast<std::size_t>(6 * i + j)]; }
};

Vec6 voigt_stress(const Sym3& s);

/// Raw-component Voigt matrix of a minor-symmetric 4th-order tensor.
/// Throws AsymmetryTooLarge when minor symmetry is violated beyond 1e-6
/// relative.
VoigtMat voigt_tangent(const Tangent4& c, double tol = 1e-6);

/// Inverse map; fills all components by minor symmetry.
Tangent4 voigt_tangent_inverse(const VoigtMat& m);

double frob(const VoigtMat& m);

/// Mandel 6x6 of a minor-symmetric tangent (for inversion-quality maps).
Mat66 mandel_of_tangent(const Tangent4& c);

// ---------------------------------------------------------------------------
// Fully symmetric 4th/6th order tensors: one stored component per index
// multiset, symmetry exact by storage.
// ---------------------------------------------------------------------------

/// 15 independent components, indexed by sorted (i<=j<=k<=l) over {0,1,2}.
struct Sym4Full {
  std::array<double, 15> a{};
  static int index(int i, int j, int k, int l);
  double operator()(int i, int j, int k, int l) const { return a[static_cast<std::size_t>(index(i, j, k, l))]; }
  double& at(int i, int j, int k, int l) { return a[static_cast<std::size_t>(index(i, j, k, l))]; }
  /// G_KKLL (= G_KLKL = G_KLLK by full symmetry).
  double generalized_trace() const;
  /// S : G : S for symmetric S.
  double quad_form(const Sym3& S) const;
  /// Mandel operator X -> G : X.
  Mat66 mandel_op() const;
};

/// 28 independent components, indexed by sorted 6-tuples over {0,1,2}.
struct Sym6Full {
  std::array<double, 28> a{};
  static int index(int i, int j, int k, int l, int m, int n);
  double operator()(int i, int j, int k, int l, int m, int n) const {
    return a[static_cast<std::size_t>(index(i, j, k, l, m, n))];
  }
  double& at(int i, int j, int k, int l, int m, int n) {
    return a[static_cast<std::size_t>(index(i, j, k, l, m, n))];
  }
  double generalized_trace() const;  // G_KKLLMM
  /// S_IJ A_K G_IJKLMN S_LM A_N for symmetric S and vector A.
  double quad_form(const Sym3& S, const std::array<double, 3>& A) const;
  /// Symmetric trilinear Mandel form W(x, y, z).
  W666 mandel_form() const;
};

}  // namespace anisocal
