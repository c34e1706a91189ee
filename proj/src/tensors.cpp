#include "anisocal/tensors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace anisocal {

namespace {
constexpr int kVi[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVj[6] = {0, 1, 2, 2, 2, 1};
}  // namespace

double frob(const Tangent4& A) {
  double s = 0.0;
  for (double x : A.a) s += x * x;
  return std::sqrt(s);
}

double frob(const Mat3& A) {
  double s = 0.0;
  for (double x : A.a) s += x * x;
  return std::sqrt(s);
}

double frob(const Sym3& A) {
  double s = A[0] * A[0] + A[1] * A[1] + A[2] * A[2] +
             2.0 * (A[3] * A[3] + A[4] * A[4] + A[5] * A[5]);
  return std::sqrt(s);
}

Kinematics kinematics(const Mat3& F) {
  const double J = det3(F);
  if (!(J > 1e-12)) throw NonInvertible("kinematics: det F <= 1e-12");
  Kinematics k;
  k.J = J;
  // C = F^T F
  for (int a = 0; a < 6; ++a) {
    const int i = kVi[a], j = kVj[a];
    k.C[a] = F(0, i) * F(0, j) + F(1, i) * F(1, j) + F(2, i) * F(2, j);
  }
  k.cofC = sym_part(cof3(to_mat(k.C)));
  k.E = (k.C - sym3_identity<double>()) * 0.5;
  return k;
}

Spectral spectral_sym3(const Sym3& S, double merge_tol) {
  Eigen::Matrix3d M;
  M << S[0], S[5], S[4], S[5], S[1], S[3], S[4], S[3], S[2];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  const Eigen::Vector3d lam = es.eigenvalues();
  const Eigen::Matrix3d V = es.eigenvectors();

  Spectral out;
  for (int i = 0; i < 3; ++i) {
    out.raw[static_cast<std::size_t>(i)] = lam(i);
    for (int r = 0; r < 3; ++r) out.axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = V(r, i);
  }

  const double spread = lam(2) - lam(0);
  const double scale = std::max(std::abs(lam(2)), std::abs(lam(0)));
  const double tol = (spread <= 1e-14 * std::max(1.0, scale))
                         ? std::numeric_limits<double>::infinity()
                         : merge_tol * spread;

  int g = -1;
  double last = 0.0;
  std::array<double, 3> sums{};
  std::array<int, 3> counts{};
  std::array<Sym3, 3> proj{};
  for (int i = 0; i < 3; ++i) {
    if (g < 0 || lam(i) - last > tol) {
      ++g;
      last = lam(i);
    }
    sums[static_cast<std::size_t>(g)] += lam(i);
    counts[static_cast<std::size_t>(g)] += 1;
    const Eigen::Vector3d v = V.col(i);
    Sym3& P = proj[static_cast<std::size_t>(g)];
    for (int a = 0; a < 6; ++a)
      P[a] += v(kVi[a]) * v(kVj[a]);
    last = lam(i);
  }
  out.n_groups = g + 1;
  for (int k = 0; k <= g; ++k) {
    out.lambda[static_cast<std::size_t>(k)] = sums[static_cast<std::size_t>(k)] / counts[static_cast<std::size_t>(k)];
    out.projector[static_cast<std::size_t>(k)] = proj[static_cast<std::size_t>(k)];
  }
  return out;
}

Vec6 voigt_stress(const Sym3& s) {
  Vec6 v;
  for (int a = 0; a < 6; ++a) v[a] = s[a];
  return v;
}

VoigtMat voigt_tangent(const Tangent4& c, double tol) {
  // minor symmetry check: c_{ijkl} = c_{jikl} = c_{ijlk}
  double scale = 0.0;
  for (double x : c.a) scale = std::max(scale, std::abs(x));
  double asym = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          asym = std::max(asym, std::abs(c(i, j, k, l) - c(j, i, k, l)));
          asym = std::max(asym, std::abs(c(i, j, k, l) - c(i, j, l, k)));
        }
  if (scale > 0.0 && asym > tol * scale)
    throw AsymmetryTooLarge("voigt_tangent: minor symmetry violated beyond tolerance");

  VoigtMat m;
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B)
      m(A, B) = c(kVi[A], kVj[A], kVi[B], kVj[B]);
  return m;
}

Tangent4 voigt_tangent_inverse(const VoigtMat& m) {
  Tangent4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = m(Sym3::sym_index(i, j), Sym3::sym_index(k, l));
  return c;
}

double frob(const VoigtMat& m) {
  double s = 0.0;
  for (double x : m.a) s += x * x;
  return std::sqrt(s);
}

Mat66 mandel_of_tangent(const Tangent4& c) {
  static const double w[6] = {1.0, 1.0, 1.0, kSqrt2, kSqrt2, kSqrt2};
  Mat66 m;
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B) {
      // symmetrize over the minor pairs so slightly asymmetric inputs are safe
      const int i = kVi[A], j = kVj[A], k = kVi[B], l = kVj[B];
      const double comp = 0.25 * (c(i, j, k, l) + c(j, i, k, l) + c(i, j, l, k) + c(j, i, l, k));
      m(A, B) = w[A] * w[B] * comp;
    }
  return m;
}

}  // namespace anisocal
