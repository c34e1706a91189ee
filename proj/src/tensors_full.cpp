#include <algorithm>
#include <array>

#include "anisocal/tensors.hpp"

namespace anisocal {

namespace {

// Multiset index tables built once: sorted tuples enumerated lexicographically.
struct Sym4Tables {
  int idx[3][3][3][3];
  Sym4Tables() {
    int count = 0;
    int lex[3][3][3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int k = j; k < 3; ++k)
          for (int l = k; l < 3; ++l) lex[i][j][k][l] = count++;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            std::array<int, 4> s{i, j, k, l};
            std::sort(s.begin(), s.end());
            idx[i][j][k][l] = lex[s[0]][s[1]][s[2]][s[3]];
          }
  }
};

struct Sym6Tables {
  std::array<int, 729> idx;
  Sym6Tables() {
    int count = 0;
    int lex[3][3][3][3][3][3] = {};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int k = j; k < 3; ++k)
          for (int l = k; l < 3; ++l)
            for (int m = l; m < 3; ++m)
              for (int n = m; n < 3; ++n) lex[i][j][k][l][m][n] = count++;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            for (int m = 0; m < 3; ++m)
              for (int n = 0; n < 3; ++n) {
                std::array<int, 6> s{i, j, k, l, m, n};
                std::sort(s.begin(), s.end());
                idx[static_cast<std::size_t>(((((i * 3 + j) * 3 + k) * 3 + l) * 3 + m) * 3 + n)] =
                    lex[s[0]][s[1]][s[2]][s[3]][s[4]][s[5]];
              }
  }
};

const Sym4Tables& sym4_tables() {
  static const Sym4Tables t;
  return t;
}

const Sym6Tables& sym6_tables() {
  static const Sym6Tables t;
  return t;
}

constexpr int kVi[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVj[6] = {0, 1, 2, 2, 2, 1};
constexpr double kW[6] = {1.0, 1.0, 1.0, kSqrt2, kSqrt2, kSqrt2};

}  // namespace

int Sym4Full::index(int i, int j, int k, int l) { return sym4_tables().idx[i][j][k][l]; }

double Sym4Full::generalized_trace() const {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) s += (*this)(k, k, l, l);
  return s;
}

double Sym4Full::quad_form(const Sym3& S) const {
  const Mat3 Sm = to_mat(S);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += Sm(i, j) * (*this)(i, j, k, l) * Sm(k, l);
  return s;
}

Mat66 Sym4Full::mandel_op() const {
  Mat66 m;
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B)
      m(A, B) = kW[A] * kW[B] * (*this)(kVi[A], kVj[A], kVi[B], kVj[B]);
  return m;
}

int Sym6Full::index(int i, int j, int k, int l, int m, int n) {
  return sym6_tables().idx[static_cast<std::size_t>(((((i * 3 + j) * 3 + k) * 3 + l) * 3 + m) * 3 + n)];
}

double Sym6Full::generalized_trace() const {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m) s += (*this)(k, k, l, l, m, m);
  return s;
}

double Sym6Full::quad_form(const Sym3& S, const std::array<double, 3>& A) const {
  const Mat3 Sm = to_mat(S);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
              s += Sm(i, j) * A[static_cast<std::size_t>(k)] * (*this)(i, j, k, l, m, n) *
                   Sm(l, m) * A[static_cast<std::size_t>(n)];
  return s;
}

W666 Sym6Full::mandel_form() const {
  W666 w;
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B)
      for (int C = 0; C < 6; ++C)
        w(A, B, C) = kW[A] * kW[B] * kW[C] *
                     (*this)(kVi[A], kVj[A], kVi[B], kVj[B], kVi[C], kVj[C]);
  return w;
}

}  // namespace anisocal
