#include "anisocal/invariants.hpp"

#include <cmath>

#include "anisocal/invariants_cspace.hpp"

namespace anisocal::invariants {

namespace {
constexpr int kVi[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVj[6] = {0, 1, 2, 2, 2, 1};
constexpr double kWm[6] = {1.0, 1.0, 1.0, kSqrt2, kSqrt2, kSqrt2};

// tensor components of a Mandel 6x6 as a minor-symmetric 4th-order array
void mandel_to_comp(const Mat66& h, double out[3][3][3][3]) {
  for (int p = 0; p < 3; ++p)
    for (int j = 0; j < 3; ++j)
      for (int q = 0; q < 3; ++q)
        for (int l = 0; l < 3; ++l) {
          const int a = Sym3::sym_index(p, j);
          const int b = Sym3::sym_index(q, l);
          out[p][j][q][l] = h(a, b) / (kWm[a] * kWm[b]);
        }
}
}  // namespace

void chain_to_f(const CsetDeriv<double>& cs, const Mat3& F, int order, InvariantBundle& out) {
  const int n = static_cast<int>(cs.value.size());
  out.order = order;
  out.values = cs.value;
  out.dF.clear();
  out.ddF.clear();
  if (order < 1) return;
  out.dF.resize(static_cast<std::size_t>(n));
  if (order >= 2) out.ddF.resize(static_cast<std::size_t>(n));

  for (int a = 0; a < n; ++a) {
    const Sym3 D = from_mandel(cs.d[static_cast<std::size_t>(a)]);
    const Mat3 Dm = to_mat(D);
    // dI/dF = 2 F D
    Mat3& g = out.dF[static_cast<std::size_t>(a)];
    for (int i = 0; i < 3; ++i)
      for (int J = 0; J < 3; ++J)
        g(i, J) = 2.0 * (F(i, 0) * Dm(0, J) + F(i, 1) * Dm(1, J) + F(i, 2) * Dm(2, J));

    if (order >= 2) {
      double H[3][3][3][3];
      mandel_to_comp(cs.h[static_cast<std::size_t>(a)], H);
      Tangent4& A = out.ddF[static_cast<std::size_t>(a)];
      // A_{iJkL} = 2 d_ik D_JL + 4 F_iP F_kQ H_{PJ,QL}
      for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J)
          for (int k = 0; k < 3; ++k)
            for (int L = 0; L < 3; ++L) {
              double s = (i == k) ? 2.0 * Dm(J, L) : 0.0;
              double t = 0.0;
              for (int P = 0; P < 3; ++P) {
                double u = 0.0;
                for (int Q = 0; Q < 3; ++Q) u += F(k, Q) * H[P][J][Q][L];
                t += F(i, P) * u;
              }
              A(i, J, k, L) = s + 4.0 * t;
            }
    }
  }
}

InvariantBundle invariant_bundle(const Realized<double>& rs, const Mat3& F, int order) {
  const double j = det3(F);
  if (!(j > 1e-12)) throw NonInvertible("invariant_bundle: det F <= 1e-12");
  const Kinematics kin = kinematics(F);
  CsetDeriv<double> cs;
  eval_cspace(rs, kin.C, order, cs);
  InvariantBundle out;
  out.kind = rs.kind;
  chain_to_f(cs, F, order, out);
  return out;
}

InvariantBundle invariant_bundle(SetKind kind, const Mat3& F,
                                 const structure::StructureSpec& spec, int order) {
  if (spec.kind != kind && !(kind == SetKind::Iso || kind == SetKind::Coord))
    throw KindMismatch("invariant_bundle: spec kind does not match requested set");
  const Realized<double> rs = realize(kind, spec.params.data());
  return invariant_bundle(rs, F, order);
}

JBundle j_bundle(const Mat3& F, int order) {
  JBundle out;
  out.J = det3(F);
  if (!(out.J > 1e-12)) throw NonInvertible("j_bundle: det F <= 1e-12");
  if (order < 1) return out;
  const Mat3 Fi = inv3(F);
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J) out.dF(i, J) = out.J * Fi(J, i);
  if (order >= 2) {
    // d(J F^{-1}_{Ji}) / dF_{kL} = J (F^{-1}_{Lk} F^{-1}_{Ji} - F^{-1}_{Jk} F^{-1}_{Li})
    for (int i = 0; i < 3; ++i)
      for (int J = 0; J < 3; ++J)
        for (int k = 0; k < 3; ++k)
          for (int L = 0; L < 3; ++L)
            out.ddF(i, J, k, L) = out.J * (Fi(J, i) * Fi(L, k) - Fi(J, k) * Fi(L, i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference invariant sets (values only)
// ---------------------------------------------------------------------------

namespace {

double tr2(const Mat3& A, const Mat3& B) { return trace3(A * B); }

Sym3 dyad(const std::array<double, 3>& v) {
  Sym3 s;
  s[0] = v[0] * v[0]; s[1] = v[1] * v[1]; s[2] = v[2] * v[2];
  s[3] = v[1] * v[2]; s[4] = v[0] * v[2]; s[5] = v[0] * v[1];
  return s;
}

// H = (sum_a A_a^ox4) : X, unnormalized
Mat3 h_of_vectors4(const Sym3& X, const std::array<std::array<double, 3>, 3>& A, int count) {
  Mat3 h{};
  const Mat3 Xm = to_mat(X);
  for (int al = 0; al < count; ++al) {
    const auto& v = A[static_cast<std::size_t>(al)];
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        q += v[static_cast<std::size_t>(i)] * Xm(i, j) * v[static_cast<std::size_t>(j)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        h(i, j) += q * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  }
  return h;
}

// H = X : (sum_a A_a^ox6) : Y, unnormalized
Mat3 h_of_vectors6(const Sym3& X, const Sym3& Y, const std::array<std::array<double, 3>, 3>& A) {
  Mat3 h{};
  const Mat3 Xm = to_mat(X), Ym = to_mat(Y);
  for (const auto& v : A) {
    double qx = 0.0, qy = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        qx += v[static_cast<std::size_t>(i)] * Xm(i, j) * v[static_cast<std::size_t>(j)];
        qy += v[static_cast<std::size_t>(i)] * Ym(i, j) * v[static_cast<std::size_t>(j)];
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        h(i, j) += qx * qy * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  }
  return h;
}

std::vector<double> boehler_pair(const Sym3& C, const Sym3& A, const Sym3& B) {
  const Mat3 Cm = to_mat(C), Am = to_mat(A), Bm = to_mat(B);
  const Mat3 C2 = Cm * Cm, A2 = Am * Am, B2 = Bm * Bm;
  std::vector<double> v;
  v.push_back(trace3(Cm));
  v.push_back(trace_cof_sym(C));
  v.push_back(det_sym(C));
  v.push_back(tr2(Cm, Am));
  v.push_back(tr2(C2, Am));
  v.push_back(tr2(Cm, A2));
  v.push_back(tr2(C2, A2));
  v.push_back(tr2(Cm, Bm));
  v.push_back(tr2(C2, Bm));
  v.push_back(tr2(Cm, B2));
  v.push_back(tr2(C2, B2));
  v.push_back(trace3(Cm * Am * Bm));
  return v;
}

}  // namespace

std::vector<double> reference_invariants(ReferenceGroup group, const Sym3& C,
                                         const ReferenceStructure& rs) {
  const Mat3 Cm = to_mat(C);
  const Mat3 C2 = Cm * Cm;
  std::vector<double> v;
  auto iso3 = [&] {
    v.push_back(trace3(Cm));
    v.push_back(trace_cof_sym(C));
    v.push_back(det_sym(C));
  };

  switch (group) {
    case ReferenceGroup::Triclinic:
    case ReferenceGroup::Monoclinic:
      return boehler_pair(C, rs.A, rs.B);

    case ReferenceGroup::OrthotropicDyads: {
      iso3();
      const Mat3 G1 = to_mat(dyad(rs.a1));
      const Mat3 G2 = to_mat(dyad(rs.a2));
      v.push_back(tr2(G1, Cm));
      v.push_back(tr2(G1, C2));
      v.push_back(tr2(G2, Cm));
      v.push_back(tr2(G2, C2));
      return v;
    }

    case ReferenceGroup::OrthotropicSingle:
    case ReferenceGroup::TransverselyIsotropic: {
      iso3();
      const Mat3 G = to_mat(rs.G);
      const Mat3 G2 = G * G;
      v.push_back(tr2(G, Cm));   // T4 / R4
      v.push_back(tr2(G, C2));   // T5 / R5
      v.push_back(tr2(G2, Cm));  // T6 / R6
      v.push_back(tr2(G2, C2));  // T7 / R7
      return v;
    }

    case ReferenceGroup::Tetragonal: {
      iso3();
      const std::array<std::array<double, 3>, 3> A{rs.a1, rs.a2, rs.a3};
      const Mat3 H1 = h_of_vectors4(C, A, 2);
      const Mat3 H2 = h_of_vectors4(sym_part(C2), A, 2);
      const Mat3 H1sq = H1 * H1, H2sq = H2 * H2;
      v.push_back(trace3(H1));            // U4
      v.push_back(trace3(H1sq));          // U5
      v.push_back(trace3(H1sq * H1));     // U6
      v.push_back(trace3(H2));            // U7
      v.push_back(trace3(H2sq));          // U8
      v.push_back(trace3(H2sq * H2));     // U9
      v.push_back(tr2(C2, H1));           // U10
      v.push_back(tr2(C2, H1sq));         // U11
      v.push_back(tr2(Cm, H2sq));         // U12
      v.push_back(trace3(H1sq * H2sq));   // U13
      return v;
    }

    case ReferenceGroup::Cubic: {
      iso3();
      const std::array<std::array<double, 3>, 3> A{rs.a1, rs.a2, rs.a3};
      const Mat3 H1 = h_of_vectors4(C, A, 3);
      const Mat3 H2 = h_of_vectors4(sym_part(C2), A, 3);
      const Mat3 H1sq = H1 * H1, H2sq = H2 * H2;
      v.push_back(trace3(H1sq));          // V4
      v.push_back(trace3(H1sq * H1));     // V5
      v.push_back(trace3(H2sq));          // V6
      v.push_back(trace3(H2sq * H2));     // V7
      v.push_back(tr2(C2, H1));           // V8
      v.push_back(tr2(C2, H1sq));         // V9
      v.push_back(tr2(Cm, H2sq));         // V10
      v.push_back(trace3(H1sq * H2sq));   // V11
      return v;
    }

    case ReferenceGroup::Hexagonal: {
      iso3();
      const std::array<std::array<double, 3>, 3> A{rs.a1, rs.a2, rs.a3};
      const Sym3 C2s = sym_part(C2);
      const Mat3 H1 = h_of_vectors6(C, C, A);
      const Mat3 H2 = h_of_vectors6(C2s, C2s, A);
      const Mat3 M = to_mat(dyad(rs.N));
      const Mat3 H1sq = H1 * H1, H2sq = H2 * H2;
      v.push_back(trace3(H1));           // W4
      v.push_back(trace3(H1sq));         // W5
      v.push_back(trace3(H1sq * H1));    // W6
      v.push_back(trace3(H2));           // W7
      v.push_back(trace3(H2sq));         // W8
      v.push_back(trace3(H2sq * H2));    // W9
      v.push_back(tr2(Cm, M));           // W10
      v.push_back(tr2(C2, M));           // W11
      v.push_back(tr2(Cm, H1));          // W12
      v.push_back(tr2(C2, H1));          // W13
      v.push_back(tr2(Cm, H1sq));        // W14
      v.push_back(tr2(C2, H1sq));        // W15
      v.push_back(tr2(Cm, H2));          // W16
      v.push_back(tr2(C2, H2));          // W17
      v.push_back(tr2(Cm, H2sq));        // W18
      v.push_back(tr2(C2, H2sq));        // W19
      v.push_back(trace3(H1 * H2));      // W20
      v.push_back(trace3(H1sq * H2));    // W21
      v.push_back(trace3(H1 * H2sq));    // W22
      v.push_back(trace3(H1sq * H2sq));  // W23
      v.push_back(trace3(Cm * H1 * H2)); // W24
      return v;
    }
  }
  throw UnsupportedGroup("reference_invariants: unsupported group");
}

}  // namespace anisocal::invariants
