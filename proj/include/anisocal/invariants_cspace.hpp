#pragma once

// Template body of eval_cspace: every supported invariant with closed-form
// first and second derivatives with respect to C, written in Mandel operator
// calculus. S_X below is the self-adjoint map Y -> X.Y + Y.X.
//
// Derivative conventions: d holds dI/dC as a Mandel 6-vector, h holds
// d2I/dC2 as a Mandel 6x6; both are exact for the polynomial invariants here.

#include "anisocal/invariants.hpp"

namespace anisocal::invariants {

namespace detail {

template <class T>
void push(CsetDeriv<T>& out, int order, const T& v, const TVec6<T>& d, const TMat66<T>& h) {
  out.value.push_back(v);
  if (order >= 1) out.d.push_back(d);
  if (order >= 2) out.h.push_back(h);
}

template <class T>
void push_linear(CsetDeriv<T>& out, int order, const T& v, const TVec6<T>& d) {
  out.value.push_back(v);
  if (order >= 1) out.d.push_back(d);
  if (order >= 2) out.h.push_back(TMat66<T>{});
}

// the three isotropic invariants I1 = trC, I2 = tr cof C, I3 = det C
template <class T>
void iso_block(const TSym3<T>& C, const TVec6<T>& c6, const TVec6<T>& one6, int order,
               CsetDeriv<T>& out) {
  const T I1 = trace_sym(C);
  push_linear(out, order, I1, one6);

  const T I2 = trace_cof_sym(C);
  TVec6<T> dI2;
  for (int k = 0; k < 6; ++k) dI2[k] = one6[k] * I1 - c6[k];
  TMat66<T> hI2;
  if (order >= 2) {
    hI2 = outer66(one6, one6);
    for (int i = 0; i < 6; ++i) hI2(i, i) = hI2(i, i) - T(1.0);
  }
  push(out, order, I2, dI2, hI2);

  const T I3 = det_sym(C);
  const TVec6<T> dI3 = to_mandel(cof_sym(C));
  TMat66<T> hI3;
  if (order >= 2) {
    // d(cof C)/dC from cof C = C^2 - I1 C + I2 1
    hI3 = smul_op(C);
    for (int i = 0; i < 6; ++i) {
      hI3(i, i) = hI3(i, i) - I1;
      for (int j = 0; j < 6; ++j)
        hI3(i, j) = hI3(i, j) - c6[i] * one6[j] + one6[i] * (one6[j] * I1 - c6[j]);
    }
  }
  push(out, order, I3, dI3, hI3);
}

// mixed invariants of one symmetric structure tensor: C:G, C^2:G
template <class T>
void k_block(const TSym3<T>& C, const TVec6<T>& c6, const TVec6<T>& c2_6, const TSym3<T>& G,
             const TSym3<T>& Gsq, int order, CsetDeriv<T>& out) {
  const TVec6<T> g6 = to_mandel(G);
  const TVec6<T> gsq6 = to_mandel(Gsq);

  push_linear(out, order, dot6(c6, g6), g6);  // K4 = C:G

  // K5 = C^2:G, d = GC+CG, h = S_G
  {
    const TSym3<T> GCpCG = sym_part(mul_sym(G, C) + mul_sym(C, G));
    push(out, order, dot6(c2_6, g6), to_mandel(GCpCG), order >= 2 ? smul_op(G) : TMat66<T>{});
  }

  push_linear(out, order, dot6(c6, gsq6), gsq6);  // K6 = C:G^2

  {
    const TSym3<T> GC = sym_part(mul_sym(Gsq, C) + mul_sym(C, Gsq));
    push(out, order, dot6(c2_6, gsq6), to_mandel(GC), order >= 2 ? smul_op(Gsq) : TMat66<T>{});
  }
}

}  // namespace detail

template <class T>
void eval_cspace(const Realized<T>& rs, const TSym3<T>& C, int order, CsetDeriv<T>& out) {
  using detail::push;
  using detail::push_linear;

  out.value.clear();
  out.d.clear();
  out.h.clear();

  const TVec6<T> c6 = to_mandel(C);
  const TVec6<T> one6 = to_mandel(sym3_identity<T>());
  const TSym3<T> C2 = square_sym(C);
  const TVec6<T> c2_6 = to_mandel(C2);

  if (rs.kind == SetKind::Coord) {
    // the six raw components of C in Voigt order
    static const double invs2 = 1.0 / kSqrt2;
    for (int k = 0; k < 6; ++k) {
      TVec6<T> d{};
      d[k] = T(k < 3 ? 1.0 : invs2);
      push_linear(out, order, C[k], d);
    }
    return;
  }

  detail::iso_block(C, c6, one6, order, out);
  if (rs.kind == SetKind::Iso) return;

  if (rs.kind == SetKind::G2 || rs.kind == SetKind::Pair) {
    detail::k_block(C, c6, c2_6, rs.G1, rs.G1sq, order, out);
    if (rs.kind == SetKind::G2) return;
    detail::k_block(C, c6, c2_6, rs.G2, rs.G2sq, order, out);
    // N12 = tr(C.G1.G2), linear in C
    const TVec6<T> p6 = to_mandel(rs.pair_sym);
    push_linear(out, order, dot6(c6, p6), p6);
    return;
  }

  if (rs.kind == SetKind::G4) {
    const TMat66<T>& op = rs.op4;
    const TVec6<T> h1 = matvec66(op, c6);
    const TSym3<T> H1 = from_mandel(h1);
    const TSym3<T> H1sq = square_sym(H1);
    const TVec6<T> h1sq6 = to_mandel(H1sq);
    const TVec6<T> h2 = matvec66(op, c2_6);

    const TMat66<T> SC = (order >= 1) ? smul_op(C) : TMat66<T>{};
    const TMat66<T> SH1 = (order >= 2) ? smul_op(H1) : TMat66<T>{};

    // L4 = ghat:C
    push_linear(out, order, dot6(rs.ghat4, c6), rs.ghat4);
    // L5 = tr H1^2
    push(out, order, dot6(h1, h1), matvec66(op, h1) * 2.0,
         order >= 2 ? matmul66(op, op) * 2.0 : TMat66<T>{});
    // L6 = tr H1^3
    {
      const T v = dot6(h1sq6, h1);
      const TVec6<T> d = matvec66(op, h1sq6) * 3.0;
      TMat66<T> h{};
      if (order >= 2) h = matmul66(op, matmul66(SH1, op)) * 3.0;
      push(out, order, v, d, h);
    }
    // L7 = ghat:C^2
    {
      const TSym3<T> Gh = from_mandel(rs.ghat4);
      const TSym3<T> s = sym_part(mul_sym(Gh, C) + mul_sym(C, Gh));
      push(out, order, dot6(rs.ghat4, c2_6), to_mandel(s), order >= 2 ? smul_op(Gh) : TMat66<T>{});
    }
    // L8 = C:G:C
    push(out, order, dot6(c6, h1), h1 * 2.0, order >= 2 ? op * 2.0 : TMat66<T>{});
    // L9 = H1:C^2
    {
      const T v = dot6(h1, c2_6);
      const TVec6<T> d = matvec66(op, c2_6) + matvec66(SC, h1);
      TMat66<T> h{};
      if (order >= 2) h = matmul66(op, SC) + matmul66(SC, op) + SH1;
      push(out, order, v, d, h);
    }
    // L10 = H1:H2
    {
      const TVec6<T> oph1 = matvec66(op, h1);
      const T v = dot6(h1, h2);
      const TVec6<T> d = matvec66(op, h2) + matvec66(SC, oph1);
      TMat66<T> h{};
      if (order >= 2) {
        const TMat66<T> op2 = matmul66(op, op);
        h = matmul66(op2, SC) + matmul66(SC, op2) + smul_op(from_mandel(oph1));
      }
      push(out, order, v, d, h);
    }
    // L11 = tr(H1^2 C)
    {
      const T v = dot6(h1sq6, c6);
      const TVec6<T> d = h1sq6 + matvec66(op, matvec66(SC, h1));
      TMat66<T> h{};
      if (order >= 2) h = matmul66(SH1, op) + matmul66(op, SH1) + matmul66(op, matmul66(SC, op));
      push(out, order, v, d, h);
    }
    return;
  }

  // G6 set
  const TMat66<T>& m1 = rs.m1;
  const TW666<T>& w = rs.w6;
  const TVec6<T> h1 = matvec66(m1, c6);  // H1 = 1:G:C
  const TSym3<T> H1 = from_mandel(h1);
  const TSym3<T> H1sq = square_sym(H1);
  const TVec6<T> h1sq6 = to_mandel(H1sq);

  auto wform = [&w](const TVec6<T>& x, const TVec6<T>& y) {
    TVec6<T> r{};
    for (int k = 0; k < 6; ++k) {
      T s(0.0);
      for (int i = 0; i < 6; ++i) {
        T si(0.0);
        for (int j = 0; j < 6; ++j) si += w(i, j, k) * y[j];
        s += x[i] * si;
      }
      r[k] = s;
    }
    return r;
  };
  auto wmat = [&w](const TVec6<T>& x) {
    TMat66<T> r{};
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) {
        T s(0.0);
        for (int i = 0; i < 6; ++i) s += w(i, j, k) * x[i];
        r(j, k) = s;
      }
    return r;
  };

  const TMat66<T> SC = (order >= 1) ? smul_op(C) : TMat66<T>{};
  const TMat66<T> SH1 = (order >= 2) ? smul_op(H1) : TMat66<T>{};
  const TVec6<T> h2 = wform(c6, c6);  // H2 = C:G:C

  // M4 = t1:C
  push_linear(out, order, dot6(rs.t1, c6), rs.t1);
  // M5 = tr H1^2
  push(out, order, dot6(h1, h1), matvec66(m1, h1) * 2.0,
       order >= 2 ? matmul66(m1, m1) * 2.0 : TMat66<T>{});
  // M6 = tr H1^3
  {
    TMat66<T> h{};
    if (order >= 2) h = matmul66(m1, matmul66(SH1, m1)) * 3.0;
    push(out, order, dot6(h1sq6, h1), matvec66(m1, h1sq6) * 3.0, h);
  }
  // M7 = c^T m1 c  (= tr H2 by full symmetry)
  push(out, order, dot6(c6, h1), h1 * 2.0, order >= 2 ? m1 * 2.0 : TMat66<T>{});
  // M8 = t1:C^2
  {
    const TSym3<T> T1 = from_mandel(rs.t1);
    const TSym3<T> s = sym_part(mul_sym(T1, C) + mul_sym(C, T1));
    push(out, order, dot6(rs.t1, c2_6), to_mandel(s), order >= 2 ? smul_op(T1) : TMat66<T>{});
  }
  // M9 = h1:C^2
  {
    const T v = dot6(h1, c2_6);
    const TVec6<T> d = matvec66(m1, c2_6) + matvec66(SC, h1);
    TMat66<T> h{};
    if (order >= 2) h = matmul66(m1, SC) + matmul66(SC, m1) + SH1;
    push(out, order, v, d, h);
  }
  // M10 = tr(C H1^2)
  {
    const T v = dot6(h1sq6, c6);
    const TVec6<T> d = h1sq6 + matvec66(m1, matvec66(SC, h1));
    TMat66<T> h{};
    if (order >= 2) h = matmul66(SH1, m1) + matmul66(m1, SH1) + matmul66(m1, matmul66(SC, m1));
    push(out, order, v, d, h);
  }
  // M11 = W(c,c,c)
  {
    const T v = dot6(h2, c6);
    const TVec6<T> d = h2 * 3.0;
    TMat66<T> h{};
    if (order >= 2) h = wmat(c6) * 6.0;
    push(out, order, v, d, h);
  }
  // M12 = h1:h2
  {
    const TMat66<T> MC = wmat(c6);
    const T v = dot6(h1, h2);
    const TVec6<T> d = matvec66(m1, h2) + matvec66(MC, h1) * 2.0;
    TMat66<T> h{};
    if (order >= 2)
      h = (matmul66(m1, MC) + matmul66(MC, m1) + wmat(h1)) * 2.0;
    push(out, order, v, d, h);
  }
  // M13 = h1 : (m1 C^2)
  {
    const TVec6<T> m1c2 = matvec66(m1, c2_6);
    const TVec6<T> m1h1 = matvec66(m1, h1);
    const T v = dot6(h1, m1c2);
    const TVec6<T> d = matvec66(m1, m1c2) + matvec66(SC, m1h1);
    TMat66<T> h{};
    if (order >= 2) {
      const TMat66<T> m1sq = matmul66(m1, m1);
      h = matmul66(m1sq, SC) + matmul66(SC, m1sq) + smul_op(from_mandel(m1h1));
    }
    push(out, order, v, d, h);
  }
}

}  // namespace anisocal::invariants
