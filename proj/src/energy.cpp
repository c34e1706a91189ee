#include "anisocal/energy.hpp"

#include <cmath>

#include "anisocal/invariants_cspace.hpp"

namespace anisocal::energy {

namespace {

CorrectionScheme make_scheme(SetKind kind) {
  CorrectionScheme s;
  const auto m_row = [] {
    return CorrectionScheme::Row{-1, {{0, 2.0}, {1, 4.0}, {2, 2.0}}};
  };
  switch (kind) {
    case SetKind::Iso:
      s.rows = {m_row()};
      break;
    case SetKind::G2:
      s.rows = {m_row(),
                {3, {{3, 1.0}, {4, 2.0}}},
                {5, {{5, 1.0}, {6, 2.0}}}};
      break;
    case SetKind::G4:
      s.rows = {m_row(),
                {3, {{3, 1.0}, {6, 2.0}, {7, 2.0}, {8, 3.0}}},
                {4, {{4, 1.0}, {9, 1.5}}},
                {5, {{5, 1.0}}},
                {10, {{10, 1.0}}}};
      break;
    case SetKind::G6:
      s.rows = {m_row(),
                {3, {{3, 1.0}, {6, 2.0}, {7, 2.0}, {8, 3.0}, {10, 3.0}}},
                {4, {{4, 1.0}, {11, 1.5}, {12, 1.5}}},
                {5, {{5, 1.0}}},
                {9, {{9, 1.0}}}};
      break;
    case SetKind::Pair:
      s.rows = {m_row(),
                {3, {{3, 1.0}, {4, 2.0}}},
                {5, {{5, 1.0}, {6, 2.0}}},
                {7, {{7, 1.0}, {8, 2.0}}},
                {9, {{9, 1.0}, {10, 2.0}}},
                {11, {{11, 1.0}}}};
      break;
    case SetKind::Coord: {
      // every input anchors itself: psi_str = -dpsi/dC|_1 : (C - 1)
      for (int a = 0; a < 6; ++a) s.rows.push_back({a, {{a, 1.0}}});
      s.growth_exponent = 2;
      break;
    }
  }
  return s;
}

const CorrectionScheme& scheme_for(SetKind kind) {
  static const CorrectionScheme iso = make_scheme(SetKind::Iso);
  static const CorrectionScheme g2 = make_scheme(SetKind::G2);
  static const CorrectionScheme g4 = make_scheme(SetKind::G4);
  static const CorrectionScheme g6 = make_scheme(SetKind::G6);
  static const CorrectionScheme pair = make_scheme(SetKind::Pair);
  static const CorrectionScheme coord = make_scheme(SetKind::Coord);
  switch (kind) {
    case SetKind::Iso: return iso;
    case SetKind::G2: return g2;
    case SetKind::G4: return g4;
    case SetKind::G6: return g6;
    case SetKind::Pair: return pair;
    case SetKind::Coord: return coord;
  }
  return iso;
}

}  // namespace

const CorrectionScheme& correction_scheme(SetKind kind) { return scheme_for(kind); }

void growth_term(double J, double lambda_gr, int exponent, int order, double& val, double& d1,
                 double& d2) {
  const double b = J + 1.0 / J - 2.0;
  const double u = 1.0 - 1.0 / (J * J);
  const double w = 2.0 / (J * J * J);
  d1 = d2 = 0.0;
  if (exponent == 2) {
    val = lambda_gr * b * b;
    if (order >= 1) d1 = 2.0 * lambda_gr * b * u;
    if (order >= 2) d2 = 2.0 * lambda_gr * (u * u + b * w);
  } else {
    val = lambda_gr * b * b * b;
    if (order >= 1) d1 = 3.0 * lambda_gr * b * b * u;
    if (order >= 2) d2 = 3.0 * lambda_gr * (2.0 * b * u * u + b * b * w);
  }
}

Prepared prepare(const network::ModelArtifact& model) {
  Prepared p;
  p.scheme = &scheme_for(model.kind);
  p.rs = invariants::realize(model.kind, model.structure.params.data());

  invariants::CsetDeriv<double> cs;
  invariants::eval_cspace(p.rs, sym3_identity<double>(), 0, cs);
  p.inv1 = cs.value;

  const network::GateParams* gates = model.gates.empty() ? nullptr : &model.gates;
  p.net1 = network::net_eval(model.pnn, model.norm, gates, p.inv1, 1);

  for (const auto& row : p.scheme->rows) {
    double c = 0.0;
    for (const auto& [slot, w] : row.terms) c += w * p.net1.grad[static_cast<std::size_t>(slot)];
    p.corr.coeff.push_back(c);
    p.corr.anchor1.push_back(row.anchor_slot < 0 ? 1.0
                                                 : p.inv1[static_cast<std::size_t>(row.anchor_slot)]);
  }
  return p;
}

CorrectionCoeffs correction_coefficients(const network::ModelArtifact& model) {
  return prepare(model).corr;
}

MaterialResponse evaluate_prepared(const network::ModelArtifact& model, const Prepared& prep,
                                   const Mat3& F, int order, bool spatial) {
  const invariants::InvariantBundle b = invariants::invariant_bundle(prep.rs, F, order);
  const int n = static_cast<int>(b.values.size());
  const network::GateParams* gates = model.gates.empty() ? nullptr : &model.gates;
  const network::NetEval net = network::net_eval(model.pnn, model.norm, gates, b.values, order);

  const invariants::JBundle jb = invariants::j_bundle(F, order);
  double gval, gd1, gd2;
  growth_term(jb.J, model.lambda_gr, prep.scheme->growth_exponent, order, gval, gd1, gd2);

  MaterialResponse out;
  out.order = order;

  // psi = psi_nn(I) - psi_nn(I(1)) - sum_j c_j (phi_j - phi_j(1)) + psi_gr(J)
  double psi = net.value - prep.net1.value + gval;
  double cJ = 0.0;  // accumulated J-row coefficient
  std::vector<double> A(static_cast<std::size_t>(n), 0.0);  // per-invariant stress coefficients
  if (order >= 1)
    for (int a = 0; a < n; ++a) A[static_cast<std::size_t>(a)] = net.grad[static_cast<std::size_t>(a)];
  for (std::size_t j = 0; j < prep.scheme->rows.size(); ++j) {
    const auto& row = prep.scheme->rows[j];
    const double cj = prep.corr.coeff[j];
    const double phi = row.anchor_slot < 0 ? jb.J : b.values[static_cast<std::size_t>(row.anchor_slot)];
    psi -= cj * (phi - prep.corr.anchor1[j]);
    if (row.anchor_slot < 0)
      cJ += cj;
    else if (order >= 1)
      A[static_cast<std::size_t>(row.anchor_slot)] -= cj;
  }
  out.psi = psi;
  if (order < 1) return out;

  // P = sum_a A_a dI_a/dF + (g'(J) - cJ) dJ/dF
  const double jcoef = gd1 - cJ;
  for (int i = 0; i < 9; ++i) out.P.a[static_cast<std::size_t>(i)] = jcoef * jb.dF.a[static_cast<std::size_t>(i)];
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 9; ++i)
      out.P.a[static_cast<std::size_t>(i)] += A[static_cast<std::size_t>(a)] * b.dF[static_cast<std::size_t>(a)].a[static_cast<std::size_t>(i)];

  if (order >= 2) {
    // A = sum_ab psi''_ab dI_a x dI_b + sum_a A_a ddI_a
    //     + g''(J) dJ x dJ + (g'(J) - cJ) ddJ
    for (int a = 0; a < n; ++a) {
      const double* Ga = b.dF[static_cast<std::size_t>(a)].a.data();
      for (int b2 = 0; b2 < n; ++b2) {
        const double w = net.hess[static_cast<std::size_t>(a * n + b2)];
        if (w == 0.0) continue;
        const double* Gb = b.dF[static_cast<std::size_t>(b2)].a.data();
        for (int i = 0; i < 9; ++i)
          for (int k = 0; k < 9; ++k)
            out.A.a[static_cast<std::size_t>(i * 9 + k)] += w * Ga[i] * Gb[k];
      }
      out.A.axpy(A[static_cast<std::size_t>(a)], b.ddF[static_cast<std::size_t>(a)]);
    }
    const double* dJ = jb.dF.a.data();
    for (int i = 0; i < 9; ++i)
      for (int k = 0; k < 9; ++k)
        out.A.a[static_cast<std::size_t>(i * 9 + k)] += gd2 * dJ[i] * dJ[k];
    out.A.axpy(jcoef, jb.ddF);
  }

  if (spatial && order >= 1) {
    const SpatialMeasures sm = transform_measures(F, out.P, out.A);
    out.sigma = sm.sigma;
    out.c = sm.c;
    out.T2 = sm.T2;
    out.C4 = sm.C4;
    out.sigma_asym = sm.sigma_asym;
    out.c_asym = sm.c_asym;
    out.has_spatial = true;
  }
  return out;
}

MaterialResponse evaluate(const network::ModelArtifact& model, const Mat3& F, int order,
                          bool spatial) {
  const Prepared prep = prepare(model);
  return evaluate_prepared(model, prep, F, order, spatial);
}

MaterialResponse evaluate_coord(const network::ModelArtifact& model, const Mat3& F, int order,
                                bool spatial) {
  if (model.kind != SetKind::Coord)
    throw KindMismatch("evaluate_coord: artifact kind is not coord");
  return evaluate(model, F, order, spatial);
}

SpatialMeasures transform_measures(const Mat3& F, const Mat3& P, const Tangent4& A) {
  const double J = det3(F);
  if (!(J > 1e-12)) throw NonInvertible("transform_measures: det F <= 1e-12");
  const Mat3 Fi = inv3(F);
  SpatialMeasures out;

  // sigma = J^-1 P F^T
  Mat3 sig{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int K = 0; K < 3; ++K) s += P(i, K) * F(j, K);
      sig(i, j) = s / J;
    }
  double asym = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      asym = std::max(asym, std::abs(sig(i, j) - sig(j, i)));
      scale = std::max(scale, std::abs(sig(i, j)));
    }
  out.sigma_asym = scale > 0 ? asym / scale : 0.0;
  out.sigma = sym_part(sig);

  // T = F^-1 P
  Mat3 T{};
  for (int I = 0; I < 3; ++I)
    for (int K = 0; K < 3; ++K) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += Fi(I, i) * P(i, K);
      T(I, K) = s;
    }
  out.T2 = sym_part(T);

  // c_ijkl = J^-1 A_iJkL F_jJ F_lL - d_ik sigma_jl
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double s = 0.0;
          for (int Jm = 0; Jm < 3; ++Jm)
            for (int L = 0; L < 3; ++L) s += A(i, Jm, k, L) * F(j, Jm) * F(l, L);
          out.c(i, j, k, l) = s / J - (i == k ? sig(j, l) : 0.0);
        }
  // minor-symmetry residual of c (diagnostic)
  double casym = 0.0, cscale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          casym = std::max(casym, std::abs(out.c(i, j, k, l) - out.c(j, i, k, l)));
          casym = std::max(casym, std::abs(out.c(i, j, k, l) - out.c(i, j, l, k)));
          cscale = std::max(cscale, std::abs(out.c(i, j, k, l)));
        }
  out.c_asym = cscale > 0 ? casym / cscale : 0.0;

  // C_IJKL = (A_iJkL - d_ik T_JL) F^-1_Ii F^-1_Kk
  for (int I = 0; I < 3; ++I)
    for (int Jm = 0; Jm < 3; ++Jm)
      for (int K = 0; K < 3; ++K)
        for (int L = 0; L < 3; ++L) {
          double s = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
              s += (A(i, Jm, k, L) - (i == k ? T(Jm, L) : 0.0)) * Fi(I, i) * Fi(K, k);
          out.C4(I, Jm, K, L) = s;
        }
  return out;
}

}  // namespace anisocal::energy
