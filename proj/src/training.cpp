#include "anisocal/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "anisocal/dual.hpp"
#include "anisocal/invariants_cspace.hpp"

namespace anisocal::training {

namespace {

constexpr int kVi[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVj[6] = {0, 1, 2, 2, 2, 1};

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min(workers, n);
  pool.reserve(static_cast<std::size_t>(nt - 1));
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

double gate_penalty(const network::GateParams& gates, double p, double delta) {
  if (gates.q.empty()) return 0.0;
  const double n = static_cast<double>(gates.q.size());
  double s = 0.0;
  for (double q : gates.q) {
    double g, dg;
    network::gate_eval(q, gates.gamma, gates.eps, g, dg);
    s += std::pow(g + delta, p);
  }
  return s / (n * std::pow(1.0 + delta, p));
}

Sym3 sym_from_voigt(const Vec6& v) {
  Sym3 s;
  for (int k = 0; k < 6; ++k) s[k] = v[k];
  return s;
}

}  // namespace

LossNorms fit_loss_norms(const Dataset& cal) {
  if (cal.empty()) throw EmptyDataset("fit_loss_norms: empty calibration set");
  LossNorms n;
  double mpsi = 0.0, msig = 0.0, mc = 0.0;
  for (const auto& r : cal) {
    mpsi = std::max(mpsi, r.psi * r.psi);
    const double fs = frob(sym_from_voigt(r.sigma_voigt));
    msig = std::max(msig, fs * fs);
    if (r.has_tangent) {
      double f2 = 0.0;
      for (double x : r.c_voigt) f2 += x * x;
      mc = std::max(mc, f2);
    }
  }
  n.n_psi = std::max(mpsi, 1e-300);
  n.n_sigma = std::max(msig / 9.0, 1e-300);
  n.n_c = std::max(mc / 36.0, 1e-300);
  return n;
}

// ---------------------------------------------------------------------------
// Loss evaluation
// ---------------------------------------------------------------------------

namespace {

struct RecordTerms {
  double psi = 0.0, sigma = 0.0, c = 0.0;
};

RecordTerms record_residuals(const ModelArtifact& model, const energy::Prepared& prep,
                             const datagen::DatasetRecord& rec, const LossNorms& norms,
                             bool need_c) {
  const int order = need_c ? 2 : 1;
  const energy::MaterialResponse r =
      energy::evaluate_prepared(model, prep, rec.F, order, true);
  RecordTerms t;
  const double dpsi = r.psi - rec.psi;
  t.psi = dpsi * dpsi / norms.n_psi;
  const Sym3 ds = r.sigma - sym_from_voigt(rec.sigma_voigt);
  t.sigma = frob(ds) * frob(ds) / (9.0 * norms.n_sigma);
  if (need_c) {
    const VoigtMat cv = voigt_tangent(r.c, 1e-3);
    double s = 0.0;
    for (int k = 0; k < 36; ++k) {
      const double d = cv.a[static_cast<std::size_t>(k)] - rec.c_voigt[static_cast<std::size_t>(k)];
      s += d * d;
    }
    t.c = s / (36.0 * norms.n_c);
  }
  return t;
}

}  // namespace

LossTerms losses(const ModelArtifact& model, const Dataset& batch, const LossNorms& norms,
                 const LossWeights& w) {
  if (batch.empty()) throw EmptyBatch("losses: empty batch");
  const bool need_c = w.w_c > 0.0;
  for (const auto& r : batch)
    if (need_c && !r.has_tangent)
      throw MissingTangent("losses: tangent loss requested but record lacks c");

  const energy::Prepared prep = energy::prepare(model);
  LossTerms out;
  for (const auto& rec : batch) {
    const RecordTerms t = record_residuals(model, prep, rec, norms, need_c);
    out.psi += t.psi;
    out.sigma += t.sigma;
    out.c += t.c;
  }
  const double invb = 1.0 / static_cast<double>(batch.size());
  out.psi *= invb;
  out.sigma *= invb;
  out.c *= invb;
  out.gate = gate_penalty(model.gates, w.p, w.delta);
  out.pred = w.w_psi * out.psi + w.w_sigma * out.sigma + w.w_c * out.c;
  out.total = out.pred + w.w_gate * out.gate;
  return out;
}

// ---------------------------------------------------------------------------
// Parameter packing
// ---------------------------------------------------------------------------

ParamPack pack_params(const ModelArtifact& m) {
  ParamPack p;
  p.nw = network::n_weights(m.pnn);
  p.nq = static_cast<int>(m.gates.q.size());
  p.nm = static_cast<int>(m.structure.params.size());
  const std::size_t total = static_cast<std::size_t>(p.nw + p.nq + p.nm);
  p.x.resize(total);
  p.lo.assign(total, -1e30);
  p.hi.assign(total, 1e30);
  network::pack_weights(m.pnn, std::span<double>(p.x.data(), static_cast<std::size_t>(p.nw)));
  // output layer non-negativity: the last Wout.size()+1 weight slots
  const std::size_t out_begin = static_cast<std::size_t>(p.nw) - m.pnn.Wout.size() - 1;
  for (std::size_t k = out_begin; k < static_cast<std::size_t>(p.nw); ++k) p.lo[k] = 0.0;
  // the clamped branch of g = min(1, gamma tanh(eps q)) is a zero-gradient
  // plateau equivalent to its left endpoint; the optimizer box stops just
  // short of it so the gate penalty can always act
  const double qstar =
      0.5 * std::log((1.0 + 1.0 / m.gates.gamma) / (1.0 - 1.0 / m.gates.gamma)) / m.gates.eps;
  for (int i = 0; i < p.nq; ++i) {
    p.x[static_cast<std::size_t>(p.nw + i)] =
        std::min(m.gates.q[static_cast<std::size_t>(i)], qstar - 1e-6);
    p.lo[static_cast<std::size_t>(p.nw + i)] = 0.0;
    p.hi[static_cast<std::size_t>(p.nw + i)] = qstar - 1e-6;
  }
  const auto box = structure::param_box(m.kind);
  for (int i = 0; i < p.nm; ++i) {
    p.x[static_cast<std::size_t>(p.nw + p.nq + i)] = m.structure.params[static_cast<std::size_t>(i)];
    p.lo[static_cast<std::size_t>(p.nw + p.nq + i)] = box.lo[static_cast<std::size_t>(i)];
    p.hi[static_cast<std::size_t>(p.nw + p.nq + i)] = box.hi[static_cast<std::size_t>(i)];
  }
  return p;
}

void unpack_params(const ParamPack& p, ModelArtifact& m) {
  network::unpack_weights(std::span<const double>(p.x.data(), static_cast<std::size_t>(p.nw)), m.pnn);
  for (int i = 0; i < p.nq; ++i) m.gates.q[static_cast<std::size_t>(i)] = p.x[static_cast<std::size_t>(p.nw + i)];
  for (int i = 0; i < p.nm; ++i)
    m.structure.params[static_cast<std::size_t>(i)] = p.x[static_cast<std::size_t>(p.nw + p.nq + i)];
}

void project_params(ParamPack& p, SetKind kind) {
  for (std::size_t k = 0; k < p.x.size(); ++k)
    p.x[k] = std::clamp(p.x[k], p.lo[k], p.hi[k]);
  double* m = p.x.data() + p.nw + p.nq;
  if (kind == SetKind::G2 || kind == SetKind::Pair) {
    const int blocks = (kind == SetKind::Pair) ? 2 : 1;
    for (int b = 0; b < blocks; ++b) {
      double* g = m + 6 * b;
      const double s = g[0] + g[1] + g[2];
      if (s < 1e-8) {
        const double bump = (1e-8 - s) / 3.0 + 1e-12;
        g[0] += bump;
        g[1] += bump;
        g[2] += bump;
      }
    }
  } else if (kind == SetKind::G4 || kind == SetKind::G6) {
    double amax = std::max({m[0], m[3], m[6]});
    if (amax < 1e-4) m[0] = 1e-4;  // keep the normalizer away from zero
  }
}

// ---------------------------------------------------------------------------
// Exact loss gradient
// ---------------------------------------------------------------------------

namespace {

// per-call constants shared across records
struct GradContext {
  const ModelArtifact* model = nullptr;
  const energy::Prepared* prep = nullptr;
  const LossNorms* norms = nullptr;
  const LossWeights* w = nullptr;
  int batch = 1;
  int order = 1;
  int nw = 0, nq = 0, nm = 0;
  // dual realizations for the structure-parameter chain
  invariants::Realized<Dual<12>> rs_dual;
  std::vector<Dual<12>> inv1_dual;
};

struct RecordGrad {
  RecordTerms terms;
  std::vector<double> g;  // nw + nq + nm
};

void record_gradient(const GradContext& ctx, const datagen::DatasetRecord& rec, RecordGrad& out) {
  const ModelArtifact& m = *ctx.model;
  const energy::Prepared& prep = *ctx.prep;
  const LossWeights& w = *ctx.w;
  const int order = ctx.order;
  const int n = invariant_count(m.kind);
  const double B = static_cast<double>(ctx.batch);

  out.g.assign(static_cast<std::size_t>(ctx.nw + ctx.nq + ctx.nm), 0.0);

  // ---- forward evaluation ----
  const Kinematics kin = kinematics(rec.F);
  const invariants::JBundle jb = invariants::j_bundle(rec.F, order);
  invariants::CsetDeriv<double> cs;
  invariants::eval_cspace(prep.rs, kin.C, order, cs);
  invariants::InvariantBundle b;
  b.kind = m.kind;
  invariants::chain_to_f(cs, rec.F, order, b);

  const network::GateParams* gates = m.gates.empty() ? nullptr : &m.gates;
  const network::NetEval net = network::net_eval(m.pnn, m.norm, gates, cs.value, order);

  double gval, gd1, gd2;
  energy::growth_term(jb.J, m.lambda_gr, prep.scheme->growth_exponent, order, gval, gd1, gd2);

  std::vector<double> A(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) A[static_cast<std::size_t>(a)] = net.grad[static_cast<std::size_t>(a)];
  double cJ = 0.0;
  double psi_hat = net.value - prep.net1.value + gval;
  for (std::size_t j = 0; j < prep.scheme->rows.size(); ++j) {
    const auto& row = prep.scheme->rows[j];
    const double cj = prep.corr.coeff[j];
    const double phi = row.anchor_slot < 0 ? jb.J : cs.value[static_cast<std::size_t>(row.anchor_slot)];
    psi_hat -= cj * (phi - prep.corr.anchor1[j]);
    if (row.anchor_slot < 0)
      cJ += cj;
    else
      A[static_cast<std::size_t>(row.anchor_slot)] -= cj;
  }

  const double jcoef = gd1 - cJ;
  Mat3 P{};
  for (int i = 0; i < 9; ++i) P.a[static_cast<std::size_t>(i)] = jcoef * jb.dF.a[static_cast<std::size_t>(i)];
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 9; ++i)
      P.a[static_cast<std::size_t>(i)] += A[static_cast<std::size_t>(a)] * b.dF[static_cast<std::size_t>(a)].a[static_cast<std::size_t>(i)];

  Tangent4 Atan{};
  if (order >= 2) {
    for (int a = 0; a < n; ++a) {
      const double* Ga = b.dF[static_cast<std::size_t>(a)].a.data();
      for (int b2 = 0; b2 < n; ++b2) {
        const double hab = net.hess[static_cast<std::size_t>(a * n + b2)];
        if (hab == 0.0) continue;
        const double* Gb = b.dF[static_cast<std::size_t>(b2)].a.data();
        for (int i = 0; i < 9; ++i)
          for (int k = 0; k < 9; ++k) Atan.a[static_cast<std::size_t>(i * 9 + k)] += hab * Ga[i] * Gb[k];
      }
      Atan.axpy(A[static_cast<std::size_t>(a)], b.ddF[static_cast<std::size_t>(a)]);
    }
    const double* dJ = jb.dF.a.data();
    for (int i = 0; i < 9; ++i)
      for (int k = 0; k < 9; ++k) Atan.a[static_cast<std::size_t>(i * 9 + k)] += gd2 * dJ[i] * dJ[k];
    Atan.axpy(jcoef, jb.ddF);
  }

  // push-forward (raw sigma kept for the exact chain)
  const double J = jb.J;
  Mat3 sraw{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int K = 0; K < 3; ++K) s += P(i, K) * rec.F(j, K);
      sraw(i, j) = s / J;
    }
  const Sym3 sig_hat = sym_part(sraw);

  VoigtMat c_hat{};
  if (order >= 2) {
    for (int Av = 0; Av < 6; ++Av)
      for (int Bv = 0; Bv < 6; ++Bv) {
        const int i = kVi[Av], j = kVj[Av], k = kVi[Bv], l = kVj[Bv];
        double s = 0.0;
        for (int Jm = 0; Jm < 3; ++Jm)
          for (int L = 0; L < 3; ++L) s += Atan(i, Jm, k, L) * rec.F(j, Jm) * rec.F(l, L);
        c_hat(Av, Bv) = s / J - (i == k ? sraw(j, l) : 0.0);
      }
  }

  // ---- residuals and multipliers ----
  const double dpsi = psi_hat - rec.psi;
  out.terms.psi = dpsi * dpsi / ctx.norms->n_psi;
  const Sym3 dsig = sig_hat - sym_from_voigt(rec.sigma_voigt);
  out.terms.sigma = frob(dsig) * frob(dsig) / (9.0 * ctx.norms->n_sigma);

  const double lam = 2.0 * w.w_psi * dpsi / (ctx.norms->n_psi * B);
  const double ks = 2.0 * w.w_sigma / (9.0 * ctx.norms->n_sigma * B);
  Mat3 sbar = to_mat(dsig) * ks;  // adjoint of raw sigma (symmetric part)

  VoigtMat cbar{};
  if (order >= 2) {
    const double kc = 2.0 * w.w_c / (36.0 * ctx.norms->n_c * B);
    double cterm = 0.0;
    for (int Av = 0; Av < 6; ++Av)
      for (int Bv = 0; Bv < 6; ++Bv) {
        const double d = c_hat(Av, Bv) - rec.c_voigt[static_cast<std::size_t>(6 * Av + Bv)];
        cterm += d * d;
        cbar(Av, Bv) = kc * d;
        // -delta_ik sigma_jl route back into the raw-sigma adjoint
        const int i = kVi[Av], j = kVj[Av], k = kVi[Bv], l = kVj[Bv];
        if (i == k) sbar(j, l) -= kc * d;
      }
    out.terms.c = cterm / (36.0 * ctx.norms->n_c);
  }

  // Lambda = J^-1 sbar F ; Xi_{iJkL} = J^-1 sum_slots cbar F F
  Mat3 Lam{};
  for (int i = 0; i < 3; ++i)
    for (int K = 0; K < 3; ++K) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) s += sbar(i, l) * rec.F(l, K);
      Lam(i, K) = s / J;
    }

  Tangent4 Xi{};
  Mat66 XtM{};
  Vec6 xt6{};
  const bool have_xi = order >= 2 && w.w_c > 0.0;
  if (have_xi) {
    for (int Av = 0; Av < 6; ++Av)
      for (int Bv = 0; Bv < 6; ++Bv) {
        const double cb = cbar(Av, Bv);
        if (cb == 0.0) continue;
        const int i = kVi[Av], j = kVj[Av], k = kVi[Bv], l = kVj[Bv];
        for (int Jm = 0; Jm < 3; ++Jm)
          for (int L = 0; L < 3; ++L)
            Xi(i, Jm, k, L) += cb * rec.F(j, Jm) * rec.F(l, L) / J;
      }
    // xt = sym_i Xi_{iJiL} ; Xtilde_{PJ,QL} = F_iP Xi_{iJkL} F_kQ
    Mat3 xtm{};
    for (int Jm = 0; Jm < 3; ++Jm)
      for (int L = 0; L < 3; ++L) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += Xi(i, Jm, i, L);
        xtm(Jm, L) = s;
      }
    xt6 = to_mandel(sym_part(xtm));
    double Xt[3][3][3][3];
    for (int Pm = 0; Pm < 3; ++Pm)
      for (int Jm = 0; Jm < 3; ++Jm)
        for (int Q = 0; Q < 3; ++Q)
          for (int L = 0; L < 3; ++L) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
              for (int k = 0; k < 3; ++k) s += rec.F(i, Pm) * Xi(i, Jm, k, L) * rec.F(k, Q);
            Xt[Pm][Jm][Q][L] = s;
          }
    static const double wm[6] = {1.0, 1.0, 1.0, kSqrt2, kSqrt2, kSqrt2};
    for (int a = 0; a < 6; ++a)
      for (int b2 = 0; b2 < 6; ++b2) {
        const int Pm = kVi[a], Jm = kVj[a], Q = kVi[b2], L = kVj[b2];
        const double comp = 0.25 * (Xt[Pm][Jm][Q][L] + Xt[Jm][Pm][Q][L] + Xt[Pm][Jm][L][Q] +
                                    Xt[Jm][Pm][L][Q]);
        XtM(a, b2) = wm[a] * wm[b2] * comp;
      }
    // only the major-symmetric part acts on symmetric operators
    for (int a = 0; a < 6; ++a)
      for (int b2 = a + 1; b2 < 6; ++b2) {
        const double svv = 0.5 * (XtM(a, b2) + XtM(b2, a));
        XtM(a, b2) = svv;
        XtM(b2, a) = svv;
      }
  }

  const Vec6 lt6 = to_mandel(sym_part(transpose(rec.F) * Lam));

  // u_a = Lambda : dI_a/dF + Xi :: ddI_a ; V_ab = Xi :: (dI_a x dI_b)
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  std::vector<double> V;
  for (int a = 0; a < n; ++a) {
    double s = 2.0 * dot6(lt6, cs.d[static_cast<std::size_t>(a)]);
    if (have_xi) {
      s += 2.0 * dot6(xt6, cs.d[static_cast<std::size_t>(a)]);
      double hs = 0.0;
      for (int k = 0; k < 36; ++k)
        hs += XtM.a[static_cast<std::size_t>(k)] * cs.h[static_cast<std::size_t>(a)].a[static_cast<std::size_t>(k)];
      s += 4.0 * hs;
    }
    u[static_cast<std::size_t>(a)] = s;
  }
  if (have_xi) {
    V.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int a = 0; a < n; ++a) {
      const Vec6 xd = matvec66(XtM, cs.d[static_cast<std::size_t>(a)]);
      for (int b2 = 0; b2 < n; ++b2)
        V[static_cast<std::size_t>(a * n + b2)] = 4.0 * dot6(xd, cs.d[static_cast<std::size_t>(b2)]);
    }
  }

  // anchor-row adjoints e_j
  const std::size_t nrows = prep.scheme->rows.size();
  std::vector<double> e(nrows, 0.0);
  for (std::size_t j = 0; j < nrows; ++j) {
    const auto& row = prep.scheme->rows[j];
    if (row.anchor_slot < 0) {
      double s = lam * (jb.J - 1.0);
      for (int i = 0; i < 9; ++i) s += Lam.a[static_cast<std::size_t>(i)] * jb.dF.a[static_cast<std::size_t>(i)];
      if (have_xi)
        for (int k = 0; k < 81; ++k)
          s += Xi.a[static_cast<std::size_t>(k)] * jb.ddF.a[static_cast<std::size_t>(k)];
      e[j] = s;
    } else {
      const std::size_t slot = static_cast<std::size_t>(row.anchor_slot);
      e[j] = lam * (cs.value[slot] - prep.corr.anchor1[j]) + u[slot];
    }
  }

  // ---- network reverse passes ----
  std::span<double> gw(out.g.data(), static_cast<std::size_t>(ctx.nw));
  const network::NetFunctionalGrad g1 =
      network::net_functional_grad(m.pnn, m.norm, gates, cs.value, lam, u, V);
  for (int k = 0; k < ctx.nw; ++k) gw[static_cast<std::size_t>(k)] += g1.gw[static_cast<std::size_t>(k)];
  std::vector<double> Ibar = g1.gI;

  std::vector<double> u1(static_cast<std::size_t>(n), 0.0);
  for (std::size_t j = 0; j < nrows; ++j)
    for (const auto& [slot, wgt] : prep.scheme->rows[j].terms)
      u1[static_cast<std::size_t>(slot)] -= e[j] * wgt;
  const network::NetFunctionalGrad g2 =
      network::net_functional_grad(m.pnn, m.norm, gates, prep.inv1, -lam, u1, {});
  for (int k = 0; k < ctx.nw; ++k) gw[static_cast<std::size_t>(k)] += g2.gw[static_cast<std::size_t>(k)];
  std::vector<double> Ibar1 = g2.gI;

  if (ctx.nq > 0) {
    double* gq = out.g.data() + ctx.nw;
    for (int a = 0; a < ctx.nq; ++a)
      gq[a] = g1.gq[static_cast<std::size_t>(a)] + g2.gq[static_cast<std::size_t>(a)];
  }

  // direct anchor-value routes
  for (std::size_t j = 0; j < nrows; ++j) {
    const auto& row = prep.scheme->rows[j];
    if (row.anchor_slot < 0) continue;
    const double cj = prep.corr.coeff[j];
    Ibar[static_cast<std::size_t>(row.anchor_slot)] -= lam * cj;
    Ibar1[static_cast<std::size_t>(row.anchor_slot)] += lam * cj;
  }

  // ---- structure-parameter chain (forward duals through the bundle) ----
  if (ctx.nm > 0) {
    TSym3<Dual<12>> Cd;
    for (int k = 0; k < 6; ++k) Cd[k] = Dual<12>(kin.C[k]);
    invariants::CsetDeriv<Dual<12>> csd;
    invariants::eval_cspace(ctx.rs_dual, Cd, order, csd);

    // E_a = 2 A_a (lt + xt) + 8 XtM qv_a with qv_a = sum_b hess_ab d_b
    double* gm = out.g.data() + ctx.nw + ctx.nq;
    for (int a = 0; a < n; ++a) {
      const std::size_t ai = static_cast<std::size_t>(a);
      Vec6 E{};
      for (int k = 0; k < 6; ++k)
        E[k] = 2.0 * A[ai] * (lt6[k] + (have_xi ? xt6[k] : 0.0));
      if (have_xi) {
        Vec6 qv{};
        for (int b2 = 0; b2 < n; ++b2) {
          const double hab = net.hess[static_cast<std::size_t>(a * n + b2)];
          if (hab == 0.0) continue;
          for (int k = 0; k < 6; ++k) qv[k] += hab * cs.d[static_cast<std::size_t>(b2)][k];
        }
        const Vec6 xq = matvec66(XtM, qv);
        for (int k = 0; k < 6; ++k) E[k] += 8.0 * xq[k];
      }
      for (int k = 0; k < ctx.nm; ++k) {
        const std::size_t ki = static_cast<std::size_t>(k);
        double s = Ibar[ai] * csd.value[ai].d[ki] + Ibar1[ai] * ctx.inv1_dual[ai].d[ki];
        for (int c = 0; c < 6; ++c) s += E[c] * csd.d[ai][c].d[ki];
        if (have_xi) {
          double hs = 0.0;
          for (int c = 0; c < 36; ++c)
            hs += XtM.a[static_cast<std::size_t>(c)] * csd.h[ai].a[static_cast<std::size_t>(c)].d[ki];
          s += 4.0 * A[ai] * hs;
        }
        gm[k] += s;
      }
    }
  }
}

}  // namespace

LossAndGrad loss_gradient(const ModelArtifact& model, const Dataset& batch,
                          const LossNorms& norms, const LossWeights& w, int workers) {
  if (batch.empty()) throw EmptyBatch("loss_gradient: empty batch");
  const bool need_c = w.w_c > 0.0;
  for (const auto& r : batch)
    if (need_c && !r.has_tangent)
      throw MissingTangent("loss_gradient: tangent loss requested but record lacks c");

  GradContext ctx;
  const energy::Prepared prep = energy::prepare(model);
  ctx.model = &model;
  ctx.prep = &prep;
  ctx.norms = &norms;
  ctx.w = &w;
  ctx.batch = static_cast<int>(batch.size());
  ctx.order = need_c ? 2 : 1;
  ctx.nw = network::n_weights(model.pnn);
  ctx.nq = static_cast<int>(model.gates.q.size());
  ctx.nm = static_cast<int>(model.structure.params.size());
  if (ctx.nm > 0) {
    std::vector<Dual<12>> pd(static_cast<std::size_t>(ctx.nm));
    for (int i = 0; i < ctx.nm; ++i)
      pd[static_cast<std::size_t>(i)] = Dual<12>::seeded(model.structure.params[static_cast<std::size_t>(i)], i);
    ctx.rs_dual = invariants::realize(model.kind, pd.data());
    invariants::CsetDeriv<Dual<12>> cs1;
    invariants::eval_cspace(ctx.rs_dual, TSym3<Dual<12>>{sym3_identity<Dual<12>>()}, 0, cs1);
    ctx.inv1_dual = cs1.value;
  }

  std::vector<RecordGrad> per(batch.size());
  parallel_for(static_cast<int>(batch.size()), workers,
               [&](int i) { record_gradient(ctx, batch[static_cast<std::size_t>(i)], per[static_cast<std::size_t>(i)]); });

  LossAndGrad out;
  out.grad.assign(static_cast<std::size_t>(ctx.nw + ctx.nq + ctx.nm), 0.0);
  for (const RecordGrad& rg : per) {
    out.terms.psi += rg.terms.psi;
    out.terms.sigma += rg.terms.sigma;
    out.terms.c += rg.terms.c;
    for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] += rg.g[k];
  }
  const double invb = 1.0 / static_cast<double>(batch.size());
  out.terms.psi *= invb;
  out.terms.sigma *= invb;
  out.terms.c *= invb;
  out.terms.gate = gate_penalty(model.gates, w.p, w.delta);
  out.terms.pred = w.w_psi * out.terms.psi + w.w_sigma * out.terms.sigma + w.w_c * out.terms.c;
  out.terms.total = out.terms.pred + w.w_gate * out.terms.gate;

  // gate-penalty gradient
  if (ctx.nq > 0 && w.w_gate != 0.0) {
    const double nn = static_cast<double>(ctx.nq);
    const double denom = nn * std::pow(1.0 + w.delta, w.p);
    for (int a = 0; a < ctx.nq; ++a) {
      double g, dg;
      network::gate_eval(model.gates.q[static_cast<std::size_t>(a)], model.gates.gamma,
                         model.gates.eps, g, dg);
      out.grad[static_cast<std::size_t>(ctx.nw + a)] +=
          w.w_gate * w.p * std::pow(g + w.delta, w.p - 1.0) * dg / denom;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

double lbfgs_box(ObjectiveFn& f, std::vector<double>& x, const std::vector<double>& lo,
                 const std::vector<double>& hi, const QnConfig& cfg) {
  const std::size_t n = x.size();
  auto project = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
  };
  project(x);

  std::vector<double> g(n);
  double fx = f.eval(x, &g);
  std::vector<std::vector<double>> S, Y;
  std::vector<double> rho;

  for (int it = 0; it < cfg.max_iters; ++it) {
    // projected-gradient stationarity
    double pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i];
      pg = std::max(pg, std::abs(step));
    }
    if (pg < cfg.grad_tol) break;

    // two-loop recursion
    std::vector<double> q = g;
    const int mlen = static_cast<int>(S.size());
    std::vector<double> alpha(static_cast<std::size_t>(mlen));
    for (int i = mlen - 1; i >= 0; --i) {
      double a = 0.0;
      for (std::size_t k = 0; k < n; ++k) a += S[static_cast<std::size_t>(i)][k] * q[k];
      a *= rho[static_cast<std::size_t>(i)];
      alpha[static_cast<std::size_t>(i)] = a;
      for (std::size_t k = 0; k < n; ++k) q[k] -= a * Y[static_cast<std::size_t>(i)][k];
    }
    double gamma = 1.0;
    if (mlen > 0) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sy += S.back()[k] * Y.back()[k];
        yy += Y.back()[k] * Y.back()[k];
      }
      if (yy > 0) gamma = sy / yy;
    }
    for (std::size_t k = 0; k < n; ++k) q[k] *= gamma;
    for (int i = 0; i < mlen; ++i) {
      double beta = 0.0;
      for (std::size_t k = 0; k < n; ++k) beta += Y[static_cast<std::size_t>(i)][k] * q[k];
      beta *= rho[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < n; ++k)
        q[k] += (alpha[static_cast<std::size_t>(i)] - beta) * S[static_cast<std::size_t>(i)][k];
    }
    // q is an approximation of H g; step direction is -q

    double step = 1.0;
    std::vector<double> xn(n), gn(n);
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t k = 0; k < n; ++k) xn[k] = x[k] - step * q[k];
      project(xn);
      double dd = 0.0;  // directional decrease predictor g^T (xn - x)
      for (std::size_t k = 0; k < n; ++k) dd += g[k] * (xn[k] - x[k]);
      if (dd > -1e-18) {  // no descent after projection; fall back to gradient
        if (ls == 0) {
          for (std::size_t k = 0; k < n; ++k) q[k] = g[k];
          continue;
        }
        step *= 0.5;
        continue;
      }
      fn = f.eval(xn, nullptr);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * dd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    fn = f.eval(xn, &gn);
    std::vector<double> s(n), y(n);
    double sy = 0.0, snorm = 0.0, ynorm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = xn[k] - x[k];
      y[k] = gn[k] - g[k];
      sy += s[k] * y[k];
      snorm += s[k] * s[k];
      ynorm += y[k] * y[k];
    }
    if (sy > 1e-12 * std::sqrt(snorm * ynorm)) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > cfg.memory) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho.erase(rho.begin());
      }
    }
    x = xn;
    g = gn;
    if (std::abs(fx - fn) < 1e-17 * std::max(1.0, std::abs(fx))) {
      fx = fn;
      break;
    }
    fx = fn;
  }
  return fx;
}

// ---------------------------------------------------------------------------
// Training driver
// ---------------------------------------------------------------------------

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  return z ^ (z >> 31);
}

ModelArtifact init_artifact(SetKind kind, const TrainConfig& cfg, const Dataset& cal,
                            std::uint64_t restart_seed) {
  Rng rng(restart_seed);
  ModelArtifact m;
  m.kind = kind;
  m.lambda_gr = cfg.lambda_gr;
  m.meta.seed = restart_seed;

  const auto box = structure::param_box(kind);
  std::vector<double> p(box.lo.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
  m.structure.kind = kind;
  m.structure.params = p;
  {
    ParamPack tmp;
    tmp.nw = 0;
    tmp.nq = 0;
    tmp.nm = static_cast<int>(p.size());
    tmp.x = p;
    tmp.lo = box.lo;
    tmp.hi = box.hi;
    project_params(tmp, kind);
    m.structure.params = tmp.x;
  }

  const int n = invariant_count(kind);
  if (kind != SetKind::Coord) {
    // all gates initially active but inside the smooth branch of the clamp
    m.gates.q.assign(static_cast<std::size_t>(n), 0.85);
  }
  const std::vector<int>& hidden = (kind == SetKind::Coord) ? cfg.hidden_coord : cfg.hidden;
  m.pnn = network::init_pnn(n, hidden, rng);

  // fit the non-trainable normalization layers on the calibration split with
  // the initial structure parameters
  const invariants::Realized<double> rs = invariants::realize(kind, m.structure.params.data());
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  X.reserve(cal.size());
  y.reserve(cal.size());
  invariants::CsetDeriv<double> cs;
  for (const auto& rec : cal) {
    const Kinematics kin = kinematics(rec.F);
    invariants::eval_cspace(rs, kin.C, 0, cs);
    X.push_back(cs.value);
    y.push_back(rec.psi);
  }
  m.norm = network::fit_normalization(X, y);
  return m;
}

struct RestartOutcome {
  ModelArtifact artifact;
  double lpred_cal = std::numeric_limits<double>::infinity();
  int active = 1;
  bool diverged = false;
  std::vector<std::string> log_lines;
};

int count_active(const network::GateParams& gates, double threshold) {
  if (gates.q.empty()) return 1;
  int a = 0;
  for (double q : gates.q) {
    double g, dg;
    network::gate_eval(q, gates.gamma, gates.eps, g, dg);
    if (g > threshold) ++a;
  }
  return a;
}

struct FullBatchObjective final : ObjectiveFn {
  ModelArtifact* model;
  ParamPack* pack;
  const Dataset* cal;
  const LossNorms* norms;
  const LossWeights* weights;
  SetKind kind;

  double eval(const std::vector<double>& x, std::vector<double>* grad) override {
    pack->x = x;
    unpack_params(*pack, *model);
    if (grad == nullptr) {
      const LossTerms t = losses(*model, *cal, *norms, *weights);
      return t.total;
    }
    const LossAndGrad lg = loss_gradient(*model, *cal, *norms, *weights, 1);
    *grad = lg.grad;
    return lg.terms.total;
  }
};

RestartOutcome run_restart(SetKind kind, const Dataset& cal, const TrainConfig& cfg,
                           const LossNorms& norms, int restart_index) {
  RestartOutcome out;
  const std::uint64_t rseed = mix_seed(cfg.seed, static_cast<std::uint64_t>(restart_index) * 7919 +
                                                     static_cast<std::uint64_t>(kind));
  ModelArtifact model = init_artifact(kind, cfg, cal, rseed);
  ParamPack pack = pack_params(model);
  Rng shuffler(mix_seed(rseed, 0x5bf03635));

  try {
    // ---- Adam pre-training with projection ----
    std::vector<double> mom(pack.x.size(), 0.0), vel(pack.x.size(), 0.0);
    std::int64_t step = 0;
    std::vector<std::size_t> idx(cal.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    const int nb = std::max(1, static_cast<int>((cal.size() + static_cast<std::size_t>(cfg.adam.batch) - 1) /
                                                static_cast<std::size_t>(cfg.adam.batch)));
    Dataset batch;
    const int log_every = 25;
    for (int epoch = 0; epoch < cfg.adam.epochs; ++epoch) {
      const double lr =
          cfg.adam.lr0 * std::pow(cfg.adam.decay_factor, epoch / cfg.adam.decay_every);
      shuffler.shuffle(idx);
      for (int bidx = 0; bidx < nb; ++bidx) {
        batch.clear();
        for (std::size_t k = static_cast<std::size_t>(bidx) * static_cast<std::size_t>(cfg.adam.batch);
             k < std::min(cal.size(), (static_cast<std::size_t>(bidx) + 1) * static_cast<std::size_t>(cfg.adam.batch));
             ++k)
          batch.push_back(cal[idx[k]]);
        if (batch.empty()) continue;

        unpack_params(pack, model);
        const LossAndGrad lg = loss_gradient(model, batch, norms, cfg.weights, 1);
        if (!std::isfinite(lg.terms.total)) throw Diverged("non-finite loss");
        ++step;
        const double b1c = 1.0 - std::pow(cfg.adam.beta1, static_cast<double>(step));
        const double b2c = 1.0 - std::pow(cfg.adam.beta2, static_cast<double>(step));
        for (std::size_t k = 0; k < pack.x.size(); ++k) {
          mom[k] = cfg.adam.beta1 * mom[k] + (1.0 - cfg.adam.beta1) * lg.grad[k];
          vel[k] = cfg.adam.beta2 * vel[k] + (1.0 - cfg.adam.beta2) * lg.grad[k] * lg.grad[k];
          pack.x[k] -= lr * (mom[k] / b1c) / (std::sqrt(vel[k] / b2c) + cfg.adam.eps_hat);
        }
        project_params(pack, kind);
      }
      if (!cfg.log_path.empty() && (epoch % log_every == 0 || epoch + 1 == cfg.adam.epochs)) {
        unpack_params(pack, model);
        const LossTerms t = losses(model, cal, norms, cfg.weights);
        std::ostringstream line;
        line << "{\"restart\":" << restart_index << ",\"phase\":\"adam\",\"epoch\":" << epoch
             << ",\"L\":" << t.total << ",\"L_pred\":" << t.pred << ",\"L_gate\":" << t.gate
             << ",\"active_gates\":" << count_active(model.gates, cfg.gate_active_threshold) << "}";
        out.log_lines.push_back(line.str());
      }
    }

    // ---- box-constrained quasi-Newton post-training ----
    unpack_params(pack, model);
    FullBatchObjective obj;
    obj.model = &model;
    obj.pack = &pack;
    obj.cal = &cal;
    obj.norms = &norms;
    obj.weights = &cfg.weights;
    obj.kind = kind;
    std::vector<double> x = pack.x;
    const double fqn = lbfgs_box(obj, x, pack.lo, pack.hi, cfg.qn);
    pack.x = x;
    unpack_params(pack, model);
    if (!cfg.log_path.empty()) {
      std::ostringstream line;
      line << "{\"restart\":" << restart_index << ",\"phase\":\"qn\",\"epoch\":" << cfg.adam.epochs
           << ",\"L\":" << fqn << ",\"L_pred\":-1,\"L_gate\":-1,\"active_gates\":"
           << count_active(model.gates, cfg.gate_active_threshold) << "}";
      out.log_lines.push_back(line.str());
    }

    const LossTerms final_terms = losses(model, cal, norms, cfg.weights);
    out.lpred_cal = final_terms.pred;
    out.active = count_active(model.gates, cfg.gate_active_threshold);
    out.artifact = std::move(model);
  } catch (const Diverged&) {
    out.diverged = true;
  }
  return out;
}

}  // namespace

void error_measures(const ModelArtifact& model, const Dataset& data, double& eps_psi,
                    double& eps_sigma, double& eps_c) {
  if (data.empty()) throw EmptyDataset("error_measures: empty dataset");
  const energy::Prepared prep = energy::prepare(model);
  double num_psi = 0.0, den_psi = 0.0, num_sig = 0.0, den_sig = 0.0, num_c = 0.0, den_c = 0.0;
  for (const auto& rec : data) {
    const int order = rec.has_tangent ? 2 : 1;
    const energy::MaterialResponse r = energy::evaluate_prepared(model, prep, rec.F, order, true);
    num_psi += std::abs(r.psi - rec.psi);
    den_psi += std::abs(rec.psi);
    const Sym3 ds = r.sigma - sym_from_voigt(rec.sigma_voigt);
    num_sig += frob(ds);
    den_sig += frob(sym_from_voigt(rec.sigma_voigt));
    if (rec.has_tangent) {
      const VoigtMat cv = voigt_tangent(r.c, 1e-3);
      double dn = 0.0, rn = 0.0;
      for (int k = 0; k < 36; ++k) {
        const double d = cv.a[static_cast<std::size_t>(k)] - rec.c_voigt[static_cast<std::size_t>(k)];
        dn += d * d;
        rn += rec.c_voigt[static_cast<std::size_t>(k)] * rec.c_voigt[static_cast<std::size_t>(k)];
      }
      num_c += std::sqrt(dn);
      den_c += std::sqrt(rn);
    }
  }
  eps_psi = den_psi > 0 ? 100.0 * num_psi / den_psi : 0.0;
  eps_sigma = den_sig > 0 ? 100.0 * num_sig / den_sig : 0.0;
  eps_c = den_c > 0 ? 100.0 * num_c / den_c : 0.0;
}

TrainResult train_on(SetKind kind, const Dataset& cal, const Dataset& test,
                     const TrainConfig& cfg) {
  if (cal.empty()) throw EmptyDataset("train_on: empty calibration set");
  const LossNorms norms = fit_loss_norms(cal);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  const int rest_workers = cfg.workers > 0
                               ? cfg.workers
                               : std::min<int>(cfg.restarts,
                                               std::max(1u, std::thread::hardware_concurrency()));
  parallel_for(cfg.restarts, rest_workers, [&](int r) {
    outcomes[static_cast<std::size_t>(r)] = run_restart(kind, cal, cfg, norms, r);
  });

  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  int diverged = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    const auto& o = outcomes[static_cast<std::size_t>(r)];
    if (o.diverged) {
      ++diverged;
      continue;
    }
    const double score = o.lpred_cal / std::max(1, o.active);
    if (score < best_score) {
      best_score = score;
      best = r;
    }
  }
  if (best < 0) throw Diverged("train_on: every restart diverged");

  TrainResult res;
  res.artifact = outcomes[static_cast<std::size_t>(best)].artifact;
  res.report.diverged_restarts = diverged;

  // prune gates below the activity threshold to exactly zero
  const double lpred_before = outcomes[static_cast<std::size_t>(best)].lpred_cal;
  if (!res.artifact.gates.q.empty()) {
    for (double& q : res.artifact.gates.q) {
      double g, dg;
      network::gate_eval(q, res.artifact.gates.gamma, res.artifact.gates.eps, g, dg);
      if (g <= cfg.gate_active_threshold) q = 0.0;
    }
  }
  const LossTerms cal_terms = losses(res.artifact, cal, norms, cfg.weights);
  res.report.prune_delta = cal_terms.pred - lpred_before;
  res.report.cal = cal_terms;
  if (!test.empty()) res.report.test = losses(res.artifact, test, norms, cfg.weights);

  res.report.active_gates.clear();
  for (double q : res.artifact.gates.q) {
    double g, dg;
    network::gate_eval(q, res.artifact.gates.gamma, res.artifact.gates.eps, g, dg);
    res.report.active_gates.push_back(g > cfg.gate_active_threshold ? 1 : 0);
  }
  res.report.n_active = count_active(res.artifact.gates, cfg.gate_active_threshold);

  // error measures: full dataset by default, calibration only in
  // extrapolation mode
  Dataset full = cal;
  if (!cfg.extrapolation_mode) full.insert(full.end(), test.begin(), test.end());
  error_measures(res.artifact, full, res.report.eps_psi, res.report.eps_sigma, res.report.eps_c);

  // refresh realized structure values and classify
  if (structure_param_count(kind) > 0)
    res.artifact.structure = structure::make_structure(kind, res.artifact.structure.params);
  res.report.classification = structure::classify(res.artifact.structure);

  if (!cfg.log_path.empty()) {
    std::ofstream f(cfg.log_path, std::ios::app);
    if (f)
      for (const auto& o : outcomes)
        for (const auto& line : o.log_lines) f << line << "\n";
  }
  return res;
}

TrainResult train(SetKind kind, const Dataset& data, const TrainConfig& cfg) {
  Dataset cal, test;
  datagen::split(data, cfg.split_ratio, cfg.seed, cal, test);
  return train_on(kind, cal, test, cfg);
}

IdentifyResult identify(const Dataset& data, const TrainConfig& cfg) {
  Dataset cal, test;
  datagen::split(data, cfg.split_ratio, cfg.seed, cal, test);

  IdentifyResult res;
  double best_err = std::numeric_limits<double>::infinity();
  const bool with_tangent = cfg.weights.w_c > 0.0;
  for (SetKind kind : {SetKind::G2, SetKind::G4, SetKind::G6, SetKind::Pair}) {
    TrainResult tr = train_on(kind, cal, test, cfg);
    res.attempts.emplace_back(kind, tr.report);
    const double worst =
        with_tangent
            ? std::max({tr.report.eps_psi, tr.report.eps_sigma, tr.report.eps_c})
            : std::max(tr.report.eps_psi, tr.report.eps_sigma);
    if (worst < best_err) {
      best_err = worst;
      res.best = std::move(tr);
      res.kind = kind;
    }
    if (best_err <= 100.0 * cfg.eps_tol) {
      res.passed = true;
      break;
    }
  }
  return res;
}

}  // namespace anisocal::training
