#include "anisocal/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace anisocal::network {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) { return z > 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

NormLayers fit_normalization(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y, double xmin, double xmax, double ymin,
                             double ymax) {
  if (X.size() < 2 || y.size() < 2) throw EmptyData("fit_normalization: need at least 2 samples");
  const std::size_t n = X.front().size();
  NormLayers nl;
  nl.xmin = xmin;
  nl.xmax = xmax;
  nl.ymin = ymin;
  nl.ymax = ymax;
  nl.Xmin.assign(n, 0.0);
  nl.Xmax.assign(n, 0.0);
  nl.degenerate.assign(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    double lo = X[0][a], hi = X[0][a];
    for (const auto& row : X) {
      lo = std::min(lo, row[a]);
      hi = std::max(hi, row[a]);
    }
    nl.Xmin[a] = lo;
    nl.Xmax[a] = hi;
    if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(hi)))) nl.degenerate[a] = true;
  }
  double ylo = y[0], yhi = y[0];
  for (double v : y) {
    ylo = std::min(ylo, v);
    yhi = std::max(yhi, v);
  }
  nl.Ymin = ylo;
  nl.Ymax = yhi;
  if (!(yhi - ylo > 1e-12 * std::max(1.0, std::abs(yhi)))) nl.degenerate_output = true;
  return nl;
}

void gate_eval(double q, double gamma, double eps, double& g, double& dg) {
  const double t = gamma * std::tanh(eps * q);
  if (t >= 1.0) {
    g = 1.0;
    dg = 0.0;
  } else {
    g = t;
    const double th = std::tanh(eps * q);
    dg = gamma * eps * (1.0 - th * th);
  }
}

PnnParams init_pnn(int n_in, const std::vector<int>& hidden, Rng& rng) {
  PnnParams p;
  int prev = n_in;
  for (int h : hidden) {
    FlatMat W(h, prev);
    const double s = 1.0 / std::sqrt(static_cast<double>(prev));
    for (double& w : W.a) w = rng.uniform(-s, s);
    p.W.push_back(std::move(W));
    p.b.emplace_back(static_cast<std::size_t>(h), 0.0);
    prev = h;
  }
  p.Wout.assign(static_cast<std::size_t>(prev), 0.0);
  for (double& w : p.Wout) w = rng.uniform(0.0, 0.1);
  p.B = 0.0;
  return p;
}

int n_weights(const PnnParams& p) {
  int n = 0;
  for (std::size_t h = 0; h < p.W.size(); ++h)
    n += p.W[h].rows * p.W[h].cols + static_cast<int>(p.b[h].size());
  return n + static_cast<int>(p.Wout.size()) + 1;
}

void pack_weights(const PnnParams& p, std::span<double> out) {
  std::size_t k = 0;
  for (std::size_t h = 0; h < p.W.size(); ++h) {
    for (double w : p.W[h].a) out[k++] = w;
    for (double b : p.b[h]) out[k++] = b;
  }
  for (double w : p.Wout) out[k++] = w;
  out[k++] = p.B;
}

void unpack_weights(std::span<const double> in, PnnParams& p) {
  std::size_t k = 0;
  for (std::size_t h = 0; h < p.W.size(); ++h) {
    for (double& w : p.W[h].a) w = in[k++];
    for (double& b : p.b[h]) b = in[k++];
  }
  for (double& w : p.Wout) w = in[k++];
  p.B = in[k++];
}

namespace {

// scaled, gated input: t_a = g_a (k_a I_a + c_a)
struct InputStage {
  std::vector<double> s;   // k I + c
  std::vector<double> t;   // g * s
  std::vector<double> g;   // gate values
  std::vector<double> dg;  // gate derivative wrt q
  std::vector<double> gk;  // g_a k_a (chain factor to raw inputs)
};

InputStage make_input(const NormLayers& norm, const GateParams* gates,
                      std::span<const double> I) {
  const int n = static_cast<int>(I.size());
  InputStage st;
  st.s.resize(static_cast<std::size_t>(n));
  st.t.resize(static_cast<std::size_t>(n));
  st.g.assign(static_cast<std::size_t>(n), 1.0);
  st.dg.assign(static_cast<std::size_t>(n), 0.0);
  st.gk.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    st.s[static_cast<std::size_t>(a)] = norm.scale_in(a, I[a]);
    if (gates != nullptr && !gates->q.empty())
      gate_eval(gates->q[static_cast<std::size_t>(a)], gates->gamma, gates->eps,
                st.g[static_cast<std::size_t>(a)], st.dg[static_cast<std::size_t>(a)]);
    st.t[static_cast<std::size_t>(a)] = st.g[static_cast<std::size_t>(a)] * st.s[static_cast<std::size_t>(a)];
    st.gk[static_cast<std::size_t>(a)] = st.g[static_cast<std::size_t>(a)] * norm.k(a);
  }
  return st;
}

}  // namespace

NetEval net_eval(const PnnParams& pnn, const NormLayers& norm, const GateParams* gates,
                 std::span<const double> I, int order) {
  const int n = static_cast<int>(I.size());
  const int H = pnn.hidden_layers();
  const double kout = norm.kout();
  const InputStage in = make_input(norm, gates, I);

  // forward
  std::vector<std::vector<double>> z(static_cast<std::size_t>(H)), o(static_cast<std::size_t>(H));
  const std::vector<double>* prev = &in.t;
  for (int h = 0; h < H; ++h) {
    const FlatMat& W = pnn.W[static_cast<std::size_t>(h)];
    auto& zh = z[static_cast<std::size_t>(h)];
    auto& oh = o[static_cast<std::size_t>(h)];
    zh.resize(static_cast<std::size_t>(W.rows));
    oh.resize(static_cast<std::size_t>(W.rows));
    for (int r = 0; r < W.rows; ++r) {
      double s = pnn.b[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)];
      for (int c = 0; c < W.cols; ++c) s += W(r, c) * (*prev)[static_cast<std::size_t>(c)];
      zh[static_cast<std::size_t>(r)] = s;
      oh[static_cast<std::size_t>(r)] = softplus(s);
    }
    prev = &oh;
  }
  double p = pnn.B;
  for (std::size_t r = 0; r < pnn.Wout.size(); ++r) p += pnn.Wout[r] * (*prev)[r];

  NetEval out;
  out.value = kout * p;
  if (order < 1) return out;

  // reverse for the gradient; Hessian by the layer recursion
  std::vector<double> u = pnn.Wout;  // d p / d o^H
  Eigen::MatrixXd Ho;                // d2 p / d o^h d o^h
  const bool want_h = order >= 2;
  if (want_h) Ho = Eigen::MatrixXd::Zero(static_cast<int>(pnn.Wout.size()), static_cast<int>(pnn.Wout.size()));

  for (int h = H - 1; h >= 0; --h) {
    const FlatMat& W = pnn.W[static_cast<std::size_t>(h)];
    const auto& zh = z[static_cast<std::size_t>(h)];
    std::vector<double> v(static_cast<std::size_t>(W.rows));
    Eigen::MatrixXd Hz;
    if (want_h) Hz = Eigen::MatrixXd::Zero(W.rows, W.rows);
    for (int r = 0; r < W.rows; ++r) {
      const double sg = sigmoid(zh[static_cast<std::size_t>(r)]);
      v[static_cast<std::size_t>(r)] = u[static_cast<std::size_t>(r)] * sg;
      if (want_h) {
        for (int c = 0; c < W.rows; ++c)
          Hz(r, c) = sg * Ho(r, c) * sigmoid(zh[static_cast<std::size_t>(c)]);
        Hz(r, r) += u[static_cast<std::size_t>(r)] * sg * (1.0 - sg);
      }
    }
    std::vector<double> unew(static_cast<std::size_t>(W.cols), 0.0);
    for (int r = 0; r < W.rows; ++r)
      for (int c = 0; c < W.cols; ++c) unew[static_cast<std::size_t>(c)] += W(r, c) * v[static_cast<std::size_t>(r)];
    if (want_h) {
      Eigen::MatrixXd Wm(W.rows, W.cols);
      for (int r = 0; r < W.rows; ++r)
        for (int c = 0; c < W.cols; ++c) Wm(r, c) = W(r, c);
      Ho = Wm.transpose() * Hz * Wm;
    }
    u = std::move(unew);
  }

  out.grad.assign(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    out.grad[static_cast<std::size_t>(a)] = kout * u[static_cast<std::size_t>(a)] * in.gk[static_cast<std::size_t>(a)];
  if (want_h) {
    out.hess.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b2 = 0; b2 < n; ++b2)
        out.hess[static_cast<std::size_t>(a * n + b2)] =
            kout * in.gk[static_cast<std::size_t>(a)] * Ho(a, b2) * in.gk[static_cast<std::size_t>(b2)];
  }
  return out;
}

namespace {

// One order-2 jet pass through the network with reverse accumulation.
// Direction d lives in raw-input space. Seeds (pb0, pb1, pb2) weight the
// Taylor coefficients (p0, p1, p2) of the output. Accumulates gradients with
// respect to weights (gw), gate variables (gq via gbar), and raw inputs (gI).
struct JetWork {
  // forward storage per layer: input jets and pre-activation jets
  std::vector<std::vector<double>> X0, X1, X2, Z0, Z1, Z2;
};

void jet_pass(const PnnParams& pnn, const NormLayers& norm, const InputStage& in,
              std::span<const double> d, double pb0, double pb1, double pb2, JetWork& wk,
              std::span<double> gw, std::vector<double>& gbar, std::span<double> gI) {
  const int n = static_cast<int>(in.t.size());
  const int H = pnn.hidden_layers();

  auto& X0 = wk.X0; auto& X1 = wk.X1; auto& X2 = wk.X2;
  auto& Z0 = wk.Z0; auto& Z1 = wk.Z1; auto& Z2 = wk.Z2;
  X0.assign(static_cast<std::size_t>(H + 1), {});
  X1.assign(static_cast<std::size_t>(H + 1), {});
  X2.assign(static_cast<std::size_t>(H + 1), {});
  Z0.assign(static_cast<std::size_t>(H), {});
  Z1.assign(static_cast<std::size_t>(H), {});
  Z2.assign(static_cast<std::size_t>(H), {});

  X0[0].resize(static_cast<std::size_t>(n));
  X1[0].resize(static_cast<std::size_t>(n));
  X2[0].assign(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a) {
    X0[0][static_cast<std::size_t>(a)] = in.t[static_cast<std::size_t>(a)];
    X1[0][static_cast<std::size_t>(a)] = in.gk[static_cast<std::size_t>(a)] * d[static_cast<std::size_t>(a)];
  }

  for (int h = 0; h < H; ++h) {
    const FlatMat& W = pnn.W[static_cast<std::size_t>(h)];
    const int rows = W.rows, cols = W.cols;
    Z0[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(rows));
    Z1[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(rows));
    Z2[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(rows));
    X0[static_cast<std::size_t>(h + 1)].resize(static_cast<std::size_t>(rows));
    X1[static_cast<std::size_t>(h + 1)].resize(static_cast<std::size_t>(rows));
    X2[static_cast<std::size_t>(h + 1)].resize(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      double s0 = pnn.b[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)], s1 = 0.0, s2 = 0.0;
      for (int c = 0; c < cols; ++c) {
        const double w = W(r, c);
        s0 += w * X0[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)];
        s1 += w * X1[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)];
        s2 += w * X2[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)];
      }
      Z0[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)] = s0;
      Z1[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)] = s1;
      Z2[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)] = s2;
      const double f0 = softplus(s0);
      const double f1 = sigmoid(s0);
      const double f2 = f1 * (1.0 - f1);
      X0[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(r)] = f0;
      X1[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(r)] = f1 * s1;
      X2[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(r)] = f1 * s2 + 0.5 * f2 * s1 * s1;
    }
  }

  // output layer jets are linear; reverse starts from the seeds directly
  const int nh = static_cast<int>(pnn.Wout.size());

  // weight layout offsets
  std::vector<std::size_t> off(static_cast<std::size_t>(H) + 1);
  {
    std::size_t k = 0;
    for (int h = 0; h < H; ++h) {
      off[static_cast<std::size_t>(h)] = k;
      k += static_cast<std::size_t>(pnn.W[static_cast<std::size_t>(h)].rows * pnn.W[static_cast<std::size_t>(h)].cols) +
           pnn.b[static_cast<std::size_t>(h)].size();
    }
    off[static_cast<std::size_t>(H)] = k;  // Wout, then B
  }

  // reverse: adjoints of the activation jets of the last hidden layer
  std::vector<double> Xb0(static_cast<std::size_t>(nh)), Xb1(static_cast<std::size_t>(nh)), Xb2(static_cast<std::size_t>(nh));
  for (int r = 0; r < nh; ++r) {
    const double w = pnn.Wout[static_cast<std::size_t>(r)];
    Xb0[static_cast<std::size_t>(r)] = pb0 * w;
    Xb1[static_cast<std::size_t>(r)] = pb1 * w;
    Xb2[static_cast<std::size_t>(r)] = pb2 * w;
    gw[off[static_cast<std::size_t>(H)] + static_cast<std::size_t>(r)] +=
        pb0 * X0[static_cast<std::size_t>(H)][static_cast<std::size_t>(r)] +
        pb1 * X1[static_cast<std::size_t>(H)][static_cast<std::size_t>(r)] +
        pb2 * X2[static_cast<std::size_t>(H)][static_cast<std::size_t>(r)];
  }
  gw[off[static_cast<std::size_t>(H)] + static_cast<std::size_t>(nh)] += pb0;  // bias B

  for (int h = H - 1; h >= 0; --h) {
    const FlatMat& W = pnn.W[static_cast<std::size_t>(h)];
    const int rows = W.rows, cols = W.cols;
    std::vector<double> Zb0(static_cast<std::size_t>(rows)), Zb1(static_cast<std::size_t>(rows)), Zb2(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      const std::size_t ri = static_cast<std::size_t>(r);
      const double z0 = Z0[static_cast<std::size_t>(h)][ri];
      const double z1 = Z1[static_cast<std::size_t>(h)][ri];
      const double z2 = Z2[static_cast<std::size_t>(h)][ri];
      const double f1 = sigmoid(z0);
      const double f2 = f1 * (1.0 - f1);
      const double f3 = f2 * (1.0 - 2.0 * f1);
      Zb0[ri] = Xb0[ri] * f1 + Xb1[ri] * f2 * z1 + Xb2[ri] * (f2 * z2 + 0.5 * f3 * z1 * z1);
      Zb1[ri] = Xb1[ri] * f1 + Xb2[ri] * f2 * z1;
      Zb2[ri] = Xb2[ri] * f1;
    }
    // parameter gradients of this layer
    double* gWh = gw.data() + off[static_cast<std::size_t>(h)];
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        gWh[r * cols + c] += Zb0[static_cast<std::size_t>(r)] * X0[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)] +
                             Zb1[static_cast<std::size_t>(r)] * X1[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)] +
                             Zb2[static_cast<std::size_t>(r)] * X2[static_cast<std::size_t>(h)][static_cast<std::size_t>(c)];
    double* gbh = gWh + rows * cols;
    for (int r = 0; r < rows; ++r) gbh[r] += Zb0[static_cast<std::size_t>(r)];

    // adjoint of the previous activations
    std::vector<double> nb0(static_cast<std::size_t>(cols), 0.0), nb1(static_cast<std::size_t>(cols), 0.0), nb2(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const double w = W(r, c);
        nb0[static_cast<std::size_t>(c)] += w * Zb0[static_cast<std::size_t>(r)];
        nb1[static_cast<std::size_t>(c)] += w * Zb1[static_cast<std::size_t>(r)];
        nb2[static_cast<std::size_t>(c)] += w * Zb2[static_cast<std::size_t>(r)];
      }
    Xb0 = std::move(nb0);
    Xb1 = std::move(nb1);
    Xb2 = std::move(nb2);
  }

  // input stage: t0 = g s, t1 = g k d, t2 = 0
  for (int a = 0; a < n; ++a) {
    const std::size_t ai = static_cast<std::size_t>(a);
    gbar[ai] += Xb0[ai] * in.s[ai] + Xb1[ai] * norm.k(a) * d[ai];
    gI[ai] += Xb0[ai] * in.gk[ai];
  }
}

}  // namespace

NetFunctionalGrad net_functional_grad(const PnnParams& pnn, const NormLayers& norm,
                                      const GateParams* gates, std::span<const double> I,
                                      double w0, std::span<const double> u,
                                      std::span<const double> V) {
  const int n = static_cast<int>(I.size());
  const double kout = norm.kout();
  const InputStage in = make_input(norm, gates, I);

  NetFunctionalGrad out;
  out.gw.assign(static_cast<std::size_t>(n_weights(pnn)), 0.0);
  out.gI.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> gbar(static_cast<std::size_t>(n), 0.0);

  JetWork wk;

  // value + first-derivative functional: one pass along direction u
  {
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    double pb1 = 0.0;
    if (!u.empty()) {
      for (int a = 0; a < n; ++a) d[static_cast<std::size_t>(a)] = u[static_cast<std::size_t>(a)];
      pb1 = kout;
    }
    jet_pass(pnn, norm, in, d, kout * w0, pb1, 0.0, wk, out.gw, gbar, out.gI);
  }

  // second-derivative functional: eigen-directions of the symmetrized V
  if (!V.empty()) {
    Eigen::MatrixXd Vm(n, n);
    for (int a = 0; a < n; ++a)
      for (int b2 = 0; b2 < n; ++b2)
        Vm(a, b2) = 0.5 * (V[static_cast<std::size_t>(a * n + b2)] + V[static_cast<std::size_t>(b2 * n + a)]);
    if (Vm.cwiseAbs().maxCoeff() > 0.0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Vm);
      for (int j = 0; j < n; ++j) {
        const double kappa = es.eigenvalues()(j);
        if (std::abs(kappa) < 1e-300) continue;
        std::vector<double> d(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) d[static_cast<std::size_t>(a)] = es.eigenvectors()(a, j);
        jet_pass(pnn, norm, in, d, 0.0, 0.0, 2.0 * kout * kappa, wk, out.gw, gbar, out.gI);
      }
    }
  }

  if (gates != nullptr && !gates->q.empty()) {
    out.gq.assign(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a)
      out.gq[static_cast<std::size_t>(a)] = gbar[static_cast<std::size_t>(a)] * in.dg[static_cast<std::size_t>(a)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {
constexpr int kSchemaVersion = 1;
using json = nlohmann::ordered_json;
}  // namespace

std::string serialize(const ModelArtifact& m) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["set_kind"] = set_kind_name(m.kind);
  j["structure_params"] = m.structure.params;
  j["q"] = m.gates.q;
  j["gate"] = {{"gamma", m.gates.gamma}, {"eps", m.gates.eps}};
  json layers = json::array();
  for (std::size_t h = 0; h < m.pnn.W.size(); ++h) {
    json Wj = json::array();
    for (int r = 0; r < m.pnn.W[h].rows; ++r) {
      json row = json::array();
      for (int c = 0; c < m.pnn.W[h].cols; ++c) row.push_back(m.pnn.W[h](r, c));
      Wj.push_back(row);
    }
    layers.push_back({{"W", Wj}, {"b", m.pnn.b[h]}, {"activation", "softplus"}});
  }
  layers.push_back({{"W", json::array({m.pnn.Wout})}, {"b", json::array({m.pnn.B})},
                    {"activation", "linear"}});
  j["layers"] = layers;
  j["norm"] = {{"Xmin", m.norm.Xmin},       {"Xmax", m.norm.Xmax},
               {"xmin", m.norm.xmin},       {"xmax", m.norm.xmax},
               {"Ymin", m.norm.Ymin},       {"Ymax", m.norm.Ymax},
               {"ymin", m.norm.ymin},       {"ymax", m.norm.ymax},
               {"degenerate", std::vector<int>(m.norm.degenerate.begin(), m.norm.degenerate.end())},
               {"degenerate_output", m.norm.degenerate_output}};
  j["lambda_gr"] = m.lambda_gr;
  j["meta"] = {{"seed", m.meta.seed}, {"config_hash", m.meta.config_hash}};
  return j.dump(2);
}

ModelArtifact deserialize(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const std::exception& e) {
    throw CorruptPayload(std::string("artifact parse failure: ") + e.what());
  }
  try {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
      throw SchemaMismatch("artifact schema version mismatch");
    ModelArtifact m;
    m.kind = set_kind_from_name(j["set_kind"].get<std::string>());
    m.structure =
        structure::make_structure(m.kind, j["structure_params"].get<std::vector<double>>());
    m.gates.q = j["q"].get<std::vector<double>>();
    m.gates.gamma = j["gate"]["gamma"].get<double>();
    m.gates.eps = j["gate"]["eps"].get<double>();
    const auto& layers = j["layers"];
    const std::size_t nl = layers.size();
    if (nl < 1) throw CorruptPayload("artifact has no layers");
    for (std::size_t h = 0; h + 1 < nl; ++h) {
      const auto& Wj = layers[h]["W"];
      FlatMat W(static_cast<int>(Wj.size()), static_cast<int>(Wj[0].size()));
      for (int r = 0; r < W.rows; ++r)
        for (int c = 0; c < W.cols; ++c) W(r, c) = Wj[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
      m.pnn.W.push_back(std::move(W));
      m.pnn.b.push_back(layers[h]["b"].get<std::vector<double>>());
    }
    m.pnn.Wout = layers[nl - 1]["W"][0].get<std::vector<double>>();
    m.pnn.B = layers[nl - 1]["b"][0].get<double>();
    const auto& nj = j["norm"];
    m.norm.Xmin = nj["Xmin"].get<std::vector<double>>();
    m.norm.Xmax = nj["Xmax"].get<std::vector<double>>();
    m.norm.xmin = nj["xmin"].get<double>();
    m.norm.xmax = nj["xmax"].get<double>();
    m.norm.Ymin = nj["Ymin"].get<double>();
    m.norm.Ymax = nj["Ymax"].get<double>();
    m.norm.ymin = nj["ymin"].get<double>();
    m.norm.ymax = nj["ymax"].get<double>();
    const auto deg = nj["degenerate"].get<std::vector<int>>();
    m.norm.degenerate.assign(deg.begin(), deg.end());
    m.norm.degenerate_output = nj["degenerate_output"].get<bool>();
    m.lambda_gr = j["lambda_gr"].get<double>();
    m.meta.seed = j["meta"]["seed"].get<std::uint64_t>();
    m.meta.config_hash = j["meta"]["config_hash"].get<std::string>();
    return m;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptPayload(std::string("artifact field failure: ") + e.what());
  }
}

void save_artifact(const ModelArtifact& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << serialize(m) << "\n";
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

}  // namespace anisocal::network
