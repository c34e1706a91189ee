#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anisocal/rng.hpp"
#include "anisocal/set_kind.hpp"
#include "anisocal/structure.hpp"

namespace anisocal::network {

// ---------------------------------------------------------------------------
// Non-trainable input/output normalization layers. Inputs map affinely from
// the data range [Xmin, Xmax] onto [xmin, xmax]; the output is scaled by
// (Ymax - Ymin)/(ymax - ymin), which keeps positivity intact.
// ---------------------------------------------------------------------------

struct NormLayers {
  std::vector<double> Xmin, Xmax;
  double xmin = 0.0, xmax = 1.0;
  double Ymin = 0.0, Ymax = 1.0;
  double ymin = 0.0, ymax = 1.0;
  std::vector<bool> degenerate;  // per-column zero-range warnings
  bool degenerate_output = false;

  int n() const { return static_cast<int>(Xmin.size()); }

  double k(int a) const {
    if (degenerate[static_cast<std::size_t>(a)]) return 1.0;
    return (xmax - xmin) / (Xmax[static_cast<std::size_t>(a)] - Xmin[static_cast<std::size_t>(a)]);
  }
  double c(int a) const {
    const std::size_t i = static_cast<std::size_t>(a);
    if (degenerate[i]) return 0.5 * (xmin + xmax) - 0.5 * (Xmin[i] + Xmax[i]);
    return (xmax * Xmin[i] - xmin * Xmax[i]) / (Xmin[i] - Xmax[i]);
  }
  double kout() const {
    if (degenerate_output) return 1.0;
    return (Ymax - Ymin) / (ymax - ymin);
  }
  double scale_in(int a, double X) const { return k(a) * X + c(a); }
};

/// Fit from samples: X is row-major (m x n), y has m entries. Degenerate
/// columns map to the target midpoint with unit passthrough slope. Throws
/// EmptyData for fewer than 2 samples.
NormLayers fit_normalization(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y, double xmin = 0.0, double xmax = 1.0,
                             double ymin = 0.0, double ymax = 1.0);

// ---------------------------------------------------------------------------
// Trainable gate layer: g = min(1, gamma tanh(eps q)), q in [0,1].
// ---------------------------------------------------------------------------

struct GateParams {
  std::vector<double> q;
  double gamma = 1.025;
  double eps = 2.5;
  bool empty() const { return q.empty(); }
};

/// Gate value and derivative; zero derivative on the clamped branch.
void gate_eval(double q, double gamma, double eps, double& g, double& dg);

// ---------------------------------------------------------------------------
// Positive feedforward network (softplus activations, non-negative output
// layer). Weights of hidden layers are unconstrained.
// ---------------------------------------------------------------------------

struct FlatMat {
  int rows = 0, cols = 0;
  std::vector<double> a;
  FlatMat() = default;
  FlatMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c), 0.0) {}
  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * cols + c)]; }
  const double& operator()(int r, int c) const { return a[static_cast<std::size_t>(r * cols + c)]; }
};

struct PnnParams {
  std::vector<FlatMat> W;              // hidden-layer weights
  std::vector<std::vector<double>> b;  // hidden-layer biases
  std::vector<double> Wout;            // non-negative output weights
  double B = 0.0;                      // non-negative output bias

  int n_in() const { return W.empty() ? 0 : W.front().cols; }
  int hidden_layers() const { return static_cast<int>(W.size()); }
};

/// Fan-in-scaled symmetric uniform init for hidden layers; output weights
/// uniform in [0, 0.1], bias 0.
PnnParams init_pnn(int n_in, const std::vector<int>& hidden, Rng& rng);

int n_weights(const PnnParams& p);
void pack_weights(const PnnParams& p, std::span<double> out);
void unpack_weights(std::span<const double> in, PnnParams& p);

// ---------------------------------------------------------------------------
// NetCore: the composed map psi_nn(I) = n_out( pnn( gate( n_in(I) ) ) ).
// Evaluation gives exact gradients/Hessians with respect to the raw inputs;
// the functional gradient drives training.
// ---------------------------------------------------------------------------

struct NetEval {
  double value = 0.0;
  std::vector<double> grad;  // d psi / dI, order >= 1
  std::vector<double> hess;  // n x n row-major, order >= 2
};

/// gates == nullptr disables the gate layer (coordinate model).
NetEval net_eval(const PnnParams& pnn, const NormLayers& norm, const GateParams* gates,
                 std::span<const double> I, int order);

struct NetFunctionalGrad {
  std::vector<double> gw;  // same layout as pack_weights
  std::vector<double> gq;  // per gate; empty when gates are disabled
  std::vector<double> gI;  // per raw input
};

/// Exact gradient with respect to weights, gates and inputs of
///   Psi = w0 * psi(I) + sum_a u_a dpsi/dI_a + sum_ab V_ab d2psi/dI_a dI_b.
/// V may be empty (treated as zero); it is symmetrized internally.
NetFunctionalGrad net_functional_grad(const PnnParams& pnn, const NormLayers& norm,
                                      const GateParams* gates, std::span<const double> I,
                                      double w0, std::span<const double> u,
                                      std::span<const double> V);

// ---------------------------------------------------------------------------
// Full model artifact
// ---------------------------------------------------------------------------

struct ArtifactMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ModelArtifact {
  SetKind kind = SetKind::Iso;
  structure::StructureSpec structure;
  GateParams gates;  // empty q disables the gate layer
  PnnParams pnn;
  NormLayers norm;
  double lambda_gr = 0.01;  // MPa
  ArtifactMeta meta;
};

/// Versioned JSON document; round trip reproduces evaluation bit-exactly.
std::string serialize(const ModelArtifact& m);
/// Throws SchemaMismatch on version drift, CorruptPayload on bad JSON.
ModelArtifact deserialize(const std::string& bytes);

void save_artifact(const ModelArtifact& m, const std::string& path);
ModelArtifact load_artifact(const std::string& path);

}  // namespace anisocal::network
