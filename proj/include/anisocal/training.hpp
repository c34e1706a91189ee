#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anisocal/datagen.hpp"
#include "anisocal/energy.hpp"
#include "anisocal/network.hpp"

namespace anisocal::training {

using datagen::Dataset;
using network::ModelArtifact;

// ---------------------------------------------------------------------------
// Loss configuration
// ---------------------------------------------------------------------------

struct LossWeights {
  double w_psi = 0.0;
  double w_sigma = 0.7;
  double w_c = 0.3;
  double w_gate = 5e-5;
  double p = 0.25;      // p-norm exponent of the gate penalty
  double delta = 1e-6;  // regularizer inside the gate penalty
};

/// Normalization factors frozen from the calibration split:
/// n_psi = max psi^2, n_sigma = max |sigma|^2 / 9, n_c = max |c|^2 / 36.
struct LossNorms {
  double n_psi = 1.0;
  double n_sigma = 1.0;
  double n_c = 1.0;
};

LossNorms fit_loss_norms(const Dataset& cal);

struct LossTerms {
  double psi = 0.0, sigma = 0.0, c = 0.0, gate = 0.0;
  double pred = 0.0;   // weighted prediction loss
  double total = 0.0;  // pred + w_gate * gate
};

/// Throws EmptyBatch; MissingTangent when w_c > 0 and a record lacks c.
LossTerms losses(const ModelArtifact& model, const Dataset& batch, const LossNorms& norms,
                 const LossWeights& w);

/// Exact gradient of the total loss with respect to [weights | gates |
/// structure parameters]; layout matches ParamPack below.
struct LossAndGrad {
  LossTerms terms;
  std::vector<double> grad;
};
LossAndGrad loss_gradient(const ModelArtifact& model, const Dataset& batch,
                          const LossNorms& norms, const LossWeights& w, int workers = 1);

// ---------------------------------------------------------------------------
// Trainable-parameter packing with box constraints
// ---------------------------------------------------------------------------

struct ParamPack {
  std::vector<double> x, lo, hi;
  int nw = 0;  // network weights
  int nq = 0;  // gates
  int nm = 0;  // structure parameters
};

ParamPack pack_params(const ModelArtifact& m);
void unpack_params(const ParamPack& p, ModelArtifact& m);
/// Clamp onto the box, plus the degeneracy floors of the structure builders.
void project_params(ParamPack& p, SetKind kind);

// ---------------------------------------------------------------------------
// Training configuration and reports
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr0 = 0.01;
  int decay_every = 500;      // epochs
  double decay_factor = 1.0 / 3.0;
  int epochs = 2000;
  int batch = 64;
  double beta1 = 0.9, beta2 = 0.999, eps_hat = 1e-8;
};

struct QnConfig {
  int max_iters = 500;
  double grad_tol = 1e-10;
  int memory = 10;
};

struct TrainConfig {
  int restarts = 5;
  AdamConfig adam;
  QnConfig qn;
  std::uint64_t seed = 0;
  double split_ratio = 0.7;
  std::vector<int> hidden{16, 16};        // invariant models
  std::vector<int> hidden_coord{16, 16, 16};
  LossWeights weights;
  double lambda_gr = 0.01;  // MPa
  double eps_tol = 0.01;    // identification tolerance (fraction)
  bool extrapolation_mode = false;  // error control on calibration data only
  double gate_active_threshold = 1e-3;
  int workers = 0;  // 0 = one thread per restart
  std::string log_path;  // optional line-delimited training log
};

struct ErrorReport {
  double eps_psi = 0.0, eps_sigma = 0.0, eps_c = 0.0;  // percent
  LossTerms cal, test;
  std::vector<int> active_gates;  // 0/1 per invariant
  int n_active = 0;
  structure::Classification classification;
  double prune_delta = 0.0;  // L_pred change caused by gate pruning
  int diverged_restarts = 0;
};

struct TrainResult {
  ModelArtifact artifact;
  ErrorReport report;
};

/// Eq.-(26)-style relative error measures over a dataset, in percent.
/// Throws EmptyDataset.
void error_measures(const ModelArtifact& model, const Dataset& data, double& eps_psi,
                    double& eps_sigma, double& eps_c);

/// Multi-restart training of a fixed set kind: Adam pre-training with
/// projection, box-constrained quasi-Newton post-training, restart selection
/// by L_pred/(active gates), gate pruning.
TrainResult train(SetKind kind, const Dataset& data, const TrainConfig& cfg);
TrainResult train_on(SetKind kind, const Dataset& cal, const Dataset& test,
                     const TrainConfig& cfg);

struct IdentifyResult {
  TrainResult best;
  SetKind kind = SetKind::G2;
  bool passed = false;
  std::vector<std::pair<SetKind, ErrorReport>> attempts;
};

/// Escalation G2 -> G4 -> G6 -> Pair, stopping at the first kind whose error
/// measures fall below eps_tol.
IdentifyResult identify(const Dataset& data, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Optimizers (exposed for tests)
// ---------------------------------------------------------------------------

struct ObjectiveFn {
  // f(x, grad_or_null) -> value
  virtual double eval(const std::vector<double>& x, std::vector<double>* grad) = 0;
  virtual ~ObjectiveFn() = default;
};

/// Projected L-BFGS with Armijo backtracking on box-projected iterates.
double lbfgs_box(ObjectiveFn& f, std::vector<double>& x, const std::vector<double>& lo,
                 const std::vector<double>& hi, const QnConfig& cfg);

}  // namespace anisocal::training
