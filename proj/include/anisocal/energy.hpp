#pragma once

#include <utility>
#include <vector>

#include "anisocal/invariants.hpp"
#include "anisocal/network.hpp"
#include "anisocal/tensors.hpp"

namespace anisocal::energy {

// ---------------------------------------------------------------------------
// Stress-normalization scheme: each row subtracts coeff_j * (phi_j - phi_j(1))
// from the potential, where phi_j is either J (anchor_slot == -1) or the
// invariant in the given slot, and coeff_j is a fixed linear combination of
// d psi_nn / dI at F = 1. The combinations per set follow the structure of
// the tensor generators at the identity.
// ---------------------------------------------------------------------------

struct CorrectionScheme {
  struct Row {
    int anchor_slot;  // -1 encodes J
    std::vector<std::pair<int, double>> terms;
  };
  std::vector<Row> rows;
  int growth_exponent = 3;
};

const CorrectionScheme& correction_scheme(SetKind kind);

struct CorrectionCoeffs {
  std::vector<double> coeff;     // MPa, one per scheme row
  std::vector<double> anchor1;   // phi_j at F = 1 (1.0 for the J row)
};

CorrectionCoeffs correction_coefficients(const network::ModelArtifact& model);

// ---------------------------------------------------------------------------
// Material response
// ---------------------------------------------------------------------------

struct MaterialResponse {
  int order = 0;
  double psi = 0.0;  // MPa
  Mat3 P{};          // MPa, order >= 1
  Tangent4 A{};      // MPa, order >= 2
  // spatial / pulled-back measures, present when requested
  bool has_spatial = false;
  Sym3 sigma{};
  Tangent4 c{};
  Sym3 T2{};      // 2nd Piola-Kirchhoff
  Tangent4 C4{};  // C_IJKL
  double sigma_asym = 0.0;  // symmetry residuals (diagnostics)
  double c_asym = 0.0;
};

struct SpatialMeasures {
  Sym3 sigma{};
  Tangent4 c{};
  Sym3 T2{};
  Tangent4 C4{};
  double sigma_asym = 0.0;
  double c_asym = 0.0;
};

/// sigma = J^-1 P F^T, c_ijkl = J^-1 A_iJkL F_jJ F_lL - d_ik sigma_jl,
/// T = F^-1 P, C_IJKL = (A_iJkL - d_ik T_JL) F^-1_Ii F^-1_Kk.
SpatialMeasures transform_measures(const Mat3& F, const Mat3& P, const Tangent4& A);

// ---------------------------------------------------------------------------
// Assembled potential evaluation
// ---------------------------------------------------------------------------

/// Quantities fixed for a given parameter state, shared across sample points.
struct Prepared {
  invariants::Realized<double> rs;
  std::vector<double> inv1;   // invariant values at F = 1
  network::NetEval net1;      // order-1 network evaluation at inv1
  CorrectionCoeffs corr;
  const CorrectionScheme* scheme = nullptr;
};

Prepared prepare(const network::ModelArtifact& model);

MaterialResponse evaluate_prepared(const network::ModelArtifact& model, const Prepared& prep,
                                   const Mat3& F, int order, bool spatial = false);

/// Full model: psi = psi_nn + psi_en + psi_str + psi_gr. Invariant kinds use
/// growth exponent 3, the coordinate model exponent 2.
MaterialResponse evaluate(const network::ModelArtifact& model, const Mat3& F, int order,
                          bool spatial = false);

/// Coordinate-based reference model (PNN on the six components of C).
/// Provided as a named entry point; the artifact must have kind Coord.
MaterialResponse evaluate_coord(const network::ModelArtifact& model, const Mat3& F, int order,
                                bool spatial = false);

/// Growth term value/derivatives with respect to J.
void growth_term(double J, double lambda_gr, int exponent, int order, double& val, double& d1,
                 double& d2);

}  // namespace anisocal::energy
