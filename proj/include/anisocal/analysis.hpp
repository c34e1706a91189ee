#pragma once

#include <string>
#include <vector>

#include "anisocal/datagen.hpp"
#include "anisocal/network.hpp"
#include "anisocal/tensors.hpp"

namespace anisocal::analysis {

// ---------------------------------------------------------------------------
// Local ellipticity: scan the acoustic tensor gamma_ik = A_iJkL N_J N_L over
// directions N(theta, phi) and track the smallest eigenvalue.
// ---------------------------------------------------------------------------

struct EllipticityResult {
  double min_eigenvalue = 0.0;  // MPa
  std::array<double, 3> direction{};
  bool elliptic = false;
  double symmetry_residual = 0.0;  // of the acoustic tensor before symmetrizing
};

EllipticityResult ellipticity_scan(const Tangent4& A, double step = 3.14159265358979323846 / 180.0);

// ---------------------------------------------------------------------------
// Directional Young's modulus surface: E(n) = 1 / (n x n : S : n x n) with S
// from a Mandel-basis inversion of the (major-symmetrized) tangent.
// ---------------------------------------------------------------------------

struct SurfacePoint {
  double theta = 0.0, phi = 0.0;
  double E = 0.0;  // MPa
};

struct SurfaceGrid {
  std::vector<SurfacePoint> points;
  double step = 0.0;
};

/// Throws SingularTangent when the Mandel 6x6 is not invertible
/// (condition estimate above 1e12).
SurfaceGrid elastic_surface(const Tangent4& c, double step = 3.14159265358979323846 / 90.0);

void save_surface_csv(const SurfaceGrid& grid, const std::string& path);
/// Companion gnuplot script for the CSV.
void save_surface_gnuplot(const std::string& csv_path, const std::string& script_path);

// ---------------------------------------------------------------------------
// Correlation export: (reference, predicted) pairs for psi, the sigma
// components and the Voigt tangent components.
// ---------------------------------------------------------------------------

void correlation_export(const network::ModelArtifact& model, const datagen::Dataset& data,
                        const std::string& path);

}  // namespace anisocal::analysis
