#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "anisocal/energy.hpp"
#include "anisocal/structure.hpp"
#include "anisocal/tensors.hpp"

namespace anisocal::datagen {

// ---------------------------------------------------------------------------
// Deformation-space sampling: Latin hypercube over
// (lambda1, lambda2, J, theta1, theta2, theta3), endpoints expanded into
// loading paths by linear interpolation of the stretches at fixed angles.
// ---------------------------------------------------------------------------

struct SampleConfig {
  std::array<double, 2> lambda1{0.8, 1.4};
  std::array<double, 2> lambda2{0.8, 1.4};
  std::array<double, 2> jrange{0.9, 1.2};
  std::array<double, 2> theta1{0.0, 3.14159265358979323846};
  std::array<double, 2> theta2{-1.5707963267948966, 1.5707963267948966};
  std::array<double, 2> theta3{-3.14159265358979323846, 3.14159265358979323846};
  int n_samp = 5000;
  int n_inc = 20;
  double d_tol = 0.15;
  std::uint64_t seed = 0;
};

struct LoadPath {
  int id = 0;
  std::vector<Mat3> F;  // n_inc states, first is the first interpolation step
};

/// Seeded LHS endpoints; every U on each path is symmetric positive definite.
std::vector<LoadPath> sample_paths(const SampleConfig& cfg);

/// Relative-distance duplicate filter on Green-Lagrange strains. A state is
/// unique when its distance to every retained state is >= d_tol; a unique
/// state retains its whole path. The first path is always retained.
std::vector<LoadPath> dedup_filter(const std::vector<LoadPath>& paths, double d_tol);

// ---------------------------------------------------------------------------
// Analytic ground-truth materials: compressible neo-Hooke plus quadratic
// penalties on mixed invariants of known structure tensors.
// ---------------------------------------------------------------------------

enum class GtFamily { NeoHooke, TransverselyIsotropic, Orthotropic, Cubic, Hexagonal, Monoclinic };

struct GroundTruth {
  GtFamily family = GtFamily::NeoHooke;
  double E = 1.0;    // MPa
  double nu = 0.4;
  double k = 0.5;    // MPa, anisotropy modulus
  Mat3 Q_true = eye3();  // orientation of the structure tensors
};

GtFamily family_from_name(const std::string& s);
std::string family_name(GtFamily f);

/// Exact response of the ground truth (psi, P, A and optionally push-forward).
energy::MaterialResponse ground_truth_eval(const GroundTruth& gt, const Mat3& F, int order = 2,
                                           bool spatial = false);

// ---------------------------------------------------------------------------
// Dataset records and persistence
// ---------------------------------------------------------------------------

struct DatasetRecord {
  Mat3 F{};
  double psi = 0.0;            // MPa
  Vec6 sigma_voigt{};          // MPa
  std::array<double, 36> c_voigt{};  // MPa, 6x6 row-major
  bool has_tangent = true;
  int path = 0;
  int inc = 0;
};

using Dataset = std::vector<DatasetRecord>;

/// Evaluates the ground truth along all paths. Non-invertible states are
/// skipped with a warning counter (mirrors removing diverged simulations).
Dataset build_dataset(const GroundTruth& gt, const std::vector<LoadPath>& paths,
                      int* skipped = nullptr);

/// Record-level seeded split, disjoint and exhaustive.
void split(const Dataset& data, double ratio, std::uint64_t seed, Dataset& cal, Dataset& test);

void save_jsonl(const Dataset& data, const std::string& path);
Dataset load_jsonl(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

SampleConfig sample_config_from_json(const std::string& text);
std::string sample_config_to_json(const SampleConfig& cfg);

}  // namespace anisocal::datagen
