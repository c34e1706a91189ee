#include "anisocal/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anisocal/invariants_cspace.hpp"
#include "anisocal/rng.hpp"

namespace anisocal::datagen {

namespace {
using json = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

std::vector<LoadPath> sample_paths(const SampleConfig& cfg) {
  const int n = cfg.n_samp;
  Rng rng(cfg.seed);

  // one stratified permutation per dimension
  const std::array<std::array<double, 2>, 6> ranges{cfg.lambda1, cfg.lambda2, cfg.jrange,
                                                    cfg.theta1,  cfg.theta2,  cfg.theta3};
  std::vector<std::array<double, 6>> pts(static_cast<std::size_t>(n));
  for (int d = 0; d < 6; ++d) {
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    rng.shuffle(perm);
    const double lo = ranges[static_cast<std::size_t>(d)][0];
    const double hi = ranges[static_cast<std::size_t>(d)][1];
    for (int i = 0; i < n; ++i) {
      const double stratum = static_cast<double>(perm[static_cast<std::size_t>(i)]);
      pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] =
          lo + (hi - lo) * (stratum + rng.uniform()) / static_cast<double>(n);
    }
  }

  std::vector<LoadPath> paths(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& s = pts[static_cast<std::size_t>(i)];
    const Mat3 Q = structure::rotation_from_angles(s[3], s[4], s[5]);
    const Mat3 Qt = transpose(Q);
    LoadPath& p = paths[static_cast<std::size_t>(i)];
    p.id = i;
    p.F.reserve(static_cast<std::size_t>(cfg.n_inc));
    for (int k = 1; k <= cfg.n_inc; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(cfg.n_inc);
      const double l1 = 1.0 + t * (s[0] - 1.0);
      const double l2 = 1.0 + t * (s[1] - 1.0);
      const double jj = 1.0 + t * (s[2] - 1.0);
      Mat3 D{};
      D(0, 0) = l1;
      D(1, 1) = l2;
      D(2, 2) = jj / (l1 * l2);
      p.F.push_back(Qt * D * Q);
    }
  }
  return paths;
}

std::vector<LoadPath> dedup_filter(const std::vector<LoadPath>& paths, double d_tol) {
  if (paths.empty()) return {};

  // Green-Lagrange strains of every state, plus the heuristic delta
  std::vector<std::vector<Sym3>> E(paths.size());
  double max_e2 = 0.0;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    E[p].reserve(paths[p].F.size());
    for (const Mat3& F : paths[p].F) {
      const Sym3 e = kinematics(F).E;
      const double n2 = frob(e) * frob(e);
      max_e2 = std::max(max_e2, n2);
      E[p].push_back(e);
    }
  }
  const double delta = max_e2 / 3.0;

  std::vector<LoadPath> out;
  std::vector<const Sym3*> unique_states;
  std::vector<double> unique_norm2;

  auto retain = [&](std::size_t p) {
    out.push_back(paths[p]);
    for (const Sym3& e : E[p]) {
      unique_states.push_back(&e);
      unique_norm2.push_back(frob(e) * frob(e));
    }
  };

  retain(0);
  for (std::size_t p = 1; p < paths.size(); ++p) {
    bool path_unique = false;
    for (const Sym3& e : E[p]) {
      bool unique = true;
      for (std::size_t u = 0; u < unique_states.size(); ++u) {
        const Sym3 d = e - *unique_states[u];
        const double dist2 = frob(d) * frob(d);
        const double denom = std::max(unique_norm2[u] - delta, 0.0) + delta;
        if (dist2 / denom < d_tol) {
          unique = false;
          break;
        }
      }
      if (unique) {
        path_unique = true;
        break;
      }
    }
    if (path_unique) retain(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground-truth materials
// ---------------------------------------------------------------------------

GtFamily family_from_name(const std::string& s) {
  if (s == "neohooke") return GtFamily::NeoHooke;
  if (s == "ti") return GtFamily::TransverselyIsotropic;
  if (s == "orthotropic") return GtFamily::Orthotropic;
  if (s == "cubic") return GtFamily::Cubic;
  if (s == "hexagonal") return GtFamily::Hexagonal;
  if (s == "monoclinic") return GtFamily::Monoclinic;
  throw DomainError("unknown ground-truth family: " + s);
}

std::string family_name(GtFamily f) {
  switch (f) {
    case GtFamily::NeoHooke: return "neohooke";
    case GtFamily::TransverselyIsotropic: return "ti";
    case GtFamily::Orthotropic: return "orthotropic";
    case GtFamily::Cubic: return "cubic";
    case GtFamily::Hexagonal: return "hexagonal";
    case GtFamily::Monoclinic: return "monoclinic";
  }
  return "?";
}

namespace {

Sym3 rotated_diag(const Mat3& Q, double l1, double l2, double l3) {
  Mat3 D{};
  D(0, 0) = l1;
  D(1, 1) = l2;
  D(2, 2) = l3;
  return sym_part(Q * D * transpose(Q));
}

std::array<double, 3> col(const Mat3& Q, int c) { return {Q(0, c), Q(1, c), Q(2, c)}; }

// structure data + anisotropic invariant terms for each family: quadratic
// penalties (k/2)(A - A(1))^2 on `slots`, plus linear combinations for
// families whose anisotropy must already show in the linear elasticity
struct GtRealization {
  SetKind kind = SetKind::Iso;
  invariants::Realized<double> rs;
  std::vector<int> slots;
  std::vector<std::pair<int, double>> lin;  // (slot, coefficient)
  double lin_const = 0.0;
};

invariants::Realized<double> realized_g2(const Sym3& G) {
  invariants::Realized<double> rs;
  rs.kind = SetKind::G2;
  rs.G1 = G;
  rs.G1sq = square_sym(G);
  return rs;
}

invariants::Realized<double> realized_g4(const std::array<std::array<double, 3>, 3>& A) {
  invariants::Realized<double> rs;
  rs.kind = SetKind::G4;
  Mat66 S{};
  double n = 0.0;
  for (const auto& v : A) {
    const Vec6 t = structure::dyad_mandel(v);
    const double l2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    n += l2 * l2;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) S(i, j) += t[i] * t[j];
  }
  rs.op4 = S * (1.0 / n);
  rs.ghat4 = matvec66(rs.op4, to_mandel(sym3_identity<double>()));
  return rs;
}

invariants::Realized<double> realized_g6(const std::array<std::array<double, 3>, 3>& A) {
  invariants::Realized<double> rs;
  rs.kind = SetKind::G6;
  W666 W{};
  double n = 0.0;
  for (const auto& v : A) {
    const Vec6 t = structure::dyad_mandel(v);
    const double l2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    n += l2 * l2 * l2;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) W(i, j, k) += t[i] * t[j] * t[k];
  }
  for (std::size_t k = 0; k < 216; ++k) rs.w6.a[k] = W.a[k] / n;
  const Vec6 one = to_mandel(sym3_identity<double>());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += rs.w6(k, i, j) * one[k];
      rs.m1(i, j) = s;
    }
  rs.t1 = matvec66(rs.m1, one);
  return rs;
}

GtRealization gt_realize(const GroundTruth& gt) {
  GtRealization r;
  const Mat3& Q = gt.Q_true;
  switch (gt.family) {
    case GtFamily::NeoHooke:
      r.kind = SetKind::Iso;
      r.rs.kind = SetKind::Iso;
      break;
    case GtFamily::TransverselyIsotropic: {
      r.kind = SetKind::G2;
      const auto a = col(Q, 2);
      Sym3 G{};
      G[0] = a[0] * a[0]; G[1] = a[1] * a[1]; G[2] = a[2] * a[2];
      G[3] = a[1] * a[2]; G[4] = a[0] * a[2]; G[5] = a[0] * a[1];
      r.rs = realized_g2(G);
      r.slots = {3};  // K4
      break;
    }
    case GtFamily::Orthotropic: {
      r.kind = SetKind::G2;
      r.rs = realized_g2(rotated_diag(Q, 0.5, 0.3, 0.2));
      r.slots = {3};  // K4 of a three-eigenvalue tensor
      break;
    }
    case GtFamily::Cubic: {
      r.kind = SetKind::G4;
      r.rs = realized_g4({col(Q, 0), col(Q, 1), col(Q, 2)});
      // (k/2) sum_a (C*_aa - 1)^2 in the cube frame = (k/2)(3 L8 - 2 I1 + 3):
      // zero energy and stress at identity, cubic already at linear order
      r.lin = {{7, 1.5 * gt.k}, {0, -gt.k}};
      r.lin_const = 1.5 * gt.k;
      break;
    }
    case GtFamily::Hexagonal: {
      r.kind = SetKind::G6;
      std::array<std::array<double, 3>, 3> A{};
      for (int v = 0; v < 3; ++v) {
        const double ang = 2.0 * kPi * v / 3.0;
        for (int i = 0; i < 3; ++i)
          A[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)] =
              Q(i, 0) * std::cos(ang) + Q(i, 1) * std::sin(ang);
      }
      r.rs = realized_g6(A);
      r.slots = {5};  // M6 = tr H1^3 carries the 6-fold symmetry
      break;
    }
    case GtFamily::Monoclinic: {
      r.kind = SetKind::Pair;
      // both tensors share exactly the Q.e3 eigenvector; in-plane frames differ
      const Mat3 Rz = [&] {
        Mat3 R{};
        const double c = std::cos(kPi / 6.0), s = std::sin(kPi / 6.0);
        R(0, 0) = c; R(0, 1) = -s; R(1, 0) = s; R(1, 1) = c; R(2, 2) = 1.0;
        return R;
      }();
      r.rs.kind = SetKind::Pair;
      r.rs.G1 = rotated_diag(Q, 0.55, 0.35, 0.10);
      r.rs.G1sq = square_sym(r.rs.G1);
      r.rs.G2 = rotated_diag(Q * Rz, 0.50, 0.20, 0.30);
      r.rs.G2sq = square_sym(r.rs.G2);
      r.rs.pair_sym = sym_part(mul_sym(r.rs.G1, r.rs.G2));
      r.slots = {3, 7};  // N4, N8
      break;
    }
  }
  return r;
}

}  // namespace

energy::MaterialResponse ground_truth_eval(const GroundTruth& gt, const Mat3& F, int order,
                                           bool spatial) {
  const GtRealization r = gt_realize(gt);
  const invariants::InvariantBundle b = invariants::invariant_bundle(r.rs, F, order);

  invariants::CsetDeriv<double> cs1;
  invariants::eval_cspace(r.rs, sym3_identity<double>(), 0, cs1);

  const double mu = gt.E / (2.0 * (1.0 + gt.nu));
  const double lam = gt.E * gt.nu / ((1.0 + gt.nu) * (1.0 - 2.0 * gt.nu));
  const double I1 = b.values[0];
  const double I3 = b.values[2];

  energy::MaterialResponse out;
  out.order = order;
  out.psi = 0.5 * (mu * (I1 - std::log(I3) - 3.0) + 0.5 * lam * (I3 - std::log(I3) - 1.0));
  const double c1 = 0.5 * mu;
  const double c3 = 0.5 * (-mu / I3 + 0.5 * lam * (1.0 - 1.0 / I3));
  const double c33 = 0.5 * (mu / (I3 * I3) + 0.5 * lam / (I3 * I3));
  for (int s : r.slots) {
    const double dv = b.values[static_cast<std::size_t>(s)] - cs1.value[static_cast<std::size_t>(s)];
    out.psi += 0.5 * gt.k * dv * dv;
  }
  out.psi += r.lin_const;
  for (const auto& [s, w] : r.lin) out.psi += w * b.values[static_cast<std::size_t>(s)];
  if (order < 1) return out;

  auto add_p = [&out](double w, const Mat3& G) {
    for (int i = 0; i < 9; ++i) out.P.a[static_cast<std::size_t>(i)] += w * G.a[static_cast<std::size_t>(i)];
  };
  add_p(c1, b.dF[0]);
  add_p(c3, b.dF[2]);
  for (int s : r.slots) {
    const double dv = b.values[static_cast<std::size_t>(s)] - cs1.value[static_cast<std::size_t>(s)];
    add_p(gt.k * dv, b.dF[static_cast<std::size_t>(s)]);
  }
  for (const auto& [s, w] : r.lin) add_p(w, b.dF[static_cast<std::size_t>(s)]);

  if (order >= 2) {
    auto add_outer = [&out](double w, const Mat3& Ga, const Mat3& Gb) {
      for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k)
          out.A.a[static_cast<std::size_t>(i * 9 + k)] +=
              w * Ga.a[static_cast<std::size_t>(i)] * Gb.a[static_cast<std::size_t>(k)];
    };
    add_outer(c33, b.dF[2], b.dF[2]);
    out.A.axpy(c1, b.ddF[0]);
    out.A.axpy(c3, b.ddF[2]);
    for (int s : r.slots) {
      const double dv = b.values[static_cast<std::size_t>(s)] - cs1.value[static_cast<std::size_t>(s)];
      add_outer(gt.k, b.dF[static_cast<std::size_t>(s)], b.dF[static_cast<std::size_t>(s)]);
      out.A.axpy(gt.k * dv, b.ddF[static_cast<std::size_t>(s)]);
    }
    for (const auto& [s, w] : r.lin) out.A.axpy(w, b.ddF[static_cast<std::size_t>(s)]);
  }

  if (spatial && order >= 1) {
    const energy::SpatialMeasures sm = energy::transform_measures(F, out.P, out.A);
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

Dataset build_dataset(const GroundTruth& gt, const std::vector<LoadPath>& paths, int* skipped) {
  Dataset data;
  int skip = 0;
  for (const LoadPath& p : paths) {
    for (std::size_t k = 0; k < p.F.size(); ++k) {
      DatasetRecord rec;
      rec.F = p.F[k];
      rec.path = p.id;
      rec.inc = static_cast<int>(k);
      try {
        const energy::MaterialResponse r = ground_truth_eval(gt, p.F[k], 2, true);
        rec.psi = r.psi;
        rec.sigma_voigt = voigt_stress(r.sigma);
        const VoigtMat cv = voigt_tangent(r.c, 1e-6);
        rec.c_voigt = cv.a;
      } catch (const NonInvertible&) {
        ++skip;
        continue;
      }
      data.push_back(rec);
    }
  }
  if (skipped != nullptr) *skipped = skip;
  return data;
}

void split(const Dataset& data, double ratio, std::uint64_t seed, Dataset& cal, Dataset& test) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("split: ratio must be in (0,1)");
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  const std::size_t ncal = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.size())));
  cal.clear();
  test.clear();
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < ncal ? cal : test).push_back(data[idx[i]]);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void save_jsonl(const Dataset& data, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  for (const DatasetRecord& r : data) {
    json j;
    j["F"] = r.F.a;
    j["psi"] = r.psi;
    j["sigma_voigt"] = r.sigma_voigt.a;
    if (r.has_tangent) j["c_voigt"] = r.c_voigt;
    j["path"] = r.path;
    j["inc"] = r.inc;
    f << j.dump() << "\n";
  }
}

Dataset load_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for reading: " + path);
  Dataset data;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw CorruptPayload(std::string("dataset line parse failure: ") + e.what());
    }
    DatasetRecord r;
    const auto Fv = j["F"].get<std::vector<double>>();
    std::copy(Fv.begin(), Fv.end(), r.F.a.begin());
    r.psi = j["psi"].get<double>();
    const auto sv = j["sigma_voigt"].get<std::vector<double>>();
    std::copy(sv.begin(), sv.end(), r.sigma_voigt.a.begin());
    if (j.contains("c_voigt")) {
      const auto cv = j["c_voigt"].get<std::vector<double>>();
      std::copy(cv.begin(), cv.end(), r.c_voigt.begin());
      r.has_tangent = true;
    } else {
      r.has_tangent = false;
    }
    r.path = j["path"].get<int>();
    r.inc = j["inc"].get<int>();
    data.push_back(r);
  }
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "F_11,F_12,F_13,F_21,F_22,F_23,F_31,F_32,F_33,psi";
  const char* vn[6] = {"11", "22", "33", "23", "13", "12"};
  for (const char* v : vn) f << ",sig_" << v;
  for (const char* a : vn)
    for (const char* b : vn) f << ",c_" << a << "_" << b;
  f << ",path,inc\n";
  f.precision(17);
  for (const DatasetRecord& r : data) {
    for (double x : r.F.a) f << x << ",";
    f << r.psi;
    for (double x : r.sigma_voigt.a) f << "," << x;
    for (double x : r.c_voigt) f << "," << x;
    f << "," << r.path << "," << r.inc << "\n";
  }
}

SampleConfig sample_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw CorruptPayload(std::string("sample config parse failure: ") + e.what());
  }
  SampleConfig cfg;
  auto range = [&](const char* key, std::array<double, 2>& out) {
    if (j.contains(key)) out = j[key].get<std::array<double, 2>>();
  };
  range("lambda1", cfg.lambda1);
  range("lambda2", cfg.lambda2);
  range("J", cfg.jrange);
  range("theta1", cfg.theta1);
  range("theta2", cfg.theta2);
  range("theta3", cfg.theta3);
  if (j.contains("n_samp")) cfg.n_samp = j["n_samp"].get<int>();
  if (j.contains("n_inc")) cfg.n_inc = j["n_inc"].get<int>();
  if (j.contains("d_tol")) cfg.d_tol = j["d_tol"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (cfg.lambda1[0] <= 0 || cfg.lambda2[0] <= 0 || cfg.jrange[0] <= 0 || cfg.n_inc < 2)
    throw DomainError("sample config: stretch/J ranges must be positive and n_inc >= 2");
  return cfg;
}

std::string sample_config_to_json(const SampleConfig& cfg) {
  json j;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["J"] = cfg.jrange;
  j["theta1"] = cfg.theta1;
  j["theta2"] = cfg.theta2;
  j["theta3"] = cfg.theta3;
  j["n_samp"] = cfg.n_samp;
  j["n_inc"] = cfg.n_inc;
  j["d_tol"] = cfg.d_tol;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

}  // namespace anisocal::datagen
