#include "anisocal/structure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace anisocal::structure {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

std::array<double, 3> matvec(const Sym3& S, const std::array<double, 3>& x) {
  const Mat3 M = to_mat(S);
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i)
    r[static_cast<std::size_t>(i)] = M(i, 0) * x[0] + M(i, 1) * x[1] + M(i, 2) * x[2];
  return r;
}
}  // namespace

ParamBox param_box(SetKind kind) {
  ParamBox b;
  auto g2_block = [&] {
    b.lo.insert(b.lo.end(), {0.0, 0.0, 0.0, 0.0, -kPi / 2.0, -kPi});
    b.hi.insert(b.hi.end(), {1.0, 1.0, 1.0, kPi, kPi / 2.0, kPi});
  };
  auto vec_block = [&] {
    for (int a = 0; a < 3; ++a) {
      b.lo.insert(b.lo.end(), {0.0, 0.0, 0.0});
      b.hi.insert(b.hi.end(), {1.0, kPi, 2.0 * kPi});
    }
  };
  switch (kind) {
    case SetKind::Iso:
    case SetKind::Coord:
      break;
    case SetKind::G2:
      g2_block();
      break;
    case SetKind::G4:
    case SetKind::G6:
      vec_block();
      break;
    case SetKind::Pair:
      g2_block();
      g2_block();
      break;
  }
  return b;
}

Sym3 build_g2(std::span<const double> params) {
  if (params.size() != 6) throw KindMismatch("build_g2: expected 6 parameters");
  const double sum = params[0] + params[1] + params[2];
  if (sum < 1e-8) throw DegenerateWeights("build_g2: g1+g2+g3 < 1e-8");
  return g2_core(params.data());
}

Sym4Full build_g4(std::span<const double> params) {
  if (params.size() != 9) throw KindMismatch("build_g4: expected 9 parameters");
  const auto A = builder_vectors(params.data());
  double n = 0.0;
  for (const auto& v : A) {
    const double l2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    n += l2 * l2;
  }
  if (n <= 1e-12) throw DegenerateVectors("build_g4: normalizer <= 1e-12");
  Sym4Full g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
          double s = 0.0;
          for (const auto& v : A)
            s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] *
                 v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(l)];
          g.at(i, j, k, l) = s / n;
        }
  return g;
}

Sym6Full build_g6(std::span<const double> params) {
  if (params.size() != 9) throw KindMismatch("build_g6: expected 9 parameters");
  const auto A = builder_vectors(params.data());
  double n = 0.0;
  for (const auto& v : A) {
    const double l2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    n += l2 * l2 * l2;
  }
  if (n <= 1e-12) throw DegenerateVectors("build_g6: normalizer <= 1e-12");
  Sym6Full g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k)
        for (int l = k; l < 3; ++l)
          for (int m = l; m < 3; ++m)
            for (int o = m; o < 3; ++o) {
              double s = 0.0;
              for (const auto& v : A)
                s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] *
                     v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(l)] *
                     v[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(o)];
              g.at(i, j, k, l, m, o) = s / n;
            }
  return g;
}

StructureSpec make_structure(SetKind kind, std::vector<double> params) {
  StructureSpec s;
  s.kind = kind;
  s.params = std::move(params);
  const int expected = structure_param_count(kind);
  if (static_cast<int>(s.params.size()) != expected)
    throw KindMismatch("make_structure: wrong parameter count for kind " + set_kind_name(kind));
  switch (kind) {
    case SetKind::Iso:
    case SetKind::Coord:
      break;
    case SetKind::G2:
      s.g = build_g2(s.params);
      break;
    case SetKind::G4:
      s.g4 = build_g4(s.params);
      break;
    case SetKind::G6:
      s.g6 = build_g6(s.params);
      break;
    case SetKind::Pair:
      s.g = build_g2(std::span<const double>(s.params).subspan(0, 6));
      s.g_second = build_g2(std::span<const double>(s.params).subspan(6, 6));
      break;
  }
  return s;
}

std::string symmetry_name(SymmetryLabel s) {
  switch (s) {
    case SymmetryLabel::Isotropic: return "isotropic";
    case SymmetryLabel::TransverselyIsotropic: return "transversely_isotropic";
    case SymmetryLabel::Orthotropic: return "orthotropic";
    case SymmetryLabel::Tetragonal: return "tetragonal";
    case SymmetryLabel::Cubic: return "cubic";
    case SymmetryLabel::Hexagonal: return "hexagonal";
    case SymmetryLabel::Monoclinic: return "monoclinic";
    case SymmetryLabel::Triclinic: return "triclinic";
    case SymmetryLabel::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

Classification classify_single_g2(const Sym3& G, double tol) {
  Classification c;
  const Spectral sp = spectral_sym3(G, tol);
  c.eig_gaps = {sp.raw[1] - sp.raw[0], sp.raw[2] - sp.raw[1]};
  if (sp.n_groups == 1) {
    c.label = SymmetryLabel::Isotropic;
  } else if (sp.n_groups == 2) {
    c.label = SymmetryLabel::TransverselyIsotropic;
    // the preferred axis belongs to the non-degenerate eigenvalue
    const double gap_lo = sp.raw[1] - sp.raw[0];
    const double gap_hi = sp.raw[2] - sp.raw[1];
    c.axis = (gap_hi > gap_lo) ? sp.axes[2] : sp.axes[0];
  } else {
    c.label = SymmetryLabel::Orthotropic;
  }
  return c;
}

}  // namespace

Classification classify_pair(const Sym3& g1, const Sym3& g2, double tol, double pair_tol) {
  Classification c;
  const Mat3 M = mul_sym(g1, g2);
  std::array<double, 3> w{};
  w[0] = M(1, 2) - M(2, 1);
  w[1] = M(2, 0) - M(0, 2);
  w[2] = M(0, 1) - M(1, 0);
  // e_LMN G1_MP G2_PN = e_LMN M_MN; for L=0: M_12 - M_21 etc. with sign from
  // the Levi-Civita convention (e_012=+1): w_0 = M_12 - M_21? e_0MN nonzero for
  // (M,N)=(1,2):+1 and (2,1):-1 -> w_0 = M_12 - M_21. Matches above.
  c.w_norm = norm3(w);
  const double scale = frob(g1) * frob(g2);

  const Spectral s1 = spectral_sym3(g1, tol);
  const Spectral s2 = spectral_sym3(g2, tol);
  c.eig_gaps = {s1.raw[2] - s1.raw[0], s2.raw[2] - s2.raw[0]};

  if (c.w_norm <= pair_tol * std::max(scale, 1e-300)) {
    // commuting: joint spectrum of a generic combination decides iso/TI/ortho
    const double xi = 0.6180339887498949;
    const Sym3 Gc = g1 + g2 * xi;
    const Spectral sc = spectral_sym3(Gc, tol);
    if (sc.n_groups == 1) {
      c.label = SymmetryLabel::Isotropic;
    } else if (sc.n_groups == 2) {
      c.label = SymmetryLabel::TransverselyIsotropic;
      const double gap_lo = sc.raw[1] - sc.raw[0];
      const double gap_hi = sc.raw[2] - sc.raw[1];
      c.axis = (gap_hi > gap_lo) ? sc.axes[2] : sc.axes[0];
    } else {
      c.label = SymmetryLabel::Orthotropic;
    }
    return c;
  }

  const auto v1 = cross(matvec(g1, w), w);
  const auto v2 = cross(matvec(g2, w), w);
  c.v1_norm = norm3(v1);
  c.v2_norm = norm3(v2);
  if (c.v1_norm <= pair_tol * c.w_norm && c.v2_norm <= pair_tol * c.w_norm) {
    c.label = SymmetryLabel::Monoclinic;
    for (int i = 0; i < 3; ++i) c.axis[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / c.w_norm;
  } else {
    c.label = SymmetryLabel::Triclinic;
  }
  return c;
}

namespace {

Classification classify_vectors(const StructureSpec& spec, double tol) {
  Classification c;
  const auto A = builder_vectors(spec.params.data());
  std::array<double, 3> len{norm3(A[0]), norm3(A[1]), norm3(A[2])};
  const double lmax = std::max({len[0], len[1], len[2]});
  if (lmax <= 0.0) return c;

  // near-zero vectors are treated as absent (orthogonal to everything)
  std::array<bool, 3> live{};
  for (int i = 0; i < 3; ++i) live[static_cast<std::size_t>(i)] = len[static_cast<std::size_t>(i)] > tol * lmax;

  auto ndot = [&](int i, int j) {
    const auto &a = A[static_cast<std::size_t>(i)], &b = A[static_cast<std::size_t>(j)];
    return (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) /
           (len[static_cast<std::size_t>(i)] * len[static_cast<std::size_t>(j)]);
  };

  bool orthogonal = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (live[static_cast<std::size_t>(i)] && live[static_cast<std::size_t>(j)] &&
          std::abs(ndot(i, j)) > tol)
        orthogonal = false;

  if (spec.kind == SetKind::G4) {
    if (!orthogonal) return c;
    std::array<double, 3> l = len;
    std::sort(l.begin(), l.end());
    const bool all_equal = (l[2] - l[0]) <= tol * l[2];
    const bool two_equal_lo = (l[1] - l[0]) <= tol * l[2] && (l[2] - l[1]) > tol * l[2];
    const bool two_equal_hi = (l[2] - l[1]) <= tol * l[2] && (l[1] - l[0]) > tol * l[2];
    if (all_equal) {
      c.label = SymmetryLabel::Cubic;
    } else if (two_equal_lo || two_equal_hi) {
      c.label = SymmetryLabel::Tetragonal;
    }
    return c;
  }

  // G6: hexagonal when lengths are equal, normalized dots are +-1/2 and the
  // three vectors are coplanar
  if (!live[0] || !live[1] || !live[2]) return c;
  std::array<double, 3> l = len;
  std::sort(l.begin(), l.end());
  if ((l[2] - l[0]) > tol * l[2]) return c;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(std::abs(ndot(i, j)) - 0.5) > tol) return c;
  std::array<std::array<double, 3>, 3> U = A;
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r) U[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] /= len[static_cast<std::size_t>(i)];
  const double vol = U[0][0] * (U[1][1] * U[2][2] - U[1][2] * U[2][1]) -
                     U[0][1] * (U[1][0] * U[2][2] - U[1][2] * U[2][0]) +
                     U[0][2] * (U[1][0] * U[2][1] - U[1][1] * U[2][0]);
  if (std::abs(vol) > tol) return c;
  c.label = SymmetryLabel::Hexagonal;
  const auto n = cross(U[0], U[1]);
  const double nn = norm3(n);
  if (nn > 0) c.axis = {n[0] / nn, n[1] / nn, n[2] / nn};
  return c;
}

}  // namespace

Classification classify(const StructureSpec& spec, double tol, double pair_tol) {
  switch (spec.kind) {
    case SetKind::Iso:
    case SetKind::Coord: {
      Classification c;
      c.label = SymmetryLabel::Indeterminate;
      if (spec.kind == SetKind::Iso) c.label = SymmetryLabel::Isotropic;
      return c;
    }
    case SetKind::G2:
      return classify_single_g2(spec.g, tol);
    case SetKind::Pair:
      return classify_pair(spec.g, spec.g_second, tol, pair_tol);
    case SetKind::G4:
    case SetKind::G6:
      return classify_vectors(spec, tol);
  }
  return {};
}

}  // namespace anisocal::structure
