#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anisocal/rng.hpp"
#include "anisocal/structure.hpp"

using namespace anisocal;
using namespace anisocal::structure;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> random_params(SetKind kind, Rng& rng) {
  const ParamBox box = param_box(kind);
  std::vector<double> p(box.lo.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
  return p;
}
}  // namespace

TEST_CASE("build_g2: equal weights give the spherical tensor for any angles") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> p{1.0, 1.0, 1.0, rng.uniform(0, kPi), rng.uniform(-kPi / 2, kPi / 2),
                                rng.uniform(-kPi, kPi)};
    const Sym3 G = build_g2(p);
    for (int i = 0; i < 3; ++i) CHECK(G[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (int i = 3; i < 6; ++i) CHECK(std::abs(G[i]) < 1e-14);
  }
}

TEST_CASE("build_g2: single axis, zero angles") {
  const std::vector<double> p{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  const Sym3 G = build_g2(p);
  CHECK(G[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(G[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(G[2] == doctest::Approx(1.0));
}

TEST_CASE("build_g2: trace one and PSD over random draws") {
  Rng rng(2);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> p = random_params(SetKind::G2, rng);
    if (p[0] + p[1] + p[2] < 1e-8) p[0] = 0.5;
    const Sym3 G = build_g2(p);
    CHECK(std::abs(trace_sym(G) - 1.0) < 1e-12);
    const Spectral sp = spectral_sym3(G, 0.0);
    CHECK(sp.raw[0] > -1e-12);
  }
}

TEST_CASE("build_g2: degenerate weights rejected") {
  const std::vector<double> p{0.0, 0.0, 0.0, 0.1, 0.1, 0.1};
  CHECK_THROWS_AS(build_g2(p), DegenerateWeights);
}

TEST_CASE("build_g4: orthonormal frame gives 1/3 sum of fourth powers") {
  // A_alpha = e_alpha: a=1, angles selecting the Cartesian axes
  const std::vector<double> p{1.0, kPi / 2, 0.0, 1.0, kPi / 2, kPi / 2, 1.0, 0.0, 0.0};
  const Sym4Full G = build_g4(p);
  CHECK(G(0, 0, 0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(G(1, 1, 1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(G(2, 2, 2, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(G(0, 0, 1, 1)) < 1e-14);
  CHECK(G.generalized_trace() == doctest::Approx(1.0));
}

TEST_CASE("build_g4: two-vector tensor matches the identified cubic-sphere pattern") {
  // a = (1,1,0), A1 = e2, A2 = e3 -> G = (e2^x4 + e3^x4)/2 with Voigt diagonal
  // entries 0.5 at the (22) and (33) slots
  const std::vector<double> p{1.0, kPi / 2, kPi / 2, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const Sym4Full G = build_g4(p);
  CHECK(G(1, 1, 1, 1) == doctest::Approx(0.5));
  CHECK(G(2, 2, 2, 2) == doctest::Approx(0.5));
  CHECK(std::abs(G(0, 0, 0, 0)) < 1e-14);
  CHECK(std::abs(G(1, 1, 2, 2)) < 1e-14);
  CHECK(G.generalized_trace() == doctest::Approx(1.0));
}

TEST_CASE("build_g4: generalized trace one and PSD over random draws") {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> p = random_params(SetKind::G4, rng);
    if (p[0] + p[3] + p[6] < 1e-4) p[0] = 0.5;
    const Sym4Full G = build_g4(p);
    CHECK(std::abs(G.generalized_trace() - 1.0) < 1e-12);
  }
  // S : G : S >= 0 for random symmetric S
  std::vector<double> p = random_params(SetKind::G4, rng);
  p[0] = 0.9;
  const Sym4Full G = build_g4(p);
  for (int t = 0; t < 1000; ++t) {
    Sym3 S;
    for (int i = 0; i < 6; ++i) S[i] = rng.normal();
    CHECK(G.quad_form(S) >= -1e-12);
  }
}

TEST_CASE("build_g6: single vector") {
  const std::vector<double> p{1.0, kPi / 2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const Sym6Full G = build_g6(p);
  CHECK(G(0, 0, 0, 0, 0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(G(0, 0, 0, 0, 0, 1)) < 1e-14);
  CHECK(G.generalized_trace() == doctest::Approx(1.0));
}

TEST_CASE("build_g6: hexagonal paper vectors have generalized trace one") {
  // A1 ~ (-0.66, 0.38, 0), A2 ~ (0, 0.76, 0), A3 ~ (-0.66, -0.38, 0)
  auto angles = [](double x, double y, double z) {
    const double a = std::sqrt(x * x + y * y + z * z);
    const double th = std::acos(z / a);
    double ph = std::atan2(y, x);
    if (ph < 0) ph += 2 * kPi;
    return std::array<double, 3>{a, th, ph};
  };
  const auto v1 = angles(-0.66, 0.38, 0.0);
  const auto v2 = angles(0.0, 0.76, 0.0);
  const auto v3 = angles(-0.66, -0.38, 0.0);
  const std::vector<double> p{v1[0], v1[1], v1[2], v2[0], v2[1], v2[2], v3[0], v3[1], v3[2]};
  const Sym6Full G = build_g6(p);
  CHECK(G.generalized_trace() == doctest::Approx(1.0));

  const StructureSpec spec = make_structure(SetKind::G6, p);
  const Classification c = classify(spec);
  CHECK(c.label == SymmetryLabel::Hexagonal);
}

TEST_CASE("build_g6: random draws keep trace and PSD") {
  Rng rng(4);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> p = random_params(SetKind::G6, rng);
    if (p[0] + p[3] + p[6] < 1e-4) p[0] = 0.5;
    const Sym6Full G = build_g6(p);
    CHECK(std::abs(G.generalized_trace() - 1.0) < 1e-12);
  }
  std::vector<double> p = random_params(SetKind::G6, rng);
  p[0] = 0.9;
  const Sym6Full G = build_g6(p);
  for (int t = 0; t < 1000; ++t) {
    Sym3 S;
    std::array<double, 3> A{};
    for (int i = 0; i < 6; ++i) S[i] = rng.normal();
    for (int i = 0; i < 3; ++i) A[static_cast<std::size_t>(i)] = rng.normal();
    CHECK(G.quad_form(S, A) >= -1e-12);
  }
}

TEST_CASE("classify: spherical tensor is isotropic for all angles") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> p{0.4, 0.4, 0.4, rng.uniform(0, kPi), rng.uniform(-kPi / 2, kPi / 2),
                                rng.uniform(-kPi, kPi)};
    const Classification c = classify(make_structure(SetKind::G2, p));
    CHECK(c.label == SymmetryLabel::Isotropic);
  }
}

TEST_CASE("classify: paper stochastic-fibers tensor is TI with axis near e3") {
  StructureSpec spec;
  spec.kind = SetKind::G2;
  spec.params = {0, 0, 0, 0, 0, 0};
  spec.g.a = {0.01, 0.02, 0.97, 0.0, 0.0, 0.01};
  const Classification c = classify(spec, 0.05);
  CHECK(c.label == SymmetryLabel::TransverselyIsotropic);
  const double cosangle = std::abs(c.axis[2]);
  CHECK(cosangle > std::cos(5.0 * kPi / 180.0));
}

TEST_CASE("classify: three distinct eigenvalues is orthotropic") {
  const std::vector<double> p{0.8, 0.35, 0.1, 0.3, 0.2, 0.1};
  const Classification c = classify(make_structure(SetKind::G2, p));
  CHECK(c.label == SymmetryLabel::Orthotropic);
}

TEST_CASE("classify: paper chain-spheres pair is monoclinic") {
  StructureSpec spec;
  spec.kind = SetKind::Pair;
  spec.params.assign(12, 0.0);
  spec.g.a = {0.08, 0.53, 0.39, -0.01, 0.04, 0.02};
  spec.g_second.a = {0.5, 0.49, 0.01, -0.0, 0.05, -0.02};
  const Classification c = classify(spec);
  CHECK(c.label == SymmetryLabel::Monoclinic);
  CHECK(c.w_norm == doctest::Approx(0.037).epsilon(0.2));
  CHECK(c.v1_norm < 0.02 * c.w_norm);
  CHECK(c.v2_norm < 0.02 * c.w_norm);
}

TEST_CASE("classify pair: isotropic, TI, orthotropic, triclinic branches") {
  Sym3 sph{};
  sph[0] = sph[1] = sph[2] = 1.0 / 3.0;

  CHECK(classify_pair(sph, sph).label == SymmetryLabel::Isotropic);

  Sym3 ti{};
  ti[0] = 0.1; ti[1] = 0.1; ti[2] = 0.8;
  CHECK(classify_pair(ti, sph).label == SymmetryLabel::TransverselyIsotropic);
  CHECK(classify_pair(ti, ti).label == SymmetryLabel::TransverselyIsotropic);

  Sym3 ortho{};
  ortho[0] = 0.6; ortho[1] = 0.3; ortho[2] = 0.1;
  CHECK(classify_pair(ortho, sph).label == SymmetryLabel::Orthotropic);

  // two TI tensors about different axes in a common frame: orthotropic
  Sym3 tix{};
  tix[0] = 0.8; tix[1] = 0.1; tix[2] = 0.1;
  CHECK(classify_pair(ti, tix).label == SymmetryLabel::Orthotropic);

  // strongly rotated eigensystems with wide spreads: triclinic
  const Sym3 g1 =
      build_g2(std::vector<double>{0.3034, 0.0121, 0.9184, 1.0260, -0.8601, -2.3891});
  const Sym3 g2 =
      build_g2(std::vector<double>{0.3574, 0.9655, 0.0022, 1.2461, 0.4735, 0.8990});
  CHECK(classify_pair(g1, g2).label == SymmetryLabel::Triclinic);
}

TEST_CASE("classify: cubic and tetragonal vector patterns") {
  const double th = kPi / 2;
  // orthonormal, equal lengths -> cubic
  std::vector<double> p{0.8, th, 0.0, 0.8, th, kPi / 2, 0.8, 0.0, 0.0};
  CHECK(classify(make_structure(SetKind::G4, p)).label == SymmetryLabel::Cubic);
  // orthogonal, |A1|=|A2| != |A3| -> tetragonal
  p[6] = 0.3;
  CHECK(classify(make_structure(SetKind::G4, p)).label == SymmetryLabel::Tetragonal);
  // two vectors only -> tetragonal
  p[6] = 0.0;
  CHECK(classify(make_structure(SetKind::G4, p)).label == SymmetryLabel::Tetragonal);
  // non-orthogonal -> indeterminate
  p = {0.8, th, 0.0, 0.8, th, 0.4, 0.8, 0.0, 0.0};
  CHECK(classify(make_structure(SetKind::G4, p)).label == SymmetryLabel::Indeterminate);
}

TEST_CASE("classify is rotation-equivariant") {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p = random_params(SetKind::G2, rng);
    if (p[0] + p[1] + p[2] < 0.05) p[1] = 0.4;
    const StructureSpec s = make_structure(SetKind::G2, p);
    const SymmetryLabel base = classify(s).label;

    // rotate the realized tensor by a random rotation
    const Mat3 Q = rotation_from_angles(rng.uniform(0, kPi), rng.uniform(-kPi / 2, kPi / 2),
                                        rng.uniform(-kPi, kPi));
    StructureSpec rs = s;
    rs.g = sym_part(Q * to_mat(s.g) * transpose(Q));
    CHECK(classify(rs).label == base);
  }
}
