#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "anisocal/energy.hpp"
#include "anisocal/rng.hpp"

using namespace anisocal;
using namespace anisocal::energy;
using network::ModelArtifact;

namespace {
constexpr double kPi = 3.14159265358979323846;

Mat3 random_f(Rng& rng, double spread = 0.2) {
  Mat3 F = eye3();
  for (int k = 0; k < 9; ++k) F.a[static_cast<std::size_t>(k)] += spread * rng.normal();
  if (det3(F) <= 0.35) return random_f(rng, spread * 0.6);
  return F;
}

ModelArtifact random_artifact(SetKind kind, Rng& rng, const std::vector<int>& hidden = {8, 8}) {
  ModelArtifact m;
  m.kind = kind;
  const auto box = structure::param_box(kind);
  std::vector<double> p(box.lo.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
  if ((kind == SetKind::G2 || kind == SetKind::Pair) && p[0] + p[1] + p[2] < 0.05) p[0] += 0.5;
  if (kind == SetKind::Pair && p[6] + p[7] + p[8] < 0.05) p[6] += 0.5;
  if ((kind == SetKind::G4 || kind == SetKind::G6) && p[0] + p[3] + p[6] < 0.05) p[0] += 0.5;
  m.structure = structure::make_structure(kind, p);

  const int n = invariant_count(kind);
  if (kind != SetKind::Coord) {
    m.gates.q.resize(static_cast<std::size_t>(n));
    for (double& q : m.gates.q) q = rng.uniform(0.1, 0.85);
  }
  m.pnn = network::init_pnn(n, hidden, rng);
  for (double& w : m.pnn.Wout) w = rng.uniform(0.05, 0.6);
  m.pnn.B = rng.uniform(0.0, 0.2);

  m.norm.Xmin.assign(static_cast<std::size_t>(n), 0.0);
  m.norm.Xmax.assign(static_cast<std::size_t>(n), 1.0);
  m.norm.degenerate.assign(static_cast<std::size_t>(n), false);
  for (int a = 0; a < n; ++a) {
    m.norm.Xmin[static_cast<std::size_t>(a)] = rng.uniform(-1.0, 0.5);
    m.norm.Xmax[static_cast<std::size_t>(a)] = rng.uniform(1.0, 4.0);
  }
  m.norm.Ymin = 0.0;
  m.norm.Ymax = rng.uniform(0.2, 2.0);
  m.lambda_gr = 0.01;
  return m;
}

const std::vector<SetKind> kModelKinds{SetKind::Iso, SetKind::G2, SetKind::G4,
                                       SetKind::G6, SetKind::Pair, SetKind::Coord};

}  // namespace

TEST_CASE("normalization guarantee: psi(1) = 0 exactly, P(1) ~ 0") {
  Rng rng(1);
  for (SetKind kind : kModelKinds) {
    for (int t = 0; t < 200; ++t) {
      const ModelArtifact m = random_artifact(kind, rng);
      const MaterialResponse r = evaluate(m, eye3(), 2);
      CHECK(r.psi == 0.0);  // exact by construction
      const double scale = std::max(1.0, frob(r.A));
      CHECK(frob(r.P) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("correction coefficients: zero output weights give zero coefficients") {
  Rng rng(2);
  ModelArtifact m = random_artifact(SetKind::G2, rng);
  for (double& w : m.pnn.Wout) w = 0.0;
  const CorrectionCoeffs cc = correction_coefficients(m);
  for (double c : cc.coeff) CHECK(c == doctest::Approx(0.0));
}

TEST_CASE("derivative oracle: P vs FD(psi) and A vs FD(P)") {
  Rng rng(3);
  const double h = 1e-6;
  for (SetKind kind : kModelKinds) {
    for (int t = 0; t < 3; ++t) {
      const ModelArtifact m = random_artifact(kind, rng);
      const Mat3 F = random_f(rng);
      const MaterialResponse r = evaluate(m, F, 2);
      const Prepared prep = prepare(m);

      double perr = 0.0, pscale = 0.0, aerr = 0.0, ascale = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J) {
          Mat3 Fp = F, Fm = F;
          Fp(i, J) += h;
          Fm(i, J) -= h;
          const MaterialResponse rp = evaluate_prepared(m, prep, Fp, 1);
          const MaterialResponse rm = evaluate_prepared(m, prep, Fm, 1);
          const double fd = (rp.psi - rm.psi) / (2 * h);
          perr = std::max(perr, std::abs(fd - r.P(i, J)));
          pscale = std::max(pscale, std::abs(fd));
          for (int k = 0; k < 3; ++k)
            for (int L = 0; L < 3; ++L) {
              const double fda = (rp.P(k, L) - rm.P(k, L)) / (2 * h);
              aerr = std::max(aerr, std::abs(fda - r.A(k, L, i, J)));
              ascale = std::max(ascale, std::abs(fda));
            }
        }
      CHECK(perr <= 1e-5 * std::max(1e-3, pscale));
      CHECK(aerr <= 1e-4 * std::max(1e-3, ascale));
    }
  }
}

TEST_CASE("growth term properties") {
  double v1, va, vb, d1, d2;
  growth_term(1.0, 0.01, 3, 2, v1, d1, d2);
  CHECK(v1 == 0.0);
  CHECK(d1 == 0.0);
  growth_term(0.01, 0.01, 3, 0, va, d1, d2);
  growth_term(0.5, 0.01, 3, 0, vb, d1, d2);
  CHECK(va > vb);
  CHECK(vb > 0.0);
  // psi_gr(J) = psi_gr(1/J)
  for (double J : {0.3, 0.7, 1.5, 2.5}) {
    double x, y;
    growth_term(J, 0.01, 3, 0, x, d1, d2);
    growth_term(1.0 / J, 0.01, 3, 0, y, d1, d2);
    CHECK(x == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("objectivity of the assembled potential") {
  Rng rng(4);
  const std::array<std::array<double, 3>, 3> flips{{{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
  for (SetKind kind : {SetKind::G2, SetKind::Coord}) {
    const ModelArtifact m = random_artifact(kind, rng);
    const Mat3 F = random_f(rng);
    const double psi = evaluate(m, F, 0).psi;
    for (const auto& s : flips) {
      Mat3 QF = F;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) QF(i, j) = s[static_cast<std::size_t>(i)] * F(i, j);
      CHECK(evaluate(m, QF, 0).psi == psi);
    }
    for (int t = 0; t < 20; ++t) {
      const Mat3 Q = structure::rotation_from_angles(
          rng.uniform(0, kPi), rng.uniform(-kPi / 2, kPi / 2), rng.uniform(-kPi, kPi));
      CHECK(evaluate(m, Q * F, 0).psi == doctest::Approx(psi).epsilon(1e-12));
    }
  }
}

TEST_CASE("material symmetry of a TI artifact") {
  Rng rng(5);
  ModelArtifact m = random_artifact(SetKind::G2, rng);
  // force a transversely isotropic tensor with axis from the angles
  m.structure = structure::make_structure(SetKind::G2, {0.2, 0.2, 0.9, 0.7, 0.1, -0.4});
  const auto cls = structure::classify(m.structure);
  REQUIRE(cls.label == structure::SymmetryLabel::TransverselyIsotropic);
  const std::array<double, 3>& a = cls.axis;

  for (int t = 0; t < 100; ++t) {
    const Mat3 F = random_f(rng);
    const double th = rng.uniform(0, 2 * kPi);
    // Rodrigues rotation about the TI axis
    Mat3 R{};
    const double c = std::cos(th), s = std::sin(th);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double aa = a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
        R(i, j) = c * (i == j ? 1.0 : 0.0) + (1 - c) * aa;
      }
    R(0, 1) -= s * a[2]; R(0, 2) += s * a[1];
    R(1, 0) += s * a[2]; R(1, 2) -= s * a[0];
    R(2, 0) -= s * a[1]; R(2, 1) += s * a[0];

    const double p1 = evaluate(m, F, 0).psi;
    const double p2 = evaluate(m, F * transpose(R), 0).psi;
    CHECK(p2 == doctest::Approx(p1).epsilon(1e-10));
  }
}

TEST_CASE("transform_measures examples") {
  // F = 1, P = 0: sigma = 0, c = A
  {
    Rng rng(6);
    Tangent4 A;
    for (double& x : A.a) x = rng.normal();
    const SpatialMeasures sm = transform_measures(eye3(), Mat3{}, A);
    CHECK(frob(sm.sigma) == 0.0);
    for (int k = 0; k < 81; ++k)
      CHECK(sm.c.a[static_cast<std::size_t>(k)] == doctest::Approx(A.a[static_cast<std::size_t>(k)]));
    for (int k = 0; k < 81; ++k)
      CHECK(sm.C4.a[static_cast<std::size_t>(k)] == doctest::Approx(A.a[static_cast<std::size_t>(k)]));
  }
  // F = diag(2,1,1), P = diag(1,0,0) -> sigma = diag(1,0,0)
  {
    Mat3 F{};
    F(0, 0) = 2; F(1, 1) = 1; F(2, 2) = 1;
    Mat3 P{};
    P(0, 0) = 1;
    const SpatialMeasures sm = transform_measures(F, P, Tangent4{});
    CHECK(sm.sigma[0] == doctest::Approx(1.0));
    CHECK(sm.sigma[1] == doctest::Approx(0.0));
    CHECK(sm.sigma[2] == doctest::Approx(0.0));
  }
}

TEST_CASE("spatial tangent of an elastic model has minor and major symmetry") {
  Rng rng(7);
  for (SetKind kind : {SetKind::G2, SetKind::G4, SetKind::Coord}) {
    const ModelArtifact m = random_artifact(kind, rng);
    const Mat3 F = random_f(rng);
    const MaterialResponse r = evaluate(m, F, 2, true);
    CHECK(r.sigma_asym < 1e-9);
    CHECK(r.c_asym < 1e-9);
    // major symmetry c_ijkl = c_klij
    double asym = 0.0, scale = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            asym = std::max(asym, std::abs(r.c(i, j, k, l) - r.c(k, l, i, j)));
            scale = std::max(scale, std::abs(r.c(i, j, k, l)));
          }
    CHECK(asym < 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("coordinate model: psi(1) = 0, P(1) = 0, objectivity") {
  Rng rng(8);
  const ModelArtifact m = random_artifact(SetKind::Coord, rng, {16, 16, 16});
  const MaterialResponse r0 = evaluate_coord(m, eye3(), 1);
  CHECK(r0.psi == 0.0);
  CHECK(frob(r0.P) < 1e-12);
  const Mat3 F = random_f(rng);
  const Mat3 Q = structure::rotation_from_angles(0.3, 0.5, 1.1);
  CHECK(evaluate_coord(m, Q * F, 0).psi == doctest::Approx(evaluate_coord(m, F, 0).psi).epsilon(1e-12));

  ModelArtifact g2 = random_artifact(SetKind::G2, rng);
  CHECK_THROWS_AS(evaluate_coord(g2, F, 0), KindMismatch);
}
