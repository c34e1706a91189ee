#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anisocal/rng.hpp"
#include "anisocal/tensors.hpp"

using namespace anisocal;

namespace {

Mat3 random_f(Rng& rng, double spread = 0.3) {
  Mat3 F = eye3();
  for (int k = 0; k < 9; ++k) F.a[static_cast<std::size_t>(k)] += spread * rng.normal();
  if (det3(F) <= 0.05) return random_f(rng, spread * 0.5);
  return F;
}

Sym3 random_sym(Rng& rng, double spread = 1.0) {
  Sym3 s;
  for (int k = 0; k < 6; ++k) s[k] = spread * rng.normal();
  return s;
}

}  // namespace

TEST_CASE("kinematics identity and rotation") {
  const Kinematics k = kinematics(eye3());
  CHECK(k.J == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i) CHECK(k.C[i] == doctest::Approx(1.0));
  for (int i = 3; i < 6; ++i) CHECK(k.C[i] == doctest::Approx(0.0));
  CHECK(frob(k.E) == doctest::Approx(0.0));

  // any rotation: C = 1, E = 0
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.uniform(0, 6.28), b = rng.uniform(-1.5, 1.5), c = rng.uniform(-3.0, 3.0);
    Mat3 Q;
    {
      const double c1 = std::cos(a), s1 = std::sin(a), c2 = std::cos(b), s2 = std::sin(b),
                   c3 = std::cos(c), s3 = std::sin(c);
      Q(0, 0) = c1 * c2;
      Q(0, 1) = c1 * s2 * s3 - c3 * s1;
      Q(0, 2) = s1 * s3 + c1 * c3 * s2;
      Q(1, 0) = c2 * s1;
      Q(1, 1) = c1 * c3 + s1 * s2 * s3;
      Q(1, 2) = c3 * s1 * s2 - c1 * s3;
      Q(2, 0) = -s2;
      Q(2, 1) = c2 * s3;
      Q(2, 2) = c2 * c3;
    }
    const Kinematics kq = kinematics(Q);
    CHECK(std::abs(kq.J - 1.0) < 1e-12);
    CHECK(frob(kq.E) < 1e-12);
  }
}

TEST_CASE("kinematics stretch example") {
  Mat3 F{};
  F(0, 0) = 2.0; F(1, 1) = 1.0; F(2, 2) = 1.0;
  const Kinematics k = kinematics(F);
  CHECK(k.C[0] == doctest::Approx(4.0));
  CHECK(k.C[1] == doctest::Approx(1.0));
  CHECK(k.C[2] == doctest::Approx(1.0));
  CHECK(k.J == doctest::Approx(2.0));
  CHECK(k.cofC[0] == doctest::Approx(1.0));
  CHECK(k.cofC[1] == doctest::Approx(4.0));
  CHECK(k.cofC[2] == doctest::Approx(4.0));
}

TEST_CASE("kinematics rejects non-invertible F") {
  Mat3 F{};
  F(0, 0) = 1.0; F(1, 1) = 1.0;  // singular
  CHECK_THROWS_AS(kinematics(F), NonInvertible);
}

TEST_CASE("C is SPD for random F with detF in (0.5,2)") {
  Rng rng(42);
  int done = 0;
  while (done < 10000) {
    const Mat3 F = random_f(rng);
    const double j = det3(F);
    if (j <= 0.5 || j >= 2.0) continue;
    ++done;
    const Kinematics k = kinematics(F);
    const Spectral sp = spectral_sym3(k.C, 0.0);
    CHECK(sp.raw[0] > 0.0);
  }
}

TEST_CASE("spectral: isotropic tensor") {
  const Spectral sp = spectral_sym3(sym3_identity<double>(), 0.05);
  CHECK(sp.n_groups == 1);
  for (int i = 0; i < 3; ++i) CHECK(sp.projector[0][i] == doctest::Approx(1.0));
}

TEST_CASE("spectral: rank-one dyad") {
  Sym3 S{};
  S[2] = 1.0;  // e3 x e3
  const Spectral sp = spectral_sym3(S, 0.05);
  CHECK(sp.n_groups == 2);
  CHECK(sp.lambda[0] == doctest::Approx(0.0));
  CHECK(sp.lambda[1] == doctest::Approx(1.0));
  CHECK(sp.projector[0][0] == doctest::Approx(1.0));
  CHECK(sp.projector[0][1] == doctest::Approx(1.0));
  CHECK(sp.projector[0][2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sp.projector[1][2] == doctest::Approx(1.0));
}

TEST_CASE("spectral projector properties over random tensors") {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    const Sym3 S = random_sym(rng);
    const Spectral sp = spectral_sym3(S, 0.0);
    // completeness
    Sym3 sum{};
    for (int g = 0; g < sp.n_groups; ++g) sum = sum + sp.projector[static_cast<std::size_t>(g)];
    CHECK(frob(sum - sym3_identity<double>()) < 1e-10);
    // reconstruction
    Sym3 rec{};
    for (int g = 0; g < sp.n_groups; ++g)
      rec = rec + sp.projector[static_cast<std::size_t>(g)] * sp.lambda[static_cast<std::size_t>(g)];
    CHECK(frob(rec - S) < 1e-10 * std::max(1.0, frob(S)));
    // idempotence and orthogonality
    for (int g = 0; g < sp.n_groups; ++g)
      for (int h = 0; h < sp.n_groups; ++h) {
        const Mat3 P = to_mat(sp.projector[static_cast<std::size_t>(g)]) *
                       to_mat(sp.projector[static_cast<std::size_t>(h)]);
        const Mat3 ref = (g == h) ? to_mat(sp.projector[static_cast<std::size_t>(g)]) : Mat3{};
        CHECK(frob(P - ref) < 1e-10);
      }
  }
}

TEST_CASE("voigt: symmetric identity maps to diag(1,1,1,.5,.5,.5)") {
  Tangent4 isym;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          isym(i, j, k, l) = 0.5 * ((i == k && j == l ? 1.0 : 0.0) + (i == l && j == k ? 1.0 : 0.0));
  const VoigtMat m = voigt_tangent(isym);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const double expect = (a == b) ? (a < 3 ? 1.0 : 0.5) : 0.0;
      CHECK(m(a, b) == doctest::Approx(expect));
    }
}

TEST_CASE("voigt: isotropic elasticity layout") {
  const double lam = 1.3, mu = 0.7;
  Tangent4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = lam * (i == j) * (k == l) +
                          mu * ((i == k) * (j == l) + (i == l) * (j == k));
  const VoigtMat m = voigt_tangent(c);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(m(a, b) == doctest::Approx(a == b ? lam + 2 * mu : lam));
    CHECK(m(a + 3, a + 3) == doctest::Approx(mu));
  }
}

TEST_CASE("voigt: zero tensor, round trip, asymmetry error") {
  Tangent4 z;
  const VoigtMat m = voigt_tangent(z);
  CHECK(frob(m) == 0.0);

  // round trip is an exact involution on minor-symmetric tensors
  Rng rng(9);
  VoigtMat r;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) r(a, b) = rng.normal();
  const Tangent4 c = voigt_tangent_inverse(r);
  const VoigtMat r2 = voigt_tangent(c);
  for (int k = 0; k < 36; ++k) CHECK(r2.a[static_cast<std::size_t>(k)] == r.a[static_cast<std::size_t>(k)]);

  Tangent4 bad;
  bad(0, 1, 0, 0) = 1.0;  // violates minor symmetry
  CHECK_THROWS_AS(voigt_tangent(bad), AsymmetryTooLarge);
}

TEST_CASE("sym4/sym6 storage symmetry and traces") {
  Rng rng(5);
  Sym4Full g4;
  for (auto& x : g4.a) x = rng.normal();
  CHECK(g4(0, 1, 2, 1) == g4(1, 2, 1, 0));
  CHECK(g4(2, 2, 0, 1) == g4(0, 2, 2, 1));

  Sym6Full g6;
  for (auto& x : g6.a) x = rng.normal();
  CHECK(g6(0, 1, 2, 1, 0, 2) == g6(2, 2, 1, 1, 0, 0));

  // generalized trace equality across pairings (full symmetry)
  double t1 = 0.0, t2 = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      t1 += g4(k, k, l, l);
      t2 += g4(k, l, k, l);
    }
  CHECK(t1 == doctest::Approx(t2));
}
