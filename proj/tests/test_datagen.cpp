#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "anisocal/datagen.hpp"
#include "anisocal/rng.hpp"
#include "anisocal/structure.hpp"

using namespace anisocal;
using namespace anisocal::datagen;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("sample_paths: identity endpoint gives identity states") {
  SampleConfig cfg;
  cfg.lambda1 = {1.0, 1.0};
  cfg.lambda2 = {1.0, 1.0};
  cfg.jrange = {1.0, 1.0};
  cfg.n_samp = 3;
  cfg.n_inc = 5;
  const auto paths = sample_paths(cfg);
  REQUIRE(paths.size() == 3);
  for (const auto& p : paths)
    for (const Mat3& F : p.F) CHECK(frob(F - eye3()) < 1e-12);
}

TEST_CASE("sample_paths: determinism and box constraints") {
  SampleConfig cfg;
  cfg.n_samp = 50;
  cfg.seed = 7;
  const auto a = sample_paths(cfg);
  const auto b = sample_paths(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t p = 0; p < a.size(); ++p)
    for (std::size_t k = 0; k < a[p].F.size(); ++k)
      for (int i = 0; i < 9; ++i)
        CHECK(a[p].F[k].a[static_cast<std::size_t>(i)] == b[p].F[k].a[static_cast<std::size_t>(i)]);

  // every state SPD, J within interpolation bounds
  for (const auto& p : a)
    for (const Mat3& F : p.F) {
      const double J = det3(F);
      CHECK(J > 0.0);
      CHECK(J > 0.9 - 1e-12);
      CHECK(J < 1.2 + 1e-12);
      const Spectral sp = spectral_sym3(kinematics(F).C, 0.0);
      CHECK(sp.raw[0] > 0.0);
      // U symmetric: F itself is the stretch (R = 1)
      CHECK(frob(to_mat(sym_part(F)) - F) < 1e-12);
    }
}

TEST_CASE("dedup_filter basics") {
  SampleConfig cfg;
  cfg.n_samp = 2;
  cfg.seed = 3;
  auto paths = sample_paths(cfg);
  // duplicate the first path: the copy must be dropped
  paths.push_back(paths[0]);
  paths.back().id = 99;
  const auto filtered = dedup_filter(paths, 0.15);
  for (std::size_t i = 1; i < filtered.size(); ++i) CHECK(filtered[i].id != 99);

  // d_tol = 0 keeps everything
  const auto all = dedup_filter(paths, 0.0);
  CHECK(all.size() == paths.size());

  // idempotence
  const auto once = dedup_filter(paths, 0.15);
  const auto twice = dedup_filter(once, 0.15);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].id == twice[i].id);
}

TEST_CASE("ground truth: neo-Hooke values") {
  GroundTruth gt;  // E = 1, nu = 0.4
  const auto r0 = ground_truth_eval(gt, eye3(), 1);
  CHECK(r0.psi == doctest::Approx(0.0));
  CHECK(frob(r0.P) < 1e-14);

  Mat3 F{};
  F(0, 0) = 1.2; F(1, 1) = 1.0; F(2, 2) = 1.0;
  const auto r = ground_truth_eval(gt, F, 0);
  CHECK(r.psi == doctest::Approx(0.04037).epsilon(1e-4));
}

TEST_CASE("ground truth: FD oracle for P and A across families") {
  Rng rng(4);
  const double h = 1e-6;
  for (GtFamily fam : {GtFamily::NeoHooke, GtFamily::TransverselyIsotropic, GtFamily::Orthotropic,
                       GtFamily::Cubic, GtFamily::Hexagonal, GtFamily::Monoclinic}) {
    GroundTruth gt;
    gt.family = fam;
    gt.Q_true = structure::rotation_from_angles(0.4, -0.3, 1.2);
    Mat3 F = eye3();
    for (int k = 0; k < 9; ++k) F.a[static_cast<std::size_t>(k)] += 0.15 * rng.normal();
    REQUIRE(det3(F) > 0.3);
    const auto r = ground_truth_eval(gt, F, 2);
    for (int i = 0; i < 3; ++i)
      for (int J = 0; J < 3; ++J) {
        Mat3 Fp = F, Fm = F;
        Fp(i, J) += h;
        Fm(i, J) -= h;
        const auto rp = ground_truth_eval(gt, Fp, 1);
        const auto rm = ground_truth_eval(gt, Fm, 1);
        const double fd = (rp.psi - rm.psi) / (2 * h);
        CHECK(r.P(i, J) == doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(fd))));
        for (int k = 0; k < 3; ++k)
          for (int L = 0; L < 3; ++L) {
            const double fda = (rp.P(k, L) - rm.P(k, L)) / (2 * h);
            CHECK(r.A(k, L, i, J) ==
                  doctest::Approx(fda).epsilon(1e-5).scale(std::max(1.0, std::abs(fda))));
          }
      }
  }
}

TEST_CASE("ground truth TI: rotation about the axis leaves psi unchanged") {
  Rng rng(5);
  GroundTruth gt;
  gt.family = GtFamily::TransverselyIsotropic;
  gt.Q_true = structure::rotation_from_angles(0.9, 0.4, -0.7);
  const std::array<double, 3> axis{gt.Q_true(0, 2), gt.Q_true(1, 2), gt.Q_true(2, 2)};
  for (int t = 0; t < 50; ++t) {
    Mat3 F = eye3();
    for (int k = 0; k < 9; ++k) F.a[static_cast<std::size_t>(k)] += 0.2 * rng.normal();
    if (det3(F) < 0.3) continue;
    const double th = rng.uniform(0, 2 * kPi);
    Mat3 R{};
    const double c = std::cos(th), s = std::sin(th);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        R(i, j) = c * (i == j ? 1.0 : 0.0) +
                  (1 - c) * axis[static_cast<std::size_t>(i)] * axis[static_cast<std::size_t>(j)];
    R(0, 1) -= s * axis[2]; R(0, 2) += s * axis[1];
    R(1, 0) += s * axis[2]; R(1, 2) -= s * axis[0];
    R(2, 0) -= s * axis[1]; R(2, 1) += s * axis[0];
    const double p1 = ground_truth_eval(gt, F, 0).psi;
    const double p2 = ground_truth_eval(gt, F * transpose(R), 0).psi;
    CHECK(p2 == doctest::Approx(p1).epsilon(1e-10));
  }
}

TEST_CASE("dataset build, split, and persistence round trip") {
  SampleConfig cfg;
  cfg.n_samp = 5;
  cfg.n_inc = 4;
  cfg.seed = 11;
  const auto paths = sample_paths(cfg);
  GroundTruth gt;
  gt.family = GtFamily::TransverselyIsotropic;
  int skipped = -1;
  const Dataset data = build_dataset(gt, paths, &skipped);
  CHECK(skipped == 0);
  CHECK(data.size() == 20);

  // c voigt symmetric within 1e-8 relative
  for (const auto& r : data) {
    double asym = 0.0, scale = 0.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        asym = std::max(asym, std::abs(r.c_voigt[static_cast<std::size_t>(6 * a + b)] -
                                       r.c_voigt[static_cast<std::size_t>(6 * b + a)]));
        scale = std::max(scale, std::abs(r.c_voigt[static_cast<std::size_t>(6 * a + b)]));
      }
    CHECK(asym <= 1e-8 * std::max(1.0, scale));
  }

  Dataset cal, test;
  split(data, 0.7, 1, cal, test);
  CHECK(cal.size() == 14);
  CHECK(test.size() == 6);
  Dataset cal2, test2;
  split(data, 0.7, 1, cal2, test2);
  for (std::size_t i = 0; i < cal.size(); ++i) CHECK(cal[i].psi == cal2[i].psi);

  const std::string path = "/tmp/anisocal_test_dataset.jsonl";
  save_jsonl(data, path);
  const Dataset loaded = load_jsonl(path);
  REQUIRE(loaded.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(loaded[i].psi == data[i].psi);
    for (int k = 0; k < 9; ++k)
      CHECK(loaded[i].F.a[static_cast<std::size_t>(k)] == data[i].F.a[static_cast<std::size_t>(k)]);
    for (int k = 0; k < 36; ++k)
      CHECK(loaded[i].c_voigt[static_cast<std::size_t>(k)] == data[i].c_voigt[static_cast<std::size_t>(k)]);
  }
  std::remove(path.c_str());
}

TEST_CASE("sample config json round trip") {
  SampleConfig cfg;
  cfg.n_samp = 123;
  cfg.seed = 9;
  const SampleConfig cfg2 = sample_config_from_json(sample_config_to_json(cfg));
  CHECK(cfg2.n_samp == 123);
  CHECK(cfg2.seed == 9);
  CHECK(cfg2.d_tol == cfg.d_tol);
  CHECK_THROWS_AS(sample_config_from_json("{"), CorruptPayload);
}
