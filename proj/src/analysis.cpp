#include "anisocal/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include "anisocal/energy.hpp"

namespace anisocal::analysis {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EllipticityResult ellipticity_scan(const Tangent4& A, double step) {
  if (!(step > 0.0)) throw DomainError("ellipticity_scan: step must be positive");
  EllipticityResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();

  double scale = 0.0;
  for (double x : A.a) scale = std::max(scale, std::abs(x));

  const int nth = static_cast<int>(std::round(kPi / step));
  const int nph = static_cast<int>(std::round(2.0 * kPi / step));
  for (int it = 0; it <= nth; ++it) {
    const double th = it * step;
    const double st = std::sin(th), ct = std::cos(th);
    for (int ip = 0; ip <= nph; ++ip) {
      const double ph = ip * step;
      const double N[3] = {st * std::cos(ph), st * std::sin(ph), ct};
      double g[3][3];
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          double s = 0.0;
          for (int J = 0; J < 3; ++J)
            for (int L = 0; L < 3; ++L) s += A(i, J, k, L) * N[J] * N[L];
          g[i][k] = s;
        }
      double asym = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = i + 1; k < 3; ++k) asym = std::max(asym, std::abs(g[i][k] - g[k][i]));
      out.symmetry_residual = std::max(out.symmetry_residual, asym);

      Eigen::Matrix3d M;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) M(i, k) = 0.5 * (g[i][k] + g[k][i]);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M, Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()(0);
      if (lmin < out.min_eigenvalue) {
        out.min_eigenvalue = lmin;
        out.direction = {N[0], N[1], N[2]};
      }
    }
  }
  out.elliptic = out.min_eigenvalue >= -1e-9 * std::max(1.0, scale);
  return out;
}

SurfaceGrid elastic_surface(const Tangent4& c, double step) {
  // major-symmetrize in the Mandel basis, then invert
  Mat66 m = mandel_of_tangent(c);
  Eigen::Matrix<double, 6, 6> C;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) C(a, b) = 0.5 * (m(a, b) + m(b, a));

  const Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(C);
  if (!lu.isInvertible()) throw SingularTangent("elastic_surface: tangent not invertible");
  const Eigen::Matrix<double, 6, 6> S = lu.inverse();
  {
    const double cond = C.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff();
    if (!(cond < 1e12)) throw SingularTangent("elastic_surface: tangent too ill-conditioned");
  }

  SurfaceGrid grid;
  grid.step = step;
  const int nth = static_cast<int>(std::round(kPi / step));
  const int nph = static_cast<int>(std::round(2.0 * kPi / step));
  grid.points.reserve(static_cast<std::size_t>((nth + 1) * (nph + 1)));
  for (int it = 0; it <= nth; ++it) {
    const double th = it * step;
    const double st = std::sin(th), ct = std::cos(th);
    for (int ip = 0; ip <= nph; ++ip) {
      const double ph = ip * step;
      const double n[3] = {st * std::cos(ph), st * std::sin(ph), ct};
      // Mandel vector of n x n
      Eigen::Matrix<double, 6, 1> v;
      v << n[0] * n[0], n[1] * n[1], n[2] * n[2], kSqrt2 * n[1] * n[2], kSqrt2 * n[0] * n[2],
          kSqrt2 * n[0] * n[1];
      const double comp = v.dot(S * v);
      SurfacePoint pt;
      pt.theta = th;
      pt.phi = ph;
      pt.E = 1.0 / comp;
      grid.points.push_back(pt);
    }
  }
  return grid;
}

void save_surface_csv(const SurfaceGrid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.precision(12);
  f << "theta,phi,E\n";
  for (const auto& p : grid.points) f << p.theta << "," << p.phi << "," << p.E << "\n";
}

void save_surface_gnuplot(const std::string& csv_path, const std::string& script_path) {
  std::ofstream f(script_path);
  if (!f) throw IoError("cannot open for writing: " + script_path);
  f << "# gnuplot script for the directional Young's modulus surface\n"
    << "set datafile separator ','\n"
    << "set mapping spherical\n"
    << "set angles radians\n"
    << "set view equal xyz\n"
    << "set hidden3d\n"
    << "splot '" << csv_path
    << "' every ::1 using 2:(pi/2-$1):3 with pm3d title 'E(n) [MPa]'\n"
    << "pause -1\n";
}

void correlation_export(const network::ModelArtifact& model, const datagen::Dataset& data,
                        const std::string& path) {
  if (data.empty()) throw EmptyDataset("correlation_export: empty dataset");
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.precision(17);
  const char* vn[6] = {"11", "22", "33", "23", "13", "12"};
  f << "channel,reference,predicted\n";
  const energy::Prepared prep = energy::prepare(model);
  for (const auto& rec : data) {
    const int order = rec.has_tangent ? 2 : 1;
    const energy::MaterialResponse r = energy::evaluate_prepared(model, prep, rec.F, order, true);
    f << "psi," << rec.psi << "," << r.psi << "\n";
    const Vec6 sv = voigt_stress(r.sigma);
    for (int k = 0; k < 6; ++k)
      f << "sig_" << vn[k] << "," << rec.sigma_voigt[k] << "," << sv[k] << "\n";
    if (rec.has_tangent) {
      const VoigtMat cv = voigt_tangent(r.c, 1e-3);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          f << "c_" << vn[a] << "_" << vn[b] << ","
            << rec.c_voigt[static_cast<std::size_t>(6 * a + b)] << "," << cv(a, b) << "\n";
    }
  }
}

}  // namespace anisocal::analysis
