// Command-line front door: sample -> generate -> identify/train -> eval ->
// surface/ellipticity/classify exports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "anisocal/analysis.hpp"
#include "anisocal/datagen.hpp"
#include "anisocal/energy.hpp"
#include "anisocal/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace anisocal;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << text;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

datagen::GroundTruth gt_from_json(const json& j) {
  datagen::GroundTruth gt;
  if (j.contains("family")) gt.family = datagen::family_from_name(j["family"].get<std::string>());
  if (j.contains("E")) gt.E = j["E"].get<double>();
  if (j.contains("nu")) gt.nu = j["nu"].get<double>();
  if (j.contains("k")) gt.k = j["k"].get<double>();
  if (j.contains("q_angles")) {
    const auto a = j["q_angles"].get<std::vector<double>>();
    gt.Q_true = structure::rotation_from_angles(a.at(0), a.at(1), a.at(2));
  }
  if (gt.E <= 0 || gt.nu <= -1.0 || gt.nu >= 0.5)
    throw DomainError("ground truth: need E > 0 and nu in (-1, 0.5)");
  return gt;
}

training::TrainConfig train_config_from_json(const json& j) {
  training::TrainConfig cfg;
  if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
  if (j.contains("epochs")) cfg.adam.epochs = j["epochs"].get<int>();
  if (j.contains("batch")) cfg.adam.batch = j["batch"].get<int>();
  if (j.contains("lr0")) cfg.adam.lr0 = j["lr0"].get<double>();
  if (j.contains("qn_iters")) cfg.qn.max_iters = j["qn_iters"].get<int>();
  if (j.contains("split_ratio")) cfg.split_ratio = j["split_ratio"].get<double>();
  if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::vector<int>>();
  if (j.contains("hidden_coord")) cfg.hidden_coord = j["hidden_coord"].get<std::vector<int>>();
  if (j.contains("w_psi")) cfg.weights.w_psi = j["w_psi"].get<double>();
  if (j.contains("w_sigma")) cfg.weights.w_sigma = j["w_sigma"].get<double>();
  if (j.contains("w_c")) cfg.weights.w_c = j["w_c"].get<double>();
  if (j.contains("w_gate")) cfg.weights.w_gate = j["w_gate"].get<double>();
  if (j.contains("lambda_gr")) cfg.lambda_gr = j["lambda_gr"].get<double>();
  if (j.contains("eps_tol")) cfg.eps_tol = j["eps_tol"].get<double>();
  if (j.contains("extrapolation")) cfg.extrapolation_mode = j["extrapolation"].get<bool>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  const double ws = cfg.weights.w_psi + cfg.weights.w_sigma + cfg.weights.w_c;
  if (std::abs(ws - 1.0) > 1e-12)
    throw DomainError("loss weights must sum to one (got " + std::to_string(ws) + ")");
  return cfg;
}

json report_to_json(const training::ErrorReport& r) {
  json j;
  j["eps_psi_percent"] = r.eps_psi;
  j["eps_sigma_percent"] = r.eps_sigma;
  j["eps_c_percent"] = r.eps_c;
  j["L_pred_cal"] = r.cal.pred;
  j["L_pred_test"] = r.test.pred;
  j["L_gate"] = r.cal.gate;
  j["active_gates"] = r.active_gates;
  j["n_active"] = r.n_active;
  j["classification"] = structure::symmetry_name(r.classification.label);
  j["axis"] = r.classification.axis;
  j["w_norm"] = r.classification.w_norm;
  j["prune_delta"] = r.prune_delta;
  j["diverged_restarts"] = r.diverged_restarts;
  return j;
}

void copy_config_next_to(const std::string& out_path, const json& cfg) {
  const fs::path p = fs::path(out_path);
  const fs::path cfgcopy = p.parent_path() / (p.stem().string() + ".config.json");
  write_file(cfgcopy.string(), cfg.dump(2) + "\n");
}

int run(int argc, char** argv) {
  CLI::App app{"anisocal: invariant-network hyperelastic model discovery and calibration"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags (--seed, --workers) may follow the subcommand

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "global random seed")->capture_default_str();
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (0 = auto)")->capture_default_str();
  bool dry_run = false;
  app.add_flag("--dry-run", dry_run, "print the resolved configuration and exit");

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "sample deformation paths (LHS + dedup filter)");
  std::string sample_config, sample_out = "paths.jsonl";
  bool no_dedup = false;
  sample->add_option("--config", sample_config, "sampling config JSON");
  sample->add_option("--out", sample_out, "output JSONL of deformation gradients")
      ->capture_default_str();
  sample->add_flag("--no-dedup", no_dedup, "skip the duplicate filter");

  // ---- generate ----
  auto* generate = app.add_subcommand("generate", "evaluate a ground-truth material on paths");
  std::string gen_gt = "{}", gen_paths, gen_config, gen_out = "data.jsonl";
  std::string gen_csv;
  int gen_npaths = 0;
  generate->add_option("--truth", gen_gt, "ground-truth JSON (inline or @file)");
  generate->add_option("--paths", gen_paths, "paths JSONL from `sample`");
  generate->add_option("--config", gen_config, "sampling config JSON (sample inline)");
  generate->add_option("--n-paths", gen_npaths, "cap the number of paths used");
  generate->add_option("--out", gen_out, "output dataset JSONL")->capture_default_str();
  generate->add_option("--csv", gen_csv, "also export the dataset as CSV");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train a fixed set kind");
  std::string train_data, train_out = "model.json", train_kind = "g2", train_cfg_path,
              train_report = "";
  train_cmd->add_option("--data", train_data, "dataset JSONL")->required();
  train_cmd->add_option("--kind", train_kind, "iso|g2|g4|g6|pair|coord")->capture_default_str();
  train_cmd->add_option("--out", train_out, "output model JSON")->capture_default_str();
  train_cmd->add_option("--config", train_cfg_path, "training config JSON");
  train_cmd->add_option("--report", train_report, "write the error report JSON here");
  std::string train_log;
  train_cmd->add_option("--log", train_log, "training-log JSONL");

  // ---- identify ----
  auto* identify_cmd = app.add_subcommand("identify", "minimal structure-tensor order search");
  std::string id_data, id_out = "model.json", id_cfg_path, id_report = "";
  double id_eps = -1.0;
  identify_cmd->add_option("--data", id_data, "dataset JSONL")->required();
  identify_cmd->add_option("--out", id_out, "output model JSON")->capture_default_str();
  identify_cmd->add_option("--config", id_cfg_path, "training config JSON");
  identify_cmd->add_option("--eps-tol", id_eps, "identification tolerance (fraction, e.g. 0.01)");
  identify_cmd->add_option("--report", id_report, "write the report JSON here");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "error report of a model on a dataset");
  std::string eval_model, eval_data, eval_out;
  eval_cmd->add_option("--model", eval_model, "model JSON")->required();
  eval_cmd->add_option("--data", eval_data, "dataset JSONL")->required();
  eval_cmd->add_option("--out", eval_out, "report JSON (stdout when omitted)");

  // ---- surface ----
  auto* surface_cmd = app.add_subcommand("surface", "directional Young's modulus export");
  std::string surf_model, surf_out = "surface.csv";
  std::vector<double> surf_F;
  double surf_step = 3.14159265358979323846 / 90.0;
  surface_cmd->add_option("--model", surf_model, "model JSON")->required();
  surface_cmd->add_option("--F", surf_F, "deformation gradient, 9 row-major entries");
  surface_cmd->add_option("--out", surf_out, "surface CSV")->capture_default_str();
  surface_cmd->add_option("--step", surf_step, "grid step in radians")->capture_default_str();

  // ---- ellipticity ----
  auto* ell_cmd = app.add_subcommand("ellipticity", "acoustic-tensor scan at a state");
  std::string ell_model;
  std::vector<double> ell_F;
  double ell_step = 3.14159265358979323846 / 180.0;
  ell_cmd->add_option("--model", ell_model, "model JSON")->required();
  ell_cmd->add_option("--F", ell_F, "deformation gradient, 9 row-major entries");
  ell_cmd->add_option("--step", ell_step, "grid step in radians")->capture_default_str();

  // ---- classify ----
  auto* cls_cmd = app.add_subcommand("classify", "symmetry group of a structure file");
  std::string cls_file;
  double cls_tol = 0.05;
  cls_cmd->add_option("--structure", cls_file, "structure JSON (model or raw tensors)")
      ->required();
  cls_cmd->add_option("--tol", cls_tol, "classification tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and synopsis
    return 2;
  }

  auto inline_or_file = [](const std::string& s) {
    if (!s.empty() && s.front() == '@') return read_file(s.substr(1));
    return s;
  };

  if (sample->parsed()) {
    datagen::SampleConfig cfg;
    if (!sample_config.empty()) cfg = datagen::sample_config_from_json(read_file(sample_config));
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (dry_run) {
      std::cout << datagen::sample_config_to_json(cfg) << "\n";
      return 0;
    }
    auto paths = datagen::sample_paths(cfg);
    if (!no_dedup) paths = datagen::dedup_filter(paths, cfg.d_tol);
    std::ofstream f(sample_out);
    if (!f) throw IoError("cannot open for writing: " + sample_out);
    for (const auto& p : paths) {
      json j;
      j["path"] = p.id;
      json states = json::array();
      for (const auto& F : p.F) states.push_back(F.a);
      j["F"] = states;
      f << j.dump() << "\n";
    }
    copy_config_next_to(sample_out, json::parse(datagen::sample_config_to_json(cfg)));
    std::cout << "retained " << paths.size() << " paths -> " << sample_out << "\n";
    return 0;
  }

  if (generate->parsed()) {
    const datagen::GroundTruth gt = gt_from_json(json::parse(inline_or_file(gen_gt)));
    std::vector<datagen::LoadPath> paths;
    if (!gen_paths.empty()) {
      std::ifstream f(gen_paths);
      if (!f) throw IoError("cannot open: " + gen_paths);
      std::string line;
      while (std::getline(f, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        datagen::LoadPath p;
        p.id = j["path"].get<int>();
        for (const auto& st : j["F"]) {
          Mat3 F;
          const auto v = st.get<std::vector<double>>();
          std::copy(v.begin(), v.end(), F.a.begin());
          p.F.push_back(F);
        }
        paths.push_back(std::move(p));
      }
    } else {
      datagen::SampleConfig cfg;
      if (!gen_config.empty()) cfg = datagen::sample_config_from_json(read_file(gen_config));
      if (app.count("--seed") > 0) cfg.seed = seed;
      paths = datagen::dedup_filter(datagen::sample_paths(cfg), cfg.d_tol);
    }
    if (gen_npaths > 0 && static_cast<int>(paths.size()) > gen_npaths)
      paths.resize(static_cast<std::size_t>(gen_npaths));
    if (dry_run) {
      std::cout << "would evaluate " << paths.size() << " paths with family "
                << datagen::family_name(gt.family) << "\n";
      return 0;
    }
    int skipped = 0;
    const datagen::Dataset data = datagen::build_dataset(gt, paths, &skipped);
    datagen::save_jsonl(data, gen_out);
    if (!gen_csv.empty()) datagen::save_csv(data, gen_csv);
    std::cout << "wrote " << data.size() << " records -> " << gen_out;
    if (skipped > 0) std::cout << " (skipped " << skipped << " non-invertible states)";
    std::cout << "\n";
    return 0;
  }

  if (train_cmd->parsed() || identify_cmd->parsed()) {
    const bool is_train = train_cmd->parsed();
    const std::string cfg_path = is_train ? train_cfg_path : id_cfg_path;
    json cfg_json = cfg_path.empty() ? json::object() : json::parse(read_file(cfg_path));
    training::TrainConfig cfg = train_config_from_json(cfg_json);
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (workers > 0) cfg.workers = workers;
    if (!is_train && id_eps > 0) cfg.eps_tol = id_eps;
    if (is_train && !train_log.empty()) cfg.log_path = train_log;
    cfg_json["seed"] = cfg.seed;
    const std::string hash = fnv1a(cfg_json.dump());

    if (dry_run) {
      std::cout << cfg_json.dump(2) << "\n";
      return 0;
    }

    const datagen::Dataset data = datagen::load_jsonl(is_train ? train_data : id_data);
    if (is_train) {
      const SetKind kind = set_kind_from_name(train_kind);
      training::TrainResult res = training::train(kind, data, cfg);
      res.artifact.meta.config_hash = hash;
      network::save_artifact(res.artifact, train_out);
      const json rj = report_to_json(res.report);
      if (!train_report.empty()) write_file(train_report, rj.dump(2) + "\n");
      copy_config_next_to(train_out, cfg_json);
      std::cout << rj.dump(2) << "\n";
      return 0;
    }

    training::IdentifyResult res = training::identify(data, cfg);
    res.best.artifact.meta.config_hash = hash;
    network::save_artifact(res.best.artifact, id_out);
    json rj;
    rj["selected_kind"] = set_kind_name(res.kind);
    rj["passed"] = res.passed;
    rj["report"] = report_to_json(res.best.report);
    json attempts = json::array();
    for (const auto& [k, rep] : res.attempts)
      attempts.push_back({{"kind", set_kind_name(k)},
                          {"eps_psi_percent", rep.eps_psi},
                          {"eps_sigma_percent", rep.eps_sigma},
                          {"eps_c_percent", rep.eps_c}});
    rj["attempts"] = attempts;
    if (!id_report.empty()) write_file(id_report, rj.dump(2) + "\n");
    copy_config_next_to(id_out, cfg_json);
    std::cout << rj.dump(2) << "\n";
    return res.passed ? 0 : 1;
  }

  if (eval_cmd->parsed()) {
    const network::ModelArtifact m = network::load_artifact(eval_model);
    const datagen::Dataset data = datagen::load_jsonl(eval_data);
    double ep, es, ec;
    training::error_measures(m, data, ep, es, ec);
    json j;
    j["eps_psi_percent"] = ep;
    j["eps_sigma_percent"] = es;
    j["eps_c_percent"] = ec;
    j["records"] = data.size();
    if (!eval_out.empty())
      write_file(eval_out, j.dump(2) + "\n");
    else
      std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (surface_cmd->parsed() || ell_cmd->parsed()) {
    const bool is_surface = surface_cmd->parsed();
    const network::ModelArtifact m =
        network::load_artifact(is_surface ? surf_model : ell_model);
    Mat3 F = eye3();
    const std::vector<double>& fv = is_surface ? surf_F : ell_F;
    if (!fv.empty()) {
      if (fv.size() != 9) throw DomainError("--F needs exactly 9 entries");
      std::copy(fv.begin(), fv.end(), F.a.begin());
    }
    const energy::MaterialResponse r = energy::evaluate(m, F, 2, true);
    if (is_surface) {
      const analysis::SurfaceGrid g = analysis::elastic_surface(r.c, surf_step);
      analysis::save_surface_csv(g, surf_out);
      analysis::save_surface_gnuplot(surf_out, surf_out + ".gp");
      std::cout << "wrote " << g.points.size() << " surface points -> " << surf_out << "\n";
      return 0;
    }
    const analysis::EllipticityResult res = analysis::ellipticity_scan(r.A, ell_step);
    json j;
    j["min_eigenvalue"] = res.min_eigenvalue;
    j["elliptic"] = res.elliptic;
    j["direction"] = res.direction;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (cls_cmd->parsed()) {
    const json j = json::parse(read_file(cls_file));
    structure::StructureSpec spec;
    if (j.contains("set_kind")) {
      // a full model artifact
      const network::ModelArtifact m = network::load_artifact(cls_file);
      spec = m.structure;
    } else {
      const SetKind kind = set_kind_from_name(j.at("kind").get<std::string>());
      if (j.contains("params")) {
        spec = structure::make_structure(kind, j["params"].get<std::vector<double>>());
      } else if (kind == SetKind::G2 || kind == SetKind::Pair) {
        spec.kind = kind;
        spec.params.assign(static_cast<std::size_t>(structure_param_count(kind)), 0.0);
        const auto g = j.at("tensor").get<std::vector<double>>();
        for (int i = 0; i < 6; ++i) spec.g[i] = g.at(static_cast<std::size_t>(i));
        if (kind == SetKind::Pair) {
          const auto g2 = j.at("tensor2").get<std::vector<double>>();
          for (int i = 0; i < 6; ++i) spec.g_second[i] = g2.at(static_cast<std::size_t>(i));
        }
      } else {
        throw DomainError("classify: g4/g6 structures need builder params");
      }
    }
    const structure::Classification c = structure::classify(spec, cls_tol);
    json out;
    out["label"] = structure::symmetry_name(c.label);
    out["axis"] = c.axis;
    out["eig_gaps"] = c.eig_gaps;
    out["w_norm"] = c.w_norm;
    out["v1_norm"] = c.v1_norm;
    out["v2_norm"] = c.v2_norm;
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const anisocal::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
