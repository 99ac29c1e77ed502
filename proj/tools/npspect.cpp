// npspect - boundary-integral spectral laboratory for the elastostatic
// Neumann-Poincare operator.
//
// Subcommands: spectrum, verify, symbol, oracle-dump, cache.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "npspect/npspect.hpp"

namespace fs = std::filesystem;
using namespace npspect;

namespace {

// distinct exit codes per failure class
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssembly = 3;
constexpr int kExitEigensolve = 4;
constexpr int kExitIo = 5;
constexpr int kExitCriterion = 6;
constexpr int kExitUsage = 7;

int exit_code_for(const Error& e) {
  switch (e.code) {
    case Errc::config_parse: return kExitConfig;
    case Errc::assembly: return kExitAssembly;
    case Errc::eigensolve: return kExitEigensolve;
    case Errc::io: return kExitIo;
    case Errc::bad_format: return kExitIo;
    case Errc::invalid_argument: return kExitConfig;
  }
  return kExitUsage;
}

struct Experiment {
  std::vector<Surface> surfaces;
  LameField field;
  EssSpecPrediction prediction;
  bool planar = false;
  LameParams params{1, 1};  // planar runs are constant-coefficient
};

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment ex;
  if (cfg.geometry == "sphere") {
    ex.surfaces = {make_sphere(cfg.radius)};
  } else if (cfg.geometry == "ellipsoid") {
    ex.surfaces = {make_ellipsoid(cfg.a, cfg.b, cfg.c)};
  } else if (cfg.geometry == "two_spheres") {
    auto s1 = make_sphere(cfg.radius, Vec3(0, 0, 0));
    auto s2 = make_sphere(cfg.radius, Vec3(cfg.separation, 0, 0));
    s2.component_id = 1;
    require(cfg.separation >= 4 * cfg.radius, Errc::config_parse,
            "two_spheres: separation must be >= 4 * radius");
    ex.surfaces = {s1, s2};
  } else if (cfg.geometry == "circle" || cfg.geometry == "ellipse") {
    ex.planar = true;
    ex.params = {cfg.lambda, cfg.mu};
    return ex;
  } else {
    fail(Errc::config_parse, "unknown geometry.kind '" + cfg.geometry + "'");
  }

  double mid = cfg.geometry == "two_spheres" ? cfg.separation / 2 : 0.0;
  if (cfg.material == "constant") {
    ex.field = LameField::constant({cfg.lambda, cfg.mu});
  } else if (cfg.material == "per_component") {
    ex.field = LameField::per_component(
        {{cfg.lambda, cfg.mu}, {cfg.lambda2, cfg.mu2}},
        [mid](const Vec3& x) { return x.x() < mid ? 0 : 1; });
  } else if (cfg.material == "z_linear") {
    ex.field = LameField::z_linear(cfg.lambda, cfg.mu_mid, cfg.mu_amp);
  } else if (cfg.material == "bump") {
    ex.field = LameField::bump(cfg.lambda, cfg.mu_mid, cfg.mu_amp, Vec3(0, 0, cfg.radius),
                               0.5 * cfg.radius);
  } else {
    fail(Errc::config_parse, "unknown material.kind '" + cfg.material + "'");
  }
  ex.prediction = predict_essential_spectrum(ex.field, sample_components(ex.surfaces));
  return ex;
}

std::string cache_path(const ExperimentConfig& cfg, const OperatorMatrix& proto) {
  std::ostringstream os;
  os << cfg.cache_dir << "/npsm_" << to_string(proto.kind) << "_" << std::hex
     << proto.build_hash() << ".npsm";
  return os.str();
}

/// Assemble (or load from cache) one matrix kind on one grid.
OperatorMatrix obtain_matrix(const ExperimentConfig& cfg, const QuadratureGrid& grid,
                             const LameField& field, MatrixKind kind,
                             const OperatorMatrix* S, const OperatorMatrix* K) {
  OperatorMatrix proto;
  proto.kind = kind;
  proto.grid_hash = grid.hash;
  proto.field_hash = field.hash();
  proto.scheme = "v5";
  if (!cfg.cache_dir.empty()) {
    auto path = cache_path(cfg, proto);
    if (fs::exists(path)) {
      auto m = cache_load(path);
      if (m.grid_hash == grid.hash && m.kind == kind &&
          m.n_nodes == grid.size()) {
        std::cerr << "[npspect] cache hit, assembly skipped: " << path << "\n";
        m.grid_desc = grid.descriptor;
        m.field_desc = field.descriptor;
        return m;
      }
    }
  }
  OperatorMatrix m;
  switch (kind) {
    case MatrixKind::SingleLayer: m = assemble_single_layer(grid, field, cfg.workers); break;
    case MatrixKind::NP: m = assemble_np(grid, field, cfg.workers); break;
    case MatrixKind::SymmetrizedNP:
      require(S && K, Errc::assembly, "symmetrized kind needs S and K");
      m = symmetrize(*K, *S);
      break;
    case MatrixKind::ModifiedNP:
      require(K, Errc::assembly, "modified kind needs K");
      m = modified_np(*K, grid, field);
      break;
  }
  if (!cfg.cache_dir.empty()) {
    fs::create_directories(cfg.cache_dir);
    cache_store(m, cache_path(cfg, proto));
  }
  return m;
}

bool wants(const ExperimentConfig& cfg, const std::string& kind) {
  return std::find(cfg.kinds.begin(), cfg.kinds.end(), kind) != cfg.kinds.end();
}

int cmd_spectrum(const std::string& config_path) {
  ExperimentConfig cfg = parse_config_file(config_path);
  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/resolved.cfg", cfg.resolved_text());

  nlohmann::json report;
  std::vector<SpectrumResult> ladder;

  Experiment ex = build_experiment(cfg);
  if (ex.planar) {
    for (int n : cfg.curve_ladder) {
      auto curve = cfg.geometry == "circle" ? make_circle(cfg.radius)
                                            : make_ellipse(cfg.a, cfg.b);
      auto grid = build_curve_grid(curve, n);
      auto S = assemble_single_layer_2d(grid, ex.params);
      auto K = assemble_np_2d(grid, ex.params);
      ladder.push_back(eigenvalues(symmetrize(K, S)));
    }
    report["prediction"] = to_json(essential_spectrum_2d(ex.params));
  } else {
    for (const auto& gs : cfg.ladder) {
      auto grid = build_grid(ex.surfaces, gs.n_theta, gs.n_phi);
      OperatorMatrix S, K;
      if (wants(cfg, "single_layer") || wants(cfg, "symmetrized"))
        S = obtain_matrix(cfg, grid, ex.field, MatrixKind::SingleLayer, nullptr, nullptr);
      if (wants(cfg, "np") || wants(cfg, "symmetrized") || cfg.modified)
        K = obtain_matrix(cfg, grid, ex.field, MatrixKind::NP, nullptr, nullptr);
      if (wants(cfg, "symmetrized"))
        ladder.push_back(eigenvalues(obtain_matrix(cfg, grid, ex.field,
                                                   MatrixKind::SymmetrizedNP, &S, &K)));
      if (cfg.modified) {
        auto bt = obtain_matrix(cfg, grid, ex.field, MatrixKind::ModifiedNP, nullptr, &K);
        auto bspec = eigenvalues(bt);
        report["modified"].push_back(
            {{"grid", grid.descriptor}, {"max_imag", bspec.max_imag_abs}});
      }
    }
    report["prediction"] = to_json(ex.prediction);
  }

  if (cfg.clusters && ladder.size() >= 3) {
    auto pred = ex.planar ? essential_spectrum_2d(ex.params) : ex.prediction;
    report["clusters"] = to_json(detect_essential_spectrum(ladder, pred, cfg.epsilon));
    report["ladder"] = report["clusters"]["ladder"];
  }
  if (cfg.oracle_jmax > 0 && !ladder.empty() && !ex.planar) {
    LameParams p{cfg.lambda, cfg.mu};
    report["oracle_match"] = to_json(match_spectrum_to_oracle(ladder.back(), p, cfg.oracle_jmax));
  }
  report["fits"] = nlohmann::json::array();
  if (!cfg.decay_tips.empty() && !ladder.empty()) {
    // decay_tips = "tip:side:mode:jmin:jmax[,...]"
    auto pred = ex.planar ? essential_spectrum_2d(ex.params) : ex.prediction;
    for (const auto& spec : detail::split(cfg.decay_tips, ',')) {
      auto f = detail::split(spec, ':');
      require(f.size() == 5, Errc::config_parse, "analysis.decay_tips: expect tip:side:mode:jmin:jmax");
      Side side = f[1] == "above" ? Side::above : (f[1] == "below" ? Side::below : Side::both);
      FitMode mode = f[2] == "power" ? FitMode::power : FitMode::exponential;
      auto fit = decay_fit(ladder.back(), detail::to_double("tip", f[0]), side, mode,
                           static_cast<int>(detail::to_long("jmin", f[3])),
                           static_cast<int>(detail::to_long("jmax", f[4])), pred, cfg.epsilon);
      report["fits"].push_back(to_json(fit));
    }
  }

  {
    std::ofstream csv(cfg.out_dir + "/spectrum.csv");
    require(csv.good(), Errc::io, "cannot write spectrum.csv");
    write_spectrum_csv(ladder, csv);
  }
  write_text_file(cfg.out_dir + "/report.json", report.dump(2) + "\n");
  std::cout << "[npspect] wrote " << cfg.out_dir << "/spectrum.csv and report.json\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& config_path) {
  VerifyOptions opt;
  if (!config_path.empty()) {
    auto cfg = parse_config_file(config_path);
    opt.sphere_ladder = cfg.ladder;
    opt.workers = cfg.workers;
    opt.seed = cfg.seed;
    if (!cfg.curve_ladder.empty()) opt.planar_n = cfg.curve_ladder.back();
  }
  AcceptanceLab lab(opt);
  std::vector<CriterionResult> results;
  if (suite == "symbol_identities") {
    results.push_back(criterion_symbol_identities(opt.seed));
  } else if (suite == "kernel_oracles") {
    results.push_back(criterion_kernel_oracles(opt.seed));
    results.push_back(criterion_jump_relation(opt.jump_n_theta, opt.workers));
  } else if (suite == "sphere_oracle") {
    results.push_back(criterion_sphere_oracle(lab));
  } else if (suite == "essential_spectrum") {
    results.push_back(criterion_essential_constant(lab));
    results.push_back(criterion_essential_variable(lab));
    results.push_back(criterion_two_sphere(lab));
    results.push_back(criterion_modified_np(lab));
  } else if (suite == "decay") {
    results.push_back(criterion_decay(lab));
  } else if (suite == "planar") {
    results.push_back(criterion_planar(opt.planar_n));
  } else {
    std::cerr << "unknown suite '" << suite
              << "' (expected sphere_oracle, essential_spectrum, symbol_identities, "
                 "kernel_oracles, decay, planar)\n";
    return kExitUsage;
  }
  nlohmann::json j = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    std::cout << "[" << (r.pass ? "PASS" : "FAIL") << "] " << r.id << " " << r.name << ": "
              << r.detail << "\n";
    all = all && r.pass;
  }
  std::cout << j.dump(2) << "\n";
  return all ? kExitOk : kExitCriterion;
}

int cmd_symbol(double lambda, double mu, double xi1, double xi2) {
  LameParams p{lambda, mu};
  Vec2 xip(xi1, xi2);
  nlohmann::json j;
  auto put_mat = [&](const char* name, const Mat3& m) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) j[name].push_back(m(r, c));
  };
  put_mat("lame_symbol", lame_symbol(Vec3(xi1, xi2, 0.7), p));
  put_mat("lame_symbol_inverse", lame_symbol_inverse(Vec3(xi1, xi2, 0.7), p));
  put_mat("single_layer_symbol", single_layer_symbol(xip, p));
  Mat3c sb = np_symbol(xip, p);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      j["np_symbol"].push_back({sb(r, c).real(), sb(r, c).imag()});
  j["np_symbol_eigenvalues"] = hermitian_eigenvalues(sb);
  j["kappa0"] = kappa0(p);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_oracle_dump(double lambda, double mu, int jmax, const std::string& csv_path) {
  LameParams p{lambda, mu};
  std::ostringstream os;
  os << "j,lambda0,lambdaPlus,lambdaMinus,multiplicity,cluster_sum\n";
  os.precision(17);
  for (int j = 1; j <= jmax; ++j) {
    auto t = sphere_eigenvalues(j, p);
    os << j << ',' << t.lambda0 << ',' << t.lambdaPlus << ',' << t.lambdaMinus << ','
       << t.multiplicity << ',' << sphere_cluster_sum(j) << '\n';
  }
  if (csv_path.empty())
    std::cout << os.str();
  else
    write_text_file(csv_path, os.str());
  return kExitOk;
}

int cmd_cache(const std::string& action, const std::string& dir) {
  if (action == "inspect") {
    if (!fs::exists(dir)) {
      std::cout << "cache dir " << dir << " does not exist\n";
      return kExitOk;
    }
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() != ".npsm") continue;
      try {
        auto m = cache_load(e.path().string());
        std::cout << e.path().filename().string() << ": kind=" << to_string(m.kind)
                  << " d=" << m.dim << " N=" << m.n_nodes << " grid_hash=" << std::hex
                  << m.grid_hash << std::dec << "\n";
      } catch (const Error& err) {
        std::cout << e.path().filename().string() << ": INVALID (" << err.what() << ")\n";
      }
    }
    return kExitOk;
  }
  if (action == "clear") {
    std::size_t n = 0;
    if (fs::exists(dir))
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".npsm") {
          fs::remove(e.path());
          ++n;
        }
    std::cout << "removed " << n << " cache files\n";
    return kExitOk;
  }
  std::cerr << "unknown cache action '" << action << "' (inspect|clear)\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npspect: spectral laboratory for elastostatic layer potentials"};
  app.require_subcommand(1);

  std::string config_path, suite, cache_action, cache_dir = "cache", csv_path;
  double lambda = 1.0, mu = 1.0, xi1 = 1.0, xi2 = 0.0;
  int jmax = 8;

  auto* spectrum = app.add_subcommand("spectrum", "assemble, eigensolve, write reports");
  spectrum->add_option("--config", config_path, "experiment config file")->required();

  auto* verify = app.add_subcommand("verify", "run a named acceptance suite");
  verify->add_option("--suite", suite, "suite name")->required();
  verify->add_option("--config", config_path, "optional config for ladder/workers");

  auto* symbol = app.add_subcommand("symbol", "dump symbol matrices and eigenvalues as JSON");
  symbol->add_option("--lambda", lambda);
  symbol->add_option("--mu", mu);
  symbol->add_option("--xi1", xi1);
  symbol->add_option("--xi2", xi2);

  auto* oracle = app.add_subcommand("oracle-dump", "dump the sphere eigenvalue table");
  oracle->add_option("--lambda", lambda);
  oracle->add_option("--mu", mu);
  oracle->add_option("--jmax", jmax);
  oracle->add_option("--csv", csv_path, "write to file instead of stdout");

  auto* cache = app.add_subcommand("cache", "inspect or clear the matrix cache");
  cache->add_option("action", cache_action, "inspect|clear")->required();
  cache->add_option("--dir", cache_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(config_path);
    if (verify->parsed()) {
      std::string cfg = config_path;
      return cmd_verify(suite, cfg);
    }
    if (symbol->parsed()) return cmd_symbol(lambda, mu, xi1, xi2);
    if (oracle->parsed()) return cmd_oracle_dump(lambda, mu, jmax, csv_path);
    if (cache->parsed()) return cmd_cache(cache_action, cache_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
