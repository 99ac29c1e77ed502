#pragma once

// Plain-text experiment configuration: "[section]" headers and "key = value"
// lines, '#' or ';' comments. Every run writes its resolved config next to
// the results so reruns are reproducible.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "npspect/core.hpp"

namespace npspect {

struct GridSize {
  int n_theta = 0, n_phi = 0;
};

struct ExperimentConfig {
  // [geometry]
  std::string geometry = "sphere";  // sphere | ellipsoid | two_spheres | circle | ellipse
  double radius = 1.0;
  double a = 2.0, b = 1.0, c = 1.0;     // ellipsoid / ellipse semi-axes
  double separation = 5.0;              // two_spheres center distance
  // [grid]
  std::vector<GridSize> ladder = {{12, 24}, {16, 32}, {24, 48}, {32, 64}};
  std::vector<int> curve_ladder = {128, 256, 512};
  // [material]
  std::string material = "constant";  // constant | per_component | z_linear | bump
  double lambda = 1.0, mu = 1.0;
  double lambda2 = 1.0, mu2 = 2.0;    // second component (per_component)
  double mu_mid = 1.5, mu_amp = 0.5;  // z_linear: mu = mu_mid + mu_amp * z
  // [assemble]
  std::vector<std::string> kinds = {"single_layer", "np", "symmetrized"};
  int workers = 0;
  std::string cache_dir;  // empty = no cache; NPSPECT_CACHE_DIR overrides
  // [analysis]
  bool clusters = true;
  double epsilon = 0.02;
  bool modified = false;
  int oracle_jmax = 0;  // 0 = skip oracle matching
  std::string decay_tips;  // e.g. "0:above:power:5:40"
  // [output]
  std::string out_dir = "out";
  std::uint64_t seed = 20240817;

  std::string resolved_text() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    require(pos == v.size(), Errc::config_parse, "");
    return d;
  } catch (...) {
    fail(Errc::config_parse, "config: bad numeric value for key '" + key + "': " + v);
  }
}

inline long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    require(pos == v.size(), Errc::config_parse, "");
    return d;
  } catch (...) {
    fail(Errc::config_parse, "config: bad integer value for key '" + key + "': " + v);
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(Errc::config_parse, "config: bad boolean value for key '" + key + "': " + v);
}

inline GridSize parse_grid_size(const std::string& key, const std::string& tok) {
  auto x = tok.find('x');
  require(x != std::string::npos, Errc::config_parse,
          "config: grid size must look like 16x32 for key '" + key + "': " + tok);
  GridSize g;
  g.n_theta = static_cast<int>(to_long(key, trim(tok.substr(0, x))));
  g.n_phi = static_cast<int>(to_long(key, trim(tok.substr(x + 1))));
  return g;
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', Errc::config_parse,
              "config line " + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    require(eq != std::string::npos, Errc::config_parse,
            "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    std::string qkey = section.empty() ? key : section + "." + key;

    if (qkey == "geometry.kind") cfg.geometry = val;
    else if (qkey == "geometry.radius") cfg.radius = detail::to_double(qkey, val);
    else if (qkey == "geometry.a") cfg.a = detail::to_double(qkey, val);
    else if (qkey == "geometry.b") cfg.b = detail::to_double(qkey, val);
    else if (qkey == "geometry.c") cfg.c = detail::to_double(qkey, val);
    else if (qkey == "geometry.separation") cfg.separation = detail::to_double(qkey, val);
    else if (qkey == "grid.ladder") {
      cfg.ladder.clear();
      for (const auto& tok : detail::split(val, ','))
        cfg.ladder.push_back(detail::parse_grid_size(qkey, tok));
      require(!cfg.ladder.empty(), Errc::config_parse, "config: empty grid.ladder");
    } else if (qkey == "grid.curve_ladder") {
      cfg.curve_ladder.clear();
      for (const auto& tok : detail::split(val, ','))
        cfg.curve_ladder.push_back(static_cast<int>(detail::to_long(qkey, tok)));
    } else if (qkey == "material.kind") cfg.material = val;
    else if (qkey == "material.lambda") cfg.lambda = detail::to_double(qkey, val);
    else if (qkey == "material.mu") cfg.mu = detail::to_double(qkey, val);
    else if (qkey == "material.lambda2") cfg.lambda2 = detail::to_double(qkey, val);
    else if (qkey == "material.mu2") cfg.mu2 = detail::to_double(qkey, val);
    else if (qkey == "material.mu_mid") cfg.mu_mid = detail::to_double(qkey, val);
    else if (qkey == "material.mu_amp") cfg.mu_amp = detail::to_double(qkey, val);
    else if (qkey == "assemble.kinds") cfg.kinds = detail::split(val, ',');
    else if (qkey == "assemble.workers") cfg.workers = static_cast<int>(detail::to_long(qkey, val));
    else if (qkey == "assemble.cache_dir") cfg.cache_dir = val;
    else if (qkey == "analysis.clusters") cfg.clusters = detail::to_bool(qkey, val);
    else if (qkey == "analysis.epsilon") cfg.epsilon = detail::to_double(qkey, val);
    else if (qkey == "analysis.modified") cfg.modified = detail::to_bool(qkey, val);
    else if (qkey == "analysis.oracle_jmax") cfg.oracle_jmax = static_cast<int>(detail::to_long(qkey, val));
    else if (qkey == "analysis.decay_tips") cfg.decay_tips = val;
    else if (qkey == "output.dir") cfg.out_dir = val;
    else if (qkey == "output.seed") cfg.seed = static_cast<std::uint64_t>(detail::to_long(qkey, val));
    else
      fail(Errc::config_parse, "config line " + std::to_string(lineno) + ": unknown key '" +
                                   qkey + "'");
  }
  if (const char* env = std::getenv("NPSPECT_CACHE_DIR"); env && *env) cfg.cache_dir = env;
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Errc::io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

inline std::string ExperimentConfig::resolved_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "[geometry]\n"
     << "kind = " << geometry << "\n"
     << "radius = " << radius << "\n"
     << "a = " << a << "\nb = " << b << "\nc = " << c << "\n"
     << "separation = " << separation << "\n\n[grid]\nladder = ";
  for (std::size_t i = 0; i < ladder.size(); ++i)
    os << (i ? "," : "") << ladder[i].n_theta << "x" << ladder[i].n_phi;
  os << "\ncurve_ladder = ";
  for (std::size_t i = 0; i < curve_ladder.size(); ++i) os << (i ? "," : "") << curve_ladder[i];
  os << "\n\n[material]\nkind = " << material << "\nlambda = " << lambda << "\nmu = " << mu
     << "\nlambda2 = " << lambda2 << "\nmu2 = " << mu2 << "\nmu_mid = " << mu_mid
     << "\nmu_amp = " << mu_amp << "\n\n[assemble]\nkinds = ";
  for (std::size_t i = 0; i < kinds.size(); ++i) os << (i ? "," : "") << kinds[i];
  os << "\nworkers = " << workers << "\ncache_dir = " << cache_dir
     << "\n\n[analysis]\nclusters = " << (clusters ? "true" : "false")
     << "\nepsilon = " << epsilon << "\nmodified = " << (modified ? "true" : "false")
     << "\noracle_jmax = " << oracle_jmax << "\ndecay_tips = " << decay_tips
     << "\n\n[output]\ndir = " << out_dir << "\nseed = " << seed << "\n";
  return os.str();
}

}  // namespace npspect
