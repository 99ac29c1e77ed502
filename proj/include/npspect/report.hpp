#pragma once

// JSON report and CSV eigenvalue dumps.
// Report schema:
//   { prediction, ladder: [{grid, capture, coverage}], fits: [{tip, side,
//     exponent, residual}], ... }

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "npspect/material.hpp"
#include "npspect/oracle.hpp"
#include "npspect/spectral.hpp"

namespace npspect {

inline nlohmann::json to_json(const EssSpecPrediction& pred) {
  nlohmann::json j;
  j["points"] = pred.points;
  j["intervals"] = nlohmann::json::array();
  for (const auto& iv : pred.intervals) j["intervals"].push_back({iv.lo, iv.hi});
  return j;
}

inline nlohmann::json to_json(const ClusterReport& rep) {
  nlohmann::json j;
  j["prediction"] = to_json(rep.prediction);
  j["epsilon"] = rep.eps;
  j["ladder"] = nlohmann::json::array();
  for (const auto& lv : rep.ladder)
    j["ladder"].push_back({{"grid", lv.grid},
                           {"n_eigenvalues", lv.n_eigenvalues},
                           {"capture", lv.capture},
                           {"coverage", lv.coverage}});
  j["per_target"] = nlohmann::json::array();
  for (const auto& t : rep.per_target)
    j["per_target"].push_back({{"target", t.point},
                               {"is_interval", t.is_interval},
                               {"assigned", t.assigned},
                               {"capture", t.capture}});
  j["capture_nondecreasing"] = rep.capture_nondecreasing;
  j["coverage_nondecreasing"] = rep.coverage_nondecreasing;
  j["pass"] = rep.pass;
  return j;
}

inline nlohmann::json to_json(const DecayFit& fit) {
  nlohmann::json j;
  j["tip"] = fit.tip;
  j["side"] = fit.side == Side::above ? "above" : (fit.side == Side::below ? "below" : "both");
  j["mode"] = fit.mode == FitMode::power ? "power" : "exponential";
  j[fit.mode == FitMode::power ? "exponent" : "rate"] = fit.value;
  j["residual"] = fit.residual;
  j["window"] = {fit.j_min, fit.j_max};
  j["n_selected"] = fit.n_selected;
  return j;
}

inline nlohmann::json to_json(const OracleMatchReport& rep) {
  nlohmann::json j;
  j["rel_tol"] = rep.rel_tol;
  j["ess_eps"] = rep.ess_eps;
  j["unclustered"] = rep.unclustered;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows)
    j["rows"].push_back({{"j", r.j},
                         {"branch", r.branch},
                         {"value", r.value},
                         {"cluster_mean", r.cluster_mean},
                         {"rel_error", r.observed_multiplicity ? r.rel_error : -1.0},
                         {"observed_multiplicity", r.observed_multiplicity},
                         {"expected_multiplicity", r.expected_multiplicity},
                         {"inside_essential", r.inside_essential},
                         {"isolated", r.isolated},
                         {"value_matched", r.value_matched}});
  return j;
}

/// CSV eigenvalue dump: grid_id,index,value (plus imag when present).
inline void write_spectrum_csv(const std::vector<SpectrumResult>& ladder, std::ostream& os) {
  os << "grid_id,index,value,imag\n";
  os.precision(17);
  for (std::size_t g = 0; g < ladder.size(); ++g)
    for (std::size_t i = 0; i < ladder[g].eigenvalues.size(); ++i)
      os << g << ',' << i << ',' << ladder[g].eigenvalues[i] << ','
         << ladder[g].imag_at(i) << '\n';
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), Errc::io, "cannot open " + path + " for writing");
  f << text;
  require(f.good(), Errc::io, "write failed for " + path);
}

}  // namespace npspect
