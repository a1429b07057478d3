#ifndef KDSIM_HARNESS_SCENARIO_HPP
#define KDSIM_HARNESS_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "kdsim/config_io.hpp"
#include "kdsim/harness/formats.hpp"
#include "kdsim/model.hpp"

namespace kdsim {

// Which analyses the runner performs on the final state.
struct AnalysisDirectives {
  bool transverse_spectrum = true;
  bool longitudinal_spectrum = true;
  bool energy_gain = false;
  bool sidebands = false;
  bool momentum_map = false;
  int order_multiple = 0;        // 0 = off; 2 or 4 bins transverse orders
  double order_k_ph_lambda = 0.0; // nm; wavelength defining k_ph, 0 = first beam
  double sideband_rel_threshold = 1e-3;
  double sideband_min_separation = 0.0; // eV; 0 = auto from prediction
};

struct Scenario {
  std::string name;
  SimulationConfig config;
  std::vector<double> spectrum_times; // fs, mid-run observer schedule
  AnalysisDirectives analysis;
  json expected; // optional acceptance annotations, carried through
  double wall_budget_seconds = 0.0;
};

inline Scenario scenario_from_json(const json& j) {
  detail::reject_unknown_keys(j,
                              {"name", "config", "spectrum_times_fs", "analysis",
                               "expected", "wall_budget_seconds"},
                              "");
  Scenario sc;
  sc.name = detail::get_required<std::string>(j, "name", "");
  if (!j.contains("config")) throw ConfigError("config", "missing required key");
  sc.config = config_from_json(j.at("config"), "config.");
  sc.spectrum_times = detail::get_or<std::vector<double>>(j, "spectrum_times_fs",
                                                          "", {});
  if (j.contains("analysis")) {
    const json& ja = j.at("analysis");
    detail::reject_unknown_keys(ja,
                                {"transverse_spectrum", "longitudinal_spectrum",
                                 "energy_gain", "sidebands", "momentum_map",
                                 "order_multiple", "order_k_ph_lambda_nm",
                                 "sideband_rel_threshold",
                                 "sideband_min_separation_ev"},
                                "analysis.");
    auto& a = sc.analysis;
    a.transverse_spectrum = detail::get_or<bool>(ja, "transverse_spectrum", "analysis.", true);
    a.longitudinal_spectrum = detail::get_or<bool>(ja, "longitudinal_spectrum", "analysis.", true);
    a.energy_gain = detail::get_or<bool>(ja, "energy_gain", "analysis.", false);
    a.sidebands = detail::get_or<bool>(ja, "sidebands", "analysis.", false);
    a.momentum_map = detail::get_or<bool>(ja, "momentum_map", "analysis.", false);
    a.order_multiple = detail::get_or<int>(ja, "order_multiple", "analysis.", 0);
    a.order_k_ph_lambda = detail::get_or<double>(ja, "order_k_ph_lambda_nm", "analysis.", 0.0);
    a.sideband_rel_threshold =
        detail::get_or<double>(ja, "sideband_rel_threshold", "analysis.", 1e-3);
    a.sideband_min_separation =
        detail::get_or<double>(ja, "sideband_min_separation_ev", "analysis.", 0.0);
  }
  if (j.contains("expected")) sc.expected = j.at("expected");
  sc.wall_budget_seconds = detail::get_or<double>(j, "wall_budget_seconds", "", 0.0);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return scenario_from_json(j);
}

inline std::string scenario_config_hash(const Scenario& sc) {
  return fnv1a64_hex(serialize_config(sc.config));
}

} // namespace kdsim

#endif
