#ifndef KDSIM_CONFIG_IO_HPP
#define KDSIM_CONFIG_IO_HPP

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdsim/model.hpp"

// Config file schema. All lengths are nm, times fs, fields GV/m (which
// is numerically identical to the internal V/nm). Unknown keys are hard
// errors: a typo in a physics config must never be silently ignored.

namespace kdsim {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path + it.key(), "unknown key");
  }
}

template <typename T>
T get_required(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + key, "missing required key");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + key, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + key, std::string("wrong type: ") + e.what());
  }
}

} // namespace detail

inline BeamSpec beam_from_json(const json& j, const std::string& path) {
  using namespace detail;
  reject_unknown_keys(j,
                      {"mode_n", "mode_m", "wavelength_nm", "waist_nm",
                       "pulse_sigma_fs", "peak_field_gvm", "direction",
                       "arrival_time_fs", "enabled"},
                      path);
  BeamSpec b;
  b.mode_n = get_required<int>(j, "mode_n", path);
  b.mode_m = get_or<int>(j, "mode_m", path, 0);
  b.wavelength = get_required<double>(j, "wavelength_nm", path);
  b.waist = get_required<double>(j, "waist_nm", path);
  b.pulse_sigma = get_required<double>(j, "pulse_sigma_fs", path);
  b.peak_field = get_required<double>(j, "peak_field_gvm", path);
  std::string dir = get_required<std::string>(j, "direction", path);
  if (dir == "+y")
    b.direction = Direction::plus_y;
  else if (dir == "-y")
    b.direction = Direction::minus_y;
  else
    throw ConfigError(path + "direction", "must be \"+y\" or \"-y\"");
  b.arrival_time = get_or<double>(j, "arrival_time_fs", path, 0.0);
  b.enabled = get_or<bool>(j, "enabled", path, true);
  return b;
}

inline json beam_to_json(const BeamSpec& b) {
  return json{{"mode_n", b.mode_n},
              {"mode_m", b.mode_m},
              {"wavelength_nm", b.wavelength},
              {"waist_nm", b.waist},
              {"pulse_sigma_fs", b.pulse_sigma},
              {"peak_field_gvm", b.peak_field},
              {"direction", b.direction == Direction::plus_y ? "+y" : "-y"},
              {"arrival_time_fs", b.arrival_time},
              {"enabled", b.enabled}};
}

inline GridSpec grid_from_json(const json& j, GridRole role, const std::string& path) {
  using namespace detail;
  reject_unknown_keys(j, {"nx", "ny", "dx_nm", "dy_nm", "x0_nm", "y0_nm"}, path);
  GridSpec g;
  g.role = role;
  g.nx = get_required<int>(j, "nx", path);
  g.ny = get_required<int>(j, "ny", path);
  g.dx = get_required<double>(j, "dx_nm", path);
  g.dy = get_or<double>(j, "dy_nm", path, g.dx);
  g.x0 = get_required<double>(j, "x0_nm", path);
  g.y0 = get_required<double>(j, "y0_nm", path);
  return g;
}

inline json grid_to_json(const GridSpec& g) {
  return json{{"nx", g.nx},   {"ny", g.ny},   {"dx_nm", g.dx},
              {"dy_nm", g.dy}, {"x0_nm", g.x0}, {"y0_nm", g.y0}};
}

inline SimulationConfig config_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  reject_unknown_keys(j,
                      {"beams", "electron", "grid_maxwell", "grid_schrodinger",
                       "field_provider", "total_time_fs", "dt_tdse_fs", "courant",
                       "comoving", "absorber", "output"},
                      path);
  SimulationConfig cfg;

  if (!j.contains("beams") || !j.at("beams").is_array())
    throw ConfigError(path + "beams", "missing beam list");
  for (std::size_t i = 0; i < j.at("beams").size(); ++i)
    cfg.beams.push_back(beam_from_json(j.at("beams")[i],
                                       path + "beams[" + std::to_string(i) + "]."));

  const json& je = j.contains("electron") ? j.at("electron") : json::object();
  reject_unknown_keys(je,
                      {"kinetic_energy_ev", "width_longitudinal_nm",
                       "width_transverse_nm", "x0_nm", "y0_nm"},
                      path + "electron.");
  cfg.electron.kinetic_energy =
      get_required<double>(je, "kinetic_energy_ev", path + "electron.");
  cfg.electron.width_longitudinal =
      get_required<double>(je, "width_longitudinal_nm", path + "electron.");
  cfg.electron.width_transverse =
      get_required<double>(je, "width_transverse_nm", path + "electron.");
  cfg.electron.x0 = get_or<double>(je, "x0_nm", path + "electron.", 0.0);
  cfg.electron.y0 = get_or<double>(je, "y0_nm", path + "electron.", 0.0);

  if (!j.contains("grid_maxwell"))
    throw ConfigError(path + "grid_maxwell", "missing required key");
  if (!j.contains("grid_schrodinger"))
    throw ConfigError(path + "grid_schrodinger", "missing required key");
  cfg.grid_maxwell =
      grid_from_json(j.at("grid_maxwell"), GridRole::maxwell, path + "grid_maxwell.");
  cfg.grid_schrodinger = grid_from_json(j.at("grid_schrodinger"),
                                        GridRole::schrodinger,
                                        path + "grid_schrodinger.");

  std::string provider = get_or<std::string>(j, "field_provider", path, "analytic");
  if (provider == "analytic")
    cfg.field_provider = FieldProvider::analytic;
  else if (provider == "fdtd")
    cfg.field_provider = FieldProvider::fdtd;
  else
    throw ConfigError(path + "field_provider", "must be \"analytic\" or \"fdtd\"");

  cfg.total_time = get_required<double>(j, "total_time_fs", path);
  cfg.dt_tdse = get_or<double>(j, "dt_tdse_fs", path, 0.0);
  cfg.courant = get_or<double>(j, "courant", path, 0.5);
  cfg.comoving = get_or<bool>(j, "comoving", path, false);

  if (j.contains("absorber")) {
    const json& ja = j.at("absorber");
    reject_unknown_keys(ja,
                        {"pml_cells", "pml_grading", "pml_reflection",
                         "mask_fraction", "mask_exponent"},
                        path + "absorber.");
    cfg.absorber.pml_cells = get_or<int>(ja, "pml_cells", path, 10);
    cfg.absorber.pml_grading = get_or<double>(ja, "pml_grading", path, 4.0);
    cfg.absorber.pml_reflection = get_or<double>(ja, "pml_reflection", path, 1e-6);
    cfg.absorber.mask_fraction = get_or<double>(ja, "mask_fraction", path, 0.08);
    cfg.absorber.mask_exponent = get_or<int>(ja, "mask_exponent", path, 8);
  }

  if (j.contains("output")) {
    const json& jo = j.at("output");
    reject_unknown_keys(jo, {"directory", "snapshots", "momentum_map"},
                        path + "output.");
    cfg.output.directory = get_or<std::string>(jo, "directory", path, "out");
    cfg.output.snapshots = get_or<bool>(jo, "snapshots", path, false);
    cfg.output.momentum_map = get_or<bool>(jo, "momentum_map", path, true);
  }
  return cfg;
}

inline json config_to_json(const SimulationConfig& cfg) {
  json jb = json::array();
  for (const auto& b : cfg.beams) jb.push_back(beam_to_json(b));
  return json{
      {"beams", jb},
      {"electron",
       {{"kinetic_energy_ev", cfg.electron.kinetic_energy},
        {"width_longitudinal_nm", cfg.electron.width_longitudinal},
        {"width_transverse_nm", cfg.electron.width_transverse},
        {"x0_nm", cfg.electron.x0},
        {"y0_nm", cfg.electron.y0}}},
      {"grid_maxwell", grid_to_json(cfg.grid_maxwell)},
      {"grid_schrodinger", grid_to_json(cfg.grid_schrodinger)},
      {"field_provider",
       cfg.field_provider == FieldProvider::analytic ? "analytic" : "fdtd"},
      {"total_time_fs", cfg.total_time},
      {"dt_tdse_fs", cfg.dt_tdse},
      {"courant", cfg.courant},
      {"comoving", cfg.comoving},
      {"absorber",
       {{"pml_cells", cfg.absorber.pml_cells},
        {"pml_grading", cfg.absorber.pml_grading},
        {"pml_reflection", cfg.absorber.pml_reflection},
        {"mask_fraction", cfg.absorber.mask_fraction},
        {"mask_exponent", cfg.absorber.mask_exponent}}},
      {"output",
       {{"directory", cfg.output.directory},
        {"snapshots", cfg.output.snapshots},
        {"momentum_map", cfg.output.momentum_map}}}};
}

inline SimulationConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return config_from_json(j);
}

// Canonical serialization: nlohmann keeps object keys sorted, so the
// dump is deterministic and suitable for hashing.
inline std::string serialize_config(const SimulationConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

} // namespace kdsim

#endif
