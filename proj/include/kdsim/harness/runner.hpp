#ifndef KDSIM_HARNESS_RUNNER_HPP
#define KDSIM_HARNESS_RUNNER_HPP

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "kdsim/beams.hpp"
#include "kdsim/diagnostics.hpp"
#include "kdsim/harness/formats.hpp"
#include "kdsim/harness/scenario.hpp"
#include "kdsim/tdse.hpp"

namespace kdsim {

namespace fs = std::filesystem;

inline fs::path output_root() {
  if (const char* env = std::getenv("KDSIM_OUTPUT_ROOT")) return fs::path(env);
  return fs::path(".");
}

struct RunOutputs {
  fs::path dir;
  RunManifest manifest;
  // analysis results kept in memory for callers that want them
  std::optional<Spectrum> transverse, longitudinal, energy_gain;
  std::optional<SidebandStats> sidebands;
  std::optional<OrderPopulations> orders;
};

namespace detail {

inline void record_file(RunOutputs& out, const fs::path& rel) {
  out.manifest.files[rel.string()] = checksum_file(out.dir / rel);
}

inline void emit_spectrum(RunOutputs& out, const std::string& name, const Spectrum& s) {
  write_spectrum_csv(out.dir / name, s);
  record_file(out, name);
}

} // namespace detail

// Executes one scenario: propagates, writes spectra / maps / manifest
// under <root>/<scenario-name>/, and returns the in-memory results.
inline RunOutputs run_scenario(const Scenario& sc, fs::path root = output_root()) {
  RunOutputs out;
  out.dir = root / sc.config.output.directory / sc.name;
  fs::create_directories(out.dir);
  out.manifest.scenario = sc.name;
  out.manifest.config_hash = scenario_config_hash(sc);

  double v_el = electron_velocity(sc.config.electron, sc.config.physical);

  RunObservers obs;
  obs.times = sc.spectrum_times;
  obs.wall_budget_seconds = sc.wall_budget_seconds;
  int snapshot_index = 0;
  if (!sc.spectrum_times.empty()) {
    obs.on_time = [&](const WavefunctionState& s) {
      Spectrum sp = momentum_spectrum(s, SpectrumAxis::transverse);
      detail::emit_spectrum(out, "transverse_t" + std::to_string(snapshot_index) + ".csv", sp);
      ++snapshot_index;
    };
  }

  auto t0 = std::chrono::steady_clock::now();
  RunResult res = run_interaction(sc.config, obs);
  out.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.manifest.completed = res.completed;
  out.manifest.final_norm = res.final_norm;
  out.manifest.absorbed_fraction = res.state.absorbed_fraction;

  const auto& a = sc.analysis;
  if (a.transverse_spectrum) {
    out.transverse = momentum_spectrum(res.state, SpectrumAxis::transverse);
    detail::emit_spectrum(out, "transverse.csv", *out.transverse);
  }
  if (a.longitudinal_spectrum) {
    out.longitudinal = momentum_spectrum(res.state, SpectrumAxis::longitudinal);
    detail::emit_spectrum(out, "longitudinal.csv", *out.longitudinal);
  }
  if (a.energy_gain || a.sidebands) {
    out.energy_gain = energy_gain_spectrum(res.state, sc.config.electron,
                                           sc.config.physical);
    detail::emit_spectrum(out, "energy_gain.csv", *out.energy_gain);
  }
  if (a.sidebands) {
    SidebandOptions so;
    so.rel_threshold = a.sideband_rel_threshold;
    so.min_separation = a.sideband_min_separation;
    if (so.min_separation <= 0.0 && sc.config.beams.size() >= 2)
      so.predicted_spacing =
          pair_predicted_spacing(sc.config.beams[0], sc.config.beams[1], v_el,
                                 sc.config.physical);
    Spectrum unit_max = *out.energy_gain;
    unit_max.normalize_max();
    out.sidebands = detect_sidebands(unit_max, so);
    json j{{"count", out.sidebands->count},
           {"low_confidence", out.sidebands->low_confidence},
           {"mean_spacing_ev", out.sidebands->mean_spacing},
           {"median_spacing_ev", out.sidebands->median_spacing},
           {"standard_error_ev", out.sidebands->standard_error},
           {"predicted_spacing_ev", so.predicted_spacing},
           {"peaks_ev", out.sidebands->peak_positions}};
    write_file(out.dir / "sidebands.json", j.dump(2) + "\n");
    detail::record_file(out, "sidebands.json");
  }
  if (a.order_multiple > 0 && out.transverse) {
    double lambda = a.order_k_ph_lambda > 0.0 ? a.order_k_ph_lambda
                    : sc.config.beams.empty() ? 0.0
                                              : sc.config.beams[0].wavelength;
    double k_ph = 2.0 * pi / lambda;
    out.orders = order_populations(*out.transverse, k_ph, a.order_multiple);
    json j{{"k_ph_per_nm", k_ph},
           {"multiple", a.order_multiple},
           {"max_order", out.orders->max_order},
           {"weights", out.orders->weight}};
    write_file(out.dir / "orders.json", j.dump(2) + "\n");
    detail::record_file(out, "orders.json");
  }
  if (a.momentum_map) {
    MomentumMap map = momentum_map(res.state);
    Raw2DMeta meta;
    meta.shape = {map.ky.size(), map.kx.size()};
    meta.row_start = map.ky.front();
    meta.row_spacing = map.ky.size() > 1 ? map.ky[1] - map.ky[0] : 0.0;
    meta.col_start = map.kx.front();
    meta.col_spacing = map.kx.size() > 1 ? map.kx[1] - map.kx[0] : 0.0;
    meta.row_unit = "rad/nm";
    meta.col_unit = "rad/nm";
    meta.value_unit = "probability per (rad/nm)^2";
    meta.kind = "momentum_map";
    meta.config_hash = out.manifest.config_hash;
    write_raw2d(out.dir / "momentum_map", map.density, meta);
    detail::record_file(out, "momentum_map.f64");
    detail::record_file(out, "momentum_map.json");
  }

  // config echo for reproducibility checks
  write_file(out.dir / "config.json", serialize_config(sc.config) + "\n");
  detail::record_file(out, "config.json");

  write_manifest(out.dir / "manifest.json", out.manifest);
  return out;
}

// Plot-ready exports: max-normalized copies of the stored spectra, the
// convention the figures use. Re-emission is byte-idempotent.
inline std::vector<fs::path> emit_plot_data(const fs::path& run_dir) {
  std::vector<fs::path> written;
  bool any = false;
  for (const char* name : {"transverse.csv", "longitudinal.csv", "energy_gain.csv"}) {
    fs::path src = run_dir / name;
    if (!fs::exists(src)) continue;
    any = true;
    Spectrum s = read_spectrum_csv(src);
    s.normalize_max();
    fs::path dst = run_dir / (std::string("plot_") + name);
    write_spectrum_csv(dst, s);
    written.push_back(dst);
  }
  if (!any)
    throw IoError("no spectra found in " + run_dir.string() +
                  " (expected transverse.csv / longitudinal.csv / energy_gain.csv)");
  return written;
}

} // namespace kdsim

#endif
