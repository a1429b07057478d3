#ifndef KDSIM_MODEL_HPP
#define KDSIM_MODEL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

namespace kdsim {

enum class Direction { plus_y, minus_y };

inline double direction_sign(Direction d) {
  return d == Direction::plus_y ? 1.0 : -1.0;
}

// One pulsed Hermite-Gaussian beam. `pulse_sigma` is the Gaussian
// parameter of the temporal envelope exp(-(t-t0)^2 / (4 pulse_sigma^2));
// intensity_fwhm() converts to the intensity full width at half maximum
// for anyone who prefers that convention. `peak_field` is always the
// peak electric field of the HG00 mode built from the same power
// normalization constant; an n=1 beam therefore has a realized peak of
// sqrt(2/e) * peak_field (see actual_peak_field()).
//
// Derived quantities (omega, wavenumber, Rayleigh range, ...) are
// recomputed from the stored fields on every call so they can never go
// stale after an edit.
struct BeamSpec {
  int mode_n = 0;           // transverse Hermite order, 0 or 1
  int mode_m = 0;           // fixed 0 in 2D
  double wavelength = 0.0;  // nm
  double waist = 0.0;       // nm
  double pulse_sigma = 0.0; // fs
  double peak_field = 0.0;  // V/nm, HG00 reference
  Direction direction = Direction::plus_y;
  double arrival_time = 0.0; // fs
  bool enabled = true;

  double omega() const { return 2.0 * pi * constants.c() / wavelength; } // 1/fs
  double wavenumber() const { return omega() / constants.c(); }          // rad/nm
  double rayleigh_range() const { return pi * waist * waist / wavelength; } // nm
  double intensity_fwhm() const { return 2.0 * std::sqrt(2.0 * std::log(2.0)) * pulse_sigma; }

  // Power normalization constant A0 such that the HG00 peak field
  // omega * A0 * (2/pi)^(1/4) / sqrt(w0) equals `peak_field`.
  double amplitude_a0() const {
    return peak_field * std::sqrt(waist) / (omega() * std::pow(2.0 / pi, 0.25));
  }
  double actual_peak_field() const {
    return mode_n == 1 ? std::sqrt(2.0 / std::exp(1.0)) * peak_field : peak_field;
  }
  // Peak of |A| at the focus for this mode.
  double peak_vector_potential() const { return actual_peak_field() / omega(); }
};

// Initial Gaussian wavepacket. The widths are the Gaussian parameters of
// the probability density exp(-(x-x0)^2/(2 W_L^2)) etc., i.e. its
// standard deviations; the longitudinal width is along the electron
// axis x, the transverse width along the optical axis y.
struct ElectronSpec {
  double kinetic_energy = 0.0;      // eV
  double width_longitudinal = 0.0;  // nm
  double width_transverse = 0.0;    // nm
  double x0 = 0.0;                  // nm
  double y0 = 0.0;                  // nm
};

// Nonrelativistic speed in nm/fs. Rejects energies outside the model's
// validity window v/c < 0.2 (about 10 keV).
inline double electron_velocity(const ElectronSpec& e,
                                const PhysicalConstants& pc = constants) {
  if (!(e.kinetic_energy > 0.0))
    throw ConfigError("electron.kinetic_energy_ev", "must be positive");
  double v = std::sqrt(2.0 * e.kinetic_energy / pc.m0());
  if (v / pc.c() >= 0.2)
    throw ConfigError("electron.kinetic_energy_ev",
                      "v/c >= 0.2, outside the nonrelativistic model");
  return v;
}

inline double electron_carrier_k(const ElectronSpec& e,
                                 const PhysicalConstants& pc = constants) {
  return pc.m0() * electron_velocity(e, pc) / pc.hbar(); // rad/nm
}

enum class GridRole { maxwell, schrodinger };

// Uniform square-cell grid. Node (i, j) sits at
// (x0 + i*dx, y0 + j*dy); x is the electron axis, y the optical axis.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 0.0; // nm
  double dy = 0.0; // nm
  double x0 = 0.0; // nm, position of node (0, 0)
  double y0 = 0.0; // nm
  GridRole role = GridRole::schrodinger;

  double x_max() const { return x0 + (nx - 1) * dx; }
  double y_max() const { return y0 + (ny - 1) * dy; }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }

  bool contains(const GridSpec& inner) const {
    return inner.x0 >= x0 && inner.y0 >= y0 && inner.x_max() <= x_max() &&
           inner.y_max() <= y_max();
  }
};

enum class FieldProvider { analytic, fdtd };

struct AbsorberSpec {
  int pml_cells = 10;          // split-field PML thickness, Maxwell grid
  double pml_grading = 4.0;    // polynomial conductivity grading
  double pml_reflection = 1e-6; // design reflection at normal incidence
  double mask_fraction = 0.08; // cos^8 wavefunction mask, per side
  int mask_exponent = 8;
};

struct OutputSpec {
  std::string directory = "out";
  bool snapshots = false;
  bool momentum_map = true;
};

struct SimulationConfig {
  PhysicalConstants physical = constants;
  std::vector<BeamSpec> beams;
  ElectronSpec electron;
  GridSpec grid_maxwell;
  GridSpec grid_schrodinger;
  FieldProvider field_provider = FieldProvider::analytic;
  double total_time = 0.0; // fs
  double dt_tdse = 0.0;    // fs, 0 = auto (half the stability bound)
  double courant = 0.5;
  bool comoving = false;
  AbsorberSpec absorber;
  OutputSpec output;
};

// Upper bound on |H| used for the second-order-differencing stability
// limit: the extreme value of the (carrier-shifted) kinetic multiplier
// plus the ponderomotive bound at fully constructive beam overlap. The
// shifted kinetic term is hbar^2 ((k0+kx)^2 - k0^2 + ky^2) / 2 m0
// evaluated at the grid Nyquist.
inline double tdse_energy_bound(const SimulationConfig& cfg) {
  const auto& pc = cfg.physical;
  const auto& g = cfg.grid_schrodinger;
  double k0 = electron_carrier_k(cfg.electron, pc);
  double knx = pi / g.dx;
  double kny = pi / g.dy;
  double kin = pc.hbar() * pc.hbar() *
               (2.0 * k0 * knx + knx * knx + kny * kny) / (2.0 * pc.m0());
  double a_sum = 0.0;
  for (const auto& b : cfg.beams)
    if (b.enabled) a_sum += b.peak_vector_potential();
  double pond = pc.qe() * pc.qe() * a_sum * a_sum / (2.0 * pc.m0());
  return kin + pond;
}

// Auto timestep: half the SOD stability bound, additionally capped so
// the |A|^2 carrier beat at 2 omega is well resolved (the norm drifts
// quadratically in that phase step otherwise).
inline double resolve_dt_tdse(const SimulationConfig& cfg) {
  if (cfg.dt_tdse > 0.0) return cfg.dt_tdse;
  double dt = 0.5 * cfg.physical.hbar() / tdse_energy_bound(cfg);
  double omega_max = 0.0;
  for (const auto& b : cfg.beams)
    if (b.enabled && b.peak_field > 0.0) omega_max = std::max(omega_max, b.omega());
  if (omega_max > 0.0) dt = std::min(dt, 0.1 / (2.0 * omega_max));
  return dt;
}

inline double dt_maxwell(const SimulationConfig& cfg) {
  return cfg.courant * cfg.grid_maxwell.dx / cfg.physical.c();
}

namespace detail {

inline void require(std::vector<Diagnostic>& diags, bool ok,
                    const std::string& path, const std::string& msg) {
  if (!ok) diags.push_back({path, msg});
}

} // namespace detail

// Checks every type invariant and cross-field constraint. Returns the
// full list of findings; an empty list means the config is runnable.
inline std::vector<Diagnostic> validate_config(const SimulationConfig& cfg) {
  using detail::require;
  std::vector<Diagnostic> diags;
  const auto& pc = cfg.physical;

  for (std::size_t i = 0; i < cfg.beams.size(); ++i) {
    const auto& b = cfg.beams[i];
    std::string p = "beams[" + std::to_string(i) + "].";
    require(diags, b.mode_n == 0 || b.mode_n == 1, p + "mode_n",
            "unsupported Hermite order (only 0 and 1)");
    require(diags, b.mode_m == 0, p + "mode_m", "must be 0 in 2D");
    require(diags, b.wavelength > 0.0, p + "wavelength_nm", "must be positive");
    require(diags, b.waist > 0.0, p + "waist_nm", "waist must be positive");
    require(diags, b.pulse_sigma > 0.0, p + "pulse_sigma_fs", "must be positive");
    require(diags, b.peak_field >= 0.0, p + "peak_field_gvm", "must be >= 0");
  }

  const auto& e = cfg.electron;
  require(diags, e.kinetic_energy > 0.0, "electron.kinetic_energy_ev",
          "must be positive");
  require(diags, e.width_longitudinal > 0.0, "electron.width_longitudinal_nm",
          "must be positive");
  require(diags, e.width_transverse > 0.0, "electron.width_transverse_nm",
          "must be positive");
  if (e.kinetic_energy > 0.0) {
    double v = std::sqrt(2.0 * e.kinetic_energy / pc.m0());
    require(diags, v / pc.c() < 0.2, "electron.kinetic_energy_ev",
            "v/c >= 0.2, outside the nonrelativistic model");
  }

  for (const GridSpec* g : {&cfg.grid_maxwell, &cfg.grid_schrodinger}) {
    std::string p = g->role == GridRole::maxwell ? "grid_maxwell." : "grid_schrodinger.";
    require(diags, g->nx >= 8 && g->ny >= 8, p + "nx", "grid too small");
    require(diags, g->dx > 0.0 && g->dy > 0.0, p + "dx_nm", "must be positive");
    require(diags, g->dx == g->dy, p + "dy_nm", "cells must be square (dx = dy)");
  }
  require(diags, cfg.grid_maxwell.role == GridRole::maxwell, "grid_maxwell.role",
          "wrong role");
  require(diags, cfg.grid_schrodinger.role == GridRole::schrodinger,
          "grid_schrodinger.role", "wrong role");
  require(diags, cfg.grid_maxwell.contains(cfg.grid_schrodinger),
          "grid_schrodinger", "must be fully contained in the Maxwell grid");

  require(diags, cfg.courant > 0.0 && cfg.courant <= 1.0 / std::sqrt(2.0),
          "courant", "2D Yee scheme requires 0 < courant <= 1/sqrt(2)");
  require(diags, cfg.total_time > 0.0, "total_time_fs", "must be positive");
  require(diags, cfg.dt_tdse >= 0.0, "dt_tdse_fs", "must be >= 0 (0 = auto)");

  const auto& a = cfg.absorber;
  require(diags, a.pml_cells >= 8, "absorber.pml_cells", "must be >= 8");
  require(diags, a.mask_fraction > 0.0 && a.mask_fraction < 0.5,
          "absorber.mask_fraction", "must be in (0, 0.5)");
  require(diags, a.mask_exponent >= 2, "absorber.mask_exponent", "must be >= 2");

  bool fields_ok = diags.empty();
  if (fields_ok && cfg.dt_tdse > 0.0) {
    double bound = pc.hbar() / tdse_energy_bound(cfg);
    require(diags, cfg.dt_tdse < bound, "dt_tdse_fs",
            "exceeds the SOD stability bound hbar/E_max = " +
                std::to_string(bound) + " fs");
  }
  return diags;
}

// Throwing flavour of validate_config for call sites that want a
// ready-to-run config or nothing.
inline SimulationConfig validated(SimulationConfig cfg) {
  auto diags = validate_config(cfg);
  if (!diags.empty()) throw ConfigError(std::move(diags));
  return cfg;
}

} // namespace kdsim

#endif
