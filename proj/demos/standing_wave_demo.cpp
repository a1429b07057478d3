// Minimal end-to-end run: a 1 keV wavepacket crossing a weak CW
// standing wave, printing the transverse momentum spectrum so the
// 2 k_ph diffraction peaks are visible on the terminal.

#include <cstdio>

#include "kdsim/diagnostics.hpp"
#include "kdsim/tdse.hpp"

int main() {
  using namespace kdsim;

  SimulationConfig cfg;
  BeamSpec beam;
  beam.mode_n = 0;
  beam.wavelength = 150.0;
  beam.waist = 225.0;
  beam.pulse_sigma = 1e6; // effectively CW
  beam.peak_field = 8.0;
  beam.direction = Direction::plus_y;
  cfg.beams = {beam, beam};
  cfg.beams[1].direction = Direction::minus_y;

  cfg.electron = {4000.0, 30.0, 35.0, -700.0, 0.0};
  cfg.grid_schrodinger = {768, 192, 1.8, 1.8, -1100.0, -170.0, GridRole::schrodinger};
  cfg.grid_maxwell = {800, 220, 3.0, 3.0, -1200.0, -330.0, GridRole::maxwell};
  cfg.total_time = 40.0;

  RunResult res = run_interaction(cfg);
  Spectrum s = momentum_spectrum(res.state, SpectrumAxis::transverse);
  s.normalize_max();

  double k_ph = cfg.beams[0].wavenumber();
  std::printf("final norm %.6f (absorbed %.2e), %ld steps\n", res.final_norm,
              res.state.absorbed_fraction, res.steps);
  std::printf("transverse spectrum in units of 2 k_ph:\n");
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    double order = s.axis[i] / (2.0 * k_ph);
    if (order < -4.2 || order > 4.2) continue;
    int bar = int(s.density[i] * 60.0);
    std::printf("%7.2f |", order);
    for (int b = 0; b < bar; ++b) std::putchar('#');
    std::putchar('\n');
  }
  return 0;
}
