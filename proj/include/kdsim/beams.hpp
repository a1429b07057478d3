#ifndef KDSIM_BEAMS_HPP
#define KDSIM_BEAMS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/model.hpp"

// Closed-form pulsed Hermite-Gaussian optics: field evaluation, power
// normalized amplitudes, transverse momentum spectra and their pairwise
// convolutions, the stimulated Compton condition, the Bragg/diffraction
// regime classifier and exposure diagnostics. Everything here is a pure
// function of the beam parameters.

namespace kdsim {

using cplx = std::complex<double>;

// Power-normalized spatial factor of the vector potential for mode n in
// {0, 1}. x is transverse to the beam, y runs along its propagation
// (already mirrored by the caller for -y beams). Includes the plane
// phase exp(i k y), the Gouy phase (1+n) arctan(y/y_r) and the
// curvature phase k x^2 / 2R(y).
inline cplx hg_envelope(const BeamSpec& beam, double x, double y) {
  if (beam.mode_n != 0 && beam.mode_n != 1)
    throw ConfigError("mode_n", "unsupported Hermite order (only 0 and 1)");
  double w0 = beam.waist;
  double yr = beam.rayleigh_range();
  double k = beam.wavenumber();
  double wy = w0 * std::sqrt(1.0 + (y / yr) * (y / yr));
  double inv_r = y / (y * y + yr * yr); // 1/R(y), finite at the focus
  double a0 = beam.amplitude_a0();

  double amp;
  if (beam.mode_n == 0) {
    amp = a0 / std::sqrt(w0) * std::pow(2.0 / pi, 0.25) * (w0 / wy);
  } else {
    amp = a0 / (std::pow(2.0 * pi, 0.25) * std::sqrt(w0)) * (w0 / wy) *
          (2.0 * std::sqrt(2.0) * x / wy);
  }
  amp *= std::exp(-x * x / (wy * wy));
  double phase = k * y - (1.0 + beam.mode_n) * std::atan(y / yr) +
                 0.5 * k * x * x * inv_r;
  return std::polar(1.0, phase) * amp;
}

inline double pulse_envelope(const BeamSpec& beam, double t) {
  double u = (t - beam.arrival_time) / (2.0 * beam.pulse_sigma);
  return std::exp(-u * u);
}

// Instantaneous beam component of the vector potential at (x, y, t):
// sum over enabled beams of Re[envelope * exp(-i omega t)] times the
// Gaussian pulse envelope. Units V fs / nm. The component lies in
// plane, transverse to the +-y propagation axes.
inline double vector_potential_analytic(const std::vector<BeamSpec>& beams,
                                        double x, double y, double t) {
  double a = 0.0;
  for (const auto& b : beams) {
    if (!b.enabled) continue;
    double ys = direction_sign(b.direction) * y;
    cplx env = hg_envelope(b, x, ys);
    a += (env * std::polar(1.0, -b.omega() * t)).real() * pulse_envelope(b, t);
  }
  return a;
}

enum class SpectrumProvenance { hg00, hg10, convolution };

// Transverse momentum amplitude A_n(k_perp) on a symmetric k grid.
struct TransverseSpectrum {
  std::vector<double> k;        // rad/nm, symmetric about 0
  std::vector<cplx> amplitude;
  SpectrumProvenance provenance = SpectrumProvenance::hg00;
};

inline std::vector<double> symmetric_k_grid(double k_max, int n_half) {
  std::vector<double> k(std::size_t(2 * n_half + 1));
  for (int i = -n_half; i <= n_half; ++i)
    k[std::size_t(i + n_half)] = k_max * double(i) / double(n_half);
  return k;
}

// Closed-form Fourier transform of the mode profile at the focal plane:
//   n = 0:  A0 w0^{3/2} / (2 pi)^{1/4} exp(-k^2 w0^2/4)
//   n = 1:  A0 w0^{3/2} i k / (2 (2 pi)^{1/4}) exp(-k^2 w0^2/4)
inline cplx transverse_spectrum_amplitude(const BeamSpec& beam, double k_perp) {
  if (beam.mode_n != 0 && beam.mode_n != 1)
    throw ConfigError("mode_n", "unsupported Hermite order (only 0 and 1)");
  double w0 = beam.waist;
  double a0 = beam.amplitude_a0();
  double gauss = std::exp(-k_perp * k_perp * w0 * w0 / 4.0);
  double c = a0 * std::pow(w0, 1.5) / std::pow(2.0 * pi, 0.25);
  if (beam.mode_n == 0) return cplx(c * gauss, 0.0);
  return cplx(0.0, 0.5 * c * k_perp * gauss);
}

inline TransverseSpectrum transverse_spectrum(const BeamSpec& beam,
                                              const std::vector<double>& k_grid) {
  TransverseSpectrum s;
  s.k = k_grid;
  s.amplitude.reserve(k_grid.size());
  for (double k : k_grid) s.amplitude.push_back(transverse_spectrum_amplitude(beam, k));
  s.provenance = beam.mode_n == 0 ? SpectrumProvenance::hg00 : SpectrumProvenance::hg10;
  return s;
}

enum class ConvolutionKind { hg10_hg00, hg00_hg00, hg10_hg10 };

// Closed form of the pairwise spectrum convolution. All three printed
// forms share the Gaussian exp(-alpha k^2) with
// alpha = w1^2 w2^2 / (4 (w1^2 + w2^2)); they differ in the polynomial
// prefactor. A pair of order-1 beams with lambda_a = 2 lambda_b falls
// back to the odd x Gaussian form with the short-wavelength beam taken
// as an HG00 (its two spectral lobes merge into one at that scale).
struct ConvolutionForm {
  ConvolutionKind kind;
  double w1 = 0.0; // nm; for hg10_hg00 this is the order-1 beam's waist
  double w2 = 0.0;
  double coefficient = 1.0; // overall constant, A0^2 and waist powers
  double alpha = 0.0;       // nm^2

  double eval_magnitude(double k) const {
    double g = std::exp(-alpha * k * k);
    switch (kind) {
      case ConvolutionKind::hg10_hg00: return std::abs(coefficient * k * g);
      case ConvolutionKind::hg00_hg00: return std::abs(coefficient * g);
      case ConvolutionKind::hg10_hg10:
        return std::abs(coefficient *
                        (w1 * w1 * w2 * w2 * k * k - 2.0 * w2 * w2 - 2.0 * w1 * w1) * g);
    }
    return 0.0;
  }

  double eval_signed(double k) const {
    double g = std::exp(-alpha * k * k);
    switch (kind) {
      case ConvolutionKind::hg10_hg00: return coefficient * k * g;
      case ConvolutionKind::hg00_hg00: return coefficient * g;
      case ConvolutionKind::hg10_hg10:
        return coefficient *
               (w1 * w1 * w2 * w2 * k * k - 2.0 * w2 * w2 - 2.0 * w1 * w1) * g;
    }
    return 0.0;
  }

  // Characteristic transverse momentum of the pair: the scale whose
  // two-photon exchange sets the sideband spacing. For forms with an
  // odd factor this is the exact |A_C| maximum
  // sqrt(2 (w1^2 + w2^2)) / (w1 w2), which for the order-1 pair is also
  // the edge of the central lobe. For the Gaussian form it is the half
  // width at half maximum, 2 sqrt(ln 2 (w1^2 + w2^2)) / (w1 w2).
  double characteristic_k_perp() const {
    double s2 = w1 * w1 + w2 * w2;
    if (kind == ConvolutionKind::hg00_hg00)
      return 2.0 * std::sqrt(std::log(2.0) * s2) / (w1 * w2);
    return std::sqrt(2.0 * s2) / (w1 * w2);
  }
};

inline ConvolutionForm convolution_closed_form(const BeamSpec& a, const BeamSpec& b) {
  auto bad = [](const BeamSpec& s) { return s.mode_n != 0 && s.mode_n != 1; };
  if (bad(a) || bad(b))
    throw ConfigError("mode_n", "unsupported order pair for convolution");

  const BeamSpec* first = &a;
  const BeamSpec* second = &b;
  int na = a.mode_n, nb = b.mode_n;
  if (na == 1 && nb == 1) {
    double ratio = a.wavelength / b.wavelength;
    if (std::abs(ratio - 2.0) < 1e-9) { // short-wavelength HG10 acts as HG00
      nb = 0;
    } else if (std::abs(ratio - 0.5) < 1e-9) {
      na = 0;
      std::swap(first, second);
      std::swap(na, nb);
    }
  }
  if (na == 0 && nb == 1) { // normalize to (1, 0) ordering
    std::swap(first, second);
    std::swap(na, nb);
  }

  ConvolutionForm f;
  f.w1 = first->waist;
  f.w2 = second->waist;
  double s2 = f.w1 * f.w1 + f.w2 * f.w2;
  f.alpha = f.w1 * f.w1 * f.w2 * f.w2 / (4.0 * s2);
  double a0sq = first->amplitude_a0() * second->amplitude_a0();
  if (na == 1 && nb == 0) {
    f.kind = ConvolutionKind::hg10_hg00;
    f.coefficient = a0sq / std::sqrt(2.0) * std::pow(f.w1, 1.5) *
                    std::pow(f.w2, 3.0) / std::pow(s2, 1.5);
  } else if (na == 0 && nb == 0) {
    f.kind = ConvolutionKind::hg00_hg00;
    f.coefficient = a0sq * std::sqrt(2.0) * std::pow(f.w1 * f.w2, 1.5) / std::sqrt(s2);
  } else {
    f.kind = ConvolutionKind::hg10_hg10;
    f.coefficient = a0sq / 16.0 * std::pow(f.w1 * f.w2, 1.5) / std::pow(s2, 2.5);
  }
  return f;
}

inline TransverseSpectrum convolve_spectra(const BeamSpec& a, const BeamSpec& b,
                                           const std::vector<double>& k_grid) {
  ConvolutionForm f = convolution_closed_form(a, b);
  TransverseSpectrum s;
  s.k = k_grid;
  s.amplitude.reserve(k_grid.size());
  for (double k : k_grid) s.amplitude.emplace_back(f.eval_signed(k), 0.0);
  s.provenance = SpectrumProvenance::convolution;
  return s;
}

// Stimulated Compton condition, |(w1 - w2) - v (k1 - k2)| <= tolerance.
inline bool compton_condition(double v_el, double k_perp_1, double k_perp_2,
                              double omega_1, double omega_2, double tolerance) {
  return std::abs((omega_1 - omega_2) - v_el * (k_perp_1 - k_perp_2)) <= tolerance;
}

// Dominant transverse momentum of a single beam's spectrum: the
// |A_n(k)| maximum, sqrt(2)/w0 for n = 1 and 0 for n = 0.
inline double dominant_k_perp(const BeamSpec& beam) {
  return beam.mode_n == 1 ? std::sqrt(2.0) / beam.waist : 0.0;
}

struct ComptonMap {
  std::vector<double> axis_rows; // v_el (nm/fs) or wavelength (nm)
  std::vector<double> axis_cols; // pulse sigma (fs)
  std::vector<std::uint8_t> satisfied; // row-major, 1 = white = true
  std::uint8_t at(std::size_t r, std::size_t c) const {
    return satisfied[r * axis_cols.size() + c];
  }
};

// A counter-propagating pair of the given beam satisfies the inelastic
// condition when the required frequency offset v * 2 k_perp_max fits
// within the pulse's spectral width, taken as
// spectral_width_multiplier / (2 dtau). The multiplier is an explicit
// knob; its default is the intensity-FWHM factor 2 sqrt(2 ln 2).
inline bool compton_pair_satisfiable(const BeamSpec& beam, double v_el,
                                     double pulse_sigma,
                                     double spectral_width_multiplier =
                                         2.0 * std::sqrt(2.0 * std::log(2.0))) {
  double needed = std::abs(v_el * 2.0 * dominant_k_perp(beam));
  double budget = spectral_width_multiplier / (2.0 * pulse_sigma);
  return needed <= budget;
}

inline ComptonMap compton_map_velocity_tau(const BeamSpec& beam,
                                           const std::vector<double>& v_range,
                                           const std::vector<double>& tau_range,
                                           double spectral_width_multiplier =
                                               2.0 * std::sqrt(2.0 * std::log(2.0))) {
  ComptonMap m;
  m.axis_rows = v_range;
  m.axis_cols = tau_range;
  m.satisfied.reserve(v_range.size() * tau_range.size());
  for (double v : v_range)
    for (double tau : tau_range)
      m.satisfied.push_back(
          compton_pair_satisfiable(beam, v, tau, spectral_width_multiplier) ? 1 : 0);
  return m;
}

// Wavelength axis variant; the waist scales with wavelength so that
// w0/lambda stays at the template beam's ratio.
inline ComptonMap compton_map_lambda_tau(const BeamSpec& beam, double v_el,
                                         const std::vector<double>& lambda_range,
                                         const std::vector<double>& tau_range,
                                         double spectral_width_multiplier =
                                             2.0 * std::sqrt(2.0 * std::log(2.0))) {
  ComptonMap m;
  m.axis_rows = lambda_range;
  m.axis_cols = tau_range;
  double waist_per_lambda = beam.waist / beam.wavelength;
  m.satisfied.reserve(lambda_range.size() * tau_range.size());
  for (double lambda : lambda_range) {
    BeamSpec scaled = beam;
    scaled.wavelength = lambda;
    scaled.waist = waist_per_lambda * lambda;
    for (double tau : tau_range)
      m.satisfied.push_back(
          compton_pair_satisfiable(scaled, v_el, tau, spectral_width_multiplier) ? 1 : 0);
  }
  return m;
}

// Energy gained by exchanging a +-k_perp photon pair, 2 hbar v k. eV.
inline double predicted_sideband_spacing(double v_el, double k_perp,
                                         const PhysicalConstants& pc = constants) {
  return 2.0 * pc.hbar() * v_el * k_perp;
}

inline double pair_predicted_spacing(const BeamSpec& a, const BeamSpec& b,
                                     double v_el,
                                     const PhysicalConstants& pc = constants) {
  return predicted_sideband_spacing(
      v_el, convolution_closed_form(a, b).characteristic_k_perp(), pc);
}

enum class InteractionRegime { diffraction, intermediate, bragg };

struct RegimeReport {
  double rho = 0.0;
  double recoil_shift = 0.0;       // eV, delta_D = (2 hbar k)^2 / 2 m0
  double energy_uncertainty = 0.0; // eV, hbar v / (4 w0)
  double theta_bragg = 0.0;        // rad; recorded, no consumer yet
  InteractionRegime classification = InteractionRegime::diffraction;
};

inline RegimeReport regime_rho(double w0, double v_el, double lambda,
                               const PhysicalConstants& pc = constants) {
  RegimeReport r;
  double k_ph = 2.0 * pi / lambda;
  double two_hk = 2.0 * pc.hbar() * k_ph;
  r.recoil_shift = two_hk * two_hk / (2.0 * pc.m0());
  r.energy_uncertainty = pc.hbar() * v_el / (4.0 * w0);
  r.rho = r.recoil_shift / r.energy_uncertainty;
  r.theta_bragg = std::asin(std::min(1.0, pc.hbar() * k_ph / (pc.m0() * v_el)));
  r.classification = r.rho < 0.1   ? InteractionRegime::diffraction
                     : r.rho > 10.0 ? InteractionRegime::bragg
                                    : InteractionRegime::intermediate;
  return r;
}

// Time integral of |A| at the beam's peak-field point over a window
// centred on the arrival time. Units V fs^2 / nm.
inline double exposure_window(const BeamSpec& beam, double window) {
  if (!(window > 0.0)) return 0.0;
  double x_peak = beam.mode_n == 1 ? beam.waist / std::sqrt(2.0) : 0.0;
  std::vector<BeamSpec> one{beam};
  double period = 2.0 * pi / beam.omega();
  // |cos| kinks limit trapezoid accuracy to ~(omega dt)^2/8; period/4096
  // keeps the quadrature error below 1e-7 relative
  double dt = std::min(period / 4096.0, window / 1000.0);
  long n = std::lround(std::ceil(window / dt));
  dt = window / double(n);
  double t0 = beam.arrival_time - 0.5 * window;
  double sum = 0.0;
  for (long i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::abs(vector_potential_analytic(one, x_peak, 0.0, t0 + i * dt));
  }
  return sum * dt;
}

} // namespace kdsim

#endif
