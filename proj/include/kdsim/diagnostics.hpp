#ifndef KDSIM_DIAGNOSTICS_HPP
#define KDSIM_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/fft.hpp"
#include "kdsim/tdse.hpp"

// Momentum- and energy-space analysis of wavefunction snapshots.
// Longitudinal always means the electron axis x, transverse the optical
// axis y; sidebands live on the longitudinal axis, diffraction orders
// on the transverse one.

namespace kdsim {

enum class AxisKind { k_transverse, k_longitudinal, energy_gain };
enum class Normalization { unit_integral, unit_max };

struct Spectrum {
  std::vector<double> axis;    // rad/nm or eV, uniform ascending
  std::vector<double> density; // per axis unit
  AxisKind kind = AxisKind::k_transverse;
  Normalization normalization = Normalization::unit_integral;

  double bin() const { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }
  double integral() const {
    double s = 0.0;
    for (double v : density) s += v;
    return s * bin();
  }
  void normalize_max() {
    double m = 0.0;
    for (double v : density) m = std::max(m, v);
    if (m > 0.0)
      for (double& v : density) v /= m;
    normalization = Normalization::unit_max;
  }
};

struct MomentumMap {
  std::vector<double> kx; // rad/nm, ascending, carrier included
  std::vector<double> ky;
  std::vector<double> density; // row-major [ky][kx], per (rad/nm)^2
};

namespace detail {

// |psi~|^2 on fftshifted axes, normalized so the double integral equals
// the state norm; kx carries the electron carrier offset.
inline MomentumMap momentum_density(const WavefunctionState& s) {
  const auto& g = s.grid;
  Fft2D fft(g.ny, g.nx);
  std::vector<cplx> hat(g.size());
  fft.forward(s.psi.data(), hat.data());

  auto kx_raw = fft_wavenumbers(g.nx, g.dx);
  auto ky_raw = fft_wavenumbers(g.ny, g.dy);
  // fftshift permutations
  std::vector<int> ix(g.nx), iy(g.ny);
  auto shift_order = [](int n, std::vector<int>& order) {
    int half = (n + 1) / 2;
    int m = 0;
    for (int i = half; i < n; ++i) order[std::size_t(m++)] = i;
    for (int i = 0; i < half; ++i) order[std::size_t(m++)] = i;
  };
  shift_order(g.nx, ix);
  shift_order(g.ny, iy);

  MomentumMap map;
  map.kx.resize(std::size_t(g.nx));
  map.ky.resize(std::size_t(g.ny));
  for (int i = 0; i < g.nx; ++i)
    map.kx[std::size_t(i)] = kx_raw[std::size_t(ix[std::size_t(i)])] + s.carrier_k;
  for (int j = 0; j < g.ny; ++j)
    map.ky[std::size_t(j)] = ky_raw[std::size_t(iy[std::size_t(j)])];

  double scale = g.dx * g.dy / (2.0 * pi);
  scale *= scale; // |psi~(k)|^2 with the continuum transform convention
  map.density.resize(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      map.density[std::size_t(j) * g.nx + i] =
          std::norm(hat[std::size_t(iy[std::size_t(j)]) * g.nx +
                        ix[std::size_t(i)]]) * scale;
  return map;
}

} // namespace detail

enum class SpectrumAxis { longitudinal, transverse };

inline Spectrum momentum_spectrum(const WavefunctionState& s, SpectrumAxis axis) {
  MomentumMap map = detail::momentum_density(s);
  Spectrum out;
  out.normalization = Normalization::unit_integral;
  int nx = int(map.kx.size()), ny = int(map.ky.size());
  if (axis == SpectrumAxis::longitudinal) {
    out.kind = AxisKind::k_longitudinal;
    out.axis = map.kx;
    out.density.assign(map.kx.size(), 0.0);
    double dky = map.ky.size() > 1 ? map.ky[1] - map.ky[0] : 1.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out.density[std::size_t(i)] += map.density[std::size_t(j) * nx + i] * dky;
  } else {
    out.kind = AxisKind::k_transverse;
    out.axis = map.ky;
    out.density.assign(map.ky.size(), 0.0);
    double dkx = map.kx.size() > 1 ? map.kx[1] - map.kx[0] : 1.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out.density[std::size_t(j)] += map.density[std::size_t(j) * nx + i] * dkx;
  }
  return out;
}

inline MomentumMap momentum_map(const WavefunctionState& s,
                                double crop_threshold = 1e-12) {
  MomentumMap map = detail::momentum_density(s);
  int nx = int(map.kx.size()), ny = int(map.ky.size());
  double peak = 0.0;
  for (double v : map.density) peak = std::max(peak, v);
  int i_lo = nx, i_hi = -1, j_lo = ny, j_hi = -1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (map.density[std::size_t(j) * nx + i] > crop_threshold * peak) {
        i_lo = std::min(i_lo, i);
        i_hi = std::max(i_hi, i);
        j_lo = std::min(j_lo, j);
        j_hi = std::max(j_hi, j);
      }
  if (i_hi < 0) return map; // empty map, keep as is
  int pad = 2;
  i_lo = std::max(0, i_lo - pad);
  j_lo = std::max(0, j_lo - pad);
  i_hi = std::min(nx - 1, i_hi + pad);
  j_hi = std::min(ny - 1, j_hi + pad);
  MomentumMap cropped;
  cropped.kx.assign(map.kx.begin() + i_lo, map.kx.begin() + i_hi + 1);
  cropped.ky.assign(map.ky.begin() + j_lo, map.ky.begin() + j_hi + 1);
  cropped.density.reserve(cropped.kx.size() * cropped.ky.size());
  for (int j = j_lo; j <= j_hi; ++j)
    for (int i = i_lo; i <= i_hi; ++i)
      cropped.density.push_back(map.density[std::size_t(j) * nx + i]);
  return cropped;
}

// Longitudinal momentum mapped to kinetic-energy gain
// E(k) - E(k_ref) with the exact quadratic relation. Probability mass
// is redistributed bin-by-bin onto a uniform gain axis (mass-exact, so
// the Jacobian handling cannot leak probability). Density at k <= 0 is
// clipped; its weight is negligible for every physical state here.
inline Spectrum energy_gain_spectrum(const WavefunctionState& s,
                                     const ElectronSpec& e,
                                     const PhysicalConstants& pc = constants) {
  Spectrum longi = momentum_spectrum(s, SpectrumAxis::longitudinal);
  double k_ref = electron_carrier_k(e, pc);
  double h2_2m = pc.hbar() * pc.hbar() / (2.0 * pc.m0());
  auto gain = [&](double k) { return h2_2m * (k * k - k_ref * k_ref); };

  double dk = longi.bin();
  // populated range drives the output axis
  double peak = 0.0;
  for (double v : longi.density) peak = std::max(peak, v);
  double g_lo = 0.0, g_hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < longi.axis.size(); ++i) {
    if (longi.density[i] <= 1e-14 * peak) continue;
    double k = longi.axis[i];
    if (k <= 0.0) continue;
    double lo = gain(k - 0.5 * dk), hi = gain(k + 0.5 * dk);
    if (!any) { g_lo = lo; g_hi = hi; any = true; }
    g_lo = std::min(g_lo, lo);
    g_hi = std::max(g_hi, hi);
  }
  if (!any) throw NumericError("no weight at positive longitudinal momentum", s.step);

  double de = h2_2m * 2.0 * k_ref * dk; // local spacing at the carrier
  int nbins = std::max(8, int(std::ceil((g_hi - g_lo) / de)) + 1);
  Spectrum out;
  out.kind = AxisKind::energy_gain;
  out.normalization = Normalization::unit_integral;
  out.axis.resize(std::size_t(nbins));
  out.density.assign(std::size_t(nbins), 0.0);
  for (int b = 0; b < nbins; ++b) out.axis[std::size_t(b)] = g_lo + (b + 0.5) * de;

  for (std::size_t i = 0; i < longi.axis.size(); ++i) {
    double k = longi.axis[i];
    if (k <= 0.5 * dk) continue; // clip the k <= 0 region
    double mass = longi.density[i] * dk;
    if (mass == 0.0) continue;
    double lo = gain(k - 0.5 * dk), hi = gain(k + 0.5 * dk);
    // distribute mass over the gain bins this k-bin maps onto
    double b_lo = (lo - g_lo) / de, b_hi = (hi - g_lo) / de;
    int b0 = std::max(0, int(std::floor(b_lo)));
    int b1 = std::min(nbins - 1, int(std::floor(b_hi)));
    double span = b_hi - b_lo;
    for (int b = b0; b <= b1; ++b) {
      double seg_lo = std::max(b_lo, double(b));
      double seg_hi = std::min(b_hi, double(b + 1));
      if (seg_hi <= seg_lo) continue;
      out.density[std::size_t(b)] += mass * (seg_hi - seg_lo) / span / de;
    }
  }
  return out;
}

struct SidebandOptions {
  double rel_threshold = 1e-3;
  double min_separation = 0.0; // axis units; 0 = auto
  double predicted_spacing = 0.0; // if set, auto separation = half of it
};

struct SidebandStats {
  std::vector<double> peak_positions; // ascending, axis units
  int count = 0;
  double mean_spacing = 0.0;
  double median_spacing = 0.0;
  double standard_error = 0.0; // sigma / sqrt(N) over the spacings
  bool low_confidence = false;
};

// Local maxima above rel_threshold * max, separated by at least
// min_separation (default: half the predicted spacing when given, else
// 3 bins); consecutive differences feed the spacing statistics.
inline SidebandStats detect_sidebands(const Spectrum& s, SidebandOptions opt = {}) {
  double bin = s.bin();
  double min_sep = opt.min_separation > 0.0 ? opt.min_separation
                   : opt.predicted_spacing > 0.0 ? 0.5 * opt.predicted_spacing
                                                 : 3.0 * bin;
  int w = std::max(1, int(std::round(min_sep / bin)));
  double peak = 0.0;
  for (double v : s.density) peak = std::max(peak, v);
  double floor_v = opt.rel_threshold * peak;

  std::vector<std::size_t> candidates;
  int n = int(s.density.size());
  for (int i = 1; i + 1 < n; ++i) {
    double v = s.density[std::size_t(i)];
    if (v < floor_v) continue;
    bool is_max = true;
    for (int d = std::max(0, i - w); d <= std::min(n - 1, i + w); ++d) {
      if (d == i) continue;
      double u = s.density[std::size_t(d)];
      if (u > v || (u == v && d < i)) { is_max = false; break; }
    }
    if (is_max) candidates.push_back(std::size_t(i));
  }

  SidebandStats st;
  for (auto i : candidates) st.peak_positions.push_back(s.axis[i]);
  std::sort(st.peak_positions.begin(), st.peak_positions.end());
  st.count = int(st.peak_positions.size());
  st.low_confidence = st.count < 3;
  if (st.count >= 2) {
    std::vector<double> spacing;
    for (int i = 1; i < st.count; ++i)
      spacing.push_back(st.peak_positions[std::size_t(i)] -
                        st.peak_positions[std::size_t(i - 1)]);
    double sum = 0.0;
    for (double v : spacing) sum += v;
    st.mean_spacing = sum / double(spacing.size());
    std::vector<double> sorted = spacing;
    std::sort(sorted.begin(), sorted.end());
    std::size_t m = sorted.size();
    st.median_spacing = m % 2 ? sorted[m / 2]
                              : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    double var = 0.0;
    for (double v : spacing) var += (v - st.mean_spacing) * (v - st.mean_spacing);
    var /= double(spacing.size());
    st.standard_error = std::sqrt(var) / std::sqrt(double(spacing.size()));
  }
  return st;
}

// Probability integrated in bins of width multiple*k_ph centred on each
// order m * multiple * k_ph of a transverse spectrum.
struct OrderPopulations {
  int max_order = 0;
  std::vector<double> weight; // index m + max_order

  double at(int m) const { return weight[std::size_t(m + max_order)]; }
  double total() const {
    double s = 0.0;
    for (double v : weight) s += v;
    return s;
  }
};

inline OrderPopulations order_populations(const Spectrum& s, double k_ph,
                                          int multiple) {
  double bin = s.bin();
  if (!(bin < k_ph))
    throw ConfigError("spectrum", "resolution too coarse for order binning");
  double unit = multiple * k_ph;
  double k_lo = s.axis.front(), k_hi = s.axis.back();
  int max_order = int(std::ceil(std::max(std::abs(k_lo), std::abs(k_hi)) / unit));
  OrderPopulations p;
  p.max_order = max_order;
  p.weight.assign(std::size_t(2 * max_order + 1), 0.0);
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    int m = int(std::lround(s.axis[i] / unit));
    m = std::max(-max_order, std::min(max_order, m));
    p.weight[std::size_t(m + max_order)] += s.density[i] * bin;
  }
  return p;
}

// Relative L1 distance of max-normalized spectra on a shared axis:
// sum |a-b| / sum (a+b)/2 in [0, 2]. Small for "almost no difference".
inline double l1_distance_max_normalized(Spectrum a, Spectrum b) {
  if (a.axis.size() != b.axis.size())
    throw ConfigError("spectrum", "axes differ; cannot compare");
  a.normalize_max();
  b.normalize_max();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    num += std::abs(a.density[i] - b.density[i]);
    den += 0.5 * (a.density[i] + b.density[i]);
  }
  return den > 0.0 ? num / den : 0.0;
}

} // namespace kdsim

#endif
