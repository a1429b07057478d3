#ifndef KDSIM_VOLKOV_HPP
#define KDSIM_VOLKOV_HPP

#include <cmath>
#include <cstdlib>
#include <vector>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

// Closed-form Kapitza-Dirac diffraction-order populations from the
// ponderomotive Volkov phase. Both the continuous-wave and the pulsed
// standing wave reduce to P_m = J_m^2(eta); only the Bessel argument
// differs.

namespace kdsim {

// J_0(x) .. J_n(x) by downward (Miller) recurrence with the
// J_0 + 2 sum J_{2k} = 1 normalization. Stable for the argument range
// the oracles touch (x up to ~1e3), unlike upward recurrence.
inline std::vector<double> bessel_j_array(int n, double x) {
  std::vector<double> out(std::size_t(n) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  double ax = std::abs(x);
  int start = std::max(n, int(std::ceil(ax))) + 20 +
              int(2.0 * std::sqrt(double(std::max(n, int(ax) + 1))));
  if (start % 2 != 0) ++start;

  double jkp1 = 0.0;  // J_{k+1}
  double jk = 1e-30;  // J_k at k = start, arbitrary seed
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    if (k <= n) out[std::size_t(k)] = jk;
    if (k % 2 == 0) norm += 2.0 * jk;
    double jkm1 = (2.0 * k / ax) * jk - jkp1;
    jkp1 = jk;
    jk = jkm1;
    if (std::abs(jk) > 1e250) { // rescale to dodge overflow
      jk *= 1e-250;
      jkp1 *= 1e-250;
      norm *= 1e-250;
      for (auto& v : out) v *= 1e-250;
    }
  }
  out[0] = jk;
  norm += jk; // + J_0
  for (auto& v : out) v /= norm;
  if (x < 0.0)
    for (int m = 1; m <= n; m += 2) out[std::size_t(m)] = -out[std::size_t(m)];
  return out;
}

enum class DistributionVariant { cw, pulsed };

// How the E0 argument of the CW formula is read. `power_normalized`
// takes E0 as omega * A0 with A0 the power normalization constant (the
// printed formula); `peak_field` takes the HG00 focal peak field and
// applies the w0 sqrt(pi/2) beam-length factor that restores
// dimensional consistency.
enum class AmplitudeConvention { power_normalized, peak_field };

struct DiffractionDistribution {
  int max_order = 0;             // M, orders run -M..M
  std::vector<double> probability; // index m + M
  double bessel_argument = 0.0;
  DistributionVariant variant = DistributionVariant::cw;

  double p(int m) const { return probability[std::size_t(m + max_order)]; }
  double total() const {
    double s = 0.0;
    for (double v : probability) s += v;
    return s;
  }
};

namespace detail {

inline DiffractionDistribution orders_from_eta(double eta, int max_order,
                                               DistributionVariant variant) {
  auto j = bessel_j_array(max_order, eta);
  DiffractionDistribution d;
  d.max_order = max_order;
  d.bessel_argument = eta;
  d.variant = variant;
  d.probability.assign(std::size_t(2 * max_order + 1), 0.0);
  for (int m = -max_order; m <= max_order; ++m)
    d.probability[std::size_t(m + max_order)] =
        j[std::size_t(std::abs(m))] * j[std::size_t(std::abs(m))];
  if (d.p(max_order) >= 1e-12)
    throw ConfigError("max_order", "truncation too small: J_M^2(eta) >= 1e-12");
  return d;
}

} // namespace detail

// Eta of the CW standing wave, e^2 E0^2 / (8 hbar m0 v omega^2), with E0
// per the chosen amplitude convention. Identical for HG00 and HG10
// standing waves.
inline double cw_bessel_argument(double e0, double w0, double lambda, double v_el,
                                 AmplitudeConvention conv = AmplitudeConvention::power_normalized,
                                 const PhysicalConstants& pc = constants) {
  double omega = 2.0 * pi * pc.c() / lambda;
  double e0pn2 = conv == AmplitudeConvention::power_normalized
                     ? e0 * e0
                     : e0 * e0 * w0 * std::sqrt(pi / 2.0);
  return pc.qe() * pc.qe() * e0pn2 /
         (8.0 * pc.hbar() * pc.m0() * v_el * omega * omega);
}

inline DiffractionDistribution cw_orders(double e0, double w0, double lambda,
                                         double v_el, int max_order,
                                         AmplitudeConvention conv =
                                             AmplitudeConvention::power_normalized,
                                         const PhysicalConstants& pc = constants) {
  return detail::orders_from_eta(cw_bessel_argument(e0, w0, lambda, v_el, conv, pc),
                                 max_order, DistributionVariant::cw);
}

// Eta of the pulsed standing wave, sqrt(pi/2) e^2 E0^2 dtau / (hbar m0
// omega^2). E0 here is the plane-wave field amplitude; the electron
// velocity drops out of the envelope integral.
inline double pulsed_bessel_argument(double e0, double lambda, double pulse_sigma,
                                     const PhysicalConstants& pc = constants) {
  double omega = 2.0 * pi * pc.c() / lambda;
  return std::sqrt(pi / 2.0) * pc.qe() * pc.qe() * e0 * e0 * pulse_sigma /
         (pc.hbar() * pc.m0() * omega * omega);
}

inline DiffractionDistribution pulsed_orders(double e0, double lambda,
                                             double pulse_sigma, int max_order,
                                             const PhysicalConstants& pc = constants) {
  return detail::orders_from_eta(pulsed_bessel_argument(e0, lambda, pulse_sigma, pc),
                                 max_order, DistributionVariant::pulsed);
}

// Number of populated orders: the contiguous symmetric band out to the
// largest |m| with P_m >= threshold * max(P), i.e. 2 m_max + 1. The
// band convention (rather than counting individual bins) keeps the
// count odd and monotone in the interaction strength even when a
// Bessel zero happens to sweep through an interior order.
inline int populated_order_count(const DiffractionDistribution& d, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("threshold", "must be in (0, 1)");
  double pmax = 0.0;
  for (double v : d.probability) pmax = std::max(pmax, v);
  int m_max = 0;
  for (int m = 0; m <= d.max_order; ++m)
    if (d.p(m) >= threshold * pmax) m_max = m;
  return 2 * m_max + 1;
}

} // namespace kdsim

#endif
