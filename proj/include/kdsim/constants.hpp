#ifndef KDSIM_CONSTANTS_HPP
#define KDSIM_CONSTANTS_HPP

namespace kdsim {

// CODATA-2018 constants in SI, plus accessors for the internal scaled
// system used everywhere else in the library:
//
//   length  nm
//   time    fs
//   energy  eV
//   field   V/nm   (numerically equal to GV/m)
//   charge  units of e
//
// In these units hbar, m0 and c are all O(1), so grid arithmetic stays
// far away from double under/overflow. Scaled values are derived from
// the stored SI values, never transcribed.
struct PhysicalConstants {
  double hbar_si = 1.054571817e-34;  // J s
  double m0_si = 9.1093837015e-31;   // kg, electron mass
  double qe_si = 1.602176634e-19;    // C, elementary charge (exact)
  double c_si = 299792458.0;         // m/s (exact)
  double eps0_si = 8.8541878128e-12; // F/m

  constexpr double hbar() const { return hbar_si / qe_si * 1e15; } // eV fs
  constexpr double c() const { return c_si * 1e-6; }               // nm/fs
  constexpr double mc2() const { return m0_si * c_si * c_si / qe_si; } // eV
  constexpr double m0() const { return mc2() / (c() * c()); } // eV fs^2/nm^2
  constexpr double qe() const { return 1.0; }                 // e
  // e/(V nm); only used for the electromagnetic energy audit
  constexpr double eps0() const { return eps0_si / qe_si * 1e-9; }
  constexpr double mu0() const { return 1.0 / (eps0() * c() * c()); }
};

inline constexpr PhysicalConstants constants{};

inline constexpr double pi = 3.14159265358979323846;

} // namespace kdsim

#endif
