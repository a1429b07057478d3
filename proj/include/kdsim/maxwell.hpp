#ifndef KDSIM_MAXWELL_HPP
#define KDSIM_MAXWELL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "kdsim/beams.hpp"
#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/model.hpp"

// 2D Yee FDTD for out-of-plane polarization (Ez, Bx, By) with
// split-field PML, soft line sources carrying the pulsed
// Hermite-Gaussian profiles, and vector-potential reconstruction by
// trapezoidal accumulation of -Ez. Beams propagate along +-y and are
// polarized along z, so the single physical component Az carries the
// whole beam; this is the polarization for which the ponderomotive
// coupling is the entire minimal-coupling interaction in 2D.
//
// Node (i, j) sits at (x0 + i dx, y0 + j dy); staggered positions are
//   Ez, Az : (i, j)        Bx : (i, j + 1/2)        By : (i + 1/2, j)

namespace kdsim {

struct FieldState {
  GridSpec grid;
  double t = 0.0;
  long step = 0;
  std::vector<double> ezx, ezy; // split Ez, V/nm
  std::vector<double> bx, by;   // V fs/nm^2
  std::vector<double> az;       // accumulated A, V fs/nm
  std::vector<double> az_prev;  // previous level, for time interpolation
  double t_prev = 0.0;

  explicit FieldState(const GridSpec& g)
      : grid(g), ezx(g.size(), 0.0), ezy(g.size(), 0.0), bx(g.size(), 0.0),
        by(g.size(), 0.0), az(g.size(), 0.0), az_prev(g.size(), 0.0) {}

  std::size_t idx(int i, int j) const { return std::size_t(j) * grid.nx + i; }
  double ez(int i, int j) const { return ezx[idx(i, j)] + ezy[idx(i, j)]; }
};

enum class BoundaryMode { pml, periodic };

struct YeeOptions {
  GridSpec grid;
  double courant = 0.5;
  BoundaryMode boundary = BoundaryMode::pml;
  int pml_cells = 10;
  double pml_grading = 4.0;
  double pml_reflection = 1e-6;
  std::vector<BeamSpec> sources;
  bool energy_audit = false;
  PhysicalConstants physical = constants;
};

class YeeStepper {
public:
  explicit YeeStepper(YeeOptions opt) : o_(std::move(opt)) {
    if (!(o_.courant > 0.0 && o_.courant <= 1.0 / std::sqrt(2.0)))
      throw ConfigError("courant", "2D Yee scheme requires courant <= 1/sqrt(2)");
    dt_ = o_.courant * o_.grid.dx / o_.physical.c();
    build_pml_profiles();
    build_sources();
  }

  double dt() const { return dt_; }

  // Staggered discrete EM energy of the last step,
  // eps0/2 sum Ez_n^2 + 1/(2 mu0) sum B_{n-1/2} B_{n+1/2}; exactly
  // conserved by the lossless periodic scheme up to roundoff.
  double last_energy() const { return last_energy_; }

  void step(FieldState& s) {
    const int nx = o_.grid.nx, ny = o_.grid.ny;
    const double dx = o_.grid.dx, dy = o_.grid.dy;
    const double c2 = o_.physical.c() * o_.physical.c();
    const bool periodic = o_.boundary == BoundaryMode::periodic;

    s.az_prev = s.az;
    s.t_prev = s.t;
    ez_old_ = s.ezx;
    for (std::size_t n = 0; n < ez_old_.size(); ++n) ez_old_[n] += s.ezy[n];

    double e_sq = 0.0, b_cross = 0.0;
    if (o_.energy_audit)
      for (double v : ez_old_) e_sq += v * v;

    // B update: dBx/dt = -dEz/dy (damped by sigma_y),
    //           dBy/dt = +dEz/dx (damped by sigma_x)
    for (int j = 0; j < (periodic ? ny : ny - 1); ++j) {
      for (int i = 0; i < nx; ++i) {
        std::size_t n = s.idx(i, j);
        int jp = periodic ? (j + 1) % ny : j + 1;
        double dez_dy = (s.ezx[s.idx(i, jp)] + s.ezy[s.idx(i, jp)] -
                         s.ezx[n] - s.ezy[n]) / dy;
        double old_b = s.bx[n];
        s.bx[n] = by_decay_[std::size_t(j)] * s.bx[n] -
                  by_gain_[std::size_t(j)] * dez_dy;
        if (o_.energy_audit) b_cross += old_b * s.bx[n];
      }
    }
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < (periodic ? nx : nx - 1); ++i) {
        std::size_t n = s.idx(i, j);
        int ip = periodic ? (i + 1) % nx : i + 1;
        double dez_dx = (s.ezx[s.idx(ip, j)] + s.ezy[s.idx(ip, j)] -
                         s.ezx[n] - s.ezy[n]) / dx;
        double old_b = s.by[n];
        s.by[n] = bx_decay_[std::size_t(i)] * s.by[n] +
                  bx_gain_[std::size_t(i)] * dez_dx;
        if (o_.energy_audit) b_cross += old_b * s.by[n];
      }
    }
    if (o_.energy_audit) {
      const auto& pc = o_.physical;
      last_energy_ = (0.5 * pc.eps0() * e_sq + 0.5 / pc.mu0() * b_cross) * dx * dy;
    }

    // E update: dEzx/dt = c^2 dBy/dx (sigma_x), dEzy/dt = -c^2 dBx/dy
    for (int j = periodic ? 0 : 1; j < ny; ++j) {
      for (int i = periodic ? 0 : 1; i < nx; ++i) {
        std::size_t n = s.idx(i, j);
        int im = periodic ? (i - 1 + nx) % nx : i - 1;
        int jm = periodic ? (j - 1 + ny) % ny : j - 1;
        double dby_dx = (s.by[n] - s.by[s.idx(im, j)]) / dx;
        double dbx_dy = (s.bx[n] - s.bx[s.idx(i, jm)]) / dy;
        s.ezx[n] = ez_col_decay_[std::size_t(i)] * s.ezx[n] +
                   ez_col_gain_[std::size_t(i)] * c2 * dby_dx;
        s.ezy[n] = ez_row_decay_[std::size_t(j)] * s.ezy[n] -
                   ez_row_gain_[std::size_t(j)] * c2 * dbx_dy;
      }
    }

    double t_new = s.t + dt_;
    inject_sources(s, t_new);

    // trapezoidal A accumulation, A = -int E dt
    for (std::size_t n = 0; n < s.az.size(); ++n)
      s.az[n] -= 0.5 * dt_ * (ez_old_[n] + s.ezx[n] + s.ezy[n]);

    s.t = t_new;
    ++s.step;
    if (s.step % 64 == 0) check_finite(s);
  }

private:
  struct SourceLine {
    int j_row;
    double omega;
    double sigma;
    double t_line; // envelope peak time at the injection row
    std::vector<cplx> profile; // at Ez positions along the row
  };

  void build_pml_profiles() {
    const int nx = o_.grid.nx, ny = o_.grid.ny;
    auto rate = [&](double depth_cells, double thickness_cells) {
      if (depth_cells <= 0.0) return 0.0;
      double d_nm = thickness_cells * o_.grid.dx;
      double smax = -(o_.pml_grading + 1.0) * o_.physical.c() *
                    std::log(o_.pml_reflection) / (2.0 * d_nm);
      return smax * std::pow(depth_cells / thickness_cells, o_.pml_grading);
    };
    auto fill = [&](int n, double offset, std::vector<double>& decay,
                    std::vector<double>& gain) {
      decay.assign(std::size_t(n), 1.0);
      gain.assign(std::size_t(n), dt_);
      if (o_.boundary == BoundaryMode::periodic) return;
      double L = double(o_.pml_cells);
      for (int i = 0; i < n; ++i) {
        double pos = double(i) + offset;
        double depth = std::max(L - pos, pos - (double(n - 1) - L));
        double sg = rate(depth, L);
        double f = 0.5 * sg * dt_;
        decay[std::size_t(i)] = (1.0 - f) / (1.0 + f);
        gain[std::size_t(i)] = dt_ / (1.0 + f);
      }
    };
    // By and Ezx share the sigma_x profile; Bx and Ezy share sigma_y.
    // All gains carry the dt factor of the semi-implicit loss update.
    fill(nx, 0.5, bx_decay_, bx_gain_);         // By at i + 1/2
    fill(ny, 0.5, by_decay_, by_gain_);         // Bx at j + 1/2
    fill(nx, 0.0, ez_col_decay_, ez_col_gain_); // Ezx, sigma_x(i)
    fill(ny, 0.0, ez_row_decay_, ez_row_gain_); // Ezy, sigma_y(j)
  }

  void build_sources() {
    const auto& g = o_.grid;
    for (const auto& b : o_.sources) {
      if (!b.enabled) continue;
      SourceLine line;
      line.j_row = b.direction == Direction::plus_y ? o_.pml_cells + 3
                                                    : g.ny - 4 - o_.pml_cells;
      double y_line = g.y(line.j_row);
      double ys = direction_sign(b.direction) * y_line;
      line.omega = b.omega();
      line.sigma = b.pulse_sigma;
      line.t_line = b.arrival_time + ys / o_.physical.c();
      line.profile.resize(std::size_t(g.nx), cplx(0.0, 0.0));
      for (int i = 0; i < g.nx; ++i)
        line.profile[std::size_t(i)] = hg_envelope(b, g.x(i), ys);
      sources_.push_back(std::move(line));
    }
  }

  // Soft additive source. A value a added to one Ez row per step
  // radiates plane waves of amplitude a / (2 courant) both ways; the
  // backward wave leaves through the PML behind the line. The injected
  // waveform is the analytic E = -dA/dt at the row, envelope-derivative
  // term included.
  void inject_sources(FieldState& s, double t) {
    for (const auto& src : sources_) {
      double rel = t - src.t_line;
      double g = std::exp(-rel * rel / (4.0 * src.sigma * src.sigma));
      if (g < 1e-14) continue;
      cplx rot = std::polar(1.0, -src.omega * t);
      cplx deriv(rel / (2.0 * src.sigma * src.sigma), src.omega);
      double scale = 2.0 * o_.courant * g;
      for (int i = 0; i < o_.grid.nx; ++i) {
        std::size_t n = s.idx(i, src.j_row);
        s.ezx[n] += scale * (src.profile[std::size_t(i)] * deriv * rot).real();
      }
    }
  }

  void check_finite(const FieldState& s) const {
    for (const double* arr : {s.ezx.data(), s.ezy.data(), s.bx.data(), s.by.data()}) {
      for (std::size_t n = 0; n < s.ezx.size(); ++n)
        if (!std::isfinite(arr[n]))
          throw NumericError("non-finite field value in FDTD update", s.step);
    }
  }

  YeeOptions o_;
  double dt_ = 0.0;
  double last_energy_ = 0.0;
  std::vector<SourceLine> sources_;
  std::vector<double> bx_decay_, bx_gain_, by_decay_, by_gain_;
  std::vector<double> ez_col_decay_, ez_col_gain_, ez_row_decay_, ez_row_gain_;
  std::vector<double> ez_old_;
};

// Bilinear interpolation of one staggered array onto an absolute point.
namespace detail {
inline double bilinear(const std::vector<double>& a, const GridSpec& g,
                       double stagger_x, double stagger_y, double x, double y) {
  double u = (x - g.x0) / g.dx - stagger_x;
  double v = (y - g.y0) / g.dy - stagger_y;
  int i0 = int(std::floor(u));
  int j0 = int(std::floor(v));
  i0 = std::max(0, std::min(g.nx - 2, i0));
  j0 = std::max(0, std::min(g.ny - 2, j0));
  double fx = u - i0, fy = v - j0;
  auto at = [&](int i, int j) { return a[std::size_t(j) * g.nx + i]; };
  return (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i0 + 1, j0) +
         (1 - fx) * fy * at(i0, j0 + 1) + fx * fy * at(i0 + 1, j0 + 1);
}
} // namespace detail

struct SampledPotential {
  std::vector<double> az; // on the target grid, V fs/nm
};

// A on the target grid at t_query, bilinear in space and linear in time
// between the last two Maxwell levels. t_query must lie in [t_prev, t].
inline SampledPotential sample_vector_potential(const FieldState& s,
                                                const GridSpec& target,
                                                double t_query) {
  if (!s.grid.contains(target))
    throw ConfigError("grid_schrodinger", "target grid outside Maxwell domain");
  double span = s.t - s.t_prev;
  double w = span > 0.0 ? (t_query - s.t_prev) / span : 1.0;
  w = std::max(0.0, std::min(1.0, w));
  SampledPotential out;
  out.az.resize(target.size());
  for (int j = 0; j < target.ny; ++j) {
    double y = target.y(j);
    for (int i = 0; i < target.nx; ++i) {
      double x = target.x(i);
      std::size_t n = std::size_t(j) * target.nx + i;
      double a_new = detail::bilinear(s.az, s.grid, 0.0, 0.0, x, y);
      double a_old = detail::bilinear(s.az_prev, s.grid, 0.0, 0.0, x, y);
      out.az[n] = (1.0 - w) * a_old + w * a_new;
    }
  }
  return out;
}

// Discrete gradient components of the accumulated A at the B positions,
// for the gauge sanity check B = curl(A z-hat):
//   Bx = dAz/dy at (i, j+1/2), By = -dAz/dx at (i+1/2, j).
inline double curl_a_bx(const FieldState& s, int i, int j) {
  return (s.az[s.idx(i, j + 1)] - s.az[s.idx(i, j)]) / s.grid.dy;
}
inline double curl_a_by(const FieldState& s, int i, int j) {
  return -(s.az[s.idx(i + 1, j)] - s.az[s.idx(i, j)]) / s.grid.dx;
}

} // namespace kdsim

#endif
