#ifndef KDSIM_TDSE_HPP
#define KDSIM_TDSE_HPP

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "kdsim/beams.hpp"
#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/fft.hpp"
#include "kdsim/maxwell.hpp"
#include "kdsim/model.hpp"

// Spectral propagation of the electron wavepacket under the
// minimal-coupling Hamiltonian with the second-order-differencing time
// scheme.
//
// The stored wavefunction is the envelope with the plane-wave carrier
// exp(i k0 x) factored out (k0 = m0 v_el / hbar). The carrier
// wavelength at keV energies is picometres and can never live on a
// nm-scale grid; in the shifted representation the kinetic multiplier
// becomes hbar^2 ((k0+kx)^2 - k0^2 + ky^2)/2m0 and the grid only has to
// resolve the populated band around k0. The carrier's rest energy
// phase is dropped with it; all observables are carrier-relative.

namespace kdsim {

struct WavefunctionState {
  GridSpec grid;
  std::vector<cplx> psi; // envelope, row-major, x fastest
  double carrier_k = 0.0; // rad/nm along x
  double t = 0.0;
  long step = 0;
  std::vector<std::pair<double, double>> norm_history;
  double absorbed_fraction = 0.0;

  explicit WavefunctionState(const GridSpec& g) : grid(g), psi(g.size()) {}

  double norm() const {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return s * grid.dx * grid.dy;
  }
};

// Gaussian wavepacket, probability density standard deviations W_L
// along x and W_T along y, renormalized to exactly 1 on the grid.
inline WavefunctionState init_wavepacket(const ElectronSpec& e, const GridSpec& grid,
                                         const PhysicalConstants& pc = constants) {
  if (e.width_longitudinal < 4.0 * grid.dx || e.width_transverse < 4.0 * grid.dy)
    throw ConfigError("electron", "widths must be at least 4 grid spacings");
  WavefunctionState s(grid);
  s.carrier_k = electron_carrier_k(e, pc);
  double peak = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    double gy = (grid.y(j) - e.y0) / e.width_transverse;
    for (int i = 0; i < grid.nx; ++i) {
      double gx = (grid.x(i) - e.x0) / e.width_longitudinal;
      double v = std::exp(-0.25 * (gx * gx + gy * gy));
      s.psi[std::size_t(j) * grid.nx + i] = v;
      peak = std::max(peak, v);
    }
  }
  double edge = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    edge = std::max(edge, std::abs(s.psi[std::size_t(i)]));
    edge = std::max(edge, std::abs(s.psi[std::size_t(grid.ny - 1) * grid.nx + i]));
  }
  for (int j = 0; j < grid.ny; ++j) {
    edge = std::max(edge, std::abs(s.psi[std::size_t(j) * grid.nx]));
    edge = std::max(edge, std::abs(s.psi[std::size_t(j) * grid.nx + grid.nx - 1]));
  }
  if (edge > 1e-6 * peak)
    throw ConfigError("grid_schrodinger",
                      "wavepacket tails clipped by the grid (edge amplitude > 1e-6 peak)");
  double n = s.norm();
  double scale = 1.0 / std::sqrt(n);
  for (auto& v : s.psi) v *= scale;
  return s;
}

// Minimal-coupling Hamiltonian with spectral derivatives. The A-grad
// term is applied in the symmetrized form
//   -(i hbar e / 2 m0) [A . grad psi + div(A psi)] + (hbar e k0/m0) Ax psi,
// which is exactly Hermitian on the discrete grid for any real A and
// reduces to the plain Coulomb-gauge term in the continuum.
class Hamiltonian {
public:
  Hamiltonian(const GridSpec& grid, double carrier_k, bool drop_drift = false,
              PhysicalConstants pc = constants)
      : grid_(grid), k0_(carrier_k), pc_(pc), fft_(grid.ny, grid.nx),
        kx_(fft_wavenumbers(grid.nx, grid.dx)),
        ky_(fft_wavenumbers(grid.ny, grid.dy)) {
    kinetic_.resize(grid.size());
    double h2_2m = pc_.hbar() * pc_.hbar() / (2.0 * pc_.m0());
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        double kx = kx_[std::size_t(i)], ky = ky_[std::size_t(j)];
        double drift = drop_drift ? 0.0 : 2.0 * k0_ * kx;
        kinetic_[std::size_t(j) * grid.nx + i] = h2_2m * (drift + kx * kx + ky * ky);
      }
    hat_.resize(grid.size());
    dx_.resize(grid.size());
    dy_.resize(grid.size());
    tmp_.resize(grid.size());
    tmp2_.resize(grid.size());
    tmp3_.resize(grid.size());
  }

  double carrier_k() const { return k0_; }
  double max_kinetic() const {
    double m = 0.0;
    for (double v : kinetic_) m = std::max(m, std::abs(v));
    return m;
  }

  // out = H psi. Any of ax/ay/az may be null. az (the out-of-plane
  // component every beam provider supplies) enters only through |A|^2;
  // the in-plane components additionally drive the symmetrized
  // gradient coupling.
  void apply(const cplx* psi, const double* ax, const double* ay,
             const double* az, cplx* out) {
    const std::size_t n = grid_.size();
    fft_.forward(psi, hat_.data());

    for (std::size_t m = 0; m < n; ++m) tmp_[m] = kinetic_[m] * hat_[m];
    fft_.backward(tmp_.data(), out);

    if (!ax && !ay && !az) return;
    if (!ax && !ay) { // ponderomotive-only fast path
      const double pond0 = pc_.qe() * pc_.qe() / (2.0 * pc_.m0());
      for (std::size_t m = 0; m < n; ++m)
        out[m] += pond0 * az[m] * az[m] * psi[m];
      return;
    }
    const double hbar = pc_.hbar();
    const double e = pc_.qe();
    const double m0 = pc_.m0();
    const cplx half_grad = cplx(0.0, -hbar * e / (2.0 * m0));
    const double k0_term = hbar * e * k0_ / m0;
    const double pond = e * e / (2.0 * m0);

    // A . grad psi
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        std::size_t m = std::size_t(j) * grid_.nx + i;
        tmp_[m] = cplx(0.0, kx_[std::size_t(i)]) * hat_[m];
      }
    fft_.backward(tmp_.data(), dx_.data());
    if (ay) {
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) {
          std::size_t m = std::size_t(j) * grid_.nx + i;
          tmp_[m] = cplx(0.0, ky_[std::size_t(j)]) * hat_[m];
        }
      fft_.backward(tmp_.data(), dy_.data());
    }

    // div(A psi), assembled in k space
    for (std::size_t m = 0; m < n; ++m) tmp_[m] = (ax ? ax[m] : 0.0) * psi[m];
    fft_.forward(tmp_.data(), tmp2_.data());
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        std::size_t m = std::size_t(j) * grid_.nx + i;
        tmp2_[m] *= cplx(0.0, kx_[std::size_t(i)]);
      }
    if (ay) {
      for (std::size_t m = 0; m < n; ++m) tmp3_[m] = ay[m] * psi[m];
      fft_.forward(tmp3_.data(), tmp_.data());
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) {
          std::size_t m = std::size_t(j) * grid_.nx + i;
          tmp2_[m] += cplx(0.0, ky_[std::size_t(j)]) * tmp_[m];
        }
    }
    fft_.backward(tmp2_.data(), tmp_.data()); // tmp = div(A psi)

    for (std::size_t m = 0; m < n; ++m) {
      double axm = ax ? ax[m] : 0.0;
      double aym = ay ? ay[m] : 0.0;
      double azm = az ? az[m] : 0.0;
      cplx a_grad = axm * dx_[m] + (ay ? aym * dy_[m] : cplx(0.0));
      double a2 = axm * axm + aym * aym + azm * azm;
      out[m] += half_grad * (a_grad + tmp_[m]) +
                (k0_term * axm + pond * a2) * psi[m];
    }
  }

  // SOD-consistent companion level psi(-dt): the kinetic part is put
  // exactly on the scheme's eigenvectors in k space (phase asin(T
  // dt/hbar) rather than the exact propagator's T dt/hbar, which would
  // seed a spurious second-root admixture), and the local potential at
  // t=0 contributes its first-order phase. A free packet initialized
  // this way keeps |psi~(k)| constant to roundoff.
  std::vector<cplx> bootstrap_prev(const std::vector<cplx>& psi0, const double* ax,
                                   const double* ay, const double* az, double dt) {
    const std::size_t n = grid_.size();
    std::vector<cplx> prev(n);
    fft_.forward(psi0.data(), hat_.data());
    const double hbar = pc_.hbar();
    for (std::size_t m = 0; m < n; ++m) {
      double lam = std::clamp(kinetic_[m] * dt / hbar, -1.0, 1.0);
      hat_[m] *= std::polar(1.0, std::asin(lam));
    }
    fft_.backward(hat_.data(), prev.data());
    if (ax || ay || az) {
      const double pond = pc_.qe() * pc_.qe() / (2.0 * pc_.m0());
      const double k0_term = hbar * pc_.qe() * k0_ / pc_.m0();
      for (std::size_t m = 0; m < n; ++m) {
        double axm = ax ? ax[m] : 0.0;
        double aym = ay ? ay[m] : 0.0;
        double azm = az ? az[m] : 0.0;
        double v = k0_term * axm + pond * (axm * axm + aym * aym + azm * azm);
        prev[m] *= std::polar(1.0, v * dt / hbar);
      }
    }
    return prev;
  }

private:
  GridSpec grid_;
  double k0_;
  PhysicalConstants pc_;
  Fft2D fft_;
  std::vector<double> kx_, ky_;
  std::vector<double> kinetic_;
  std::vector<cplx> hat_, dx_, dy_, tmp_, tmp2_, tmp3_;
};

// One second-order-differencing step,
// psi(t+dt) = psi(t-dt) - (2 i dt / hbar) H psi(t).
inline void step_sod(const std::vector<cplx>& psi_prev, const std::vector<cplx>& h_psi,
                     double dt, std::vector<cplx>& psi_next,
                     const PhysicalConstants& pc = constants) {
  const cplx f(0.0, -2.0 * dt / pc.hbar());
  for (std::size_t m = 0; m < psi_prev.size(); ++m)
    psi_next[m] = psi_prev[m] + f * h_psi[m];
}

// Provides A on the wavefunction grid as a function of time.
class FieldSampler {
public:
  virtual ~FieldSampler() = default;
  // Returns pointers valid until the next call; any component may be
  // null. Beam providers fill az, the out-of-plane beam component.
  virtual void sample(double t, const double** ax, const double** ay,
                      const double** az) = 0;
};

// Closed-form provider. The time-independent complex profile of each
// beam is cached on the grid once; per query the profile is rotated by
// exp(-i omega t) and scaled by the pulse envelope.
class AnalyticSampler : public FieldSampler {
public:
  AnalyticSampler(std::vector<BeamSpec> beams, const GridSpec& grid,
                  bool comoving = false, double v_el = 0.0)
      : beams_(std::move(beams)), grid_(grid), comoving_(comoving), v_el_(v_el) {
    az_.assign(grid.size(), 0.0);
    if (!comoving_)
      for (const auto& b : beams_) {
        if (!b.enabled) continue;
        profiles_.emplace_back();
        auto& p = profiles_.back();
        p.resize(grid.size());
        for (int j = 0; j < grid.ny; ++j) {
          double ys = direction_sign(b.direction) * grid.y(j);
          for (int i = 0; i < grid.nx; ++i)
            p[std::size_t(j) * grid.nx + i] = hg_envelope(b, grid.x(i), ys);
        }
        profile_beams_.push_back(b);
      }
  }

  void sample(double t, const double** ax, const double** ay,
              const double** az) override {
    std::fill(az_.begin(), az_.end(), 0.0);
    if (!comoving_) {
      for (std::size_t bi = 0; bi < profiles_.size(); ++bi) {
        const auto& b = profile_beams_[bi];
        double env = pulse_envelope(b, t);
        if (env < 1e-16) continue;
        cplx rot = std::polar(env, -b.omega() * t);
        const auto& p = profiles_[bi];
        for (std::size_t m = 0; m < az_.size(); ++m)
          az_[m] += (p[m] * rot).real();
      }
    } else {
      double shift = v_el_ * t;
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) {
          std::size_t m = std::size_t(j) * grid_.nx + i;
          az_[m] = vector_potential_analytic(beams_, grid_.x(i) + shift, grid_.y(j), t);
        }
    }
    *ax = nullptr;
    *ay = nullptr;
    *az = az_.data();
  }

private:
  std::vector<BeamSpec> beams_;
  GridSpec grid_;
  bool comoving_;
  double v_el_;
  std::vector<std::vector<cplx>> profiles_;
  std::vector<BeamSpec> profile_beams_;
  std::vector<double> az_;
};

// FDTD-backed provider: advances the Maxwell state to bracket each
// query time, then samples the accumulated vector potential onto the
// wavefunction grid.
class FdtdSampler : public FieldSampler {
public:
  FdtdSampler(const SimulationConfig& cfg)
      : target_(cfg.grid_schrodinger), state_(cfg.grid_maxwell),
        comoving_(cfg.comoving),
        v_el_(electron_velocity(cfg.electron, cfg.physical)) {
    YeeOptions opt;
    opt.grid = cfg.grid_maxwell;
    opt.courant = cfg.courant;
    opt.boundary = BoundaryMode::pml;
    opt.pml_cells = cfg.absorber.pml_cells;
    opt.pml_grading = cfg.absorber.pml_grading;
    opt.pml_reflection = cfg.absorber.pml_reflection;
    opt.sources = cfg.beams;
    opt.physical = cfg.physical;
    stepper_ = std::make_unique<YeeStepper>(std::move(opt));
  }

  void sample(double t, const double** ax, const double** ay,
              const double** az) override {
    *ax = nullptr;
    *ay = nullptr;
    if (t <= 0.0 && state_.step == 0) {
      zeros_.assign(target_.size(), 0.0);
      *az = zeros_.data();
      return;
    }
    while (state_.t < t) stepper_->step(state_);
    GridSpec window = target_;
    if (comoving_) window.x0 += v_el_ * t;
    sampled_ = sample_vector_potential(state_, window, t);
    *az = sampled_.az.data();
  }

  const FieldState& field_state() const { return state_; }

private:
  GridSpec target_;
  FieldState state_;
  std::unique_ptr<YeeStepper> stepper_;
  bool comoving_;
  double v_el_;
  SampledPotential sampled_;
  std::vector<double> zeros_;
};

// cos^p absorbing mask over the outer `fraction` of the grid per side.
// The ramp profile defines the absorption per reference fs; each
// application raises it to dt so the damping rate is independent of the
// step size (otherwise halving dt would change the physics and break
// the scheme's convergence order).
struct SoftMask {
  std::vector<double> mx, my;
  bool identity = true;

  SoftMask() = default;
  SoftMask(const GridSpec& g, double fraction, int exponent, double dt) {
    auto ramp = [&](int n, double d) {
      std::vector<double> m(std::size_t(n), 1.0);
      double width = fraction * (n - 1) * d;
      for (int i = 0; i < n; ++i) {
        double from_lo = i * d;
        double from_hi = (n - 1 - i) * d;
        double dist = std::min(from_lo, from_hi);
        if (dist < width) {
          double xi = (width - dist) / width;
          double per_fs = std::pow(std::cos(0.5 * pi * xi), exponent);
          m[std::size_t(i)] = std::pow(per_fs, dt);
        }
      }
      return m;
    };
    mx = ramp(g.nx, g.dx);
    my = ramp(g.ny, g.dy);
    identity = false;
  }

  // Applies the mask; returns the norm removed (grid measure included).
  double apply(WavefunctionState& s) const {
    if (identity) return 0.0;
    double removed = 0.0;
    for (int j = 0; j < s.grid.ny; ++j) {
      double wy = my[std::size_t(j)];
      for (int i = 0; i < s.grid.nx; ++i) {
        std::size_t m = std::size_t(j) * s.grid.nx + i;
        double w = mx[std::size_t(i)] * wy;
        double before = std::norm(s.psi[m]);
        s.psi[m] *= w;
        removed += before * (1.0 - w * w);
      }
    }
    return removed * s.grid.dx * s.grid.dy;
  }
};

struct RunObservers {
  std::vector<double> times; // sorted ascending
  std::function<void(const WavefunctionState&)> on_time;
  std::function<void(const WavefunctionState&)> on_finish;
  double wall_budget_seconds = 0.0; // 0 = unlimited
};

struct RunResult {
  WavefunctionState state;
  double dt = 0.0;
  long steps = 0;
  bool completed = true;
  double final_norm = 0.0;
};

// Companion level psi(-dt) for the SOD start, from the scheme's own
// eigenvector phases plus the t=0 local-potential phase (fields are
// essentially off at t=0 in every bundled scenario).
inline std::vector<cplx> sod_bootstrap_backward(Hamiltonian& h, FieldSampler& f,
                                                const std::vector<cplx>& psi0,
                                                double dt,
                                                const PhysicalConstants& = constants) {
  const double *ax = nullptr, *ay = nullptr, *az = nullptr;
  f.sample(0.0, &ax, &ay, &az);
  return h.bootstrap_prev(psi0, ax, ay, az, dt);
}

// Co-simulation driver: advances the field provider and the SOD scheme
// to total_time, invoking observers on their schedule.
inline RunResult run_interaction(const SimulationConfig& cfg_in,
                                 RunObservers obs = {}) {
  SimulationConfig cfg = validated(cfg_in);
  const auto& pc = cfg.physical;
  double dt = resolve_dt_tdse(cfg);
  long nsteps = long(std::ceil(cfg.total_time / dt));

  WavefunctionState state = init_wavepacket(cfg.electron, cfg.grid_schrodinger, pc);
  double v_el = electron_velocity(cfg.electron, pc);

  std::unique_ptr<FieldSampler> sampler;
  if (cfg.field_provider == FieldProvider::analytic)
    sampler = std::make_unique<AnalyticSampler>(cfg.beams, cfg.grid_schrodinger,
                                                cfg.comoving, v_el);
  else
    sampler = std::make_unique<FdtdSampler>(cfg);

  Hamiltonian h(cfg.grid_schrodinger, state.carrier_k, cfg.comoving, pc);
  SoftMask mask(cfg.grid_schrodinger, cfg.absorber.mask_fraction,
                cfg.absorber.mask_exponent, dt);

  std::vector<cplx> psi_prev =
      sod_bootstrap_backward(h, *sampler, state.psi, dt, pc);
  std::vector<cplx> h_psi(state.psi.size()), psi_next(state.psi.size());

  state.norm_history.emplace_back(0.0, state.norm());
  double last_total = 1.0;
  std::size_t obs_i = 0;
  auto t_start = std::chrono::steady_clock::now();

  RunResult res{std::move(state)};
  res.dt = dt;
  WavefunctionState& s = res.state;

  for (long n = 0; n < nsteps; ++n) {
    double t_n = n * dt;
    const double *ax = nullptr, *ay = nullptr, *az = nullptr;
    sampler->sample(t_n, &ax, &ay, &az);
    h.apply(s.psi.data(), ax, ay, az, h_psi.data());
    step_sod(psi_prev, h_psi, dt, psi_next, pc);
    std::swap(psi_prev, s.psi);
    std::swap(s.psi, psi_next);
    s.t = (n + 1) * dt;
    s.step = n + 1;

    s.absorbed_fraction += mask.apply(s);
    double nn = s.norm();
    double total = nn + s.absorbed_fraction;
    if (std::abs(total - last_total) > 1e-4)
      throw NumericError(
          "SOD norm drift exceeded 1e-4 in one step; reduce dt_tdse", s.step);
    last_total = total;
    s.norm_history.emplace_back(s.t, nn);

    while (obs_i < obs.times.size() && s.t >= obs.times[obs_i] - 0.5 * dt) {
      if (obs.on_time) obs.on_time(s);
      ++obs_i;
    }
    if (obs.wall_budget_seconds > 0.0 && (n % 32 == 31)) {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start).count();
      if (elapsed > obs.wall_budget_seconds) {
        res.completed = false;
        break;
      }
    }
  }
  res.steps = s.step;
  res.final_norm = s.norm();
  if (obs.on_finish) obs.on_finish(s);
  return res;
}

} // namespace kdsim

#endif
