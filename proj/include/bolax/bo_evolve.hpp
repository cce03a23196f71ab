#pragma once

// Benjamin-Ono flow u_t + 2 u u_x - H u_xx = 0 on a periodic window, in Fourier variables
//
//   u^_t = i xi |xi| u^ - i xi (u^2)^
//
// stepped with the integrating-factor (Lawson) fourth-order Runge-Kutta scheme.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/fft.hpp"
#include "bolax/lax_spectrum.hpp"
#include "bolax/potentials.hpp"
#include "bolax/spectral_core.hpp"

namespace bolax {

struct EvolutionConfig {
  double L_dom = 200.0;          ///< window [-L_dom, L_dom)
  std::size_t n_modes = 4096;
  double dt = 0.0025;
  double t_final = 5.0;
  std::size_t snapshot_stride = 400;  ///< steps between snapshots
  bool dealias = true;           ///< 2/3 rule on the quadratic term
  double edge_tolerance = 1e-8;  ///< |u0| at the window edges

  PhysicalGrid grid() const { return PhysicalGrid::make(n_modes, -L_dom, L_dom); }

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

  void validate() const {
    if (!(L_dom > 0.0) || !std::isfinite(L_dom)) throw ConfigurationError("evolve: L_dom must be > 0");
    if (!is_power_of_two(n_modes) || n_modes < 8) throw ConfigurationError("evolve: n_modes must be a power of two >= 8");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("evolve: dt must be > 0");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigurationError("evolve: t_final must be >= 0");
    const double r = t_final / dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ConfigurationError("evolve: t_final must be an integer multiple of dt");
    if (snapshot_stride == 0) throw ConfigurationError("evolve: snapshot_stride must be >= 1");
    if (steps() % snapshot_stride != 0)
      throw ConfigurationError("evolve: snapshot_stride must divide the number of steps");
  }

  /// Largest retained |xi|.
  double xi_cut() const {
    const double ny = kPi * static_cast<double>(n_modes) / (2.0 * L_dom);
    return dealias ? ny * 2.0 / 3.0 : ny;
  }
};

/// dt xi_cut 2 sup|u| must stay within the RK4 stability interval on the imaginary axis.
inline constexpr double kAdvectiveLimit = 2.8;

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  double max_imag = 0.0;  ///< max |Im u| before the real part is taken
  double mass = 0.0;      ///< int u
  double energy = 0.0;    ///< int u^2
  double sup = 0.0;
};

struct Trajectory {
  EvolutionConfig config;
  PhysicalGrid grid;
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;

  double mass_drift() const { return relative_drift([](const Snapshot& s) { return s.mass; }); }
  double energy_drift() const { return relative_drift([](const Snapshot& s) { return s.energy; }); }
  double max_imag() const {
    double m = 0.0;
    for (const auto& s : snapshots) m = std::max(m, s.max_imag);
    return m;
  }

 private:
  template <class F>
  double relative_drift(F f) const {
    if (snapshots.empty()) return 0.0;
    const double ref = f(snapshots.front());
    double d = 0.0;
    for (const auto& s : snapshots) d = std::max(d, std::abs(f(s) - ref));
    return (ref != 0.0) ? d / std::abs(ref) : d;
  }
};

/// One-step map of the Fourier system; reusable for forward and backward (dt < 0) stepping.
class BOStepper {
 public:
  BOStepper(const EvolutionConfig& c, double dt) : n_(c.n_modes), grid_(c.grid()), fft_(c.n_modes), dt_(dt) {
    xi_.resize(n_);
    half_.resize(n_);
    full_.resize(n_);
    mask_.resize(n_);
    const double cut = c.xi_cut();
    for (std::size_t k = 0; k < n_; ++k) {
      const double xi = (k == n_ / 2) ? 0.0 : grid_.frequency(k);
      xi_[k] = xi;
      mask_[k] = (k != n_ / 2) && (std::abs(xi) <= cut * (1.0 + 1e-12)) ? 1.0 : 0.0;
      half_[k] = std::exp(kI * xi * std::abs(xi) * (0.5 * dt));
      full_[k] = half_[k] * half_[k];
    }
  }

  /// Spectral coefficients (unnormalized DFT) of real samples, projected onto retained modes.
  std::vector<cplx> to_spectral(std::span<const double> u) const {
    std::vector<cplx> v(u.begin(), u.end());
    fft_.forward(v);
    for (std::size_t k = 0; k < n_; ++k) v[k] *= mask_[k];
    return v;
  }

  /// Physical samples; `max_imag` receives max |Im u|.
  std::vector<double> to_physical(std::span<const cplx> uh, double* max_imag = nullptr) const {
    std::vector<cplx> v(uh.begin(), uh.end());
    fft_.backward(v);
    std::vector<double> u(n_);
    double mi = 0.0;
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      u[j] = v[j].real() * s;
      mi = std::max(mi, std::abs(v[j].imag()) * s);
    }
    if (max_imag) *max_imag = mi;
    return u;
  }

  void step(std::vector<cplx>& uh) const {
    const std::size_t n = n_;
    std::vector<cplx> k1 = N(uh), tmp(n);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = half_[k] * (uh[k] + 0.5 * dt_ * k1[k]);
    std::vector<cplx> k2 = N(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = half_[k] * uh[k] + 0.5 * dt_ * k2[k];
    std::vector<cplx> k3 = N(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = full_[k] * uh[k] + dt_ * half_[k] * k3[k];
    std::vector<cplx> k4 = N(tmp);
    for (std::size_t k = 0; k < n; ++k)
      uh[k] = full_[k] * uh[k] + (dt_ / 6.0) * (full_[k] * k1[k] + 2.0 * half_[k] * (k2[k] + k3[k]) + k4[k]);
  }

  const PhysicalGrid& grid() const { return grid_; }

 private:
  // -i xi F((Re u)^2), masked
  std::vector<cplx> N(std::span<const cplx> uh) const {
    std::vector<cplx> v(uh.begin(), uh.end());
    fft_.backward(v);
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& z : v) {
      const double r = z.real() * s;
      z = r * r;
    }
    fft_.forward(v);
    for (std::size_t k = 0; k < n_; ++k) v[k] *= -kI * xi_[k] * mask_[k];
    return v;
  }

  std::size_t n_;
  PhysicalGrid grid_;
  Fft fft_;
  double dt_;
  std::vector<double> xi_, mask_;
  std::vector<cplx> half_, full_;
};

namespace detail {

inline Snapshot make_snapshot(double t, std::vector<double> u, double max_imag, double h) {
  Snapshot s;
  s.t = t;
  s.max_imag = max_imag;
  for (double v : u) {
    s.mass += h * v;
    s.energy += h * v * v;
    s.sup = std::max(s.sup, std::abs(v));
  }
  s.u = std::move(u);
  return s;
}

}  // namespace detail

/// Integrates from samples of u0 on config.grid().
inline Trajectory evolve(std::span<const double> u0, const EvolutionConfig& cfg) {
  cfg.validate();
  const PhysicalGrid g = cfg.grid();
  if (u0.size() != g.n_points) throw ConfigurationError("evolve: initial samples do not match the grid");
  Trajectory tr;
  tr.config = cfg;
  tr.grid = g;
  double sup0 = 0.0;
  for (double v : u0) {
    if (!std::isfinite(v)) throw InputError("evolve: non-finite initial sample");
    sup0 = std::max(sup0, std::abs(v));
  }
  const double edge = std::max(std::abs(u0.front()), std::abs(u0.back()));
  if (edge > cfg.edge_tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "initial data is %.3g at the window edges (tolerance %.3g); periodic images interact",
                  edge, cfg.edge_tolerance);
    tr.warnings.push_back(buf);
  }
  const double cfl = cfg.dt * cfg.xi_cut() * 2.0 * sup0;
  if (cfl > kAdvectiveLimit)
    throw ConfigurationError("evolve: CFL violation, dt xi_cut 2 sup|u0| = " + std::to_string(cfl) + " > " +
                             std::to_string(kAdvectiveLimit));

  const BOStepper stepper(cfg, cfg.dt);
  std::vector<cplx> uh = stepper.to_spectral(u0);
  double mi = 0.0;
  std::vector<double> u = stepper.to_physical(uh, &mi);
  tr.snapshots.push_back(detail::make_snapshot(0.0, std::move(u), mi, g.spacing()));
  const std::size_t steps = cfg.steps();
  for (std::size_t s = 1; s <= steps; ++s) {
    stepper.step(uh);
    if (s % cfg.snapshot_stride == 0) {
      u = stepper.to_physical(uh, &mi);
      Snapshot snap = detail::make_snapshot(cfg.dt * static_cast<double>(s), std::move(u), mi, g.spacing());
      if (!std::isfinite(snap.sup) || snap.sup > 10.0 * std::max(sup0, 1e-300))
        throw NumericError("evolve: instability, sup|u| grew past 10x its initial value at t = " +
                           std::to_string(snap.t));
      tr.snapshots.push_back(std::move(snap));
    }
  }
  return tr;
}

inline Trajectory evolve(const PotentialSpec& u0, const EvolutionConfig& cfg) {
  cfg.validate();
  const PhysicalGrid g = cfg.grid();
  return evolve(sample_real(u0, g.points()), cfg);
}

/// Max-norm distance between u0 and the result of evolving to t_final and back with -dt.
inline double time_reversal_error(std::span<const double> u0, const EvolutionConfig& cfg) {
  cfg.validate();
  const BOStepper fwd(cfg, cfg.dt), bwd(cfg, -cfg.dt);
  std::vector<cplx> uh = fwd.to_spectral(u0);
  const std::vector<double> start = fwd.to_physical(uh);
  const std::size_t steps = cfg.steps();
  for (std::size_t s = 0; s < steps; ++s) fwd.step(uh);
  for (std::size_t s = 0; s < steps; ++s) bwd.step(uh);
  const std::vector<double> end = fwd.to_physical(uh);
  double e = 0.0;
  for (std::size_t j = 0; j < end.size(); ++j) e = std::max(e, std::abs(end[j] - start[j]));
  return e;
}

/// Location of the global maximum, refined by a parabola through the three nearest samples.
inline double peak_position(std::span<const double> u, const PhysicalGrid& g) {
  const std::size_t n = u.size();
  const std::size_t j = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
  const double a = u[(j + n - 1) % n], b = u[j], c = u[(j + 1) % n];
  const double den = a - 2.0 * b + c;
  const double off = (den != 0.0) ? 0.5 * (a - c) / den : 0.0;
  return g.x(j) + off * g.spacing();
}

/// Mean speed of the peak between the first and last snapshots (periodic unwrapping by the
/// shortest displacement).
inline double peak_speed(const Trajectory& tr) {
  if (tr.snapshots.size() < 2) return 0.0;
  const auto& a = tr.snapshots.front();
  const auto& b = tr.snapshots.back();
  if (b.t == a.t) return 0.0;
  double d = peak_position(b.u, tr.grid) - peak_position(a.u, tr.grid);
  const double Lp = tr.grid.length();
  d -= Lp * std::round(d / Lp);
  return d / (b.t - a.t);
}

struct DriftReport {
  std::vector<double> times;
  std::vector<std::vector<double>> eigenvalues;  ///< per snapshot, ascending
  std::vector<double> drift;                     ///< per branch max |l(t) - l(0)| / |l(0)|
  std::vector<std::string> warnings;

  double max_drift() const {
    double m = 0.0;
    for (double d : drift) m = std::max(m, d);
    return m;
  }
};

/// Discrete spectrum of L_{u(t)} at every snapshot. Snapshot samples are read as the sinc
/// interpolant on the window, zero outside.
inline DriftReport isospectral_drift(const Trajectory& tr, const SpectrumOptions& opt = {}) {
  DriftReport rep;
  const std::vector<double> xs = tr.grid.points();
  for (const auto& s : tr.snapshots) {
    rep.times.push_back(s.t);
    if (std::all_of(s.u.begin(), s.u.end(), [](double v) { return v == 0.0; })) {
      rep.eigenvalues.emplace_back();
      continue;
    }
    const PotentialSpec p = PotentialSpec::from_samples(xs, s.u, Interpolation::band_limited);
    rep.eigenvalues.push_back(discrete_spectrum(p, opt).eigenvalues);
  }
  if (rep.eigenvalues.empty() || rep.eigenvalues.front().empty()) return rep;
  const auto& ref = rep.eigenvalues.front();
  rep.drift.assign(ref.size(), 0.0);
  for (std::size_t k = 1; k < rep.eigenvalues.size(); ++k) {
    const auto& cur = rep.eigenvalues[k];
    if (cur.size() != ref.size())
      rep.warnings.push_back("branch count changed from " + std::to_string(ref.size()) + " to " +
                             std::to_string(cur.size()) + " at t = " + std::to_string(rep.times[k]));
    for (std::size_t b = 0; b < std::min(cur.size(), ref.size()); ++b)
      rep.drift[b] = std::max(rep.drift[b], std::abs(cur[b] - ref[b]) / std::abs(ref[b]));
  }
  return rep;
}

}  // namespace bolax
