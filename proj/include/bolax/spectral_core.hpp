#pragma once

// Grids, Fourier transforms and Hardy-space projections.
//
// Transform convention used everywhere in the library:
//
//   f^(xi) = int exp(-i x xi) f(x) dx,      f(x) = (1/2pi) int exp(i x xi) f^(xi) dxi
//
// so that the Cauchy projections are the frequency masks C+- f^ = chi_{R+-} f^ and
// the Hilbert transform is the multiplier -i sgn(xi).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/fft.hpp"

namespace bolax {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Uniform periodic sampling of [x_min, x_max); x_max itself is not a node.
struct PhysicalGrid {
  std::size_t n_points = 4096;
  double x_min = -200.0;
  double x_max = 200.0;

  static PhysicalGrid make(std::size_t n, double x_min, double x_max) {
    PhysicalGrid g{n, x_min, x_max};
    g.validate();
    return g;
  }

  void validate() const {
    if (!is_power_of_two(n_points))
      throw ConfigurationError("PhysicalGrid: n_points must be a power of two, got " +
                               std::to_string(n_points));
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min))
      throw ConfigurationError("PhysicalGrid: need finite x_min < x_max");
  }

  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double length() const { return x_max - x_min; }
  double x(std::size_t j) const { return x_min + spacing() * static_cast<double>(j); }

  std::vector<double> points() const {
    std::vector<double> xs(n_points);
    for (std::size_t j = 0; j < n_points; ++j) xs[j] = x(j);
    return xs;
  }

  /// Angular frequency of FFT bin k; bins k >= n/2 are negative (Nyquist included).
  double frequency(std::size_t k) const {
    const auto n = static_cast<long long>(n_points);
    long long kk = static_cast<long long>(k);
    if (kk >= n / 2) kk -= n;
    return frequency_spacing() * static_cast<double>(kk);
  }
  double frequency_spacing() const { return kTwoPi / length(); }
  double nyquist() const { return kPi / spacing(); }

  bool operator==(const PhysicalGrid&) const = default;
};

/// Midpoint nodes xi_j = (j + 1/2) dxi on (0, xi_max) for half-line (Hardy space) functions.
struct FrequencyGrid {
  std::size_t n_modes = 2048;
  double xi_max = 32.0;

  static FrequencyGrid make(std::size_t n, double xi_max) {
    FrequencyGrid g{n, xi_max};
    g.validate();
    return g;
  }

  void validate() const {
    if (n_modes == 0) throw ConfigurationError("FrequencyGrid: n_modes must be positive");
    if (!(std::isfinite(xi_max) && xi_max > 0.0))
      throw ConfigurationError("FrequencyGrid: xi_max must be finite and positive");
  }

  double spacing() const { return xi_max / static_cast<double>(n_modes); }
  double node(std::size_t j) const { return (static_cast<double>(j) + 0.5) * spacing(); }

  std::vector<double> nodes() const {
    std::vector<double> xs(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) xs[j] = node(j);
    return xs;
  }

  /// Half the spacing and twice the cutoff.
  FrequencyGrid refined() const { return FrequencyGrid{4 * n_modes, 2.0 * xi_max}; }

  bool operator==(const FrequencyGrid&) const = default;
};

namespace detail {

inline void require_finite(std::span<const cplx> v, const char* what) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InputError(std::string(what) + ": non-finite sample");
}

}  // namespace detail

/// Samples of a function on a PhysicalGrid.
struct ComplexField {
  PhysicalGrid grid;
  std::vector<cplx> values;

  ComplexField() = default;
  ComplexField(PhysicalGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    grid.validate();
    if (values.size() != grid.n_points)
      throw ConfigurationError("ComplexField: sample count does not match grid");
    detail::require_finite(values, "ComplexField");
  }

  template <class F>
  static ComplexField sample(const PhysicalGrid& g, F&& f) {
    std::vector<cplx> v(g.n_points);
    for (std::size_t j = 0; j < g.n_points; ++j) v[j] = cplx(f(g.x(j)));
    return ComplexField(g, std::move(v));
  }

  std::size_t size() const { return values.size(); }
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z));
    return m;
  }
};

/// Far-field model f(x) ~ sum_p w_p (x + i b)^(-p), shared by both ends of the window.
/// Every term lies in H+, so the model has exact transforms and projections.
struct TailModel {
  std::vector<cplx> weights;  // weights[p-1] multiplies (x + i b)^(-p)
  double offset = 1.0;        // b > 0

  bool empty() const { return weights.empty(); }

  cplx value(double x) const {
    cplx acc{0.0, 0.0};
    const cplx inv = 1.0 / cplx(x, offset);
    cplx pw = inv;
    for (const auto& w : weights) {
      acc += w * pw;
      pw *= inv;
    }
    return acc;
  }

  /// Transform of the model; at xi = 0 the p = 1 term takes the mean of its one-sided limits.
  cplx fourier(double xi) const {
    if (weights.empty() || xi < 0.0) return {0.0, 0.0};
    if (xi == 0.0) return -kI * kPi * weights[0];
    cplx acc{0.0, 0.0};
    cplx pw{1.0, 0.0};  // (-i xi)^(p-1) / (p-1)!
    for (std::size_t p = 1; p <= weights.size(); ++p) {
      acc += weights[p - 1] * pw;
      pw *= -kI * xi / static_cast<double>(p);
    }
    return -kTwoPi * kI * std::exp(-offset * xi) * acc;
  }
};

/// How a window of samples is continued outside the grid.
enum class Extension {
  periodic,         ///< the samples are one period of a periodic function
  algebraic_tails,  ///< whole-line function whose tails follow a fitted 1/x power series
};

struct TransformOptions {
  Extension extension = Extension::periodic;
  int tail_order = 4;           ///< number of 1/x powers in the far-field fit
  double outer_fraction = 0.25; ///< part of each half-window used for the fit
  double pole_offset = 1.0;     ///< distance of the model's pole below the real axis
  int jump_order = 3;           ///< Taylor terms removed at xi = 0 when projecting
};

/// Least-squares fit of f ~ sum_{k=1..P} c_k x^(-k) on the outer part of the window,
/// converted to the (x + i)^(-p) basis. Returns an empty model for negligible tails.
inline TailModel fit_tail_model(const ComplexField& f, int order, double outer_fraction,
                                double pole_offset = 1.0) {
  const auto& g = f.grid;
  const double half = 0.5 * g.length();
  const double centre = 0.5 * (g.x_min + g.x_max);
  if (std::abs(centre) > 1e-12 * half)
    throw ConfigurationError("fit_tail_model: algebraic tails need a window centred at 0");
  const double inner = (1.0 - outer_fraction) * half;

  std::vector<std::size_t> idx;
  double outer_max = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    if (std::abs(g.x(j)) >= inner) {
      idx.push_back(j);
      outer_max = std::max(outer_max, std::abs(f.values[j]));
    }
  }
  const double fmax = f.max_abs();
  if (fmax == 0.0 || outer_max <= 1e-15 * fmax) return {};
  const auto P = static_cast<Eigen::Index>(order);
  if (idx.size() < static_cast<std::size_t>(2 * order))
    throw ConfigurationError("fit_tail_model: too few samples in the outer window");

  // Columns (half/x)^k keep the system well scaled.
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(idx.size()), P);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double t = half / g.x(idx[r]);
    double tp = t;
    for (Eigen::Index k = 0; k < P; ++k) {
      A(static_cast<Eigen::Index>(r), k) = tp;
      tp *= t;
    }
    b(static_cast<Eigen::Index>(r)) = f.values[idx[r]];
  }
  const Eigen::VectorXcd d = A.colPivHouseholderQr().solve(b);

  std::vector<cplx> c(static_cast<std::size_t>(order));
  double scale = half;
  for (int k = 0; k < order; ++k) {
    c[static_cast<std::size_t>(k)] = d(k) * scale;
    scale *= half;
  }
  // (x+ib)^(-p) = sum_{k>=p} C(k-1, k-p) (-ib)^(k-p) x^(-k): unit lower-triangular.
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
  };
  TailModel model;
  model.offset = pole_offset;
  model.weights.assign(static_cast<std::size_t>(order), cplx{});
  for (int k = 1; k <= order; ++k) {
    cplx acc = c[static_cast<std::size_t>(k - 1)];
    for (int p = 1; p < k; ++p)
      acc -= binom(k - 1, k - p) * std::pow(-kI * pole_offset, k - p) * model.weights[static_cast<std::size_t>(p - 1)];
    model.weights[static_cast<std::size_t>(k - 1)] = acc;
  }
  return model;
}

/// Transform samples at the FFT frequencies of the source grid (see PhysicalGrid::frequency).
struct FourierField {
  PhysicalGrid grid;
  std::vector<cplx> values;
  TailModel tail;  ///< non-empty when produced with Extension::algebraic_tails

  double frequency(std::size_t k) const { return grid.frequency(k); }
  std::size_t size() const { return values.size(); }
};

namespace detail {

// h * exp(-i x_min xi_k) * DFT(v)_k: the rectangle rule for the forward transform.
inline std::vector<cplx> window_transform(const PhysicalGrid& g, std::vector<cplx> v) {
  Fft fft(g.n_points);
  fft.forward(v);
  const double h = g.spacing();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= h * std::exp(-kI * g.x_min * g.frequency(k));
  return v;
}

// Inverse of window_transform.
inline std::vector<cplx> window_inverse(const PhysicalGrid& g, std::vector<cplx> v) {
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= std::exp(kI * g.x_min * g.frequency(k));
  Fft fft(g.n_points);
  fft.backward(v);
  const double scale = 1.0 / (static_cast<double>(g.n_points) * g.spacing());
  for (auto& z : v) z *= scale;
  return v;
}

inline std::vector<cplx> subtract_tail(const ComplexField& f, const TailModel& tail) {
  std::vector<cplx> r = f.values;
  if (!tail.empty())
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= tail.value(f.grid.x(j));
  return r;
}

// C+ of a rapidly decaying remainder r under whole-line semantics. The jump of chi_+ r^
// at xi = 0 and its first derivatives are removed analytically with exp(-a xi) xi^k terms
// so that the periodic inverse of what is left decays fast.
inline std::vector<cplx> whole_line_plus(const PhysicalGrid& g, const std::vector<cplx>& r,
                                         int jump_order) {
  const std::size_t n = g.n_points;
  const double h = g.spacing();
  const int K = std::max(jump_order, 0);

  // Taylor coefficients of r^ at 0: r^(k)(0)/k! = int (-i x)^k r dx / k!
  std::vector<cplx> taylor(static_cast<std::size_t>(K), cplx{});
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.x(j);
    cplx pw = r[j] * h;
    for (int k = 0; k < K; ++k) {
      taylor[static_cast<std::size_t>(k)] += pw;
      pw *= -kI * x / static_cast<double>(k + 1);
    }
  }
  const double a = 30.0 / g.nyquist();
  // exp(-a xi) q(xi) matches the Taylor polynomial: q = exp(a xi) * taylor, truncated.
  std::vector<cplx> q(static_cast<std::size_t>(K), cplx{});
  for (int k = 0; k < K; ++k) {
    double ak = 1.0;  // a^m / m!
    for (int m = 0; m <= k; ++m) {
      q[static_cast<std::size_t>(k)] += ak * taylor[static_cast<std::size_t>(k - m)];
      ak *= a / static_cast<double>(m + 1);
    }
  }

  std::vector<cplx> rhat = window_transform(g, r);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = g.frequency(k);
    if (xi < 0.0 || (k == n / 2)) {
      rhat[k] = 0.0;
      continue;
    }
    cplx poly{0.0, 0.0};
    double xp = 1.0;
    for (int m = 0; m < K; ++m) {
      poly += q[static_cast<std::size_t>(m)] * xp;
      xp *= xi;
    }
    rhat[k] -= std::exp(-a * xi) * poly;
  }
  std::vector<cplx> out = window_inverse(g, std::move(rhat));
  // (1/2pi) int_0^inf exp(i x xi) xi^m exp(-a xi) dxi = m! / (2pi (a - i x)^(m+1))
  for (std::size_t j = 0; j < n; ++j) {
    const cplx denom = 1.0 / cplx(a, -g.x(j));
    cplx pw = denom;
    double fact = 1.0;
    cplx acc{0.0, 0.0};
    for (int m = 0; m < K; ++m) {
      acc += q[static_cast<std::size_t>(m)] * fact * pw;
      pw *= denom;
      fact *= static_cast<double>(m + 1);
    }
    out[j] += acc / kTwoPi;
  }
  return out;
}

}  // namespace detail

/// Forward transform f^(xi) = int exp(-i x xi) f(x) dx at the FFT frequencies of f's grid.
inline FourierField fourier_forward(const ComplexField& f, const TransformOptions& opt = {}) {
  f.grid.validate();
  detail::require_finite(f.values, "fourier_forward");
  FourierField out;
  out.grid = f.grid;
  if (opt.extension == Extension::algebraic_tails)
    out.tail = fit_tail_model(f, opt.tail_order, opt.outer_fraction, opt.pole_offset);
  out.values = detail::window_transform(f.grid, detail::subtract_tail(f, out.tail));
  if (!out.tail.empty())
    for (std::size_t k = 0; k < out.values.size(); ++k)
      out.values[k] += out.tail.fourier(out.grid.frequency(k));
  return out;
}

/// Inverse of fourier_forward (exact round trip up to rounding).
inline ComplexField fourier_inverse(const FourierField& fh) {
  fh.grid.validate();
  std::vector<cplx> v = fh.values;
  detail::require_finite(v, "fourier_inverse");
  if (!fh.tail.empty())
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= fh.tail.fourier(fh.grid.frequency(k));
  v = detail::window_inverse(fh.grid, std::move(v));
  if (!fh.tail.empty())
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += fh.tail.value(fh.grid.x(j));
  return ComplexField(fh.grid, std::move(v));
}

/// Rectangle-rule transform at arbitrary frequencies; samples outside the window are zero.
inline std::vector<cplx> fourier_at(std::span<const double> x, std::span<const cplx> f, double h,
                                    std::span<const double> xi) {
  std::vector<cplx> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < x.size(); ++j) acc += f[j] * std::exp(-kI * x[j] * xi[k]);
    out[k] = acc * h;
  }
  return out;
}

/// Rectangle-rule transform at xi = m * dxi, m = 0..count-1, using phasor recurrences.
inline std::vector<cplx> fourier_multiples(std::span<const double> x, std::span<const cplx> f,
                                           double h, double dxi, std::size_t count) {
  std::vector<cplx> out(count, cplx{});
  constexpr std::size_t kResync = 64;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (f[j] == cplx{}) continue;
    const cplx step = std::exp(-kI * x[j] * dxi);
    cplx ph{1.0, 0.0};
    for (std::size_t m = 0; m < count; ++m) {
      if (m % kResync == 0) ph = std::exp(-kI * (x[j] * dxi * static_cast<double>(m)));
      out[m] += f[j] * ph;
      ph *= step;
    }
  }
  for (auto& z : out) z *= h;
  return out;
}

enum class Sign { plus, minus };

/// Cauchy projection C+ or C-. The xi = 0 bin belongs to C+, the Nyquist bin to C-,
/// so C+ + C- is the identity by construction.
inline ComplexField cauchy_project(const ComplexField& f, Sign sign, const TransformOptions& opt = {}) {
  f.grid.validate();
  detail::require_finite(f.values, "cauchy_project");
  std::vector<cplx> plus;
  if (opt.extension == Extension::periodic) {
    FourierField fh = fourier_forward(f);
    for (std::size_t k = 0; k < fh.values.size(); ++k)
      if (k >= fh.values.size() / 2) fh.values[k] = 0.0;
    plus = detail::window_inverse(f.grid, std::move(fh.values));
  } else {
    const TailModel tail = fit_tail_model(f, opt.tail_order, opt.outer_fraction, opt.pole_offset);
    const std::vector<cplx> r = detail::subtract_tail(f, tail);
    plus = detail::whole_line_plus(f.grid, r, opt.jump_order);
    if (!tail.empty())
      for (std::size_t j = 0; j < plus.size(); ++j) plus[j] += tail.value(f.grid.x(j));
  }
  if (sign == Sign::minus)
    for (std::size_t j = 0; j < plus.size(); ++j) plus[j] = f.values[j] - plus[j];
  return ComplexField(f.grid, std::move(plus));
}

/// Hilbert transform, multiplier -i sgn(xi). In periodic mode the zero and Nyquist bins
/// are annihilated, which keeps real input real.
inline ComplexField hilbert_transform(const ComplexField& f, const TransformOptions& opt = {}) {
  f.grid.validate();
  detail::require_finite(f.values, "hilbert_transform");
  if (opt.extension == Extension::periodic) {
    FourierField fh = fourier_forward(f);
    const std::size_t n = fh.values.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == 0 || k == n / 2) {
        fh.values[k] = 0.0;
      } else {
        fh.values[k] *= (k < n / 2) ? -kI : kI;
      }
    }
    return ComplexField(f.grid, detail::window_inverse(f.grid, std::move(fh.values)));
  }
  // H = -i (C+ - C-) = -i (2 C+ - I)
  const ComplexField plus = cauchy_project(f, Sign::plus, opt);
  std::vector<cplx> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = -kI * (2.0 * plus.values[j] - f.values[j]);
  return ComplexField(f.grid, std::move(v));
}

namespace detail {

inline ComplexField pointwise_product(const ComplexField& a, const ComplexField& b) {
  std::vector<cplx> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.values[j] * b.values[j];
  return ComplexField(a.grid, std::move(v));
}

inline double max_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

/// Max-norm of C(fg) + (Cf)(Cg) - C(f Cg) - C(g Cf) for C = C+ or C-.
inline double projection_identity_residual(const ComplexField& f, const ComplexField& g, Sign sign,
                                           const TransformOptions& opt = {}) {
  if (!(f.grid == g.grid)) throw ConfigurationError("projection_identity_residual: grid mismatch");
  using detail::pointwise_product;
  const ComplexField cf = cauchy_project(f, sign, opt);
  const ComplexField cg = cauchy_project(g, sign, opt);
  const ComplexField t1 = cauchy_project(pointwise_product(f, g), sign, opt);
  const ComplexField t3 = cauchy_project(pointwise_product(f, cg), sign, opt);
  const ComplexField t4 = cauchy_project(pointwise_product(g, cf), sign, opt);
  std::vector<cplx> res(f.size());
  for (std::size_t j = 0; j < res.size(); ++j)
    res[j] = t1.values[j] + cf.values[j] * cg.values[j] - t3.values[j] - t4.values[j];
  return detail::max_norm(res);
}

/// Max-norm of C((Cf)(Cg)) - (Cf)(Cg).
inline double projection_product_residual(const ComplexField& f, const ComplexField& g, Sign sign,
                                          const TransformOptions& opt = {}) {
  if (!(f.grid == g.grid)) throw ConfigurationError("projection_product_residual: grid mismatch");
  const ComplexField prod =
      detail::pointwise_product(cauchy_project(f, sign, opt), cauchy_project(g, sign, opt));
  const ComplexField cp = cauchy_project(prod, sign, opt);
  std::vector<cplx> res(f.size());
  for (std::size_t j = 0; j < res.size(); ++j) res[j] = cp.values[j] - prod.values[j];
  return detail::max_norm(res);
}

/// int |f|^2 dx by the rectangle rule.
inline double l2_norm_squared(const ComplexField& f) {
  double s = 0.0;
  for (const auto& z : f.values) s += std::norm(z);
  return s * f.grid.spacing();
}

/// (1/2pi) int |f^|^2 dxi over the FFT frequencies.
inline double l2_norm_squared(const FourierField& fh) {
  double s = 0.0;
  for (const auto& z : fh.values) s += std::norm(z);
  return s * fh.grid.frequency_spacing() / kTwoPi;
}

}  // namespace bolax
