#pragma once

// Exponential integral, the half-line Green kernel and its quadrature rules, smooth cutoffs.

#include <cmath>
#include <complex>
#include <limits>
#include <cstdio>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/quadrature.hpp"
#include "bolax/spectral_core.hpp"
#include "bolax/toeplitz.hpp"

namespace bolax {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Principal-branch E1(z) = int_z^inf exp(-t)/t dt for |arg z| < pi.
/// Power series for |z| <= 4 and in the strip |Im z| <= 2, -40 <= Re z < 0; Lentz continued
/// fraction up to |z| = 1e8, asymptotic series beyond.
inline cplx exp_integral_e1(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("E1: non-finite argument");
  if (z == cplx{0.0, 0.0}) throw DomainError("E1: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0) throw DomainError("E1: argument on the branch cut");
  const double az = std::abs(z);
  if (az <= 4.0 || (z.real() < 0.0 && std::abs(z.imag()) <= 2.0 && az <= 40.0)) {
    // E1(z) = -gamma - log z - sum_{k>=1} (-z)^k / (k k!)
    cplx term = -z;  // (-z)^k / k!
    cplx sum = term;
    for (int k = 2; k < 1000; ++k) {
      term *= -z / static_cast<double>(k);
      const cplx add = term / static_cast<double>(k);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(z) - sum;
  }
  if (az > 1e8) {
    const cplx w = 1.0 / z;
    return std::exp(-z) * w * (1.0 - w + 2.0 * w * w);
  }
  // exp(-z) / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...)))
  constexpr double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 10000; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) return h * std::exp(-z);
  }
  throw NumericError("E1: continued fraction did not converge");
}

/// G_{-E}(x) = (1/2pi) int_0^inf exp(i x xi)/(xi + E) dxi = (1/2pi) exp(-iEx) E1(-iEx).
inline cplx green_eval(double E, double x) {
  if (!(E > 0.0)) throw DomainError("green_eval: E must be > 0");
  if (x == 0.0) throw DomainError("green_eval: kernel is singular at x = 0");
  const cplx z(0.0, -E * x);
  return std::exp(z) * exp_integral_e1(z) / kTwoPi;
}

/// int |G_{-E}|^2 dx = 1/(2 pi E) by Parseval.
inline double green_l2_norm_squared(double E) { return 1.0 / (kTwoPi * E); }

/// Frequency-truncated kernel (1/2pi) int_0^Wc exp(i t xi)/(xi + E) dxi. Sampling it with
/// spacing h = pi/Wc integrates the kernel exactly against the sinc interpolant.
inline cplx green_band_limited(double E, double Wc, double t) {
  if (t == 0.0) return std::log((E + Wc) / E) / kTwoPi;
  const cplx z1(0.0, -E * t), z2(0.0, -(E + Wc) * t);
  return std::exp(z1) * (exp_integral_e1(z1) - exp_integral_e1(z2)) / kTwoPi;
}

/// How the log-singular diagonal of a convolution with G is discretized.
enum class DiagonalRule {
  band_limited,   ///< sinc-interpolant rule: samples of the band-limited kernel
  log_corrected,  ///< exact kernel off the diagonal, analytic cell integral of its log model on it
};

inline const char* rule_name(DiagonalRule r) {
  return r == DiagonalRule::band_limited ? "band_limited" : "log_corrected";
}

inline DiagonalRule rule_from_name(const std::string& s) {
  if (s == "band_limited") return DiagonalRule::band_limited;
  if (s == "log_corrected") return DiagonalRule::log_corrected;
  throw ConfigurationError("unknown diagonal rule '" + s + "'");
}

/// Cell integral of (1/2pi)(-log(E|t|) - gamma) over [-h/2, h/2].
inline double log_corrected_diagonal(double E, double h) {
  return h / kTwoPi * (1.0 - kEulerGamma - std::log(E * h / 2.0));
}

/// Samples c_m = weight * G(m h), m = 0..n-1, the first column of the convolution matrix
/// (G * f)(x_i) ~ sum_j c_{i-j} f_j.
inline std::vector<cplx> green_column(double E, double h, std::size_t n, DiagonalRule rule) {
  if (!(E > 0.0)) throw DomainError("green_column: E must be > 0");
  std::vector<cplx> c(n);
  if (rule == DiagonalRule::band_limited) {
    const double Wc = kPi / h;
    for (std::size_t m = 0; m < n; ++m) c[m] = h * green_band_limited(E, Wc, h * static_cast<double>(m));
  } else {
    c[0] = log_corrected_diagonal(E, h);
    for (std::size_t m = 1; m < n; ++m) c[m] = h * green_eval(E, h * static_cast<double>(m));
  }
  return c;
}

/// Convolution f -> G_{-E} * f on a physical grid, as a Hermitian Toeplitz matrix.
struct GreenConvolution {
  double E = 1.0;
  PhysicalGrid grid;
  DiagonalRule rule = DiagonalRule::band_limited;
  HermitianToeplitz matrix;

  GreenConvolution(double E_, const PhysicalGrid& g, DiagonalRule r)
      : E(E_), grid(g), rule(r), matrix(green_column(E_, g.spacing(), g.n_points, r)) {}

  std::vector<cplx> apply(std::span<const cplx> f) const {
    std::vector<cplx> y(f.size());
    matrix.apply(f, y);
    return y;
  }
};

/// Smooth cutoff: 1 on [0, a], exp-bump transition on (a, b), 0 from b on.
struct Cutoff {
  double plateau = 1.0;
  double support = 2.0;

  static Cutoff standard() { return {1.0, 2.0}; }
  static Cutoff wide() { return {1.5, 3.0}; }

  double operator()(double xi) const {
    if (xi <= plateau) return 1.0;
    if (xi >= support) return 0.0;
    const double t = (xi - plateau) / (support - plateau);
    const double a = bump(1.0 - t), b = bump(t);
    return a / (a + b);
  }

  /// Identifier recorded with every cutoff-dependent quantity.
  std::string id() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bump[%.6g,%.6g]", plateau, support);
    return buf;
  }

  static double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
};

/// R(E) = int_0^inf chi(xi)/(xi + E) dxi.
inline double split_R(double E, const Cutoff& chi = Cutoff::standard()) {
  if (!(E > 0.0)) throw DomainError("split_R: E must be > 0");
  const double head = std::log1p(chi.plateau / E);
  const double bump = quad::finite([&](double xi) { return chi(xi) / (xi + E); }, chi.plateau, chi.support, 1e-14);
  return head + bump;
}

/// c0 = log a + int_a^b chi(xi)/xi dxi, the constant in the E = 0 regular kernel.
inline double cutoff_c0(const Cutoff& chi) {
  return std::log(chi.plateau) +
         quad::finite([&](double xi) { return chi(xi) / xi; }, chi.plateau, chi.support, 1e-14);
}

/// Regular part N_{-E}(t) = 2 pi G(t) - R(E), band-limited at Wc (requires Wc >= support).
inline cplx regular_kernel(double E, double Wc, double t, double R) {
  return kTwoPi * green_band_limited(E, Wc, t) - R;
}

/// E = 0 regular kernel int_0^Wc (exp(i t xi) - chi(xi))/xi dxi.
inline cplx regular_kernel_zero(double Wc, double t, double c0) {
  if (t == 0.0) return std::log(Wc) - c0;
  const double s = (t > 0.0) ? 1.0 : -1.0;
  return -kEulerGamma - std::log(std::abs(t)) + kI * (kPi / 2.0) * s - c0 -
         exp_integral_e1(cplx(0.0, -Wc * t));
}

}  // namespace bolax
