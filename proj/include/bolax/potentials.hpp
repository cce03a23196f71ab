#pragma once

// Real potentials u(x): parametric families, sampled data, exact transforms and norms.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/quadrature.hpp"
#include "bolax/spectral_core.hpp"

namespace bolax {

enum class Family { zero, soliton, multi_soliton, gaussian, sech2, from_file, from_samples };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::zero: return "zero";
    case Family::soliton: return "soliton";
    case Family::multi_soliton: return "multi_soliton";
    case Family::gaussian: return "gaussian";
    case Family::sech2: return "sech2";
    case Family::from_file: return "from_file";
    case Family::from_samples: return "from_samples";
  }
  return "unknown";
}

inline Family family_from_name(const std::string& s) {
  for (Family f : {Family::zero, Family::soliton, Family::multi_soliton, Family::gaussian,
                   Family::sech2, Family::from_file, Family::from_samples})
    if (s == family_name(f)) return f;
  throw ConfigurationError("unknown potential family '" + s + "'");
}

/// One term 2 nu / (1 + nu^2 (x - x0)^2).
struct SolitonTerm {
  double nu = 1.0;
  double x0 = 0.0;
};

enum class Interpolation {
  linear,        ///< piecewise linear, zero outside [x.front(), x.back()]
  band_limited,  ///< Whittaker sinc series on uniform nodes (transform supported in |xi| <= pi/h)
};

/// Strictly increasing nodes with values.
struct SampledData {
  std::vector<double> x;
  std::vector<double> u;
  Interpolation interp = Interpolation::linear;

  void validate() const {
    if (x.size() != u.size()) throw InputError("sampled potential: x and u lengths differ");
    if (x.size() < 2) throw InputError("sampled potential: need at least two samples");
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!std::isfinite(x[j]) || !std::isfinite(u[j]))
        throw InputError("sampled potential: non-finite value at row " + std::to_string(j));
      if (j > 0 && !(x[j] > x[j - 1]))
        throw InputError("sampled potential: x not strictly increasing at row " + std::to_string(j));
    }
    if (interp == Interpolation::band_limited) {
      const double h = spacing();
      for (std::size_t j = 1; j < x.size(); ++j)
        if (std::abs(x[j] - x[j - 1] - h) > 1e-9 * h)
          throw InputError("sampled potential: band-limited interpolation needs uniform nodes");
    }
  }

  double spacing() const { return (x.back() - x.front()) / static_cast<double>(x.size() - 1); }

  double operator()(double t) const {
    if (interp == Interpolation::band_limited) return sinc_series(t);
    if (t < x.front() || t > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) return u.back();
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double s = (t - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - s) * u[k - 1] + s * u[k];
  }

  // sum_j u_j sinc((t - x_j)/h) = sin(pi (t - x_0)/h)/pi * sum_j (-1)^j u_j h/(t - x_j)
  double sinc_series(double t) const {
    const double h = spacing();
    const double r = (t - x.front()) / h;
    const double k = std::round(r);
    if (std::abs(r - k) < 1e-12) {
      if (k < 0.0 || k > static_cast<double>(x.size() - 1)) return 0.0;
      return u[static_cast<std::size_t>(k)];
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double term = u[j] * h / (t - x[j]);
      acc += (j % 2 == 0) ? term : -term;
    }
    return std::sin(kPi * r) / kPi * acc;
  }
};

/// Reads a two-column CSV (x, u). Blank lines, '#' comments and one leading header are skipped.
inline SampledData read_potential_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open potential file '" + path + "'");
  SampledData d;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      if (!seen_data) {
        seen_data = true;  // header
        continue;
      }
      throw InputError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    std::string extra;
    if (row >> extra)
      throw InputError(path + ":" + std::to_string(lineno) + ": more than two columns");
    seen_data = true;
    d.x.push_back(a);
    d.u.push_back(b);
  }
  d.validate();
  return d;
}

/// A real potential times a real coupling constant.
struct PotentialSpec {
  Family family = Family::zero;
  double nu = 1.0;              ///< soliton
  double x0 = 0.0;              ///< soliton centre
  std::vector<SolitonTerm> terms;  ///< multi_soliton
  double amplitude = 1.0;       ///< gaussian, sech2
  double width = 1.0;           ///< gaussian, sech2
  std::string path;             ///< from_file
  std::shared_ptr<const SampledData> data;  ///< from_file, from_samples
  double coupling = 1.0;

  static PotentialSpec zero() { return {}; }

  static PotentialSpec soliton(double nu, double x0 = 0.0) {
    PotentialSpec s;
    s.family = Family::soliton;
    s.nu = nu;
    s.x0 = x0;
    s.validate();
    return s;
  }

  static PotentialSpec multi_soliton(std::vector<SolitonTerm> terms) {
    PotentialSpec s;
    s.family = Family::multi_soliton;
    s.terms = std::move(terms);
    s.validate();
    return s;
  }

  /// a exp(-x^2 / (2 w^2))
  static PotentialSpec gaussian(double a, double w) {
    PotentialSpec s;
    s.family = Family::gaussian;
    s.amplitude = a;
    s.width = w;
    s.validate();
    return s;
  }

  /// a sech^2(x / w)
  static PotentialSpec sech2(double a, double w) {
    PotentialSpec s;
    s.family = Family::sech2;
    s.amplitude = a;
    s.width = w;
    s.validate();
    return s;
  }

  static PotentialSpec from_file(const std::string& path) {
    PotentialSpec s;
    s.family = Family::from_file;
    s.path = path;
    s.data = std::make_shared<const SampledData>(read_potential_csv(path));
    return s;
  }

  static PotentialSpec from_samples(std::vector<double> x, std::vector<double> u,
                                    Interpolation interp = Interpolation::linear) {
    PotentialSpec s;
    s.family = Family::from_samples;
    auto d = std::make_shared<SampledData>();
    d->x = std::move(x);
    d->u = std::move(u);
    d->interp = interp;
    d->validate();
    s.data = std::move(d);
    return s;
  }

  void validate() const {
    if (!std::isfinite(coupling)) throw ConfigurationError("coupling must be finite");
    switch (family) {
      case Family::zero: break;
      case Family::soliton:
        if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigurationError("soliton: nu must be > 0");
        if (!std::isfinite(x0)) throw ConfigurationError("soliton: centre must be finite");
        break;
      case Family::multi_soliton:
        if (terms.empty()) throw ConfigurationError("multi_soliton: no terms");
        for (const auto& t : terms)
          if (!(t.nu > 0.0) || !std::isfinite(t.nu) || !std::isfinite(t.x0))
            throw ConfigurationError("multi_soliton: every nu must be > 0 and centres finite");
        break;
      case Family::gaussian:
      case Family::sech2:
        if (!(width > 0.0) || !std::isfinite(width))
          throw ConfigurationError(std::string(family_name(family)) + ": width must be > 0");
        if (!std::isfinite(amplitude))
          throw ConfigurationError(std::string(family_name(family)) + ": amplitude must be finite");
        break;
      case Family::from_file:
      case Family::from_samples:
        if (!data) throw InputError("sampled potential without data");
        data->validate();
        break;
    }
  }

  PotentialSpec with_coupling(double c) const {
    PotentialSpec s = *this;
    s.coupling = c;
    s.validate();
    return s;
  }

  /// The potential s u(s x).
  PotentialSpec scaled(double s) const {
    if (!(s > 0.0)) throw ConfigurationError("scaled: factor must be > 0");
    PotentialSpec r = *this;
    switch (family) {
      case Family::zero: break;
      case Family::soliton:
        r.nu = nu * s;
        r.x0 = x0 / s;
        break;
      case Family::multi_soliton:
        for (auto& t : r.terms) {
          t.nu *= s;
          t.x0 /= s;
        }
        break;
      case Family::gaussian:
      case Family::sech2:
        r.amplitude = amplitude * s;
        r.width = width / s;
        break;
      case Family::from_file:
      case Family::from_samples: {
        auto d = std::make_shared<SampledData>(*data);
        for (auto& v : d->x) v /= s;
        for (auto& v : d->u) v *= s;
        r.family = Family::from_samples;
        r.data = std::move(d);
        break;
      }
    }
    return r;
  }

  /// The potential u(x - a).
  PotentialSpec translated(double a) const {
    PotentialSpec r = *this;
    switch (family) {
      case Family::zero: break;
      case Family::soliton: r.x0 += a; break;
      case Family::multi_soliton:
        for (auto& t : r.terms) t.x0 += a;
        break;
      case Family::gaussian:
      case Family::sech2:
        throw CapabilityError(std::string("translated: ") + family_name(family) +
                              " family is centred at 0; use from_samples");
      case Family::from_file:
      case Family::from_samples: {
        auto d = std::make_shared<SampledData>(*data);
        for (auto& v : d->x) v += a;
        r.family = Family::from_samples;
        r.data = std::move(d);
        break;
      }
    }
    return r;
  }

  /// Coupling times the bare profile.
  double operator()(double x) const { return coupling * profile(x); }

  double profile(double x) const {
    switch (family) {
      case Family::zero: return 0.0;
      case Family::soliton: return soliton_profile(nu, x - x0);
      case Family::multi_soliton: {
        double s = 0.0;
        for (const auto& t : terms) s += soliton_profile(t.nu, x - t.x0);
        return s;
      }
      case Family::gaussian: {
        const double z = x / width;
        return amplitude * std::exp(-0.5 * z * z);
      }
      case Family::sech2: {
        const double c = std::cosh(x / width);
        return amplitude / (c * c);
      }
      case Family::from_file:
      case Family::from_samples: return (*data)(x);
    }
    return 0.0;
  }

  bool is_zero() const {
    if (coupling == 0.0 || family == Family::zero) return true;
    if ((family == Family::gaussian || family == Family::sech2) && amplitude == 0.0) return true;
    if (data) return std::all_of(data->u.begin(), data->u.end(), [](double v) { return v == 0.0; });
    return false;
  }

  bool has_exact_fourier() const {
    return family == Family::zero || family == Family::soliton || family == Family::multi_soliton ||
           family == Family::gaussian || family == Family::sech2;
  }

  /// Points where the profile peaks or kinks; used to split quadratures.
  std::vector<double> features() const {
    switch (family) {
      case Family::soliton: return {x0};
      case Family::multi_soliton: {
        std::vector<double> v;
        for (const auto& t : terms) v.push_back(t.x0);
        return v;
      }
      case Family::from_file:
      case Family::from_samples: return {data->x.front(), data->x.back()};
      default: return {0.0};
    }
  }

  /// Characteristic frequency of the profile (inverse width).
  double frequency_scale() const {
    switch (family) {
      case Family::zero: return 1.0;
      case Family::soliton: return nu;
      case Family::multi_soliton: {
        double m = 0.0;
        for (const auto& t : terms) m = std::max(m, t.nu);
        return m;
      }
      case Family::gaussian:
      case Family::sech2: return 1.0 / width;
      case Family::from_file:
      case Family::from_samples: {
        double l1 = 0.0, mx = 0.0;
        for (std::size_t j = 0; j + 1 < data->x.size(); ++j)
          l1 += 0.5 * (std::abs(data->u[j]) + std::abs(data->u[j + 1])) * (data->x[j + 1] - data->x[j]);
        for (double v : data->u) mx = std::max(mx, std::abs(v));
        return (l1 > 0.0) ? kPi * mx / l1 : 1.0;
      }
    }
    return 1.0;
  }

  /// sup |u| (exact for single-bump families, sampled at peaks otherwise).
  double sup_norm() const {
    double m = 0.0;
    switch (family) {
      case Family::zero: return 0.0;
      case Family::soliton: m = 2.0 * nu; break;
      case Family::gaussian:
      case Family::sech2: m = std::abs(amplitude); break;
      case Family::multi_soliton:
        for (const auto& t : terms) m = std::max(m, std::abs(profile(t.x0)));
        break;
      case Family::from_file:
      case Family::from_samples:
        for (double v : data->u) m = std::max(m, std::abs(v));
        break;
    }
    return std::abs(coupling) * m;
  }

  static double soliton_profile(double nu, double y) { return 2.0 * nu / (1.0 + nu * nu * y * y); }
};

namespace detail {

// int_0^1 exp(-i th s) ds and int_0^1 s exp(-i th s) ds
inline void segment_moments(double th, cplx& A, cplx& B) {
  if (std::abs(th) < 1e-2) {
    A = B = 0.0;
    cplx pw{1.0, 0.0};
    double fact = 1.0;
    for (int k = 0; k < 10; ++k) {
      A += pw / (fact * static_cast<double>(k + 1));
      B += pw / (fact * static_cast<double>(k + 2));
      pw *= -kI * th;
      fact *= static_cast<double>(k + 1);
    }
    return;
  }
  const cplx e = std::exp(-kI * th);
  A = (1.0 - e) / (kI * th);
  B = (A - e) / (kI * th);
}

}  // namespace detail

/// Exact transform of the linear interpolant of sampled data at xi = m dxi, m = 0..count-1.
inline std::vector<cplx> sampled_fourier_multiples(const SampledData& d, double dxi, std::size_t count) {
  std::vector<cplx> out(count, cplx{});
  for (std::size_t j = 0; j + 1 < d.x.size(); ++j) {
    const double a = d.x[j];
    const double delta = d.x[j + 1] - d.x[j];
    const double fa = d.u[j];
    const double df = d.u[j + 1] - d.u[j];
    if (fa == 0.0 && df == 0.0) continue;
    for (std::size_t m = 0; m < count; ++m) {
      const double xi = dxi * static_cast<double>(m);
      cplx A, B;
      detail::segment_moments(xi * delta, A, B);
      out[m] += delta * std::exp(-kI * xi * a) * (fa * A + df * B);
    }
  }
  return out;
}

/// Transform of the sinc interpolant, h sum_j u_j exp(-i x_j xi) for |xi| < pi/h (half weight at
/// pi/h, zero beyond), at xi = m dxi.
inline std::vector<cplx> band_limited_fourier_multiples(const SampledData& d, double dxi, std::size_t count) {
  const double h = d.spacing();
  const double band = kPi / h;
  const std::size_t n = d.x.size();
  std::vector<cplx> out(count, cplx{});
  std::vector<cplx> ph(n, cplx{1.0, 0.0}), step(n);
  for (std::size_t j = 0; j < n; ++j) step[j] = std::exp(-kI * d.x[j] * dxi);
  constexpr std::size_t kResync = 64;
  for (std::size_t m = 0; m < count; ++m) {
    const double xi = dxi * static_cast<double>(m);
    if (xi > band * (1.0 + 1e-12)) break;
    if (m % kResync == 0)
      for (std::size_t j = 0; j < n; ++j) ph[j] = std::exp(-kI * d.x[j] * xi);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      acc += d.u[j] * ph[j];
      ph[j] *= step[j];
    }
    out[m] = h * acc * (std::abs(xi - band) <= 1e-12 * band ? 0.5 : 1.0);
  }
  return out;
}

/// Closed-form transform u^(xi) = int exp(-i x xi) u(x) dx, including the coupling.
inline cplx fourier_exact(const PotentialSpec& s, double xi) {
  const double c = s.coupling;
  switch (s.family) {
    case Family::zero: return 0.0;
    case Family::soliton:
      return c * kTwoPi * std::exp(-std::abs(xi) / s.nu) * std::exp(-kI * xi * s.x0);
    case Family::multi_soliton: {
      cplx acc{0.0, 0.0};
      for (const auto& t : s.terms) acc += kTwoPi * std::exp(-std::abs(xi) / t.nu) * std::exp(-kI * xi * t.x0);
      return c * acc;
    }
    case Family::gaussian: {
      const double w = s.width;
      return c * s.amplitude * w * std::sqrt(kTwoPi) * std::exp(-0.5 * w * w * xi * xi);
    }
    case Family::sech2: {
      const double w = s.width;
      const double z = 0.5 * kPi * w * xi;
      if (std::abs(z) < 1e-8) return c * s.amplitude * 2.0 * w;
      if (std::abs(z) > 700.0) return 0.0;
      return c * s.amplitude * w * kPi * w * xi / std::sinh(z);
    }
    default:
      throw CapabilityError(std::string("fourier_exact: no closed form for family ") +
                            family_name(s.family));
  }
}

/// u^ at xi = m dxi, m = 0..count-1: closed form when available, else the exact transform
/// of the linear interpolant.
inline std::vector<cplx> fourier_multiples(const PotentialSpec& s, double dxi, std::size_t count) {
  if (s.has_exact_fourier()) {
    std::vector<cplx> out(count);
    for (std::size_t m = 0; m < count; ++m) out[m] = fourier_exact(s, dxi * static_cast<double>(m));
    return out;
  }
  std::vector<cplx> out = (s.data->interp == Interpolation::band_limited)
                              ? band_limited_fourier_multiples(*s.data, dxi, count)
                              : sampled_fourier_multiples(*s.data, dxi, count);
  for (auto& z : out) z *= s.coupling;
  return out;
}

/// Pointwise samples (times coupling) on a physical grid.
inline ComplexField sample(const PotentialSpec& s, const PhysicalGrid& g) {
  s.validate();
  return ComplexField::sample(g, [&](double x) { return s(x); });
}

inline std::vector<double> sample_real(const PotentialSpec& s, std::span<const double> x) {
  std::vector<double> v(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) v[j] = s(x[j]);
  return v;
}

struct PotentialNorms {
  double l1 = 0.0;    ///< int |u|
  double l2 = 0.0;    ///< (int u^2)^(1/2)
  double linf = 0.0;  ///< sup |u|
  double xl2 = 0.0;   ///< (int x^2 u^2)^(1/2)
  std::string method;  ///< "whole-line quadrature" or "grid quadrature"
  std::vector<std::string> warnings;
};

/// The four norms entering the decay hypotheses. Closed-form families are integrated over the
/// whole line; sampled data by the trapezoid rule on its nodes, with hypothesis warnings.
inline PotentialNorms norms(const PotentialSpec& s, const PhysicalGrid& g) {
  s.validate();
  g.validate();
  PotentialNorms n;
  if (s.is_zero()) {
    n.method = "trivial";
    return n;
  }
  if (s.has_exact_fourier()) {
    n.method = "whole-line quadrature";
    const auto br = s.features();
    n.l1 = quad::whole_line([&](double x) { return std::abs(s(x)); }, br);
    n.l2 = std::sqrt(quad::whole_line([&](double x) { return s(x) * s(x); }, br));
    n.xl2 = std::sqrt(quad::whole_line([&](double x) { const double v = x * s(x); return v * v; }, br));
    n.linf = s.sup_norm();
    double outer = 0.0;
    for (double xe : {g.x_min, g.x_max}) outer = std::max(outer, std::abs(s(xe)));
    if (outer > 1e-3 * n.linf)
      n.warnings.push_back("potential is not small at the physical window edges");
    return n;
  }
  n.method = "grid quadrature";
  const auto& d = *s.data;
  const double c = std::abs(s.coupling);
  double xl2_outer = 0.0;
  const double lo = d.x.front(), hi = d.x.back();
  const double span = hi - lo;
  for (std::size_t j = 0; j + 1 < d.x.size(); ++j) {
    const double h = d.x[j + 1] - d.x[j];
    const double a = c * d.u[j], b = c * d.u[j + 1];
    n.l1 += 0.5 * h * (std::abs(a) + std::abs(b));
    n.l2 += 0.5 * h * (a * a + b * b);
    const double xa = d.x[j] * a, xb = d.x[j + 1] * b;
    const double seg = 0.5 * h * (xa * xa + xb * xb);
    n.xl2 += seg;
    if (d.x[j] < lo + 0.1 * span || d.x[j + 1] > hi - 0.1 * span) xl2_outer += seg;
    n.linf = std::max({n.linf, std::abs(a), std::abs(b)});
  }
  if (n.xl2 > 0.0 && xl2_outer > 0.1 * n.xl2)
    n.warnings.push_back("xu(x) in L^2 doubtful: outer 10% of the data carries over 10% of the weight");
  if (std::max(std::abs(d.u.front()), std::abs(d.u.back())) * c > 1e-3 * n.linf)
    n.warnings.push_back("sampled potential does not decay at the ends of its data range");
  if (lo < g.x_min || hi > g.x_max)
    n.warnings.push_back("data range extends beyond the physical window");
  n.l2 = std::sqrt(n.l2);
  n.xl2 = std::sqrt(n.xl2);
  return n;
}

/// Pointwise max(u, 0).
inline std::vector<double> positive_part(std::span<const double> u) {
  std::vector<double> v(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) v[j] = std::max(u[j], 0.0);
  return v;
}

inline ComplexField positive_part(const ComplexField& f) {
  std::vector<cplx> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (std::abs(f.values[j].imag()) > 1e-12 * (1.0 + std::abs(f.values[j].real())))
      throw InputError("positive_part: complex sample");
    v[j] = std::max(f.values[j].real(), 0.0);
  }
  return ComplexField(f.grid, std::move(v));
}

/// Positive part as a sampled potential on the given nodes (coupling absorbed).
inline PotentialSpec positive_part(const PotentialSpec& s, std::span<const double> nodes) {
  std::vector<double> x(nodes.begin(), nodes.end());
  std::vector<double> u = positive_part(sample_real(s, x));
  return PotentialSpec::from_samples(std::move(x), std::move(u));
}

/// Whether every sample of u on the nodes is >= 0.
inline bool is_nonnegative(const PotentialSpec& s, std::span<const double> nodes) {
  if (s.is_zero()) return true;
  for (double x : nodes)
    if (s(x) < 0.0) return false;
  return true;
}

}  // namespace bolax
