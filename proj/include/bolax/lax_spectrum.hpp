#pragma once

// The Lax operator L_u = (1/i) d/dx - C+ u C+ on H+, discretized on the Fourier half-line:
//
//   (M phi^)_j = xi_j phi^_j - (dxi/2pi) sum_k u^(xi_j - xi_k) phi^_k
//
// and every diagnostic built on its eigenpairs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/green.hpp"
#include "bolax/krylov.hpp"
#include "bolax/potentials.hpp"
#include "bolax/spectral_core.hpp"
#include "bolax/toeplitz.hpp"

namespace bolax {

/// Samples phi^(xi_j) of a half-line transform on FrequencyGrid nodes, so that
/// ||phi||_2^2 = (dxi/2pi) sum |phi^_j|^2.
struct HalfLineField {
  FrequencyGrid grid;
  std::vector<cplx> values;

  double l2_norm_squared() const {
    double s = 0.0;
    for (const auto& z : values) s += std::norm(z);
    return s * grid.spacing() / kTwoPi;
  }
};

/// Default frequency grid: xi_max = 16 max(frequency scale, sup|u|), 2048 modes.
inline FrequencyGrid default_frequency_grid(const PotentialSpec& s, std::size_t n_modes = 2048) {
  const double scale = std::max(s.frequency_scale(), s.sup_norm());
  return FrequencyGrid::make(n_modes, 16.0 * std::max(scale, 1e-12));
}

/// u^ at the nodes xi_j = (j + 1/2) dxi.
inline std::vector<cplx> potential_at_nodes(const PotentialSpec& s, const FrequencyGrid& g) {
  std::vector<cplx> half = fourier_multiples(s, 0.5 * g.spacing(), 2 * g.n_modes);
  std::vector<cplx> out(g.n_modes);
  for (std::size_t j = 0; j < g.n_modes; ++j) out[j] = half[2 * j + 1];
  return out;
}

/// Matrix-free discretized Lax operator.
struct LaxOperator {
  FrequencyGrid grid;
  HermitianToeplitz coupling_part;  ///< T(j, k) = (dxi/2pi) u^((j - k) dxi)
  double potential_sup = 0.0;

  void apply(std::span<const cplx> x, std::span<cplx> y) const {
    coupling_part.apply(x, y);
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = grid.node(j) * x[j] - y[j];
  }

  LinearOperator as_operator() const {
    return [this](std::span<const cplx> x, std::span<cplx> y) { apply(x, y); };
  }

  std::size_t size() const { return grid.n_modes; }
};

inline LaxOperator lax_operator(const PotentialSpec& s, const FrequencyGrid& g) {
  s.validate();
  g.validate();
  const double dxi = g.spacing();
  std::vector<cplx> uhat = fourier_multiples(s, dxi, g.n_modes);
  // u real requires u^(-xi) = conj(u^(xi)); compare for closed-form families.
  if (s.has_exact_fourier()) {
    double scale = 0.0, defect = 0.0;
    for (std::size_t m = 0; m < g.n_modes; ++m) {
      const double xi = dxi * static_cast<double>(m);
      scale = std::max(scale, std::abs(uhat[m]));
      defect = std::max(defect, std::abs(fourier_exact(s, -xi) - std::conj(uhat[m])));
    }
    if (defect > 1e-10 * std::max(scale, 1e-300))
      throw NumericError("assemble: u^ is not Hermitian symmetric (non-Hermitian Lax matrix)");
  }
  if (std::abs(uhat[0].imag()) > 1e-10 * std::max(std::abs(uhat[0]), 1e-300))
    throw NumericError("assemble: u^(0) is not real");
  for (auto& z : uhat) z *= dxi / kTwoPi;
  LaxOperator op;
  op.grid = g;
  op.coupling_part = HermitianToeplitz(std::move(uhat));
  op.potential_sup = s.sup_norm();
  return op;
}

/// Dense Lax matrix.
struct LaxMatrix {
  FrequencyGrid grid;
  Eigen::MatrixXcd M;
};

inline LaxMatrix assemble(const PotentialSpec& s, const FrequencyGrid& g) {
  const LaxOperator op = lax_operator(s, g);
  LaxMatrix out{g, -op.coupling_part.dense()};
  for (std::size_t j = 0; j < g.n_modes; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.M(jj, jj) += g.node(j);
  }
  const double defect = (out.M - out.M.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10 * std::max(1.0, out.M.cwiseAbs().maxCoeff()))
    throw NumericError("assemble: Hermiticity defect " + std::to_string(defect));
  return out;
}

struct SpectralResult {
  FrequencyGrid grid;
  std::vector<double> eigenvalues;  ///< ascending
  std::vector<CVector> eigenvectors;  ///< Euclidean-unit vectors of nodal samples
  std::vector<double> residuals;  ///< ||M v - lambda v||_2
  std::vector<std::size_t> discrete_indices;
  double matrix_norm = 0.0;
  std::string method;
};

/// Full dense Hermitian eigendecomposition.
inline SpectralResult eigensolve(const LaxMatrix& L) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L.M);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve: Hermitian eigensolver failed");
  SpectralResult r;
  r.grid = L.grid;
  r.method = "dense";
  const auto n = L.M.rows();
  r.matrix_norm = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));
  for (Eigen::Index k = 0; k < n; ++k) {
    r.eigenvalues.push_back(es.eigenvalues()(k));
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    r.residuals.push_back((L.M * v - es.eigenvalues()(k) * v).norm());
    r.eigenvectors.emplace_back(v.data(), v.data() + n);
  }
  return r;
}

/// Eigenpairs below `threshold` (at least `min_count` lowest) by Lanczos on the matrix-free operator.
inline SpectralResult eigensolve_lowest(const LaxOperator& op, double threshold, std::size_t min_count = 1,
                                        std::uint64_t seed = 0x5eed5eedULL) {
  LanczosOptions lo;
  lo.end = SpectrumEnd::smallest;
  lo.threshold = threshold;
  lo.min_count = min_count;
  lo.max_steps = std::min<std::size_t>(op.size(), 1200);
  lo.check_every = 25;
  lo.tol = 1e-11;
  lo.seed = seed;
  lo.start_weights.resize(op.size());
  const double decay = std::max(op.grid.xi_max / 8.0, 4.0 * op.grid.spacing());
  for (std::size_t j = 0; j < op.size(); ++j) lo.start_weights[j] = std::exp(-op.grid.node(j) / decay) + 1e-3;
  LanczosResult lr = lanczos(op.as_operator(), op.size(), lo);
  SpectralResult r;
  r.grid = op.grid;
  r.method = "lanczos";
  r.matrix_norm = lr.norm_estimate;
  r.eigenvalues = lr.values;
  r.eigenvectors = std::move(lr.vectors);
  r.residuals = lr.residuals;
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    if (r.eigenvalues[k] < threshold && r.residuals[k] > 1e-10 * std::max(r.matrix_norm, 1.0))
      throw NumericError("eigensolve: Lanczos pair " + std::to_string(k) + " not converged (residual " +
                         std::to_string(r.residuals[k]) + ", " + std::to_string(lr.steps) + " steps)");
  }
  return r;
}

struct SpectrumOptions {
  std::size_t n_modes = 2048;
  std::optional<double> xi_max;  ///< default 16 max(frequency scale, sup|u|)
  std::uint64_t seed = 0x5eed5eedULL;
  bool keep_unstable = false;  ///< keep fine-grid candidates that fail the refinement test
};

/// Options whose fine grid carries eigenfunctions onto the physical window g: no periodic
/// image inside the window (pi/dxi_fine >= 2 max|x|) and dxi_fine |x_feature| <= 1/8 for the
/// oscillation exp(-i x_feature xi) of off-centre bumps. Never lowers n_modes.
inline SpectrumOptions transport_options(const PotentialSpec& s, const PhysicalGrid& g, SpectrumOptions opt) {
  const double xi_max = opt.xi_max ? *opt.xi_max : default_frequency_grid(s, opt.n_modes).xi_max;
  const double window = std::max(std::abs(g.x_min), std::abs(g.x_max));
  double feature = 0.0;
  if (s.has_exact_fourier())
    for (double x : s.features()) feature = std::max(feature, std::abs(x));
  // dxi_fine = xi_max / (2 n)
  const double need = std::max(xi_max * window / kPi, 4.0 * xi_max * feature);
  std::size_t n = opt.n_modes;
  while (static_cast<double>(n) < need) n *= 2;
  opt.n_modes = n;
  opt.xi_max = xi_max;
  return opt;
}

struct StabilityRow {
  double base = 0.0;
  double fine = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
  bool stable = false;
};

struct DiscreteSpectrum {
  FrequencyGrid base_grid;
  FrequencyGrid fine_grid;
  double delta_edge = 0.0;
  double sup_norm = 0.0;
  std::vector<double> base_candidates;  ///< base eigenvalues below -delta_edge
  std::vector<double> fine_candidates;
  std::vector<StabilityRow> rows;
  /// Stable eigenvalues (fine values, ascending) with fine-grid eigenvectors.
  std::vector<double> eigenvalues;
  std::vector<CVector> eigenvectors;
  std::vector<double> residuals;
  double min_eigenvalue = 0.0;  ///< lowest computed eigenvalue at either resolution
  double matrix_norm = 0.0;
  bool unresolved = false;  ///< some candidate failed the refinement test (kept only with keep_unstable)

  std::size_t size() const { return eigenvalues.size(); }

  /// Eigenfunction j as samples phi^(xi) with ||phi||_2 = 1 (phase arbitrary but deterministic).
  HalfLineField eigenfunction(std::size_t j) const {
    HalfLineField f{fine_grid, eigenvectors.at(j)};
    const double s = std::sqrt(kTwoPi / fine_grid.spacing());
    for (auto& z : f.values) z *= s;
    return f;
  }
};

inline double stability_tolerance(double lambda, double sup) { return 1e-3 * std::max(std::abs(lambda), sup); }

/// Eigenvalues of the discretized L_u that are below -delta_edge and agree between
/// (dxi, xi_max) and (dxi/2, 2 xi_max).
inline DiscreteSpectrum discrete_spectrum(const PotentialSpec& s, const SpectrumOptions& opt = {}) {
  s.validate();
  DiscreteSpectrum ds;
  ds.base_grid = opt.xi_max ? FrequencyGrid::make(opt.n_modes, *opt.xi_max) : default_frequency_grid(s, opt.n_modes);
  ds.fine_grid = ds.base_grid.refined();
  ds.delta_edge = std::max(1e-6, 0.05 * ds.base_grid.spacing());
  ds.sup_norm = s.sup_norm();
  if (s.is_zero()) return ds;

  const SpectralResult base = eigensolve_lowest(lax_operator(s, ds.base_grid), -ds.delta_edge, 1, opt.seed);
  const SpectralResult fine = eigensolve_lowest(lax_operator(s, ds.fine_grid), -ds.delta_edge, 1, opt.seed);
  ds.min_eigenvalue = std::min(base.eigenvalues.front(), fine.eigenvalues.front());
  ds.matrix_norm = fine.matrix_norm;
  for (double v : base.eigenvalues)
    if (v < -ds.delta_edge) ds.base_candidates.push_back(v);
  std::vector<std::size_t> fine_idx;
  for (std::size_t k = 0; k < fine.eigenvalues.size(); ++k)
    if (fine.eigenvalues[k] < -ds.delta_edge) {
      ds.fine_candidates.push_back(fine.eigenvalues[k]);
      fine_idx.push_back(k);
    }

  std::vector<bool> used(ds.base_candidates.size(), false);
  bool unresolved = false;
  for (std::size_t c = 0; c < ds.fine_candidates.size(); ++c) {
    const double lf = ds.fine_candidates[c];
    StabilityRow row;
    row.fine = lf;
    row.tolerance = stability_tolerance(lf, ds.sup_norm);
    std::size_t best = used.size();
    double bd = 0.0;
    for (std::size_t b = 0; b < ds.base_candidates.size(); ++b) {
      const double d = std::abs(ds.base_candidates[b] - lf);
      if (!used[b] && (best == used.size() || d < bd)) {
        best = b;
        bd = d;
      }
    }
    if (best < used.size()) {
      row.base = ds.base_candidates[best];
      row.difference = bd;
      row.stable = bd <= row.tolerance;
      if (row.stable) used[best] = true;
    } else {
      row.base = std::nan("");
      row.difference = std::nan("");
    }
    const bool resolved = row.stable || lf >= -std::max(10.0 * ds.delta_edge, 10.0 * row.tolerance);
    if (row.stable || (opt.keep_unstable && !resolved)) {
      if (!row.stable) unresolved = true;
      const std::size_t k = fine_idx[c];
      ds.eigenvalues.push_back(lf);
      CVector v = fine.eigenvectors[k];
      // deterministic phase: the largest-modulus entry is real positive
      std::size_t jm = 0;
      for (std::size_t j = 1; j < v.size(); ++j)
        if (std::abs(v[j]) > std::abs(v[jm])) jm = j;
      const cplx ph = std::abs(v[jm]) / v[jm];
      for (auto& z : v) z *= ph;
      ds.eigenvectors.push_back(std::move(v));
      ds.residuals.push_back(fine.residuals[k]);
    } else if (!resolved) {
      unresolved = true;
    }
    ds.rows.push_back(row);
  }
  ds.unresolved = unresolved;
  if (unresolved && !opt.keep_unstable)
    throw NumericError("discrete_spectrum: eigenvalues do not stabilize under refinement; increase xi_max or n_modes");
  for (double v : ds.eigenvalues)
    if (v < -ds.sup_norm - stability_tolerance(v, ds.sup_norm))
      throw NumericError("discrete_spectrum: eigenvalue below -sup|u| (lower bound violated)");
  return ds;
}

// ---------------------------------------------------------------------------------------------
// Half-line transport to physical space

namespace detail {

// Taylor coefficients at xi = 0+ from a least-squares polynomial through the first nodes.
inline std::vector<cplx> taylor_at_origin(const HalfLineField& f, int terms) {
  const int deg = terms + 1;
  const int npts = std::min<int>(static_cast<int>(f.values.size()), 2 * deg + 2);
  Eigen::MatrixXcd A(npts, deg + 1);
  Eigen::VectorXcd b(npts);
  const double d = f.grid.spacing();
  for (int j = 0; j < npts; ++j) {
    const double t = f.grid.node(static_cast<std::size_t>(j)) / d;
    double p = 1.0;
    for (int k = 0; k <= deg; ++k) {
      A(j, k) = p;
      p *= t;
    }
    b(j) = f.values[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
  std::vector<cplx> out(static_cast<std::size_t>(terms));
  double s = 1.0;
  for (int k = 0; k < terms; ++k) {
    out[static_cast<std::size_t>(k)] = c(k) / s;
    s *= d;
  }
  return out;
}

}  // namespace detail

/// f(x) = (1/2pi) int_0^inf exp(i x xi) f^(xi) dxi from nodal samples. The one-sided Taylor
/// jet at 0+ is removed with exp(-a xi) xi^k terms and inverted analytically; the smooth
/// remainder goes through the midpoint rule.
inline std::vector<cplx> half_line_inverse(const HalfLineField& f, std::span<const double> x, double taper,
                                           int jet_terms = 3) {
  const std::size_t n = f.values.size();
  const double a = taper;
  const std::vector<cplx> jet = detail::taylor_at_origin(f, jet_terms);
  // exp(-a xi) q(xi) has the same jet: q = exp(a xi) * jet
  std::vector<cplx> q(jet.size(), cplx{});
  for (std::size_t k = 0; k < jet.size(); ++k) {
    double ak = 1.0;
    for (std::size_t m = 0; m <= k; ++m) {
      q[k] += ak * jet[k - m];
      ak *= a / static_cast<double>(m + 1);
    }
  }
  std::vector<cplx> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = f.grid.node(j);
    cplx p{0.0, 0.0};
    double xp = 1.0;
    for (const auto& c : q) {
      p += c * xp;
      xp *= xi;
    }
    r[j] = f.values[j] - std::exp(-a * xi) * p;
  }
  const double dxi = f.grid.spacing();
  std::vector<cplx> out(x.size());
  constexpr std::size_t kResync = 256;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx step = std::exp(kI * x[i] * dxi);
    cplx ph{};
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j % kResync == 0) ph = std::exp(kI * x[i] * f.grid.node(j));
      acc += r[j] * ph;
      ph *= step;
    }
    acc *= dxi / kTwoPi;
    const cplx den = 1.0 / cplx(a, -x[i]);
    cplx pw = den;
    double fact = 1.0;
    cplx an{0.0, 0.0};
    for (std::size_t k = 0; k < q.size(); ++k) {
      an += q[k] * fact * pw;
      pw *= den;
      fact *= static_cast<double>(k + 1);
    }
    out[i] = acc + an / kTwoPi;
  }
  return out;
}

/// Natural taper for eigenfunction transport: phi^ decays like exp(-xi / (2|lambda|)) for solitons.
inline double transport_taper(double lambda) { return 1.0 / (2.0 * std::max(std::abs(lambda), 1e-12)); }

inline ComplexField to_physical(const HalfLineField& f, const PhysicalGrid& g, double taper) {
  const std::vector<double> xs = g.points();
  return ComplexField(g, half_line_inverse(f, xs, taper));
}

// ---------------------------------------------------------------------------------------------
// Normalization and identities

/// int u phi dx = (1/2pi) int conj(u^) phi^ dxi (u real).
inline cplx potential_pairing(const HalfLineField& phi, std::span<const cplx> uhat_nodes) {
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < phi.values.size(); ++j) s += std::conj(uhat_nodes[j]) * phi.values[j];
  return s * phi.grid.spacing() / kTwoPi;
}

struct NormalizedEigenfunction {
  HalfLineField phi;          ///< scaled so that int u phi = 2 pi i lambda
  cplx factor{1.0, 0.0};      ///< applied scale c
  cplx pairing_before{};      ///< int u phi before scaling
  cplx pairing_after{};
  double threshold = 0.0;     ///< sqrt(2 pi |lambda|) ||phi|| (1 - tol)
  bool identity_ok = true;    ///< |int u phi| >= threshold
};

inline constexpr double kNormalizationTolerance = 1e-3;

inline NormalizedEigenfunction normalize_eigenfunction(const HalfLineField& phi, const PotentialSpec& s,
                                                       double lambda) {
  if (!(lambda < 0.0)) throw PreconditionError("normalize_eigenfunction: lambda must be a negative eigenvalue");
  const std::vector<cplx> uhat = potential_at_nodes(s, phi.grid);
  NormalizedEigenfunction out;
  out.pairing_before = potential_pairing(phi, uhat);
  const double nrm = std::sqrt(phi.l2_norm_squared());
  out.threshold = std::sqrt(kTwoPi * std::abs(lambda)) * nrm * (1.0 - kNormalizationTolerance);
  out.identity_ok = std::abs(out.pairing_before) >= out.threshold;
  if (std::abs(out.pairing_before) == 0.0)
    throw NumericError("normalize_eigenfunction: int u phi vanishes");
  out.factor = kTwoPi * kI * lambda / out.pairing_before;
  out.phi = phi;
  for (auto& z : out.phi.values) z *= out.factor;
  out.pairing_after = potential_pairing(out.phi, uhat);
  return out;
}

/// | |int u phi|^2 - 2 pi |lambda| ||phi||^2 | / (2 pi |lambda| ||phi||^2)
inline double identity_check(const HalfLineField& phi, const PotentialSpec& s, double lambda) {
  const std::vector<cplx> uhat = potential_at_nodes(s, phi.grid);
  const double lhs = std::norm(potential_pairing(phi, uhat));
  const double rhs = kTwoPi * std::abs(lambda) * phi.l2_norm_squared();
  if (rhs == 0.0) return 0.0;
  return std::abs(lhs - rhs) / rhs;
}

struct TailLimit {
  cplx left{}, right{};            ///< medians of x phi(x) over the outer 10% on each side
  cplx limit{};                    ///< mean of the two sides
  cplx reference{};                ///< (1/(2 pi i lambda)) int u phi
  double error = 0.0;              ///< max over sides of |side - reference|
  double side_difference = 0.0;    ///< |left - right|
  double spread = 0.0;             ///< relative spread of x phi within the outer regions
  cplx left_extrapolated{}, right_extrapolated{};  ///< A from a fit A + B/x + C/x^2 on each side
  cplx joint_extrapolated{};       ///< A from one cubic fit in 1/x over both outer regions
  double extrapolated_error = 0.0; ///< |joint_extrapolated - reference|
};

inline TailLimit tail_limit(const ComplexField& phi, cplx pairing, double lambda) {
  const auto& g = phi.grid;
  const std::size_t n = g.n_points;
  const std::size_t w = std::max<std::size_t>(n / 10, 4);
  TailLimit t;
  t.reference = pairing / (kTwoPi * kI * lambda);
  auto side = [&](std::size_t lo, std::size_t hi, cplx& med, cplx& extrap, double& spread) {
    std::vector<double> re, im;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(hi - lo), 3);
    Eigen::MatrixXcd b(static_cast<Eigen::Index>(hi - lo), 1);
    for (std::size_t j = lo; j < hi; ++j) {
      const double x = g.x(j);
      const cplx v = x * phi.values[j];
      re.push_back(v.real());
      im.push_back(v.imag());
      const auto r = static_cast<Eigen::Index>(j - lo);
      A(r, 0) = 1.0;
      A(r, 1) = 1.0 / x;
      A(r, 2) = 1.0 / (x * x);
      b(r, 0) = v;
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size() / 2;
      return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    med = cplx(median(re), median(im));
    double dev = 0.0;
    for (std::size_t k = 0; k < re.size(); ++k) dev = std::max(dev, std::abs(cplx(re[k], im[k]) - med));
    spread = dev / std::max(std::abs(med), 1e-300);
    const Eigen::MatrixXcd Ac = A.cast<cplx>();
    const Eigen::MatrixXcd c = Ac.colPivHouseholderQr().solve(b);
    extrap = c(0, 0);
  };
  double sl = 0.0, sr = 0.0;
  side(0, w, t.left, t.left_extrapolated, sl);
  side(n - w, n, t.right, t.right_extrapolated, sr);
  {
    // one expansion in 1/x serves both ends, so 1/x = 0 lies inside the fitted range
    Eigen::MatrixXcd A(static_cast<Eigen::Index>(2 * w), 4);
    Eigen::VectorXcd b(static_cast<Eigen::Index>(2 * w));
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= w && j < n - w) continue;
      const double y = 1.0 / g.x(j);
      A(r, 0) = 1.0;
      A(r, 1) = y;
      A(r, 2) = y * y;
      A(r, 3) = y * y * y;
      b(r) = g.x(j) * phi.values[j];
      ++r;
    }
    t.joint_extrapolated = A.colPivHouseholderQr().solve(b)(0);
  }
  t.spread = std::max(sl, sr);
  t.limit = 0.5 * (t.left + t.right);
  t.error = std::max(std::abs(t.left - t.reference), std::abs(t.right - t.reference));
  t.side_difference = std::abs(t.left - t.right);
  t.extrapolated_error = std::abs(t.joint_extrapolated - t.reference);
  if (t.spread > 0.05)
    throw PreconditionError("tail_limit: x phi(x) has not plateaued in the outer window (spread " +
                            std::to_string(t.spread) + "); widen the physical window");
  return t;
}

/// ||phi - G_lambda * (u phi)||_2 / ||phi||_2 on the physical grid.
inline double integral_residual(const ComplexField& phi, const PotentialSpec& s, double lambda,
                                DiagonalRule rule = DiagonalRule::band_limited) {
  if (!(lambda < 0.0)) throw PreconditionError("integral_residual: lambda must be < 0");
  const double nphi = l2_norm_squared(phi);
  if (nphi == 0.0) return 0.0;
  const auto& g = phi.grid;
  std::vector<cplx> uphi(phi.size());
  for (std::size_t j = 0; j < uphi.size(); ++j) uphi[j] = s(g.x(j)) * phi.values[j];
  const GreenConvolution G(-lambda, g, rule);
  const std::vector<cplx> conv = G.apply(uphi);
  double res = 0.0;
  for (std::size_t j = 0; j < conv.size(); ++j) res += std::norm(phi.values[j] - conv[j]);
  return std::sqrt(res * g.spacing() / nphi);
}

// ---------------------------------------------------------------------------------------------
// Jost solution and phase constant

struct JostSolution {
  ComplexField W;
  double residual = 0.0;  ///< ||(I - T)W - 1|| / ||1|| on the grid
  std::size_t iterations = 0;
};

/// Solves W = 1 + G_zeta * (u W) on the physical grid (GMRES on W - 1).
inline JostSolution jost_solution(const PotentialSpec& s, double zeta, const PhysicalGrid& g,
                                  std::span<const double> eigenvalues = {}, double solver_gap = 1e-6,
                                  DiagonalRule rule = DiagonalRule::band_limited) {
  if (!(zeta < 0.0)) throw PreconditionError("jost_solution: zeta must be < 0");
  for (double l : eigenvalues)
    if (std::abs(zeta - l) <= solver_gap)
      throw NumericError("jost_solution: zeta within solver_gap of an eigenvalue (near-singular system)");
  const std::vector<double> xs = g.points();
  const std::vector<double> u = sample_real(s, xs);
  JostSolution out;
  if (s.is_zero()) {
    out.W = ComplexField(g, std::vector<cplx>(g.n_points, cplx{1.0, 0.0}));
    return out;
  }
  const GreenConvolution G(-zeta, g, rule);
  auto T = [&](std::span<const cplx> f, std::span<cplx> y) {
    std::vector<cplx> uf(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) uf[j] = u[j] * f[j];
    G.matrix.apply(uf, y);
  };
  auto A = [&](std::span<const cplx> f, std::span<cplx> y) {
    T(f, y);
    for (std::size_t j = 0; j < f.size(); ++j) y[j] = f[j] - y[j];
  };
  std::vector<cplx> one(g.n_points, cplx{1.0, 0.0}), rhs(g.n_points);
  T(one, rhs);
  SolveResult sr = gmres(A, rhs, 1e-11, 100, 3000);
  std::vector<cplx> W(g.n_points);
  for (std::size_t j = 0; j < W.size(); ++j) W[j] = 1.0 + sr.x[j];
  std::vector<cplx> AW(g.n_points);
  A(W, AW);
  for (auto& z : AW) z -= 1.0;
  out.residual = norm2(AW) / std::sqrt(static_cast<double>(g.n_points));
  out.iterations = sr.iterations;
  if (!sr.converged) throw NumericError("jost_solution: GMRES did not converge");
  out.W = ComplexField(g, std::move(W));
  return out;
}

struct PhaseConstant {
  cplx gamma{};
  double flatness = 0.0;
  bool extraction_ok = false;
  double d0 = 0.0;
  std::size_t levels = 0;
  cplx gamma_more_levels{};   ///< same extraction with two more Richardson levels
  double level_stability = 0.0;  ///< |gamma - gamma_more_levels|
  double residue_ratio = 0.0;  ///< phi_residue / phi_normalized = |int u phi|^2/(2 pi |lambda|) (unit phi)
  ComplexField phi;           ///< eigenfunction with the residue normalization of W's pole
  ComplexField H;             ///< regular part H(lambda) on the physical grid
};

struct PhaseOptions {
  std::size_t levels = 4;  ///< K: zeta_k for k = 0..K
  double cg_tol = 1e-13;
};

/// gamma from H(lambda) + 1 = (x + gamma) phi, with W - 1 solved in frequency space,
/// lambda approached from below along zeta_k = lambda - d0 2^-k and Richardson-extrapolated.
inline PhaseConstant phase_constant(const PotentialSpec& s, const DiscreteSpectrum& ds, std::size_t index,
                                    const PhysicalGrid& g, const PhaseOptions& opt = {}) {
  if (index >= ds.size()) throw PreconditionError("phase_constant: no such eigenvalue");
  const double lambda = ds.eigenvalues[index];
  const FrequencyGrid& fg = ds.fine_grid;
  const LaxOperator op = lax_operator(s, fg);
  const std::vector<cplx> b = potential_at_nodes(s, fg);
  Deflation defl;
  defl.basis = ds.eigenvectors;
  std::vector<cplx> proj(ds.size());
  for (std::size_t j = 0; j < ds.size(); ++j) proj[j] = dot(ds.eigenvectors[j], b);

  double gap = std::abs(lambda);
  for (std::size_t j = 0; j < ds.size(); ++j)
    if (j != index) gap = std::min(gap, std::abs(ds.eigenvalues[j] - lambda));
  PhaseConstant pc;
  pc.d0 = gap / 4.0;

  auto H_at = [&](double zeta) {
    auto A = [&](std::span<const cplx> x, std::span<cplx> y) {
      op.apply(x, y);
      for (std::size_t j = 0; j < x.size(); ++j) y[j] -= zeta * x[j];
    };
    SolveResult sr = conjugate_gradient(A, b, opt.cg_tol, 20000, &defl);
    if (!sr.converged) throw NumericError("phase_constant: deflated CG did not converge");
    for (std::size_t j = 0; j < ds.size(); ++j)
      if (j != index) axpy(proj[j] / (ds.eigenvalues[j] - zeta), ds.eigenvectors[j], sr.x);
    return sr.x;
  };

  auto extrapolate = [&](std::size_t K) {
    // Neville table in d = lambda - zeta with d_k = d0 2^-k, evaluated at d = 0
    std::vector<std::vector<cplx>> T;
    std::vector<double> d;
    for (std::size_t k = 0; k <= K; ++k) {
      d.push_back(pc.d0 * std::pow(0.5, static_cast<double>(k)));
      T.push_back(H_at(lambda - d.back()));
    }
    for (std::size_t m = 1; m <= K; ++m)
      for (std::size_t k = K; k >= m; --k) {
        const double w = d[k] / (d[k - m] - d[k]);
        for (std::size_t j = 0; j < T[k].size(); ++j) T[k][j] = T[k][j] + w * (T[k][j] - T[k - 1][j]);
        if (k == m) break;
      }
    return T[K];
  };

  const double taper = transport_taper(lambda);
  const std::vector<double> xs = g.points();
  // phi with the normalization of W's pole: phi^ = -i v (v^H b)
  HalfLineField phihat{fg, ds.eigenvectors[index]};
  for (auto& z : phihat.values) z *= -kI * proj[index];
  const HalfLineField unit = ds.eigenfunction(index);
  pc.residue_ratio = std::norm(potential_pairing(unit, b)) / (kTwoPi * std::abs(lambda));
  pc.phi = ComplexField(g, half_line_inverse(phihat, xs, taper));

  auto gamma_from = [&](const std::vector<cplx>& Hhat, ComplexField* keep, double& flat) {
    ComplexField H(g, half_line_inverse(HalfLineField{fg, Hhat}, xs, taper));
    const std::size_t n = g.n_points;
    std::vector<cplx> q;
    for (std::size_t j = n / 4; j < 3 * n / 4; ++j) q.push_back((H.values[j] + 1.0) / pc.phi.values[j] - g.x(j));
    std::vector<double> re, im;
    for (const auto& z : q) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    std::nth_element(re.begin(), re.begin() + static_cast<long>(re.size() / 2), re.end());
    std::nth_element(im.begin(), im.begin() + static_cast<long>(im.size() / 2), im.end());
    const cplx gamma(re[re.size() / 2], im[im.size() / 2]);
    flat = 0.0;
    for (const auto& z : q) flat = std::max(flat, std::abs(z - gamma));
    if (keep) *keep = std::move(H);
    return gamma;
  };

  pc.levels = opt.levels;
  pc.gamma = gamma_from(extrapolate(opt.levels), &pc.H, pc.flatness);
  double flat2 = 0.0;
  pc.gamma_more_levels = gamma_from(extrapolate(opt.levels + 2), nullptr, flat2);
  pc.level_stability = std::abs(pc.gamma - pc.gamma_more_levels);
  pc.extraction_ok = pc.flatness <= 1e-2 * (1.0 + std::abs(pc.gamma));
  return pc;
}

// ---------------------------------------------------------------------------------------------
// Coupling sweep

struct CouplingBranch {
  std::vector<double> couplings;
  /// mu[k] = sorted negative eigenvalues at couplings[k]; branch n is the n-th entry.
  std::vector<std::vector<double>> mu;
  std::vector<std::string> log;

  std::size_t branch_count() const {
    std::size_t m = 0;
    for (const auto& v : mu) m = std::max(m, v.size());
    return m;
  }

  /// Largest increment mu_n(c_{k+1}) - mu_n(c_k) after branch n first appears (negative when
  /// strictly decreasing everywhere).
  double max_increment(std::size_t n) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < mu.size(); ++k)
      if (n < mu[k].size() && n < mu[k + 1].size()) worst = std::max(worst, mu[k + 1][n] - mu[k][n]);
    return worst;
  }
};

inline CouplingBranch coupling_sweep(const PotentialSpec& s, const std::vector<double>& couplings,
                                     const SpectrumOptions& opt = {}) {
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    if (!(couplings[k] > 0.0)) throw ConfigurationError("coupling_sweep: couplings must be > 0");
    if (k > 0 && !(couplings[k] > couplings[k - 1]))
      throw ConfigurationError("coupling_sweep: couplings must be ascending");
  }
  {
    const PhysicalGrid probe = PhysicalGrid::make(4096, -200.0, 200.0);
    if (!is_nonnegative(s, probe.points()))
      throw PreconditionError("coupling_sweep: potential must be nonnegative (apply positive_part)");
  }
  CouplingBranch out;
  out.couplings = couplings;
  for (double c : couplings) {
    SpectrumOptions o = opt;
    const PotentialSpec sc = s.with_coupling(s.coupling * c);
    if (!o.xi_max) o.xi_max = default_frequency_grid(s, opt.n_modes).xi_max * std::max(1.0, c);
    const DiscreteSpectrum ds = discrete_spectrum(sc, o);
    out.mu.push_back(ds.eigenvalues);
    if (!out.mu.back().empty() && out.mu.size() > 1 && out.mu[out.mu.size() - 2].size() > out.mu.back().size())
      out.log.push_back("branch count dropped at coupling " + std::to_string(c) + "; keeping index order");
  }
  return out;
}

}  // namespace bolax
