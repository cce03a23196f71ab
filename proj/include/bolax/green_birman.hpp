#pragma once

// Birman-Schwinger operator K_{-E} = sqrt(u) G_{-E} * (sqrt(u) .) on a physical grid, its splitting
// K = M + L with L = (R(E)/2pi) (sqrt u, .) sqrt u, and the rank-one secular equation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/green.hpp"
#include "bolax/krylov.hpp"
#include "bolax/lax_spectrum.hpp"
#include "bolax/potentials.hpp"
#include "bolax/spectral_core.hpp"
#include "bolax/toeplitz.hpp"

namespace bolax {

struct BSOperator {
  double E = 0.0;
  PhysicalGrid grid;
  DiagonalRule rule = DiagonalRule::band_limited;
  Cutoff chi;
  double R = 0.0;                 ///< R(E) for chi
  std::vector<double> u;          ///< samples (>= 0)
  std::vector<double> weight;     ///< a_i = sqrt(h u_i)
  HermitianToeplitz G;            ///< c_m = h G(m h)  (diagonal from `rule`)
  HermitianToeplitz M;            ///< c_m - h R / 2pi

  std::size_t size() const { return u.size(); }

  /// Weighted matrix K_ij = sqrt(u_i) c_{i-j} sqrt(u_j).
  void apply_K(std::span<const cplx> x, std::span<cplx> y) const { apply_scaled(G, x, y); }
  void apply_M(std::span<const cplx> x, std::span<cplx> y) const { apply_scaled(M, x, y); }
  void apply_L(std::span<const cplx> x, std::span<cplx> y) const {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < x.size(); ++j) s += weight[j] * x[j];
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = (R / kTwoPi) * weight[j] * s;
  }

  LinearOperator K_operator() const {
    return [this](std::span<const cplx> x, std::span<cplx> y) { apply_K(x, y); };
  }
  LinearOperator M_operator() const {
    return [this](std::span<const cplx> x, std::span<cplx> y) { apply_M(x, y); };
  }

  Eigen::MatrixXcd dense_K() const { return scaled_dense(G); }
  Eigen::MatrixXcd dense_M() const { return scaled_dense(M); }
  Eigen::MatrixXcd dense_L() const {
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(weight.data(), static_cast<Eigen::Index>(weight.size()));
    return ((R / kTwoPi) * a * a.transpose()).cast<cplx>();
  }

  /// int u = sum h u_i = |a|^2.
  double integral_u() const {
    double s = 0.0;
    for (double w : weight) s += w * w;
    return s;
  }

 private:
  void apply_scaled(const HermitianToeplitz& T, std::span<const cplx> x, std::span<cplx> y) const {
    std::vector<cplx> t(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) t[j] = std::sqrt(u[j]) * x[j];
    T.apply(t, y);
    for (std::size_t j = 0; j < x.size(); ++j) y[j] *= std::sqrt(u[j]);
  }

  Eigen::MatrixXcd scaled_dense(const HermitianToeplitz& T) const {
    Eigen::MatrixXcd A = T.dense();
    const auto n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        A(i, j) *= std::sqrt(u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)]);
    return A;
  }
};

inline BSOperator assemble_K(const PotentialSpec& s, const PhysicalGrid& g, double E,
                             DiagonalRule rule = DiagonalRule::band_limited, const Cutoff& chi = Cutoff::standard()) {
  if (!(E > 0.0)) throw DomainError("assemble_K: E must be > 0");
  s.validate();
  g.validate();
  BSOperator K;
  K.E = E;
  K.grid = g;
  K.rule = rule;
  K.chi = chi;
  const std::vector<double> xs = g.points();
  K.u = sample_real(s, xs);
  const double h = g.spacing();
  for (std::size_t j = 0; j < K.u.size(); ++j) {
    if (K.u[j] < 0.0)
      throw PreconditionError("assemble_K: negative potential sample at x = " + std::to_string(xs[j]) +
                              " (apply positive_part first)");
    K.weight.push_back(std::sqrt(h * K.u[j]));
  }
  if (kPi / h < chi.support) throw ConfigurationError("assemble_K: grid too coarse for the cutoff support");
  K.R = split_R(E, chi);
  std::vector<cplx> col = green_column(E, h, g.n_points, rule);
  std::vector<cplx> mcol = col;
  for (auto& c : mcol) c -= h * K.R / kTwoPi;
  K.G = HermitianToeplitz(std::move(col));
  K.M = HermitianToeplitz(std::move(mcol));
  return K;
}

namespace detail {

// A(m) = sum_i u_i u_{i+m}, m = 0..n-1, by FFT.
inline std::vector<double> autocorrelation(std::span<const double> u) {
  const std::size_t n = u.size();
  Fft fft(2 * n);
  std::vector<cplx> buf(2 * n, cplx{});
  for (std::size_t j = 0; j < n; ++j) buf[j] = u[j];
  fft.forward(buf);
  for (auto& z : buf) z = std::norm(z);
  fft.backward(buf);
  std::vector<double> a(n);
  for (std::size_t m = 0; m < n; ++m) a[m] = buf[m].real() / static_cast<double>(2 * n);
  return a;
}

// sum_ij u_i u_j |c_{i-j}|^2 for a Hermitian Toeplitz column c.
inline double weighted_frobenius_squared(std::span<const cplx> c, std::span<const double> u) {
  const std::vector<double> A = autocorrelation(u);
  double s = std::norm(c[0]) * A[0];
  for (std::size_t m = 1; m < c.size(); ++m) s += 2.0 * std::norm(c[m]) * A[m];
  return std::max(s, 0.0);
}

}  // namespace detail

/// Frobenius norm of the weighted kernel matrix of K.
inline double hs_norm(const BSOperator& K) {
  return std::sqrt(detail::weighted_frobenius_squared(K.G.first_column(), K.u));
}

/// Frobenius norm of the weighted kernel matrix of M = K - L.
inline double hs_norm_M(const BSOperator& K) {
  return std::sqrt(detail::weighted_frobenius_squared(K.M.first_column(), K.u));
}

/// Frobenius norm of T = G_lambda * (u .), the matrix c_{i-j} u_j, on the grid.
inline double hs_norm_T(const PotentialSpec& s, double lambda, const PhysicalGrid& g,
                        DiagonalRule rule = DiagonalRule::band_limited) {
  if (!(lambda < 0.0)) throw DomainError("hs_norm_T: lambda must be < 0");
  const std::vector<cplx> c = green_column(-lambda, g.spacing(), g.n_points, rule);
  const std::vector<double> u = sample_real(s, g.points());
  const std::size_t n = c.size();
  std::vector<double> P(n);
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    acc += std::norm(c[m]);
    P[m] = acc;
  }
  double s2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) s2 += u[j] * u[j] * (P[j] + P[n - 1 - j] - std::norm(c[0]));
  return std::sqrt(s2);
}

/// Continuum value ||u||_2 / sqrt(2 pi |lambda|), by Parseval.
inline double hs_norm_T_reference(double l2_norm_u, double lambda) {
  return l2_norm_u / std::sqrt(kTwoPi * std::abs(lambda));
}

/// ||M_{-E} - M_0||_HS on the grid (band-limited kernels, same cutoff).
inline double hs_continuity(const PotentialSpec& s, double E, const PhysicalGrid& g,
                            const Cutoff& chi = Cutoff::standard()) {
  if (E < 0.0) throw DomainError("hs_continuity: E must be >= 0");
  if (E == 0.0) return 0.0;
  const std::vector<double> u = sample_real(s, g.points());
  for (double v : u)
    if (v < 0.0) throw PreconditionError("hs_continuity: potential must be nonnegative");
  const double h = g.spacing();
  const double Wc = kPi / h;
  const double R = split_R(E, chi);
  const double c0 = cutoff_c0(chi);
  std::vector<cplx> col(g.n_points);
  for (std::size_t m = 0; m < col.size(); ++m) {
    const double t = h * static_cast<double>(m);
    col[m] = h * (green_band_limited(E, Wc, t) - (R + regular_kernel_zero(Wc, t, c0)) / kTwoPi);
  }
  return std::sqrt(detail::weighted_frobenius_squared(col, u));
}

struct BSCount {
  double E = 0.0;
  std::size_t count = 0;
  std::size_t cross_check = 0;
  bool agree = false;
  std::vector<double> K_eigenvalues;  ///< computed top eigenvalues of K (descending)
  std::vector<double> L_eigenvalues;  ///< discrete spectrum of L_u
  /// Values within resolution of the threshold (|mu - 1| <= kMarginalBand, |lambda + E| <= tol_stab),
  /// counted by neither side.
  std::size_t marginal_K = 0;
  std::size_t marginal_L = 0;
};

inline constexpr double kMarginalBand = 1e-3;

inline LanczosResult top_eigenvalues(const BSOperator& K, double threshold, std::size_t min_count = 1) {
  LanczosOptions lo;
  lo.end = SpectrumEnd::largest;
  lo.threshold = threshold;
  lo.min_count = min_count;
  lo.max_steps = std::min<std::size_t>(K.size(), 600);
  lo.tol = 1e-12;
  lo.start_weights = K.weight;
  for (auto& w : lo.start_weights) w += 1e-3 * (*std::max_element(K.weight.begin(), K.weight.end()));
  return lanczos(K.K_operator(), K.size(), lo);
}

/// #{eigenvalues of K_{-E} > 1} against #{discrete eigenvalues of L_u < -E}.
inline BSCount bs_count(const PotentialSpec& s, double E, const PhysicalGrid& g, const DiscreteSpectrum& spectrum,
                        DiagonalRule rule = DiagonalRule::band_limited) {
  BSCount out;
  out.E = E;
  out.L_eigenvalues = spectrum.eigenvalues;
  for (double l : spectrum.eigenvalues) {
    if (std::abs(l + E) <= stability_tolerance(l, spectrum.sup_norm)) {
      ++out.marginal_L;
    } else if (l < -E) {
      ++out.cross_check;
    }
  }
  if (!s.is_zero()) {
    const BSOperator K = assemble_K(s, g, E, rule);
    const LanczosResult lr = top_eigenvalues(K, 1.0 - kMarginalBand, 2);
    out.K_eigenvalues = lr.values;
    for (double v : lr.values) {
      if (std::abs(v - 1.0) <= kMarginalBand) {
        ++out.marginal_K;
      } else if (v > 1.0) {
        ++out.count;
      }
    }
  }
  out.agree = out.count == out.cross_check;
  return out;
}

inline BSCount bs_count(const PotentialSpec& s, double E, const PhysicalGrid& g,
                        DiagonalRule rule = DiagonalRule::band_limited) {
  return bs_count(s, E, g, discrete_spectrum(s), rule);
}

struct SecularSolve {
  double E = 0.0;
  double lambda_root = 0.0;
  double lambda0 = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;          ///< |lambda (R/2pi) S(lambda) - 1|
  double integral_u = 0.0;
  double R = 0.0;
  double M_norm = 0.0;            ///< ||M||_2 (Lanczos extremes)
  double M_hs = 0.0;
  double top_K = 0.0;             ///< top eigenvalue of K
  double second_K = 0.0;
  double relative_mismatch = 0.0; ///< |1/lambda_root - top_K| / top_K
  double leading_order_ratio = 0.0;  ///< lambda_root R int u / 2pi
  std::string cutoff_id;
};

struct SecularOptions {
  std::optional<double> lambda0;
  std::size_t max_iterations = 200;
  double tol = 1e-12;
  DiagonalRule rule = DiagonalRule::band_limited;
  Cutoff chi = Cutoff::standard();
};

/// Fixed point of lambda = (1/int u)(2pi/R - lambda (S(lambda) - int u)), S = (a, (1 - lambda M)^-1 a).
inline SecularSolve secular_solve(const PotentialSpec& s, double E, const PhysicalGrid& g,
                                  const SecularOptions& opt = {}) {
  if (s.is_zero()) throw PreconditionError("secular_solve: int u must be > 0");
  const BSOperator K = assemble_K(s, g, E, opt.rule, opt.chi);
  SecularSolve out;
  out.E = E;
  out.R = K.R;
  out.cutoff_id = opt.chi.id();
  out.integral_u = K.integral_u();
  if (!(out.integral_u > 0.0)) throw PreconditionError("secular_solve: int u must be > 0");
  out.M_hs = hs_norm_M(K);

  LanczosOptions lo;
  lo.end = SpectrumEnd::largest;
  lo.threshold = std::numeric_limits<double>::infinity();
  lo.min_count = 1;
  lo.max_steps = std::min<std::size_t>(K.size(), 400);
  lo.tol = 1e-10;
  const LanczosResult ml = lanczos(K.M_operator(), K.size(), lo);
  out.M_norm = std::max(std::abs(ml.values.front()), std::abs(ml.extreme_opposite));
  out.lambda0 = opt.lambda0 ? *opt.lambda0 : 0.9 / std::max(out.M_norm, 1e-300);
  if (!(out.lambda0 * out.M_norm < 1.0))
    throw DomainError("secular_solve: lambda0 ||M|| >= 1; the Neumann series does not converge");

  const std::vector<cplx> a(K.weight.begin(), K.weight.end());
  auto S = [&](double lam) {
    auto A = [&](std::span<const cplx> x, std::span<cplx> y) {
      K.apply_M(x, y);
      for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] - lam * y[j];
    };
    const SolveResult sr = conjugate_gradient(A, a, 1e-14, 5000);
    if (!sr.converged) throw NumericError("secular_solve: CG for (1 - lambda M) did not converge");
    return dot(a, sr.x).real();
  };
  const double rscale = K.R / kTwoPi;
  auto step = [&](double lam) { return (1.0 / out.integral_u) * (1.0 / rscale - lam * (S(lam) - out.integral_u)); };

  const double g0 = step(0.0), g1 = step(out.lambda0);
  if (!(g0 >= 0.0 && g0 <= out.lambda0 && g1 >= 0.0 && g1 <= out.lambda0))
    throw DomainError("secular_solve: iteration does not map [0, lambda0] into itself (E or lambda0 too large)");

  double lam = g0;
  bool done = false;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    const double nxt = step(lam);
    if (!(nxt >= 0.0 && nxt <= out.lambda0))
      throw DomainError("secular_solve: iterate left [0, lambda0]");
    out.iterations = it;
    const double d = std::abs(nxt - lam);
    lam = nxt;
    if (d <= opt.tol * std::max(lam, 1e-300)) {
      done = true;
      break;
    }
  }
  if (!done) throw NumericError("secular_solve: iteration cap exceeded");
  out.lambda_root = lam;
  out.residual = std::abs(lam * rscale * S(lam) - 1.0);
  out.leading_order_ratio = lam * rscale * out.integral_u;

  const LanczosResult kl = top_eigenvalues(K, 1.0 / out.lambda0, 2);
  out.top_K = kl.values.front();
  out.second_K = kl.values.size() > 1 ? kl.values[1] : kl.extreme_opposite;
  if (out.second_K > 1.0 / out.lambda0)
    throw NumericError("secular_solve: more than one eigenvalue of K exceeds 1/lambda0");
  out.relative_mismatch = std::abs(1.0 / lam - out.top_K) / std::abs(out.top_K);
  return out;
}

struct CountBoundRow {
  double E = 0.0;
  std::size_t count = 0;
  std::size_t cross_check = 0;
  double hs_squared = 0.0;
  double inv_lambda_squared = 0.0;
  double bound_value = 0.0;  ///< hs^2 - 1/lambda_root^2
};

struct CountBoundScan {
  std::vector<CountBoundRow> rows;
  double max_bound = 0.0;
  double band_ratio = 0.0;   ///< max/min of bound_value
  double hs_growth = 0.0;    ///< hs^2 at the last E / hs^2 at the first E
  bool count_constant_in_tail = true;
};

inline CountBoundScan count_bound_scan(const PotentialSpec& s, const std::vector<double>& E_list, const PhysicalGrid& g,
                                       const SecularOptions& opt = {}) {
  for (std::size_t k = 1; k < E_list.size(); ++k)
    if (!(E_list[k] < E_list[k - 1])) throw ConfigurationError("count_bound_scan: E list must decrease");
  CountBoundScan out;
  if (s.is_zero()) {
    for (double E : E_list) out.rows.push_back({E, 0, 0, 0.0, 0.0, 0.0});
    return out;
  }
  const DiscreteSpectrum ds = discrete_spectrum(s);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double E : E_list) {
    CountBoundRow r;
    r.E = E;
    const SecularSolve ss = secular_solve(s, E, g, opt);
    const BSOperator K = assemble_K(s, g, E, opt.rule, opt.chi);
    r.hs_squared = std::pow(hs_norm(K), 2);
    r.inv_lambda_squared = 1.0 / (ss.lambda_root * ss.lambda_root);
    r.bound_value = r.hs_squared - r.inv_lambda_squared;
    const BSCount c = bs_count(s, E, g, ds, opt.rule);
    r.count = c.count;
    r.cross_check = c.cross_check;
    lo = std::min(lo, r.bound_value);
    hi = std::max(hi, r.bound_value);
    out.rows.push_back(r);
  }
  out.max_bound = hi;
  out.band_ratio = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  out.hs_growth = out.rows.back().hs_squared / out.rows.front().hs_squared;
  for (std::size_t k = out.rows.size() / 2; k + 1 < out.rows.size(); ++k)
    if (out.rows[k].count != out.rows[k + 1].count) out.count_constant_in_tail = false;
  return out;
}

}  // namespace bolax
