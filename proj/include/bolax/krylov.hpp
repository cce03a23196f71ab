#pragma once

// Krylov methods on matrix-free operators: Lanczos with full reorthogonalization,
// (deflated) conjugate gradients and restarted GMRES.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/fft.hpp"

namespace bolax {

using LinearOperator = std::function<void(std::span<const cplx>, std::span<cplx>)>;
using CVector = std::vector<cplx>;

inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
  return s;
}

inline double norm2(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += alpha * x[j];
}

enum class SpectrumEnd { smallest, largest };

struct LanczosOptions {
  SpectrumEnd end = SpectrumEnd::smallest;
  /// Wanted eigenvalues: below the threshold (smallest end) or above it (largest end).
  double threshold = 0.0;
  /// Always return at least this many extreme eigenpairs.
  std::size_t min_count = 1;
  std::size_t max_steps = 800;
  std::size_t check_every = 20;
  /// Residual tolerance relative to the largest Ritz value magnitude.
  double tol = 1e-10;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Optional weights shaping the random start vector (same length as the operator).
  std::vector<double> start_weights;
};

struct LanczosResult {
  std::vector<double> values;  ///< ordered from the requested end inward
  std::vector<CVector> vectors;
  std::vector<double> residuals;  ///< ||A v - theta v||_2, recomputed explicitly
  std::size_t steps = 0;
  bool converged = false;
  double norm_estimate = 0.0;  ///< max |Ritz value|
  double extreme_opposite = 0.0;  ///< Ritz value at the other end of the spectrum
};

/// Lanczos with two-pass classical Gram-Schmidt against all previous vectors.
inline LanczosResult lanczos(const LinearOperator& A, std::size_t n, const LanczosOptions& opt) {
  if (n == 0) throw ConfigurationError("lanczos: empty operator");
  const std::size_t kmax = std::min(opt.max_steps, n);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  std::vector<CVector> Q;
  Q.reserve(kmax + 1);
  CVector q(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = opt.start_weights.empty() ? 1.0 : opt.start_weights[j];
    q[j] = w * cplx(uni(rng), uni(rng));
  }
  double nq = norm2(q);
  if (nq == 0.0) throw NumericError("lanczos: zero start vector");
  for (auto& z : q) z /= nq;
  Q.push_back(q);

  std::vector<double> alpha, beta;
  CVector w(n);
  LanczosResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  std::size_t last_count = static_cast<std::size_t>(-1);
  bool breakdown = false;

  auto wanted = [&](double theta) {
    return opt.end == SpectrumEnd::smallest ? theta < opt.threshold : theta > opt.threshold;
  };

  std::size_t k = 0;
  for (k = 0; k < kmax; ++k) {
    A(Q[k], w);
    const double a = dot(Q[k], w).real();
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : Q) {
        const cplx c = dot(qi, w);
        axpy(-c, qi, w);
      }
    }
    const double b = norm2(w);
    const bool check = ((k + 1) % opt.check_every == 0) || (k + 1 == kmax);
    if (b < 1e-14 * std::max(1.0, std::abs(a))) breakdown = true;

    if (check || breakdown) {
      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd e(std::max<Eigen::Index>(m - 1, 0));
      for (Eigen::Index i = 0; i + 1 < m; ++i) e(i) = beta[static_cast<std::size_t>(i)];
      tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      const auto& th = tri.eigenvalues();
      const double scale = std::max(std::abs(th(0)), std::abs(th(m - 1)));
      std::size_t count = 0;
      bool all_ok = true;
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index idx = (opt.end == SpectrumEnd::smallest) ? i : m - 1 - i;
        const double theta = th(idx);
        if (!(wanted(theta) || static_cast<std::size_t>(i) < opt.min_count)) break;
        ++count;
        const double est = b * std::abs(tri.eigenvectors()(m - 1, idx));
        if (est > opt.tol * std::max(scale, 1e-300)) all_ok = false;
      }
      const bool stable = (count == last_count);
      last_count = count;
      if ((all_ok && stable) || breakdown || k + 1 == kmax) {
        res.converged = (all_ok && stable) || breakdown;
        res.norm_estimate = scale;
        res.extreme_opposite = (opt.end == SpectrumEnd::smallest) ? th(m - 1) : th(0);
        for (std::size_t c = 0; c < count; ++c) {
          const Eigen::Index idx = (opt.end == SpectrumEnd::smallest)
                                       ? static_cast<Eigen::Index>(c)
                                       : m - 1 - static_cast<Eigen::Index>(c);
          CVector v(n, cplx{});
          for (Eigen::Index i = 0; i < m; ++i) axpy(tri.eigenvectors()(i, idx), Q[static_cast<std::size_t>(i)], v);
          const double nv = norm2(v);
          for (auto& z : v) z /= nv;
          CVector Av(n);
          A(v, Av);
          const double theta = dot(v, Av).real();
          axpy(-theta, v, Av);
          res.values.push_back(theta);
          res.residuals.push_back(norm2(Av));
          res.vectors.push_back(std::move(v));
        }
        res.steps = k + 1;
        return res;
      }
    }
    beta.push_back(b);
    for (auto& z : w) z /= b;
    Q.push_back(w);
  }
  res.steps = k;
  return res;
}

struct SolveResult {
  CVector x;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< ||b - A x|| / ||b||
  bool converged = false;
};

/// Orthonormal vectors spanning a subspace removed from a CG solve.
struct Deflation {
  std::vector<CVector> basis;

  void project_out(std::span<cplx> v) const {
    for (const auto& q : basis) axpy(-dot(q, v), q, v);
  }
};

/// Conjugate gradients for Hermitian positive definite A (on the complement of the deflation
/// space when one is given; b and x then live in that complement).
inline SolveResult conjugate_gradient(const LinearOperator& A, std::span<const cplx> b,
                                      double tol = 1e-12, std::size_t max_iter = 5000,
                                      const Deflation* defl = nullptr) {
  const std::size_t n = b.size();
  SolveResult out;
  out.x.assign(n, cplx{});
  CVector r(b.begin(), b.end());
  const double bn = norm2(r);
  if (defl) defl->project_out(r);
  if (bn == 0.0 || norm2(r) <= tol * bn) {
    out.converged = true;
    return out;
  }
  CVector p = r, Ap(n);
  double rr = std::pow(norm2(r), 2);
  for (std::size_t it = 0; it < max_iter; ++it) {
    A(p, Ap);
    if (defl) defl->project_out(Ap);
    const cplx pAp = dot(p, Ap);
    if (!(pAp.real() > 0.0)) throw NumericError("conjugate_gradient: operator not positive definite");
    const double a = rr / pAp.real();
    axpy(a, p, out.x);
    axpy(-a, Ap, r);
    const double rr_new = std::pow(norm2(r), 2);
    out.iterations = it + 1;
    if (std::sqrt(rr_new) <= tol * bn) {
      out.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t j = 0; j < n; ++j) p[j] = r[j] + beta * p[j];
  }
  // true residual
  CVector Ax(n);
  A(out.x, Ax);
  CVector bb(b.begin(), b.end());
  if (defl) {
    defl->project_out(bb);
    defl->project_out(Ax);
  }
  for (std::size_t j = 0; j < n; ++j) Ax[j] = bb[j] - Ax[j];
  out.residual = norm2(Ax) / bn;
  return out;
}

/// Restarted GMRES(m) with modified Gram-Schmidt and Givens rotations.
inline SolveResult gmres(const LinearOperator& A, std::span<const cplx> b, double tol = 1e-10,
                         std::size_t restart = 80, std::size_t max_iter = 4000) {
  const std::size_t n = b.size();
  SolveResult out;
  out.x.assign(n, cplx{});
  const double bn = norm2(b);
  if (bn == 0.0) {
    out.converged = true;
    return out;
  }
  CVector r(n), Ax(n);
  std::size_t total = 0;
  while (total < max_iter) {
    A(out.x, Ax);
    for (std::size_t j = 0; j < n; ++j) r[j] = b[j] - Ax[j];
    double beta = norm2(r);
    out.residual = beta / bn;
    if (out.residual <= tol) {
      out.converged = true;
      break;
    }
    const std::size_t m = std::min(restart, max_iter - total);
    std::vector<CVector> V(m + 1, CVector(n));
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m));
    std::vector<cplx> cs(m), sn(m), g(m + 1, cplx{});
    for (std::size_t j = 0; j < n; ++j) V[0][j] = r[j] / beta;
    g[0] = beta;
    std::size_t used = 0;
    for (std::size_t k = 0; k < m; ++k) {
      A(V[k], V[k + 1]);
      for (std::size_t i = 0; i <= k; ++i) {
        const cplx h = dot(V[i], V[k + 1]);
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = h;
        axpy(-h, V[i], V[k + 1]);
      }
      const double hn = norm2(V[k + 1]);
      H(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = hn;
      if (hn > 0.0)
        for (auto& z : V[k + 1]) z /= hn;
      for (std::size_t i = 0; i < k; ++i) {
        const auto ki = static_cast<Eigen::Index>(i);
        const auto kk = static_cast<Eigen::Index>(k);
        const cplx t = std::conj(cs[i]) * H(ki, kk) + std::conj(sn[i]) * H(ki + 1, kk);
        H(ki + 1, kk) = -sn[i] * H(ki, kk) + cs[i] * H(ki + 1, kk);
        H(ki, kk) = t;
      }
      const auto kk = static_cast<Eigen::Index>(k);
      const cplx a = H(kk, kk), bb = H(kk + 1, kk);
      const double den = std::sqrt(std::norm(a) + std::norm(bb));
      cs[k] = (den == 0.0) ? cplx(1.0) : a / den;
      sn[k] = (den == 0.0) ? cplx(0.0) : bb / den;
      H(kk, kk) = std::conj(cs[k]) * a + std::conj(sn[k]) * bb;
      H(kk + 1, kk) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      used = k + 1;
      ++total;
      if (std::abs(g[k + 1]) <= tol * bn || hn == 0.0) break;
    }
    // back substitution
    std::vector<cplx> y(used);
    for (std::size_t ii = used; ii-- > 0;) {
      cplx s = g[ii];
      for (std::size_t jj = ii + 1; jj < used; ++jj)
        s -= H(static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(jj)) * y[jj];
      y[ii] = s / H(static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(ii));
    }
    for (std::size_t i = 0; i < used; ++i) axpy(y[i], V[i], out.x);
  }
  out.iterations = total;
  A(out.x, Ax);
  for (std::size_t j = 0; j < n; ++j) r[j] = b[j] - Ax[j];
  out.residual = norm2(r) / bn;
  out.converged = out.residual <= tol * 1.0001;
  return out;
}

}  // namespace bolax
