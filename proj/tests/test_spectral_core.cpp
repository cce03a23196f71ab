#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bolax/quadrature.hpp"
#include "bolax/spectral_core.hpp"

using namespace bolax;

namespace {

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Whole-line integral of exp(-i x xi) f(x) by adaptive quadrature.
cplx quad_transform(const std::function<double(double)>& f, double xi) {
  const double re = quad::whole_line([&](double x) { return f(x) * std::cos(x * xi); }, {-10.0, 0.0, 10.0}, 1e-14);
  const double im = quad::whole_line([&](double x) { return -f(x) * std::sin(x * xi); }, {-10.0, 0.0, 10.0}, 1e-14);
  return {re, im};
}

}  // namespace

TEST(Grid, Nodes) {
  const PhysicalGrid g = PhysicalGrid::make(8, -4.0, 4.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  EXPECT_DOUBLE_EQ(g.x(0), -4.0);
  EXPECT_DOUBLE_EQ(g.x(7), 3.0);
  EXPECT_DOUBLE_EQ(g.frequency(1), kTwoPi / 8.0);
  EXPECT_LT(g.frequency(5), 0.0);
  EXPECT_THROW(PhysicalGrid::make(6, -1.0, 1.0), ConfigurationError);
  EXPECT_THROW(PhysicalGrid::make(8, 1.0, -1.0), ConfigurationError);
}

TEST(FourierForward, GaussianMatchesClosedForm) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -40.0, 40.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  const FourierField fh = fourier_forward(f);
  double err = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double xi = fh.frequency(k);
    err = std::max(err, std::abs(fh.values[k] - std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi)));
  }
  EXPECT_LE(err, 1e-10);
}

TEST(FourierForward, GaussianAgreesWithQuadratureOracle) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -40.0, 40.0);
  auto gauss = [](double x) { return std::exp(-0.5 * x * x); };
  const FourierField fh = fourier_forward(ComplexField::sample(g, gauss));
  for (std::size_t k : {0u, 3u, 17u, 40u, 1000u}) {
    const cplx q = quad_transform(gauss, fh.frequency(k));
    EXPECT_LE(std::abs(fh.values[k] - q), 1e-10) << "k = " << k;
  }
}

TEST(FourierForward, ZeroIsZero) {
  const PhysicalGrid g = PhysicalGrid::make(256, -10.0, 10.0);
  const FourierField fh = fourier_forward(ComplexField::sample(g, [](double) { return 0.0; }));
  for (const auto& z : fh.values) EXPECT_EQ(z, cplx{});
}

TEST(FourierForward, SolitonWithAlgebraicTails) {
  const PhysicalGrid g = PhysicalGrid::make(8192, -400.0, 400.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return 2.0 / (1.0 + x * x); });
  TransformOptions opt;
  opt.extension = Extension::algebraic_tails;
  const FourierField fh = fourier_forward(f, opt);
  double err = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double xi = fh.frequency(k);
    if (std::abs(xi) > 20.0) continue;
    err = std::max(err, std::abs(fh.values[k] - kTwoPi * std::exp(-std::abs(xi))));
  }
  EXPECT_LE(err, 1e-8);
}

TEST(FourierForward, RoundTrip) {
  const PhysicalGrid g = PhysicalGrid::make(512, -30.0, 30.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + x); });
  const ComplexField back = fourier_inverse(fourier_forward(f));
  EXPECT_LE(max_diff(f.values, back.values), 1e-13);
}

TEST(HilbertTransform, LorentzianPartialFractions) {
  // 1/(1+x^2) = (1/2i)[1/(x-i) - 1/(x+i)]; H multiplies the H+ part by -i and the H- part by +i.
  const PhysicalGrid g = PhysicalGrid::make(8192, -400.0, 400.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return 1.0 / (1.0 + x * x); });
  TransformOptions opt;
  opt.extension = Extension::algebraic_tails;
  const ComplexField h = hilbert_transform(f, opt);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double x = g.x(j);
    err = std::max(err, std::abs(h.values[j] - x / (1.0 + x * x)));
  }
  EXPECT_LE(err, 1e-8);
}

TEST(HilbertTransform, RealEvenGivesRealOdd) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -32.0, 32.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-x * x / 4.0); });
  const ComplexField h = hilbert_transform(f);
  for (std::size_t j = 1; j < g.n_points; ++j) {
    EXPECT_LE(std::abs(h.values[j].imag()), 1e-14);
    EXPECT_NEAR(h.values[j].real(), -h.values[g.n_points - j].real(), 1e-13);
  }
}

TEST(HilbertTransform, ZeroIsZero) {
  const PhysicalGrid g = PhysicalGrid::make(64, -8.0, 8.0);
  const ComplexField h = hilbert_transform(ComplexField::sample(g, [](double) { return 0.0; }));
  EXPECT_EQ(h.max_abs(), 0.0);
}

TEST(CauchyProject, LowerHalfPlanePole) {
  const PhysicalGrid g = PhysicalGrid::make(8192, -400.0, 400.0);
  std::vector<cplx> v(g.n_points);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = 1.0 / cplx(g.x(j), 1.0);
  const ComplexField f(g, v);
  TransformOptions opt;
  opt.extension = Extension::algebraic_tails;
  const ComplexField p = cauchy_project(f, Sign::plus, opt);
  const ComplexField m = cauchy_project(f, Sign::minus, opt);
  EXPECT_LE(max_diff(p.values, f.values), 1e-8);
  EXPECT_LE(m.max_abs(), 1e-8);
}

TEST(CauchyProject, RealZeroMeanInputConjugateSymmetry) {
  // the xi = 0 bin belongs to C+, so the symmetry needs zero mean
  const PhysicalGrid g = PhysicalGrid::make(1024, -32.0, 32.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-(x - 1.0) * (x - 1.0)) * (x - 1.0) + std::exp(-x * x) * std::sin(3.0 * x); });
  const ComplexField p = cauchy_project(f, Sign::plus);
  const ComplexField m = cauchy_project(f, Sign::minus);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) err = std::max(err, std::abs(m.values[j] - std::conj(p.values[j])));
  EXPECT_LE(err, 1e-12);
}

TEST(CauchyProject, CosineSplitsInHalves) {
  const PhysicalGrid g = PhysicalGrid::make(256, 0.0, kTwoPi);
  const double w = 5.0;
  const ComplexField f = ComplexField::sample(g, [&](double x) { return std::cos(w * x); });
  const ComplexField p = cauchy_project(f, Sign::plus);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) err = std::max(err, std::abs(p.values[j] - 0.5 * std::exp(kI * w * g.x(j))));
  EXPECT_LE(err, 1e-13);
}

TEST(ProjectionIdentity, GaussianPair) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -40.0, 40.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  for (Sign s : {Sign::plus, Sign::minus}) {
    EXPECT_LE(projection_identity_residual(f, f, s), 1e-9);
    EXPECT_LE(projection_product_residual(f, f, s), 1e-9);
  }
}

TEST(ProjectionIdentity, ZeroFieldExact) {
  const PhysicalGrid g = PhysicalGrid::make(256, -20.0, 20.0);
  const ComplexField z = ComplexField::sample(g, [](double) { return 0.0; });
  const ComplexField h = ComplexField::sample(g, [](double x) { return std::exp(-x * x) * x; });
  EXPECT_EQ(projection_identity_residual(z, h, Sign::plus), 0.0);
  EXPECT_EQ(projection_identity_residual(z, h, Sign::minus), 0.0);
}

TEST(ProjectionIdentity, SeededBandLimitedPairs) {
  const PhysicalGrid g = PhysicalGrid::make(512, -25.0, 25.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  auto random_field = [&] {
    std::vector<cplx> c(g.n_points, cplx{});
    for (std::size_t k = 1; k < g.n_points / 8; ++k) {
      c[k] = cplx(nd(rng), nd(rng));
      c[g.n_points - k] = cplx(nd(rng), nd(rng));
    }
    // synthesize on the grid directly: f(x_j) = sum_k c_k exp(i k 2 pi j / n) / n
    std::vector<cplx> v(g.n_points, cplx{});
    for (std::size_t j = 0; j < g.n_points; ++j)
      for (std::size_t k = 0; k < g.n_points; ++k)
        if (c[k] != cplx{}) v[j] += c[k] * std::exp(kI * (kTwoPi * static_cast<double>(j * k) / g.n_points));
    return ComplexField(g, v);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexField f = random_field(), h = random_field();
    const double scale = f.max_abs() * h.max_abs();
    for (Sign s : {Sign::plus, Sign::minus}) {
      EXPECT_LE(projection_identity_residual(f, h, s) / scale, 1e-9);
      EXPECT_LE(projection_product_residual(f, h, s) / scale, 1e-9);
    }
  }
}

TEST(Norms, ParsevalOnGaussian) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -40.0, 40.0);
  const ComplexField f = ComplexField::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  EXPECT_NEAR(l2_norm_squared(f), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(l2_norm_squared(fourier_forward(f)), std::sqrt(kPi), 1e-12);
}

TEST(ComplexField, RejectsNonFinite) {
  const PhysicalGrid g = PhysicalGrid::make(4, -1.0, 1.0);
  EXPECT_THROW(ComplexField(g, {1.0, NAN, 0.0, 0.0}), Error);
  EXPECT_THROW(ComplexField(g, {1.0, 0.0}), ConfigurationError);
}
