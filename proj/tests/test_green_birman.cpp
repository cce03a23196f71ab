#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "bolax/green_birman.hpp"
#include "bolax/quadrature.hpp"

using namespace bolax;

TEST(ExpIntegral, ValueAtOneMatchesQuadrature) {
  const double oracle = quad::right_tail([](double t) { return std::exp(-t) / t; }, 1.0, 1e-15);
  EXPECT_NEAR(oracle, 0.219384, 1e-6);
  EXPECT_NEAR(exp_integral_e1(1.0).real(), oracle, 1e-9);
  EXPECT_EQ(exp_integral_e1(1.0).imag(), 0.0);
}

TEST(ExpIntegral, BothBranchesAgreeWithQuadrature) {
  // E1(z) = exp(-z) int_0^inf exp(-z t)/(1 + t) dt for Re z > 0
  for (cplx z : {cplx(0.5, 0.3), cplx(3.9, -1.0), cplx(4.1, 2.0), cplx(10.0, 7.0)}) {
    const double re = quad::right_tail([&](double t) { return (std::exp(-z * t) / (1.0 + t)).real(); }, 0.0, 1e-15);
    const double im = quad::right_tail([&](double t) { return (std::exp(-z * t) / (1.0 + t)).imag(); }, 0.0, 1e-15);
    const cplx oracle = std::exp(-z) * cplx(re, im);
    EXPECT_LE(std::abs(exp_integral_e1(z) - oracle), 1e-10 * std::abs(oracle)) << z;
  }
}

TEST(ExpIntegral, AllSectorsAgreeWithQuadrature) {
  // E1(z) = exp(-z) int_0^inf exp(-t)/(z + t) dt off the negative real axis
  boost::math::quadrature::exp_sinh<double> rule;
  for (double r : {0.5, 5.0, 12.0, 45.0})
    for (double th : {-3.0, -2.0, -0.5, 0.0, 1.5, 2.9}) {
      const cplx z = std::polar(r, th);
      const double re = rule.integrate([&](double t) { return (std::exp(-t) / (z + t)).real(); }, 0.0, INFINITY, 1e-14);
      const double im = rule.integrate([&](double t) { return (std::exp(-t) / (z + t)).imag(); }, 0.0, INFINITY, 1e-14);
      const cplx oracle = std::exp(-z) * cplx(re, im);
      EXPECT_LE(std::abs(exp_integral_e1(z) - oracle), 1e-12 * std::abs(oracle)) << z;
    }
  for (double x : {1e7, 1e9, 1e26, 1e300}) EXPECT_NO_THROW(exp_integral_e1(cplx(0.0, -x))) << x;
}

TEST(ExpIntegral, LargeArgumentAsymptotics) {
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {10.0, 50.0, 200.0, 600.0}) {
    const double d = std::abs(x * std::exp(x) * exp_integral_e1(x).real() - 1.0);
    EXPECT_LT(d, prev);
    EXPECT_LE(d, 1.5 / x);
    prev = d;
  }
}

TEST(ExpIntegral, SchwarzReflection) {
  for (cplx z : {cplx(0.2, 1.0), cplx(-3.0, 0.5), cplx(6.0, -4.0), cplx(0.0, -20.0)})
    EXPECT_LE(std::abs(exp_integral_e1(std::conj(z)) - std::conj(exp_integral_e1(z))), 1e-14 * std::abs(exp_integral_e1(z)));
  EXPECT_THROW(exp_integral_e1(cplx(-1.0, 0.0)), DomainError);
  EXPECT_THROW(exp_integral_e1(cplx(0.0, 0.0)), DomainError);
}

TEST(Green, ConjugateSymmetry) {
  EXPECT_EQ(green_eval(1.0, -2.0), std::conj(green_eval(1.0, 2.0)));
  EXPECT_THROW(green_eval(1.0, 0.0), DomainError);
  EXPECT_THROW(green_eval(-1.0, 1.0), DomainError);
}

TEST(Green, ParsevalNorm) {
  // |G| is even; the origin singularity is logarithmic.
  auto g2 = [](double x) { return std::norm(green_eval(1.0, x)); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double inner = ts.integrate(g2, 0.0, 1.0, 1e-12);
  const double outer = quad::right_tail(g2, 1.0, 1e-13);
  EXPECT_NEAR(2.0 * (inner + outer), 1.0 / kTwoPi, 1e-6);
  EXPECT_DOUBLE_EQ(green_l2_norm_squared(1.0), 1.0 / kTwoPi);
}

TEST(Green, InverseDecay) {
  for (double E : {0.1, 1.0, 5.0})
    for (double x = 10.0; x < 1e6; x *= 3.0) {
      const double scaled = E * x * std::abs(green_eval(E, x));
      EXPECT_LE(scaled, 1.0 / kTwoPi * 1.5) << "E = " << E << " x = " << x;
    }
}

TEST(SplitR, Sandwich) {
  for (double E : {1e-4, 1e-3, 0.1, 1.0}) {
    const double R = split_R(E);
    EXPECT_GE(R, std::log((1.0 + E) / E));
    EXPECT_LE(R, std::log((2.0 + E) / E));
  }
  const double R = split_R(1e-3);
  EXPECT_GE(R, 6.9088);
  EXPECT_LE(R, 7.6014);
  const Cutoff chi = Cutoff::standard();
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate([&](double xi) { return 1.0 / (xi + 1e-3); }, 0.0, 1.0, 1e-14) +
                        ts.integrate([&](double xi) { return chi(xi) / (xi + 1e-3); }, 1.0, 2.0, 1e-14);
  EXPECT_NEAR(R, oracle, 1e-10);
}

TEST(AssembleK, ZeroPotentialIsZeroOperator) {
  const PhysicalGrid g = PhysicalGrid::make(64, -16.0, 16.0);
  const BSOperator K = assemble_K(PotentialSpec::zero(), g, 0.5);
  EXPECT_EQ(K.dense_K().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(hs_norm(K), 0.0);
}

TEST(AssembleK, RankOneSplitting) {
  const PhysicalGrid g = PhysicalGrid::make(128, -20.0, 20.0);
  const BSOperator K = assemble_K(PotentialSpec::soliton(1.0), g, 0.3);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(K.dense_L());
  lu.setThreshold(1e-12);
  EXPECT_EQ(lu.rank(), 1);
  EXPECT_LE((K.dense_K() - K.dense_M() - K.dense_L()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(assemble_K(PotentialSpec::gaussian(-1.0, 1.0), g, 0.3), PreconditionError);
}

TEST(AssembleK, SolitonTopEigenvalueIsOne) {
  // L_u has eigenvalue -1/2 for nu = 1, so 1 is an eigenvalue of K_{-1/2}.
  const BSOperator K = assemble_K(PotentialSpec::soliton(1.0), PhysicalGrid{}, 0.5);
  const LanczosResult r = top_eigenvalues(K, 0.5, 1);
  EXPECT_NEAR(r.values.front(), 1.0, 2e-3);
}

TEST(HsNorm, SolitonParseval) {
  const PhysicalGrid g = PhysicalGrid::make(16384, -400.0, 400.0);
  const PotentialSpec s = PotentialSpec::soliton(1.0);
  const double hs = hs_norm_T(s, -0.5, g);
  EXPECT_NEAR(hs, std::sqrt(2.0), 1e-2);
  EXPECT_NEAR(hs_norm_T_reference(std::sqrt(kTwoPi), -0.5), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hs_norm_T(s.with_coupling(2.0), -0.5, g), 2.0 * hs, 1e-12);
  EXPECT_EQ(hs_norm_T(PotentialSpec::zero(), -0.5, g), 0.0);
}

TEST(HsContinuity, DecreasesTowardZeroEnergy) {
  const PhysicalGrid g;
  const PotentialSpec s = PotentialSpec::soliton(1.0);
  EXPECT_EQ(hs_continuity(s, 0.0, g), 0.0);
  double prev = std::numeric_limits<double>::infinity();
  double prev_K = 0.0;
  for (double E : {0.1, 0.01, 0.001}) {
    const double v = hs_continuity(s, E, g);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(v, prev) << "E = " << E;
    prev = v;
    const double hk = hs_norm(assemble_K(s, g, E));
    EXPECT_GT(hk, prev_K);
    prev_K = hk;
  }
}

TEST(BsCount, SolitonAndZero) {
  const PhysicalGrid g;
  const PotentialSpec s = PotentialSpec::soliton(1.0);
  const DiscreteSpectrum ds = discrete_spectrum(s);
  const BSCount a = bs_count(s, 0.25, g, ds);
  EXPECT_EQ(a.count, 1u);
  EXPECT_EQ(a.cross_check, 1u);
  const BSCount b = bs_count(s, 0.75, g, ds);
  EXPECT_EQ(b.count, 0u);
  EXPECT_EQ(b.cross_check, 0u);
  for (double E : {0.1, 2.0}) {
    const BSCount z = bs_count(PotentialSpec::zero(), E, g);
    EXPECT_EQ(z.count, 0u);
    EXPECT_EQ(z.cross_check, 0u);
  }
}

TEST(Secular, ZeroPotentialIsPreconditionError) {
  EXPECT_THROW(secular_solve(PotentialSpec::zero(), 1e-3, PhysicalGrid{}), PreconditionError);
}

TEST(Secular, MatchesTopEigenvalueOfK) {
  const PotentialSpec weak = PotentialSpec::soliton(1.0).with_coupling(0.05);
  const SecularSolve s = secular_solve(weak, 1e-3, PhysicalGrid{});
  EXPECT_LE(s.relative_mismatch, 1e-6);
  EXPECT_LE(s.residual, 1e-12);
  EXPECT_LT(s.lambda0 * s.M_norm, 1.0);
  EXPECT_LT(s.second_K, 1.0 / s.lambda0);
}

TEST(Secular, LeadingOrderRatioDecreasesTowardOne) {
  const PotentialSpec weak = PotentialSpec::soliton(1.0).with_coupling(0.05);
  double prev = std::numeric_limits<double>::infinity();
  for (double E : {1e-2, 1e-3, 1e-4}) {
    const SecularSolve s = secular_solve(weak, E, PhysicalGrid{});
    EXPECT_GT(s.leading_order_ratio, 1.0);
    EXPECT_LT(s.leading_order_ratio, prev) << "E = " << E;
    prev = s.leading_order_ratio;
  }
}

TEST(Secular, CutoffIndependentRoot) {
  const PotentialSpec weak = PotentialSpec::soliton(1.0).with_coupling(0.05);
  SecularOptions wide;
  wide.chi = Cutoff::wide();
  const SecularSolve a = secular_solve(weak, 1e-2, PhysicalGrid{});
  const SecularSolve b = secular_solve(weak, 1e-2, PhysicalGrid{}, wide);
  EXPECT_NE(a.cutoff_id, b.cutoff_id);
  EXPECT_NEAR(a.lambda_root, b.lambda_root, 1e-8 * a.lambda_root);
}

TEST(CountBoundScan, ZeroPotential) {
  const CountBoundScan sc = count_bound_scan(PotentialSpec::zero(), {1e-2, 1e-3}, PhysicalGrid{});
  ASSERT_EQ(sc.rows.size(), 2u);
  for (const auto& r : sc.rows) {
    EXPECT_EQ(r.count, 0u);
    EXPECT_EQ(r.hs_squared, 0.0);
    EXPECT_EQ(r.bound_value, 0.0);
  }
}

TEST(CountBoundScan, WeakSolitonBand) {
  const PotentialSpec weak = PotentialSpec::soliton(1.0).with_coupling(0.05);
  const CountBoundScan sc = count_bound_scan(weak, {1e-2, 1e-3, 1e-4}, PhysicalGrid{});
  EXPECT_LE(sc.band_ratio, 1.5);
  EXPECT_GT(sc.hs_growth, 1.0);
  EXPECT_TRUE(sc.count_constant_in_tail);
  EXPECT_THROW(count_bound_scan(weak, {1e-3, 1e-2}, PhysicalGrid{}), ConfigurationError);
}
