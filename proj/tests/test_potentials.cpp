#include <gtest/gtest.h>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bolax/potentials.hpp"
#include "bolax/quadrature.hpp"

using namespace bolax;

namespace {

// Ooura's double-exponential rule for oscillatory half-line integrals, on even and odd parts.
cplx quad_transform(const PotentialSpec& s, double xi) {
  if (xi == 0.0) return quad::whole_line([&](double x) { return s(x); }, s.features(), 1e-13);
  const double w = std::abs(xi);
  boost::math::quadrature::ooura_fourier_cos<double> oc;
  boost::math::quadrature::ooura_fourier_sin<double> os;
  const double re = oc.integrate([&](double x) { return s(x) + s(-x); }, w).first;
  const double im = -os.integrate([&](double x) { return s(x) - s(-x); }, w).first;
  return {re, xi > 0.0 ? im : -im};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Sample, PointValues) {
  EXPECT_DOUBLE_EQ(PotentialSpec::soliton(1.0)(0.0), 2.0);
  EXPECT_DOUBLE_EQ(PotentialSpec::gaussian(1.0, 1.0)(0.0), 1.0);
  const PotentialSpec two = PotentialSpec::multi_soliton({{1.0, -20.0}, {2.0, 20.0}});
  EXPECT_NEAR(two(-20.0), 2.0 + 2.0 * 2.0 / (1.0 + 4.0 * 1600.0), 1e-3);
  EXPECT_NEAR(two(-20.0), 2.0 + 4.0 / 6401.0, 1e-15);
}

TEST(Sample, OnGridIsReal) {
  const PhysicalGrid g = PhysicalGrid::make(64, -10.0, 10.0);
  const ComplexField f = sample(PotentialSpec::sech2(1.5, 2.0), g);
  for (std::size_t j = 0; j < g.n_points; ++j) {
    EXPECT_EQ(f.values[j].imag(), 0.0);
    EXPECT_DOUBLE_EQ(f.values[j].real(), 1.5 / std::pow(std::cosh(g.x(j) / 2.0), 2));
  }
}

TEST(FourierExact, SolitonValues) {
  const PotentialSpec s = PotentialSpec::soliton(1.0);
  EXPECT_NEAR(std::abs(fourier_exact(s, 0.0) - kTwoPi), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(fourier_exact(s, 1.0) - kTwoPi * std::exp(-1.0)), 0.0, 1e-14);
}

TEST(FourierExact, GaussianAtZero) {
  EXPECT_NEAR(fourier_exact(PotentialSpec::gaussian(1.0, 1.0), 0.0).real(), std::sqrt(kTwoPi), 1e-14);
}

TEST(FourierExact, AgreesWithQuadratureOracle) {
  const std::vector<PotentialSpec> specs{
      PotentialSpec::soliton(0.7, 1.3), PotentialSpec::gaussian(1.2, 2.0), PotentialSpec::sech2(0.8, 1.5),
      PotentialSpec::multi_soliton({{1.0, -3.0}, {2.0, 4.0}}), PotentialSpec::soliton(1.0).with_coupling(0.3)};
  for (const auto& s : specs)
    for (double xi : {0.0, 0.4, 1.0, 2.5, -1.7}) {
      const cplx q = quad_transform(s, xi);
      EXPECT_LE(std::abs(fourier_exact(s, xi) - q), 1e-8 * (1.0 + std::abs(q)))
          << family_name(s.family) << " xi = " << xi;
    }
}

TEST(FourierMultiples, SampledLinearMatchesQuadrature) {
  std::vector<double> x, u;
  for (int j = -400; j <= 400; ++j) {
    x.push_back(0.05 * j);
    u.push_back(std::exp(-0.5 * x.back() * x.back()));
  }
  const PotentialSpec s = PotentialSpec::from_samples(x, u);
  const auto m = fourier_multiples(s, 0.25, 8);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double xi = 0.25 * static_cast<double>(k);
    // exact transform of the piecewise-linear interpolant ~ Gaussian transform to O(h^2)
    EXPECT_NEAR(std::abs(m[k] - std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi)), 0.0, 1e-3);
  }
}

TEST(Norms, Soliton) {
  const PhysicalGrid g;
  const PotentialNorms n = norms(PotentialSpec::soliton(1.0), g);
  EXPECT_DOUBLE_EQ(n.linf, 2.0);
  EXPECT_NEAR(n.l1, kTwoPi, 1e-6);
  EXPECT_NEAR(n.l2 * n.l2, kTwoPi, 1e-6);
}

TEST(Norms, Zero) {
  const PotentialNorms n = norms(PotentialSpec::zero(), PhysicalGrid{});
  EXPECT_EQ(n.l1, 0.0);
  EXPECT_EQ(n.l2, 0.0);
  EXPECT_EQ(n.linf, 0.0);
  EXPECT_EQ(n.xl2, 0.0);
}

TEST(Norms, CouplingHomogeneity) {
  const PhysicalGrid g = PhysicalGrid::make(1024, -500.0, 500.0);
  const PotentialNorms a = norms(PotentialSpec::gaussian(1.0, 1.0), g);
  const PotentialNorms b = norms(PotentialSpec::gaussian(1.0, 1.0).with_coupling(0.5), g);
  EXPECT_NEAR(b.l1, 0.5 * a.l1, 1e-12);
  EXPECT_NEAR(b.l2, 0.5 * a.l2, 1e-12);
  EXPECT_NEAR(b.xl2, 0.5 * a.xl2, 1e-12);
  EXPECT_NEAR(b.linf, 0.5 * a.linf, 1e-15);
}

TEST(PositivePart, Cases) {
  const std::vector<double> pos{0.0, 1.0, 2.0};
  EXPECT_EQ(positive_part(pos), pos);
  std::vector<double> neg;
  for (int j = -10; j <= 10; ++j) neg.push_back(-std::exp(-0.1 * j * j));
  for (double v : positive_part(neg)) EXPECT_EQ(v, 0.0);

  const PotentialSpec sol = PotentialSpec::soliton(1.0);
  const PotentialSpec dip = PotentialSpec::soliton(1.0, 10.0);
  std::vector<double> xs, u;
  for (int j = -200; j <= 200; ++j) {
    xs.push_back(0.1 * j);
    u.push_back(sol(xs.back()) - dip(xs.back()));
  }
  const auto p = positive_part(u);
  for (std::size_t j = 0; j < xs.size(); ++j) EXPECT_EQ(p[j], std::max(0.0, sol(xs[j]) - dip(xs[j])));
}

TEST(FromFile, ReadsCsvWithHeaderAndComments) {
  const auto p = temp_file("bolax_pot_ok.csv", "# comment\nx,u\n-1,0\n0,1\n1,0\n");
  const PotentialSpec s = PotentialSpec::from_file(p.string());
  EXPECT_DOUBLE_EQ(s(0.0), 1.0);
  EXPECT_DOUBLE_EQ(s(0.5), 0.5);
  EXPECT_DOUBLE_EQ(s(3.0), 0.0);
}

TEST(FromFile, Errors) {
  EXPECT_THROW(PotentialSpec::from_file("/nonexistent/u.csv"), InputError);
  const auto bad = temp_file("bolax_pot_bad.csv", "x,u\n0,1\n1,abc\n");
  EXPECT_THROW(PotentialSpec::from_file(bad.string()), InputError);
  const auto unsorted = temp_file("bolax_pot_unsorted.csv", "0,1\n2,1\n1,0\n");
  EXPECT_THROW(PotentialSpec::from_file(unsorted.string()), Error);
}

TEST(Validation, RejectsBadParameters) {
  EXPECT_THROW(PotentialSpec::soliton(-1.0).validate(), ConfigurationError);
  EXPECT_THROW(PotentialSpec::gaussian(1.0, 0.0).validate(), ConfigurationError);
  EXPECT_THROW(PotentialSpec::multi_soliton({}).validate(), ConfigurationError);
  EXPECT_THROW(PotentialSpec::soliton(1.0).with_coupling(NAN), ConfigurationError);
}

TEST(Scaling, SolitonFamilyClosed) {
  const PotentialSpec s = PotentialSpec::soliton(1.0, 2.0).scaled(2.0);
  for (double x : {-1.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(s(x), 2.0 * PotentialSpec::soliton(1.0, 2.0)(2.0 * x), 1e-14);
}

TEST(FamilyNames, RoundTrip) {
  for (Family f : {Family::zero, Family::soliton, Family::multi_soliton, Family::gaussian, Family::sech2,
                   Family::from_file, Family::from_samples})
    EXPECT_EQ(family_from_name(family_name(f)), f);
}
