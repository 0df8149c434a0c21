#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypcm/errors.hpp"
#include "hypcm/sphere_grid.hpp"

using namespace hypcm;

namespace {

constexpr double kPi = std::numbers::pi;

// f = sin t cos p + 0.5 cos^2 t + 0.3 sin^2 t cos 2p with its exact frame
// gradient and Hessian.
double test_f(double t, double p) {
  return std::sin(t) * std::cos(p) + 0.5 * std::cos(t) * std::cos(t) + 0.3 * std::sin(t) * std::sin(t) * std::cos(2 * p);
}

void exact_jet(double t, double p, FrameVector& g, FrameMatrix& h) {
  const double ft = std::cos(t) * std::cos(p) - std::sin(t) * std::cos(t) + 0.6 * std::sin(t) * std::cos(t) * std::cos(2 * p);
  const double fp = -std::sin(t) * std::sin(p) - 0.6 * std::sin(t) * std::sin(t) * std::sin(2 * p);
  const double ftt = -std::sin(t) * std::cos(p) - std::cos(2 * t) + 0.6 * std::cos(2 * t) * std::cos(2 * p);
  const double fpp = -std::sin(t) * std::cos(p) - 1.2 * std::sin(t) * std::sin(t) * std::cos(2 * p);
  const double ftp = -std::cos(t) * std::sin(p) - 1.2 * std::sin(t) * std::cos(t) * std::sin(2 * p);
  const double st = std::sin(t);
  const double cot = std::cos(t) / st;
  g = {ft, fp / st};
  h = {ftt, (ftp - cot * fp) / st, fpp / (st * st) + cot * ft};
}

struct Errors {
  double grad = 0.0, hess_band = 0.0, hess_all = 0.0, hess_pole_rings = 0.0;
};

Errors operator_errors(int n_theta) {
  const auto g = SphereGrid::build(GridMode::FullS2, n_theta, 2 * n_theta);
  const auto f = g.sample(test_f);
  const auto G = covariant_grad(f, g);
  const auto H = covariant_hess(f, g);
  Errors e;
  for (int p = 0; p < g.size(); ++p) {
    FrameVector ge;
    FrameMatrix he;
    exact_jet(g.theta(p), g.phi(p), ge, he);
    e.grad = std::max({e.grad, std::abs(G[p].e1 - ge.e1), std::abs(G[p].e2 - ge.e2)});
    const double dh = std::max({std::abs(H[p].m11 - he.m11), std::abs(H[p].m12 - he.m12), std::abs(H[p].m22 - he.m22)});
    e.hess_all = std::max(e.hess_all, dh);
    if (std::abs(std::cos(g.theta(p))) < std::cos(kPi / 8)) e.hess_band = std::max(e.hess_band, dh);
    if (g.ring(p) == 0 || g.ring(p) == n_theta - 1) e.hess_pole_rings = std::max(e.hess_pole_rings, dh);
  }
  return e;
}

}  // namespace

TEST(SphereGrid, FullGridMeasure) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  EXPECT_EQ(g.size(), 8192);
  EXPECT_NEAR(integrate(ScalarField(g.size(), 1.0), g), 4 * kPi, 1e-10);
}

TEST(SphereGrid, AxisymmetricMeasure) {
  const auto g = SphereGrid::build(GridMode::Axisymmetric, 256);
  EXPECT_EQ(g.size(), 256);
  EXPECT_NEAR(integrate(ScalarField(g.size(), 1.0), g), 4 * kPi, 1e-10);
}

TEST(SphereGrid, HigherDimensionalMeasure) {
  for (int n = 2; n <= 5; ++n) {
    const auto g = SphereGrid::build(GridMode::Axisymmetric, 40, 0, n);
    EXPECT_NEAR(integrate(ScalarField(g.size(), 1.0), g), sphere_measure(n), 1e-12) << n;
  }
  EXPECT_NEAR(sphere_measure(3), 2 * kPi * kPi, 1e-12);
}

TEST(SphereGrid, ConfigurationErrors) {
  EXPECT_THROW(SphereGrid::build(GridMode::FullS2, 8, 16), ConfigError);
  EXPECT_THROW(SphereGrid::build(GridMode::FullS2, 16, 31), ConfigError);
  EXPECT_THROW(SphereGrid::build(GridMode::FullS2, 16, 32, 3), ConfigError);
  EXPECT_THROW(SphereGrid::build(GridMode::Axisymmetric, 16, 0, 1), ConfigError);
}

TEST(SphereGrid, PoleContinuationIsAntipodal) {
  const auto g = SphereGrid::build(GridMode::FullS2, 16, 32);
  const int p = g.index(0, 3);
  EXPECT_EQ(g.neighbor(p, -1, 0), g.index(0, 19));
  EXPECT_EQ(g.neighbor(p, -1, 1), g.index(0, 20));
  const int q = g.index(15, 30);
  EXPECT_EQ(g.neighbor(q, 1, 0), g.index(15, 14));
  EXPECT_EQ(g.neighbor(q, 0, 2), g.index(15, 0));
  const auto a = SphereGrid::build(GridMode::Axisymmetric, 16);
  EXPECT_EQ(a.neighbor(0, -1, 0), 0);
  EXPECT_EQ(a.neighbor(15, 1, 0), 15);
}

TEST(SphereGrid, StencilIsSortedAndContainsNode) {
  const auto g = SphereGrid::build(GridMode::FullS2, 16, 32);
  for (int p : {0, 17, 200, g.size() - 1}) {
    const auto s = g.stencil(p);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_NE(std::find(s.begin(), s.end(), p), s.end());
    EXPECT_EQ(s.size(), 9u);
  }
}

TEST(CovariantGrad, ConstantFieldIsZero) {
  const auto g = SphereGrid::build(GridMode::FullS2, 16, 32);
  for (const auto& v : covariant_grad(ScalarField(g.size(), 2.5), g)) {
    EXPECT_EQ(v.e1, 0.0);
    EXPECT_EQ(v.e2, 0.0);
  }
}

TEST(CovariantGrad, ZHarmonicMagnitude) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  const auto G = covariant_grad(g.sample([](double t, double) { return std::cos(t); }), g);
  const double h = g.h_theta();
  for (int p = 0; p < g.size(); ++p)
    EXPECT_NEAR(std::hypot(G[p].e1, G[p].e2), std::abs(std::sin(g.theta(p))), h * h);
}

TEST(CovariantGrad, XHarmonicSquaredNorm) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  const auto G = covariant_grad(g.sample([](double t, double p) { return std::sin(t) * std::cos(p); }), g);
  const double h = g.h_theta();
  for (int p = 0; p < g.size(); ++p) {
    const double t = g.theta(p), f = g.phi(p);
    const double exact = std::cos(t) * std::cos(t) * std::cos(f) * std::cos(f) + std::sin(f) * std::sin(f);
    EXPECT_NEAR(G[p].e1 * G[p].e1 + G[p].e2 * G[p].e2, exact, h * h);
  }
}

TEST(CovariantHess, ZHarmonic) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  const auto H = covariant_hess(g.sample([](double t, double) { return std::cos(t); }), g);
  const double h = g.h_theta();
  for (int p = 0; p < g.size(); ++p) {
    const double c = std::cos(g.theta(p));
    // Pole rings carry an O(h) truncation term from cot(theta) D_theta.
    const double tol = (g.ring(p) == 0 || g.ring(p) == 63) ? h : h * h;
    EXPECT_NEAR(H[p].m11, -c, tol);
    EXPECT_NEAR(H[p].m12, 0.0, 1e-12);
    EXPECT_NEAR(H[p].m22, -c, tol);
  }
}

TEST(CovariantHess, ConstantFieldIsZero) {
  const auto g = SphereGrid::build(GridMode::FullS2, 16, 32);
  for (const auto& m : covariant_hess(ScalarField(g.size(), -1.0), g)) {
    EXPECT_EQ(m.m11, 0.0);
    EXPECT_EQ(m.m12, 0.0);
    EXPECT_EQ(m.m22, 0.0);
  }
}

TEST(CovariantHess, LaplaceEigenvalue) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  const auto f = g.sample([](double t, double p) { return std::sin(t) * std::cos(p); });
  const auto lap = laplacian(f, g);
  const double h = g.h_theta();
  for (int p = 0; p < g.size(); ++p) {
    const double tol = (g.ring(p) == 0 || g.ring(p) == 63) ? h : 2 * h * h;
    EXPECT_NEAR(lap[p], -2 * f[p], tol);
  }
}

TEST(CovariantOperators, SecondOrderConvergence) {
  const Errors coarse = operator_errors(64);
  const Errors fine = operator_errors(128);
  EXPECT_GE(coarse.grad / fine.grad, 3.5);
  EXPECT_GE(std::log2(coarse.grad / fine.grad), 1.8);
  EXPECT_GE(coarse.hess_band / fine.hess_band, 3.5);
  EXPECT_GE(std::log2(coarse.hess_band / fine.hess_band), 1.8);
}

TEST(CovariantOperators, PoleRingsAreFirstOrder) {
  const Errors coarse = operator_errors(64);
  const Errors fine = operator_errors(128);
  EXPECT_EQ(fine.hess_all, fine.hess_pole_rings);
  EXPECT_GE(coarse.hess_pole_rings / fine.hess_pole_rings, 1.8);
  EXPECT_LE(fine.hess_pole_rings, 2.0 * kPi / 128);
}

TEST(CovariantOperators, AxisymmetricMatchesFullGrid) {
  const auto full = SphereGrid::build(GridMode::FullS2, 32, 64);
  const auto axi = SphereGrid::build(GridMode::Axisymmetric, 32);
  auto shape = [](double t, double) { return 1.0 + 0.1 * std::cos(t) + 0.05 * std::cos(2 * t); };
  const auto ff = full.sample(shape);
  const auto fa = axi.sample(shape);
  const auto Gf = covariant_grad(ff, full);
  const auto Hf = covariant_hess(ff, full);
  const auto Ga = covariant_grad(fa, axi);
  const auto Ha = covariant_hess(fa, axi);
  for (int p = 0; p < full.size(); ++p) {
    const int i = full.ring(p);
    EXPECT_NEAR(Gf[p].e1, Ga[i].e1, 1e-12);
    EXPECT_NEAR(Gf[p].e2, 0.0, 1e-12);
    EXPECT_NEAR(Hf[p].m11, Ha[i].m11, 1e-10);
    EXPECT_NEAR(Hf[p].m12, 0.0, 1e-10);
    EXPECT_NEAR(Hf[p].m22, Ha[i].m22, 1e-10);
  }
}

TEST(Integrate, Examples) {
  const auto g = SphereGrid::build(GridMode::FullS2, 64, 128);
  const double h = g.h_theta();
  EXPECT_NEAR(integrate(g.sample([](double t, double) { return std::cos(t) * std::cos(t); }), g), 4 * kPi / 3, h * h);
  EXPECT_NEAR(integrate(ScalarField(g.size(), 1.0), g, northern_hemisphere_mask(g)), 2 * kPi, h * h);
  EXPECT_NEAR(integrate(ScalarField(g.size(), 1.0), g, complement(northern_hemisphere_mask(g))), 2 * kPi, h * h);
}

TEST(Integrate, MaskSizeMismatchFails) {
  const auto g = SphereGrid::build(GridMode::FullS2, 16, 32);
  EXPECT_THROW(integrate(ScalarField(g.size(), 1.0), g, NodeMask(3, true)), DomainError);
  EXPECT_THROW(covariant_grad(ScalarField(3, 1.0), g), DomainError);
}

TEST(Integrate, AxisymmetricAgreesWithFullGrid) {
  const auto full = SphereGrid::build(GridMode::FullS2, 48, 96);
  const auto axi = SphereGrid::build(GridMode::Axisymmetric, 48);
  auto f = [](double t, double) { return std::exp(std::cos(t)); };
  EXPECT_NEAR(integrate(full.sample(f), full), integrate(axi.sample(f), axi), 1e-12);
}
