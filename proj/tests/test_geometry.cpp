#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gaf/errors.hpp"
#include "gaf/geometry.hpp"

using namespace gaf;

namespace {

constexpr double kPi = std::numbers::pi;

double fd_laplacian(const std::function<double(cplx)>& f, cplx z, double h) {
  return (f(z + h) + f(z - h) + f(z + cplx(0, h)) + f(z - cplx(0, h)) - 4.0 * f(z)) / (h * h);
}

}  // namespace

TEST(Geometry, CurvatureEigenvalue) {
  const auto bf = WeightModel::bargmann_fock(2.0);
  EXPECT_DOUBLE_EQ(curvature_eigenvalue(bf, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(curvature_eigenvalue(bf, cplx(1, 1)), 2.0);
  // phi = |z|^4 is degenerate at 0, so register it unchecked.
  const auto quartic = WeightModel::custom([](cplx z) { return std::norm(z) * std::norm(z); },
                                           [](cplx z) { return 16.0 * std::norm(z); }, 1.5, 1.0,
                                           true, Admissibility::Unchecked);
  EXPECT_DOUBLE_EQ(curvature_eigenvalue(quartic, 1.0), 8.0);
  EXPECT_THROW(curvature_eigenvalue(bf, cplx(3, 0)), DomainError);
}

TEST(Geometry, RadialPolynomialLaplacianMatchesFiniteDifference) {
  const auto m = WeightModel::radial_polynomial({1.0, 0.1, 0.02}, 1.5, 2.0);
  const std::function<double(cplx)> phi = [&](cplx z) { return m.weight(z); };
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.7, 0.4), cplx(1.1, -0.3)}) {
    EXPECT_NEAR(m.laplacian_weight(z), fd_laplacian(phi, z, 1e-3), 1e-5);
  }
}

TEST(Geometry, WeightedDistance) {
  const auto bf = WeightModel::bargmann_fock(1.0);
  EXPECT_NEAR(weighted_distance_sq(bf, 0.0, 0.0, 0.3), 0.18, 1e-15);
  EXPECT_EQ(weighted_distance_sq(bf, 0.2, cplx(0.1, 0.1), cplx(0.1, 0.1)), 0.0);
  EXPECT_DOUBLE_EQ(weighted_distance_sq(bf, 0.2, 0.1, cplx(0, 0.4)),
                   weighted_distance_sq(bf, 0.2, cplx(0, 0.4), 0.1));
}

TEST(Geometry, DistanceComparisonConstant) {
  EXPECT_NEAR(distance_comparison_constant(WeightModel::bargmann_fock(1.0)), std::sqrt(2.0),
              1e-14);
  const auto unit = WeightModel::custom([](cplx z) { return 0.5 * std::norm(z); },
                                        [](cplx) { return 2.0; }, 1.0, 1.0, true);
  EXPECT_NEAR(distance_comparison_constant(unit), 1.0, 1e-14);

  const auto m = WeightModel::radial_polynomial({1.0, 0.1}, 1.75, 2.0);
  const double d1 = distance_comparison_constant(m);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto point = [&] {
    cplx z;
    do z = cplx(u(rng), u(rng)); while (std::abs(z) > 1.0);
    return 1.75 * z;
  };
  for (int i = 0; i < 1000; ++i) {
    const cplx x = point(), a = point(), b = point();
    const double psi = std::sqrt(weighted_distance_sq(m, x, a, b));
    const double dist = std::abs(a - b);
    EXPECT_LE(psi, d1 * dist * (1 + 1e-12));
    EXPECT_GE(psi * (1 + 1e-12), dist / d1);
    EXPECT_GE(weighted_distance_sq(m, x, 0.0, a) * (1 + 1e-12),
              m.curvature_floor() * std::norm(a));
  }
}

TEST(Geometry, ChernDensity) {
  const auto bf = WeightModel::bargmann_fock(1.0);
  EXPECT_NEAR(chern_density(bf, cplx(0.3, -0.2)), 1.0 / kPi, 1e-15);
  const auto flat = WeightModel::custom([](cplx) { return 0.0; }, [](cplx) { return 0.0; }, 1.0,
                                        1.0, true, Admissibility::Unchecked);
  EXPECT_EQ(chern_density(flat, 0.5), 0.0);
  // n * int_{|z|<1} c1 = n
  const int n = 50;
  double acc = 0.0;
  const int m = 400;
  for (int i = 0; i < m; ++i) {
    const double r = (i + 0.5) / m;
    acc += 2.0 * kPi * r / m * chern_density(bf, r);
  }
  EXPECT_NEAR(n * acc, 50.0, 1e-10);
}

TEST(Geometry, DegenerateWeightRejected) {
  EXPECT_THROW(WeightModel::custom([](cplx z) { return std::norm(z) * std::norm(z); },
                                   [](cplx z) { return 16.0 * std::norm(z); }, 1.0, 0.5),
               DomainError);
  EXPECT_THROW(WeightModel::radial_polynomial({1.0}, 1.0, 2.5), DomainError);
  EXPECT_THROW(WeightModel::bargmann_fock(-1.0), DomainError);
  EXPECT_THROW(WeightModel::radial_polynomial({1.0, -0.5}, 1.5, 0.5), DomainError);
}

TEST(Geometry, ShippedModelsSatisfyCurvatureFloor) {
  for (const auto& m : {WeightModel::bargmann_fock(1.0), WeightModel::bargmann_fock(1.75),
                        WeightModel::radial_polynomial({1.0, 0.1}, 1.75, 2.0)}) {
    EXPECT_GE(min_curvature_on_grid(m, 200), m.curvature_floor());
  }
}

TEST(Geometry, TestFormDensity) {
  const auto quad = TestForm::custom([](cplx z) { return std::norm(z); },
                                     [](cplx) { return 4.0; }, 0.9);
  EXPECT_NEAR(testform_density(quad, 0.3), 1.0 / kPi, 1e-15);
  const auto bump = TestForm::bump(0.8);
  EXPECT_EQ(testform_density(bump, 0.85), 0.0);
  EXPECT_EQ(bump.value(cplx(0, 0.8)), 0.0);
  EXPECT_DOUBLE_EQ(bump.value(0.0), 1.0);

  const std::function<double(cplx)> v = [&](cplx z) { return bump.value(z); };
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const cplx z(-0.7 + 0.175 * i, -0.7 + 0.175 * j);
      if (std::abs(z) > 0.78) continue;
      // plain stencil carries ~2e-6 of its own h^2 error here; one Richardson
      // step removes it so the 1e-6 check measures the density alone
      const double fd = (4.0 * fd_laplacian(v, z, 5e-4) - fd_laplacian(v, z, 1e-3)) / 3.0;
      EXPECT_NEAR(testform_density(bump, z), fd / (4 * kPi), 1e-6);
    }
  }
  // divergence theorem: int psi = 0
  double acc = 0.0;
  const int m = 2000;
  for (int i = 0; i < m; ++i) {
    const double r = 0.8 * (i + 0.5) / m;
    acc += 2.0 * kPi * r * 0.8 / m * testform_density(bump, r);
  }
  EXPECT_NEAR(acc, 0.0, 1e-6);

  const auto disk = TestForm::disk_indicator(1.0);
  EXPECT_FALSE(disk.is_smooth());
  EXPECT_EQ(disk.value(0.999), 1.0);
  EXPECT_EQ(disk.value(1.001), 0.0);
  EXPECT_THROW(testform_density(disk, 0.5), DomainError);
}
