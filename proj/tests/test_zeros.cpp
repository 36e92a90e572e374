#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaf/errors.hpp"
#include "gaf/zeros.hpp"

using namespace gaf;

namespace {

std::vector<cplx> from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
  std::vector<cplx> p{lead};
  for (cplx r : roots) {
    std::vector<cplx> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k + 1] += p[k];
      q[k] -= r * p[k];
    }
    p = q;
  }
  return p;
}

double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
  // greedy nearest matching; fine for well separated test roots
  double worst = 0.0;
  for (cplx x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) {
      return std::abs(u - x) < std::abs(v - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cplx> expand(const Divisor& d) {
  std::vector<cplx> out;
  for (const auto& p : d.points)
    for (int i = 0; i < p.multiplicity; ++i) out.push_back(p.location);
  return out;
}

}  // namespace

TEST(Zeros, PolynomialPartClosedForm) {
  const auto basis = std::make_shared<const SectionBasis>(
      build_basis_closed_form(WeightModel::bargmann_fock(1.0), 1, 3));
  const auto p = polynomial_part(make_section(basis, {0.0, 1.0, 0.0, 0.0}));
  EXPECT_NEAR(std::abs(p[1] - std::sqrt(1.0 / std::numbers::pi)), 0.0, 1e-15);
  EXPECT_EQ(p[0], cplx(0.0));
  EXPECT_EQ(p[2], cplx(0.0));
  const auto zero = polynomial_part(make_section(basis, {0.0, 0.0, 0.0, 0.0}));
  EXPECT_THROW(find_zeros(zero), DegenerateSectionError);
}

TEST(Zeros, SimpleCases) {
  const auto dz = find_zeros(std::vector<cplx>{0.0, 0.0, 3.0});
  ASSERT_EQ(dz.points.size(), 1u);
  EXPECT_EQ(dz.points[0].multiplicity, 2);
  EXPECT_LE(std::abs(dz.points[0].location), 1e-12);

  const auto d = find_zeros(from_roots({0.5, -0.5}));
  ASSERT_EQ(d.points.size(), 2u);
  EXPECT_LE(match_distance(expand(d), {0.5, -0.5}), 1e-12);
  for (const auto& p : d.points) EXPECT_EQ(p.multiplicity, 1);

  EXPECT_EQ(find_zeros(std::vector<cplx>{2.0}).total_multiplicity(), 0);
}

TEST(Zeros, DoubleRootCluster) {
  const auto d = find_zeros(from_roots({cplx(0.3, 0.2), cplx(0.3, 0.2), -1.0, cplx(0, 2)}));
  EXPECT_EQ(d.total_multiplicity(), 4);
  int doubles = 0;
  for (const auto& p : d.points) {
    if (p.multiplicity == 2) {
      ++doubles;
      EXPECT_LE(std::abs(p.location - cplx(0.3, 0.2)), 1e-6);
    }
  }
  EXPECT_EQ(doubles, 1);
}

TEST(Zeros, RandomPolynomialsBackwardStable) {
  for (int seed = 0; seed < 20; ++seed) {
    GaussianStream st(4242, seed);
    const int deg = 30 + 13 * seed;
    auto p = sample_std_complex_gaussians(st, deg + 1);
    // give it Bargmann-Fock-like dynamic range
    for (int k = 0; k <= deg; ++k) p[k] *= std::exp(0.5 * (k * std::log(80.0) - std::lgamma(k + 1.0)));
    const Divisor d = find_zeros(p);
    // numerically-zero leading terms are dropped before root finding
    double mx = 0.0;
    for (cplx c : p) mx = std::max(mx, std::abs(c));
    int top = deg;
    while (std::abs(p[top]) <= 1e-14 * mx) --top;
    EXPECT_EQ(d.total_multiplicity(), top);
    const std::vector<cplx> trimmed(p.begin(), p.begin() + top + 1);
    double norm = 0.0;
    for (cplx c : p) norm += std::norm(c);
    norm = std::sqrt(norm);
    for (const auto& pt : d.points) {
      cplx v(0.0);
      for (int k = deg; k >= 0; --k) v = v * pt.location + p[k];
      const double bound = norm * std::pow(1.0 + std::abs(pt.location), deg);
      EXPECT_LE(std::abs(v) / bound, 1e-12);
      EXPECT_LE(scaled_residual(trimmed, pt.location), 1e-12);
    }
  }
}

TEST(Zeros, ConjugationEquivariance) {
  GaussianStream st(1, 1);
  auto p = sample_std_complex_gaussians(st, 41);
  std::vector<cplx> q(p.size());
  std::transform(p.begin(), p.end(), q.begin(), [](cplx c) { return std::conj(c); });
  auto rp = expand(find_zeros(p));
  auto rq = expand(find_zeros(q));
  for (auto& r : rq) r = std::conj(r);
  EXPECT_LE(match_distance(rp, rq), 1e-8);
}

TEST(Zeros, LeadingTrimAndZeroRoots) {
  // p = z (z - 1) with a numerically-zero leading term
  std::vector<cplx> p{0.0, -1.0, 1.0, 1e-17};
  const auto d = find_zeros(p);
  EXPECT_EQ(d.total_multiplicity(), 2);
  EXPECT_LE(match_distance(expand(d), {0.0, 1.0}), 1e-12);
}

TEST(Zeros, DivisorPairing) {
  const auto form = TestForm::bump(0.8);
  EXPECT_DOUBLE_EQ(divisor_pairing(Divisor{{{0.0, 1}}}, form), 1.0);
  EXPECT_DOUBLE_EQ(divisor_pairing(Divisor{{{0.0, 2}}}, form), 2.0);
  EXPECT_EQ(divisor_pairing(Divisor{{{0.9, 1}, {cplx(0, -2), 3}}}, form), 0.0);
  EXPECT_EQ(Divisor{}.total_multiplicity(), 0);
}
