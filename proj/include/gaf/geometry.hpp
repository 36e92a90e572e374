#pragma once

// Flat weighted model geometries over the complex line.
//
// A model is a potential phi on C; the Hermitian metric on the trivial line
// bundle is h = exp(-phi), so a section f of the n-th tensor power has
// pointwise norm |f(z)|^2 exp(-n phi(z)). Everything lives in the closed disk
// of radius truncation_radius. Densities use the normalisation
// dd^c = (i/2pi) d dbar = (Laplacian / 4pi) * Lebesgue.

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace gaf {

using cplx = std::complex<double>;

enum class WeightKind { BargmannFock, RadialPolynomial, Custom };

enum class Admissibility { Enforced, Unchecked };

class WeightModel {
 public:
  using ScalarField = std::function<double(cplx)>;

  /// phi(z) = |z|^2.
  static WeightModel bargmann_fock(double truncation_radius,
                                   double curvature_floor = 2.0);

  /// phi(z) = sum_k coefficients[k-1] * |z|^(2k), k >= 1.
  static WeightModel radial_polynomial(std::vector<double> coefficients,
                                       double truncation_radius,
                                       double curvature_floor);

  /// Code-level registration of an arbitrary weight. `radial` promises
  /// phi(z) = phi(|z|), which lets the basis builder skip angular moments.
  static WeightModel custom(ScalarField weight, ScalarField laplacian,
                            double truncation_radius, double curvature_floor,
                            bool radial = false,
                            Admissibility check = Admissibility::Enforced);

  double weight(cplx z) const { return weight_(z); }
  double laplacian_weight(cplx z) const { return laplacian_(z); }
  double curvature_floor() const { return curvature_floor_; }
  double truncation_radius() const { return truncation_radius_; }
  WeightKind kind() const { return kind_; }
  bool is_radial() const { return radial_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  bool contains(cplx z) const;
  std::string describe() const;

 private:
  WeightModel() = default;
  void validate() const;

  ScalarField weight_;
  ScalarField laplacian_;
  double curvature_floor_ = 0.0;
  double truncation_radius_ = 0.0;
  WeightKind kind_ = WeightKind::Custom;
  bool radial_ = false;
  std::vector<double> coefficients_;
};

/// kappa(x) = Laplacian(phi)(x) / 2, the single curvature eigenvalue at m = 1.
double curvature_eigenvalue(const WeightModel& model, cplx x);

/// Psi_x(u, u2)^2 = kappa(x) |u - u2|^2.
double weighted_distance_sq(const WeightModel& model, cplx x, cplx u, cplx u2);

/// D1 with D1 |u - u2| >= Psi_x(u, u2) >= |u - u2| / D1 on the disk.
double distance_comparison_constant(const WeightModel& model);

/// Density of c1(L, h) against Lebesgue measure: Laplacian(phi) / 4pi.
double chern_density(const WeightModel& model, cplx x);

/// Smallest curvature eigenvalue on a uniform grid covering the disk.
double min_curvature_on_grid(const WeightModel& model, int points_per_axis = 200);

enum class TestFormKind { Bump, DiskIndicator, Custom };

// Real test function supported in the disk |z| <= support_radius.
class TestForm {
 public:
  using ScalarField = std::function<double(cplx)>;

  /// (1 - |z|^2/r^2)^4 inside the disk; C^3 across the boundary.
  static TestForm bump(double radius);

  /// Indicator of the closed disk. Not smooth: usable for zero counting only.
  static TestForm disk_indicator(double radius);

  static TestForm custom(ScalarField value, ScalarField laplacian,
                         double support_radius);

  double value(cplx z) const;
  double laplacian(cplx z) const;
  double support_radius() const { return support_radius_; }
  TestFormKind kind() const { return kind_; }
  bool is_smooth() const { return kind_ != TestFormKind::DiskIndicator; }
  std::string describe() const;

 private:
  TestForm() = default;

  ScalarField value_;
  ScalarField laplacian_;
  double support_radius_ = 0.0;
  TestFormKind kind_ = TestFormKind::Custom;
};

/// psi = Laplacian(test form) / 4pi, so that dd^c(form) = psi dLebesgue.
double testform_density(const TestForm& form, cplx x);

}  // namespace gaf
