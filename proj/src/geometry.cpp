#include "gaf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "gaf/errors.hpp"

namespace gaf {
namespace {

constexpr double kDiskSlack = 1e-12;

// Visits a points_per_axis^2 grid on [-R, R]^2 clipped to the disk, plus the
// boundary circle (the extremes of radial models sit there).
template <class Visit>
void for_each_grid_point(double radius, int points_per_axis, Visit&& visit) {
  const int m = std::max(points_per_axis, 2);
  for (int i = 0; i < m; ++i) {
    const double x = -radius + 2.0 * radius * i / (m - 1);
    for (int j = 0; j < m; ++j) {
      const double y = -radius + 2.0 * radius * j / (m - 1);
      if (x * x + y * y <= radius * radius) visit(cplx(x, y));
    }
  }
  for (int t = 0; t < 4 * m; ++t) {
    visit(std::polar(radius, 2.0 * std::numbers::pi * t / (4 * m)));
  }
}

void require_in_disk(const WeightModel& model, cplx x, const char* what) {
  if (!model.contains(x)) {
    std::ostringstream os;
    os << what << ": point " << x << " lies outside the truncation disk of radius "
       << model.truncation_radius();
    throw DomainError(os.str());
  }
}

}  // namespace

WeightModel WeightModel::bargmann_fock(double truncation_radius,
                                       double curvature_floor) {
  WeightModel m;
  m.weight_ = [](cplx z) { return std::norm(z); };
  m.laplacian_ = [](cplx) { return 4.0; };
  m.truncation_radius_ = truncation_radius;
  m.curvature_floor_ = curvature_floor;
  m.kind_ = WeightKind::BargmannFock;
  m.radial_ = true;
  m.coefficients_ = {1.0};
  m.validate();
  return m;
}

WeightModel WeightModel::radial_polynomial(std::vector<double> coefficients,
                                           double truncation_radius,
                                           double curvature_floor) {
  if (coefficients.empty()) {
    throw DomainError("radial polynomial weight needs at least one coefficient");
  }
  WeightModel m;
  // phi = sum_k c_k rho^k with rho = |z|^2; Laplacian(rho^k) = 4 k^2 rho^(k-1).
  m.weight_ = [c = coefficients](cplx z) {
    const double rho = std::norm(z);
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * rho + c[k];
    return acc * rho;
  };
  m.laplacian_ = [c = coefficients](cplx z) {
    const double rho = std::norm(z);
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
      const double kk = static_cast<double>(k + 1);
      acc = acc * rho + 4.0 * kk * kk * c[k];
    }
    return acc;
  };
  m.truncation_radius_ = truncation_radius;
  m.curvature_floor_ = curvature_floor;
  m.kind_ = WeightKind::RadialPolynomial;
  m.radial_ = true;
  m.coefficients_ = std::move(coefficients);
  m.validate();
  return m;
}

WeightModel WeightModel::custom(ScalarField weight, ScalarField laplacian,
                                double truncation_radius, double curvature_floor,
                                bool radial, Admissibility check) {
  WeightModel m;
  m.weight_ = std::move(weight);
  m.laplacian_ = std::move(laplacian);
  m.truncation_radius_ = truncation_radius;
  m.curvature_floor_ = curvature_floor;
  m.kind_ = WeightKind::Custom;
  m.radial_ = radial;
  if (check == Admissibility::Enforced) m.validate();
  return m;
}

bool WeightModel::contains(cplx z) const {
  return std::abs(z) <= truncation_radius_ * (1.0 + kDiskSlack) + kDiskSlack;
}

std::string WeightModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WeightKind::BargmannFock: os << "bargmann_fock"; break;
    case WeightKind::RadialPolynomial: {
      os << "radial_polynomial(";
      for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        os << (i ? "," : "") << coefficients_[i];
      }
      os << ")";
      break;
    }
    case WeightKind::Custom: os << "custom"; break;
  }
  os << " R=" << truncation_radius_ << " eps=" << curvature_floor_;
  return os.str();
}

void WeightModel::validate() const {
  if (!(truncation_radius_ > 0.0) || !std::isfinite(truncation_radius_)) {
    throw DomainError("truncation radius must be positive and finite");
  }
  if (!(curvature_floor_ > 0.0)) {
    throw DomainError("degenerate weight: curvature floor must be positive");
  }
  const double kmin = min_curvature_on_grid(*this);
  if (!(kmin >= curvature_floor_ * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "degenerate weight: curvature eigenvalue drops to " << kmin
       << " below the floor " << curvature_floor_ << " on the disk";
    throw DomainError(os.str());
  }
}

double curvature_eigenvalue(const WeightModel& model, cplx x) {
  require_in_disk(model, x, "curvature_eigenvalue");
  return 0.5 * model.laplacian_weight(x);
}

double weighted_distance_sq(const WeightModel& model, cplx x, cplx u, cplx u2) {
  return curvature_eigenvalue(model, x) * std::norm(u - u2);
}

double distance_comparison_constant(const WeightModel& model) {
  double sup_sqrt = 0.0;
  double sup_inv = 0.0;
  for_each_grid_point(model.truncation_radius(), 200, [&](cplx z) {
    const double r = std::sqrt(0.5 * model.laplacian_weight(z));
    sup_sqrt = std::max(sup_sqrt, r);
    sup_inv = std::max(sup_inv, 1.0 / r);
  });
  return std::max(sup_sqrt, sup_inv);
}

double chern_density(const WeightModel& model, cplx x) {
  require_in_disk(model, x, "chern_density");
  return model.laplacian_weight(x) / (4.0 * std::numbers::pi);
}

double min_curvature_on_grid(const WeightModel& model, int points_per_axis) {
  double kmin = std::numeric_limits<double>::infinity();
  for_each_grid_point(model.truncation_radius(), points_per_axis, [&](cplx z) {
    kmin = std::min(kmin, 0.5 * model.laplacian_weight(z));
  });
  return kmin;
}

TestForm TestForm::bump(double radius) {
  if (!(radius > 0.0)) throw DomainError("test form radius must be positive");
  TestForm f;
  const double r2 = radius * radius;
  f.value_ = [r2](cplx z) {
    const double t = std::norm(z) / r2;
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    return s * s * s * s;
  };
  // With g(rho) = (1 - rho/r^2)^4: Laplacian = 4 (g' + rho g'')
  //                                         = (16/r^2)(1-t)^2 (4t - 1).
  f.laplacian_ = [r2](cplx z) {
    const double t = std::norm(z) / r2;
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    return 16.0 / r2 * s * s * (4.0 * t - 1.0);
  };
  f.support_radius_ = radius;
  f.kind_ = TestFormKind::Bump;
  return f;
}

TestForm TestForm::disk_indicator(double radius) {
  if (!(radius > 0.0)) throw DomainError("test form radius must be positive");
  TestForm f;
  f.value_ = [r2 = radius * radius](cplx z) { return std::norm(z) <= r2 ? 1.0 : 0.0; };
  f.laplacian_ = [](cplx) -> double {
    throw DomainError("disk indicator has no Laplacian density");
  };
  f.support_radius_ = radius;
  f.kind_ = TestFormKind::DiskIndicator;
  return f;
}

TestForm TestForm::custom(ScalarField value, ScalarField laplacian,
                          double support_radius) {
  if (!(support_radius > 0.0)) throw DomainError("support radius must be positive");
  TestForm f;
  f.value_ = std::move(value);
  f.laplacian_ = std::move(laplacian);
  f.support_radius_ = support_radius;
  f.kind_ = TestFormKind::Custom;
  return f;
}

double TestForm::value(cplx z) const {
  if (std::abs(z) > support_radius_) return 0.0;
  return value_(z);
}

double TestForm::laplacian(cplx z) const {
  if (std::abs(z) > support_radius_) return 0.0;
  return laplacian_(z);
}

std::string TestForm::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case TestFormKind::Bump: os << "bump"; break;
    case TestFormKind::DiskIndicator: os << "disk_indicator"; break;
    case TestFormKind::Custom: os << "custom"; break;
  }
  os << " r=" << support_radius_;
  return os.str();
}

double testform_density(const TestForm& form, cplx x) {
  return form.laplacian(x) / (4.0 * std::numbers::pi);
}

}  // namespace gaf
