#pragma once

// Bergman kernel, its diagonal, the normalized kernel Gamma_n and the
// covariance of the normalized Gaussian process, all evaluated from an
// orthonormal basis in weighted form.

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gaf/basis.hpp"

namespace gaf {

class KernelEvaluator {
 public:
  explicit KernelEvaluator(std::shared_ptr<const SectionBasis> basis);
  explicit KernelEvaluator(SectionBasis basis);

  const SectionBasis& basis() const { return *basis_; }
  std::shared_ptr<const SectionBasis> basis_ptr() const { return basis_; }
  const WeightModel& model() const { return basis_->model(); }
  int tensor_power() const { return basis_->tensor_power(); }

  /// |K_n(x,y)| in the metric h^n_x (x) (h^n_y)^*.
  double kernel_weighted_magnitude(cplx x, cplx y) const;
  /// K_n(x,x) = sum_j |f_j(x)|^2 e^{-n phi(x)}.
  double bergman_diag(cplx x) const;
  /// Gamma_n(x,y) in [0, 1].
  double normalized_kernel(cplx x, cplx y) const;
  /// beta_n(x,y) = sum_j fhat_j(x) conj(fhat_j(y)).
  cplx covariance(cplx x, cplx y) const;

  /// fhat(x): weighted basis values divided by sqrt(K_n(x,x)); unit norm.
  Eigen::VectorXcd normalized_values(cplx x) const;
  /// Rows are normalized_values at each point.
  Eigen::MatrixXcd normalized_value_matrix(const std::vector<cplx>& points) const;

 private:
  Eigen::VectorXcd weighted(cplx x) const;
  std::shared_ptr<const SectionBasis> basis_;
};

/// Clamps a computed Gamma to [0,1]; overshoot beyond 1e-9 is an invariant
/// violation (the basis is broken).
double clamp_normalized(double gamma);

struct AsymptoticsGrid {
  int base_rings = 2;       // base points on rings inside |x| <= eps0
  int base_angles = 6;
  int radial_steps = 12;    // |u| samples in (0, delta]
  int directions = 8;
  int region_rings = 8;     // off-diagonal region grid inside |x| <= 2 eps0
  int region_angles = 24;
};

struct AsymptoticsReport {
  int n = 0;
  int k = 1;
  double b0 = 0.0;
  double delta = 0.0;  // b0 sqrt(log n / n)
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double offdiag_max_scaled = 0.0;  // max Gamma_n n^k over dist >= delta
  std::vector<std::pair<double, double>> fit_points;  // (Psi^2, -4 log Gamma / n)
};

/// Smallest n >= 2 with b0 sqrt(log n / n) <= bound (the function decreases
/// for n >= 3).
int minimal_tensor_power(double b0, double bound);

AsymptoticsReport asymptotics_report(const KernelEvaluator& ev, int k, double b0,
                                     const AsymptoticsGrid& grid = {});

void to_json(nlohmann::json& j, const AsymptoticsReport& r);

}  // namespace gaf
