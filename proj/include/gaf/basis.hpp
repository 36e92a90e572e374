#pragma once

// Orthonormal bases of the weighted Bergman space at tensor power n,
// truncated to polynomials of degree <= D.
//
// Internally a basis is stored in a scaled form: with s_k = ||z^k|| the norm
// of the k-th monomial, the scaled monomials m_k(x) = x^k exp(-n phi(x)/2)/s_k
// stay in floating-point range for every degree we use, and
//   f_j(x) exp(-n phi(x)/2) = sum_k S[j][k] m_k(x),   C[j][k] = S[j][k] / s_k.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "gaf/geometry.hpp"

namespace gaf {

struct QuadratureSpec {
  int radial_panels = 64;
  int radial_nodes = 16;
  int angular_nodes = 0;  // 0 selects 4D + 8
  double rel_tol = 1e-10;
  int max_refinements = 3;
};

enum class MonomialOrder { Forward, Reversed };

class SectionBasis {
 public:
  int tensor_power() const { return n_; }
  int degree() const { return degree_; }
  int dimension() const { return degree_ + 1; }
  double gram_residual() const { return gram_residual_; }
  const WeightModel& model() const { return model_; }
  bool is_closed_form() const { return closed_form_; }
  bool is_diagonal() const { return diagonal_; }

  /// Monomial coefficient C[j][k] of f_j. Overflows to inf for huge degrees.
  cplx coefficient(int j, int k) const;
  Eigen::MatrixXcd coefficient_matrix() const;
  double log_monomial_norm(int k) const { return log_scale_[k]; }

  /// out[j] = f_j(x) exp(-n phi(x)/2), j = 0..D.
  void weighted_values(cplx x, std::span<cplx> out) const;
  std::vector<cplx> weighted_values(cplx x) const;

  /// Monomial coefficients of sum_j xi_j f_j.
  std::vector<cplx> polynomial_coefficients(std::span<const cplx> xi) const;

  /// Overwrites one scaled coefficient. Exists so audits can be shown to
  /// catch an inconsistent basis; never used on a production path.
  void perturb_coefficient_for_testing(int j, int k, cplx factor);

 private:
  friend SectionBasis build_basis_closed_form(const WeightModel&, int, int);
  friend SectionBasis build_basis_numeric(const WeightModel&, int, int,
                                          const QuadratureSpec&, MonomialOrder);

  explicit SectionBasis(WeightModel model) : model_(std::move(model)) {}
  void scaled_monomials(cplx x, std::span<cplx> out) const;
  void set_log_scale(std::vector<double> log_scale);

  WeightModel model_;
  int n_ = 0;
  int degree_ = 0;
  Eigen::MatrixXcd scaled_;
  std::vector<double> log_scale_;
  std::vector<double> ratio_;   // s_{k-1} / s_k
  std::vector<double> ratio4_;  // s_{k-4} / s_k
  bool closed_form_ = false;
  bool diagonal_ = false;
  double gram_residual_ = 0.0;
};

/// Integral of f(z) conj(g(z)) exp(-n phi(z)) over C, f and g given by
/// monomial coefficients. Verified against a doubled-resolution pass.
cplx weighted_inner_product(std::span<const cplx> f, std::span<const cplx> g,
                            const WeightModel& model, int n,
                            const QuadratureSpec& quad = {});

/// Bargmann-Fock only: C[j][j] = sqrt(n^(j+1) / (pi j!)).
SectionBasis build_basis_closed_form(const WeightModel& model, int n, int degree);

/// Cholesky orthonormalisation of the monomial Gram matrix.
SectionBasis build_basis_numeric(const WeightModel& model, int n, int degree,
                                 const QuadratureSpec& quad = {},
                                 MonomialOrder order = MonomialOrder::Forward);

/// Smallest D whose truncated diagonal kernel is within relative `tol` of the
/// untruncated one on |x| <= radius.
int truncation_degree(const WeightModel& model, int n, double radius, double tol,
                      int cap = 4096, const QuadratureSpec& quad = {});

/// Radius beyond which every monomial up to `degree` carries < 1e-16 of its
/// weighted mass.
double quadrature_radius(const WeightModel& model, int n, int degree);

}  // namespace gaf
