#pragma once

// Smooth linear statistics of zero divisors, computed by direct zero
// summation and by the Poincare-Lelong log-integral, plus the covariance
// integral conditions and the normality experiment built on them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaf/basis.hpp"
#include "gaf/geometry.hpp"
#include "gaf/kernel.hpp"
#include "gaf/quadrature.hpp"
#include "gaf/sampling.hpp"
#include "gaf/zeros.hpp"

namespace gaf {

struct LogQuadratureOptions {
  AdaptivePolarOptions cells{};
  int max_retries = 3;
};

/// Log-integral route evaluated on one set of nodes.
struct PoincareLelongValues {
  double statistic = 0.0;  // int log|s|^2_{h^n} psi + n int c1 * form
  double z_psi = 0.0;      // int log|alpha_n|^2 psi
};

PoincareLelongValues poincare_lelong_values(const RandomSection& sec, const TestForm& form,
                                            const KernelEvaluator& ev,
                                            const LogQuadratureOptions& opt = {});

double linear_statistic_pl(const RandomSection& sec, const TestForm& form,
                           const KernelEvaluator& ev, const LogQuadratureOptions& opt = {});

double linear_statistic_zeros(const RandomSection& sec, const TestForm& form,
                              const RootFinderOptions& roots = {});

/// int log K_n(x,x) psi + n int c1 * form. Rejects forms with int psi != 0.
double expectation_kernel_route(const KernelEvaluator& ev, const TestForm& form);

/// n * int c1 * form over the support (smooth quadrature).
double chern_pairing(const WeightModel& model, int n, const TestForm& form);

/// int psi and int psi^2 over the support (smooth quadrature).
double integral_of_density(const TestForm& form);
double integral_of_density_squared(const TestForm& form);

struct ConditionGrid {
  int radial_panels = 12;
  int radial_nodes = 8;
  int angular_nodes = 160;
  int sup_rings = 6;
  int sup_angles = 12;
};

struct ConditionIIResult {
  double value = 0.0;        // sup_x int_region Gamma_n(x, y) dy
  double near_part = 0.0;    // |x - y| <= split at the maximiser
  double far_part = 0.0;
  double split_radius = 0.0;
  cplx argmax{};
};

ConditionIIResult st_condition_ii(const KernelEvaluator& ev, double region_radius,
                                  const ConditionGrid& grid = {}, double split_radius = 0.0);

/// [int int Gamma_n^2 psi psi] / [sup_x int Gamma_n], both over the support.
double st_condition_i_ratio(const KernelEvaluator& ev, const TestForm& form,
                            const ConditionGrid& grid = {});

/// Numerator of the ratio above.
double condition_i_numerator(const KernelEvaluator& ev, const TestForm& form,
                             const ConditionGrid& grid = {});

enum class BasisMethod { ClosedForm, Numeric };

struct ModelSpec {
  WeightKind kind = WeightKind::BargmannFock;
  std::vector<double> coefficients{1.0};
  double truncation_radius = 1.0;
  double curvature_floor = 2.0;
};

struct FormSpec {
  TestFormKind kind = TestFormKind::Bump;
  double radius = 0.8;
};

struct ExperimentConfig {
  ModelSpec model;
  FormSpec form;
  BasisMethod basis_method = BasisMethod::ClosedForm;
  double tail_tol = 1e-10;
  int max_degree = 4096;
  QuadratureSpec quad;
  std::vector<int> n_ladder{50, 100, 200};
  int samples = 2000;
  int audit_samples = 100;
  std::uint64_t seed = 20240611;
  RootFinderOptions roots;
  LogQuadratureOptions log_quad;
  ConditionGrid condition_grid;
  double b0 = 3.0;
  int k = 1;
  bool corrupt_basis = false;  // test fixture: breaks coefficient/evaluation consistency
};

WeightModel make_model(const ModelSpec& spec);
TestForm make_form(const FormSpec& spec);

/// Basis for one rung of the ladder: degree from truncation_degree, built by
/// the configured method.
std::shared_ptr<const SectionBasis> make_basis(const WeightModel& model, int n,
                                               const ExperimentConfig& cfg);

struct CltEntry {
  int n = 0;
  int degree = 0;
  double gram_residual = 0.0;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_statistic = 0.0;
  double ks_critical_1pct = 0.0;
  double mean_standard_error = 0.0;
  std::optional<double> condition_ii_value;
  std::optional<double> condition_ii_near;
  std::optional<double> condition_ii_far;
  std::optional<double> condition_i_ratio;
  std::optional<double> pl_vs_zeros_max_rel_diff;
  std::optional<double> same_variance_ratio;
  std::optional<double> expectation_kernel_route;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::uint64_t sample_checksum = 0;

  std::vector<double> stat_zero;                 // per sample
  std::vector<std::optional<double>> stat_pl;    // audit subsample only
  std::vector<std::optional<double>> z_psi;
};

struct CltReport {
  std::string model;
  std::string form;
  double tail_tol = 0.0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<CltEntry> entries;
};

CltReport run_clt_experiment(const ExperimentConfig& cfg, int workers = 1);

/// Stream index of sample i at tensor power n.
std::uint64_t sample_stream_index(int n, std::size_t sample);

void to_json(nlohmann::json& j, const CltEntry& e);
void to_json(nlohmann::json& j, const CltReport& r);

}  // namespace gaf
