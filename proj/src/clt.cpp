#include "gaf/clt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaf/errors.hpp"
#include "gaf/parallel.hpp"
#include "gaf/stats.hpp"

namespace gaf {
namespace {

constexpr double kPi = std::numbers::pi;

// Smooth integrands over a support disk: polynomial-in-r^2 forms are
// integrated exactly by this rule.
DiskRule smooth_rule(double radius) { return polar_disk_rule(radius, 8, 16, 96); }

void require_smooth(const TestForm& form, const char* what) {
  if (!form.is_smooth()) {
    throw DomainError(std::string(what) + ": test form has no density (not smooth)");
  }
}

void require_support(const WeightModel& model, const TestForm& form) {
  if (form.support_radius() > model.truncation_radius() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "test form support radius " << form.support_radius()
       << " exceeds truncation radius " << model.truncation_radius();
    throw DomainError(os.str());
  }
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double m = s.value() / double(v.size());
  CompensatedSum q;
  for (double x : v) q.add((x - m) * (x - m));
  return std::sqrt(q.value() / double(v.size() - 1));
}

}  // namespace

double chern_pairing(const WeightModel& model, int n, const TestForm& form) {
  require_support(model, form);
  const DiskRule rule = smooth_rule(form.support_radius());
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s.add(rule.weights[i] * chern_density(model, rule.points[i]) * form.value(rule.points[i]));
  }
  return n * s.value();
}

double integral_of_density(const TestForm& form) {
  require_smooth(form, "integral_of_density");
  const DiskRule rule = smooth_rule(form.support_radius());
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s.add(rule.weights[i] * testform_density(form, rule.points[i]));
  }
  return s.value();
}

double integral_of_density_squared(const TestForm& form) {
  require_smooth(form, "integral_of_density_squared");
  const DiskRule rule = smooth_rule(form.support_radius());
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double p = testform_density(form, rule.points[i]);
    s.add(rule.weights[i] * p * p);
  }
  return s.value();
}

PoincareLelongValues poincare_lelong_values(const RandomSection& sec, const TestForm& form,
                                            const KernelEvaluator& ev,
                                            const LogQuadratureOptions& opt) {
  require_smooth(form, "Poincare-Lelong route");
  require_support(ev.model(), form);
  const int n = ev.tensor_power();
  std::vector<cplx> scratch;
  auto integrand = [&](cplx x) -> std::array<double, 2> {
    const double psi = testform_density(form, x);
    if (psi == 0.0) return {0.0, 0.0};
    const SectionPoint p = evaluate_section_point(sec, x, scratch);
    const double ls = std::log(std::norm(p.weighted_value));
    return {ls * psi, (ls - std::log(p.kernel_diag)) * psi};
  };
  const double cell_angle = 2.0 * kPi / opt.cells.angular_cells;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    try {
      // Irrational fractions of a cell so retries never revisit a node.
      const double offset = cell_angle * std::fmod(attempt * 0.6180339887498949, 1.0);
      const auto v = integrate_adaptive_polar<2>(integrand, form.support_radius(), opt.cells,
                                                 offset);
      return {v[0] + chern_pairing(ev.model(), n, form), v[1]};
    } catch (const SingularNodeError&) {
    }
  }
  throw NumericalError("log-integral hit a zero of the section on every retry");
}

double linear_statistic_pl(const RandomSection& sec, const TestForm& form,
                           const KernelEvaluator& ev, const LogQuadratureOptions& opt) {
  return poincare_lelong_values(sec, form, ev, opt).statistic;
}

double linear_statistic_zeros(const RandomSection& sec, const TestForm& form,
                              const RootFinderOptions& roots) {
  const std::vector<cplx> p = polynomial_part(sec);
  return divisor_pairing(find_zeros(p, roots), form);
}

double expectation_kernel_route(const KernelEvaluator& ev, const TestForm& form) {
  require_smooth(form, "expectation route");
  require_support(ev.model(), form);
  const DiskRule rule = polar_disk_rule(form.support_radius(), 16, 12, 96);
  CompensatedSum logk, mass, absmass;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double psi = testform_density(form, rule.points[i]);
    if (psi == 0.0) continue;
    mass.add(rule.weights[i] * psi);
    absmass.add(rule.weights[i] * std::abs(psi));
    logk.add(rule.weights[i] * psi * std::log(ev.bergman_diag(rule.points[i])));
  }
  if (std::abs(mass.value()) > 1e-8 * absmass.value()) {
    std::ostringstream os;
    os << "expectation route needs a test form with zero-mean density; integral = "
       << mass.value();
    throw DomainError(os.str());
  }
  return logk.value() + chern_pairing(ev.model(), ev.tensor_power(), form);
}

ConditionIIResult st_condition_ii(const KernelEvaluator& ev, double region_radius,
                                  const ConditionGrid& grid, double split_radius) {
  if (!(region_radius > 0.0) ||
      region_radius > ev.model().truncation_radius() * (1.0 + 1e-12)) {
    throw DomainError("condition (ii): region must lie inside the truncation disk");
  }
  const DiskRule rule = polar_disk_rule(region_radius, grid.radial_panels, grid.radial_nodes,
                                        grid.angular_nodes);
  std::vector<cplx> xs{cplx(0.0, 0.0)};
  for (int i = 1; i <= grid.sup_rings; ++i) {
    for (int a = 0; a < grid.sup_angles; ++a) {
      xs.push_back(std::polar(region_radius * i / grid.sup_rings,
                              2.0 * kPi * (a + 0.5 * (i % 2)) / grid.sup_angles));
    }
  }
  const Eigen::MatrixXcd vx = ev.normalized_value_matrix(xs);
  const Eigen::MatrixXcd vy = ev.normalized_value_matrix(rule.points);
  const Eigen::MatrixXcd g = vy.conjugate() * vx.transpose();  // g(b, a) = beta(x_a, y_b)

  ConditionIIResult res;
  res.split_radius = split_radius;
  std::size_t best = 0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    CompensatedSum s;
    for (std::size_t b = 0; b < rule.size(); ++b) {
      s.add(rule.weights[b] * clamp_normalized(std::abs(g(Eigen::Index(b), Eigen::Index(a)))));
    }
    if (a == 0 || s.value() > res.value) {
      res.value = s.value();
      best = a;
    }
  }
  res.argmax = xs[best];
  CompensatedSum near, far;
  for (std::size_t b = 0; b < rule.size(); ++b) {
    const double v =
        rule.weights[b] * clamp_normalized(std::abs(g(Eigen::Index(b), Eigen::Index(best))));
    (std::abs(rule.points[b] - xs[best]) <= split_radius ? near : far).add(v);
  }
  res.near_part = near.value();
  res.far_part = far.value();
  return res;
}

double condition_i_numerator(const KernelEvaluator& ev, const TestForm& form,
                             const ConditionGrid& grid) {
  require_smooth(form, "condition (i)");
  require_support(ev.model(), form);
  const DiskRule rule = polar_disk_rule(form.support_radius(), grid.radial_panels,
                                        grid.radial_nodes, grid.angular_nodes);
  const Eigen::Index dim = ev.basis().dimension();
  // sum_ab c_a c_b |<v_a, v_b>|^2 = || sum_a c_a conj(v_a) v_a^T ||_F^2
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  constexpr std::size_t kChunk = 512;
  for (std::size_t start = 0; start < rule.size(); start += kChunk) {
    const std::size_t stop = std::min(rule.size(), start + kChunk);
    std::vector<cplx> pts(rule.points.begin() + long(start), rule.points.begin() + long(stop));
    Eigen::VectorXd c(Eigen::Index(stop - start));
    for (std::size_t i = start; i < stop; ++i) {
      c(Eigen::Index(i - start)) = rule.weights[i] * testform_density(form, rule.points[i]);
    }
    const Eigen::MatrixXcd v = ev.normalized_value_matrix(pts);
    m.noalias() += v.adjoint() * (c.asDiagonal() * v);
  }
  return m.squaredNorm();
}

double st_condition_i_ratio(const KernelEvaluator& ev, const TestForm& form,
                            const ConditionGrid& grid) {
  const double num = condition_i_numerator(ev, form, grid);
  const double den = st_condition_ii(ev, form.support_radius(), grid).value;
  if (!(den > 0.0)) throw NumericalError("condition (i): vanishing sup-integral");
  return num / den;
}

WeightModel make_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case WeightKind::BargmannFock:
      return WeightModel::bargmann_fock(spec.truncation_radius, spec.curvature_floor);
    case WeightKind::RadialPolynomial:
      return WeightModel::radial_polynomial(spec.coefficients, spec.truncation_radius,
                                            spec.curvature_floor);
    case WeightKind::Custom:
      break;
  }
  throw ConfigError("custom weights can only be registered in code");
}

TestForm make_form(const FormSpec& spec) {
  switch (spec.kind) {
    case TestFormKind::Bump:
      return TestForm::bump(spec.radius);
    case TestFormKind::DiskIndicator:
      return TestForm::disk_indicator(spec.radius);
    case TestFormKind::Custom:
      break;
  }
  throw ConfigError("custom test forms can only be registered in code");
}

std::shared_ptr<const SectionBasis> make_basis(const WeightModel& model, int n,
                                               const ExperimentConfig& cfg) {
  const int degree = truncation_degree(model, n, model.truncation_radius(), cfg.tail_tol,
                                       cfg.max_degree, cfg.quad);
  SectionBasis b = cfg.basis_method == BasisMethod::ClosedForm
                       ? build_basis_closed_form(model, n, degree)
                       : build_basis_numeric(model, n, degree, cfg.quad);
  if (cfg.corrupt_basis) b.perturb_coefficient_for_testing(0, 0, cplx(3.0, 0.0));
  return std::make_shared<const SectionBasis>(std::move(b));
}

std::uint64_t sample_stream_index(int n, std::size_t sample) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(sample);
}

CltReport run_clt_experiment(const ExperimentConfig& cfg, int workers) {
  if (cfg.samples < 100) {
    throw ConfigError("clt.samples must be at least 100");
  }
  if (cfg.audit_samples < 0 || cfg.audit_samples > cfg.samples) {
    throw ConfigError("clt.audit_samples must lie in [0, clt.samples]");
  }
  if (cfg.n_ladder.empty()) throw ConfigError("model.n_ladder is empty");
  for (int n : cfg.n_ladder) {
    if (n < 1) throw ConfigError("model.n_ladder entries must be positive");
  }
  const WeightModel model = make_model(cfg.model);
  const TestForm form = make_form(cfg.form);
  if (form.support_radius() > model.truncation_radius()) {
    throw ConfigError("form.radius exceeds model.truncation_radius");
  }

  CltReport rep;
  rep.model = model.describe();
  rep.form = form.describe();
  rep.tail_tol = cfg.tail_tol;
  rep.seed = cfg.seed;
  rep.workers = workers;

  for (int n : cfg.n_ladder) {
    const auto basis = make_basis(model, n, cfg);
    const KernelEvaluator ev(basis);
    CltEntry e;
    e.n = n;
    e.degree = basis->degree();
    e.gram_residual = basis->gram_residual();
    e.seed = cfg.seed;
    const std::size_t count = static_cast<std::size_t>(cfg.samples);
    const std::size_t audit = form.is_smooth() ? static_cast<std::size_t>(cfg.audit_samples) : 0;
    e.stat_zero.assign(count, 0.0);
    e.stat_pl.assign(count, std::nullopt);
    e.z_psi.assign(count, std::nullopt);

    parallel_for(count, workers, [&](std::size_t i) {
      GaussianStream stream(cfg.seed, sample_stream_index(n, i));
      const RandomSection sec = draw_section(basis, stream);
      e.stat_zero[i] = linear_statistic_zeros(sec, form, cfg.roots);
      if (i < audit) {
        const PoincareLelongValues pl = poincare_lelong_values(sec, form, ev, cfg.log_quad);
        e.stat_pl[i] = pl.statistic;
        e.z_psi[i] = pl.z_psi;
      }
    });

    {
      CompensatedSum s;
      for (double x : e.stat_zero) s.add(x);
      const double mean = s.value() / double(count);
      const double sd = stddev(e.stat_zero);
      if (!(sd * sd > 1e-12 * mean * mean) || sd == 0.0) {
        std::ostringstream os;
        os << "degenerate variance of the linear statistic at n = " << n << " (variance "
           << sd * sd << ", mean " << mean << "); is the test form trivial?";
        throw ExperimentError(os.str());
      }
    }
    const NormalityMetrics m = normality_metrics(e.stat_zero);
    e.empirical_mean = m.mean;
    e.empirical_variance = m.variance;
    e.skewness = m.skewness;
    e.excess_kurtosis = m.excess_kurtosis;
    e.ks_statistic = m.ks_statistic;
    e.ks_critical_1pct = ks_critical_1pct(count);
    e.mean_standard_error = std::sqrt(m.variance / double(count));
    e.sample_count = count;
    e.sample_checksum = sorted_checksum(e.stat_zero);

    if (audit > 0) {
      double worst = 0.0;
      std::vector<double> shift(audit);
      for (std::size_t i = 0; i < audit; ++i) {
        const double z = e.stat_zero[i];
        worst = std::max(worst, std::abs(*e.stat_pl[i] - z) / (1.0 + std::abs(z)));
        shift[i] = *e.z_psi[i] - z;
      }
      e.pl_vs_zeros_max_rel_diff = worst;
      e.same_variance_ratio = stddev(shift) / std::sqrt(m.variance);
    }
    if (form.is_smooth()) {
      e.expectation_kernel_route = expectation_kernel_route(ev, form);
      e.condition_i_ratio = st_condition_i_ratio(ev, form, cfg.condition_grid);
    }
    const double split = cfg.b0 * std::sqrt(std::log(double(std::max(n, 2))) / n);
    const ConditionIIResult c2 =
        st_condition_ii(ev, model.truncation_radius(), cfg.condition_grid, split);
    e.condition_ii_value = c2.value;
    e.condition_ii_near = c2.near_part;
    e.condition_ii_far = c2.far_part;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

namespace {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void to_json(nlohmann::json& j, const CltEntry& e) {
  j = nlohmann::json{{"n", e.n},
                     {"degree", e.degree},
                     {"gram_residual", e.gram_residual},
                     {"empirical_mean", e.empirical_mean},
                     {"empirical_variance", e.empirical_variance},
                     {"skewness", e.skewness},
                     {"excess_kurtosis", e.excess_kurtosis},
                     {"ks_statistic", e.ks_statistic},
                     {"ks_critical_1pct", e.ks_critical_1pct},
                     {"mean_standard_error", e.mean_standard_error},
                     {"condition_ii_value", opt_json(e.condition_ii_value)},
                     {"condition_ii_near", opt_json(e.condition_ii_near)},
                     {"condition_ii_far", opt_json(e.condition_ii_far)},
                     {"condition_i_ratio", opt_json(e.condition_i_ratio)},
                     {"pl_vs_zeros_max_rel_diff", opt_json(e.pl_vs_zeros_max_rel_diff)},
                     {"same_variance_ratio", opt_json(e.same_variance_ratio)},
                     {"expectation_kernel_route", opt_json(e.expectation_kernel_route)},
                     {"sample_count", e.sample_count},
                     {"seed", e.seed},
                     {"sample_checksum", e.sample_checksum}};
}

void to_json(nlohmann::json& j, const CltReport& r) {
  j = nlohmann::json{{"model", r.model},
                     {"form", r.form},
                     {"tail_tol", r.tail_tol},
                     {"seed", r.seed},
                     {"workers", r.workers},
                     {"condition_i_region", "support of the test form"},
                     {"per_n", r.entries}};
}

}  // namespace gaf
