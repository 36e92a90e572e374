#include "gaf/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>

#include <json.hpp>

#include "gaf/errors.hpp"
#include "gaf/parallel.hpp"
#include "gaf/sampling.hpp"
#include "gaf/stats.hpp"
#include "gaf/zeros.hpp"

namespace gaf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Records outputs as they are written and emits manifest.json at the end.
class Manifest {
 public:
  Manifest(std::string command, const AppConfig& cfg, const CliOptions& opt)
      : command_(std::move(command)), cfg_(cfg), opt_(opt), start_(Clock::now()) {
    fs::create_directories(opt.out_dir);
  }

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return opt_.out_dir / name;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(path(name));
    out << j.dump(2) << '\n';
  }

  void phase(const std::string& name) {
    const auto now = Clock::now();
    durations_[name] = std::chrono::duration<double>(now - mark_).count();
    mark_ = now;
  }

  void finish(int exit_code) {
    json m;
    m["command"] = command_;
    m["artifact_version"] = GAF_VERSION;
    m["config_path"] = opt_.config_path.string();
    m["config"] = cfg_.entries;
    m["seeds"] = json::array({cfg_.experiment.seed});
    m["workers"] = opt_.workers;
    m["outputs"] = outputs_;
    m["exit_code"] = exit_code;
    if (opt_.no_timestamp) {
      m["timestamp"] = "masked";
      m["durations_seconds"] = "masked";
    } else {
      const std::time_t t = std::time(nullptr);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
      m["timestamp"] = buf;
      json d = durations_;
      d["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
      m["durations_seconds"] = d;
    }
    std::ofstream out(opt_.out_dir / "manifest.json");
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  const AppConfig& cfg_;
  const CliOptions& opt_;
  Clock::time_point start_;
  Clock::time_point mark_ = Clock::now();
  std::vector<std::string> outputs_;
  std::map<std::string, double> durations_;
};

const char* method_name(BasisMethod m) {
  return m == BasisMethod::ClosedForm ? "closed_form" : "numeric";
}

// Runs a command body, writing the manifest on every exit path that gets far
// enough to have one.
template <class Body>
int with_manifest(const std::string& name, const AppConfig& cfg, const CliOptions& opt,
                  Body&& body) {
  Manifest man(name, cfg, opt);
  const int code = body(man);
  man.finish(code);
  return code;
}

}  // namespace

int default_worker_count() {
  if (const char* env = std::getenv("GAF_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return default_workers();
}

int cmd_basis(const AppConfig& cfg, const CliOptions& opt, std::ostream& log) {
  return with_manifest("basis", cfg, opt, [&](Manifest& man) {
    const ExperimentConfig& e = cfg.experiment;
    const WeightModel model = make_model(e.model);
    json rep{{"model", model.describe()},
             {"method", method_name(e.basis_method)},
             {"tail_tol", e.tail_tol},
             {"residual_threshold", cfg.thresholds.residual}};
    json rows = json::array();
    int code = kExitOk;
    for (int n : e.n_ladder) {
      const auto basis = make_basis(model, n, e);
      const bool ok = basis->gram_residual() <= cfg.thresholds.residual;
      if (!ok) code = kExitResidual;
      rows.push_back({{"n", n},
                      {"degree", basis->degree()},
                      {"gram_residual", basis->gram_residual()},
                      {"pass", ok}});
      log << "basis n=" << n << " degree=" << basis->degree()
          << " gram_residual=" << basis->gram_residual() << (ok ? "" : "  ABOVE THRESHOLD")
          << '\n';
      if (opt.dump_basis) {
        std::ofstream csv(man.path("basis_n" + std::to_string(n) + ".csv"));
        csv << "j,k,re,im\n";
        const Eigen::MatrixXcd c = basis->coefficient_matrix();
        for (int j = 0; j < c.rows(); ++j) {
          for (int k = 0; k < c.cols(); ++k) {
            if (c(j, k) == cplx{}) continue;
            csv << j << ',' << k << ',' << fmt(c(j, k).real()) << ',' << fmt(c(j, k).imag())
                << '\n';
          }
        }
      }
    }
    man.phase("bases");
    rep["per_n"] = rows;
    man.write_json("basis_report.json", rep);
    return code;
  });
}

int kernel_check_verdict(const std::vector<AsymptoticsReport>& reports, const Thresholds& t) {
  for (const auto& r : reports) {
    if (!(r.slope >= t.slope_min && r.slope <= t.slope_max) || !(r.r2 >= t.r2_min)) {
      return kExitFit;
    }
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].offdiag_max_scaled > t.offdiag_growth * reports[i - 1].offdiag_max_scaled) {
      return kExitFit;
    }
  }
  return kExitOk;
}

int cmd_kernel_check(const AppConfig& cfg, const CliOptions& opt, std::ostream& log) {
  const ExperimentConfig& e = cfg.experiment;
  const WeightModel model = make_model(e.model);
  // Precondition failures surface before any output is produced.
  const double eps0 = model.truncation_radius() / 4.0;
  for (int n : e.n_ladder) {
    if (n < 3 || e.b0 * std::sqrt(std::log(double(n)) / n) > 2.0 * eps0) {
      throw ConfigError("kernel-check: n = " + std::to_string(n) +
                        " is below the precondition b0 sqrt(log n / n) <= " + fmt(2.0 * eps0) +
                        "; minimal n is " +
                        std::to_string(minimal_tensor_power(e.b0, 2.0 * eps0)));
    }
  }
  return with_manifest("kernel-check", cfg, opt, [&](Manifest& man) {
    std::vector<AsymptoticsReport> reports;
    for (int n : e.n_ladder) {
      const KernelEvaluator ev(make_basis(model, n, e));
      reports.push_back(asymptotics_report(ev, e.k, e.b0, cfg.asym_grid));
      const auto& r = reports.back();
      log << "kernel-check n=" << n << " slope=" << r.slope << " r2=" << r.r2
          << " offdiag_max_scaled=" << r.offdiag_max_scaled << '\n';
      std::ofstream dat(man.path("kernel_fit_n" + std::to_string(n) + ".dat"));
      dat << "# Psi^2  -4log(Gamma)/n\n";
      for (auto [x, y] : r.fit_points) dat << fmt(x) << ' ' << fmt(y) << '\n';
    }
    man.phase("reports");
    const int code = kernel_check_verdict(reports, cfg.thresholds);
    json rep{{"model", model.describe()},
             {"slope_band", {cfg.thresholds.slope_min, cfg.thresholds.slope_max}},
             {"r2_min", cfg.thresholds.r2_min},
             {"offdiag_growth_max", cfg.thresholds.offdiag_growth},
             {"per_n", reports},
             {"pass", code == kExitOk}};
    man.write_json("kernel_check.json", rep);
    return code;
  });
}

int clt_verdict(const CltReport& rep, const Thresholds& t) {
  for (const auto& e : rep.entries) {
    if (e.pl_vs_zeros_max_rel_diff && !(*e.pl_vs_zeros_max_rel_diff <= t.audit)) return kExitAudit;
    if (e.same_variance_ratio && !(*e.same_variance_ratio <= t.same_variance)) return kExitAudit;
  }
  if (rep.entries.empty()) return kExitCondition;
  const CltEntry& last = rep.entries.back();
  if (!(last.ks_statistic <= last.ks_critical_1pct) || !(std::abs(last.skewness) <= t.skewness) ||
      !(std::abs(last.excess_kurtosis) <= t.kurtosis)) {
    return kExitCondition;
  }
  return kExitOk;
}

int cmd_clt(const AppConfig& cfg, const CliOptions& opt, std::ostream& log) {
  return with_manifest("clt", cfg, opt, [&](Manifest& man) {
    const CltReport rep = run_clt_experiment(cfg.experiment, opt.workers);
    man.phase("experiment");
    const int code = clt_verdict(rep, cfg.thresholds);

    int inversions = 0;
    for (std::size_t i = 1; i < rep.entries.size(); ++i) {
      if (rep.entries[i].ks_statistic > rep.entries[i - 1].ks_statistic) ++inversions;
    }
    json j = rep;
    j["ks_trend_inversions"] = inversions;
    j["thresholds"] = {{"skewness_max", cfg.thresholds.skewness},
                       {"kurtosis_max", cfg.thresholds.kurtosis},
                       {"audit_tol", cfg.thresholds.audit},
                       {"same_variance_tol", cfg.thresholds.same_variance}};
    j["pass"] = code == kExitOk;
    man.write_json("clt_report.json", j);

    {
      std::ofstream csv(man.path("samples.csv"));
      csv << "n,sample_index,stat_zero_route,stat_pl_route_or_empty\n";
      for (const auto& e : rep.entries) {
        for (std::size_t i = 0; i < e.stat_zero.size(); ++i) {
          csv << e.n << ',' << i << ',' << fmt(e.stat_zero[i]) << ','
              << (e.stat_pl[i] ? fmt(*e.stat_pl[i]) : std::string()) << '\n';
        }
      }
    }
    if (!rep.entries.empty()) {
      const CltEntry& last = rep.entries.back();
      constexpr int kBins = 40;
      constexpr double kLo = -4.0, kHi = 4.0;
      const double width = (kHi - kLo) / kBins;
      const double sd = std::sqrt(last.empirical_variance);
      std::vector<int> counts(kBins, 0);
      for (double x : last.stat_zero) {
        const double z = (x - last.empirical_mean) / sd;
        const int b = static_cast<int>(std::floor((z - kLo) / width));
        if (b >= 0 && b < kBins) ++counts[b];
      }
      std::ofstream hist(man.path("histogram.dat"));
      std::ofstream pdf(man.path("normal_pdf.dat"));
      hist << "# standardized statistic at n=" << last.n << ": bin centre, density\n";
      pdf << "# bin centre, standard normal density\n";
      for (int b = 0; b < kBins; ++b) {
        const double c = kLo + (b + 0.5) * width;
        hist << fmt(c) << ' ' << fmt(counts[b] / (double(last.stat_zero.size()) * width)) << '\n';
        pdf << fmt(c) << ' '
            << fmt(std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi)) << '\n';
      }
    }
    if (opt.dump_coefficients || opt.dump_divisors) {
      // Samples are pure functions of (seed, n, index): redraw rather than keep.
      const ExperimentConfig& ec = cfg.experiment;
      const WeightModel model = make_model(ec.model);
      std::ofstream coef, div;
      if (opt.dump_coefficients) {
        coef.open(man.path("coefficients.csv"));
        coef << "n,sample_index,xi_interleaved_re_im\n";
      }
      if (opt.dump_divisors) {
        div.open(man.path("divisors.csv"));
        div << "n,sample_index,re,im,multiplicity\n";
      }
      for (int n : ec.n_ladder) {
        const auto basis = make_basis(model, n, ec);
        const int count = std::min(opt.dump_limit, ec.samples);
        for (int i = 0; i < count; ++i) {
          GaussianStream stream(ec.seed, sample_stream_index(n, i));
          const RandomSection sec = draw_section(basis, stream);
          if (coef.is_open()) {
            coef << n << ',' << i;
            for (cplx x : sec.coeffs) coef << ',' << fmt(x.real()) << ',' << fmt(x.imag());
            coef << '\n';
          }
          if (div.is_open()) {
            for (const auto& pt : find_zeros(polynomial_part(sec), ec.roots).points) {
              div << n << ',' << i << ',' << fmt(pt.location.real()) << ','
                  << fmt(pt.location.imag()) << ',' << pt.multiplicity << '\n';
            }
          }
        }
      }
      man.phase("dumps");
    }
    for (const auto& e : rep.entries) {
      log << "clt n=" << e.n << " D=" << e.degree << " mean=" << e.empirical_mean
          << " var=" << e.empirical_variance << " skew=" << e.skewness
          << " exkurt=" << e.excess_kurtosis << " ks=" << e.ks_statistic << " (crit "
          << e.ks_critical_1pct << ")";
      if (e.pl_vs_zeros_max_rel_diff) log << " audit=" << *e.pl_vs_zeros_max_rel_diff;
      if (e.same_variance_ratio) log << " samevar=" << *e.same_variance_ratio;
      log << '\n';
    }
    if (code == kExitAudit) log << "clt: cross-route audit FAILED\n";
    if (code == kExitCondition) log << "clt: normality thresholds not met at the largest n\n";
    return code;
  });
}

int cmd_conditions(const AppConfig& cfg, const CliOptions& opt, std::ostream& log) {
  return with_manifest("conditions", cfg, opt, [&](Manifest& man) {
    const ExperimentConfig& e = cfg.experiment;
    const WeightModel model = make_model(e.model);
    const TestForm form = make_form(e.form);
    const double half_psi_sq = 0.5 * integral_of_density_squared(form);
    json rows = json::array();
    std::vector<double> c2;
    int code = kExitOk;
    std::ofstream d2(man.path("condition_ii.dat"));
    std::ofstream d1(man.path("condition_i.dat"));
    d2 << "# n  sup-integral (log-log)\n";
    d1 << "# n  condition (i) ratio (log-log)\n";
    for (int n : e.n_ladder) {
      const KernelEvaluator ev(make_basis(model, n, e));
      const double split = e.b0 * std::sqrt(std::log(double(std::max(n, 2))) / n);
      const ConditionIIResult ii =
          st_condition_ii(ev, model.truncation_radius(), e.condition_grid, split);
      const double ratio = st_condition_i_ratio(ev, form, e.condition_grid);
      c2.push_back(ii.value);
      const bool floor_ok = ratio > cfg.thresholds.condition_i_floor;
      if (!floor_ok) code = kExitCondition;
      rows.push_back({{"n", n},
                      {"condition_ii_value", ii.value},
                      {"condition_ii_near", ii.near_part},
                      {"condition_ii_far", ii.far_part},
                      {"condition_ii_split_radius", split},
                      {"condition_ii_times_n", ii.value * n},
                      {"condition_i_ratio", ratio},
                      {"condition_i_above_floor", floor_ok}});
      d2 << n << ' ' << fmt(ii.value) << '\n';
      d1 << n << ' ' << fmt(ratio) << '\n';
      log << "conditions n=" << n << " (ii)=" << ii.value << " (ii)*n=" << ii.value * n
          << " (i) ratio=" << ratio << '\n';
    }
    man.phase("conditions");
    json trend;
    if (c2.size() < 2) {
      trend = "skipped: single-n ladder";
    } else {
      bool decreasing = true;
      for (std::size_t i = 1; i < c2.size(); ++i) decreasing = decreasing && c2[i] < c2[i - 1];
      trend = decreasing ? "decreasing" : "NOT decreasing";
      if (!decreasing) code = kExitCondition;
    }
    json rep{{"model", model.describe()},
             {"form", form.describe()},
             {"condition_i_floor", cfg.thresholds.condition_i_floor},
             {"half_integral_psi_squared", half_psi_sq},
             {"condition_i_region", "support of the test form"},
             {"condition_ii_region_radius", model.truncation_radius()},
             {"condition_ii_trend", trend},
             {"per_n", rows},
             {"pass", code == kExitOk}};
    man.write_json("conditions.json", rep);
    return code;
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Zeros of Gaussian random holomorphic sections: bases, kernels, CLT checks"};
  app.require_subcommand(1);
  CliOptions opt;
  opt.workers = default_worker_count();
  std::string config;
  std::string out = "gaf_out";
  app.add_option("--out", out, "Output directory");
  app.add_option("--workers", opt.workers, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--no-timestamp", opt.no_timestamp, "Mask timestamps and durations");

  using Cmd = int (*)(const AppConfig&, const CliOptions&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Cmd>> commands = {
      {"basis", "Build bases over the n ladder and report Gram residuals", cmd_basis},
      {"kernel-check", "Near- and off-diagonal kernel asymptotics", cmd_kernel_check},
      {"clt", "Normality experiment for smooth linear statistics", cmd_clt},
      {"conditions", "Covariance integral conditions across the ladder", cmd_conditions},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "Config file")->required();
    if (name == "basis") {
      sub->add_flag("--dump-basis", opt.dump_basis, "Write monomial coefficients as CSV");
    } else if (name == "clt") {
      sub->add_flag("--dump-coefficients", opt.dump_coefficients,
                    "Write drawn coefficient vectors as CSV");
      sub->add_flag("--dump-divisors", opt.dump_divisors, "Write zero divisors as CSV");
      sub->add_option("--dump-limit", opt.dump_limit, "Samples per n in the dumps")
          ->check(CLI::Range(1, 1000000));
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  opt.out_dir = out;
  opt.config_path = config;

  try {
    const AppConfig cfg = load_config(config);
    for (const auto& [name, help, fn] : commands) {
      if (app.got_subcommand(name)) return fn(cfg, opt, std::cout);
    }
    return kExitUnexpected;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InsufficientDataError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResidual;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitResidual;
  } catch (const ExperimentError& e) {
    std::cerr << "experiment failure: " << e.what() << '\n';
    return kExitCondition;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace gaf
