// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaf/cli.hpp"
#include "gaf/clt.hpp"
#include "gaf/config.hpp"
#include "gaf/kernel.hpp"

using namespace gaf;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kConfigs = fs::path(GAF_SOURCE_DIR) / "configs";
constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion body; exceptions count as failures with their message.
void criterion(int id, const std::string& name, const std::function<bool(std::ostream&)>& body) {
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  report(id, name, ok, detail.str());
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli_args(std::vector<std::string> args) {
  args.insert(args.begin(), "gaf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

// Deterministic points spread over the open unit disk.
std::vector<cplx> disk_points(int count) {
  std::vector<cplx> pts;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double r = 0.98 * std::sqrt((i + 0.5) / count);
    pts.push_back(std::polar(r, golden * i));
  }
  return pts;
}

double max_relative_coefficient_error(const SectionBasis& a, const SectionBasis& b) {
  const Eigen::MatrixXcd ca = a.coefficient_matrix(), cb = b.coefficient_matrix();
  double worst = 0.0;
  for (int j = 0; j < ca.rows(); ++j) {
    const double scale = ca.row(j).cwiseAbs().maxCoeff();
    worst = std::max(worst, (ca.row(j) - cb.row(j)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "gaf_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const int workers = default_worker_count();

  criterion(1, "basis fidelity", [&](std::ostream& os) {
    const auto t0 = Clock::now();
    const auto bf = WeightModel::bargmann_fock(1.0);
    const SectionBasis closed = build_basis_closed_form(bf, 20, 40);
    const SectionBasis radial = build_basis_numeric(bf, 20, 40);
    // same weight registered without the radial promise: full Gram matrix
    const auto generic = WeightModel::custom([](cplx z) { return std::norm(z); },
                                             [](cplx) { return 4.0; }, 1.0, 2.0, false);
    const SectionBasis full = build_basis_numeric(generic, 20, 40);
    const double e1 = max_relative_coefficient_error(closed, radial);
    const double e2 = max_relative_coefficient_error(closed, full);
    const double res = std::max(radial.gram_residual(), full.gram_residual());
    const double t = seconds_since(t0);
    os << "rel err radial " << e1 << ", generic " << e2 << " (<= 1e-8); gram residual " << res
       << " (<= 1e-8); " << t << " s (< 5)";
    return e1 <= 1e-8 && e2 <= 1e-8 && res <= 1e-8 && t < 5.0;
  });

  criterion(2, "kernel closed form", [&](std::ostream& os) {
    const auto t0 = Clock::now();
    const auto bf = WeightModel::bargmann_fock(1.0);
    const auto pts = disk_points(50);
    bool ok = true;
    for (int n : {50, 100, 200}) {
      const int d = truncation_degree(bf, n, 1.0, 1e-12);
      const KernelEvaluator ev(build_basis_numeric(bf, n, d));
      double worst = 0.0;
      for (cplx x : pts) {
        for (cplx y : pts) {
          const double exact = std::exp(-0.5 * n * std::norm(x - y));
          worst = std::max(worst, std::abs(ev.normalized_kernel(x, y) - exact));
        }
      }
      os << "n=" << n << " max err " << worst << "; ";
      ok = ok && worst <= 1e-6;
    }
    const double t = seconds_since(t0);
    os << t << " s (< 10)";
    return ok && t < 10.0;
  });

  // Kernel-check reports over the shipped models, shared by criteria 3 and 4.
  std::vector<std::pair<std::string, std::vector<AsymptoticsReport>>> shipped;
  std::string shipped_error;
  try {
    for (const char* name : {"bargmann_fock_kernel.conf", "radial_quartic_kernel.conf"}) {
      const AppConfig cfg = load_config(kConfigs / name);
      const ExperimentConfig& e = cfg.experiment;
      const WeightModel model = make_model(e.model);
      std::vector<AsymptoticsReport> reps;
      for (int n : e.n_ladder) {
        const KernelEvaluator ev(make_basis(model, n, e));
        reps.push_back(asymptotics_report(ev, e.k, e.b0, cfg.asym_grid));
      }
      shipped.emplace_back(name, std::move(reps));
    }
  } catch (const std::exception& ex) {
    shipped_error = ex.what();
  }

  criterion(3, "near-diagonal asymptotics", [&](std::ostream& os) {
    if (!shipped_error.empty()) throw std::runtime_error(shipped_error);
    bool ok = true;
    for (const auto& [name, reps] : shipped) {
      const bool closed = name.rfind("bargmann_fock", 0) == 0;
      os << name << ":";
      for (const auto& r : reps) {
        os << " n=" << r.n << " slope " << r.slope << " r2 " << r.r2 << ";";
        ok = ok && r.slope >= 0.9 && r.slope <= 1.1 && r.r2 >= 0.99;
        if (closed) ok = ok && std::abs(r.slope - 1.0) <= 1e-6;
      }
      os << ' ';
    }
    os << "(slope in [0.9, 1.1], r2 >= 0.99, closed form 1 +- 1e-6)";
    return ok;
  });

  criterion(4, "off-diagonal asymptotics", [&](std::ostream& os) {
    if (!shipped_error.empty()) throw std::runtime_error(shipped_error);
    bool ok = true;
    for (const auto& [name, reps] : shipped) {
      os << name << ":";
      for (std::size_t i = 0; i < reps.size(); ++i) {
        os << " n=" << reps[i].n << " " << reps[i].offdiag_max_scaled;
        if (i > 0) ok = ok && reps[i].offdiag_max_scaled <= 1.3 * reps[i - 1].offdiag_max_scaled;
      }
      os << "; ";
    }
    os << "growth factor <= 1.3 (b0 = 3 > sqrt(16/2))";
    return ok;
  });

  // Shipped normality run through the CLI, twice, for criteria 5, 9, 10, 11.
  const fs::path run_a = work / "clt_a", run_b = work / "clt_b";
  const std::string clt_conf = (kConfigs / "bargmann_fock_clt.conf").string();
  const auto t_clt = Clock::now();
  const int rc_a = run_cli_args({"--out", run_a.string(), "--no-timestamp", "--workers",
                                 std::to_string(workers), "clt", clt_conf});
  const double clt_seconds = seconds_since(t_clt);
  nlohmann::json clt;
  try {
    clt = nlohmann::json::parse(slurp(run_a / "clt_report.json"));
  } catch (const std::exception&) {
  }
  auto entry_at = [&](int n) -> const nlohmann::json& {
    for (const auto& e : clt.at("per_n"))
      if (e.at("n") == n) return e;
    throw std::runtime_error("no entry for n = " + std::to_string(n));
  };

  criterion(5, "Poincare-Lelong identity", [&](std::ostream& os) {
    const auto& e = entry_at(100);
    const double diff = e.at("pl_vs_zeros_max_rel_diff").get<double>();
    int audited = 0;
    std::istringstream csv(slurp(run_a / "samples.csv"));
    std::string line;
    while (std::getline(csv, line)) {
      if (line.rfind("100,", 0) == 0 && line.back() != ',') ++audited;
    }
    os << "n=100 max |PL - Z| / (1 + |Z|) = " << diff << " over " << audited
       << " samples (<= 1e-3, 100 samples)";
    return diff <= 1e-3 && audited == 100;
  });

  criterion(6, "expectation", [&](std::ostream& os) {
    const auto& e = entry_at(50);
    const double mean = e.at("empirical_mean").get<double>();
    const double se = e.at("mean_standard_error").get<double>();
    const double expect = e.at("expectation_kernel_route").get<double>();
    os << "bump n=50 mean " << mean << " vs kernel route " << expect << " (" << std::abs(mean - expect) / se
       << " SE); ";
    const bool bump_ok = std::abs(mean - expect) <= 3.0 * se;

    ExperimentConfig cfg = load_config(clt_conf).experiment;
    cfg.n_ladder = {50};
    cfg.form.kind = TestFormKind::DiskIndicator;
    cfg.form.radius = 1.0;
    cfg.audit_samples = 0;
    const CltReport count = run_clt_experiment(cfg, workers);
    const CltEntry& c = count.entries.at(0);
    const double z = std::abs(c.empirical_mean - 50.0) / c.mean_standard_error;
    os << "unit-disk count mean " << c.empirical_mean << " vs 50 (" << z << " SE); limit 3 SE";
    return bump_ok && z <= 3.0;
  });

  // Conditions on the shipped config, shared by 7 and 8.
  struct CondRow {
    int n;
    double ii;
    double ratio;
  };
  std::vector<CondRow> cond;
  double half_psi_sq = 0.0;
  std::string cond_error;
  try {
    const ExperimentConfig e = load_config(kConfigs / "bargmann_fock_conditions.conf").experiment;
    const WeightModel model = make_model(e.model);
    const TestForm form = make_form(e.form);
    half_psi_sq = 0.5 * integral_of_density_squared(form);
    for (int n : e.n_ladder) {
      const KernelEvaluator ev(make_basis(model, n, e));
      const double split = e.b0 * std::sqrt(std::log(double(n)) / n);
      const double ii = st_condition_ii(ev, model.truncation_radius(), e.condition_grid, split).value;
      cond.push_back({n, ii, st_condition_i_ratio(ev, form, e.condition_grid)});
    }
  } catch (const std::exception& ex) {
    cond_error = ex.what();
  }

  criterion(7, "Sodin-Tsirelson (ii)", [&](std::ostream& os) {
    if (!cond_error.empty()) throw std::runtime_error(cond_error);
    bool ok = true;
    for (std::size_t i = 0; i < cond.size(); ++i) {
      const double rel = cond[i].ii * cond[i].n / (2 * kPi);
      os << "n=" << cond[i].n << " value*n/2pi " << rel << "; ";
      if (cond[i].n >= 100) ok = ok && std::abs(rel - 1.0) <= 0.2;
      if (i > 0) ok = ok && cond[i].ii < cond[i - 1].ii;
    }
    os << "within 20% for n in {100, 200}, strictly decreasing";
    return ok && !cond.empty();
  });

  criterion(8, "Sodin-Tsirelson (i)", [&](std::ostream& os) {
    if (!cond_error.empty()) throw std::runtime_error(cond_error);
    bool ok = !cond.empty();
    for (const auto& c : cond) {
      os << "n=" << c.n << " ratio " << c.ratio << "; ";
      ok = ok && c.ratio > 0.0;
      if (c.n == 200) ok = ok && std::abs(c.ratio / half_psi_sq - 1.0) <= 0.2;
    }
    os << "target (1/2) int psi^2 = " << half_psi_sq << " within 20% at n=200, positive everywhere";
    return ok;
  });

  criterion(9, "main CLT", [&](std::ostream& os) {
    const auto& e = entry_at(200);
    const double ks = e.at("ks_statistic").get<double>();
    const double crit = e.at("ks_critical_1pct").get<double>();
    const double skew = e.at("skewness").get<double>();
    const double kurt = e.at("excess_kurtosis").get<double>();
    const int inversions = clt.at("ks_trend_inversions").get<int>();
    os << "n=200 KS " << ks << " (<= " << crit << "), skew " << skew << " (|.| <= 0.15), excess kurtosis "
       << kurt << " (|.| <= 0.3); KS trend inversions " << inversions << " (<= 1); exit " << rc_a
       << "; " << clt_seconds << " s (< 600)";
    return ks <= crit && std::abs(skew) <= 0.15 && std::abs(kurt) <= 0.3 && inversions <= 1 &&
           rc_a == kExitOk && clt_seconds < 600.0;
  });

  criterion(10, "same-variance reduction", [&](std::ostream& os) {
    bool ok = !clt.at("per_n").empty();
    for (const auto& e : clt.at("per_n")) {
      const double r = e.at("same_variance_ratio").get<double>();
      os << "n=" << e.at("n") << " sd ratio " << r << "; ";
      ok = ok && r <= 1e-3;
    }
    os << "limit 1e-3";
    return ok;
  });

  criterion(11, "reproducibility", [&](std::ostream& os) {
    const int rc_b = run_cli_args({"--out", run_b.string(), "--no-timestamp", "--workers",
                                   std::to_string(workers), "clt", clt_conf});
    bool ok = rc_a == rc_b;
    for (const char* f : {"clt_report.json", "samples.csv", "histogram.dat", "manifest.json"}) {
      const bool same = slurp(run_a / f) == slurp(run_b / f) && !slurp(run_a / f).empty();
      os << f << (same ? " identical; " : " DIFFERS; ");
      ok = ok && same;
    }
    os << "exit codes " << rc_a << "/" << rc_b;
    return ok;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
