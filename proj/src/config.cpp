#include "gaf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "gaf/errors.hpp"

namespace gaf {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::string where;  // "file:line: field 'key'"
  std::string value;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where + ": " + msg + " (got '" + value + "')");
  }

  double as_double() const {
    double v = 0.0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) fail("expected a real number");
    return v;
  }
  double positive() const {
    const double v = as_double();
    if (!(v > 0.0)) fail("expected a positive number");
    return v;
  }
  double nonnegative() const {
    const double v = as_double();
    if (v < 0.0) fail("expected a non-negative number");
    return v;
  }
  long long as_integer() const {
    long long v = 0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected an integer");
    return v;
  }
  int positive_int() const {
    const long long v = as_integer();
    if (v < 1 || v > 1'000'000'000) fail("expected a positive integer");
    return static_cast<int>(v);
  }
  int nonnegative_int() const {
    const long long v = as_integer();
    if (v < 0 || v > 1'000'000'000) fail("expected a non-negative integer");
    return static_cast<int>(v);
  }
  std::uint64_t as_u64() const {
    std::uint64_t v = 0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected an unsigned 64-bit integer");
    return v;
  }
  bool as_bool() const {
    if (value == "true") return true;
    if (value == "false") return false;
    fail("expected true or false");
  }
  template <class Fn>
  auto list(Fn&& each) const {
    std::vector<decltype(each(std::declval<const Field&>()))> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(each(Field{where, trim(item)}));
    }
    if (out.empty()) fail("expected a comma-separated list");
    return out;
  }
};

using Setter = std::function<void(AppConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.kind",
       [](AppConfig& c, const Field& f) {
         if (f.value == "bargmann_fock") {
           c.experiment.model.kind = WeightKind::BargmannFock;
         } else if (f.value == "radial_polynomial") {
           c.experiment.model.kind = WeightKind::RadialPolynomial;
         } else {
           f.fail("expected bargmann_fock or radial_polynomial");
         }
       }},
      {"model.coefficients",
       [](AppConfig& c, const Field& f) {
         c.experiment.model.coefficients = f.list([](const Field& g) { return g.as_double(); });
       }},
      {"model.truncation_radius",
       [](AppConfig& c, const Field& f) { c.experiment.model.truncation_radius = f.positive(); }},
      {"model.curvature_floor",
       [](AppConfig& c, const Field& f) { c.experiment.model.curvature_floor = f.positive(); }},
      {"model.n_ladder",
       [](AppConfig& c, const Field& f) {
         c.experiment.n_ladder = f.list([](const Field& g) { return g.positive_int(); });
       }},
      {"basis.method",
       [](AppConfig& c, const Field& f) {
         if (f.value == "closed_form") {
           c.experiment.basis_method = BasisMethod::ClosedForm;
         } else if (f.value == "numeric") {
           c.experiment.basis_method = BasisMethod::Numeric;
         } else {
           f.fail("expected closed_form or numeric");
         }
       }},
      {"basis.tail_tol",
       [](AppConfig& c, const Field& f) { c.experiment.tail_tol = f.positive(); }},
      {"basis.max_degree",
       [](AppConfig& c, const Field& f) { c.experiment.max_degree = f.positive_int(); }},
      {"basis.residual_threshold",
       [](AppConfig& c, const Field& f) { c.thresholds.residual = f.positive(); }},
      {"form.kind",
       [](AppConfig& c, const Field& f) {
         if (f.value == "bump") {
           c.experiment.form.kind = TestFormKind::Bump;
         } else if (f.value == "disk_indicator") {
           c.experiment.form.kind = TestFormKind::DiskIndicator;
         } else {
           f.fail("expected bump or disk_indicator");
         }
       }},
      {"form.radius", [](AppConfig& c, const Field& f) { c.experiment.form.radius = f.positive(); }},
      {"clt.samples",
       [](AppConfig& c, const Field& f) { c.experiment.samples = f.positive_int(); }},
      {"clt.seed", [](AppConfig& c, const Field& f) { c.experiment.seed = f.as_u64(); }},
      {"clt.audit_samples",
       [](AppConfig& c, const Field& f) { c.experiment.audit_samples = f.nonnegative_int(); }},
      {"clt.skewness_max",
       [](AppConfig& c, const Field& f) { c.thresholds.skewness = f.positive(); }},
      {"clt.kurtosis_max",
       [](AppConfig& c, const Field& f) { c.thresholds.kurtosis = f.positive(); }},
      {"clt.audit_tol", [](AppConfig& c, const Field& f) { c.thresholds.audit = f.positive(); }},
      {"clt.same_variance_tol",
       [](AppConfig& c, const Field& f) { c.thresholds.same_variance = f.positive(); }},
      {"quad.radial_nodes",
       [](AppConfig& c, const Field& f) { c.experiment.quad.radial_nodes = f.positive_int(); }},
      {"quad.radial_panels",
       [](AppConfig& c, const Field& f) { c.experiment.quad.radial_panels = f.positive_int(); }},
      {"quad.angular_nodes",
       [](AppConfig& c, const Field& f) { c.experiment.quad.angular_nodes = f.nonnegative_int(); }},
      {"quad.rel_tol",
       [](AppConfig& c, const Field& f) { c.experiment.quad.rel_tol = f.positive(); }},
      {"quad.cell_nodes",
       [](AppConfig& c, const Field& f) {
         c.experiment.log_quad.cells.cell_nodes = f.positive_int();
       }},
      {"quad.radial_cells",
       [](AppConfig& c, const Field& f) {
         c.experiment.log_quad.cells.radial_cells = f.positive_int();
       }},
      {"quad.angular_cells",
       [](AppConfig& c, const Field& f) {
         c.experiment.log_quad.cells.angular_cells = f.positive_int();
       }},
      {"quad.max_level",
       [](AppConfig& c, const Field& f) {
         c.experiment.log_quad.cells.max_level = f.positive_int();
       }},
      {"quad.cell_tol",
       [](AppConfig& c, const Field& f) { c.experiment.log_quad.cells.cell_tol = f.positive(); }},
      {"roots.polish_tol",
       [](AppConfig& c, const Field& f) { c.experiment.roots.polish_tol = f.positive(); }},
      {"roots.max_iterations",
       [](AppConfig& c, const Field& f) { c.experiment.roots.max_iterations = f.positive_int(); }},
      {"asym.b0", [](AppConfig& c, const Field& f) { c.experiment.b0 = f.positive(); }},
      {"asym.k", [](AppConfig& c, const Field& f) { c.experiment.k = f.positive_int(); }},
      {"asym.slope_min",
       [](AppConfig& c, const Field& f) { c.thresholds.slope_min = f.as_double(); }},
      {"asym.slope_max",
       [](AppConfig& c, const Field& f) { c.thresholds.slope_max = f.as_double(); }},
      {"asym.r2_min", [](AppConfig& c, const Field& f) { c.thresholds.r2_min = f.as_double(); }},
      {"asym.growth_max",
       [](AppConfig& c, const Field& f) { c.thresholds.offdiag_growth = f.positive(); }},
      {"conditions.floor",
       [](AppConfig& c, const Field& f) { c.thresholds.condition_i_floor = f.nonnegative(); }},
      {"conditions.radial_panels",
       [](AppConfig& c, const Field& f) {
         c.experiment.condition_grid.radial_panels = f.positive_int();
       }},
      {"conditions.radial_nodes",
       [](AppConfig& c, const Field& f) {
         c.experiment.condition_grid.radial_nodes = f.positive_int();
       }},
      {"conditions.angular_nodes",
       [](AppConfig& c, const Field& f) {
         c.experiment.condition_grid.angular_nodes = f.positive_int();
       }},
      {"debug.corrupt_basis",
       [](AppConfig& c, const Field& f) { c.experiment.corrupt_basis = f.as_bool(); }},
  };
  return table;
}

}  // namespace

AppConfig parse_config(const std::string& text, const std::string& source) {
  AppConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string at = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(at + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(at + ": unknown field '" + key + "'");
    if (auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(at + ": field '" + key + "' already set on line " +
                        std::to_string(prev->second));
    }
    seen[key] = line_no;
    if (value.empty()) throw ConfigError(at + ": field '" + key + "' has no value");
    it->second(cfg, Field{at + ": field '" + key + "'", value});
    cfg.entries[key] = value;
  }

  const ExperimentConfig& e = cfg.experiment;
  if (e.samples < 100) {
    throw ConfigError(source + ": field 'clt.samples': at least 100 samples are required (got " +
                      std::to_string(e.samples) + ")");
  }
  if (e.audit_samples > e.samples) {
    throw ConfigError(source + ": field 'clt.audit_samples' exceeds clt.samples");
  }
  if (e.form.radius > e.model.truncation_radius) {
    throw ConfigError(source + ": field 'form.radius' exceeds model.truncation_radius");
  }
  if (e.model.kind == WeightKind::BargmannFock && e.model.coefficients != std::vector<double>{1.0}) {
    throw ConfigError(source + ": field 'model.coefficients' is only meaningful for "
                               "radial_polynomial");
  }
  if (e.basis_method == BasisMethod::ClosedForm && e.model.kind != WeightKind::BargmannFock) {
    throw ConfigError(source + ": field 'basis.method': closed_form requires bargmann_fock");
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace gaf
