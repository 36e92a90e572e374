#include "gaf/kernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gaf/errors.hpp"

namespace gaf {
namespace {

constexpr double kGammaSlack = 1e-9;

void require_in_disk(const WeightModel& model, cplx x) {
  if (!model.contains(x)) {
    std::ostringstream os;
    os << "kernel evaluation at " << x << " outside the truncation disk";
    throw DomainError(os.str());
  }
}

}  // namespace

double clamp_normalized(double gamma) {
  if (gamma > 1.0 + kGammaSlack || !(gamma >= 0.0)) {
    std::ostringstream os;
    os << "normalized Bergman kernel out of [0,1]: " << gamma;
    throw InvariantViolation(os.str());
  }
  return std::min(gamma, 1.0);
}

KernelEvaluator::KernelEvaluator(std::shared_ptr<const SectionBasis> basis)
    : basis_(std::move(basis)) {
  if (!basis_) throw DomainError("kernel evaluator needs a basis");
}

KernelEvaluator::KernelEvaluator(SectionBasis basis)
    : KernelEvaluator(std::make_shared<const SectionBasis>(std::move(basis))) {}

Eigen::VectorXcd KernelEvaluator::weighted(cplx x) const {
  require_in_disk(model(), x);
  Eigen::VectorXcd v(basis_->dimension());
  basis_->weighted_values(x, std::span<cplx>(v.data(), v.size()));
  return v;
}

double KernelEvaluator::kernel_weighted_magnitude(cplx x, cplx y) const {
  const Eigen::VectorXcd vx = weighted(x);
  const Eigen::VectorXcd vy = weighted(y);
  // vy.dot(vx) = sum conj(vy) vx
  return std::abs(vy.dot(vx));
}

double KernelEvaluator::bergman_diag(cplx x) const { return weighted(x).squaredNorm(); }

Eigen::VectorXcd KernelEvaluator::normalized_values(cplx x) const {
  Eigen::VectorXcd v = weighted(x);
  const double k = v.squaredNorm();
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "diagonal kernel vanishes (or underflows) at " << x;
    throw InvariantViolation(os.str());
  }
  v /= std::sqrt(k);
  return v;
}

Eigen::MatrixXcd KernelEvaluator::normalized_value_matrix(
    const std::vector<cplx>& points) const {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(points.size()), basis_->dimension());
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = normalized_values(points[i]).transpose();
  }
  return m;
}

cplx KernelEvaluator::covariance(cplx x, cplx y) const {
  return normalized_values(y).dot(normalized_values(x));
}

double KernelEvaluator::normalized_kernel(cplx x, cplx y) const {
  return clamp_normalized(std::abs(covariance(x, y)));
}

int minimal_tensor_power(double b0, double bound) {
  for (int n = 3; n < 100'000'000; n = n < 1000 ? n + 1 : n + n / 100) {
    if (b0 * std::sqrt(std::log(double(n)) / n) <= bound) {
      if (n <= 1000) return n;
      // refine backwards across the coarse step
      int m = n;
      while (m > 3 && b0 * std::sqrt(std::log(double(m - 1)) / (m - 1)) <= bound) --m;
      return m;
    }
  }
  throw ResourceError("no admissible tensor power below 1e8");
}

AsymptoticsReport asymptotics_report(const KernelEvaluator& ev, int k, double b0,
                                     const AsymptoticsGrid& grid) {
  const WeightModel& model = ev.model();
  const int n = ev.tensor_power();
  const double eps = model.curvature_floor();
  if (k < 1) throw ConfigError("asymptotics: k must be >= 1");
  if (!(b0 > std::sqrt(16.0 * k / eps))) {
    std::ostringstream os;
    os << "asymptotics: b0 = " << b0 << " must exceed sqrt(16k/eps) = "
       << std::sqrt(16.0 * k / eps);
    throw ConfigError(os.str());
  }
  const double eps0 = model.truncation_radius() / 4.0;
  const double delta = b0 * std::sqrt(std::log(double(n)) / n);
  if (n < 3 || delta > 2.0 * eps0) {
    std::ostringstream os;
    os << "asymptotics: n = " << n << " too small, b0 sqrt(log n / n) = " << delta
       << " exceeds 2 eps0 = " << 2.0 * eps0 << "; minimal n is "
       << minimal_tensor_power(b0, 2.0 * eps0);
    throw ConfigError(os.str());
  }

  AsymptoticsReport rep;
  rep.n = n;
  rep.k = k;
  rep.b0 = b0;
  rep.delta = delta;

  // Near-diagonal fit of -4 log Gamma / n against Psi^2.
  std::vector<cplx> base{cplx(0.0, 0.0)};
  for (int i = 1; i <= grid.base_rings; ++i) {
    for (int a = 0; a < grid.base_angles; ++a) {
      base.push_back(std::polar(eps0 * i / grid.base_rings,
                                2.0 * std::numbers::pi * (a + 0.25 * i) / grid.base_angles));
    }
  }
  for (cplx x : base) {
    const Eigen::VectorXcd vx = ev.normalized_values(x);
    rep.fit_points.emplace_back(0.0, -4.0 * std::log(clamp_normalized(vx.norm() * vx.norm())) / n);
    for (int s = 1; s <= grid.radial_steps; ++s) {
      const double rho = delta * s / grid.radial_steps;
      for (int d = 0; d < grid.directions; ++d) {
        const cplx u = std::polar(rho, 2.0 * std::numbers::pi * (d + 0.1) / grid.directions);
        const double gamma = clamp_normalized(std::abs(ev.normalized_values(x + u).dot(vx)));
        if (gamma <= 0.0) continue;
        rep.fit_points.emplace_back(weighted_distance_sq(model, x, 0.0, u),
                                    -4.0 * std::log(gamma) / n);
      }
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(rep.fit_points.size());
  for (auto [x, y] : rep.fit_points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  for (auto [x, y] : rep.fit_points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  rep.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;

  // Off-diagonal decay over the region |x| <= 2 eps0.
  const double region = 2.0 * eps0;
  std::vector<cplx> pts{cplx(0.0, 0.0)};
  for (int i = 1; i <= grid.region_rings; ++i) {
    for (int a = 0; a < grid.region_angles; ++a) {
      pts.push_back(std::polar(region * i / grid.region_rings,
                               2.0 * std::numbers::pi * (a + 0.5 * (i % 2)) / grid.region_angles));
    }
  }
  const Eigen::MatrixXcd vals = ev.normalized_value_matrix(pts);
  const Eigen::MatrixXcd gram = vals.conjugate() * vals.transpose();
  double worst = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (std::abs(pts[a] - pts[b]) < delta) continue;
      worst = std::max(worst, clamp_normalized(std::abs(gram(a, b))));
    }
    // points at exactly the threshold distance
    for (int d = 0; d < grid.directions; ++d) {
      const cplx y = pts[a] + std::polar(delta, 2.0 * std::numbers::pi * d / grid.directions);
      if (std::abs(y) > region) continue;
      worst = std::max(worst, clamp_normalized(std::abs(
                                  ev.normalized_values(y).dot(vals.row(a).transpose()))));
    }
  }
  rep.offdiag_max_scaled = worst * std::pow(double(n), k);
  return rep;
}

void to_json(nlohmann::json& j, const AsymptoticsReport& r) {
  j = nlohmann::json{{"n", r.n},
                     {"slope", r.slope},
                     {"intercept", r.intercept},
                     {"r2", r.r2},
                     {"offdiag_max_scaled", r.offdiag_max_scaled},
                     {"b0", r.b0},
                     {"k", r.k},
                     {"delta", r.delta}};
}

}  // namespace gaf
