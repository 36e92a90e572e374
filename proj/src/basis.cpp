#include "gaf/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaf/errors.hpp"
#include "gaf/quadrature.hpp"

namespace gaf {
namespace {

constexpr double kPi = std::numbers::pi;
// exp(-40) ~ 4e-18: the 1e-16 mass cut with margin for the Jacobian.
constexpr double kMassCutLog = 40.0;
constexpr int kAngularProbe = 64;

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double min_weight_on_circle(const WeightModel& model, double r) {
  if (model.is_radial() || r == 0.0) return model.weight(cplx(r, 0.0));
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < kAngularProbe; ++t) {
    m = std::min(m, model.weight(std::polar(r, 2.0 * kPi * t / kAngularProbe)));
  }
  return m;
}

int angular_count(const QuadratureSpec& quad, int degree) {
  return std::max(quad.angular_nodes, 4 * degree + 8);
}

// Per-radial-node data shared by the diagonal and off-diagonal Gram passes.
struct RadialSlice {
  double r = 0.0;
  double log_base = 0.0;  // log(w_r r) - n phi_min(r)
  double log_r = 0.0;
  std::vector<cplx> moments;  // A_m = (1/M) sum_t e^{i m t} e^{-n(phi - phi_min)}, scaled by 2pi
};

std::vector<RadialSlice> radial_slices(const WeightModel& model, int n, double rq,
                                       int panels, int nodes, int angular,
                                       int max_moment) {
  const GaussRule rule = composite_gauss_legendre(0.0, rq, panels, nodes);
  std::vector<RadialSlice> out(rule.nodes.size());
  const double dt = 2.0 * kPi / angular;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    RadialSlice& s = out[i];
    s.r = rule.nodes[i];
    s.log_r = std::log(s.r);
    const double pmin = min_weight_on_circle(model, s.r);
    s.moments.assign(static_cast<std::size_t>(max_moment) + 1, cplx(0.0, 0.0));
    if (model.is_radial()) {
      s.moments[0] = 2.0 * kPi;
    } else {
      for (int t = 0; t < angular; ++t) {
        const double theta = t * dt;
        const double w = std::exp(-n * (model.weight(std::polar(s.r, theta)) - pmin)) * dt;
        const cplx step = std::polar(1.0, theta);
        cplx ph(1.0, 0.0);
        for (int m = 0; m <= max_moment; ++m) {
          s.moments[m] += w * ph;
          ph *= step;
        }
      }
    }
    s.log_base = std::log(rule.weights[i] * s.r) - n * pmin;
  }
  return out;
}

std::vector<double> log_diagonal_gram(const std::vector<RadialSlice>& slices,
                                      int degree) {
  std::vector<double> out(static_cast<std::size_t>(degree) + 1);
  std::vector<double> terms(slices.size());
  for (int k = 0; k <= degree; ++k) {
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const double a = slices[i].moments[0].real();
      terms[i] = a > 0.0 ? slices[i].log_base + std::log(a) + 2.0 * k * slices[i].log_r
                         : -std::numeric_limits<double>::infinity();
    }
    out[k] = log_sum_exp(terms);
  }
  return out;
}

// Scaled Gram matrix G[j][k] / (s_j s_k), with <z^j, z^k> = int z^j conj(z)^k.
Eigen::MatrixXcd scaled_gram(const std::vector<RadialSlice>& slices,
                             const std::vector<double>& log_scale, int degree,
                             bool radial) {
  const int dim = degree + 1;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k <= j; ++k) {
      if (radial && j != k) continue;
      cplx acc(0.0, 0.0);
      for (const RadialSlice& s : slices) {
        const double lg = s.log_base + (j + k) * s.log_r - log_scale[j] - log_scale[k];
        if (lg < -745.0) continue;
        acc += std::exp(lg) * s.moments[j - k];
      }
      g(j, k) = acc;
      g(k, j) = std::conj(acc);
    }
  }
  return g;
}

struct GramResult {
  std::vector<double> log_scale;
  Eigen::MatrixXcd scaled;        // at the accepted resolution
  Eigen::MatrixXcd scaled_check;  // at doubled resolution
};

GramResult converged_gram(const WeightModel& model, int n, int degree,
                          const QuadratureSpec& quad) {
  const double rq = quadrature_radius(model, n, degree);
  const bool radial = model.is_radial();
  const int max_moment = radial ? 0 : degree;
  int panels = quad.radial_panels;
  int angular = angular_count(quad, degree);

  auto slices = radial_slices(model, n, rq, panels, quad.radial_nodes, angular, max_moment);
  auto log_g = log_diagonal_gram(slices, degree);
  for (int attempt = 0; attempt <= quad.max_refinements; ++attempt) {
    auto fine = radial_slices(model, n, rq, 2 * panels, quad.radial_nodes,
                              radial ? angular : 2 * angular, max_moment);
    auto log_fine = log_diagonal_gram(fine, degree);
    double diff = 0.0;
    for (int k = 0; k <= degree; ++k) diff = std::max(diff, std::abs(log_g[k] - log_fine[k]));

    GramResult res;
    res.log_scale.resize(log_g.size());
    for (std::size_t k = 0; k < log_g.size(); ++k) res.log_scale[k] = 0.5 * log_g[k];
    if (diff <= quad.rel_tol) {
      res.scaled = scaled_gram(slices, res.log_scale, degree, radial);
      res.scaled_check = scaled_gram(fine, res.log_scale, degree, radial);
      const double off = (res.scaled - res.scaled_check).cwiseAbs().maxCoeff();
      if (off <= quad.rel_tol) return res;
      diff = off;
    }
    if (attempt == quad.max_refinements) {
      std::ostringstream os;
      os << "Gram quadrature did not converge: successive refinements differ by "
         << diff << " (tolerance " << quad.rel_tol << ", n=" << n << ", D=" << degree << ")";
      throw NumericalError(os.str());
    }
    panels *= 2;
    if (!radial) angular *= 2;
    slices = std::move(fine);
    log_g = std::move(log_fine);
  }
  throw NumericalError("unreachable");
}

// Cholesky G = L L^H that names the first failing leading minor.
Eigen::MatrixXcd cholesky_lower(const Eigen::MatrixXcd& g) {
  const Eigen::Index dim = g.rows();
  {
    const Eigen::LLT<Eigen::MatrixXcd> llt(g);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXcd l = llt.matrixL();
      bool ok = true;
      for (Eigen::Index j = 0; j < dim && ok; ++j) {
        ok = std::norm(l(j, j)) > 1e-14 * std::abs(g(j, j).real());
      }
      if (ok) return l;
    }
  }
  // Slow path, only to locate the failing minor.

  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    double d = g(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 1e-14 * std::abs(g(j, j).real()))) {
      std::ostringstream os;
      os << "Gram matrix is not positive definite at working precision: leading minor "
         << (j + 1) << " of " << dim << " has pivot " << d;
      throw IllConditionedError(os.str(), static_cast<int>(j + 1));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < dim; ++i) {
      cplx s = g(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double identity_residual(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& g) {
  const Eigen::MatrixXcd m = c * g * c.adjoint();
  return (m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

void require_positive(int n, int degree) {
  if (n < 1) throw DomainError("tensor power must be positive");
  if (degree < 0) throw DomainError("degree must be nonnegative");
}

}  // namespace

double quadrature_radius(const WeightModel& model, int n, int degree) {
  // log density of |z|^(2D) e^{-n phi} against r dr, for the top degree.
  auto g = [&](double r) {
    return (2.0 * degree + 1.0) * std::log(r) - n * min_weight_on_circle(model, r);
  };
  const double scale = std::max(model.truncation_radius(), 1e-3);
  const double h = scale * 1e-3;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 10'000'000; ++i) {
    const double r = i * h;
    const double v = g(r);
    if (!std::isfinite(v)) break;
    best = std::max(best, v);
    if (v < best - kMassCutLog && r > scale * 1e-2) return r;
    if (r > 1e3 * scale) break;
  }
  throw NumericalError("weight does not confine mass: no quadrature radius found");
}

cplx SectionBasis::coefficient(int j, int k) const {
  return scaled_(j, k) * std::exp(-log_scale_[k]);
}

Eigen::MatrixXcd SectionBasis::coefficient_matrix() const {
  Eigen::MatrixXcd c(dimension(), dimension());
  for (int j = 0; j < dimension(); ++j)
    for (int k = 0; k < dimension(); ++k) c(j, k) = coefficient(j, k);
  return c;
}

void SectionBasis::set_log_scale(std::vector<double> log_scale) {
  log_scale_ = std::move(log_scale);
  ratio_.assign(log_scale_.size(), 0.0);
  ratio4_.assign(log_scale_.size(), 0.0);
  for (std::size_t k = 1; k < log_scale_.size(); ++k) {
    ratio_[k] = std::exp(log_scale_[k - 1] - log_scale_[k]);
    if (k >= 4) ratio4_[k] = std::exp(log_scale_[k - 4] - log_scale_[k]);
  }
}

void SectionBasis::scaled_monomials(cplx x, std::span<cplx> out) const {
  const double half_weight = 0.5 * n_ * model_.weight(x);
  const double lead = -half_weight - log_scale_[0];
  if (lead > -600.0) {
    // Spelled out: std::complex multiplication carries NaN recovery that
    // dominates this loop.
    // Four interleaved chains stepping by x^4 hide the multiply latency.
    double re = std::exp(lead), im = 0.0;
    const double xr = x.real(), xi = x.imag();
    out[0] = cplx(re, 0.0);
    const int head = std::min(degree_, 3);
    for (int k = 1; k <= head; ++k) {
      const double nr = (re * xr - im * xi) * ratio_[k];
      im = (re * xi + im * xr) * ratio_[k];
      re = nr;
      out[k] = cplx(re, im);
    }
    const double x2r = xr * xr - xi * xi, x2i = 2.0 * xr * xi;
    const double x4r = x2r * x2r - x2i * x2i, x4i = 2.0 * x2r * x2i;
    for (int k = 4; k <= degree_; ++k) {
      const double pr = out[k - 4].real(), pi = out[k - 4].imag();
      out[k] = cplx((pr * x4r - pi * x4i) * ratio4_[k], (pr * x4i + pi * x4r) * ratio4_[k]);
    }
    return;
  }
  // Far from the origin the leading term underflows; go term by term.
  const double ax = std::abs(x);
  if (ax == 0.0) {
    std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
    out[0] = std::exp(lead);
    return;
  }
  const double lr = std::log(ax);
  const cplx unit = x / ax;
  cplx ph(1.0, 0.0);
  for (int k = 0; k <= degree_; ++k) {
    if (k > 0) ph *= unit;
    out[k] = std::exp(k * lr - half_weight - log_scale_[k]) * ph;
  }
}

void SectionBasis::weighted_values(cplx x, std::span<cplx> out) const {
  scaled_monomials(x, out);
  if (closed_form_) return;
  if (diagonal_) {
    for (int j = 0; j <= degree_; ++j) out[j] *= scaled_(j, j);
    return;
  }
  const Eigen::Map<const Eigen::VectorXcd> m(out.data(), dimension());
  const Eigen::VectorXcd v = scaled_ * m;
  std::copy(v.data(), v.data() + dimension(), out.begin());
}

std::vector<cplx> SectionBasis::weighted_values(cplx x) const {
  std::vector<cplx> out(static_cast<std::size_t>(dimension()));
  weighted_values(x, out);
  return out;
}

std::vector<cplx> SectionBasis::polynomial_coefficients(std::span<const cplx> xi) const {
  if (static_cast<int>(xi.size()) != dimension()) {
    throw DomainError("coefficient vector length does not match basis dimension");
  }
  std::vector<cplx> p(xi.size());
  for (int k = 0; k <= degree_; ++k) {
    cplx q(0.0, 0.0);
    if (diagonal_) {
      q = xi[k] * scaled_(k, k);
    } else {
      for (int j = 0; j <= degree_; ++j) q += xi[j] * scaled_(j, k);
    }
    p[k] = q * std::exp(-log_scale_[k]);
    if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag())) {
      throw NumericalError("polynomial coefficient overflow at degree " + std::to_string(k));
    }
  }
  return p;
}

void SectionBasis::perturb_coefficient_for_testing(int j, int k, cplx factor) {
  scaled_(j, k) *= factor;
  if (j != k) diagonal_ = false;
}

cplx weighted_inner_product(std::span<const cplx> f, std::span<const cplx> g,
                            const WeightModel& model, int n,
                            const QuadratureSpec& quad) {
  if (n < 1) throw DomainError("tensor power must be positive");
  const int deg = static_cast<int>(std::max(f.size(), g.size())) - 1;
  const double rq = quadrature_radius(model, n, std::max(deg, 0));
  auto horner = [](std::span<const cplx> c, cplx z) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
  };
  auto integrate = [&](int panels, int angular, double& abs_mass) {
    const DiskRule rule = polar_disk_rule(rq, panels, quad.radial_nodes, angular);
    cplx acc(0.0, 0.0);
    abs_mass = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const cplx z = rule.points[i];
      const double w = rule.weights[i] * std::exp(-n * model.weight(z));
      const cplx v = horner(f, z) * std::conj(horner(g, z));
      acc += w * v;
      abs_mass += w * std::abs(v);
    }
    return acc;
  };
  int panels = quad.radial_panels;
  int angular = angular_count(quad, std::max(deg, 0));
  double mass = 0.0, mass_fine = 0.0;
  cplx coarse = integrate(panels, angular, mass);
  for (int attempt = 0; attempt <= quad.max_refinements; ++attempt) {
    const cplx fine = integrate(2 * panels, 2 * angular, mass_fine);
    const double diff = std::abs(fine - coarse);
    if (diff <= quad.rel_tol * std::max(mass_fine, std::abs(fine))) return fine;
    if (attempt == quad.max_refinements) {
      std::ostringstream os;
      os << "inner product quadrature did not converge: refinements differ by " << diff;
      throw NumericalError(os.str());
    }
    panels *= 2;
    angular *= 2;
    coarse = fine;
  }
  throw NumericalError("unreachable");
}

SectionBasis build_basis_closed_form(const WeightModel& model, int n, int degree) {
  require_positive(n, degree);
  if (model.kind() != WeightKind::BargmannFock) {
    throw DomainError("closed-form basis is only available for the Bargmann-Fock weight");
  }
  SectionBasis b(model);
  b.n_ = n;
  b.degree_ = degree;
  b.closed_form_ = true;
  b.diagonal_ = true;
  // ||z^k||^2 = pi k! / n^(k+1), in log space.
  std::vector<double> ls(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) {
    ls[k] = 0.5 * (std::log(kPi) + std::lgamma(k + 1.0) - (k + 1.0) * std::log(double(n)));
    if (!std::isfinite(ls[k])) throw NumericalError("non-finite closed-form normalisation");
  }
  b.set_log_scale(std::move(ls));
  b.scaled_ = Eigen::MatrixXcd::Identity(degree + 1, degree + 1);

  // One verification pass: numerical monomial norms against the closed form.
  const QuadratureSpec quad;
  const double rq = quadrature_radius(model, n, degree);
  const auto slices = radial_slices(model, n, rq, 2 * quad.radial_panels, quad.radial_nodes,
                                    1, 0);
  const auto log_g = log_diagonal_gram(slices, degree);
  double res = 0.0;
  for (int k = 0; k <= degree; ++k) {
    res = std::max(res, std::abs(std::expm1(log_g[k] - 2.0 * b.log_scale_[k])));
  }
  b.gram_residual_ = res;
  return b;
}

SectionBasis build_basis_numeric(const WeightModel& model, int n, int degree,
                                 const QuadratureSpec& quad, MonomialOrder order) {
  require_positive(n, degree);
  GramResult gram = converged_gram(model, n, degree, quad);
  const int dim = degree + 1;

  SectionBasis b(model);
  b.n_ = n;
  b.degree_ = degree;
  b.closed_form_ = false;
  b.set_log_scale(std::move(gram.log_scale));

  if (model.is_radial()) {
    // Monomials are exactly orthogonal; Gram-Schmidt only rescales, in
    // either order.
    b.scaled_ = Eigen::MatrixXcd::Zero(dim, dim);
    double worst = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double d = gram.scaled(j, j).real();
      if (!(d > 0.0)) {
        std::ostringstream os;
        os << "Gram matrix is not positive definite: leading minor " << (j + 1) << " of " << dim
           << " has pivot " << d;
        throw IllConditionedError(os.str(), j + 1);
      }
      b.scaled_(j, j) = 1.0 / std::sqrt(d);
      worst = std::max(worst, std::abs(gram.scaled_check(j, j).real() / d - 1.0));
    }
    b.diagonal_ = true;
    b.gram_residual_ = worst;
    return b;
  }

  Eigen::MatrixXcd perm = Eigen::MatrixXcd::Identity(dim, dim);
  if (order == MonomialOrder::Reversed) perm = perm.rowwise().reverse().eval();
  const Eigen::MatrixXcd g = perm * gram.scaled * perm.transpose();
  const Eigen::MatrixXcd l = cholesky_lower(g);
  const Eigen::MatrixXcd inv =
      l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(dim, dim));
  b.scaled_ = inv * perm;

  const Eigen::MatrixXcd offdiag =
      b.scaled_ - Eigen::MatrixXcd(b.scaled_.diagonal().asDiagonal());
  b.diagonal_ = offdiag.cwiseAbs().maxCoeff() == 0.0;
  b.gram_residual_ = identity_residual(b.scaled_, gram.scaled_check);
  return b;
}

namespace {

int poisson_truncation(double lambda, double tol, int cap) {
  // tail(D) = P(Poisson(lambda) > D) is the relative truncation error of the
  // diagonal kernel at |x|^2 n = lambda; it grows with lambda, so the disk
  // boundary is the worst point.
  const int top = cap + static_cast<int>(lambda + 40.0 * std::sqrt(lambda + 1.0)) + 200;
  std::vector<double> term(static_cast<std::size_t>(top) + 1);
  const double ll = lambda > 0.0 ? std::log(lambda) : -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= top; ++j) {
    term[j] = (j == 0) ? std::exp(-lambda)
                       : std::exp(-lambda + j * ll - std::lgamma(j + 1.0));
  }
  double tail = 0.0;
  std::vector<double> tails(static_cast<std::size_t>(top) + 1);
  for (int j = top; j >= 0; --j) {
    tails[j] = tail;  // sum over i > j
    tail += term[j];
  }
  for (int d = 0; d <= cap; ++d) {
    if (tails[d] <= tol) return d;
  }
  std::ostringstream os;
  os << "truncation degree exceeds the cap " << cap << " (lambda=" << lambda
     << ", tol=" << tol << ")";
  throw ResourceError(os.str());
}

std::vector<cplx> kernel_probe_points(double radius) {
  std::vector<cplx> pts{cplx(0.0, 0.0)};
  for (int i = 1; i <= 8; ++i) {
    for (int t = 0; t < 16; ++t) {
      pts.push_back(std::polar(radius * i / 8.0, 2.0 * kPi * (t + 0.5 * (i % 2)) / 16.0));
    }
  }
  return pts;
}

}  // namespace

int truncation_degree(const WeightModel& model, int n, double radius, double tol,
                      int cap, const QuadratureSpec& quad) {
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("truncation tolerance must lie in (0, 1)");
  if (n < 1) throw DomainError("tensor power must be positive");
  if (model.kind() == WeightKind::BargmannFock) {
    return poisson_truncation(n * radius * radius, tol, cap);
  }
  const auto pts = kernel_probe_points(radius);
  int d = 8;
  while (true) {
    if (d > cap) {
      std::ostringstream os;
      os << "truncation degree exceeds the cap " << cap << " (n=" << n << ")";
      throw ResourceError(os.str());
    }
    const int ref = std::min(2 * d, std::max(cap, d));
    const SectionBasis b = build_basis_numeric(model, n, ref, quad);
    // Gram-Schmidt in monomial order: the first k+1 elements span degree <= k,
    // so prefix sums give every truncated kernel at once.
    std::vector<double> worst(static_cast<std::size_t>(ref) + 1, 0.0);
    std::vector<cplx> v(static_cast<std::size_t>(ref) + 1);
    for (cplx x : pts) {
      b.weighted_values(x, v);
      std::vector<double> prefix(v.size());
      double acc = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) prefix[j] = (acc += std::norm(v[j]));
      for (std::size_t j = 0; j < v.size(); ++j) {
        worst[j] = std::max(worst[j], std::abs(acc - prefix[j]) / acc);
      }
    }
    if (worst[std::min(d, ref)] <= tol) {
      for (int k = 0; k <= d; ++k) {
        if (worst[k] <= tol) return k;
      }
    }
    if (ref >= cap) {
      std::ostringstream os;
      os << "truncation degree exceeds the cap " << cap << " (n=" << n << ")";
      throw ResourceError(os.str());
    }
    d *= 2;
  }
}

}  // namespace gaf
