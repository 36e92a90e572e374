#pragma once

// Gauss-Legendre rules and polar-coordinate rules on disks.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gaf/errors.hpp"

namespace gaf {

using cplx = std::complex<double>;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// Composite rule: `panels` equal panels on [a, b], `nodes_per_panel` each.
GaussRule composite_gauss_legendre(double a, double b, int panels,
                                   int nodes_per_panel);

struct DiskRule {
  std::vector<cplx> points;
  std::vector<double> weights;  // include the polar Jacobian
  std::size_t size() const { return points.size(); }
};

/// Tensor rule on the disk |z| <= radius: composite Gauss-Legendre in the
/// radius, uniform trapezoid in the angle (exact for trigonometric
/// polynomials of degree < angular_nodes).
DiskRule polar_disk_rule(double radius, int radial_panels, int radial_nodes,
                         int angular_nodes, double angle_offset = 0.0);

/// Thrown when an integrand is non-finite at a node (e.g. log of an exact zero).
struct SingularNodeError : NumericalError {
  using NumericalError::NumericalError;
};

struct AdaptivePolarOptions {
  int radial_cells = 8;
  int angular_cells = 16;
  int cell_nodes = 4;
  int max_level = 5;
  double cell_tol = 1e-7;
};

namespace detail {

template <std::size_t N, class F>
class AdaptivePolarIntegrator {
 public:
  using Value = std::array<double, N>;

  AdaptivePolarIntegrator(F& f, const AdaptivePolarOptions& opt)
      : f_(f), opt_(opt), rule_(gauss_legendre(opt.cell_nodes)) {}

  Value cell(double r0, double r1, double t0, double t1) const {
    Value acc{};
    const double hr = 0.5 * (r1 - r0), cr = 0.5 * (r1 + r0);
    const double ht = 0.5 * (t1 - t0), ct = 0.5 * (t1 + t0);
    for (std::size_t a = 0; a < rule_.nodes.size(); ++a) {
      const double r = cr + hr * rule_.nodes[a];
      const double wr = rule_.weights[a] * hr * r;
      for (std::size_t b = 0; b < rule_.nodes.size(); ++b) {
        const double t = ct + ht * rule_.nodes[b];
        const Value v = f_(std::polar(r, t));
        const double w = wr * rule_.weights[b] * ht;
        for (std::size_t c = 0; c < N; ++c) {
          if (!std::isfinite(v[c])) {
            throw SingularNodeError("non-finite integrand at a quadrature node");
          }
          acc[c] += w * v[c];
        }
      }
    }
    return acc;
  }

  Value refine(double r0, double r1, double t0, double t1, const Value& coarse,
               int level) {
    const double rm = 0.5 * (r0 + r1), tm = 0.5 * (t0 + t1);
    const std::array<std::array<double, 4>, 4> kids{{{r0, rm, t0, tm},
                                                     {rm, r1, t0, tm},
                                                     {r0, rm, tm, t1},
                                                     {rm, r1, tm, t1}}};
    std::array<Value, 4> est;
    Value fine{};
    for (int k = 0; k < 4; ++k) {
      est[k] = cell(kids[k][0], kids[k][1], kids[k][2], kids[k][3]);
      for (std::size_t c = 0; c < N; ++c) fine[c] += est[k][c];
    }
    if (level >= opt_.max_level || std::abs(fine[0] - coarse[0]) <= opt_.cell_tol) {
      return fine;
    }
    Value acc{};
    for (int k = 0; k < 4; ++k) {
      const Value v = refine(kids[k][0], kids[k][1], kids[k][2], kids[k][3],
                             est[k], level + 1);
      for (std::size_t c = 0; c < N; ++c) acc[c] += v[c];
    }
    return acc;
  }

 private:
  F& f_;
  AdaptivePolarOptions opt_;
  GaussRule rule_;
};

}  // namespace detail

/// Integrates a vector-valued f over |z| <= radius with dyadic refinement of
/// polar cells. Refinement is driven by component 0 alone; the other
/// components ride along on the same nodes. Capped at opt.max_level.
template <std::size_t N, class F>
std::array<double, N> integrate_adaptive_polar(F&& f, double radius,
                                               const AdaptivePolarOptions& opt,
                                               double angle_offset = 0.0) {
  detail::AdaptivePolarIntegrator<N, std::remove_reference_t<F>> integ(f, opt);
  std::array<double, N> total{};
  const double dr = radius / opt.radial_cells;
  const double dt = 2.0 * std::numbers::pi / opt.angular_cells;
  for (int i = 0; i < opt.radial_cells; ++i) {
    for (int j = 0; j < opt.angular_cells; ++j) {
      const double r0 = i * dr, r1 = (i + 1) * dr;
      const double t0 = angle_offset + j * dt, t1 = t0 + dt;
      const auto coarse = integ.cell(r0, r1, t0, t1);
      const auto v = integ.refine(r0, r1, t0, t1, coarse, 1);
      for (std::size_t c = 0; c < N; ++c) total[c] += v[c];
    }
  }
  return total;
}

}  // namespace gaf
