#include "gaf/quadrature.hpp"

#include <numbers>

namespace gaf {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton on P_n from the usual cosine initial guesses; symmetric halves.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule composite_gauss_legendre(double a, double b, int panels,
                                   int nodes_per_panel) {
  if (panels < 1) throw DomainError("composite rule needs at least one panel");
  const GaussRule base = gauss_legendre(nodes_per_panel);
  GaussRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
  rule.weights.reserve(rule.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      rule.nodes.push_back(c + 0.5 * h * base.nodes[i]);
      rule.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return rule;
}

DiskRule polar_disk_rule(double radius, int radial_panels, int radial_nodes,
                         int angular_nodes, double angle_offset) {
  if (angular_nodes < 1) throw DomainError("angular node count must be positive");
  const GaussRule radial = composite_gauss_legendre(0.0, radius, radial_panels, radial_nodes);
  DiskRule rule;
  rule.points.reserve(radial.nodes.size() * angular_nodes);
  rule.weights.reserve(rule.points.capacity());
  const double dt = 2.0 * std::numbers::pi / angular_nodes;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    const double w = radial.weights[i] * r * dt;
    for (int t = 0; t < angular_nodes; ++t) {
      rule.points.push_back(std::polar(r, angle_offset + t * dt));
      rule.weights.push_back(w);
    }
  }
  return rule;
}

}  // namespace gaf
