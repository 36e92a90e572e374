#include "gaf/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gaf/errors.hpp"

namespace gaf {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kLeadingTrim = 1e-14;

struct NewtonStep {
  cplx correction;   // p(z) / p'(z)
  double residual;   // |p(z)| / sum |a_k| |z|^k
};

// Horner for |z| <= 1, reversed polynomial in 1/z otherwise, so nothing
// overflows for roots far outside the unit disk.
NewtonStep newton_step(std::span<const cplx> a, cplx z) {
  const int d = static_cast<int>(a.size()) - 1;
  if (std::norm(z) <= 1.0) {
    cplx p = a[d], dp(0.0, 0.0);
    double bnd = std::abs(a[d]);
    const double az = std::abs(z);
    for (int k = d - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + a[k];
      bnd = bnd * az + std::abs(a[k]);
    }
    const double res = bnd > 0.0 ? std::abs(p) / bnd : 0.0;
    if (p == cplx(0.0, 0.0)) return {cplx(0.0, 0.0), 0.0};
    return {p / dp, res};
  }
  const cplx y = 1.0 / z;
  const double ay = std::abs(y);
  cplx q = a[0], dq(0.0, 0.0);
  double bnd = std::abs(a[0]);
  for (int k = 1; k <= d; ++k) {
    dq = dq * y + q;
    q = q * y + a[k];
    bnd = bnd * ay + std::abs(a[k]);
  }
  const double res = bnd > 0.0 ? std::abs(q) / bnd : 0.0;
  if (q == cplx(0.0, 0.0)) return {cplx(0.0, 0.0), 0.0};
  // p'/p = y (d - y q'/q)
  return {z / (static_cast<double>(d) - y * dq / q), res};
}

// Initial approximations on circles read off the upper convex hull of
// (k, log|a_k|), following Bini's recipe.
std::vector<cplx> newton_polygon_start(std::span<const cplx> a) {
  const int d = static_cast<int>(a.size()) - 1;
  std::vector<int> idx;
  std::vector<double> la(a.size());
  for (int k = 0; k <= d; ++k) {
    la[k] = std::abs(a[k]) > 0.0 ? std::log(std::abs(a[k]))
                                 : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> hull;
  for (int k = 0; k <= d; ++k) {
    if (!std::isfinite(la[k])) continue;
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      // drop j if it lies on or below the chord i -> k
      const double cross = (j - i) * (la[k] - la[i]) - (k - i) * (la[j] - la[i]);
      if (cross >= 0.0) hull.pop_back(); else break;
    }
    hull.push_back(k);
  }
  constexpr double kSigma = 0.7;
  std::vector<cplx> z;
  z.reserve(d);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int i = hull[h], j = hull[h + 1];
    const int m = j - i;
    const double u = std::exp((la[i] - la[j]) / m);
    for (int l = 0; l < m; ++l) {
      const double ang = 2.0 * std::numbers::pi * (double(l) / m + double(i) / d) + kSigma;
      z.push_back(std::polar(u, ang));
    }
  }
  return z;
}

std::vector<cplx> aberth(std::span<const cplx> a, const RootFinderOptions& opt) {
  const int d = static_cast<int>(a.size()) - 1;
  std::vector<cplx> z = newton_polygon_start(a);
  std::vector<char> done(z.size(), 0);
  const double stop = 4.0 * d * kEps;
  int remaining = d;
  int iter = 0;
  for (; iter < opt.max_iterations && remaining > 0; ++iter) {
    for (int i = 0; i < d; ++i) {
      if (done[i]) continue;
      const NewtonStep st = newton_step(a, z[i]);
      if (st.residual <= stop) {
        done[i] = 1;
        --remaining;
        continue;
      }
      cplx s(0.0, 0.0);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        const cplx diff = z[i] - z[j];
        s += std::conj(diff) / std::norm(diff);
      }
      const cplx w = st.correction / (1.0 - st.correction * s);
      if (std::isfinite(w.real()) && std::isfinite(w.imag())) z[i] -= w;
    }
  }
  if (remaining > 0) {
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      if (!done[i]) worst = std::max(worst, newton_step(a, z[i]).residual);
    }
    std::ostringstream os;
    os << "Aberth iteration did not converge: " << remaining << " of " << d
       << " roots unconverged after " << iter << " iterations (worst scaled residual "
       << worst << ")";
    throw RootFinderError(os.str());
  }
  return z;
}

}  // namespace

int Divisor::total_multiplicity() const {
  return std::accumulate(points.begin(), points.end(), 0,
                         [](int acc, const DivisorPoint& p) { return acc + p.multiplicity; });
}

std::vector<cplx> polynomial_part(const RandomSection& sec) {
  return sec.basis->polynomial_coefficients(sec.coeffs);
}

double scaled_residual(std::span<const cplx> p, cplx z) {
  if (p.empty()) return 0.0;
  return newton_step(p, z).residual;
}

Divisor find_zeros(std::span<const cplx> p, const RootFinderOptions& opt) {
  double norm = 0.0;
  for (cplx c : p) norm = std::max(norm, std::abs(c));
  if (!(norm > 0.0)) {
    throw DegenerateSectionError("polynomial part is identically zero");
  }
  if (!std::isfinite(norm)) throw RootFinderError("non-finite polynomial coefficients");

  int top = static_cast<int>(p.size()) - 1;
  while (top > 0 && std::abs(p[top]) <= kLeadingTrim * norm) --top;
  int low = 0;
  while (low < top && p[low] == cplx(0.0, 0.0)) ++low;

  std::vector<cplx> a(p.begin() + low, p.begin() + top + 1);
  for (auto& c : a) c /= norm;
  const int d = top - low;

  std::vector<cplx> roots(static_cast<std::size_t>(low), cplx(0.0, 0.0));
  if (d == 1) {
    roots.push_back(-a[0] / a[1]);
  } else if (d > 1) {
    std::vector<cplx> z = aberth(a, opt);
    for (cplx& r : z) {
      for (int s = 0; s < opt.max_polish_steps; ++s) {
        const NewtonStep st = newton_step(a, r);
        if (st.residual <= opt.polish_tol * 1e-2) break;
        const cplx next = r - st.correction;
        if (!(newton_step(a, next).residual < st.residual)) break;
        r = next;
      }
      const double res = newton_step(a, r).residual;
      if (res > opt.polish_tol) {
        std::ostringstream os;
        os << "root " << r << " polished only to scaled residual " << res
           << " (tolerance " << opt.polish_tol << ")";
        throw RootFinderError(os.str());
      }
      roots.push_back(r);
    }
  }

  // Cluster nearby approximations into multiple roots (union-find).
  const double radius = 10.0 * std::sqrt(opt.polish_tol);
  std::vector<int> parent(roots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double scale = std::max(1.0, std::abs(roots[i]));
      if (std::abs(roots[i] - roots[j]) <= radius * scale) {
        parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
      }
    }
  }
  std::vector<cplx> sum(roots.size(), cplx(0.0, 0.0));
  std::vector<int> count(roots.size(), 0);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const int r = find(static_cast<int>(i));
    sum[r] += roots[i];
    ++count[r];
  }
  Divisor div;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (count[i] > 0) div.points.push_back({sum[i] / double(count[i]), count[i]});
  }
  return div;
}

double divisor_pairing(const Divisor& div, const TestForm& form) {
  double acc = 0.0;
  for (const auto& pt : div.points) acc += pt.multiplicity * form.value(pt.location);
  return acc;
}

}  // namespace gaf
