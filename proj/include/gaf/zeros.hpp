#pragma once

// Zero divisors of sections at m = 1: roots, with multiplicity, of the
// polynomial part p with s_n = p e_L^n.

#include <span>
#include <vector>

#include "gaf/geometry.hpp"
#include "gaf/sampling.hpp"

namespace gaf {

struct DivisorPoint {
  cplx location;
  int multiplicity = 1;
};

struct Divisor {
  std::vector<DivisorPoint> points;
  int total_multiplicity() const;
};

std::vector<cplx> polynomial_part(const RandomSection& sec);

struct RootFinderOptions {
  double polish_tol = 1e-12;
  int max_iterations = 600;
  int max_polish_steps = 8;
};

/// All complex roots of p (coefficients in increasing degree) by
/// Aberth-Ehrlich iteration started on Newton-polygon circles, Newton
/// polishing, and clustering within 10 sqrt(polish_tol) for multiplicities.
Divisor find_zeros(std::span<const cplx> p, const RootFinderOptions& opt = {});

/// <[Div], form> = sum of multiplicity * form(point).
double divisor_pairing(const Divisor& div, const TestForm& form);

/// Relative backward error |p(z)| / sum_k |p_k| |z|^k.
double scaled_residual(std::span<const cplx> p, cplx z);

}  // namespace gaf
