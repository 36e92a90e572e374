#pragma once

// Reproducible standard complex Gaussians and random sections
// s_n = sum_j xi_j f_j e_L^n.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gaf/basis.hpp"

namespace gaf {

/// Philox4x32-10 counter-based block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Stream of standard complex Gaussians W = X + iY, X, Y ~ N(0, 1/2)
/// independent. The output is a pure function of (master_seed,
/// stream_index, position), so any partition of work over threads
/// reproduces the same numbers.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : seed_(master_seed), stream_(stream_index) {}

  cplx next();
  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
};

std::vector<cplx> sample_std_complex_gaussians(GaussianStream& stream, std::size_t count);

struct RandomSection {
  std::vector<cplx> coeffs;
  std::shared_ptr<const SectionBasis> basis;
};

RandomSection draw_section(std::shared_ptr<const SectionBasis> basis, GaussianStream& stream);

/// Section with prescribed coefficients (e.g. unit vectors in tests).
RandomSection make_section(std::shared_ptr<const SectionBasis> basis, std::vector<cplx> coeffs);

/// |s_n(x)|_{h^n}.
double evaluate_section_weighted(const RandomSection& sec, cplx x);

/// |alpha_n(x)| = |s_n(x)|_{h^n} / sqrt(K_n(x,x)).
double normalized_process_abs(const RandomSection& sec, cplx x);

struct SectionPoint {
  cplx weighted_value;  // s_n(x) in the unit frame
  double kernel_diag;   // K_n(x,x)
};

/// Both quantities from one pass over the basis; `scratch` is resized as needed.
SectionPoint evaluate_section_point(const RandomSection& sec, cplx x,
                                    std::vector<cplx>& scratch);

}  // namespace gaf
