#include "gaf/sampling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gaf/errors.hpp"

namespace gaf {
namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

void require_in_disk(const RandomSection& sec, cplx x) {
  if (!sec.basis->model().contains(x)) {
    std::ostringstream os;
    os << "section evaluation at " << x << " outside the truncation disk";
    throw DomainError(os.str());
  }
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

cplx GaussianStream::next() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  ++block_;
  const auto r = philox4x32_10(ctr, key);
  // Box-Muller in polar form: |W|^2 ~ Exp(1), arg W uniform.
  const double u1 = to_open_unit(r[0], r[1]);
  const double u2 = to_open_unit(r[2], r[3]);
  return std::polar(std::sqrt(-std::log(u1)), 2.0 * std::numbers::pi * u2);
}

std::vector<cplx> sample_std_complex_gaussians(GaussianStream& stream, std::size_t count) {
  std::vector<cplx> out(count);
  for (auto& w : out) w = stream.next();
  return out;
}

RandomSection draw_section(std::shared_ptr<const SectionBasis> basis, GaussianStream& stream) {
  if (!basis) throw DomainError("draw_section needs a basis");
  RandomSection sec;
  sec.coeffs = sample_std_complex_gaussians(stream, static_cast<std::size_t>(basis->dimension()));
  sec.basis = std::move(basis);
  return sec;
}

RandomSection make_section(std::shared_ptr<const SectionBasis> basis, std::vector<cplx> coeffs) {
  if (!basis) throw DomainError("make_section needs a basis");
  if (static_cast<int>(coeffs.size()) != basis->dimension()) {
    throw DomainError("coefficient vector length does not match basis dimension");
  }
  return RandomSection{std::move(coeffs), std::move(basis)};
}

SectionPoint evaluate_section_point(const RandomSection& sec, cplx x,
                                    std::vector<cplx>& scratch) {
  require_in_disk(sec, x);
  scratch.resize(sec.coeffs.size());
  sec.basis->weighted_values(x, scratch);
  // Two accumulator sets, fixed order: deterministic and latency-friendly.
  const double* a = reinterpret_cast<const double*>(sec.coeffs.data());
  const double* b = reinterpret_cast<const double*>(scratch.data());
  const std::size_t m = scratch.size();
  double sr0 = 0.0, si0 = 0.0, k0 = 0.0, sr1 = 0.0, si1 = 0.0, k1 = 0.0;
  std::size_t j = 0;
  for (; j + 1 < m; j += 2) {
    const double* p = a + 2 * j;
    const double* q = b + 2 * j;
    sr0 += p[0] * q[0] - p[1] * q[1];
    si0 += p[0] * q[1] + p[1] * q[0];
    k0 += q[0] * q[0] + q[1] * q[1];
    sr1 += p[2] * q[2] - p[3] * q[3];
    si1 += p[2] * q[3] + p[3] * q[2];
    k1 += q[2] * q[2] + q[3] * q[3];
  }
  if (j < m) {
    const double* p = a + 2 * j;
    const double* q = b + 2 * j;
    sr0 += p[0] * q[0] - p[1] * q[1];
    si0 += p[0] * q[1] + p[1] * q[0];
    k0 += q[0] * q[0] + q[1] * q[1];
  }
  const double sr[2] = {sr0, sr1}, si[2] = {si0, si1}, k[2] = {k0, k1};
  return {cplx(sr[0] + sr[1], si[0] + si[1]), k[0] + k[1]};
}

double evaluate_section_weighted(const RandomSection& sec, cplx x) {
  std::vector<cplx> scratch;
  return std::abs(evaluate_section_point(sec, x, scratch).weighted_value);
}

double normalized_process_abs(const RandomSection& sec, cplx x) {
  std::vector<cplx> scratch;
  const SectionPoint p = evaluate_section_point(sec, x, scratch);
  return std::abs(p.weighted_value) / std::sqrt(p.kernel_diag);
}

}  // namespace gaf
