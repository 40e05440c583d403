#include "pcmeta/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pcmeta/errors.hpp"

namespace pcmeta::kernels {

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return "scalar";
    case SimdLevel::avx2: return "avx2";
  }
  return "unknown";
}

bool available(SimdLevel level) {
  if (level == SimdLevel::scalar) return true;
#if defined(PCMETA_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

SimdLevel detected_level() { return available(SimdLevel::avx2) ? SimdLevel::avx2 : SimdLevel::scalar; }

SimdLevel active_level() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("PCMETA_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return SimdLevel::scalar;
    return detected_level();
  }();
  return level;
}

RegionParams make_region_params(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  RegionParams rp;
  rp.alpha = alpha;
  rp.corner_lo = alpha < 0.5 ? 1.0 - alpha : alpha;
  rp.diag_top = 1.0 - alpha;
  // Largest K with (K + 1) alpha <= 1 - alpha; the slack absorbs decimal
  // alphas such as 0.1 whose quotient lands a hair below an integer.
  rp.diag_count = alpha < 0.5 ? std::max(0.0, std::floor((1.0 - alpha) / alpha + 1e-9) - 1.0) : 0.0;
  return rp;
}

namespace scalar {

std::uint8_t classify_one(double p1, double p2, const RegionParams& rp) {
  const double hi_p = std::max(p1, p2);
  const double lo_p = std::min(p1, p2);
  const bool phi = hi_p <= rp.alpha;
  const bool corner = lo_p >= rp.corner_lo;
  bool diag = false;
  const double k = std::floor(p1 / rp.alpha);
  for (double d = -1.0; d <= 1.0; d += 1.0) {
    const double kc = k + d;
    const double lo = kc * rp.alpha;
    const double hi = std::min((kc + 1.0) * rp.alpha, rp.diag_top);
    diag = diag || (kc >= 1.0 && kc <= rp.diag_count && lo < p1 && p1 < hi && lo < p2 && p2 < hi);
  }
  std::uint8_t bits = 0;
  if (phi) bits |= kPhi;
  if (phi || corner) bits |= kPhiPrime;
  if (phi || corner || diag) bits |= kPhiTilde;
  return bits;
}

void classify_pairs(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp,
                    std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < p1.size(); ++i) out[i] = classify_one(p1[i], p2[i], rp);
}

RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp) {
  RegionCounts c;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const auto bits = classify_one(p1[i], p2[i], rp);
    c.phi += (bits & kPhi) != 0;
    c.phi_prime += (bits & kPhiPrime) != 0;
    c.phi_tilde += (bits & kPhiTilde) != 0;
  }
  return c;
}

std::size_t count_at_most(std::span<const double> values, double threshold) {
  std::size_t c = 0;
  for (double v : values) c += v <= threshold;
  return c;
}

}  // namespace scalar

namespace {
void check_pairs(std::span<const double> p1, std::span<const double> p2) {
  if (p1.size() != p2.size()) throw InputError("classify: p1 and p2 differ in length");
}
}  // namespace

void classify_pairs(SimdLevel level, std::span<const double> p1, std::span<const double> p2,
                    const RegionParams& rp, std::span<std::uint8_t> out) {
  check_pairs(p1, p2);
  if (out.size() < p1.size()) throw InputError("classify: output buffer too small");
#if defined(PCMETA_HAVE_AVX2)
  if (level == SimdLevel::avx2 && available(level)) return avx2::classify_pairs(p1, p2, rp, out);
#endif
  (void)level;
  scalar::classify_pairs(p1, p2, rp, out);
}

RegionCounts count_regions(SimdLevel level, std::span<const double> p1, std::span<const double> p2,
                           const RegionParams& rp) {
  check_pairs(p1, p2);
#if defined(PCMETA_HAVE_AVX2)
  if (level == SimdLevel::avx2 && available(level)) return avx2::count_regions(p1, p2, rp);
#endif
  (void)level;
  return scalar::count_regions(p1, p2, rp);
}

std::size_t count_at_most(SimdLevel level, std::span<const double> values, double threshold) {
#if defined(PCMETA_HAVE_AVX2)
  if (level == SimdLevel::avx2 && available(level)) return avx2::count_at_most(values, threshold);
#endif
  (void)level;
  return scalar::count_at_most(values, threshold);
}

#if !defined(PCMETA_HAVE_AVX2)
// Without the AVX2 translation unit the avx2 entry points forward to the
// scalar reference so tests and callers still link.
namespace avx2 {
void classify_pairs(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp,
                    std::span<std::uint8_t> out) {
  scalar::classify_pairs(p1, p2, rp, out);
}
RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp) {
  return scalar::count_regions(p1, p2, rp);
}
std::size_t count_at_most(std::span<const double> values, double threshold) {
  return scalar::count_at_most(values, threshold);
}
}  // namespace avx2
#endif

}  // namespace pcmeta::kernels
