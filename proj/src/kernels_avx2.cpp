// Compiled with -mavx2; only entered after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "pcmeta/kernels.hpp"

namespace pcmeta::kernels::avx2 {

namespace {

// Lane mask (bit i = lane i) for each of the three regions.
struct LaneMasks {
  int phi, phi_prime, phi_tilde;
};

inline LaneMasks classify4(__m256d p1, __m256d p2, const RegionParams& rp) {
  const __m256d alpha = _mm256_set1_pd(rp.alpha);
  const __m256d corner_lo = _mm256_set1_pd(rp.corner_lo);
  const __m256d diag_count = _mm256_set1_pd(rp.diag_count);
  const __m256d diag_top = _mm256_set1_pd(rp.diag_top);
  const __m256d one = _mm256_set1_pd(1.0);

  const __m256d phi = _mm256_cmp_pd(_mm256_max_pd(p1, p2), alpha, _CMP_LE_OQ);
  const __m256d corner = _mm256_cmp_pd(_mm256_min_pd(p1, p2), corner_lo, _CMP_GE_OQ);

  const __m256d k = _mm256_floor_pd(_mm256_div_pd(p1, alpha));
  __m256d diag = _mm256_setzero_pd();
  for (double d = -1.0; d <= 1.0; d += 1.0) {
    const __m256d kc = _mm256_add_pd(k, _mm256_set1_pd(d));
    const __m256d lo = _mm256_mul_pd(kc, alpha);
    const __m256d hi = _mm256_min_pd(_mm256_mul_pd(_mm256_add_pd(kc, one), alpha), diag_top);
    __m256d in = _mm256_and_pd(_mm256_cmp_pd(kc, one, _CMP_GE_OQ), _mm256_cmp_pd(kc, diag_count, _CMP_LE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(lo, p1, _CMP_LT_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(p1, hi, _CMP_LT_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(lo, p2, _CMP_LT_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(p2, hi, _CMP_LT_OQ));
    diag = _mm256_or_pd(diag, in);
  }
  const __m256d prime = _mm256_or_pd(phi, corner);
  const __m256d tilde = _mm256_or_pd(prime, diag);
  return {_mm256_movemask_pd(phi), _mm256_movemask_pd(prime), _mm256_movemask_pd(tilde)};
}

}  // namespace

void classify_pairs(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp,
                    std::span<std::uint8_t> out) {
  const std::size_t n = p1.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const auto m = classify4(_mm256_loadu_pd(p1.data() + i), _mm256_loadu_pd(p2.data() + i), rp);
    for (int lane = 0; lane < 4; ++lane) {
      std::uint8_t bits = 0;
      if ((m.phi >> lane) & 1) bits |= kPhi;
      if ((m.phi_prime >> lane) & 1) bits |= kPhiPrime;
      if ((m.phi_tilde >> lane) & 1) bits |= kPhiTilde;
      out[i + static_cast<std::size_t>(lane)] = bits;
    }
  }
  for (; i < n; ++i) out[i] = scalar::classify_one(p1[i], p2[i], rp);
}

RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp) {
  const std::size_t n = p1.size();
  RegionCounts c;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const auto m = classify4(_mm256_loadu_pd(p1.data() + i), _mm256_loadu_pd(p2.data() + i), rp);
    c.phi += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(m.phi)));
    c.phi_prime += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(m.phi_prime)));
    c.phi_tilde += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(m.phi_tilde)));
  }
  const auto tail = scalar::count_regions(p1.subspan(i), p2.subspan(i), rp);
  c.phi += tail.phi;
  c.phi_prime += tail.phi_prime;
  c.phi_tilde += tail.phi_tilde;
  return c;
}

std::size_t count_at_most(std::span<const double> values, double threshold) {
  const std::size_t n = values.size();
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d le = _mm256_cmp_pd(_mm256_loadu_pd(values.data() + i), t, _CMP_LE_OQ);
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(le))));
  }
  return c + scalar::count_at_most(values.subspan(i), threshold);
}

}  // namespace pcmeta::kernels::avx2
