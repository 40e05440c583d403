#pragma once

// Data-parallel inner loops of the Monte Carlo harnesses. Each kernel has a
// scalar reference and, on x86-64, an AVX2 variant chosen at runtime. The
// variants perform the same IEEE operations in the same order, so their
// outputs are bit-identical (checked by the equivalence tests).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace pcmeta::kernels {

enum class SimdLevel { scalar, avx2 };

std::string_view to_string(SimdLevel level);

/// Best level compiled in and supported by this CPU.
SimdLevel detected_level();

/// detected_level(), lowered to scalar when PCMETA_SIMD=scalar is set.
SimdLevel active_level();

/// Whether `level` can run here.
bool available(SimdLevel level);

/// Geometry of the three two-study rejection regions at one alpha.
struct RegionParams {
  double alpha = 0.0;
  double corner_lo = 0.0;   // corner square is min(p1, p2) >= corner_lo
  double diag_count = 0.0;  // number of open diagonal squares (alpha, 2alpha)^2 ...
  double diag_top = 0.0;    // upper clamp for the last diagonal square
};

RegionParams make_region_params(double alpha);

/// Bits of a classification byte.
inline constexpr std::uint8_t kPhi = 1;
inline constexpr std::uint8_t kPhiPrime = 2;
inline constexpr std::uint8_t kPhiTilde = 4;

struct RegionCounts {
  std::size_t phi = 0;
  std::size_t phi_prime = 0;
  std::size_t phi_tilde = 0;
};

namespace scalar {
std::uint8_t classify_one(double p1, double p2, const RegionParams& rp);
void classify_pairs(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp,
                    std::span<std::uint8_t> out);
RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp);
std::size_t count_at_most(std::span<const double> values, double threshold);
}  // namespace scalar

namespace avx2 {
void classify_pairs(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp,
                    std::span<std::uint8_t> out);
RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp);
std::size_t count_at_most(std::span<const double> values, double threshold);
}  // namespace avx2

void classify_pairs(SimdLevel level, std::span<const double> p1, std::span<const double> p2,
                    const RegionParams& rp, std::span<std::uint8_t> out);
RegionCounts count_regions(SimdLevel level, std::span<const double> p1, std::span<const double> p2,
                           const RegionParams& rp);
std::size_t count_at_most(SimdLevel level, std::span<const double> values, double threshold);

inline RegionCounts count_regions(std::span<const double> p1, std::span<const double> p2, const RegionParams& rp) {
  return count_regions(active_level(), p1, p2, rp);
}
inline std::size_t count_at_most(std::span<const double> values, double threshold) {
  return count_at_most(active_level(), values, threshold);
}

}  // namespace pcmeta::kernels
