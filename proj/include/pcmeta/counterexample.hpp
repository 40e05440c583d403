#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcmeta/kernels.hpp"

namespace pcmeta {

// Non-monotone level-alpha tests for H_0^{2/2}. The monotone test rejects
// when both p-values are at most alpha. Adding the corner square near (1, 1)
// keeps every conditional slice at measure alpha; adding open squares along
// the diagonal fills the remaining slices up to exactly alpha.

enum class TwoStudyTest { phi, phi_prime, phi_tilde };

std::string_view to_string(TwoStudyTest t);
TwoStudyTest parse_two_study_test(std::string_view name);

bool phi(double p1, double p2, double alpha);
bool phi_prime(double p1, double p2, double alpha);
/// Requires alpha in (0, 1/2).
bool phi_tilde(double p1, double p2, double alpha);

/// Axis-aligned rectangle with per-edge closedness.
struct Rect {
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  bool x_lo_closed = true, x_hi_closed = true, y_lo_closed = true, y_hi_closed = true;

  [[nodiscard]] bool contains_x(double x) const;
  [[nodiscard]] bool contains_y(double y) const;
  [[nodiscard]] bool contains(double x, double y) const { return contains_x(x) && contains_y(y); }
};

/// Critical function as a sum of rectangle indicators. Overlapping
/// components count twice, as in phi + 1_S.
struct RejectionRegion2D {
  double alpha = 0.0;
  std::vector<Rect> components;

  static RejectionRegion2D for_test(TwoStudyTest t, double alpha);

  /// Value of the critical function at (p1, p2).
  [[nodiscard]] int evaluate(double p1, double p2) const;
  /// True if no point lies in two components.
  [[nodiscard]] bool components_disjoint() const;
};

struct SliceReport {
  double supremum = 0.0;            // over every slice, both coordinates
  double essential_supremum = 0.0;  // ignoring isolated slices (measure zero)
  int worst_axis = 0;               // 0: slices at fixed p1, 1: at fixed p2
  double worst_position = 0.0;
};

/// Exact conditional rejection measure of every slice E(test | P_axis = t),
/// computed by interval arithmetic over the rectangle decomposition. The
/// slice measure is piecewise constant between rectangle edges, so it is
/// evaluated at every edge and every gap midpoint.
SliceReport slice_validity(const RejectionRegion2D& region);

struct PowerCell {
  double mu1 = 0, mu2 = 0;
  TwoStudyTest test = TwoStudyTest::phi;
  double power = 0, se = 0;
};

struct PowerGrid2DOptions {
  std::vector<double> mu_grid;  // grid is mu_grid x mu_grid
  double alpha = 0.2;
  std::uint64_t reps = 20000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::vector<TwoStudyTest> tests{TwoStudyTest::phi, TwoStudyTest::phi_prime, TwoStudyTest::phi_tilde};
  kernels::SimdLevel simd = kernels::active_level();
};

/// Monte Carlo power of the two-study tests with two-sided p-values of
/// Z_i ~ N(mu_i, 1). Every test at a grid point sees the same draws, so the
/// pointwise ordering phi <= phi' <= phi~ holds exactly in the estimates.
/// Rows are ordered by (mu1, mu2, test).
std::vector<PowerCell> power_grid_2d(const PowerGrid2DOptions& opts);

/// Evenly spaced grid of `points` values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace pcmeta
