#include "pcmeta/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pcmeta/errors.hpp"
#include "pcmeta/parallel.hpp"

namespace pcmeta {

std::string_view to_string(TwoStudyTest t) {
  switch (t) {
    case TwoStudyTest::phi: return "phi";
    case TwoStudyTest::phi_prime: return "phi_prime";
    case TwoStudyTest::phi_tilde: return "phi_tilde";
  }
  return "unknown";
}

TwoStudyTest parse_two_study_test(std::string_view name) {
  if (name == "phi") return TwoStudyTest::phi;
  if (name == "phi_prime") return TwoStudyTest::phi_prime;
  if (name == "phi_tilde") return TwoStudyTest::phi_tilde;
  throw InputError("unknown two-study test: " + std::string(name));
}

namespace {

void check_unit(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) throw DomainError("p-values must lie in [0, 1]");
}

void check_tilde_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InputError("phi_tilde requires alpha in (0, 1/2)");
}

}  // namespace

bool phi(double p1, double p2, double alpha) {
  check_unit(p1, p2);
  return (kernels::scalar::classify_one(p1, p2, kernels::make_region_params(alpha)) & kernels::kPhi) != 0;
}

bool phi_prime(double p1, double p2, double alpha) {
  check_unit(p1, p2);
  return (kernels::scalar::classify_one(p1, p2, kernels::make_region_params(alpha)) & kernels::kPhiPrime) != 0;
}

bool phi_tilde(double p1, double p2, double alpha) {
  check_unit(p1, p2);
  check_tilde_alpha(alpha);
  return (kernels::scalar::classify_one(p1, p2, kernels::make_region_params(alpha)) & kernels::kPhiTilde) != 0;
}

bool Rect::contains_x(double x) const {
  return (x_lo_closed ? x >= x_lo : x > x_lo) && (x_hi_closed ? x <= x_hi : x < x_hi);
}

bool Rect::contains_y(double y) const {
  return (y_lo_closed ? y >= y_lo : y > y_lo) && (y_hi_closed ? y <= y_hi : y < y_hi);
}

RejectionRegion2D RejectionRegion2D::for_test(TwoStudyTest t, double alpha) {
  const auto rp = kernels::make_region_params(alpha);
  RejectionRegion2D region;
  region.alpha = alpha;
  region.components.push_back(Rect{0.0, alpha, 0.0, alpha});
  if (t == TwoStudyTest::phi) return region;
  region.components.push_back(Rect{rp.corner_lo, 1.0, rp.corner_lo, 1.0});
  if (t == TwoStudyTest::phi_prime) return region;
  check_tilde_alpha(alpha);
  for (double k = 1.0; k <= rp.diag_count; k += 1.0) {
    const double lo = k * alpha;
    const double hi = std::min((k + 1.0) * alpha, rp.diag_top);
    region.components.push_back(Rect{lo, hi, lo, hi, false, false, false, false});
  }
  return region;
}

int RejectionRegion2D::evaluate(double p1, double p2) const {
  int v = 0;
  for (const auto& r : components) v += r.contains(p1, p2) ? 1 : 0;
  return v;
}

namespace {

bool intervals_meet(double a_lo, bool a_lo_c, double a_hi, bool a_hi_c, double b_lo, bool b_lo_c, double b_hi,
                    bool b_hi_c) {
  double lo;
  bool lo_c;
  if (a_lo > b_lo) {
    lo = a_lo, lo_c = a_lo_c;
  } else if (b_lo > a_lo) {
    lo = b_lo, lo_c = b_lo_c;
  } else {
    lo = a_lo, lo_c = a_lo_c && b_lo_c;
  }
  double hi;
  bool hi_c;
  if (a_hi < b_hi) {
    hi = a_hi, hi_c = a_hi_c;
  } else if (b_hi < a_hi) {
    hi = b_hi, hi_c = b_hi_c;
  } else {
    hi = a_hi, hi_c = a_hi_c && b_hi_c;
  }
  return lo < hi || (lo == hi && lo_c && hi_c);
}

}  // namespace

bool RejectionRegion2D::components_disjoint() const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const auto& a = components[i];
      const auto& b = components[j];
      if (intervals_meet(a.x_lo, a.x_lo_closed, a.x_hi, a.x_hi_closed, b.x_lo, b.x_lo_closed, b.x_hi, b.x_hi_closed) &&
          intervals_meet(a.y_lo, a.y_lo_closed, a.y_hi, a.y_hi_closed, b.y_lo, b.y_lo_closed, b.y_hi, b.y_hi_closed)) {
        return false;
      }
    }
  }
  return true;
}

SliceReport slice_validity(const RejectionRegion2D& region) {
  SliceReport report;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& r : region.components) {
      cuts.push_back(axis == 0 ? r.x_lo : r.y_lo);
      cuts.push_back(axis == 0 ? r.x_hi : r.y_hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto slice_measure = [&](double t) {
      double m = 0.0;
      for (const auto& r : region.components) {
        const bool hit = axis == 0 ? r.contains_x(t) : r.contains_y(t);
        if (!hit) continue;
        const double lo = std::max(0.0, axis == 0 ? r.y_lo : r.x_lo);
        const double hi = std::min(1.0, axis == 0 ? r.y_hi : r.x_hi);
        if (hi > lo) m += hi - lo;
      }
      return m;
    };
    auto consider = [&](double t, bool isolated) {
      if (t < 0.0 || t > 1.0) return;
      const double m = slice_measure(t);
      if (m > report.supremum) {
        report.supremum = m;
        report.worst_axis = axis;
        report.worst_position = t;
      }
      if (!isolated) report.essential_supremum = std::max(report.essential_supremum, m);
    };
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      consider(cuts[i], true);
      if (i + 1 < cuts.size()) consider(0.5 * (cuts[i] + cuts[i + 1]), false);
    }
  }
  return report;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

std::vector<PowerCell> power_grid_2d(const PowerGrid2DOptions& opts) {
  if (opts.reps < 10000) throw InputError("power_grid_2d: reps must be at least 1e4");
  if (opts.mu_grid.empty()) throw InputError("power_grid_2d: empty mu grid");
  for (auto t : opts.tests) {
    if (t == TwoStudyTest::phi_tilde) check_tilde_alpha(opts.alpha);
  }
  const auto rp = kernels::make_region_params(opts.alpha);
  const std::size_t m = opts.mu_grid.size();
  const std::size_t points = m * m;
  std::vector<kernels::RegionCounts> counts(points);

  parallel_for(points, opts.threads, [&](std::size_t g) {
    const double mu1 = opts.mu_grid[g / m];
    const double mu2 = opts.mu_grid[g % m];
    auto rng = make_stream(opts.seed, g);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> p1(opts.reps), p2(opts.reps);
    for (std::uint64_t i = 0; i < opts.reps; ++i) {
      const double z1 = mu1 + normal(rng);
      const double z2 = mu2 + normal(rng);
      p1[i] = std::erfc(std::fabs(z1) / std::numbers::sqrt2);
      p2[i] = std::erfc(std::fabs(z2) / std::numbers::sqrt2);
    }
    counts[g] = kernels::count_regions(opts.simd, p1, p2, rp);
  });

  std::vector<PowerCell> out;
  out.reserve(points * opts.tests.size());
  const double reps = static_cast<double>(opts.reps);
  for (std::size_t g = 0; g < points; ++g) {
    for (auto t : opts.tests) {
      const std::size_t c = t == TwoStudyTest::phi         ? counts[g].phi
                            : t == TwoStudyTest::phi_prime ? counts[g].phi_prime
                                                           : counts[g].phi_tilde;
      const double power = static_cast<double>(c) / reps;
      out.push_back({opts.mu_grid[g / m], opts.mu_grid[g % m], t, power, std::sqrt(power * (1.0 - power) / reps)});
    }
  }
  return out;
}

}  // namespace pcmeta
