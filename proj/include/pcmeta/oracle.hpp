#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcmeta/partial_conjunction.hpp"
#include "pcmeta/prob_value.hpp"

namespace pcmeta::oracle {

using Rule = std::function<ProbValue(std::span<const ProbValue>)>;

/// Per-study null configuration. Study i reports the p-value of
/// Z_i ~ N(z_means[i], 1); z_means of all zeros gives uniform nulls.
struct NullConfig {
  std::vector<double> z_means;
  bool two_sided = true;

  static NullConfig uniform(std::size_t n);
  /// H_0^{r/n} boundary: the first r - 1 studies are non-null at `z_mean`.
  static NullConfig boundary(std::size_t n, std::size_t r, double z_mean);
};

struct ValidityRow {
  double alpha = 0;
  double rate = 0;
  double se = 0;      // binomial SE of the rate
  double bound = 0;   // alpha + 3 sqrt(alpha (1 - alpha) / reps)
  bool valid = true;  // rate <= bound
};

struct ValidityOptions {
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Empirical P(rule(P) <= alpha) under `null`, one row per alpha.
std::vector<ValidityRow> mc_validity(const Rule& rule, const NullConfig& null, std::span<const double> alphas,
                                     const ValidityOptions& opts);

struct Estimate {
  double value = 0;
  double se = 0;
};

/// Empirical P(W <= w) where W is the product of the uniforms at or below
/// gamma among L independent ones (empty product is 1).
Estimate tpm_mc_cdf(std::size_t L, double gamma, double w, std::uint64_t reps, std::uint64_t seed,
                    unsigned threads = 0);

struct CrossCheck {
  ProbValue fast;
  ProbValue enumerated;
  double log_rel_diff = 0;  // |log fast - log enum| / max(1, |log enum|)
};

/// Structured fast path against brute-force subset enumeration.
CrossCheck structured_vs_enumeration(std::span<const ProbValue> p, std::size_t r, const GroupPartition& groups,
                                     std::uint64_t budget = kDefaultSubsetBudget);

}  // namespace pcmeta::oracle
