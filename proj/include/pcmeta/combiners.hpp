#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcmeta/prob_value.hpp"

namespace pcmeta {

// Meta-analysis p-value combiners. Every combiner is valid for the global
// null under independent inputs, non-decreasing in each argument, and (except
// weighted Stouffer) symmetric. Symmetric combiners sort their inputs before
// accumulating, so permuting the input gives bit-identical log values.

enum class CombineMethod { fisher, simes, bonferroni, stouffer_weighted, tpm };

std::string_view to_string(CombineMethod m);
/// Accepts "fisher", "simes", "bonferroni", "stouffer" / "stouffer_weighted", "tpm".
CombineMethod parse_combine_method(std::string_view name);

/// Declarative combiner description. Use the named constructors; validate()
/// enforces the parameter invariants.
struct CombinerSpec {
  CombineMethod method = CombineMethod::fisher;
  std::optional<double> tpm_gamma;             // tpm only, in (0, 1]
  std::optional<std::vector<double>> weights;  // stouffer only, per study index

  static CombinerSpec fisher() { return {CombineMethod::fisher, std::nullopt, std::nullopt}; }
  static CombinerSpec simes() { return {CombineMethod::simes, std::nullopt, std::nullopt}; }
  static CombinerSpec bonferroni() { return {CombineMethod::bonferroni, std::nullopt, std::nullopt}; }
  static CombinerSpec tpm(double gamma) { return {CombineMethod::tpm, gamma, std::nullopt}; }
  static CombinerSpec stouffer(std::vector<double> weights) {
    return {CombineMethod::stouffer_weighted, std::nullopt, std::move(weights)};
  }

  void validate() const;
  [[nodiscard]] bool symmetric() const { return method != CombineMethod::stouffer_weighted; }
  [[nodiscard]] std::string describe() const;
};

ProbValue combine_fisher(std::span<const ProbValue> p);
ProbValue combine_simes(std::span<const ProbValue> p);
ProbValue combine_bonferroni(std::span<const ProbValue> p);

/// 1 - Phi(sum w_i z_i / sqrt(sum w_i^2)) with z_i = Phi^-1(1 - p_i).
/// p_i in {0, 1} is a DomainError.
ProbValue combine_stouffer_weighted(std::span<const ProbValue> p, std::span<const double> weights);

/// Truncated product method, independent-uniform null.
ProbValue combine_tpm(std::span<const ProbValue> p, double gamma);

/// P(W <= w) for W the truncated product of `count` independent uniforms at
/// threshold gamma, with w given by its log. Exposed for oracle cross-checks.
ProbValue tpm_cdf(std::int64_t count, double gamma, double log_w);

/// Dispatch on spec.method. Throws InputError on a spec/input mismatch.
ProbValue combine(const CombinerSpec& spec, std::span<const ProbValue> p);

/// 2x2 table of event counts for two arms.
struct CountTable2x2 {
  std::int64_t events_a = 0;
  std::int64_t total_a = 0;
  std::int64_t events_b = 0;
  std::int64_t total_b = 0;

  void validate() const;
};

struct ExactTestResult {
  double odds_ratio = 1.0;  // sample OR; +inf or 0 when a cell is empty, NaN for 0/0
  ProbValue p_two_sided;    // minimum-likelihood convention
};

/// Two-sided Fisher exact test: sums the probabilities of every table with
/// the observed margins that is no more probable than the observed table
/// (relative slack 1e-7 for ties).
ExactTestResult fisher_exact_2x2(const CountTable2x2& t);

/// Alternative convention: twice the smaller one-sided tail, capped at 1.
ProbValue fisher_exact_2x2_doubled(const CountTable2x2& t);

}  // namespace pcmeta
