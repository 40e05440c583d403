#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcmeta/combiners.hpp"
#include "pcmeta/prob_value.hpp"

namespace pcmeta {

/// Partition of study indices 0..n-1 into blocks whose p-values are
/// mutually independent (levels of one grouping factor).
class GroupPartition {
 public:
  GroupPartition() = default;
  /// Throws InputError unless the blocks are nonempty, disjoint, and cover 0..n-1.
  GroupPartition(std::vector<std::vector<std::size_t>> blocks, std::size_t n);

  /// Blocks in order of first appearance of each label.
  static GroupPartition from_labels(std::span<const std::string> labels);

  [[nodiscard]] const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t block_of(std::size_t study) const { return block_of_.at(study); }

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
  std::size_t n_ = 0;
};

/// A meta-analysis rule over an arbitrary number of p-values.
using Combiner = std::function<ProbValue(std::span<const ProbValue>)>;

/// Subset-aware combiner g_u: receives the original study indices `u`
/// (ascending) and the matching p-values, so index-bound parameters such as
/// Stouffer weights follow the study, never its rank.
using SubsetCombiner = std::function<ProbValue(std::span<const std::size_t> u, std::span<const ProbValue> p_u)>;

/// A PC p-value rule over the full vector of n p-values.
using PcEvaluator = std::function<ProbValue(std::span<const ProbValue>)>;

constexpr std::uint64_t kDefaultSubsetBudget = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t count_subsets(std::size_t n, std::size_t k);

/// Benjamini-Heller PC p-value: apply `spec` to the n - r + 1 largest
/// p-values. Rejects index-bound (weighted Stouffer) specs.
ProbValue bhpc(std::span<const ProbValue> p, std::size_t r, const CombinerSpec& spec);

/// Same with any symmetric combiner; the caller asserts symmetry.
ProbValue bhpc(std::span<const ProbValue> p, std::size_t r, const Combiner& symmetric_combiner);

/// Generalized PC p-value by exhaustive enumeration: the maximum of
/// g(u, p_u) over all u with |u| = n - r + 1.
ProbValue gbhpc_enumerate(std::span<const ProbValue> p, std::size_t r, const SubsetCombiner& g,
                          std::uint64_t budget = kDefaultSubsetBudget);

/// g_u that ignores u and applies a fixed combiner.
SubsetCombiner fixed_subset_combiner(CombinerSpec spec);

/// g_u = weighted Stouffer with weights looked up by original study index.
SubsetCombiner weighted_stouffer_subset_combiner(std::vector<double> weights);

/// g_u = (number of blocks met by u) * min over those blocks of the Fisher
/// combination of p_{u ∩ block}: a Bonferroni combination across
/// independence blocks.
SubsetCombiner block_bonferroni_fisher(GroupPartition groups);

/// Structured GBHPC with the block-Bonferroni-of-Fisher g_u. Exact: within a
/// block only the Fisher combination of its c largest p-values can attain the
/// maximum, so the search runs over per-block counts (c_1..c_m) instead of
/// over subsets. Agrees bit-for-bit with gbhpc_enumerate on the same g_u.
ProbValue structured_gbhpc(std::span<const ProbValue> p, std::size_t r, const GroupPartition& groups);

/// Weighted-Stouffer GBHPC, enumerating subsets with the normal scores
/// computed once per study.
ProbValue gbhpc_weighted_stouffer(std::span<const ProbValue> p, std::size_t r, std::span<const double> weights,
                                  std::uint64_t budget = kDefaultSubsetBudget);

struct ExtractOptions {
  std::vector<double> probes{1e-3, 1e-6, 1e-9, 1e-12};
  double tolerance = 1e-10;
};

/// Recovers g_u(p_u) from a monotone, sensitive PC rule f as the limit of
/// f(p_u : eps on the complement) as eps -> 0, evaluated on a decreasing probe
/// schedule. Throws ConvergenceError if successive probes never settle.
ProbValue extract_component(const PcEvaluator& f, std::size_t n, std::span<const std::size_t> u,
                            std::span<const ProbValue> p_u, const ExtractOptions& opts = {});

struct BhpcMethod {
  CombinerSpec spec;
};
struct StructuredMethod {
  GroupPartition groups;
};
struct EnumerateMethod {
  SubsetCombiner g;
  std::string label = "enumerate";
  std::uint64_t budget = kDefaultSubsetBudget;
};
using PcMethod = std::variant<BhpcMethod, StructuredMethod, EnumerateMethod>;

std::string describe(const PcMethod& m);

/// Evaluates the PC p-value for H_0^{r/n} under `method`.
ProbValue pc_pvalue(std::span<const ProbValue> p, std::size_t r, const PcMethod& method);

struct PcEntry {
  std::size_t r = 0;
  ProbValue p;
};

struct PcCurve {
  std::size_t n = 0;
  std::string method;
  double alpha = 0.05;
  std::vector<PcEntry> entries;           // r = 1..n in order
  std::vector<std::size_t> confidence_set;  // {r : p_{r/n} <= alpha}, ascending
  std::size_t r_hat = 0;                  // max of confidence_set, 0 if empty
  bool nondecreasing = true;
  std::vector<std::string> warnings;

  /// "at least r_hat of n studies are non-null" with the proportion.
  [[nodiscard]] std::string interpretation() const;
};

PcCurve pc_curve(std::span<const ProbValue> p, const PcMethod& method, double alpha);

}  // namespace pcmeta
