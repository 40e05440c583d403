#include "pcmeta/partial_conjunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "pcmeta/errors.hpp"
#include "pcmeta/numerics.hpp"

namespace pcmeta {

GroupPartition::GroupPartition(std::vector<std::vector<std::size_t>> blocks, std::size_t n)
    : blocks_(std::move(blocks)), block_of_(n, std::numeric_limits<std::size_t>::max()), n_(n) {
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].empty()) throw InputError("group partition: empty block");
    std::sort(blocks_[b].begin(), blocks_[b].end());
    for (std::size_t i : blocks_[b]) {
      if (i >= n) throw InputError("group partition: study index out of range");
      if (block_of_[i] != std::numeric_limits<std::size_t>::max()) {
        throw InputError("group partition: blocks overlap at study " + std::to_string(i));
      }
      block_of_[i] = b;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (block_of_[i] == std::numeric_limits<std::size_t>::max()) {
      throw InputError("group partition: study " + std::to_string(i) + " is in no block");
    }
  }
}

GroupPartition GroupPartition::from_labels(std::span<const std::string> labels) {
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) throw InputError("group partition: missing group label for study " + std::to_string(i));
    auto [it, inserted] = index.try_emplace(labels[i], blocks.size());
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(i);
  }
  return GroupPartition(std::move(blocks), labels.size());
}

std::uint64_t count_subsets(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // c * num / i is exact at every step; guard the multiplication.
    if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    c = c * num / i;
  }
  return c;
}

namespace {

void check_r(std::size_t n, std::size_t r) {
  if (n == 0) throw InputError("at least one p-value is required");
  if (r < 1 || r > n) {
    throw InputError("r must lie in 1.." + std::to_string(n) + ", got " + std::to_string(r));
  }
}

// Visits every ascending index subset of size m of 0..n-1 in lexicographic
// order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t m, Fn&& fn) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    fn(std::span<const std::size_t>(idx));
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void check_budget(std::size_t n, std::size_t r, std::uint64_t budget) {
  const auto count = count_subsets(n, r - 1);
  if (count > budget) {
    throw BudgetExceeded("subset enumeration needs C(" + std::to_string(n) + "," + std::to_string(r - 1) +
                         ") = " + std::to_string(count) + " subsets, budget is " + std::to_string(budget));
  }
}

ProbValue block_bonferroni(ProbValue smallest_block_p, std::size_t blocks_met) {
  return smallest_block_p.scaled(static_cast<double>(blocks_met));
}

}  // namespace

ProbValue bhpc(std::span<const ProbValue> p, std::size_t r, const Combiner& symmetric_combiner) {
  check_r(p.size(), r);
  std::vector<ProbValue> sorted(p.begin(), p.end());
  std::stable_sort(sorted.begin(), sorted.end());
  return symmetric_combiner(std::span<const ProbValue>(sorted).subspan(r - 1));
}

ProbValue bhpc(std::span<const ProbValue> p, std::size_t r, const CombinerSpec& spec) {
  spec.validate();
  if (!spec.symmetric()) {
    throw InputError("bhpc requires a symmetric combiner; use gbhpc for weighted Stouffer");
  }
  return bhpc(p, r, [&spec](std::span<const ProbValue> q) { return combine(spec, q); });
}

ProbValue gbhpc_enumerate(std::span<const ProbValue> p, std::size_t r, const SubsetCombiner& g,
                          std::uint64_t budget) {
  const std::size_t n = p.size();
  check_r(n, r);
  check_budget(n, r, budget);
  const std::size_t m = n - r + 1;
  std::vector<ProbValue> p_u(m);
  ProbValue best = ProbValue::zero();
  for_each_subset(n, m, [&](std::span<const std::size_t> u) {
    for (std::size_t j = 0; j < m; ++j) p_u[j] = p[u[j]];
    best = std::max(best, g(u, p_u));
  });
  return best;
}

SubsetCombiner fixed_subset_combiner(CombinerSpec spec) {
  spec.validate();
  return [spec = std::move(spec)](std::span<const std::size_t>, std::span<const ProbValue> p_u) {
    return combine(spec, p_u);
  };
}

SubsetCombiner weighted_stouffer_subset_combiner(std::vector<double> weights) {
  return [weights = std::move(weights)](std::span<const std::size_t> u, std::span<const ProbValue> p_u) {
    std::vector<double> w_u;
    w_u.reserve(u.size());
    for (std::size_t i : u) w_u.push_back(weights.at(i));
    return combine_stouffer_weighted(p_u, w_u);
  };
}

SubsetCombiner block_bonferroni_fisher(GroupPartition groups) {
  return [groups = std::move(groups)](std::span<const std::size_t> u, std::span<const ProbValue> p_u) {
    std::vector<std::vector<ProbValue>> per_block(groups.blocks().size());
    for (std::size_t j = 0; j < u.size(); ++j) per_block[groups.block_of(u[j])].push_back(p_u[j]);
    std::size_t met = 0;
    ProbValue smallest = ProbValue::one();
    for (const auto& vals : per_block) {
      if (vals.empty()) continue;
      ++met;
      smallest = std::min(smallest, combine_fisher(vals));
    }
    return block_bonferroni(smallest, met);
  };
}

ProbValue structured_gbhpc(std::span<const ProbValue> p, std::size_t r, const GroupPartition& groups) {
  const std::size_t n = p.size();
  check_r(n, r);
  if (groups.size() != n) throw InputError("group partition does not match the number of p-values");
  const std::size_t keep = n - r + 1;
  const auto& blocks = groups.blocks();
  const std::size_t nb = blocks.size();

  // top[b][c-1] = Fisher combination of the c largest p-values of block b.
  std::vector<std::vector<ProbValue>> top(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    std::vector<ProbValue> vals;
    for (std::size_t i : blocks[b]) vals.push_back(p[i]);
    std::stable_sort(vals.begin(), vals.end(), [](const ProbValue& x, const ProbValue& y) { return x > y; });
    for (std::size_t c = 1; c <= vals.size(); ++c) {
      top[b].push_back(combine_fisher(std::span<const ProbValue>(vals).first(c)));
    }
  }

  // Bottleneck DP over blocks: state (items taken, blocks met) -> largest
  // achievable minimum block p-value. For a fixed number of blocks met the
  // objective is increasing in that minimum, so the max-min is enough.
  struct Cell {
    bool feasible = false;
    bool any = false;  // at least one block met; otherwise `min` is unset
    ProbValue min;
  };
  auto better = [](const Cell& a, const Cell& b) {
    if (!b.feasible) return false;
    if (!a.feasible) return true;
    if (!b.any) return false;
    if (!a.any) return true;
    return b.min > a.min;
  };
  std::vector<std::vector<Cell>> dp(keep + 1, std::vector<Cell>(nb + 1));
  dp[0][0] = Cell{true, false, ProbValue::one()};
  for (std::size_t b = 0; b < nb; ++b) {
    auto next = dp;  // c_b = 0 carries every state over
    const std::size_t kb = top[b].size();
    for (std::size_t items = 0; items <= keep; ++items) {
      for (std::size_t met = 0; met <= b; ++met) {
        const Cell& cur = dp[items][met];
        if (!cur.feasible) continue;
        for (std::size_t c = 1; c <= kb && items + c <= keep; ++c) {
          Cell cand{true, true, cur.any ? std::min(cur.min, top[b][c - 1]) : top[b][c - 1]};
          Cell& slot = next[items + c][met + 1];
          if (better(slot, cand)) slot = cand;
        }
      }
    }
    dp = std::move(next);
  }

  ProbValue best = ProbValue::zero();
  for (std::size_t met = 1; met <= nb; ++met) {
    const Cell& cell = dp[keep][met];
    if (cell.feasible && cell.any) best = std::max(best, block_bonferroni(cell.min, met));
  }
  return best;
}

ProbValue gbhpc_weighted_stouffer(std::span<const ProbValue> p, std::size_t r, std::span<const double> weights,
                                  std::uint64_t budget) {
  const std::size_t n = p.size();
  check_r(n, r);
  if (weights.size() != n) throw InputError("gbhpc_weighted_stouffer: one weight per study required");
  check_budget(n, r, budget);
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw InputError("stouffer weights must be positive and finite");
    }
    if (p[i].is_zero() || p[i].is_one()) {
      throw DomainError("weighted Stouffer: p-values of exactly 0 or 1 have no normal quantile");
    }
    score[i] = numerics::std_normal_upper_quantile(p[i]);
  }
  ProbValue best = ProbValue::zero();
  for_each_subset(n, n - r + 1, [&](std::span<const std::size_t> u) {
    double num = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i : u) {
      num += weights[i] * score[i];
      sum_sq += weights[i] * weights[i];
    }
    best = std::max(best, numerics::std_normal_sf(num / std::sqrt(sum_sq)));
  });
  return best;
}

ProbValue extract_component(const PcEvaluator& f, std::size_t n, std::span<const std::size_t> u,
                            std::span<const ProbValue> p_u, const ExtractOptions& opts) {
  if (u.size() != p_u.size()) throw InputError("extract_component: u and p_u differ in length");
  if (u.empty() || u.size() > n) throw InputError("extract_component: |u| must lie in 1..n");
  std::vector<bool> in_u(n, false);
  for (std::size_t i : u) {
    if (i >= n || in_u[i]) throw InputError("extract_component: u must hold distinct indices below n");
    in_u[i] = true;
  }
  if (opts.probes.size() < 2 && u.size() < n) {
    throw InputError("extract_component: at least two probe points are required");
  }

  std::vector<ProbValue> full(n);
  auto evaluate = [&](double eps) {
    const auto fill = ProbValue::from_linear(eps);
    for (std::size_t i = 0; i < n; ++i) full[i] = fill;
    for (std::size_t j = 0; j < u.size(); ++j) full[u[j]] = p_u[j];
    return f(full);
  };

  if (u.size() == n) return evaluate(1.0);
  ProbValue prev = evaluate(opts.probes.front());
  for (std::size_t k = 1; k < opts.probes.size(); ++k) {
    const ProbValue cur = evaluate(opts.probes[k]);
    if (std::fabs(cur.linear() - prev.linear()) < opts.tolerance) return cur;
    prev = cur;
  }
  throw ConvergenceError("extract_component: probe values did not settle; the rule may be non-sensitive or non-monotone");
}

std::string describe(const PcMethod& m) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BhpcMethod>) {
          return "bhpc-" + v.spec.describe();
        } else if constexpr (std::is_same_v<T, StructuredMethod>) {
          return "structured-gbhpc";
        } else {
          return v.label;
        }
      },
      m);
}

ProbValue pc_pvalue(std::span<const ProbValue> p, std::size_t r, const PcMethod& method) {
  return std::visit(
      [&](const auto& v) -> ProbValue {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BhpcMethod>) {
          return bhpc(p, r, v.spec);
        } else if constexpr (std::is_same_v<T, StructuredMethod>) {
          return structured_gbhpc(p, r, v.groups);
        } else {
          return gbhpc_enumerate(p, r, v.g, v.budget);
        }
      },
      method);
}

std::string PcCurve::interpretation() const {
  std::ostringstream os;
  if (r_hat == 0) {
    os << "no partial conjunction null rejected at alpha=" << alpha << "; no lower bound on the number of non-null studies";
    return os.str();
  }
  os << "at least " << r_hat << " of " << n << " studies non-null at confidence " << (1.0 - alpha)
     << " (proportion r0/n in [" << static_cast<double>(r_hat) / static_cast<double>(n) << ", 1])";
  return os.str();
}

PcCurve pc_curve(std::span<const ProbValue> p, const PcMethod& method, double alpha) {
  if (p.empty()) throw InputError("pc_curve: at least one p-value is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("pc_curve: alpha must lie in (0, 1)");
  PcCurve curve;
  curve.n = p.size();
  curve.method = describe(method);
  curve.alpha = alpha;
  const auto log_alpha = std::log(alpha);
  for (std::size_t r = 1; r <= curve.n; ++r) {
    const ProbValue v = pc_pvalue(p, r, method);
    if (!curve.entries.empty() && v < curve.entries.back().p) {
      curve.nondecreasing = false;
      std::ostringstream os;
      os << "curve not monotone in r: p_{" << r << "/" << curve.n << "} = " << v.linear() << " < p_{" << (r - 1)
         << "/" << curve.n << "} = " << curve.entries.back().p.linear();
      curve.warnings.push_back(os.str());
    }
    curve.entries.push_back({r, v});
    if (v.log() <= log_alpha) curve.confidence_set.push_back(r);
  }
  if (!curve.confidence_set.empty()) {
    curve.r_hat = curve.confidence_set.back();
    if (curve.confidence_set.size() != curve.r_hat) {
      curve.warnings.push_back("rejected set is not an initial segment 1..r_hat");
    }
  }
  return curve;
}

}  // namespace pcmeta
