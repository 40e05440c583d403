#include "pcmeta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pcmeta/errors.hpp"
#include "pcmeta/numerics.hpp"
#include "pcmeta/parallel.hpp"

namespace pcmeta::oracle {

namespace {
constexpr std::uint64_t kBlock = 4096;

std::uint64_t blocks_for(std::uint64_t reps) { return (reps + kBlock - 1) / kBlock; }
}  // namespace

NullConfig NullConfig::uniform(std::size_t n) { return {std::vector<double>(n, 0.0), true}; }

NullConfig NullConfig::boundary(std::size_t n, std::size_t r, double z_mean) {
  if (r < 1 || r > n) throw InputError("boundary null: r must lie in 1..n");
  NullConfig c = uniform(n);
  for (std::size_t i = 0; i + 1 < r; ++i) c.z_means[i] = z_mean;
  return c;
}

std::vector<ValidityRow> mc_validity(const Rule& rule, const NullConfig& null, std::span<const double> alphas,
                                     const ValidityOptions& opts) {
  if (opts.reps < 10000) throw InputError("mc_validity: reps must be at least 1e4");
  if (null.z_means.empty()) throw InputError("mc_validity: empty null configuration");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("mc_validity: alpha must lie in (0, 1)");
  }
  const std::size_t n = null.z_means.size();
  const auto blocks = blocks_for(opts.reps);
  std::vector<std::vector<std::uint64_t>> hits(blocks);

  parallel_for(blocks, opts.threads, [&](std::size_t b) {
    auto rng = make_stream(opts.seed, b);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t count = std::min(kBlock, opts.reps - b * kBlock);
    std::vector<std::uint64_t> local(alphas.size(), 0);
    std::vector<ProbValue> p(n);
    for (std::uint64_t i = 0; i < count; ++i) {
      for (std::size_t s = 0; s < n; ++s) {
        const double z = null.z_means[s] + normal(rng);
        const ProbValue tail = numerics::std_normal_sf(null.two_sided ? std::fabs(z) : z);
        p[s] = null.two_sided ? tail.scaled(2.0) : tail;
      }
      const double lp = rule(p).log();
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        if (lp <= std::log(alphas[a])) ++local[a];
      }
    }
    hits[b] = std::move(local);
  });

  const double reps = static_cast<double>(opts.reps);
  std::vector<ValidityRow> out;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    std::uint64_t total = 0;
    for (const auto& h : hits) total += h[a];
    ValidityRow row;
    row.alpha = alphas[a];
    row.rate = static_cast<double>(total) / reps;
    row.se = std::sqrt(row.rate * (1.0 - row.rate) / reps);
    row.bound = row.alpha + 3.0 * std::sqrt(row.alpha * (1.0 - row.alpha) / reps);
    row.valid = row.rate <= row.bound;
    out.push_back(row);
  }
  return out;
}

Estimate tpm_mc_cdf(std::size_t L, double gamma, double w, std::uint64_t reps, std::uint64_t seed,
                    unsigned threads) {
  if (reps < 1000000) throw InputError("tpm_mc_cdf: reps must be at least 1e6");
  if (L < 1) throw InputError("tpm_mc_cdf: L must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("tpm_mc_cdf: gamma must lie in (0, 1]");
  if (!(w >= 0.0)) throw InputError("tpm_mc_cdf: w must be nonnegative");
  if (w >= 1.0) return {1.0, 0.0};
  if (w == 0.0) return {0.0, 0.0};

  const double log_w = std::log(w);
  const auto blocks = blocks_for(reps);
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    auto rng = make_stream(seed, b);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::uint64_t count = std::min(kBlock, reps - b * kBlock);
    std::uint64_t local = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      double log_prod = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        const double u = unif(rng);
        if (u <= gamma) log_prod += std::log(u);
      }
      if (log_prod <= log_w) ++local;
    }
    hits[b] = local;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double est = static_cast<double>(total) / static_cast<double>(reps);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(reps))};
}

CrossCheck structured_vs_enumeration(std::span<const ProbValue> p, std::size_t r, const GroupPartition& groups,
                                     std::uint64_t budget) {
  CrossCheck c;
  c.fast = structured_gbhpc(p, r, groups);
  c.enumerated = gbhpc_enumerate(p, r, block_bonferroni_fisher(groups), budget);
  const double a = c.fast.log();
  const double e = c.enumerated.log();
  c.log_rel_diff = a == e ? 0.0 : std::fabs(a - e) / std::max(1.0, std::fabs(e));
  return c;
}

}  // namespace pcmeta::oracle
