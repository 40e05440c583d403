#include "pcmeta/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "pcmeta/combiners.hpp"
#include "pcmeta/counterexample.hpp"
#include "pcmeta/errors.hpp"
#include "pcmeta/numerics.hpp"
#include "pcmeta/parallel.hpp"
#include "pcmeta/partial_conjunction.hpp"

namespace pcmeta {

namespace {
constexpr std::uint64_t kBlockReps = 2000;
}

std::string_view to_string(SimMethod m) {
  switch (m) {
    case SimMethod::fisher_bhpc: return "fisher_bhpc";
    case SimMethod::simes_bhpc: return "simes_bhpc";
    case SimMethod::stouffer_gbhpc: return "stouffer_gbhpc";
  }
  return "unknown";
}

SimMethod parse_sim_method(std::string_view name) {
  if (name == "fisher_bhpc") return SimMethod::fisher_bhpc;
  if (name == "simes_bhpc") return SimMethod::simes_bhpc;
  if (name == "stouffer_gbhpc") return SimMethod::stouffer_gbhpc;
  throw InputError("unknown simulation method: " + std::string(name));
}

SimConfig SimConfig::defaults() {
  SimConfig cfg;
  cfg.mu0_grid = linear_grid(0.02, 0.4, 10);
  cfg.sigma0_grid = linear_grid(0.01, 0.4, 10);
  return cfg;
}

SimConfig SimConfig::from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("config: top level must be a JSON object");
  static const std::set<std::string> known{"r",     "sample_sizes", "r0_values", "mu0_grid", "sigma0_grid",
                                           "alpha", "reps",         "seed",      "methods",  "threads",
                                           "fixed_nonnull"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw InputError("config: unknown key '" + key + "'");
  }
  SimConfig cfg = defaults();
  try {
    if (doc.contains("r")) cfg.r = doc["r"].get<std::size_t>();
    if (doc.contains("sample_sizes")) cfg.sample_sizes = doc["sample_sizes"].get<std::vector<double>>();
    if (doc.contains("r0_values")) cfg.r0_values = doc["r0_values"].get<std::vector<std::size_t>>();
    if (doc.contains("mu0_grid")) cfg.mu0_grid = doc["mu0_grid"].get<std::vector<double>>();
    if (doc.contains("sigma0_grid")) cfg.sigma0_grid = doc["sigma0_grid"].get<std::vector<double>>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("reps")) cfg.reps = doc["reps"].get<std::uint64_t>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<unsigned>();
    if (doc.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : doc["methods"]) cfg.methods.push_back(parse_sim_method(m.get<std::string>()));
    }
    if (doc.contains("fixed_nonnull") && !doc["fixed_nonnull"].is_null()) {
      cfg.fixed_nonnull = doc["fixed_nonnull"].get<std::vector<std::size_t>>();
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string SimConfig::to_json() const {
  nlohmann::json doc;
  doc["r"] = r;
  doc["sample_sizes"] = sample_sizes;
  doc["r0_values"] = r0_values;
  doc["mu0_grid"] = mu0_grid;
  doc["sigma0_grid"] = sigma0_grid;
  doc["alpha"] = alpha;
  doc["reps"] = reps;
  doc["seed"] = seed;
  doc["threads"] = threads;
  std::vector<std::string> names;
  for (auto m : methods) names.emplace_back(to_string(m));
  doc["methods"] = names;
  doc["fixed_nonnull"] = fixed_nonnull ? nlohmann::json(*fixed_nonnull) : nlohmann::json(nullptr);
  return doc.dump(2);
}

void SimConfig::validate() const {
  if (sample_sizes.empty()) throw InputError("config: sample_sizes must be nonempty");
  for (double s : sample_sizes) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("config: sample sizes must be positive");
  }
  if (r < 1 || r > n()) throw InputError("config: r must lie in 1..n");
  for (auto r0 : r0_values) {
    if (r0 > n()) throw InputError("config: r0 must not exceed n");
  }
  for (double m : mu0_grid) {
    if (!(m > 0.0) || !std::isfinite(m)) throw InputError("config: mu0 values must be positive");
  }
  for (double s : sigma0_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("config: sigma0 values must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("config: alpha must lie in (0, 1)");
  if (reps < 1000) throw InputError("config: reps must be at least 1000");
  if (methods.empty()) throw InputError("config: at least one method is required");
  if (fixed_nonnull) {
    std::set<std::size_t> seen;
    for (auto i : *fixed_nonnull) {
      if (i >= n() || !seen.insert(i).second) throw InputError("config: fixed_nonnull must hold distinct study indices");
    }
    const auto max_r0 = r0_values.empty() ? 0 : *std::max_element(r0_values.begin(), r0_values.end());
    if (fixed_nonnull->size() < max_r0) throw InputError("config: fixed_nonnull shorter than the largest r0");
  }
}

GammaParams gamma_from_moments(double mu0, double sigma0) {
  if (!(mu0 > 0.0) || !(sigma0 > 0.0)) throw InputError("gamma moments must be positive");
  return {(mu0 / sigma0) * (mu0 / sigma0), mu0 / (sigma0 * sigma0)};
}

std::vector<ProbValue> draw_study_pvalues(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0,
                                          std::mt19937_64& rng) {
  const std::size_t n = cfg.n();
  if (r0 > n) throw InputError("r0 must not exceed n");
  std::vector<bool> nonnull(n, false);
  if (cfg.fixed_nonnull) {
    for (std::size_t j = 0; j < r0; ++j) nonnull[(*cfg.fixed_nonnull)[j]] = true;
  } else {
    // Partial Fisher-Yates: the first r0 slots form a uniform random subset.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t j = 0; j < r0; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, n - 1);
      std::swap(order[j], order[pick(rng)]);
      nonnull[order[j]] = true;
    }
  }

  std::optional<std::gamma_distribution<double>> effect;
  if (r0 > 0) {
    const auto gp = gamma_from_moments(mu0, sigma0);
    effect.emplace(gp.shape, 1.0 / gp.rate);
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  // Capped just below 1 so Stouffer normal scores stay finite.
  static const ProbValue kBelowOne = ProbValue::from_linear(std::nextafter(1.0, 0.0));
  std::vector<ProbValue> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = nonnull[i] ? (*effect)(rng) : 0.0;
    const double z = std::sqrt(cfg.sample_sizes[i]) * mu + noise(rng);
    const double log_p = std::numbers::ln2 + numerics::std_normal_sf(std::fabs(z)).log();
    p[i] = std::min(ProbValue::from_log(std::min(0.0, log_p)), kBelowOne);
  }
  return p;
}

ProbValue sim_method_pvalue(const SimConfig& cfg, SimMethod method, std::span<const ProbValue> p) {
  switch (method) {
    case SimMethod::fisher_bhpc: return bhpc(p, cfg.r, CombinerSpec::fisher());
    case SimMethod::simes_bhpc: return bhpc(p, cfg.r, CombinerSpec::simes());
    case SimMethod::stouffer_gbhpc: {
      std::vector<double> w(cfg.n());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(cfg.sample_sizes[i]);
      return gbhpc_weighted_stouffer(p, cfg.r, w);
    }
  }
  throw InputError("unknown simulation method");
}

namespace {

// Rejection counts for one block of replicates, one slot per method.
std::vector<std::size_t> run_block(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0,
                                   std::uint64_t cell_key, std::uint64_t block) {
  const std::uint64_t begin = block * kBlockReps;
  const std::uint64_t count = std::min(kBlockReps, cfg.reps - begin);
  auto rng = make_stream(cfg.seed, cell_key, block);
  std::vector<std::vector<double>> pc(cfg.methods.size(), std::vector<double>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto p = draw_study_pvalues(cfg, r0, mu0, sigma0, rng);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) pc[m][i] = sim_method_pvalue(cfg, cfg.methods[m], p).linear();
  }
  std::vector<std::size_t> out(cfg.methods.size());
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) out[m] = kernels::count_at_most(cfg.simd, pc[m], cfg.alpha);
  return out;
}

std::uint64_t block_count(std::uint64_t reps) { return (reps + kBlockReps - 1) / kBlockReps; }

PowerEntry make_entry(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0, std::size_t m,
                      std::size_t rejections) {
  const double reps = static_cast<double>(cfg.reps);
  const double power = static_cast<double>(rejections) / reps;
  return {mu0, sigma0, cfg.methods[m], r0, power, std::sqrt(power * (1.0 - power) / reps)};
}

}  // namespace

std::vector<PowerEntry> run_power_cell(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0,
                                       std::uint64_t cell_key) {
  cfg.validate();
  const auto blocks = block_count(cfg.reps);
  std::vector<std::vector<std::size_t>> partial(blocks);
  parallel_for(blocks, cfg.threads,
               [&](std::size_t b) { partial[b] = run_block(cfg, r0, mu0, sigma0, cell_key, b); });
  std::vector<PowerEntry> out;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    std::size_t total = 0;
    for (const auto& blk : partial) total += blk[m];
    out.push_back(make_entry(cfg, r0, mu0, sigma0, m, total));
  }
  return out;
}

PowerGrid run_power_map(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t nm = cfg.mu0_grid.size();
  const std::size_t ns = cfg.sigma0_grid.size();
  const std::size_t cells = cfg.r0_values.size() * nm * ns;
  const auto blocks = block_count(cfg.reps);
  std::vector<std::vector<std::size_t>> partial(cells * blocks);

  auto cell_params = [&](std::size_t c) {
    const std::size_t ri = c / (nm * ns);
    const std::size_t mi = (c / ns) % nm;
    const std::size_t si = c % ns;
    return std::tuple{cfg.r0_values[ri], cfg.mu0_grid[mi], cfg.sigma0_grid[si]};
  };
  parallel_for(cells * blocks, cfg.threads, [&](std::size_t unit) {
    const std::size_t c = unit / blocks;
    const auto [r0, mu0, sigma0] = cell_params(c);
    partial[unit] = run_block(cfg, r0, mu0, sigma0, c, unit % blocks);
  });

  PowerGrid grid;
  grid.mu0_axis = cfg.mu0_grid;
  grid.sigma0_axis = cfg.sigma0_grid;
  for (std::size_t c = 0; c < cells; ++c) {
    const auto [r0, mu0, sigma0] = cell_params(c);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      std::size_t total = 0;
      for (std::uint64_t b = 0; b < blocks; ++b) total += partial[c * blocks + b][m];
      grid.entries.push_back(make_entry(cfg, r0, mu0, sigma0, m, total));
    }
  }
  return grid;
}

const PowerEntry& PowerGrid::at(std::size_t r0, double mu0, double sigma0, SimMethod m) const {
  for (const auto& e : entries) {
    if (e.r0 == r0 && e.mu0 == mu0 && e.sigma0 == sigma0 && e.method == m) return e;
  }
  throw InputError("power grid has no such cell");
}

double joint_se(const PowerEntry& a, const PowerEntry& b) { return std::sqrt(a.se * a.se + b.se * b.se); }

}  // namespace pcmeta
