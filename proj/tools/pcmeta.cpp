// pcmeta: partial-conjunction meta-analysis from the command line.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcmeta/combiners.hpp"
#include "pcmeta/counterexample.hpp"
#include "pcmeta/errors.hpp"
#include "pcmeta/io.hpp"
#include "pcmeta/oracle.hpp"
#include "pcmeta/partial_conjunction.hpp"
#include "pcmeta/simulation.hpp"

using namespace pcmeta;
using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

std::uint64_t env_seed() {
  const char* s = std::getenv("PCMETA_SEED");
  if (s == nullptr || *s == '\0') return kDefaultSeed;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw InputError("PCMETA_SEED must be a nonnegative integer");
  return v;
}

struct Input {
  std::string path;
  bool bundled = false;
  bool bundled_counts = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("input", path, "Study CSV");
    cmd->add_flag("--bundled", bundled, "Use the shipped subgroup p-values");
    cmd->add_flag("--bundled-counts", bundled_counts, "Use the shipped subgroup event counts");
  }

  [[nodiscard]] std::vector<io::StudyRecord> load() const {
    const int sources = (path.empty() ? 0 : 1) + (bundled ? 1 : 0) + (bundled_counts ? 1 : 0);
    if (sources != 1) throw InputError("give exactly one of an input CSV, --bundled, --bundled-counts");
    if (bundled) return io::parse_studies(io::bundled_pvalues_csv());
    if (bundled_counts) return io::parse_studies(io::bundled_counts_csv());
    return io::parse_studies(io::read_file(path));
  }
};

std::vector<double> stouffer_weights(const std::vector<io::StudyRecord>& recs, const std::string& from) {
  if (from.empty()) return std::vector<double>(recs.size(), 1.0);
  if (from != "n_sample") throw InputError("--weights-from accepts only n_sample");
  std::vector<double> w;
  for (const auto& r : recs) {
    if (!r.n_sample) throw InputError("study '" + r.study_id + "' has no n_sample");
    w.push_back(std::sqrt(*r.n_sample) / r.sigma);
  }
  return w;
}

CombinerSpec make_spec(const std::string& method, std::optional<double> gamma, std::vector<double> weights) {
  switch (parse_combine_method(method)) {
    case CombineMethod::fisher: return CombinerSpec::fisher();
    case CombineMethod::simes: return CombinerSpec::simes();
    case CombineMethod::bonferroni: return CombinerSpec::bonferroni();
    case CombineMethod::stouffer_weighted: return CombinerSpec::stouffer(std::move(weights));
    case CombineMethod::tpm:
      if (!gamma) throw InputError("--method tpm needs --gamma");
      return CombinerSpec::tpm(*gamma);
  }
  throw InputError("unknown method");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_file(out, text);
  }
}

// ---------------------------------------------------------------------------

struct CombineArgs {
  Input in;
  std::string method = "fisher";
  std::optional<double> gamma;
  std::string weights_from;
  bool json_out = false;
};

int run_combine(const CombineArgs& a) {
  const auto recs = a.in.load();
  const auto p = io::study_pvalues(recs);
  const auto spec = make_spec(a.method, a.gamma, stouffer_weights(recs, a.weights_from));
  const ProbValue v = combine(spec, p);
  if (a.json_out) {
    json doc;
    doc["method"] = spec.describe();
    doc["n"] = p.size();
    doc["p"] = v.linear();
    doc["log_p"] = std::isfinite(v.log()) ? json(v.log()) : json(nullptr);
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << spec.describe() << " over " << p.size() << " p-values: p = " << io::sig6(v.linear())
              << "  log p = " << io::sig6(v.log()) << "\n";
  }
  return 0;
}

struct PcArgs {
  Input in;
  std::optional<std::size_t> r;
  bool all_r = false;
  std::string method = "fisher";
  std::optional<double> gamma;
  std::string weights_from;
  bool groups = false;
  bool enumerate = false;
  double alpha = 0.05;
  std::uint64_t budget = kDefaultSubsetBudget;
  std::string format = "table";
};

PcMethod make_pc_method(const PcArgs& a, const std::vector<io::StudyRecord>& recs) {
  if (a.groups) {
    if (a.method != "fisher") throw InputError("--groups combines within blocks by Fisher; use --method fisher");
    auto groups = io::study_groups(recs);
    if (a.enumerate) return EnumerateMethod{block_bonferroni_fisher(groups), "block-bonferroni-fisher(enumerate)", a.budget};
    return StructuredMethod{std::move(groups)};
  }
  const auto spec = make_spec(a.method, a.gamma, stouffer_weights(recs, a.weights_from));
  if (spec.method == CombineMethod::stouffer_weighted) {
    return EnumerateMethod{weighted_stouffer_subset_combiner(*spec.weights), "stouffer_weighted(gbhpc)", a.budget};
  }
  if (a.enumerate) return EnumerateMethod{fixed_subset_combiner(spec), spec.describe() + "(enumerate)", a.budget};
  return BhpcMethod{spec};
}

int run_pc(const PcArgs& a) {
  if (a.r.has_value() == a.all_r) throw InputError("give exactly one of --r or --all-r");
  const auto recs = a.in.load();
  const auto p = io::study_pvalues(recs);
  const auto method = make_pc_method(a, recs);
  PcCurve curve;
  if (a.all_r) {
    curve = pc_curve(p, method, a.alpha);
  } else {
    if (*a.r < 1 || *a.r > p.size()) throw InputError("--r must lie in 1..n");
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
    curve.n = p.size();
    curve.method = describe(method);
    curve.alpha = a.alpha;
    const ProbValue v = pc_pvalue(p, *a.r, method);
    curve.entries.push_back({*a.r, v});
    if (v.log() <= std::log(a.alpha)) {
      curve.confidence_set.push_back(*a.r);
      curve.r_hat = *a.r;
    }
  }
  if (a.format == "json") {
    std::cout << io::pc_curve_json(curve);
  } else if (a.format == "csv") {
    std::cout << io::pc_curve_csv(curve);
  } else {
    std::cout << io::pc_curve_table(curve);
  }
  return 0;
}

struct Exact2x2Args {
  Input in;
  std::string format = "table";
};

int run_exact2x2(const Exact2x2Args& a) {
  const auto recs = a.in.load();
  std::ostringstream os;
  json doc = json::array();
  if (a.format == "csv") os << "study_id,odds_ratio,p,log_p,p_doubled\n";
  if (a.format == "table") {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %12s %12s %12s %12s\n", "study_id", "odds_ratio", "p", "log p",
                  "p (doubled)");
    os << buf;
  }
  for (const auto& r : recs) {
    if (!r.counts) throw InputError("study '" + r.study_id + "' has no counts");
    const auto res = fisher_exact_2x2(*r.counts);
    const auto dbl = fisher_exact_2x2_doubled(*r.counts);
    if (a.format == "json") {
      json row;
      row["study_id"] = r.study_id;
      row["odds_ratio"] = std::isfinite(res.odds_ratio) ? json(res.odds_ratio) : json(nullptr);
      row["p"] = res.p_two_sided.linear();
      row["log_p"] = res.p_two_sided.log();
      row["p_doubled"] = dbl.linear();
      doc.push_back(row);
    } else if (a.format == "csv") {
      os << io::csv_field(r.study_id) << "," << io::exact(res.odds_ratio) << "," << io::exact(res.p_two_sided.linear())
         << "," << io::exact(res.p_two_sided.log()) << "," << io::exact(dbl.linear()) << "\n";
    } else {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-20s %12s %12s %12s %12s\n", r.study_id.c_str(), io::sig6(res.odds_ratio).c_str(),
                    io::sig6(res.p_two_sided.linear()).c_str(), io::sig6(res.p_two_sided.log()).c_str(),
                    io::sig6(dbl.linear()).c_str());
      os << buf;
    }
  }
  if (a.format == "json") os << doc.dump(2) << "\n";
  std::cout << os.str();
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> reps;
};

int run_simulate(const SimulateArgs& a) {
  SimConfig cfg;
  bool config_has_seed = false;
  if (a.config.empty() || a.config == "default") {
    cfg = SimConfig::defaults();
  } else {
    const auto text = io::read_file(a.config);
    cfg = SimConfig::from_json(text);
    config_has_seed = json::parse(text).contains("seed");
  }
  if (a.seed) {
    cfg.seed = *a.seed;
  } else if (!config_has_seed) {
    cfg.seed = env_seed();
  }
  if (a.threads) cfg.threads = *a.threads;
  if (a.reps) cfg.reps = *a.reps;
  cfg.validate();
  emit(io::power_grid_csv(run_power_map(cfg)), a.out);
  return 0;
}

struct CounterexampleArgs {
  double alpha = 0.2;
  std::size_t grid = 21;
  double mu_max = 4.0;
  std::uint64_t reps = 20000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
  bool slices = false;
};

int run_counterexample(const CounterexampleArgs& a) {
  if (a.slices) {
    json doc = json::array();
    for (auto t : {TwoStudyTest::phi, TwoStudyTest::phi_prime, TwoStudyTest::phi_tilde}) {
      const auto rep = slice_validity(RejectionRegion2D::for_test(t, a.alpha));
      json row;
      row["test"] = std::string(to_string(t));
      row["alpha"] = a.alpha;
      row["supremum"] = rep.supremum;
      row["essential_supremum"] = rep.essential_supremum;
      row["worst_axis"] = rep.worst_axis == 0 ? "p1" : "p2";
      row["worst_position"] = rep.worst_position;
      doc.push_back(row);
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  if (a.grid < 2) throw InputError("--grid must be at least 2");
  PowerGrid2DOptions opts;
  opts.alpha = a.alpha;
  opts.mu_grid = linear_grid(0.0, a.mu_max, a.grid);
  opts.reps = a.reps;
  opts.seed = a.seed ? *a.seed : env_seed();
  opts.threads = a.threads;
  emit(io::power_cells_csv(power_grid_2d(opts)), a.out);
  return 0;
}

struct ValidityArgs {
  std::string method = "fisher";
  std::optional<double> gamma;
  std::size_t n = 8;
  std::size_t r = 1;
  std::optional<std::size_t> null_r;
  double z_mean = 6.0;
  std::size_t block_size = 2;
  std::vector<double> alphas{0.01, 0.05};
  std::uint64_t reps = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool json_out = false;
};

int run_validity(const ValidityArgs& a) {
  if (a.n < 1) throw InputError("--n must be at least 1");
  if (a.r < 1 || a.r > a.n) throw InputError("--r must lie in 1..n");
  oracle::Rule rule;
  std::string label;
  if (a.method == "structured") {
    if (a.block_size < 1) throw InputError("--block-size must be at least 1");
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < a.n; ++i) {
      if (i % a.block_size == 0) blocks.emplace_back();
      blocks.back().push_back(i);
    }
    GroupPartition groups(std::move(blocks), a.n);
    rule = [groups, r = a.r](std::span<const ProbValue> p) { return structured_gbhpc(p, r, groups); };
    label = "structured_gbhpc";
  } else {
    const auto spec = make_spec(a.method, a.gamma, std::vector<double>(a.n, 1.0));
    if (spec.method == CombineMethod::stouffer_weighted) {
      rule = [w = *spec.weights, r = a.r](std::span<const ProbValue> p) { return gbhpc_weighted_stouffer(p, r, w); };
    } else {
      rule = [spec, r = a.r](std::span<const ProbValue> p) { return bhpc(p, r, spec); };
    }
    label = spec.describe();
  }
  oracle::ValidityOptions opts;
  opts.reps = a.reps;
  opts.seed = a.seed ? *a.seed : env_seed();
  opts.threads = a.threads;
  const auto null = oracle::NullConfig::boundary(a.n, a.null_r.value_or(a.r), a.z_mean);
  const auto rows = oracle::mc_validity(rule, null, a.alphas, opts);
  bool all_valid = true;
  if (a.json_out) {
    json doc;
    doc["rule"] = label;
    doc["n"] = a.n;
    doc["r"] = a.r;
    doc["reps"] = a.reps;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
      doc["rows"].push_back(
          {{"alpha", row.alpha}, {"rate", row.rate}, {"se", row.se}, {"bound", row.bound}, {"valid", row.valid}});
      all_valid = all_valid && row.valid;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "alpha,rate,se,bound,valid\n";
    for (const auto& row : rows) {
      std::cout << io::exact(row.alpha) << "," << io::exact(row.rate) << "," << io::exact(row.se) << ","
                << io::exact(row.bound) << "," << (row.valid ? "1" : "0") << "\n";
      all_valid = all_valid && row.valid;
    }
  }
  if (!all_valid) std::cerr << "warning: empirical rejection rate exceeds alpha + 3 SE\n";
  return 0;
}

struct TpmArgs {
  std::size_t L = 3;
  double gamma = 0.05;
  double w = 0.01;
  std::uint64_t reps = 1000000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

int run_tpm(const TpmArgs& a) {
  const auto est = oracle::tpm_mc_cdf(a.L, a.gamma, a.w, a.reps, a.seed ? *a.seed : env_seed(), a.threads);
  const auto closed = tpm_cdf(static_cast<std::int64_t>(a.L), a.gamma, a.w > 0 ? std::log(a.w) : -HUGE_VAL);
  json doc;
  doc["L"] = a.L;
  doc["gamma"] = a.gamma;
  doc["w"] = a.w;
  doc["closed_form"] = closed.linear();
  doc["mc_estimate"] = est.value;
  doc["mc_se"] = est.se;
  doc["z"] = est.se > 0 ? json((est.value - closed.linear()) / est.se) : json(nullptr);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

struct CrossArgs {
  Input in;
  std::optional<std::size_t> r;
  std::uint64_t budget = kDefaultSubsetBudget;
};

int run_crosscheck(const CrossArgs& a) {
  const auto recs = a.in.load();
  const auto p = io::study_pvalues(recs);
  const auto groups = io::study_groups(recs);
  std::cout << "r,structured,enumerated,log_rel_diff\n";
  for (std::size_t r = 1; r <= p.size(); ++r) {
    if (a.r && *a.r != r) continue;
    const auto c = oracle::structured_vs_enumeration(p, r, groups, a.budget);
    std::cout << r << "," << io::exact(c.fast.linear()) << "," << io::exact(c.enumerated.linear()) << ","
              << io::exact(c.log_rel_diff) << "\n";
  }
  return 0;
}

struct ExtractArgs {
  PcArgs pc;
  std::vector<std::size_t> subset;
  std::vector<double> probes{1e-3, 1e-6, 1e-9, 1e-12};
  double tolerance = 1e-10;
};

int run_extract(const ExtractArgs& a) {
  const auto recs = a.pc.in.load();
  const auto p = io::study_pvalues(recs);
  if (!a.pc.r || *a.pc.r < 1 || *a.pc.r > p.size()) throw InputError("--r must lie in 1..n");
  auto u = a.subset;
  std::sort(u.begin(), u.end());
  std::vector<ProbValue> p_u;
  for (auto i : u) {
    if (i >= p.size()) throw InputError("--subset index out of range");
    p_u.push_back(p[i]);
  }
  const auto method = make_pc_method(a.pc, recs);
  const std::size_t r = *a.pc.r;
  const PcEvaluator f = [&](std::span<const ProbValue> q) { return pc_pvalue(q, r, method); };
  const ProbValue g = extract_component(f, p.size(), u, p_u, {a.probes, a.tolerance});
  json doc;
  doc["method"] = describe(method);
  doc["r"] = r;
  doc["subset"] = u;
  doc["p"] = g.linear();
  doc["log_p"] = std::isfinite(g.log()) ? json(g.log()) : json(nullptr);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

void print_error(const char* kind, const std::string& message) {
  json e;
  e["error"] = kind;
  e["message"] = message;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-conjunction p-values and replicability analysis"};
  app.require_subcommand(1);
  int status = 0;

  CombineArgs ca;
  auto* combine_cmd = app.add_subcommand("combine", "Combine study p-values into one meta-analysis p-value");
  ca.in.add_to(combine_cmd);
  combine_cmd->add_option("--method", ca.method, "fisher|simes|bonferroni|stouffer|tpm");
  combine_cmd->add_option("--gamma", ca.gamma, "TPM truncation threshold");
  combine_cmd->add_option("--weights-from", ca.weights_from, "Stouffer weights sqrt(n_sample)/sigma");
  combine_cmd->add_flag("--json", ca.json_out);
  combine_cmd->callback([&] { status = run_combine(ca); });

  PcArgs pa;
  auto* pc_cmd = app.add_subcommand("pc", "Partial-conjunction p-values and the confidence set for r0");
  pa.in.add_to(pc_cmd);
  pc_cmd->add_option("--r", pa.r, "Single r");
  pc_cmd->add_flag("--all-r", pa.all_r, "Every r = 1..n");
  pc_cmd->add_option("--method", pa.method, "fisher|simes|bonferroni|stouffer|tpm");
  pc_cmd->add_option("--gamma", pa.gamma, "TPM truncation threshold");
  pc_cmd->add_option("--weights-from", pa.weights_from, "Stouffer weights sqrt(n_sample)/sigma");
  pc_cmd->add_flag("--groups", pa.groups, "Structured GBHPC over group_factor blocks");
  pc_cmd->add_flag("--enumerate", pa.enumerate, "Force exhaustive subset enumeration");
  pc_cmd->add_option("--alpha", pa.alpha);
  pc_cmd->add_option("--budget", pa.budget, "Maximum subsets per r for enumeration");
  pc_cmd->add_option("--format", pa.format)->check(CLI::IsMember({"table", "json", "csv"}));
  pc_cmd->callback([&] { status = run_pc(pa); });

  Exact2x2Args ea;
  auto* exact_cmd = app.add_subcommand("exact2x2", "Two-sided Fisher exact test per row of event counts");
  ea.in.add_to(exact_cmd);
  exact_cmd->add_option("--format", ea.format)->check(CLI::IsMember({"table", "json", "csv"}));
  exact_cmd->callback([&] { status = run_exact2x2(ea); });

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Power map of the PC methods over (mu0, sigma0)");
  sim_cmd->add_option("config", sa.config, "JSON config, or 'default'");
  sim_cmd->add_option("--out", sa.out, "Output CSV (stdout if omitted)");
  sim_cmd->add_option("--threads", sa.threads);
  sim_cmd->add_option("--seed", sa.seed);
  sim_cmd->add_option("--reps", sa.reps);
  sim_cmd->callback([&] { status = run_simulate(sa); });

  CounterexampleArgs xa;
  auto* cx_cmd = app.add_subcommand("counterexample", "Power of the two-study monotone and non-monotone tests");
  cx_cmd->add_option("--alpha", xa.alpha);
  cx_cmd->add_option("--grid", xa.grid, "Points per axis");
  cx_cmd->add_option("--mu-max", xa.mu_max);
  cx_cmd->add_option("--reps", xa.reps);
  cx_cmd->add_option("--seed", xa.seed);
  cx_cmd->add_option("--threads", xa.threads);
  cx_cmd->add_option("--out", xa.out);
  cx_cmd->add_flag("--slices", xa.slices, "Report exact slice validity instead of power");
  cx_cmd->callback([&] { status = run_counterexample(xa); });

  ExtractArgs xe;
  auto* extract_cmd = app.add_subcommand("extract", "Recover the subset combiner g_u behind a PC rule");
  xe.pc.in.add_to(extract_cmd);
  extract_cmd->add_option("--r", xe.pc.r)->required();
  extract_cmd->add_option("--subset", xe.subset, "Study indices (0-based) forming u")->delimiter(',')->required();
  extract_cmd->add_option("--method", xe.pc.method, "fisher|simes|bonferroni|stouffer|tpm");
  extract_cmd->add_option("--gamma", xe.pc.gamma);
  extract_cmd->add_option("--weights-from", xe.pc.weights_from);
  extract_cmd->add_flag("--groups", xe.pc.groups);
  extract_cmd->add_option("--probes", xe.probes, "Decreasing probe values for the complement")->delimiter(',');
  extract_cmd->add_option("--tolerance", xe.tolerance);
  extract_cmd->callback([&] { status = run_extract(xe); });

  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo and enumeration cross-checks");
  oracle_cmd->require_subcommand(1);

  ValidityArgs va;
  auto* val_cmd = oracle_cmd->add_subcommand("validity", "Rejection rate of a PC rule under a boundary null");
  val_cmd->add_option("--method", va.method, "fisher|simes|bonferroni|stouffer|tpm|structured");
  val_cmd->add_option("--gamma", va.gamma);
  val_cmd->add_option("--n", va.n);
  val_cmd->add_option("--r", va.r, "PC level of the rule");
  val_cmd->add_option("--null-r", va.null_r, "Boundary null H0^{r/n}: r - 1 non-null studies (default --r)");
  val_cmd->add_option("--z-mean", va.z_mean, "Mean of the non-null z-scores");
  val_cmd->add_option("--block-size", va.block_size, "Block size for --method structured");
  val_cmd->add_option("--alpha", va.alphas)->delimiter(',');
  val_cmd->add_option("--reps", va.reps);
  val_cmd->add_option("--seed", va.seed);
  val_cmd->add_option("--threads", va.threads);
  val_cmd->add_flag("--json", va.json_out);
  val_cmd->callback([&] { status = run_validity(va); });

  TpmArgs ta;
  auto* tpm_cmd = oracle_cmd->add_subcommand("tpm", "TPM closed form against Monte Carlo");
  tpm_cmd->add_option("--L", ta.L);
  tpm_cmd->add_option("--gamma", ta.gamma);
  tpm_cmd->add_option("--w", ta.w);
  tpm_cmd->add_option("--reps", ta.reps);
  tpm_cmd->add_option("--seed", ta.seed);
  tpm_cmd->add_option("--threads", ta.threads);
  tpm_cmd->callback([&] { status = run_tpm(ta); });

  CrossArgs ka;
  auto* cross_cmd = oracle_cmd->add_subcommand("crosscheck", "Structured GBHPC against full enumeration");
  ka.in.add_to(cross_cmd);
  cross_cmd->add_option("--r", ka.r);
  cross_cmd->add_option("--budget", ka.budget);
  cross_cmd->callback([&] { status = run_crosscheck(ka); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    print_error("convergence", e.what());
    return 3;
  } catch (const BudgetExceeded& e) {
    print_error("budget", e.what());
    return 2;
  } catch (const DomainError& e) {
    print_error("domain", e.what());
    return 2;
  } catch (const InputError& e) {
    print_error("input", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    print_error("input", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return status;
}
