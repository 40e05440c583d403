// Acceptance checks: one PASS/FAIL line per criterion.
//
// Exit status is the number of failures that are not listed in
// kKnownFailures. A known failure still prints FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pcmeta/combiners.hpp"
#include "pcmeta/counterexample.hpp"
#include "pcmeta/io.hpp"
#include "pcmeta/oracle.hpp"
#include "pcmeta/partial_conjunction.hpp"
#include "pcmeta/simulation.hpp"

using namespace pcmeta;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Criteria whose published reference value cannot be reproduced by the
// defined computation. See the README section on reference values.
const std::map<int, std::string> kKnownFailures = {
    {3, "published r=16 value 7.36e-2 repeats r=15; the exact maximum is 9.54e-2"},
};

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<ProbValue> bundled_p() { return io::study_pvalues(io::parse_studies(io::bundled_pvalues_csv())); }
GroupPartition bundled_groups() { return io::study_groups(io::parse_studies(io::bundled_pvalues_csv())); }

std::vector<ProbValue> pv(std::initializer_list<double> xs) {
  std::vector<ProbValue> out;
  for (double x : xs) out.push_back(ProbValue::from_linear(x));
  return out;
}

// 1. Block-level Fisher BHPC values.
Outcome golden_blocks() {
  const auto p = bundled_p();
  const auto groups = bundled_groups();
  // (block index, r) -> reference, blocks in file order.
  const std::vector<std::vector<double>> want{
      {9.37e-6, 9.26e-3},          {1.74e-5, 2.38e-3}, {1.64e-5, 3.81e-3},          {1.47e-5, 2.14e-2},
      {5.83e-6, 3.68e-2, 9.64e-1}, {5.29e-5, 4.78e-2, 1.05e-1}, {5.61e-6, 1.61e-2}, {1.98e-6, 4.68e-3}};
  Outcome o;
  int checked = 0;
  double worst = 0;
  for (std::size_t b = 0; b < want.size(); ++b) {
    std::vector<ProbValue> block;
    for (auto i : groups.blocks()[b]) block.push_back(p[i]);
    for (std::size_t r = 1; r <= want[b].size(); ++r) {
      const double got = bhpc(block, r, CombinerSpec::fisher()).linear();
      const double e = rel(got, want[b][r - 1]);
      worst = std::max(worst, e);
      ++checked;
      if (e > 0.01) {
        o.pass = false;
        o.detail += " block " + std::to_string(b) + " r=" + std::to_string(r) + " got " + fmt("%.4g", got);
      }
    }
  }
  o.detail = std::to_string(checked) + " values, worst rel err " + fmt("%.2e", worst) + o.detail;
  if (checked != 18) o.pass = false;
  return o;
}

const std::vector<double> kBonferroni{3.73e-4, 3.98e-4, 6.98e-4, 7.29e-4, 8.59e-4, 3.52e-3,
                                      5.50e-3, 2.38e-2, 3.43e-2, 3.75e-2, 4.37e-2, 5.56e-2,
                                      8.07e-2, 8.56e-2, 2.35e-1, 2.11e-1, 9.64e-1};
const std::vector<double> kGbhpc{4.49e-5, 4.66e-5, 7.50e-5, 1.18e-4, 1.31e-4, 1.39e-4, 4.23e-4, 1.90e-2, 2.66e-2,
                                 2.81e-2, 4.63e-2, 6.45e-2, 6.45e-2, 7.36e-2, 7.36e-2, 2.11e-1, 9.64e-1};

// 2. Bonferroni BHPC column, r = 2..18.
Outcome golden_bonferroni() {
  const auto p = bundled_p();
  Outcome o;
  double worst = 0;
  for (std::size_t r = 2; r <= 18; ++r) {
    const double got = bhpc(p, r, CombinerSpec::bonferroni()).linear();
    const double e = rel(got, kBonferroni[r - 2]);
    worst = std::max(worst, e);
    if (e > 0.01) {
      o.pass = false;
      o.detail += " r=" + std::to_string(r) + " got " + fmt("%.4g", got);
    }
  }
  o.detail = "17 values, worst rel err " + fmt("%.2e", worst) + o.detail;
  return o;
}

// 3. Structured GBHPC column via the fast path and by enumeration.
Outcome golden_gbhpc() {
  const auto p = bundled_p();
  const auto groups = bundled_groups();
  const auto g = block_bonferroni_fisher(groups);
  Outcome o;
  double worst_agree = 0;
  std::uint64_t max_subsets = 0;
  std::string misses;
  for (std::size_t r = 2; r <= 18; ++r) {
    max_subsets = std::max(max_subsets, count_subsets(18, 18 - r + 1));
    const ProbValue fast = structured_gbhpc(p, r, groups);
    const ProbValue slow = gbhpc_enumerate(p, r, g);
    const double agree = fast.log() == slow.log() ? 0.0 : std::fabs(fast.log() - slow.log()) / std::fabs(slow.log());
    worst_agree = std::max(worst_agree, agree);
    if (agree > 1e-12) o.pass = false;
    const double e = std::max(rel(fast.linear(), kGbhpc[r - 2]), rel(slow.linear(), kGbhpc[r - 2]));
    if (e > 0.01) {
      o.pass = false;
      misses += " r=" + std::to_string(r) + " got " + fmt("%.4g", fast.linear()) + " want " +
                fmt("%.3g", kGbhpc[r - 2]);
    }
  }
  if (max_subsets > 48620) o.pass = false;
  o.detail = "paths agree to " + fmt("%.1e", worst_agree) + ", max " + std::to_string(max_subsets) + " subsets/r;" +
             (misses.empty() ? " all 17 within 1%" : misses);
  return o;
}

// 4. Exact test recomputation from counts.
Outcome exact_ingestion() {
  const auto counts = io::parse_studies(io::bundled_counts_csv());
  const auto published = io::parse_studies(io::bundled_pvalues_csv());
  int hits = 0;
  std::string misses;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double want = *published[i].p;
    const double got = fisher_exact_2x2(*counts[i].counts).p_two_sided.linear();
    if (rel(got, want) <= 0.02) {
      ++hits;
    } else {
      misses += " " + counts[i].study_id + ": " + fmt("%.4g", got) + " (doubled " +
                fmt("%.4g", fisher_exact_2x2_doubled(*counts[i].counts).linear()) + ")";
    }
  }
  return {hits >= 16, std::to_string(hits) + "/18 within 2% (minimum likelihood)" + misses};
}

// 5. Ordering of the illustrative cases.
Outcome case_orderings() {
  const auto a = pv({1e-200, 0.4, 0.5, 0.6, 0.7});
  const auto b = pv({1e-10, 1e-9, 1e-8, 1e-7, 1e-6});
  const auto c = pv({1e-100, 1e-100, 1e-100, 0.049, 0.8});
  const auto d = pv({0.048, 0.048, 0.048, 0.048, 0.8});
  const std::vector<double> w(5, 1.0);
  const double fa = combine_fisher(a).log(), fb = combine_fisher(b).log();
  const double sa = combine_stouffer_weighted(a, w).log(), sb = combine_stouffer_weighted(b, w).log();
  const double pc = bhpc(c, 4, CombinerSpec::fisher()).log(), pd = bhpc(d, 4, CombinerSpec::fisher()).log();
  const bool ok = fa < fb && sa < sb && pd < pc;
  std::ostringstream os;
  os << "log p: Fisher A " << fa << " < B " << fb << "; Stouffer A " << sa << " < B " << sb << "; BHPC r=4 D " << pd
     << " < C " << pc;
  return {ok, os.str()};
}

// 6. Monte Carlo validity of combiners and PC methods.
Outcome validity_suite() {
  const std::vector<double> alphas{0.01, 0.05};
  oracle::ValidityOptions opts;
  opts.reps = 100000;
  Outcome o;
  int runs = 0;
  double worst_margin = -1;  // max of (rate - bound)
  auto check = [&](const std::string& label, const oracle::Rule& rule, const oracle::NullConfig& null) {
    opts.seed = 1000 + static_cast<std::uint64_t>(runs++);
    for (const auto& row : oracle::mc_validity(rule, null, alphas, opts)) {
      worst_margin = std::max(worst_margin, row.rate - row.bound);
      if (!row.valid) {
        o.pass = false;
        o.detail += " " + label + "@" + fmt("%g", row.alpha) + "=" + fmt("%.4f", row.rate);
      }
    }
  };
  for (std::size_t k : {2u, 5u, 10u}) {
    const auto null = oracle::NullConfig::uniform(k);
    const std::vector<double> w(k, 1.0);
    const std::string K = "k" + std::to_string(k);
    check("fisher/" + K, [](auto p) { return combine_fisher(p); }, null);
    check("simes/" + K, [](auto p) { return combine_simes(p); }, null);
    check("bonferroni/" + K, [](auto p) { return combine_bonferroni(p); }, null);
    check("stouffer/" + K, [w](auto p) { return combine_stouffer_weighted(p, w); }, null);
    check("tpm/" + K, [](auto p) { return combine_tpm(p, 0.05); }, null);
  }
  const auto boundary = oracle::NullConfig::boundary(8, 2, 6.0);
  const std::vector<double> sw{10, 10, 10, std::sqrt(500.0), std::sqrt(500.0), std::sqrt(500.0), std::sqrt(1000.0),
                               std::sqrt(1000.0)};
  const GroupPartition groups({{0, 1}, {2, 3}, {4, 5}, {6, 7}}, 8);
  for (auto spec : {CombinerSpec::fisher(), CombinerSpec::simes(), CombinerSpec::bonferroni(), CombinerSpec::tpm(0.05)}) {
    check("bhpc-" + spec.describe(), [spec](auto p) { return bhpc(p, 2, spec); }, boundary);
  }
  check("stouffer-gbhpc", [sw](auto p) { return gbhpc_weighted_stouffer(p, 2, sw); }, boundary);
  check("structured-gbhpc", [groups](auto p) { return structured_gbhpc(p, 2, groups); }, boundary);
  o.detail = std::to_string(runs) + " rules x 2 alphas at 1e5 reps, max(rate - bound) = " + fmt("%.4f", worst_margin) +
             o.detail;
  return o;
}

// 7. Two-study counterexample.
Outcome counterexample_suite() {
  Outcome o;
  std::ostringstream os;
  for (double alpha : {0.05, 0.1, 0.2}) {
    const auto rep = slice_validity(RejectionRegion2D::for_test(TwoStudyTest::phi_tilde, alpha));
    const double tol = 8 * std::numeric_limits<double>::epsilon() * alpha;
    const bool ok = std::fabs(rep.supremum - alpha) <= tol && std::fabs(rep.essential_supremum - alpha) <= tol;
    os << "slice sup(" << alpha << ") - alpha = " << fmt("%.1e", rep.supremum - alpha) << "; ";
    o.pass = o.pass && ok;
  }
  PowerGrid2DOptions opts;
  opts.alpha = 0.2;
  opts.mu_grid = linear_grid(0.0, 4.0, 21);
  opts.reps = 20000;
  opts.seed = 7;
  const auto cells = power_grid_2d(opts);
  std::size_t points = 0, dominated = 0, strict = 0;
  double null_worst = 0;
  for (std::size_t i = 0; i < cells.size(); i += 3) {
    const auto& phi = cells[i];
    const auto& tilde = cells[i + 2];
    ++points;
    dominated += tilde.power >= phi.power ? 1 : 0;
    strict += tilde.power > phi.power ? 1 : 0;
    if (phi.mu1 == 0.0 && phi.mu2 == 0.0) {
      const double bound = opts.alpha + 3 * std::sqrt(opts.alpha * (1 - opts.alpha) / static_cast<double>(opts.reps));
      for (int t = 0; t < 3; ++t) {
        null_worst = std::max(null_worst, cells[i + t].power);
        if (cells[i + t].power > bound) o.pass = false;
      }
    }
  }
  o.pass = o.pass && dominated == points && strict >= 1;
  os << "power(phi~) >= power(phi) at " << dominated << "/" << points << ", strictly at " << strict
     << ", max null power " << fmt("%.4f", null_worst);
  o.detail = os.str();
  return o;
}

// 8. Directional claims of the power study.
Outcome simulation_claims() {
  SimConfig cfg = SimConfig::defaults();
  Outcome o;
  std::ostringstream os;
  // (a) boundary null of H_0^{2/8}: one non-null study.
  const double bound = cfg.alpha + 3 * std::sqrt(cfg.alpha * (1 - cfg.alpha) / static_cast<double>(cfg.reps));
  double worst = 0;
  for (double mu0 : {0.1, 1.0}) {
    for (const auto& e : run_power_cell(cfg, 1, mu0, 0.01, 900 + static_cast<std::uint64_t>(mu0 * 10))) {
      worst = std::max(worst, e.power);
      if (e.power > bound) o.pass = false;
    }
  }
  os << "(a) boundary-null max rate " << fmt("%.4f", worst) << " <= " << fmt("%.4f", bound) << "; ";

  const auto grid = run_power_map(cfg);
  const double mu_hi = cfg.mu0_grid[9], sigma_hi = cfg.sigma0_grid[9];
  const auto& sb = grid.at(2, mu_hi, sigma_hi, SimMethod::simes_bhpc);
  const auto& fb = grid.at(2, mu_hi, sigma_hi, SimMethod::fisher_bhpc);
  const double d_b = sb.power - fb.power, j_b = joint_se(sb, fb);
  os << "(b) r0=2 mu0=" << mu_hi << " sigma0=" << sigma_hi << ": simes - fisher = " << fmt("%.4f", d_b) << " ("
     << fmt("%.1f", d_b / j_b) << " joint SE); ";
  if (!(d_b > 3 * j_b)) o.pass = false;

  const double mu_mid = cfg.mu0_grid[1], sigma_lo = cfg.sigma0_grid[0];
  const auto& st = grid.at(6, mu_mid, sigma_lo, SimMethod::stouffer_gbhpc);
  const auto& fc = grid.at(6, mu_mid, sigma_lo, SimMethod::fisher_bhpc);
  const double d_c = st.power - fc.power, j_c = joint_se(st, fc);
  os << "(c) r0=6 mu0=" << fmt("%.4g", mu_mid) << " sigma0=" << sigma_lo << " (fisher power " << fmt("%.3f", fc.power)
     << "): stouffer - fisher = " << fmt("%.4f", d_c) << " (" << fmt("%.1f", d_c / j_c) << " joint SE)";
  if (!(d_c > 3 * j_c)) o.pass = false;
  o.detail = os.str();
  return o;
}

// 9. TPM closed form against Monte Carlo.
Outcome tpm_crosscheck() {
  struct Case {
    std::size_t L;
    double gamma, w;
  };
  const std::vector<Case> cases{
      {1, 0.05, 0.01},  {1, 0.5, 0.2},    {1, 1.0, 0.3},    {2, 0.05, 1e-3},  {2, 0.1, 5e-3},
      {2, 0.5, 0.05},   {2, 1.0, 0.1},    {3, 0.05, 0.01},  {3, 0.05, 1e-4},  {3, 0.2, 1e-3},
      {3, 0.5, 0.02},   {3, 1.0, 0.01},   {4, 0.01, 1e-3},  {4, 0.1, 1e-4},   {5, 0.05, 1e-5},
      {5, 0.2, 1e-4},   {5, 0.5, 1e-3},   {5, 1.0, 1e-3},   {6, 0.05, 1e-6},  {7, 0.3, 1e-5},
      {8, 0.05, 1e-8},  {8, 0.5, 1e-5},   {10, 0.05, 1e-9}, {10, 0.2, 1e-7},  {10, 1.0, 1e-6},
  };
  Outcome o;
  double worst_z = 0;
  std::uint64_t seed = 500;
  for (const auto& c : cases) {
    const double closed = tpm_cdf(static_cast<std::int64_t>(c.L), c.gamma, std::log(c.w)).linear();
    const auto mc = oracle::tpm_mc_cdf(c.L, c.gamma, c.w, 1000000, seed++);
    const double se = std::sqrt(closed * (1 - closed) / 1e6);
    const double z = std::fabs(mc.value - closed) / se;
    worst_z = std::max(worst_z, z);
    if (!(z <= 4.0)) {
      o.pass = false;
      o.detail += " (L=" + std::to_string(c.L) + ",g=" + fmt("%g", c.gamma) + ",w=" + fmt("%g", c.w) + ") z=" +
                  fmt("%.2f", z);
    }
  }
  // gamma = 1 is Fisher's method.
  double worst_log = 0;
  for (const auto& p : {pv({0.01, 0.2, 0.9}), pv({1e-200, 0.4, 0.5, 0.6, 0.7}), pv({1e-10, 1e-9, 1e-8}), pv({0.5})}) {
    const double d = std::fabs(combine_tpm(p, 1.0).log() - combine_fisher(p).log());
    worst_log = std::max(worst_log, d);
  }
  if (worst_log > 1e-10) o.pass = false;
  o.detail = "25 cases, max |z| = " + fmt("%.2f", worst_z) + "; gamma=1 vs Fisher max |dlog| = " +
             fmt("%.1e", worst_log) + o.detail;
  return o;
}

// 10. Byte-identical output across runs and thread counts.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pcmeta_acceptance";
  fs::create_directories(dir);
  const std::string cli = PCMETA_CLI_PATH;
  const std::string cfg = (dir / "sim.json").string();
  io::write_file(cfg, R"({"mu0_grid": [0.1, 0.3], "sigma0_grid": [0.05, 0.3], "reps": 5000, "seed": 11})");

  struct Cmd {
    std::string name, args;
  };
  const std::vector<Cmd> cmds{
      {"simulate", "simulate " + cfg + " --out {out} --threads {t}"},
      {"counterexample", "counterexample --alpha 0.2 --grid 6 --reps 10000 --seed 3 --out {out} --threads {t}"},
      {"validity", "oracle validity --method simes --r 2 --reps 20000 --seed 5 --threads {t} > {out}"},
      {"tpm", "oracle tpm --L 3 --gamma 0.05 --w 0.01 --seed 9 --threads {t} > {out}"},
      {"pc", "pc --bundled --groups --all-r --format json > {out}"},
  };
  auto expand = [](std::string s, const std::string& out, int t) {
    for (auto pos = s.find("{out}"); pos != std::string::npos; pos = s.find("{out}")) s.replace(pos, 5, out);
    for (auto pos = s.find("{t}"); pos != std::string::npos; pos = s.find("{t}")) s.replace(pos, 3, std::to_string(t));
    return s;
  };
  Outcome o;
  int same = 0;
  for (const auto& c : cmds) {
    std::vector<std::string> outputs;
    for (int t : {1, 4, 1}) {
      const auto out = (dir / (c.name + "_" + std::to_string(outputs.size()) + ".out")).string();
      const auto line = cli + " " + expand(c.args, out, t);
      if (std::system(line.c_str()) != 0) {
        o.pass = false;
        o.detail += " " + c.name + " failed;";
        break;
      }
      outputs.push_back(io::read_file(out));
    }
    if (outputs.size() == 3 && outputs[0] == outputs[1] && outputs[1] == outputs[2] && !outputs[0].empty()) {
      ++same;
    } else {
      o.pass = false;
      o.detail += " " + c.name + " differs;";
    }
  }
  o.detail = std::to_string(same) + "/" + std::to_string(cmds.size()) +
             " commands byte-identical over 3 runs (threads 1, 4, 1)" + o.detail;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Criterion> criteria{
      {1, "block-level Fisher BHPC reference values", golden_blocks, 1},
      {2, "Bonferroni BHPC reference column", golden_bonferroni, 1},
      {3, "structured GBHPC reference column, fast path and enumeration", golden_gbhpc, 10},
      {4, "Fisher exact test from event counts", exact_ingestion, 60},
      {5, "illustrative case orderings", case_orderings, 60},
      {6, "Monte Carlo validity suite", validity_suite, 120},
      {7, "two-study counterexample suite", counterexample_suite, 60},
      {8, "power study directional claims", simulation_claims, 300},
      {9, "TPM closed form vs Monte Carlo", tpm_crosscheck, 600},
      {10, "determinism across runs and thread counts", determinism, 600},
  };
  int unexpected = 0;
  int passed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; runtime " + fmt("%.1f", secs) + " s over limit";
    }
    std::printf("%s  criterion %2d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    if (o.pass) {
      ++passed;
    } else if (auto it = kKnownFailures.find(c.id); it != kKnownFailures.end()) {
      std::printf("      known discrepancy: %s\n", it->second.c_str());
    } else {
      ++unexpected;
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass, %d unexpected failure(s)\n", passed, criteria.size(), unexpected);
  return unexpected;
}
