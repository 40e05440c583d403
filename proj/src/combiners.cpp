#include "pcmeta/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcmeta/errors.hpp"
#include "pcmeta/numerics.hpp"

namespace pcmeta {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_nonempty(std::span<const ProbValue> p, const char* who) {
  if (p.empty()) throw InputError(std::string(who) + ": at least one p-value is required");
}

// Ascending log values; the canonical order for symmetric accumulation.
std::vector<double> sorted_logs(std::span<const ProbValue> p) {
  std::vector<double> logs;
  logs.reserve(p.size());
  for (const auto& v : p) logs.push_back(v.log());
  std::sort(logs.begin(), logs.end());
  return logs;
}

}  // namespace

std::string_view to_string(CombineMethod m) {
  switch (m) {
    case CombineMethod::fisher: return "fisher";
    case CombineMethod::simes: return "simes";
    case CombineMethod::bonferroni: return "bonferroni";
    case CombineMethod::stouffer_weighted: return "stouffer";
    case CombineMethod::tpm: return "tpm";
  }
  return "unknown";
}

CombineMethod parse_combine_method(std::string_view name) {
  if (name == "fisher") return CombineMethod::fisher;
  if (name == "simes") return CombineMethod::simes;
  if (name == "bonferroni") return CombineMethod::bonferroni;
  if (name == "stouffer" || name == "stouffer_weighted") return CombineMethod::stouffer_weighted;
  if (name == "tpm") return CombineMethod::tpm;
  throw InputError("unknown combine method: " + std::string(name));
}

void CombinerSpec::validate() const {
  if (tpm_gamma.has_value() != (method == CombineMethod::tpm)) {
    throw InputError("tpm_gamma must be given exactly when method is tpm");
  }
  if (weights.has_value() != (method == CombineMethod::stouffer_weighted)) {
    throw InputError("weights must be given exactly when method is stouffer");
  }
  if (tpm_gamma && !(*tpm_gamma > 0.0 && *tpm_gamma <= 1.0)) {
    throw InputError("tpm_gamma must lie in (0, 1]");
  }
  if (weights) {
    for (double w : *weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InputError("stouffer weights must be positive and finite");
    }
  }
}

std::string CombinerSpec::describe() const {
  std::ostringstream os;
  os << to_string(method);
  if (tpm_gamma) os << "(gamma=" << *tpm_gamma << ")";
  return os.str();
}

ProbValue combine_fisher(std::span<const ProbValue> p) {
  require_nonempty(p, "combine_fisher");
  const auto logs = sorted_logs(p);
  if (logs.front() == kNegInf) return ProbValue::zero();
  double t = 0.0;
  for (double l : logs) t -= l;
  return numerics::poisson_lower_tail(static_cast<std::int64_t>(logs.size()), t);
}

ProbValue combine_simes(std::span<const ProbValue> p) {
  require_nonempty(p, "combine_simes");
  const auto logs = sorted_logs(p);
  if (logs.front() == kNegInf) return ProbValue::zero();
  const double k = static_cast<double>(logs.size());
  double best = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    // Ratio first, so k/(i+1) == 1 contributes exactly zero.
    best = std::min(best, logs[i] + std::log(k / static_cast<double>(i + 1)));
  }
  return ProbValue::from_log(best);
}

ProbValue combine_bonferroni(std::span<const ProbValue> p) {
  require_nonempty(p, "combine_bonferroni");
  const auto smallest = *std::min_element(p.begin(), p.end());
  return smallest.scaled(static_cast<double>(p.size()));
}

ProbValue combine_stouffer_weighted(std::span<const ProbValue> p, std::span<const double> weights) {
  require_nonempty(p, "combine_stouffer_weighted");
  if (weights.size() != p.size()) throw InputError("combine_stouffer_weighted: one weight per p-value required");
  double num = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("stouffer weights must be positive and finite");
    if (p[i].is_zero() || p[i].is_one()) {
      throw DomainError("combine_stouffer_weighted: p-values of exactly 0 or 1 have no normal quantile");
    }
    num += w * numerics::std_normal_upper_quantile(p[i]);
    sum_sq += w * w;
  }
  return numerics::std_normal_sf(num / std::sqrt(sum_sq));
}

ProbValue tpm_cdf(std::int64_t count, double gamma, double log_w) {
  if (count < 1) throw InputError("tpm_cdf: count must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("tpm_cdf: gamma must lie in (0, 1]");
  if (std::isnan(log_w)) throw DomainError("tpm_cdf: NaN statistic");
  if (log_w >= 0.0) return ProbValue::one();
  if (log_w == kNegInf) return ProbValue::zero();

  // Condition on j = number of inputs at or below gamma, which has
  // probability C(L, j) gamma^j (1 - gamma)^(L - j). Given j, W is gamma^j
  // times a product of j uniforms, so P(W <= w | j) = Q(j, u) with
  // u = j log gamma - log w when w <= gamma^j, and 1 otherwise.
  const double log_gamma = std::log(gamma);
  const double log_one_minus = gamma < 1.0 ? std::log1p(-gamma) : kNegInf;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 1; j <= count; ++j) {
    double base = numerics::log_choose(count, j);
    if (j < count) {
      if (log_one_minus == kNegInf) continue;
      base += static_cast<double>(count - j) * log_one_minus;
    }
    const double log_gamma_j = static_cast<double>(j) * log_gamma;
    double term = base + log_gamma_j;
    if (log_w <= log_gamma_j) term += numerics::poisson_lower_tail(j, log_gamma_j - log_w).log();
    terms.push_back(term);
  }
  return ProbValue::from_log(std::min(0.0, numerics::log_sum_exp(terms)));
}

ProbValue combine_tpm(std::span<const ProbValue> p, double gamma) {
  require_nonempty(p, "combine_tpm");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("combine_tpm: gamma must lie in (0, 1]");
  const auto logs = sorted_logs(p);
  const double log_gamma = std::log(gamma);
  double log_w = 0.0;
  for (double l : logs) {
    if (l <= log_gamma) log_w += l;
  }
  return tpm_cdf(static_cast<std::int64_t>(logs.size()), gamma, log_w);
}

ProbValue combine(const CombinerSpec& spec, std::span<const ProbValue> p) {
  spec.validate();
  switch (spec.method) {
    case CombineMethod::fisher: return combine_fisher(p);
    case CombineMethod::simes: return combine_simes(p);
    case CombineMethod::bonferroni: return combine_bonferroni(p);
    case CombineMethod::tpm: return combine_tpm(p, *spec.tpm_gamma);
    case CombineMethod::stouffer_weighted: return combine_stouffer_weighted(p, *spec.weights);
  }
  throw InputError("unknown combine method");
}

void CountTable2x2::validate() const {
  if (total_a <= 0 || total_b <= 0) throw InputError("2x2 table: totals must be positive");
  if (events_a < 0 || events_b < 0) throw InputError("2x2 table: event counts must be non-negative");
  if (events_a > total_a || events_b > total_b) throw InputError("2x2 table: events exceed totals");
}

namespace {

struct HypergeomSetup {
  std::int64_t population, successes, draws, lo, hi, observed;
};

HypergeomSetup hypergeom_from(const CountTable2x2& t) {
  t.validate();
  HypergeomSetup s{};
  s.population = t.total_a + t.total_b;
  s.successes = t.events_a + t.events_b;
  s.draws = t.total_a;
  s.lo = std::max<std::int64_t>(0, s.draws + s.successes - s.population);
  s.hi = std::min(s.draws, s.successes);
  s.observed = t.events_a;
  return s;
}

std::vector<double> support_log_pmf(const HypergeomSetup& s) {
  std::vector<double> lp;
  lp.reserve(static_cast<std::size_t>(s.hi - s.lo + 1));
  for (std::int64_t k = s.lo; k <= s.hi; ++k) {
    lp.push_back(numerics::hypergeom_log_pmf(k, s.successes, s.draws, s.population));
  }
  return lp;
}

}  // namespace

ExactTestResult fisher_exact_2x2(const CountTable2x2& t) {
  const auto s = hypergeom_from(t);
  const auto lp = support_log_pmf(s);
  const double cutoff = lp[static_cast<std::size_t>(s.observed - s.lo)] + std::log1p(1e-7);
  std::vector<double> kept;
  for (double v : lp) {
    if (v <= cutoff) kept.push_back(v);
  }

  ExactTestResult out;
  const double num = static_cast<double>(t.events_a) * static_cast<double>(t.total_b - t.events_b);
  const double den = static_cast<double>(t.total_a - t.events_a) * static_cast<double>(t.events_b);
  if (den == 0.0) {
    out.odds_ratio = num > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.odds_ratio = num / den;
  }
  out.p_two_sided = ProbValue::from_log(std::min(0.0, numerics::log_sum_exp(kept)));
  return out;
}

ProbValue fisher_exact_2x2_doubled(const CountTable2x2& t) {
  const auto s = hypergeom_from(t);
  const auto lp = support_log_pmf(s);
  const auto split = static_cast<std::size_t>(s.observed - s.lo);
  const double lower = numerics::log_sum_exp(std::span<const double>(lp).first(split + 1));
  const double upper = numerics::log_sum_exp(std::span<const double>(lp).subspan(split));
  return ProbValue::from_log(std::min(0.0, std::log(2.0) + std::min(lower, upper)));
}

}  // namespace pcmeta
