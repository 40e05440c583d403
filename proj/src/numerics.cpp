#include "pcmeta/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcmeta/errors.hpp"

namespace pcmeta {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ProbValue ProbValue::from_linear(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("probability out of [0, 1]: " + std::to_string(p));
  }
  if (p == 0.0) return zero();
  if (p == 1.0) return one();
  return ProbValue(p, std::log(p));
}

ProbValue ProbValue::from_log(double log_p) {
  if (std::isnan(log_p) || log_p > 1e-12) {
    throw DomainError("log-probability must be <= 0: " + std::to_string(log_p));
  }
  if (log_p >= 0.0) return one();
  if (log_p == kNegInf) return zero();
  return ProbValue(std::exp(log_p), log_p);
}

ProbValue ProbValue::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("scale factor must be positive");
  if (is_zero()) return zero();
  return from_log(std::min(0.0, log_ + std::log(factor)));
}

namespace numerics {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

// Upper tail through erfc loses nothing until erfc approaches the subnormal
// range (x ~ 37); past this cut-off the continued fraction takes over.
constexpr double kTailSwitch = 30.0;

// Mills ratio R(x) = (1 - Phi(x)) / phi(x) by backward evaluation of
// R = 1 / (x + 1/(x + 2/(x + 3/(x + ...)))). For x >= 30 sixty levels are
// far past convergence.
double mills_ratio(double x) {
  double t = x;
  for (int k = 60; k >= 1; --k) t = x + k / t;
  return 1.0 / t;
}

double log_cdf(double x) { return std_normal_sf(-x).log(); }

// AS241 (Wichura 1988) rational approximation for the lower-tail quantile,
// restricted to p <= 0.5 and driven by log p so the far tail needs no
// linear probability.
double as241_lower(double log_p) {
  const double p = std::exp(log_p);
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = std::sqrt(-log_p);
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

// Lower-tail quantile for log_p <= log(0.5): AS241 start, then Newton steps
// on log Phi(x) - log p, which keep full relative accuracy in probability
// down to log p ~ -1e5.
double lower_quantile_from_log(double log_p) {
  double x = as241_lower(log_p);
  for (int it = 0; it < 4; ++it) {
    const double lc = log_cdf(x);
    const double f = lc - log_p;
    const double step = f / std::exp(std_normal_log_pdf(x) - lc);
    x -= step;
    if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

}  // namespace

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double std_normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

ProbValue std_normal_sf(double x) {
  if (std::isnan(x)) throw DomainError("std_normal_sf: NaN argument");
  if (x == std::numeric_limits<double>::infinity()) return ProbValue::zero();
  if (x == -std::numeric_limits<double>::infinity()) return ProbValue::one();
  if (x < 0.0) {
    const double lower = 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
    return ProbValue::from_log(std::log1p(-lower));
  }
  if (x < kTailSwitch) {
    return ProbValue::from_log(std::log(0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0)));
  }
  return ProbValue::from_log(std_normal_log_pdf(x) + std::log(mills_ratio(x)));
}

ProbValue std_normal_cdf(double x) { return std_normal_sf(-x); }

double std_normal_quantile(ProbValue p) {
  if (p.is_zero() || p.is_one()) throw DomainError("normal quantile undefined at p = 0 or p = 1");
  if (p.log() <= -std::numbers::ln2) return lower_quantile_from_log(p.log());
  return -lower_quantile_from_log(std::log1p(-p.linear()));
}

double std_normal_upper_quantile(ProbValue q) {
  if (q.is_zero() || q.is_one()) throw DomainError("normal quantile undefined at p = 0 or p = 1");
  if (q.log() <= -std::numbers::ln2) return -lower_quantile_from_log(q.log());
  return lower_quantile_from_log(std::log1p(-q.linear()));
}

ProbValue poisson_lower_tail(std::int64_t k, double t) {
  if (k < 1) throw DomainError("poisson_lower_tail: k must be >= 1");
  if (std::isnan(t) || t < 0.0) throw DomainError("poisson_lower_tail: t must be >= 0");
  if (t == 0.0) return ProbValue::one();
  if (std::isinf(t)) return ProbValue::zero();
  // Terms j * log t - log j! accumulated incrementally; the running max keeps
  // the sum in range.
  const double log_t = std::log(t);
  double term = 0.0;
  double acc = 0.0;  // log of the partial sum
  for (std::int64_t j = 1; j < k; ++j) {
    term += log_t - std::log(static_cast<double>(j));
    acc = log_add_exp(acc, term);
  }
  return ProbValue::from_log(std::min(0.0, acc - t));
}

ProbValue chisq_sf(double x, std::int64_t dof) {
  if (std::isnan(x) || x < 0.0) throw DomainError("chisq_sf: x must be >= 0");
  if (dof < 2 || dof % 2 != 0) throw DomainError("chisq_sf: degrees of freedom must be a positive even integer");
  return poisson_lower_tail(dof / 2, x / 2.0);
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double hypergeom_log_pmf(std::int64_t k, std::int64_t K, std::int64_t n, std::int64_t N) {
  if (N < 0 || K < 0 || n < 0 || K > N || n > N) throw DomainError("hypergeom_log_pmf: invalid parameters");
  const std::int64_t lo = std::max<std::int64_t>(0, n + K - N);
  const std::int64_t hi = std::min(n, K);
  if (k < lo || k > hi) throw DomainError("hypergeom_log_pmf: k outside support");
  if (lo == hi) return 0.0;
  return log_choose(K, k) + log_choose(N - K, n - k) - log_choose(N, n);
}

}  // namespace numerics
}  // namespace pcmeta
