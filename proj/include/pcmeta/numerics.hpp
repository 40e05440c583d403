#pragma once

#include <cstdint>
#include <span>

#include "pcmeta/prob_value.hpp"

namespace pcmeta::numerics {

/// log(exp(a) + exp(b)), exact when either side is -inf.
double log_add_exp(double a, double b);

/// log(sum(exp(x))) over a range; -inf for an empty range.
double log_sum_exp(std::span<const double> xs);

/// Upper tail 1 - Phi(x) of the standard normal. The log form stays accurate
/// far beyond linear underflow (x = 40 gives log_value ~ -804.6).
ProbValue std_normal_sf(double x);

/// Lower tail Phi(x).
ProbValue std_normal_cdf(double x);

/// log of the standard normal density.
double std_normal_log_pdf(double x);

/// Lower-tail quantile: returns x with Phi(x) = p. Accepts log-domain input so
/// p = 1e-200 resolves to about -30.19. Throws DomainError for p in {0, 1}.
double std_normal_quantile(ProbValue p);

/// Upper-tail quantile: returns x with 1 - Phi(x) = q, i.e. Phi^-1(1 - q)
/// computed without forming 1 - q.
double std_normal_upper_quantile(ProbValue q);

/// Q(k, t) = P(Poisson(t) < k) = exp(-t) * sum_{j<k} t^j / j!, the regularized
/// upper incomplete gamma function at integer shape k >= 1.
ProbValue poisson_lower_tail(std::int64_t k, double t);

/// Chi-square survival function for even degrees of freedom.
ProbValue chisq_sf(double x, std::int64_t dof);

/// log C(n, k) via log-gamma.
double log_choose(std::int64_t n, std::int64_t k);

/// log P(X = k) for X ~ Hypergeometric(population N, K successes, n draws).
double hypergeom_log_pmf(std::int64_t k, std::int64_t K, std::int64_t n, std::int64_t N);

}  // namespace pcmeta::numerics
