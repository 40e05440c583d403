#include <gtest/gtest.h>

#include <cmath>

#include "pcmeta/errors.hpp"
#include "pcmeta/oracle.hpp"

using namespace pcmeta;
using namespace pcmeta::oracle;

namespace {
const std::vector<double> kAlpha05{0.05};
}

TEST(Validity, FisherUnderUniformNullIsExactLevel) {
  ValidityOptions opts;
  opts.seed = 12;
  const auto row = mc_validity([](auto p) { return combine_fisher(p); }, NullConfig::uniform(5), kAlpha05, opts)[0];
  EXPECT_TRUE(row.valid);
  EXPECT_NEAR(row.rate, 0.05, 3 * std::sqrt(0.05 * 0.95 / 1e5));
}

TEST(Validity, HalvedRuleIsFlagged) {
  ValidityOptions opts;
  opts.seed = 13;
  const Rule broken = [](std::span<const ProbValue> p) { return ProbValue::from_linear(p[0].linear() / 2); };
  const auto row = mc_validity(broken, NullConfig::uniform(1), kAlpha05, opts)[0];
  EXPECT_FALSE(row.valid);
  EXPECT_NEAR(row.rate, 0.10, 4 * std::sqrt(0.1 * 0.9 / 1e5));
}

TEST(Validity, StructuredAtBoundaryNull) {
  const GroupPartition g({{0, 1}, {2, 3}, {4, 5}, {6, 7}}, 8);
  ValidityOptions opts;
  opts.seed = 14;
  const auto row = mc_validity([&](auto p) { return structured_gbhpc(p, 2, g); }, NullConfig::boundary(8, 2, 6.0),
                               kAlpha05, opts)[0];
  EXPECT_TRUE(row.valid) << row.rate;
}

TEST(Validity, OneSidedNullIsUniformToo) {
  ValidityOptions opts;
  opts.seed = 15;
  NullConfig null = NullConfig::uniform(3);
  null.two_sided = false;
  const auto row = mc_validity([](auto p) { return combine_simes(p); }, null, kAlpha05, opts)[0];
  EXPECT_NEAR(row.rate, 0.05, 4 * std::sqrt(0.05 * 0.95 / 1e5));
}

TEST(Validity, IndependentOfThreadCount) {
  ValidityOptions opts;
  opts.reps = 30000;
  opts.threads = 1;
  const Rule rule = [](auto p) { return combine_bonferroni(p); };
  const std::vector<double> alphas{0.01, 0.05, 0.2};
  const auto a = mc_validity(rule, NullConfig::uniform(4), alphas, opts);
  opts.threads = 3;
  const auto b = mc_validity(rule, NullConfig::uniform(4), alphas, opts);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].rate, b[i].rate);
}

TEST(Validity, InputChecks) {
  ValidityOptions opts;
  opts.reps = 100;
  const Rule rule = [](auto p) { return combine_fisher(p); };
  EXPECT_THROW(mc_validity(rule, NullConfig::uniform(2), kAlpha05, opts), InputError);
  opts.reps = 10000;
  const std::vector<double> bad{1.5};
  EXPECT_THROW(mc_validity(rule, NullConfig::uniform(2), bad, opts), InputError);
  EXPECT_THROW(NullConfig::boundary(3, 4, 1.0), InputError);
}

TEST(TpmOracle, Endpoints) {
  EXPECT_EQ(tpm_mc_cdf(3, 0.05, 1.0, 1000000, 1).value, 1.0);
  EXPECT_EQ(tpm_mc_cdf(3, 0.05, 0.0, 1000000, 1).value, 0.0);
  EXPECT_THROW(tpm_mc_cdf(3, 0.05, 0.1, 1000, 1), InputError);
  EXPECT_THROW(tpm_mc_cdf(0, 0.05, 0.1, 1000000, 1), InputError);
}

TEST(TpmOracle, AgreesWithClosedFormBothWays) {
  for (double w : {1e-4, 0.003, 0.04}) {
    const auto mc = tpm_mc_cdf(4, 0.1, w, 1000000, 21);
    const double closed = tpm_cdf(4, 0.1, std::log(w)).linear();
    EXPECT_NEAR(mc.value, closed, 4 * std::sqrt(closed * (1 - closed) / 1e6)) << w;
  }
}

TEST(CrossCheck, ReportsAgreement) {
  const GroupPartition g({{0, 1, 2}, {3, 4}}, 5);
  std::vector<ProbValue> p;
  for (double x : {0.01, 0.3, 0.02, 0.5, 1e-5}) p.push_back(ProbValue::from_linear(x));
  for (std::size_t r = 1; r <= 5; ++r) EXPECT_EQ(structured_vs_enumeration(p, r, g).log_rel_diff, 0.0);
}
