#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pcmeta/counterexample.hpp"
#include "pcmeta/kernels.hpp"

using namespace pcmeta;
using namespace pcmeta::kernels;

namespace {

// Random points plus every region edge and its floating-point neighbours.
void fill_points(double alpha, std::size_t random_count, std::vector<double>& p1, std::vector<double>& p2) {
  const auto rp = make_region_params(alpha);
  std::vector<double> edges{0.0, 1.0, alpha, rp.corner_lo, rp.diag_top};
  for (double k = 1; k <= rp.diag_count + 1; k += 1) edges.push_back(k * alpha);
  std::vector<double> marks;
  for (double e : edges) {
    marks.push_back(e);
    marks.push_back(std::nextafter(e, 0.0));
    marks.push_back(std::nextafter(e, 2.0));
    marks.push_back(e + alpha / 2);
  }
  for (double& m : marks) m = std::clamp(m, 0.0, 1.0);
  for (double a : marks) {
    for (double b : marks) {
      p1.push_back(a);
      p2.push_back(b);
    }
  }
  std::mt19937_64 rng(static_cast<std::uint64_t>(alpha * 1e6));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < random_count; ++i) {
    p1.push_back(u(rng));
    p2.push_back(i % 5 == 0 ? p1.back() : u(rng));
  }
}

const double kAlphas[] = {0.05, 0.1, 0.2, 0.3, 0.45};

}  // namespace

TEST(RegionParams, Geometry) {
  const auto rp = make_region_params(0.2);
  EXPECT_DOUBLE_EQ(rp.corner_lo, 0.8);
  EXPECT_EQ(rp.diag_count, 3.0);
  const auto big = make_region_params(0.6);
  EXPECT_DOUBLE_EQ(big.corner_lo, 0.6);
  EXPECT_EQ(big.diag_count, 0.0);
  EXPECT_EQ(make_region_params(0.1).diag_count, 8.0);
}

TEST(ScalarKernel, MatchesRectangleOracle) {
  for (double alpha : kAlphas) {
    std::vector<double> p1, p2;
    fill_points(alpha, 20000, p1, p2);
    const auto rp = make_region_params(alpha);
    const auto phi = RejectionRegion2D::for_test(TwoStudyTest::phi, alpha);
    const auto prime = RejectionRegion2D::for_test(TwoStudyTest::phi_prime, alpha);
    const auto tilde = RejectionRegion2D::for_test(TwoStudyTest::phi_tilde, alpha);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      const auto bits = scalar::classify_one(p1[i], p2[i], rp);
      ASSERT_EQ((bits & kPhi) != 0, phi.evaluate(p1[i], p2[i]) > 0) << alpha << " " << p1[i] << " " << p2[i];
      ASSERT_EQ((bits & kPhiPrime) != 0, prime.evaluate(p1[i], p2[i]) > 0) << alpha << " " << p1[i] << " " << p2[i];
      ASSERT_EQ((bits & kPhiTilde) != 0, tilde.evaluate(p1[i], p2[i]) > 0) << alpha << " " << p1[i] << " " << p2[i];
    }
  }
}

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!available(SimdLevel::avx2)) GTEST_SKIP() << "AVX2 not available";
  }
};

TEST_F(Avx2Equivalence, ClassificationBitIdentical) {
  for (double alpha : kAlphas) {
    std::vector<double> p1, p2;
    fill_points(alpha, 50001, p1, p2);
    const auto rp = make_region_params(alpha);
    std::vector<std::uint8_t> a(p1.size()), b(p1.size());
    classify_pairs(SimdLevel::scalar, p1, p2, rp, a);
    classify_pairs(SimdLevel::avx2, p1, p2, rp, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i], b[i]) << "alpha " << alpha << " at (" << p1[i] << ", " << p2[i] << ")";
    }
  }
}

TEST_F(Avx2Equivalence, CountsIdenticalForEveryTailLength) {
  std::vector<double> p1, p2;
  fill_points(0.2, 1000, p1, p2);
  const auto rp = make_region_params(0.2);
  for (std::size_t len = 0; len <= 9; ++len) {
    const std::span<const double> s1(p1.data(), len), s2(p2.data(), len);
    const auto a = count_regions(SimdLevel::scalar, s1, s2, rp);
    const auto b = count_regions(SimdLevel::avx2, s1, s2, rp);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_EQ(a.phi_prime, b.phi_prime);
    EXPECT_EQ(a.phi_tilde, b.phi_tilde);
  }
  const auto a = count_regions(SimdLevel::scalar, p1, p2, rp);
  const auto b = count_regions(SimdLevel::avx2, p1, p2, rp);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.phi_prime, b.phi_prime);
  EXPECT_EQ(a.phi_tilde, b.phi_tilde);
}

TEST_F(Avx2Equivalence, ThresholdCountIdentical) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::vector<double> v(10007);
  for (auto& x : v) x = u(rng);
  v[0] = 0.05;
  v[1] = std::nextafter(0.05, 1.0);
  v[2] = 0.0;
  for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 10007u}) {
    const std::span<const double> s(v.data(), len);
    EXPECT_EQ(count_at_most(SimdLevel::scalar, s, 0.05), count_at_most(SimdLevel::avx2, s, 0.05)) << len;
  }
}

TEST(Dispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(available(SimdLevel::scalar));
  EXPECT_TRUE(available(active_level()));
  EXPECT_EQ(to_string(SimdLevel::avx2), "avx2");
}
