#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace chambersim;

namespace {

// Brute-force D by evaluating both ECDFs at every pooled point.
double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double d = 0;
  for (double x : pts) {
    const double fa = std::count_if(a.begin(), a.end(), [&](double v) { return v <= x; }) /
                      static_cast<double>(a.size());
    const double fb = std::count_if(b.begin(), b.end(), [&](double v) { return v <= x; }) /
                      static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

// Permutation p-value by enumerating every split of the pooled sample.
double ks_permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t N = pool.size(), n = a.size();
  const double d0 = ks_brute(a, b);
  std::size_t hits = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < N; ++i) ((mask >> i) & 1 ? x : y).push_back(pool[i]);
    ++total;
    hits += ks_brute(x, y) >= d0 - 1e-12;
  }
  return static_cast<double>(hits) / total;
}

std::vector<double> gaussian(Stream& s, int n, double mu) {
  std::vector<double> v(n);
  for (double& x : v) x = s.normal(mu, 1.0);
  return v;
}

}  // namespace

TEST(Ks, StatisticExample) {
  EXPECT_EQ(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
  EXPECT_EQ(ks_statistic({1, 2, 3, 4}, {2, 3, 4, 5}), 0.25);
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_statistic({1, 2}, {10, 11, 12}), 1.0);
}

TEST(Ks, IdenticalAndDisjoint) {
  const auto same = ks_two_sample({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5});
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  const auto apart = ks_two_sample({1, 2, 3, 4, 5, 6, 7, 8}, {11, 12, 13, 14, 15, 16, 17, 18});
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_LT(apart.p_value, 0.01);
}

TEST(Ks, AgreesWithBruteForce) {
  Stream s(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(s.uniform() * 30);
    const int m = 1 + static_cast<int>(s.uniform() * 30);
    std::vector<double> a(n), b(m);
    // Coarse values force ties.
    for (double& x : a) x = std::round(s.normal(0, 2));
    for (double& x : b) x = std::round(s.normal(0.5, 2));
    EXPECT_NEAR(ks_statistic(a, b), ks_brute(a, b), 1e-12);
  }
}

TEST(Ks, ExactMatchesPermutationEnumeration) {
  Stream s(32);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + static_cast<int>(s.uniform() * 5);
    const int m = 2 + static_cast<int>(s.uniform() * 5);
    std::vector<double> a(n), b(m);
    for (double& x : a) x = std::round(s.normal(0, 1.5));
    for (double& x : b) x = std::round(s.normal(1, 1.5));
    EXPECT_NEAR(ks_exact_p(a, b), ks_permutation_p(a, b), 1e-12) << trial;
  }
}

TEST(Ks, ReferenceValuesAtFifteen) {
  // Shifted ramps give D = k/15. References from scipy: ks_2samp(method="exact")
  // and scipy.special.kolmogorov at the corrected lambda.
  struct Ref {
    int k;
    double exact, asymptotic;
  };
  const Ref refs[] = {{3, 0.9383310279844598, 0.8898998612353867},
                      {4, 0.6781382270680966, 0.5886144108520867},
                      {5, 0.3855465198257425, 0.3079352891587556},
                      {6, 0.18441617684449832, 0.13586396446759652},
                      {8, 0.026248485664288602, 0.016786481071967625}};
  for (const auto& r : refs) {
    std::vector<double> a(15), b(15);
    for (int i = 0; i < 15; ++i) {
      a[i] = i;
      b[i] = i + r.k - 0.5;
    }
    EXPECT_DOUBLE_EQ(ks_statistic(a, b), r.k / 15.0);
    EXPECT_NEAR(ks_two_sample_exact(a, b).p_value, r.exact, 1e-12) << r.k;
    EXPECT_NEAR(ks_two_sample(a, b).p_value, r.asymptotic, 1e-9) << r.k;
  }
}

TEST(Ks, ExactSizeLimitAndInputs) {
  EXPECT_THROW(ks_exact_p(std::vector<double>(21, 0.0), {1.0}), RangeError);
  EXPECT_THROW(ks_two_sample({}, {1.0}), RangeError);
  EXPECT_THROW(ks_two_sample({NAN}, {1.0}), RangeError);
}

TEST(Ks, SymmetricAndMonotoneInvariant) {
  Stream s(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = gaussian(s, 25, 0.0);
    const auto b = gaussian(s, 18, 0.4);
    const auto ab = ks_two_sample(a, b);
    const auto ba = ks_two_sample(b, a);
    EXPECT_EQ(ab.statistic, ba.statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);
    std::vector<double> ea(a), eb(b);
    for (double& x : ea) x = std::exp(x);
    for (double& x : eb) x = std::exp(x);
    EXPECT_EQ(ks_statistic(ea, eb), ab.statistic);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(Ks, KolmogorovTail) {
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.63), 0.0098, 3e-4);
  // Both series agree across the switch point.
  EXPECT_NEAR(kolmogorov_q(1.18 - 1e-9), kolmogorov_q(1.18 + 1e-9), 1e-7);
  for (double l = 0.05; l < 3; l += 0.05) EXPECT_GE(kolmogorov_q(l), kolmogorov_q(l + 0.05));
}

TEST(RankSum, SmallExactEnumeration) {
  const auto r = rank_sum({1, 2}, {3, 4}, RankSumMethod::exact);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 1.0 / 3.0, 1e-12);
  const auto same = rank_sum({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(same.p_value, 1.0);
}

TEST(RankSum, NormalApproximationNearExact) {
  Stream s(35);
  const auto a = gaussian(s, 8, 0.0);
  const auto b = gaussian(s, 8, 1.0);
  EXPECT_NEAR(rank_sum(a, b, RankSumMethod::normal).p_value,
              rank_sum(a, b, RankSumMethod::exact).p_value, 0.02);
}
