#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "agto/errors.hpp"
#include "agto/stats.hpp"

using namespace agto;
using namespace agto::stats;

namespace {

// Two-sided p by listing every way to pick |a| of the pooled midranks.
double enumerate_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> rank(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      equal += v == pooled[i];
    }
    rank[i] = less + (equal + 1) / 2;
  }
  const std::size_t n = pooled.size(), k = a.size();
  double observed = 0;
  for (std::size_t i = 0; i < k; ++i)
    observed += rank[i];
  const double mu = static_cast<double>(k) * static_cast<double>(n + 1) / 2;
  std::size_t hits = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k)
      continue;
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u)
        w += rank[i];
    ++total;
    hits += std::abs(w - mu) >= std::abs(observed - mu) - 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

TEST(Summarize, Examples) {
  auto s = summarize(std::vector{0.0, 0.0, 0.0});
  EXPECT_EQ(s.avg, 0.0);
  EXPECT_EQ(s.std, 0.0);
  s = summarize(std::vector{1.0, 2.0, 3.0});
  EXPECT_EQ(s.avg, 2.0);
  EXPECT_EQ(s.std, 1.0);
  s = summarize(std::vector{5.0});
  EXPECT_EQ(s.avg, 5.0);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_THROW(summarize(std::vector<double>{}), InputError);
}

TEST(Summarize, Translation) {
  const std::vector<double> x{0.3, 1.7, -2.2, 4.1, 0.0};
  std::vector<double> y(x);
  for (auto& v : y)
    v += 10.0;
  const auto a = summarize(x), b = summarize(y);
  EXPECT_NEAR(b.avg, a.avg + 10.0, 1e-12);
  EXPECT_NEAR(b.std, a.std, 1e-12);
}

TEST(Midranks, Ties) {
  EXPECT_EQ(midranks(std::vector{3.0, 1.0, 3.0, 2.0}), (std::vector{3.5, 1.0, 3.5, 2.0}));
}

TEST(RankSum, Examples) {
  EXPECT_NEAR(wilcoxon_rank_sum(std::vector{1.0, 2.0, 3.0}, std::vector{4.0, 5.0, 6.0}), 0.1, 1e-12);
  EXPECT_TRUE(std::isnan(wilcoxon_rank_sum(std::vector{0.0, 0.0, 0.0}, std::vector{0.0, 0.0, 0.0})));
  std::vector<double> a(30);
  for (int i = 0; i < 30; ++i)
    a[static_cast<std::size_t>(i)] = i + 1;
  std::vector<double> b(a);
  std::shuffle(b.begin(), b.end(), std::mt19937(4));
  EXPECT_NEAR(wilcoxon_rank_sum(a, b), 1.0, 1e-9);
}

TEST(RankSum, InputErrors) {
  EXPECT_THROW(wilcoxon_rank_sum(std::vector{1.0}, std::vector{2.0, 3.0}), InputError);
  EXPECT_THROW(wilcoxon_rank_sum(std::vector{1.0, std::nan("")}, std::vector{2.0, 3.0}), InputError);
  EXPECT_THROW(wilcoxon_rank_sum(std::vector{1.0, 2.0}, std::vector{HUGE_VAL, 3.0}), InputError);
}

TEST(RankSum, NormalApproximationReference) {
  // values from an independent tie- and continuity-corrected implementation
  std::vector<double> a, b;
  for (int i = 1; i <= 30; ++i)
    a.push_back((i * i) % 17);
  for (int i = 1; i <= 25; ++i)
    b.push_back((i * 7) % 19 + 0.5 * (i % 2));
  EXPECT_NEAR(wilcoxon_rank_sum(a, b), 0.6658012099607207, 1e-12);
  const std::vector<double> c{1.5, 2.5, 3.1, 4.2, 5.0, 6.0, 7.7, 8.1, 9.9, 10.4, 11.0, 12.5};
  const std::vector<double> d{3.0, 5.5, 8.0, 9.0, 13.0, 14.0, 15.5, 16.0, 17.2, 18.0};
  EXPECT_NEAR(wilcoxon_rank_sum_normal(c, d), 0.027179886800582677, 1e-12);
}

TEST(RankSum, SmallSamplesMatchEnumeration) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(2, 5), value(0, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(gen))), b(static_cast<std::size_t>(size(gen)));
    for (auto& v : a)
      v = value(gen);
    for (auto& v : b)
      v = value(gen);
    const double p = wilcoxon_rank_sum(a, b);
    const bool all_tied = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; }) &&
                          std::all_of(b.begin(), b.end(), [&](double v) { return v == a[0]; });
    if (all_tied) {
      EXPECT_TRUE(std::isnan(p));
      continue;
    }
    EXPECT_NEAR(p, enumerate_p(a, b), 1e-12);
    EXPECT_EQ(p, wilcoxon_rank_sum(b, a));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(RankSum, ExactOnLargerPools) {
  const std::vector<double> a{0.1, 0.5, 0.9, 1.3, 2.2, 2.8, 3.3, 4.0};
  const std::vector<double> b{1.0, 1.9, 2.5, 3.7, 4.4, 5.1, 6.3, 7.0, 7.7, 8.8};
  EXPECT_NEAR(wilcoxon_rank_sum_exact(a, b), enumerate_p(a, b), 1e-12);
}

TEST(RankSum, SymmetricAndBounded) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& v : a)
      v = nd(gen);
    for (auto& v : b)
      v = nd(gen) + 0.3;
    const double p = wilcoxon_rank_sum(a, b);
    EXPECT_EQ(p, wilcoxon_rank_sum(b, a));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(Friedman, Examples) {
  auto t = friedman_ranks({{1, 2}, {1, 2}}, {{0, 0}, {0, 0}});
  EXPECT_EQ(t.rank_sum, (std::vector{2.0, 4.0}));
  EXPECT_EQ(t.average_rank, (std::vector{1.0, 2.0}));
  EXPECT_EQ(t.final_rank, (std::vector{1, 2}));

  t = friedman_ranks({{3, 1, 2}}, {{0, 0, 0}});
  EXPECT_EQ(t.per_function_ranks[0], (std::vector{3, 1, 2}));

  t = friedman_ranks({{0, 0, 5}}, {{0, 0, 1}});
  EXPECT_EQ(t.per_function_ranks[0], (std::vector{1, 1, 2}));
  // equal Avg, Std breaks the tie
  t = friedman_ranks({{1, 1}}, {{0.5, 0.1}});
  EXPECT_EQ(t.per_function_ranks[0], (std::vector{2, 1}));
}

TEST(Friedman, FinalRankTiesKeepOrder) {
  const auto t = friedman_ranks({{1, 2, 1}, {2, 1, 2}}, {{0, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(t.final_rank, (std::vector{1, 2, 3}));
  EXPECT_EQ(t.average_rank, (std::vector{1.5, 1.5, 1.5}));
}

TEST(Friedman, MonotoneInvariance) {
  const std::vector<std::vector<double>> avg{{0.3, -1.0, 2.5, 0.3}, {4.0, 1.0, 9.0, 16.0}};
  const std::vector<std::vector<double>> sd{{0.1, 0.2, 0.3, 0.05}, {0, 0, 0, 0}};
  auto mapped = avg;
  for (auto& row : mapped)
    for (auto& v : row)
      v = std::exp(v) * 3.0 + 1.0;
  EXPECT_EQ(friedman_ranks(avg, sd).per_function_ranks, friedman_ranks(mapped, sd).per_function_ranks);
}

TEST(Friedman, Errors) {
  EXPECT_THROW(friedman_ranks({{1, 2}, {1}}, {{0, 0}, {0}}), InputError);
  EXPECT_THROW(friedman_ranks({{1, 2}}, {{0}}), InputError);
  EXPECT_THROW(friedman_ranks({{1, std::nan("")}}, {{0, 0}}), InputError);
}
