#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agto::stats {

struct Summary {
  double avg = 0.0;
  double std = 0.0; // sample standard deviation, n - 1 denominator; 0 for n == 1
};

// Throws InputError on an empty sample.
Summary summarize(std::span<const double> values);

// Midranks (1-based) of the values; tied values share the average rank.
std::vector<double> midranks(std::span<const double> values);

// Pooled sample size up to which the exact permutation distribution is used.
inline constexpr std::size_t kExactRankSumLimit = 20;

// Two-sided Wilcoxon rank-sum p-value. Small pooled samples use the exact
// permutation distribution of the midrank sum; larger ones the normal
// approximation with tie and continuity correction. Returns NaN when every
// pooled value is tied. Throws InputError on fewer than two values per sample
// or non-finite input.
double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

// Exact two-sided p: P(|W - mu| >= |w_obs - mu|) over all equally likely
// splits of the pooled midranks.
double wilcoxon_rank_sum_exact(std::span<const double> a, std::span<const double> b);
double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b);

struct RankTable {
  // [function][algorithm], dense ranks starting at 1.
  std::vector<std::vector<int>> per_function_ranks;
  std::vector<double> rank_sum;
  std::vector<double> average_rank;
  // 1..k, by average rank; ties keep algorithm order.
  std::vector<int> final_rank;
};

// Rows are functions, columns algorithms. Ascending Avg, exact Avg ties broken
// by smaller Std; fully tied entries share a rank and the next distinct entry
// takes the next integer. Throws InputError on ragged or non-finite input.
RankTable friedman_ranks(const std::vector<std::vector<double>>& avg,
                         const std::vector<std::vector<double>>& std);

} // namespace agto::stats
