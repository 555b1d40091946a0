#include "agto/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "agto/errors.hpp"

namespace agto::stats {

namespace {

void check_samples(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw InputError("rank-sum test needs at least two values per sample");
  for (auto s : {a, b})
    for (double v : s)
      if (!std::isfinite(v))
        throw InputError("rank-sum test received a non-finite value");
}

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

// Midranks doubled so that every rank is an integer.
std::vector<std::int64_t> doubled_ranks(std::span<const double> values) {
  const auto r = midranks(values);
  std::vector<std::int64_t> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    out[i] = std::llround(2.0 * r[i]);
  return out;
}

bool all_tied(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

} // namespace

Summary summarize(std::span<const double> values) {
  if (values.empty())
    throw InputError("cannot summarize an empty sample");
  const double n = static_cast<double>(values.size());
  const double avg = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1)
    return {avg, 0.0};
  double ss = 0.0;
  for (double v : values)
    ss += (v - avg) * (v - avg);
  return {avg, std::sqrt(ss / (n - 1.0))};
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]])
      ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k)
      ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double wilcoxon_rank_sum_exact(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto all = pooled(a, b);
  if (all_tied(all))
    return std::numeric_limits<double>::quiet_NaN();
  const auto r2 = doubled_ranks(all);
  const std::size_t na = a.size();
  const std::size_t n = all.size();

  std::int64_t observed = 0;
  for (std::size_t i = 0; i < na; ++i)
    observed += r2[i];
  const std::int64_t total = std::accumulate(r2.begin(), r2.end(), std::int64_t{0});
  // mu * 2 * n avoids fractions: E[W2] = na * total / n.
  const auto dev = [&](std::int64_t w2) {
    return std::abs(w2 * static_cast<std::int64_t>(n) - static_cast<std::int64_t>(na) * total);
  };
  const std::int64_t observed_dev = dev(observed);

  // counts[k][s]: number of k-subsets whose doubled rank sum is s.
  const auto max_sum = static_cast<std::size_t>(total);
  std::vector<std::vector<double>> counts(na + 1, std::vector<double>(max_sum + 1, 0.0));
  counts[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(r2[i]);
    for (std::size_t k = std::min(i + 1, na); k >= 1; --k)
      for (std::size_t s = max_sum; s >= r; --s)
        counts[k][s] += counts[k - 1][s - r];
  }
  double extreme = 0.0, all_splits = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    all_splits += counts[na][s];
    if (dev(static_cast<std::int64_t>(s)) >= observed_dev)
      extreme += counts[na][s];
  }
  return extreme / all_splits;
}

double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b) {
  check_samples(a, b);
  const auto all = pooled(a, b);
  if (all_tied(all))
    return std::numeric_limits<double>::quiet_NaN();
  const auto r2 = doubled_ranks(all);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    w2 += r2[i];
  // |W - mu| from integers: 2 W - na (n + 1).
  const double deviation =
      std::abs(static_cast<double>(w2 - static_cast<std::int64_t>(a.size() * (all.size() + 1)))) / 2.0;

  std::vector<double> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i])
      ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  const double z = std::max(0.0, deviation - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.size() + b.size() <= kExactRankSumLimit)
    return wilcoxon_rank_sum_exact(a, b);
  return wilcoxon_rank_sum_normal(a, b);
}

RankTable friedman_ranks(const std::vector<std::vector<double>>& avg,
                         const std::vector<std::vector<double>>& std) {
  if (avg.empty())
    throw InputError("rank table needs at least one function");
  if (std.size() != avg.size())
    throw InputError("Avg and Std matrices have different row counts");
  const std::size_t k = avg.front().size();
  if (k == 0)
    throw InputError("rank table needs at least one algorithm");
  for (std::size_t f = 0; f < avg.size(); ++f) {
    if (avg[f].size() != k || std[f].size() != k)
      throw InputError("ragged result matrix at row " + std::to_string(f));
    for (std::size_t a = 0; a < k; ++a)
      if (!std::isfinite(avg[f][a]) || !std::isfinite(std[f][a]))
        throw InputError("non-finite result at row " + std::to_string(f));
  }

  RankTable table;
  table.rank_sum.assign(k, 0.0);
  for (std::size_t f = 0; f < avg.size(); ++f) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    const auto key = [&](std::size_t a) { return std::pair{avg[f][a], std[f][a]}; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    std::vector<int> row(k);
    int rank = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == 0 || key(order[i]) != key(order[i - 1]))
        ++rank;
      row[order[i]] = rank;
      table.rank_sum[order[i]] += rank;
    }
    table.per_function_ranks.push_back(std::move(row));
  }

  for (double s : table.rank_sum)
    table.average_rank.push_back(s / static_cast<double>(avg.size()));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return table.average_rank[x] < table.average_rank[y];
  });
  table.final_rank.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    table.final_rank[order[i]] = static_cast<int>(i + 1);
  return table;
}

} // namespace agto::stats
