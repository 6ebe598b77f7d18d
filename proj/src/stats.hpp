#pragma once

#include <vector>

namespace chambersim {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov distribution tail Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

/// sup |F_a - F_b| over the pooled sample points.
double ks_statistic(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sample KS with the asymptotic p-value at
/// lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D, ne = nm / (n + m).
TestResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// Exact permutation p-value P(D* >= D) over all splits of the pooled
/// sample, ties included. Limited to n, m <= kExactKsMax.
constexpr std::size_t kExactKsMax = 20;
double ks_exact_p(const std::vector<double>& a, const std::vector<double>& b);
TestResult ks_two_sample_exact(const std::vector<double>& a, const std::vector<double>& b);

enum class RankSumMethod { automatic, normal, exact };

/// Mann-Whitney U of `a` with a two-sided p-value. `automatic` uses the exact
/// null distribution when there are no ties and n, m <= 8, otherwise the
/// normal approximation with tie and continuity correction.
TestResult rank_sum(const std::vector<double>& a, const std::vector<double>& b,
                    RankSumMethod method = RankSumMethod::automatic);

}  // namespace chambersim
