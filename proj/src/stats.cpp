#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace chambersim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_nonempty(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw RangeError("two-sample test needs nonempty samples");
  for (const auto* v : {&a, &b})
    for (double x : *v)
      if (std::isnan(x)) throw RangeError("two-sample test input contains NaN");
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (lambda <= 0) return 1.0;
  double q;
  if (lambda < 1.18) {
    // Jacobi theta form converges fast for small lambda.
    const double t = -kPi * kPi / (8.0 * lambda * lambda);
    double s = 0;
    for (int k = 1; k <= 7; k += 2) s += std::exp(t * k * k);
    q = 1.0 - std::sqrt(2.0 * kPi) / lambda * s;
  } else {
    double s = 0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      s += (k % 2 ? term : -term);
      if (term < 1e-300) break;
    }
    q = 2.0 * s;
  }
  return std::clamp(q, 0.0, 1.0);
}

double ks_statistic(const std::vector<double>& a_in, const std::vector<double>& b_in) {
  require_nonempty(a_in, b_in);
  const auto a = sorted(a_in);
  const auto b = sorted(b_in);
  const double n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(i / n - j / m));
  }
  return d;
}

TestResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  TestResult r;
  r.statistic = ks_statistic(a, b);
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double sn = std::sqrt(ne);
  r.p_value = r.statistic == 0.0 ? 1.0 : kolmogorov_q((sn + 0.12 + 0.11 / sn) * r.statistic);
  return r;
}

double ks_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, b);
  const std::size_t n = a.size(), m = b.size();
  if (n > kExactKsMax || m > kExactKsMax)
    throw RangeError("exact KS p-value limited to samples of at most " +
                     std::to_string(kExactKsMax));
  const double d = ks_statistic(a, b);
  if (d == 0.0) return 1.0;

  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  const std::size_t N = n + m;
  // The CDF difference is only observable where the pooled value changes.
  std::vector<bool> boundary(N + 1, false);
  for (std::size_t k = 1; k <= N; ++k) boundary[k] = (k == N) || pooled[k - 1] != pooled[k];

  // Count lattice paths (i, j) that keep |i/n - j/m| < d at every boundary.
  const double eps = 1e-12;
  std::vector<std::vector<double>> paths(n + 1, std::vector<double>(m + 1, 0.0));
  paths[0][0] = 1.0;
  for (std::size_t k = 1; k <= N; ++k) {
    const std::size_t i_lo = k > m ? k - m : 0;
    const std::size_t i_hi = std::min(k, n);
    for (std::size_t i = i_hi + 1; i-- > i_lo;) {
      const std::size_t j = k - i;
      double c = 0;
      if (i > 0) c += paths[i - 1][j];
      if (j > 0) c += paths[i][j - 1];
      if (boundary[k] && std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m) >= d - eps)
        c = 0;
      paths[i][j] = c;
    }
  }
  double total = 1.0;  // C(N, n)
  for (std::size_t k = 1; k <= n; ++k) total = total * (m + k) / k;
  return std::clamp(1.0 - paths[n][m] / total, 0.0, 1.0);
}

TestResult ks_two_sample_exact(const std::vector<double>& a, const std::vector<double>& b) {
  return {ks_statistic(a, b), ks_exact_p(a, b)};
}

TestResult rank_sum(const std::vector<double>& a, const std::vector<double>& b,
                    RankSumMethod method) {
  require_nonempty(a, b);
  const std::size_t n = a.size(), m = b.size(), N = n + m;
  std::vector<std::pair<double, int>> all;
  all.reserve(N);
  for (double x : a) all.emplace_back(x, 0);
  for (double x : b) all.emplace_back(x, 1);
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  double rank_a = 0, tie_term = 0;
  bool ties = false;
  for (std::size_t k = 0; k < N;) {
    std::size_t e = k;
    while (e < N && all[e].first == all[k].first) ++e;
    const double t = static_cast<double>(e - k);
    const double mid = (k + 1 + e) / 2.0;  // average of ranks k+1..e
    for (std::size_t q = k; q < e; ++q)
      if (all[q].second == 0) rank_a += mid;
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    k = e;
  }
  TestResult r;
  r.statistic = rank_a - n * (n + 1) / 2.0;

  const bool exact = method == RankSumMethod::exact ||
                     (method == RankSumMethod::automatic && !ties && n <= 8 && m <= 8);
  if (exact) {
    if (ties) throw RangeError("exact rank-sum distribution requires untied data");
    // counts[nn][mm][u] via f(n,m,u) = f(n-1,m,u-m) + f(n,m-1,u)
    const std::size_t U = n * m;
    std::vector<std::vector<std::vector<double>>> f(
        n + 1, std::vector<std::vector<double>>(m + 1, std::vector<double>(U + 1, 0.0)));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= m; ++j) {
        if (i == 0 || j == 0) {
          f[i][j][0] = 1.0;
          continue;
        }
        for (std::size_t u = 0; u <= i * j; ++u) {
          double c = f[i][j - 1][u];
          if (u >= j) c += f[i - 1][j][u - j];
          f[i][j][u] = c;
        }
      }
    const auto& dist = f[n][m];
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const auto u_obs = static_cast<std::size_t>(std::llround(r.statistic));
    double lo = 0, hi = 0;
    for (std::size_t u = 0; u <= U; ++u) {
      if (u <= u_obs) lo += dist[u];
      if (u >= u_obs) hi += dist[u];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lo, hi) / total);
    return r;
  }

  const double mean = n * m / 2.0;
  const double var =
      n * m / 12.0 * ((N + 1.0) - tie_term / (static_cast<double>(N) * (N - 1.0)));
  if (var <= 0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::fabs(r.statistic - mean) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace chambersim
