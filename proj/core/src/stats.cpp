#include "stabreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace stabreg {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  if (q <= 0) return v.front();
  if (q >= 1) return v.back();
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v[lo];
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

BoxSummary box_summary(const std::vector<double>& v) {
  BoxSummary b;
  b.n = static_cast<int>(v.size());
  if (v.empty()) return b;
  b.min = quantile(v, 0.0);
  b.q1 = quantile(v, 0.25);
  b.median = quantile(v, 0.5);
  b.q3 = quantile(v, 0.75);
  b.max = quantile(v, 1.0);
  b.mean = mean(v);
  b.sd = sample_sd(v);
  return b;
}

double ols_slope(const std::vector<double>& y) {
  std::size_t n = y.size();
  if (n < 2) return 0.0;
  double tbar = static_cast<double>(n - 1) / 2.0;
  double ybar = mean(y);
  double num = 0, den = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double dt = static_cast<double>(t) - tbar;
    num += dt * (y[t] - ybar);
    den += dt * dt;
  }
  return den > 0 ? num / den : 0.0;
}

double sign_test_p(int wins, int n) {
  if (n <= 0) return 1.0;
  if (wins < 0) wins = 0;
  // Exact binomial tail at p = 1/2 via logarithms to stay finite for large n.
  double p = 0;
  for (int k = wins; k <= n; ++k) {
    double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    p += std::exp(logc - n * std::log(2.0));
  }
  return std::min(p, 1.0);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace stabreg
