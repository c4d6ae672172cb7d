#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stabreg {

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);
double median(std::vector<double> v);

// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

struct BoxSummary {
  int n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0, sd = 0;
};
BoxSummary box_summary(const std::vector<double>& v);

// Ordinary least squares y ~ a + b*t over t = 0..n-1; returns b.
double ols_slope(const std::vector<double>& y);

// One-sided sign test: probability of at least `wins` successes out of `n`
// fair coin flips. Ties must be removed by the caller.
double sign_test_p(int wins, int n);

// FNV-1a, used to fingerprint configuration documents in reports.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace stabreg
