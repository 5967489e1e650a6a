// Copyright 2026 The dppca Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Statistical tests used by experiment analysis and by the test suite itself:
// Welch's one-sided t-test, one-sample Kolmogorov-Smirnov, and Mann-Kendall
// trend. The special functions underneath (regularized incomplete beta,
// Student-t CDF, Kolmogorov Q) are implemented with standard series and
// continued-fraction expansions.

#ifndef DPPCA_STATS_HPP_
#define DPPCA_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dppca/errors.hpp"

namespace dppca {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz
// iteration. Converges quickly for x < (a+1)/(a+b+2).
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double betainc_regularized(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw parameter_error("betainc: shape parameters must be positive");
  if (x < 0.0 || x > 1.0) throw parameter_error("betainc: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::betacf(a, b, x) / a;
  }
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// CDF of Student's t with (possibly fractional) degrees of freedom.
inline double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw parameter_error("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * betainc_regularized(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw parameter_error("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Unbiased sample variance (n-1 denominator).
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw parameter_error("sample_variance: need at least two observations");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline double sample_stddev(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  // P(observing a difference at least this large | means equal), for the
  // one-sided alternative "mean(a) > mean(b)".
  double p_greater = 1.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw parameter_error("welch_t_test: need two observations per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  if (va + vb == 0.0) throw parameter_error("welch_t_test: both samples are constant");
  WelchResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_greater = 1.0 - student_t_cdf(r.t, r.df);
  return r;
}

// Kolmogorov limit distribution Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
inline double kolmogorov_q(double x) {
  if (x <= 0.02) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;  // asymptotic, Q(sqrt(n) * D)
};

// One-sample two-sided Kolmogorov-Smirnov test against a continuous CDF.
inline KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw parameter_error("ks_test: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return {d, kolmogorov_q(std::sqrt(n) * d)};
}

struct MannKendallResult {
  long long s = 0;
  double var_s = 0.0;
  double z = 0.0;              // continuity-corrected normal score
  double p_decreasing = 1.0;   // one-sided, alternative "trend is decreasing"
};

// Mann-Kendall trend test with tie correction in the variance.
inline MannKendallResult mann_kendall(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 3) throw parameter_error("mann_kendall: need at least three observations");
  long long s = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (xs[j] > xs[i]) ++s;
      else if (xs[j] < xs[i]) --s;
    }
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(n);
  double var = dn * (dn - 1.0) * (2.0 * dn + 5.0) / 18.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (t > 1.0) var -= t * (t - 1.0) * (2.0 * t + 5.0) / 18.0;
    i = j;
  }
  MannKendallResult r;
  r.s = s;
  r.var_s = var;
  if (var <= 0.0) {
    r.z = 0.0;
    r.p_decreasing = 0.5;
    return r;
  }
  const double sd = std::sqrt(var);
  if (s > 0) r.z = (static_cast<double>(s) - 1.0) / sd;
  else if (s < 0) r.z = (static_cast<double>(s) + 1.0) / sd;
  else r.z = 0.0;
  r.p_decreasing = normal_cdf(r.z);
  return r;
}

}  // namespace dppca

#endif  // DPPCA_STATS_HPP_
