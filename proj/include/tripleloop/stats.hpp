// Copyright 2026 The tripleloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIPLELOOP__STATS_HPP_
#define TRIPLELOOP__STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>

namespace tripleloop
{

namespace detail
{
// Modified Lentz evaluation of the incomplete-beta continued fraction.
inline double beta_continued_fraction(double a, double b, double x)
{
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}
}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x)
{
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
    std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast only on the near side of the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df)
{
  if (!(df > 0.0)) throw std::invalid_argument("student t: df must be > 0");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

struct CorrelationResult
{
  double r{0.0};
  double p_value{1.0};
  std::size_t n{0};
  double slope{0.0};
  double intercept{0.0};
};

/// Product-moment correlation with a two-sided t-test and the least-squares line y = slope x + intercept.
inline CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("pearson: need at least 3 pairs");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  // Relative test so that constant inputs with rounding noise still count as degenerate.
  const auto degenerate = [&](double ss, double mean) {
    return !(ss > 1e-24 * std::max(1.0, mean * mean) * static_cast<double>(n));
  };
  if (degenerate(sxx, mx) || degenerate(syy, my)) {
    throw std::invalid_argument("pearson: zero variance in an argument");
  }

  CorrelationResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  const double df = static_cast<double>(n) - 2.0;
  if (std::abs(out.r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
    out.p_value = std::clamp(student_t_two_sided_p(t, df), 0.0, 1.0);
  }
  return out;
}

/// p-value for a given correlation and sample size, as pearson would report it.
inline double pearson_p_value(double r, std::size_t n)
{
  if (n < 3) throw std::invalid_argument("pearson_p_value: n must be >= 3");
  if (!(std::abs(r) <= 1.0)) throw std::invalid_argument("pearson_p_value: |r| must be <= 1");
  if (std::abs(r) == 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  return student_t_two_sided_p(r * std::sqrt(df / (1.0 - r * r)), df);
}

inline double sample_mean(std::span<const double> values)
{
  if (values.empty()) throw std::invalid_argument("sample_mean: empty sequence");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline std::pair<double, double> sample_minmax(std::span<const double> values)
{
  if (values.empty()) throw std::invalid_argument("sample_minmax: empty sequence");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__STATS_HPP_
