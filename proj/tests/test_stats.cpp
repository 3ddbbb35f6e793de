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

#include "tripleloop/random.hpp"
#include "tripleloop/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tripleloop
{
namespace
{

double oracle_p(double r, double n)
{
  const double df = n - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

TEST(IncompleteBeta, MatchesIndependentOracle)
{
  for (double a : {0.5, 1.0, 2.5, 3.0, 10.0, 45.0}) {
    for (double b : {0.5, 1.0, 4.0, 20.0}) {
      for (double x = 0.01; x < 1.0; x += 0.049) {
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
          << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
}

TEST(IncompleteBeta, EdgesAndErrors)
{
  EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
  EXPECT_THROW(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(PearsonPValue, MatchesStudentTOracle)
{
  for (int n = 3; n <= 60; n += 3) {
    for (double r = -0.99; r < 1.0; r += 0.07) {
      EXPECT_NEAR(pearson_p_value(r, n), oracle_p(r, n), 1e-12) << "r=" << r << " n=" << n;
    }
  }
}

TEST(PearsonPValue, CorrelationTableCells)
{
  EXPECT_NEAR(pearson_p_value(-0.90, 9), 0.001, 0.0005);
  EXPECT_NEAR(pearson_p_value(0.93, 8), 0.001, 0.0005);
  // The published value for this cell is 0.02; the t-transform gives about 0.005.
  const double p = pearson_p_value(-0.87, 8);
  EXPECT_NEAR(p, 0.005, 0.001);
  EXPECT_GT(std::abs(p - 0.02), 0.01);
}

TEST(Pearson, PerfectLine)
{
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{3, 5, 7, 9, 11};
  const CorrelationResult c = pearson(x, y);
  EXPECT_NEAR(c.r, 1.0, 1e-15);
  EXPECT_LT(c.p_value, 1e-9);
  EXPECT_NEAR(c.slope, 2.0, 1e-12);
  EXPECT_NEAR(c.intercept, 1.0, 1e-12);
  EXPECT_EQ(c.n, 5u);
}

TEST(Pearson, SymmetricBoundedAndAffineInvariant)
{
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
      x.push_back(rng.normal(1.0));
      y.push_back(0.5 * x.back() + rng.normal(1.0));
    }
    const double r = pearson(x, y).r;
    EXPECT_LE(std::abs(r), 1.0);
    EXPECT_NEAR(pearson(y, x).r, r, 1e-12);
    std::vector<double> x2, y2;
    for (double v : x) x2.push_back(3.0 * v - 7.0);
    for (double v : y) y2.push_back(-0.25 * v + 2.0);
    EXPECT_NEAR(pearson(x2, y2).r, -r, 1e-12);
    EXPECT_NEAR(pearson(x2, y).r, r, 1e-12);
  }
}

TEST(Pearson, RejectsDegenerateInputs)
{
  const std::vector<double> a{1, 2, 3};
  EXPECT_THROW(pearson(a, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(pearson(a, std::vector<double>{4, 4, 4}), std::invalid_argument);
}

TEST(SampleStatistics, MeanAndRange)
{
  const std::vector<double> v{2.0, 9.0, -1.0, 4.0};
  EXPECT_DOUBLE_EQ(sample_mean(v), 3.5);
  EXPECT_EQ(sample_minmax(v), (std::pair<double, double>{-1.0, 9.0}));
  EXPECT_THROW(sample_mean(std::vector<double>{}), std::invalid_argument);
}

}  // namespace
}  // namespace tripleloop
