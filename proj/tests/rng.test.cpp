// Copyright 2026 The cpspdc Authors
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

#include "cpspdc/rng.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>

using namespace cpspdc;

TEST(rng, pure_function_of_seed_stream_draw) {
    CounterRng a(7, 123);
    CounterRng b(7, 123);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
    CounterRng c(7, 124);
    CounterRng d(8, 123);
    CounterRng e(7, 123);
    ASSERT_NE(c.next_u64(), e.next_u64());
    CounterRng f(7, 123);
    ASSERT_NE(d.next_u64(), f.next_u64());
    ASSERT_EQ(a.draws(), 100u);
}

TEST(rng, uniform_moments) {
    CounterRng r(1, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    double mean = s / n;
    ASSERT_NEAR(mean, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    ASSERT_NEAR(s2 / n - mean * mean, 1.0 / 12, 2e-3);
}

TEST(rng, normal_moments) {
    CounterRng r(2, 9);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        s += x;
        s2 += x * x;
    }
    ASSERT_NEAR(s / n, 0.0, 5 / std::sqrt(n));
    ASSERT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(rng, thermal_mean) {
    for (double mean : {0.01, 0.3, 2.0}) {
        CounterRng r(3, static_cast<std::uint64_t>(mean * 1000));
        const int n = 400000;
        double s = 0;
        for (int i = 0; i < n; ++i) s += static_cast<double>(r.thermal(mean));
        double sigma = std::sqrt(mean * (1 + mean) / n);
        ASSERT_NEAR(s / n, mean, 4 * sigma) << mean;
    }
    CounterRng r(3, 0);
    ASSERT_EQ(r.thermal(0.0), 0u);
}

TEST(rng, thermal_chi_squared) {
    const double mean = 0.4;
    const int n = 300000;
    CounterRng r(4, 4);
    std::map<std::uint64_t, double> hist;
    for (int i = 0; i < n; ++i) hist[std::min<std::uint64_t>(r.thermal(mean), 6)] += 1;
    double q = mean / (1 + mean);
    double chi2 = 0;
    double tail = 1.0;
    for (std::uint64_t k = 0; k <= 6; ++k) {
        double p = k < 6 ? (1 - q) * std::pow(q, static_cast<double>(k)) : tail;
        tail -= p;
        double expected = n * p;
        chi2 += std::pow(hist[k] - expected, 2) / expected;
    }
    boost::math::chi_squared dist(6);
    ASSERT_GT(1.0 - boost::math::cdf(dist, chi2), 0.01) << chi2;
}

TEST(rng, poisson_mean) {
    CounterRng r(5, 5);
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(r.poisson(0.7));
    ASSERT_NEAR(s / n, 0.7, 4 * std::sqrt(0.7 / n));
    ASSERT_EQ(r.poisson(0.0), 0u);
}
