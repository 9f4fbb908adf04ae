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

#include "cpspdc/phasematch.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

using namespace cpspdc;
using cpspdc_test::oracle_bisect;

namespace {

// Independent restatement of the mismatch formula.
double oracle_delta_k(const DeviceSpec &d, double ls, double li) {
    double lp = 1.0 / (1.0 / ls + 1.0 / li);
    auto k = [&](const DispersionModel &m, double l) { return 2.0 * M_PI * (m.n_eff(l) + d.index_offset) / (l * 1e-3); };
    double sign = d.geometry == Geometry::CounterPropagating ? 1.0 : -1.0;
    return k(d.modes.pump, lp) - k(d.modes.telecom, ls) + sign * k(d.modes.telecom, li) -
           2.0 * M_PI * d.qpm_order / d.poling_period_um;
}

DeviceSpec co_device() {
    DeviceSpec d = bundled_device();
    d.geometry = Geometry::CoPropagating;
    d.qpm_order = 1;
    d.poling_period_um = poling_period_for_degeneracy(d, 775.0);
    return d;
}

// Idler on the zero-mismatch curve for a given signal, by bisection over [lo, hi].
double ridge_idler(const DeviceSpec &d, double ls, double lo, double hi) {
    return oracle_bisect([&](double li) { return oracle_delta_k(d, ls, li); }, lo, hi);
}

}  // namespace

TEST(phasematch, degenerate_point_is_phase_matched) {
    auto d = bundled_device();
    ASSERT_LT(std::abs(delta_k(d, 1550.0, 1550.0)), 1e-9);
    ASSERT_NEAR(find_degenerate_pump(d), 775.0, 1e-3);
}

TEST(phasematch, formula_matches_restatement) {
    auto d = bundled_device();
    auto c = co_device();
    for (double ls : {1541.0, 1550.0, 1557.3}) {
        for (double li : {1543.2, 1550.0, 1559.9}) {
            ASSERT_NEAR(delta_k(d, ls, li), oracle_delta_k(d, ls, li), 1e-10);
            ASSERT_NEAR(delta_k(c, ls, li), oracle_delta_k(c, ls, li), 1e-10);
        }
    }
}

TEST(phasematch, exchange_symmetry_by_geometry) {
    auto d = bundled_device();
    auto c = co_device();
    ASSERT_NEAR(delta_k(c, 1545.0, 1556.0), delta_k(c, 1556.0, 1545.0), 1e-12);
    ASSERT_GT(std::abs(delta_k(d, 1545.0, 1556.0) - delta_k(d, 1556.0, 1545.0)), 1e-3);
}

TEST(phasematch, off_degenerate_root_by_bisection) {
    auto d = bundled_device();
    double ls = 1551.0;
    double li = ridge_idler(d, ls, 1540.0, 1560.0);
    ASSERT_LT(std::abs(delta_k(d, ls, li)), 1e-9);
}

TEST(phasematch, pmf_values) {
    auto d = bundled_device();
    ASSERT_NEAR(pmf_amplitude(d, 1550.0, 1550.0), 1.0, 1e-12);
    ASSERT_NEAR(sinc(M_PI), 0.0, 1e-15);
    ASSERT_EQ(sinc(0.0), 1.0);
    double half = oracle_bisect([](double x) { return std::pow(std::sin(x) / x, 2) - 0.5; }, 1.0, 2.0);
    ASSERT_NEAR(half, 1.39156, 1e-5);
    ASSERT_NEAR(sinc(1.39156) * sinc(1.39156), 0.5, 1e-5);
}

TEST(phasematch, pmf_bounds_over_grid) {
    auto d = bundled_device();
    for (double ls = 1530.0; ls <= 1570.0; ls += 0.37) {
        for (double li = 1530.0; li <= 1570.0; li += 0.41) {
            double a = pmf_amplitude(d, ls, li);
            ASSERT_GE(a, -0.2173);
            ASSERT_LE(a, 1.0);
        }
    }
}

TEST(phasematch, energy_conservation_on_grid) {
    auto g = sfg_map(bundled_device(), {1540, 1560}, {1540, 1560}, 64);
    for (std::size_t r = 0; r < g.signal.size; ++r) {
        for (std::size_t c = 0; c < g.idler.size; ++c) {
            double lp = pump_wavelength(g.signal[r], g.idler[c]);
            ASSERT_LT(std::abs(1.0 / g.signal[r] + 1.0 / g.idler[c] - 1.0 / lp), 1e-12);
        }
    }
}

TEST(phasematch, sfg_ridge_follows_oracle_curve) {
    auto d = bundled_device();
    auto g = sfg_map(d, {1540, 1560}, {1540, 1560}, 256);
    ASSERT_EQ(g.values.rows(), 256);
    ASSERT_TRUE(g.intensity);
    ASSERT_GE(g.values.minCoeff(), 0.0);
    // Counter-propagating ridge is shallow: scan each signal row for its idler peak.
    for (std::size_t r = 0; r < g.signal.size; r += 5) {
        Eigen::Index best;
        g.values.row(static_cast<Eigen::Index>(r)).maxCoeff(&best);
        double li = ridge_idler(d, g.signal[r], 1530.0, 1570.0);
        ASSERT_LE(std::abs(g.idler[static_cast<std::size_t>(best)] - li), g.idler.step * 1.0001) << "row " << r;
    }
}

TEST(phasematch, degenerate_point_is_local_max) {
    auto g = sfg_map(bundled_device(), {1540, 1560}, {1540, 1560}, 257);
    auto r = static_cast<Eigen::Index>(g.signal.nearest(1550.0));
    auto c = static_cast<Eigen::Index>(g.idler.nearest(1550.0));
    ASSERT_NEAR(g.signal[128], 1550.0, 1e-9);
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) ASSERT_GE(g.values(r, c), g.values(r + dr, c + dc));
    }
}

TEST(phasematch, ridge_slopes_by_geometry) {
    auto d = bundled_device();
    auto c = co_device();
    const double h = 1.0;
    double counter = (ridge_idler(d, 1550 + h, 1540, 1560) - ridge_idler(d, 1550 - h, 1540, 1560)) / (2 * h);
    ASSERT_LT(std::abs(counter), 0.3);
    // Co-propagating degenerate ridge: the two branches meet at degeneracy, so
    // follow the zero-mismatch line along the anti-diagonal direction.
    double co = (ridge_idler(c, 1550 + h, 1545, 1550.5) - ridge_idler(c, 1550 - h, 1549.5, 1555)) / (2 * h);
    ASSERT_NEAR(co, -1.0, 0.1);
}

TEST(phasematch, marginals_at_degenerate_pump) {
    auto m = marginal_spectra_cw(bundled_device(), 775.0, 3.0, 1025);
    auto peak = [](const UniformAxis &a, const std::vector<double> &v) {
        return a[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
    };
    ASSERT_NEAR(peak(m.signal, m.signal_values), 1550.0, m.signal.step);
    ASSERT_NEAR(peak(m.idler, m.idler_values), 1550.0, m.idler.step);
    ASSERT_DOUBLE_EQ(*std::max_element(m.signal_values.begin(), m.signal_values.end()), 1.0);
}

TEST(phasematch, marginal_tunability) {
    auto d = bundled_device();
    auto peak = [](const UniformAxis &a, const std::vector<double> &v) {
        return a[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
    };
    auto m0 = marginal_spectra_cw(d, 775.0, 3.0, 1024);
    auto m1 = marginal_spectra_cw(d, 775.3, 3.0, 1024);
    double ds = peak(m1.signal, m1.signal_values) - peak(m0.signal, m0.signal_values);
    double di = peak(m1.idler, m1.idler_values) - peak(m0.idler, m0.idler_values);
    ASSERT_LE(std::abs(di), 0.1 * std::abs(ds) + m0.idler.step);
    // Pinned idler: dls/dlp = (ls/lp)^2 = 4.
    ASSERT_NEAR(ds / 0.3, 4.0, 0.8);
}

TEST(phasematch, marginals_empty_support) {
    try {
        marginal_spectra_cw(bundled_device(), 781.0, 0.5, 256);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::EmptySupport);
    }
}

TEST(phasematch, qpm_factors) {
    ASSERT_NEAR(qpm_effective_nonlinearity(1, 0.5), 2.0 / M_PI, 1e-15);
    ASSERT_NEAR(qpm_effective_nonlinearity(3, 0.5), -2.0 / (3.0 * M_PI), 1e-15);
    ASSERT_EQ(std::abs(qpm_effective_nonlinearity(3, 0.5) / qpm_effective_nonlinearity(1, 0.5)), 1.0 / 3.0);
    ASSERT_EQ(qpm_effective_nonlinearity(2, 0.5), 0.0);
    ASSERT_EQ(qpm_effective_nonlinearity(4, 0.5), 0.0);
    ASSERT_NEAR(qpm_efficiency(3, 0.5) / qpm_efficiency(1, 0.5), 1.0 / 9.0, 1e-15);
    for (int m : {1, 3, 5, 7}) {
        for (double dc : {0.1, 0.27, 0.4}) {
            ASSERT_NEAR(std::abs(qpm_effective_nonlinearity(m, dc)), std::abs(qpm_effective_nonlinearity(m, 1 - dc)),
                        1e-14);
        }
    }
    ASSERT_THROW(qpm_effective_nonlinearity(0, 0.5), Error);
    ASSERT_THROW(qpm_effective_nonlinearity(1, 1.0), Error);
}

TEST(phasematch, degenerate_pump_monotone_in_offset) {
    auto d = bundled_device();
    double base = find_degenerate_pump(d);
    d.index_offset = 1e-3;
    double up = find_degenerate_pump(d);
    d.index_offset = -1e-3;
    double down = find_degenerate_pump(d);
    ASSERT_NE(up, base);
    ASSERT_TRUE((up - base) * (down - base) < 0.0);
    for (double off : {1e-3, -1e-3}) {
        d.index_offset = off;
        double oracle = oracle_bisect([&](double lp) { return oracle_delta_k(d, 2 * lp, 2 * lp); }, 760.0, 790.0);
        ASSERT_NEAR(find_degenerate_pump(d), oracle, 1e-6);
        ASSERT_LT(std::abs(delta_k(d, 2 * find_degenerate_pump(d), 2 * find_degenerate_pump(d))), 1e-9);
    }
}

TEST(phasematch, no_root_for_constant_index) {
    DeviceSpec d = bundled_device();
    // With n = 2 everywhere the degenerate root sits at 2 * 1.18 / 3 um = 786.7 nm;
    // a pump mode that stops at 780 nm cannot reach it.
    auto tel = DispersionModel::sellmeier(SellmeierCoefficients{4.0, {}, 0.0}, 1200.0, 2000.0);
    auto pump = DispersionModel::sellmeier(SellmeierCoefficients{4.0, {}, 0.0}, 600.0, 780.0);
    d.modes = ModeSet{tel, pump};
    try {
        find_degenerate_pump(d);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::NoRoot);
        ASSERT_TRUE(is_numerical(e.kind()));
    }
}

TEST(phasematch, index_offset_solver) {
    auto d = bundled_device();
    d.index_offset = index_offset_for_degenerate_pump(d, 775.15);
    ASSERT_NEAR(find_degenerate_pump(d), 775.15, 1e-6);
}

TEST(phasematch, device_validation) {
    DeviceSpec d;
    d.length_mm = 0.0;
    ASSERT_THROW(d.validate(), Error);
    d = DeviceSpec{};
    d.duty_cycle = 1.0;
    ASSERT_THROW(d.validate(), Error);
    d = DeviceSpec{};
    d.qpm_order = 0;
    ASSERT_THROW(d.validate(), Error);
    d = DeviceSpec{};
    d.poling_period_um = -1.0;
    ASSERT_THROW(sfg_map(d, {1540, 1560}, {1540, 1560}, 16), Error);
    ASSERT_THROW(sfg_map(DeviceSpec{}, {1540, 1560}, {1540, 1560}, 15), Error);
}

TEST(phasematch, sfg_map_thread_independent) {
    auto d = bundled_device();
    auto a = sfg_map(d, {1540, 1560}, {1540, 1560}, 64, 1);
    auto b = sfg_map(d, {1540, 1560}, {1540, 1560}, 64, 7);
    ASSERT_TRUE(a.values == b.values);
}
