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

#include "cpspdc/interference.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cpspdc;

namespace {

// Constant-index telecom mode: A(Omega) = sinc(n L Omega / c) exactly.
DeviceSpec ideal_device() {
    DeviceSpec d = bundled_device();
    d.modes.telecom = DispersionModel::sellmeier(SellmeierCoefficients{4.0, {}, 0.0}, 1000.0, 2500.0, 0.0, "n=2");
    d.poling_period_um = poling_period_for_degeneracy(d, 775.0);
    return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) { return UniformAxis::from_range(lo, hi, n).values(); }

DensityMatrix mixed_state(const std::vector<double> &weights, std::mt19937_64 &rng) {
    const auto n = static_cast<Eigen::Index>(weights.size());
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = {g(rng), g(rng)};
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::VectorXcd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = weights[static_cast<std::size_t>(i)];
    DensityMatrix rho;
    rho.axis = UniformAxis::from_range(1549.0, 1551.0, static_cast<std::size_t>(n));
    rho.values = q * w.asDiagonal() * q.adjoint();
    return rho;
}

}  // namespace

TEST(interference, visibility_definition) {
    ASSERT_DOUBLE_EQ(visibility(HomCurve{{0, 1}, {1.0, 0.0}}).value, 1.0);
    ASSERT_DOUBLE_EQ(visibility(HomCurve{{0, 1}, {1.0, 1.0}}).value, 0.0);
    ASSERT_NEAR(visibility(HomCurve{{0, 1, 2}, {1.0, 0.127, 1.0}}).value, 0.873, 1e-12);
    auto v = visibility(HomCurve{{0}, {-1e-6}});
    ASSERT_EQ(v.value, 1.0);
    ASSERT_TRUE(v.clamped);
    try {
        visibility(HomCurve{});
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::EmptyCurve);
    }
}

TEST(interference, delay_path_round_trip) {
    ASSERT_NEAR(delay_ps_from_path_mm(1.0), 3.3356, 1e-4);
    HomCurve c{linspace(-40, 40, 81), std::vector<double>(81, 1.0)};
    auto mm = delay_to_path(c, 11.0);
    ASSERT_EQ(mm.x_label, "path_mm");
    ASSERT_NEAR(mm.x[40], 11.0, 1e-12);
    auto back = path_to_delay(mm, 11.0);
    for (std::size_t i = 0; i < c.x.size(); ++i) ASSERT_NEAR(back.x[i], c.x[i], 1e-9);
}

TEST(interference, ideal_sinc_gives_triangle) {
    auto d = ideal_device();
    ASSERT_NEAR(find_degenerate_pump(d), 775.0, 1e-6);
    const double tau_max = 2.0 * d.length_mm * kPsPerMm;
    ASSERT_NEAR(tau_max, 33.356, 1e-3);
    auto delays = linspace(-60, 60, 512);
    auto curve = hom_cw_dip(d, 775.0, delays, 40.0, 4097);
    double worst = 0.0;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        double tri = std::min(1.0, std::abs(delays[i]) / tau_max);
        worst = std::max(worst, std::abs(curve.values[i] - tri));
    }
    ASSERT_LT(worst, 1e-3);
    auto zero = hom_cw_dip(d, 775.0, {0.0}, 40.0, 4097);
    ASSERT_NEAR(1.0 - zero.values[0], 1.0, 1e-6);
}

TEST(interference, default_device_full_dip_and_baseline) {
    auto d = bundled_device();
    auto curve = hom_cw_dip(d, 775.0, {0.0, 200.0, -200.0});
    ASSERT_NEAR(curve.values[0], 0.0, 1e-9);
    ASSERT_NEAR(curve.values[1], 1.0, 1e-3);
    ASSERT_NEAR(curve.values[2], 1.0, 1e-3);
    ASSERT_NEAR(visibility(curve).value, 1.0, 1e-9);
}

TEST(interference, values_within_physical_bounds) {
    auto d = bundled_device();
    for (double lp : {774.8, 775.0, 775.13}) {
        auto c = hom_cw_dip(d, lp, linspace(-50, 50, 101), 10.0, 2049);
        for (double v : c.values) {
            ASSERT_GE(v, -1e-12);
            ASSERT_LE(v, 2.0 + 1e-12);
        }
    }
}

TEST(interference, cw_empty_support) {
    try {
        hom_cw_dip(bundled_device(), 780.0, {0.0}, 2.0, 513);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::EmptySupport);
    }
}

TEST(interference, hom_map_properties) {
    auto d = bundled_device();
    auto map = hom_map(d, {774.6, 775.4}, -30.0, 30.0, 81, 61, 10.0, 2049);
    Eigen::Index r, c;
    map.values.minCoeff(&r, &c);
    ASSERT_NEAR(map.pump[static_cast<std::size_t>(r)], 775.0, map.pump.step * 0.5001);
    ASSERT_GT(map.values.maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < map.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.values.cols(); ++j) {
            ASSERT_NEAR(map.values(i, j), map.values(i, map.values.cols() - 1 - j), 1e-9);
        }
    }
    auto serial = hom_map(d, {774.6, 775.4}, -30.0, 30.0, 81, 61, 10.0, 2049, 1);
    ASSERT_TRUE(serial.values == map.values);
}

TEST(interference, spectral_slice) {
    auto d = bundled_device();
    auto map = hom_map(d, {774.6, 775.4}, -300.0, 300.0, 161, 61, 10.0, 2049);
    auto s0 = hom_spectral_slice(map, 0.0);
    ASSERT_EQ(s0.x_label, "pump_nm");
    auto it = std::min_element(s0.values.begin(), s0.values.end());
    ASSERT_NEAR(s0.x[static_cast<std::size_t>(it - s0.values.begin())], 775.0, 1e-9);
    ASSERT_NEAR(*it, 0.0, 1e-9);
    bool lobe = false;
    for (std::size_t i = 1; i + 1 < s0.values.size(); ++i) {
        if (s0.values[i] > s0.values[i - 1] && s0.values[i] > s0.values[i + 1] && s0.values[i] > 1.0) lobe = true;
    }
    ASSERT_TRUE(lobe);
    auto far = hom_spectral_slice(map, 290.0);
    auto [lo, hi] = std::minmax_element(far.values.begin(), far.values.end());
    ASSERT_LT(*hi - *lo, 1e-2);
    try {
        hom_spectral_slice(map, 400.0);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
}

TEST(interference, two_source_identical_states) {
    std::mt19937_64 rng(5);
    auto pure = mixed_state({1.0, 0, 0, 0, 0, 0, 0, 0}, rng);
    auto c = heralded_two_source_hom(pure, pure, {0.0});
    ASSERT_NEAR(visibility(c).value, 1.0, 1e-9);
    for (auto w : std::vector<std::vector<double>>{{0.5, 0.5, 0, 0}, {0.7, 0.2, 0.1, 0.0}, {0.4, 0.3, 0.2, 0.1}}) {
        auto rho = mixed_state(w, rng);
        double p = rho.purity();
        ASSERT_NEAR(1.0 - heralded_two_source_hom(rho, rho, {0.0}).values[0], p, 1e-9);
    }
}

TEST(interference, two_source_from_jsa_matches_purity) {
    auto j = build_jsa(bundled_device(), PumpSpec{}, {1536, 1556}, {1548, 1552}, 128);
    double p = purity(schmidt_decompose(j));
    for (Arm arm : {Arm::Idler, Arm::Signal}) {
        auto rho = heralded_density_matrix(j, arm);
        ASSERT_NEAR(1.0 - heralded_two_source_hom(rho, rho, {0.0}).values[0], p, 1e-9);
    }
    // A global phase on either source's amplitude leaves the curve unchanged.
    auto phased = j;
    phased.values *= std::polar(1.0, 1.3);
    auto ra = heralded_density_matrix(j, Arm::Idler);
    auto base = heralded_two_source_hom(ra, ra, {0.0, 0.7, 3.0});
    auto other = heralded_two_source_hom(ra, heralded_density_matrix(phased, Arm::Idler), {0.0, 0.7, 3.0});
    for (std::size_t i = 0; i < 3; ++i) ASSERT_NEAR(base.values[i], other.values[i], 1e-12);
}

TEST(interference, two_source_errors) {
    std::mt19937_64 rng(2);
    auto a = mixed_state({0.5, 0.5, 0.0}, rng);
    auto b = mixed_state({0.5, 0.5, 0.0, 0.0}, rng);
    try {
        heralded_two_source_hom(a, b, {0.0});
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::AxisMismatch);
    }
    auto c = a;
    c.values *= 2.0;
    try {
        heralded_two_source_hom(a, c, {0.0});
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::NotNormalized);
    }
}

TEST(interference, shifted_source_degrades_idler_more) {
    auto a = bundled_device();
    auto b = a;
    b.index_offset = index_offset_for_degenerate_pump(a, find_degenerate_pump(a) + 0.15);
    PumpSpec pump;
    auto ja = build_jsa(a, pump, {1536, 1556}, {1547, 1553}, 256);
    auto jb = build_jsa(b, pump, {1536, 1556}, {1547, 1553}, 256);
    // Signal photons are heralded by idler detections and vice versa.
    double vs = 1.0 - heralded_two_source_hom(heralded_density_matrix(ja, Arm::Idler),
                                              heralded_density_matrix(jb, Arm::Idler), {0.0})
                          .values[0];
    double vi = 1.0 - heralded_two_source_hom(heralded_density_matrix(ja, Arm::Signal),
                                              heralded_density_matrix(jb, Arm::Signal), {0.0})
                          .values[0];
    ASSERT_LT(vi, vs);
}
