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

#include "cpspdc/analysis.hpp"

#include <gtest/gtest.h>

#include <random>

#include "cpspdc/tagsim.hpp"

using namespace cpspdc;

namespace {

TimeTagStream two_channel(std::vector<TagEvent> events) {
    TimeTagStream s;
    s.channel_names = {"a", "b"};
    s.events = std::move(events);
    std::sort(s.events.begin(), s.events.end(), tag_less);
    return s;
}

CoincidenceHistogram comb(double central, double side, double period = 1000.0, int peaks = 6) {
    CoincidenceHistogram h;
    h.bin_width_ps = 10.0;
    for (int k = -peaks * 100 - 50; k <= peaks * 100 + 50; ++k) {
        h.centers_ps.push_back(k * 10.0);
        double v = 0.0;
        if (k % 100 == 0) v = k == 0 ? central : side;
        h.counts.push_back(v);
    }
    (void)period;
    return h;
}

PairSimulationConfig ideal_pairs(double mu, std::uint64_t pulses) {
    PairSimulationConfig c;
    c.brightness.mean_pairs_per_pulse = mu;
    c.pulses = pulses;
    c.signal_detector = DetectorModel::ideal();
    c.idler_detector = DetectorModel::ideal();
    c.seed = 5;
    return c;
}

}  // namespace

TEST(analysis, identical_times_hit_zero_bin) {
    auto s = two_channel({{0, 1000}, {1, 1000}});
    auto h = histogram_coincidences(s, 0, 1, 10.0, 100.0);
    ASSERT_EQ(h.total(), 1.0);
    ASSERT_EQ(h.counts[h.counts.size() / 2], 1.0);
    ASSERT_EQ(h.centers_ps[h.counts.size() / 2], 0.0);
    ASSERT_EQ(h.windows, 1u);
    ASSERT_THROW(histogram_coincidences(s, 0, 2, 10.0, 100.0), Error);
}

TEST(analysis, swapping_channels_mirrors_histogram) {
    std::mt19937_64 rng(1);
    std::vector<TagEvent> ev;
    for (int i = 0; i < 4000; ++i) ev.push_back({static_cast<std::uint32_t>(rng() % 2), rng() % 2000000});
    auto s = two_channel(ev);
    auto ab = histogram_coincidences(s, 0, 1, 7.0, 3000.0);
    auto ba = histogram_coincidences(s, 1, 0, 7.0, 3000.0);
    ASSERT_EQ(ab.counts.size(), ba.counts.size());
    for (std::size_t i = 0; i < ab.counts.size(); ++i) {
        ASSERT_EQ(ab.centers_ps[i], -ba.centers_ps[ba.counts.size() - 1 - i]);
        ASSERT_EQ(ab.counts[i], ba.counts[ba.counts.size() - 1 - i]);
    }
}

TEST(analysis, independent_channels_are_flat) {
    std::mt19937_64 rng(2);
    const std::uint64_t T = 1000000000;  // 1 ms
    const int na = 20000, nb = 20000;
    std::vector<TagEvent> ev;
    for (int i = 0; i < na; ++i) ev.push_back({0, rng() % T});
    for (int i = 0; i < nb; ++i) ev.push_back({1, rng() % T});
    auto h = histogram_coincidences(two_channel(ev), 0, 1, 1000.0, 100000.0);
    double expected = static_cast<double>(na) * nb * 1000.0 / T;
    double worst = 0.0, mean = 0.0;
    for (double c : h.counts) {
        worst = std::max(worst, std::abs(c - expected) / std::sqrt(expected));
        mean += c;
    }
    mean /= static_cast<double>(h.counts.size());
    ASSERT_LT(worst, 4.5);
    ASSERT_NEAR(mean, expected, 3 * std::sqrt(expected / static_cast<double>(h.counts.size())));
}

TEST(analysis, pulsed_stream_gives_comb) {
    G2SimulationConfig g;
    g.pulses = 200000;
    g.brightness.mean_pairs_per_pulse = 0.3;
    auto s = simulate_g2_tags(synthetic_schmidt({1.0}), g);
    auto h = histogram_coincidences(s, 1, 2, 100.0, 4 * 12500.0);
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        double phase = std::fmod(std::abs(h.centers_ps[i]) + 6250.0, 12500.0) - 6250.0;
        if (std::abs(phase) > 300.0) {
            ASSERT_LE(h.counts[i], 2.0) << h.centers_ps[i];
        }
    }
    for (int k = -4; k <= 4; ++k) ASSERT_GT(detail::window_sum(h, k * 12500.0, 300.0), 10.0);
}

TEST(analysis, g2_closed_forms) {
    ASSERT_NEAR(g2_from_histogram(comb(50, 50), 1000.0, 5).g2_zero, 1.0, 1e-12);
    auto e = g2_from_histogram(comb(100, 50), 1000.0, 5);
    ASSERT_NEAR(e.g2_zero, 2.0, 1e-12);
    ASSERT_NEAR(e.purity, 1.0, 1e-12);
    ASSERT_GT(e.error, 0.0);
}

TEST(analysis, g2_scale_invariant) {
    auto h = comb(173, 91);
    h.counts[h.counts.size() / 2 + 3] = 11;
    double base = g2_from_histogram(h, 1000.0, 5).g2_zero;
    for (double k : {0.5, 3.0, 1e4}) {
        auto scaled = h;
        for (double &c : scaled.counts) c *= k;
        ASSERT_NEAR(g2_from_histogram(scaled, 1000.0, 5).g2_zero, base, 1e-12 * base);
    }
}

TEST(analysis, g2_errors) {
    try {
        g2_from_histogram(comb(10, 10, 1000.0, 3), 1000.0, 5);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::InsufficientSpan);
    }
    try {
        g2_from_histogram(comb(10, 0), 1000.0, 5);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::EmptySidePeaks);
    }
    ASSERT_THROW(g2_from_histogram(comb(10, 10), 1000.0, 2), Error);
}

TEST(analysis, car_regimes) {
    // Darks only.
    auto c = ideal_pairs(0.0, 4000000);
    c.signal_detector.dark_count_rate_hz = 2e6;
    c.idler_detector.dark_count_rate_hz = 2e6;
    auto darks = simulate_pair_tags(synthetic_schmidt({1.0}), c);
    auto est = car(darks, 1, 2, 12500.0, 2000.0);
    double sigma = est.car * std::sqrt(1.0 / std::max(1.0, est.coincidences) + 1.0 / (2.0 * est.accidentals));
    ASSERT_NEAR(est.car, 1.0, 3 * sigma);
    // Default source brightness and detectors.
    PairSimulationConfig d;
    d.pulses = 2000000;
    auto jsa = build_jsa(bundled_device(), PumpSpec{}, {1536, 1556}, {1548, 1552}, 96);
    auto s = simulate_pair_tags(schmidt_decompose(jsa), d);
    auto e = car(s, 1, 2, 12500.0, 6000.0);
    ASSERT_GE(e.car, 1e2);
    ASSERT_LE(e.car, 1e4);
    // Nothing to call accidental.
    auto quiet = simulate_pair_tags(synthetic_schmidt({1.0}), ideal_pairs(1e-9, 1000));
    try {
        car(quiet, 1, 2, 12500.0, 2000.0);
        FAIL();
    } catch (const Error &err) {
        ASSERT_EQ(err.kind(), ErrorKind::EmptySidePeaks);
    }
    ASSERT_THROW(car(quiet, 1, 2, 12500.0, 7000.0), Error);
}

TEST(analysis, fidelity_examples) {
    Eigen::MatrixXd p(2, 1), q(2, 1), r(2, 1);
    p << 1, 0;
    q << 0.5, 0.5;
    r << 0, 3;
    ASSERT_NEAR(fidelity(p, p), 1.0, 1e-15);
    ASSERT_NEAR(fidelity(p, q), 0.5, 1e-15);
    ASSERT_EQ(fidelity(p, r), 0.0);
    ASSERT_NEAR(fidelity(q, q * 7.0), 1.0, 1e-15);
    try {
        fidelity(p, Eigen::MatrixXd::Ones(1, 2));
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::ShapeMismatch);
    }
}

TEST(analysis, rebin_by_overlap) {
    PhaseMatchGrid src{UniformAxis::from_edges(0.0, 3.0, 3), UniformAxis::from_edges(0.0, 1.0, 1), Eigen::MatrixXd::Ones(3, 1), true};
    auto out = rebin(src, UniformAxis::from_edges(0.0, 3.0, 2), UniformAxis::from_edges(0.0, 1.0, 1));
    ASSERT_NEAR(out.values(0, 0), 1.5, 1e-12);
    ASSERT_NEAR(out.values(1, 0), 1.5, 1e-12);
    auto partial = rebin(src, UniformAxis::from_edges(0.5, 2.0, 3), UniformAxis::from_edges(-1.0, 2.0, 1));
    ASSERT_NEAR(partial.values.sum(), 1.5, 1e-12);
}

TEST(analysis, deterministic_pair_lands_in_one_bin) {
    auto c = ideal_pairs(1.0, 2000);
    c.dither_within_cell = false;
    auto s = simulate_pair_tags(synthetic_schmidt({1.0}), c);
    auto rec = reconstruct_jsi(s, 0, {1, 510.0, 1550.0}, {2, 510.0, 1550.0}, {1545, 1555, 20}, {1545, 1555, 20},
                               {AnchorMode::TriggerZero, {}, {}});
    ASSERT_GT(rec.pairs_used, 0u);
    Eigen::Index r, col;
    ASSERT_EQ(rec.jsi.values.maxCoeff(&r, &col), static_cast<double>(rec.pairs_used));
    ASSERT_EQ(r, 10);
    ASSERT_EQ(col, 10);
}

TEST(analysis, reconstruction_errors) {
    TimeTagStream s;
    s.channel_names = {"trigger", "signal", "idler"};
    s.events = {{1, 100}, {2, 200}};
    try {
        reconstruct_jsi(s, 0, {1, 510, 1550}, {2, 510, 1550}, {1540, 1560, 8}, {1540, 1560, 8});
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::MissingTrigger);
    }
    s.events.insert(s.events.begin(), {0, 50});
    try {
        reconstruct_jsi(s, 0, {1, 0.0, 1550}, {2, 510, 1550}, {1540, 1560, 8}, {1540, 1560, 8});
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::ZeroDispersion);
    }
}

TEST(analysis, ideal_round_trip_and_marginal_consistency) {
    auto jsa = build_jsa(bundled_device(), PumpSpec{}, {1536, 1556}, {1548, 1552}, 256);
    auto gen = joint_intensity(jsa);
    double w = gen.values.sum(), ms = 0, mi = 0;
    for (Eigen::Index r = 0; r < gen.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < gen.values.cols(); ++c) {
            ms += gen.values(r, c) * gen.signal[static_cast<std::size_t>(r)];
            mi += gen.values(r, c) * gen.idler[static_cast<std::size_t>(c)];
        }
    }
    ms /= w;
    mi /= w;
    auto s = simulate_pair_tags(schmidt_decompose(jsa), ideal_pairs(0.1, 12000000));
    BinSpec bins{1544.0, 1556.0, 64};
    auto rec = reconstruct_jsi(s, 0, {1, 510.0, ms}, {2, 510.0, mi}, bins, bins);
    ASSERT_GE(rec.pairs_used, 1000000u);
    auto expected = rebin(gen, bins.axis(), bins.axis());
    ASSERT_GE(fidelity(rec.jsi, expected), 0.99);
    double p_rec = purity(schmidt_decompose(jsa_from_jsi(rec.jsi)));
    double p_amp = purity(schmidt_decompose(jsa_from_jsi(expected)));
    ASSERT_NEAR(p_rec, p_amp, 0.03);

    // Bins wide enough to hold every pair, so nothing is dropped on either axis.
    BinSpec wide_s{1530.0, 1562.0, 64}, wide_i{1544.0, 1556.0, 48};
    auto all = reconstruct_jsi(s, 0, {1, 510.0, ms}, {2, 510.0, mi}, wide_s, wide_i);
    ASSERT_EQ(all.pairs_used, all.pulses_with_pair);
    auto sig = reconstruct_marginal(s, 0, {1, 510.0, ms}, wide_s, all.signal_offset_ps, 2u);
    auto idl = reconstruct_marginal(s, 0, {2, 510.0, mi}, wide_i, all.idler_offset_ps, 1u);
    for (std::size_t i = 0; i < wide_s.n; ++i) {
        ASSERT_EQ(sig[i], all.jsi.values.row(static_cast<Eigen::Index>(i)).sum());
    }
    for (std::size_t i = 0; i < wide_i.n; ++i) {
        ASSERT_EQ(idl[i], all.jsi.values.col(static_cast<Eigen::Index>(i)).sum());
    }
}

TEST(analysis, jitter_broadens_marginal_in_quadrature) {
    auto jsa = build_jsa(bundled_device(), PumpSpec{}, {1536, 1556}, {1548, 1552}, 128);
    auto schmidt = schmidt_decompose(jsa);
    auto variance = [](const std::vector<double> &h, const UniformAxis &a) {
        double w = 0, m = 0, m2 = 0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            w += h[i];
            m += h[i] * a[i];
            m2 += h[i] * a[i] * a[i];
        }
        m /= w;
        return m2 / w - m * m;
    };
    BinSpec bins{1548.0, 1552.0, 800};
    auto c = ideal_pairs(0.05, 2000000);
    auto clean = reconstruct_marginal(simulate_pair_tags(schmidt, c), 0, {2, 510.0, 1550.0}, bins);
    c.idler_detector.jitter_sigma_ps = 25.0;
    auto blurred = reconstruct_marginal(simulate_pair_tags(schmidt, c), 0, {2, 510.0, 1550.0}, bins);
    double added = variance(blurred, bins.axis()) - variance(clean, bins.axis());
    double sigma_nm = 25.0 / 510.0;
    ASSERT_NEAR(std::sqrt(added), sigma_nm, 0.1 * sigma_nm);
}
