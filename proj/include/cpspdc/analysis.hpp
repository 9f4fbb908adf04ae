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

#ifndef CPSPDC_ANALYSIS_HPP
#define CPSPDC_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/phasematch.hpp"
#include "cpspdc/tags.hpp"
#include "cpspdc/tagsim.hpp"

namespace cpspdc {

/// Bins are centred on integer multiples of bin_width; delay = tB - tA.
struct CoincidenceHistogram {
    double bin_width_ps = 1.0;
    std::vector<double> centers_ps;
    std::vector<double> counts;
    std::uint64_t windows = 0;  // start events analysed

    double span_ps() const { return centers_ps.empty() ? 0.0 : centers_ps.back(); }

    double total() const {
        double s = 0.0;
        for (double c : counts) s += c;
        return s;
    }
};

/// Delays tB - tA binned on centres k * bin_width for |k * bin_width| <= span.
/// Every bin, including the outermost, is fully covered. Single forward sweep
/// over the sorted stream.
inline CoincidenceHistogram histogram_coincidences(const TimeTagStream &stream, std::uint32_t channel_a,
                                                   std::uint32_t channel_b, double bin_width_ps, double span_ps) {
    stream.check_channel(channel_a);
    stream.check_channel(channel_b);
    if (!(bin_width_ps > 0.0)) throw Error(ErrorKind::InvalidArgument, "bin width must be > 0");
    if (!(span_ps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "span must be >= 0");
    const auto half_bins = static_cast<long>(std::floor(span_ps / bin_width_ps + 0.5));
    CoincidenceHistogram h;
    h.bin_width_ps = bin_width_ps;
    h.centers_ps.resize(static_cast<std::size_t>(2 * half_bins + 1));
    h.counts.assign(h.centers_ps.size(), 0.0);
    for (long k = -half_bins; k <= half_bins; ++k) {
        h.centers_ps[static_cast<std::size_t>(k + half_bins)] = static_cast<double>(k) * bin_width_ps;
    }
    std::vector<std::uint64_t> a = stream.times(channel_a);
    std::vector<std::uint64_t> b = stream.times(channel_b);
    h.windows = a.size();
    const auto span = static_cast<std::int64_t>(std::ceil((static_cast<double>(half_bins) + 0.5) * bin_width_ps));
    std::size_t first = 0;
    for (std::uint64_t ta : a) {
        const auto ita = static_cast<std::int64_t>(ta);
        while (first < b.size() && static_cast<std::int64_t>(b[first]) < ita - span) ++first;
        for (std::size_t j = first; j < b.size(); ++j) {
            std::int64_t d = static_cast<std::int64_t>(b[j]) - ita;
            if (d > span) break;
            long bin = std::lround(static_cast<double>(d) / bin_width_ps);
            if (bin < -half_bins || bin > half_bins) continue;
            h.counts[static_cast<std::size_t>(bin + half_bins)] += 1.0;
        }
    }
    return h;
}

struct G2Estimate {
    double g2_zero = 0.0;
    double error = 0.0;
    double purity = 0.0;  // g2_zero - 1
    double central_counts = 0.0;
    double mean_side_counts = 0.0;
};

namespace detail {

/// Counts in the window |delay - center| <= half_width, by bin centre.
inline double window_sum(const CoincidenceHistogram &h, double center, double half_width) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.centers_ps.size(); ++i) {
        if (std::abs(h.centers_ps[i] - center) <= half_width) s += h.counts[i];
    }
    return s;
}

}  // namespace detail

/// Central peak over the mean of the nearest 2 * n_side_peaks side peaks; each
/// peak integrates a full-width window of half a repetition period.
inline G2Estimate g2_from_histogram(const CoincidenceHistogram &hist, double rep_period_ps, int n_side_peaks = 5) {
    if (n_side_peaks < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 side peaks per side");
    if (!(rep_period_ps > 0.0)) throw Error(ErrorKind::InvalidArgument, "repetition period must be > 0");
    const double half = 0.25 * rep_period_ps;
    if (hist.span_ps() + 0.5 * hist.bin_width_ps < n_side_peaks * rep_period_ps + half) {
        throw Error(ErrorKind::InsufficientSpan, "histogram does not cover the requested side peaks");
    }
    G2Estimate g;
    g.central_counts = detail::window_sum(hist, 0.0, half);
    double side = 0.0;
    for (int k = 1; k <= n_side_peaks; ++k) {
        side += detail::window_sum(hist, k * rep_period_ps, half);
        side += detail::window_sum(hist, -k * rep_period_ps, half);
    }
    if (!(side > 0.0)) throw Error(ErrorKind::EmptySidePeaks, "no counts in the side peaks");
    g.mean_side_counts = side / (2.0 * n_side_peaks);
    g.g2_zero = g.central_counts / g.mean_side_counts;
    double rel_central = g.central_counts > 0.0 ? 1.0 / g.central_counts : 1.0;
    g.error = g.g2_zero * std::sqrt(rel_central + 1.0 / side);
    if (g.central_counts == 0.0) g.error = 1.0 / g.mean_side_counts;
    g.purity = g.g2_zero - 1.0;
    return g;
}

struct CarEstimate {
    double car = 0.0;
    double coincidences = 0.0;
    double accidentals = 0.0;  // mean of the two +-1 period windows
};

/// Coincidence-to-accidental ratio with a full-width coincidence window.
inline CarEstimate car(const TimeTagStream &stream, std::uint32_t signal_channel, std::uint32_t idler_channel,
                       double rep_period_ps, double window_ps) {
    if (!(window_ps > 0.0 && window_ps < 0.5 * rep_period_ps)) {
        throw Error(ErrorKind::InvalidArgument, "coincidence window must lie in (0, period/2)");
    }
    CoincidenceHistogram h = histogram_coincidences(stream, signal_channel, idler_channel, 1.0,
                                                    rep_period_ps + 0.5 * window_ps + 1.0);
    CarEstimate c;
    c.coincidences = detail::window_sum(h, 0.0, 0.5 * window_ps);
    c.accidentals = 0.5 * (detail::window_sum(h, rep_period_ps, 0.5 * window_ps) +
                           detail::window_sum(h, -rep_period_ps, 0.5 * window_ps));
    if (!(c.accidentals > 0.0)) throw Error(ErrorKind::EmptySidePeaks, "no accidental coincidences; CAR undefined");
    c.car = c.coincidences / c.accidentals;
    return c;
}

/// Bhattacharyya fidelity (sum sqrt(p q))^2 of grids normalised to unit sum.
inline double fidelity(const Eigen::MatrixXd &p, const Eigen::MatrixXd &q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error(ErrorKind::ShapeMismatch, "fidelity needs equal shapes");
    if (p.size() == 0) throw Error(ErrorKind::ShapeMismatch, "empty grids");
    if (p.minCoeff() < 0.0 || q.minCoeff() < 0.0) throw Error(ErrorKind::NegativeIntensity, "fidelity needs non-negative grids");
    double sp = p.sum(), sq = q.sum();
    if (!(sp > 0.0 && sq > 0.0)) throw Error(ErrorKind::EmptySupport, "fidelity of an all-zero grid");
    double bc = (p.array() * q.array()).sqrt().sum() / std::sqrt(sp * sq);
    return std::min(1.0, bc * bc);
}

inline double fidelity(const PhaseMatchGrid &p, const PhaseMatchGrid &q) { return fidelity(p.values, q.values); }

namespace detail {

/// Fraction of source cell [a0, a1) overlapping each target cell, as (index, weight) pairs.
inline std::vector<std::pair<std::size_t, double>> cell_overlaps(double a0, double a1, const UniformAxis &target) {
    std::vector<std::pair<std::size_t, double>> out;
    double width = a1 - a0;
    long first = static_cast<long>(std::floor((a0 - target.lower_edge()) / target.step));
    long last = static_cast<long>(std::floor((a1 - target.lower_edge()) / target.step));
    for (long t = std::max(0L, first); t <= std::min(last, static_cast<long>(target.size) - 1); ++t) {
        double lo = std::max(a0, target.lower_edge() + target.step * static_cast<double>(t));
        double hi = std::min(a1, target.lower_edge() + target.step * static_cast<double>(t + 1));
        if (hi > lo) out.emplace_back(static_cast<std::size_t>(t), (hi - lo) / width);
    }
    return out;
}

}  // namespace detail

/// Redistributes a cell-integrated grid onto new cells in proportion to
/// overlap, treating each source cell as uniformly filled. Mass outside the
/// target range is dropped.
inline PhaseMatchGrid rebin(const PhaseMatchGrid &src, const UniformAxis &signal, const UniformAxis &idler) {
    PhaseMatchGrid out{signal, idler,
                       Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(signal.size), static_cast<Eigen::Index>(idler.size)),
                       true};
    std::vector<std::vector<std::pair<std::size_t, double>>> col_map(src.idler.size);
    for (std::size_t c = 0; c < src.idler.size; ++c) {
        double x = src.idler[c];
        col_map[c] = detail::cell_overlaps(x - 0.5 * src.idler.step, x + 0.5 * src.idler.step, idler);
    }
    for (std::size_t r = 0; r < src.signal.size; ++r) {
        double y = src.signal[r];
        auto rows = detail::cell_overlaps(y - 0.5 * src.signal.step, y + 0.5 * src.signal.step, signal);
        for (const auto &[tr, wr] : rows) {
            for (std::size_t c = 0; c < src.idler.size; ++c) {
                double v = src.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * wr;
                if (v == 0.0) continue;
                for (const auto &[tc, wc] : col_map[c]) {
                    out.values(static_cast<Eigen::Index>(tr), static_cast<Eigen::Index>(tc)) += v * wc;
                }
            }
        }
    }
    return out;
}

/// Histogram bins: n cells tiling [lo, hi).
struct BinSpec {
    double lo_nm;
    double hi_nm;
    std::size_t n;

    UniformAxis axis() const { return UniformAxis::from_edges(lo_nm, hi_nm, n); }
};

/// Where the wavelength scale is anchored.
/// Centroid: the mean delay of the analysed events maps to the reference
/// wavelength (supply the marginal centre). TriggerZero: zero delay from the
/// trigger maps to the reference wavelength.
enum class AnchorMode { Centroid, TriggerZero };

struct ChannelCalibration {
    std::uint32_t channel = 0;
    double dispersion_ps_per_nm = 510.0;
    double reference_nm = 1550.0;
};

struct JsiReconstructionOptions {
    AnchorMode anchor = AnchorMode::Centroid;
    std::optional<Bandpass> signal_mask;
    std::optional<Bandpass> idler_mask;
};

struct ReconstructedJsi {
    PhaseMatchGrid jsi;
    std::uint64_t pairs_used = 0;
    std::uint64_t pulses_with_pair = 0;
    double signal_offset_ps = 0.0;
    double idler_offset_ps = 0.0;
};

namespace detail {

/// Per trigger, delay of the first event of `channel` whose nearest trigger it is.
/// Empty optional where the pulse has no such event.
inline std::vector<std::optional<double>> first_delay_per_pulse(const std::vector<std::uint64_t> &triggers,
                                                                const std::vector<std::uint64_t> &events) {
    std::vector<std::optional<double>> out(triggers.size());
    std::size_t t = 0;
    for (std::uint64_t e : events) {
        const auto ie = static_cast<std::int64_t>(e);
        while (t + 1 < triggers.size() &&
               std::abs(static_cast<std::int64_t>(triggers[t + 1]) - ie) <=
                   std::abs(ie - static_cast<std::int64_t>(triggers[t]))) {
            ++t;
        }
        if (!out[t]) out[t] = static_cast<double>(static_cast<std::int64_t>(e) - static_cast<std::int64_t>(triggers[t]));
    }
    return out;
}

inline void check_calibration(const ChannelCalibration &c) {
    if (c.dispersion_ps_per_nm == 0.0 || !std::isfinite(c.dispersion_ps_per_nm)) {
        throw Error(ErrorKind::ZeroDispersion, "dispersion must be finite and non-zero");
    }
}

inline std::vector<std::uint64_t> trigger_times(const TimeTagStream &stream, std::uint32_t trigger) {
    std::vector<std::uint64_t> t = stream.times(trigger);
    if (t.empty()) throw Error(ErrorKind::MissingTrigger, "stream has no trigger events");
    return t;
}

}  // namespace detail

/// Dispersive time-of-flight JSI: per pulse, the first signal and first idler
/// event (assigned to their nearest trigger) give delays that map linearly to
/// wavelength. Absolute wavelengths come only from the supplied references.
inline ReconstructedJsi reconstruct_jsi(const TimeTagStream &stream, std::uint32_t trigger_channel,
                                        const ChannelCalibration &signal, const ChannelCalibration &idler,
                                        const BinSpec &signal_bins, const BinSpec &idler_bins,
                                        const JsiReconstructionOptions &options = {}) {
    detail::check_calibration(signal);
    detail::check_calibration(idler);
    stream.check_channel(signal.channel);
    stream.check_channel(idler.channel);
    auto triggers = detail::trigger_times(stream, trigger_channel);
    auto ds = detail::first_delay_per_pulse(triggers, stream.times(signal.channel));
    auto di = detail::first_delay_per_pulse(triggers, stream.times(idler.channel));

    ReconstructedJsi out;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t p = 0; p < triggers.size(); ++p) {
        if (ds[p] && di[p]) pairs.emplace_back(*ds[p], *di[p]);
    }
    out.pulses_with_pair = pairs.size();
    if (options.anchor == AnchorMode::Centroid && !pairs.empty()) {
        double ms = 0.0, mi = 0.0;
        for (const auto &[a, b] : pairs) {
            ms += a;
            mi += b;
        }
        out.signal_offset_ps = ms / static_cast<double>(pairs.size());
        out.idler_offset_ps = mi / static_cast<double>(pairs.size());
    }
    UniformAxis sa = signal_bins.axis();
    UniformAxis ia = idler_bins.axis();
    out.jsi = PhaseMatchGrid{sa, ia, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sa.size), static_cast<Eigen::Index>(ia.size)), true};
    for (const auto &[a, b] : pairs) {
        double ls = signal.reference_nm + (a - out.signal_offset_ps) / signal.dispersion_ps_per_nm;
        double li = idler.reference_nm + (b - out.idler_offset_ps) / idler.dispersion_ps_per_nm;
        if (options.signal_mask && !options.signal_mask->passes(ls)) continue;
        if (options.idler_mask && !options.idler_mask->passes(li)) continue;
        long r = sa.cell_of(ls);
        long c = ia.cell_of(li);
        if (r < 0 || c < 0) continue;
        out.jsi.values(r, c) += 1.0;
        ++out.pairs_used;
    }
    return out;
}

/// One-channel spectrum from the first event per pulse. With `paired_with`
/// set, only pulses that also contain an event on that channel count, which
/// is the population reconstruct_jsi uses.
inline std::vector<double> reconstruct_marginal(const TimeTagStream &stream, std::uint32_t trigger_channel,
                                                const ChannelCalibration &cal, const BinSpec &bins,
                                                double offset_ps = 0.0,
                                                std::optional<std::uint32_t> paired_with = std::nullopt) {
    detail::check_calibration(cal);
    stream.check_channel(cal.channel);
    auto triggers = detail::trigger_times(stream, trigger_channel);
    auto d = detail::first_delay_per_pulse(triggers, stream.times(cal.channel));
    std::vector<std::optional<double>> partner;
    if (paired_with) {
        stream.check_channel(*paired_with);
        partner = detail::first_delay_per_pulse(triggers, stream.times(*paired_with));
    }
    UniformAxis axis = bins.axis();
    std::vector<double> hist(axis.size, 0.0);
    for (std::size_t p = 0; p < triggers.size(); ++p) {
        if (!d[p] || (paired_with && !partner[p])) continue;
        long cell = axis.cell_of(cal.reference_nm + (*d[p] - offset_ps) / cal.dispersion_ps_per_nm);
        if (cell >= 0) hist[static_cast<std::size_t>(cell)] += 1.0;
    }
    return hist;
}

}  // namespace cpspdc

#endif
