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

#ifndef CPSPDC_TAGSIM_HPP
#define CPSPDC_TAGSIM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpspdc/error.hpp"
#include "cpspdc/jsa.hpp"
#include "cpspdc/parallel.hpp"
#include "cpspdc/rng.hpp"
#include "cpspdc/tags.hpp"

namespace cpspdc {

/// Illustrative SNSPD defaults.
struct DetectorModel {
    double efficiency = 0.8;
    double jitter_sigma_ps = 25.0;
    double dark_count_rate_hz = 100.0;
    double dead_time_ps = 50000.0;

    static DetectorModel ideal() { return {1.0, 0.0, 0.0, 0.0}; }

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw Error(ErrorKind::InvalidArgument, "efficiency must lie in [0, 1]");
        if (!(jitter_sigma_ps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "jitter must be >= 0");
        if (!(dark_count_rate_hz >= 0.0)) throw Error(ErrorKind::InvalidArgument, "dark count rate must be >= 0");
        if (!(dead_time_ps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "dead time must be >= 0");
    }
};

/// Mean pair number per pulse; mode k of the Schmidt spectrum is thermal with
/// mean mu * lambda_k.
struct SourceBrightness {
    double mean_pairs_per_pulse = 0.003;
};

struct Bandpass {
    double center_nm = 1550.0;
    double width_nm = 12.0;

    bool passes(double wavelength_nm) const { return std::abs(wavelength_nm - center_nm) <= 0.5 * width_nm; }
};

/// How a pair's wavelengths are drawn. Pair numbers are always multimode
/// thermal over the Schmidt modes.
/// JointIntensity: (signal, idler) from |f|^2 rebuilt from the decomposition,
/// the correct single-pair joint law.
/// SchmidtModes: signal from |u_k|^2 and idler from |v_k|^2 of the pair's mode,
/// independently. This drops the cross terms between modes, so the sampled
/// joint spectrum is sum_k lambda_k |u_k|^2 |v_k|^2 rather than |f|^2.
enum class SpectralSampling { SchmidtModes, JointIntensity };

/// t = pulse time + D (lambda - lambda_ref) + jitter.
inline double photon_arrival_ps(double pulse_time_ps, double dispersion_ps_per_nm, double wavelength_nm,
                                double reference_nm, double jitter_ps = 0.0) {
    return pulse_time_ps + dispersion_ps_per_nm * (wavelength_nm - reference_nm) + jitter_ps;
}

struct PairSimulationConfig {
    SourceBrightness brightness;
    std::uint64_t pulses = 100000;
    double repetition_period_ps = 12500.0;
    DetectorModel signal_detector;
    DetectorModel idler_detector;
    double signal_dispersion_ps_per_nm = 510.0;  // 17 ps/nm/km x 30 km
    double idler_dispersion_ps_per_nm = 510.0;
    double signal_reference_nm = 1550.0;
    double idler_reference_nm = 1550.0;
    std::optional<Bandpass> signal_filter;
    std::optional<Bandpass> idler_filter;
    SpectralSampling sampling = SpectralSampling::JointIntensity;
    bool dither_within_cell = true;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::array<std::string, 3> channel_names{"trigger", "signal", "idler"};
};

struct G2SimulationConfig {
    SourceBrightness brightness;
    std::uint64_t pulses = 1000000;
    double repetition_period_ps = 12500.0;
    double splitter_ratio = 0.5;
    DetectorModel detector1;
    DetectorModel detector2;
    Arm arm = Arm::Idler;
    std::optional<Bandpass> filter;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::array<std::string, 3> channel_names{"trigger", "d1", "d2"};
};

namespace detail {

inline constexpr std::uint64_t kPulsesPerBlock = 1u << 16;
inline constexpr double kNegligibleMode = 1e-12;

/// Discrete distribution sampled by inverse CDF.
class CdfTable {
   public:
    CdfTable() = default;
    explicit CdfTable(const std::vector<double> &weights) : cdf_(weights.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            cdf_[i] = acc;
        }
        for (double &c : cdf_) c /= acc;
    }
    std::size_t sample(double u) const {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) return cdf_.size() - 1;
        return static_cast<std::size_t>(it - cdf_.begin());
    }

   private:
    std::vector<double> cdf_;
};

/// Per-pulse multimode thermal photon numbers. One uniform draw decides the
/// (overwhelmingly common) empty pulse; otherwise the first occupied mode is
/// chosen from its exact conditional law and later modes are drawn freely.
class ThermalModes {
   public:
    ThermalModes(const std::vector<double> &coefficients, double mu) {
        if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidBrightness, "mean pair number must be finite and >= 0");
        double prefix = 1.0;
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            double m = mu * coefficients[k];
            if (coefficients[k] < kNegligibleMode || m <= 0.0) continue;
            double q = 1.0 / (1.0 + m);
            modes_.push_back(k);
            means_.push_back(m);
            first_cdf_.push_back((first_cdf_.empty() ? 0.0 : first_cdf_.back()) + prefix * (1.0 - q));
            prefix *= q;
        }
        empty_ = prefix;
    }

    /// Fills counts (indexed like modes()) and returns the total pair number.
    std::uint64_t draw(CounterRng &rng, std::vector<std::uint64_t> &counts) const {
        counts.assign(modes_.size(), 0);
        double u = rng.uniform();
        if (modes_.empty() || u < empty_) return 0;
        double v = u - empty_;
        auto it = std::upper_bound(first_cdf_.begin(), first_cdf_.end(), v);
        std::size_t j = it == first_cdf_.end() ? modes_.size() - 1 : static_cast<std::size_t>(it - first_cdf_.begin());
        std::uint64_t total = 0;
        counts[j] = 1 + rng.thermal(means_[j]);
        total += counts[j];
        for (std::size_t k = j + 1; k < modes_.size(); ++k) {
            counts[k] = rng.thermal(means_[k]);
            total += counts[k];
        }
        return total;
    }

    const std::vector<std::size_t> &modes() const { return modes_; }
    double empty_probability() const { return empty_; }

   private:
    std::vector<std::size_t> modes_;
    std::vector<double> means_;
    std::vector<double> first_cdf_;
    double empty_ = 1.0;
};

inline std::vector<double> mode_weights(const Eigen::MatrixXcd &modes, Eigen::Index k) {
    std::vector<double> w(static_cast<std::size_t>(modes.rows()));
    for (Eigen::Index r = 0; r < modes.rows(); ++r) w[static_cast<std::size_t>(r)] = std::norm(modes(r, k));
    return w;
}

inline double cell_wavelength(const UniformAxis &axis, std::size_t cell, CounterRng &rng, bool dither) {
    double u = rng.uniform();
    return axis[cell] + (dither ? (u - 0.5) * axis.step : 0.0);
}

inline std::uint64_t to_tag_time(double t_ps) {
    if (!(t_ps > 0.0)) return 0;
    return static_cast<std::uint64_t>(std::llround(t_ps));
}

inline void add_darks(std::vector<TagEvent> &out, CounterRng &rng, const DetectorModel &det, std::uint32_t channel,
                      double pulse_time, double period) {
    std::uint64_t n = rng.poisson(det.dark_count_rate_hz * period * 1e-12);
    for (std::uint64_t d = 0; d < n; ++d) {
        out.push_back({channel, to_tag_time(pulse_time - 0.5 * period + rng.uniform() * period)});
    }
}

/// Sort by (time, channel) then drop events inside each detector's dead time.
inline void finalize_stream(std::vector<TagEvent> &events, const std::vector<double> &dead_time_by_channel) {
    std::sort(events.begin(), events.end(), tag_less);
    std::vector<std::int64_t> last(dead_time_by_channel.size(), -1);
    std::vector<TagEvent> kept;
    kept.reserve(events.size());
    for (const auto &e : events) {
        double dead = dead_time_by_channel[e.channel];
        if (dead > 0.0 && last[e.channel] >= 0 &&
            static_cast<double>(e.time_ps - static_cast<std::uint64_t>(last[e.channel])) < dead) {
            continue;
        }
        last[e.channel] = static_cast<std::int64_t>(e.time_ps);
        kept.push_back(e);
    }
    events.swap(kept);
}

template <typename PulseFn>
std::vector<TagEvent> run_pulse_blocks(std::uint64_t pulses, unsigned threads, PulseFn &&pulse_fn) {
    std::uint64_t blocks = (pulses + kPulsesPerBlock - 1) / kPulsesPerBlock;
    std::vector<std::vector<TagEvent>> per_block(blocks);
    parallel_for(
        blocks,
        [&](std::size_t b) {
            std::uint64_t lo = b * kPulsesPerBlock;
            std::uint64_t hi = std::min(pulses, lo + kPulsesPerBlock);
            auto &out = per_block[b];
            for (std::uint64_t p = lo; p < hi; ++p) pulse_fn(p, out);
        },
        threads);
    std::size_t total = 0;
    for (const auto &v : per_block) total += v.size();
    std::vector<TagEvent> events;
    events.reserve(total);
    for (auto &v : per_block) {
        events.insert(events.end(), v.begin(), v.end());
        std::vector<TagEvent>().swap(v);
    }
    return events;
}

}  // namespace detail

/// Heralded-pair tags for the dispersive time-of-flight JSI measurement.
/// Pulse n has its trigger at (n + 1) * period; output is sorted and depends
/// only on (decomposition, config) including the seed, not on threads.
inline TimeTagStream simulate_pair_tags(const SchmidtDecomposition &schmidt, const PairSimulationConfig &cfg) {
    if (cfg.pulses < 1) throw Error(ErrorKind::InvalidArgument, "need at least one pulse");
    if (!(cfg.repetition_period_ps > 0.0)) throw Error(ErrorKind::InvalidArgument, "repetition period must be > 0");
    cfg.signal_detector.validate();
    cfg.idler_detector.validate();
    const double mu = cfg.brightness.mean_pairs_per_pulse;
    detail::ThermalModes thermal(schmidt.coefficients, mu);

    std::vector<detail::CdfTable> signal_cdf, idler_cdf;
    detail::CdfTable joint_cdf;
    if (cfg.sampling == SpectralSampling::SchmidtModes) {
        for (std::size_t k : thermal.modes()) {
            signal_cdf.emplace_back(detail::mode_weights(schmidt.signal_modes, static_cast<Eigen::Index>(k)));
            idler_cdf.emplace_back(detail::mode_weights(schmidt.idler_modes, static_cast<Eigen::Index>(k)));
        }
    } else {
        Eigen::MatrixXd jsi = schmidt.reconstruct().cwiseAbs2();
        std::vector<double> w(static_cast<std::size_t>(jsi.size()));
        for (Eigen::Index r = 0; r < jsi.rows(); ++r) {
            for (Eigen::Index c = 0; c < jsi.cols(); ++c) w[static_cast<std::size_t>(r * jsi.cols() + c)] = jsi(r, c);
        }
        joint_cdf = detail::CdfTable(w);
    }
    const auto n_idler = static_cast<std::size_t>(schmidt.idler.size);
    const double period = cfg.repetition_period_ps;

    auto pulse_fn = [&](std::uint64_t pulse, std::vector<TagEvent> &out) {
        CounterRng rng(cfg.seed, pulse);
        double t0 = static_cast<double>(pulse + 1) * period;
        out.push_back({0, detail::to_tag_time(t0)});
        std::vector<std::uint64_t> counts;
        thermal.draw(rng, counts);
        for (std::size_t m = 0; m < counts.size(); ++m) {
            for (std::uint64_t pair = 0; pair < counts[m]; ++pair) {
                double ls, li;
                if (cfg.sampling == SpectralSampling::SchmidtModes) {
                    ls = detail::cell_wavelength(schmidt.signal, signal_cdf[m].sample(rng.uniform()), rng,
                                                 cfg.dither_within_cell);
                    li = detail::cell_wavelength(schmidt.idler, idler_cdf[m].sample(rng.uniform()), rng,
                                                 cfg.dither_within_cell);
                } else {
                    std::size_t cell = joint_cdf.sample(rng.uniform());
                    ls = detail::cell_wavelength(schmidt.signal, cell / n_idler, rng, cfg.dither_within_cell);
                    li = detail::cell_wavelength(schmidt.idler, cell % n_idler, rng, cfg.dither_within_cell);
                }
                struct Photon {
                    double wavelength;
                    const DetectorModel *det;
                    double dispersion;
                    double reference;
                    const std::optional<Bandpass> *filter;
                    std::uint32_t channel;
                };
                const Photon photons[2] = {
                    {ls, &cfg.signal_detector, cfg.signal_dispersion_ps_per_nm, cfg.signal_reference_nm,
                     &cfg.signal_filter, 1},
                    {li, &cfg.idler_detector, cfg.idler_dispersion_ps_per_nm, cfg.idler_reference_nm,
                     &cfg.idler_filter, 2},
                };
                for (const auto &ph : photons) {
                    // Fixed draw pattern per photon keeps the stream addressable.
                    double survive = rng.uniform();
                    double jitter = ph.det->jitter_sigma_ps > 0.0 ? ph.det->jitter_sigma_ps * rng.normal() : 0.0;
                    if (survive >= ph.det->efficiency) continue;
                    if (ph.filter->has_value() && !(*ph.filter)->passes(ph.wavelength)) continue;
                    double t = photon_arrival_ps(t0, ph.dispersion, ph.wavelength, ph.reference, jitter);
                    out.push_back({ph.channel, detail::to_tag_time(t)});
                }
            }
        }
        detail::add_darks(out, rng, cfg.signal_detector, 1, t0, period);
        detail::add_darks(out, rng, cfg.idler_detector, 2, t0, period);
    };

    TimeTagStream stream;
    stream.repetition_period_ps = static_cast<std::uint64_t>(std::llround(period));
    stream.channel_names.assign(cfg.channel_names.begin(), cfg.channel_names.end());
    stream.seed = cfg.seed;
    stream.events = detail::run_pulse_blocks(cfg.pulses, cfg.threads, pulse_fn);
    detail::finalize_stream(stream.events, {0.0, cfg.signal_detector.dead_time_ps, cfg.idler_detector.dead_time_ps});
    return stream;
}

/// Unheralded autocorrelation tags: one arm's photons split at a beamsplitter
/// onto two detectors (channel 1 with probability splitter_ratio).
inline TimeTagStream simulate_g2_tags(const SchmidtDecomposition &schmidt, const G2SimulationConfig &cfg) {
    if (cfg.pulses < 1) throw Error(ErrorKind::InvalidArgument, "need at least one pulse");
    if (!(cfg.splitter_ratio >= 0.0 && cfg.splitter_ratio <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "splitter ratio must lie in [0, 1]");
    }
    cfg.detector1.validate();
    cfg.detector2.validate();
    detail::ThermalModes thermal(schmidt.coefficients, cfg.brightness.mean_pairs_per_pulse);
    const Eigen::MatrixXcd &modes = cfg.arm == Arm::Signal ? schmidt.signal_modes : schmidt.idler_modes;
    const UniformAxis &axis = cfg.arm == Arm::Signal ? schmidt.signal : schmidt.idler;
    std::vector<detail::CdfTable> cdf;
    if (cfg.filter) {
        for (std::size_t k : thermal.modes()) cdf.emplace_back(detail::mode_weights(modes, static_cast<Eigen::Index>(k)));
    }
    const double period = cfg.repetition_period_ps;

    auto pulse_fn = [&](std::uint64_t pulse, std::vector<TagEvent> &out) {
        CounterRng rng(cfg.seed, pulse);
        double t0 = static_cast<double>(pulse + 1) * period;
        out.push_back({0, detail::to_tag_time(t0)});
        std::vector<std::uint64_t> counts;
        thermal.draw(rng, counts);
        for (std::size_t m = 0; m < counts.size(); ++m) {
            for (std::uint64_t ph = 0; ph < counts[m]; ++ph) {
                if (cfg.filter) {
                    double l = detail::cell_wavelength(axis, cdf[m].sample(rng.uniform()), rng, true);
                    if (!cfg.filter->passes(l)) continue;
                }
                bool to_first = rng.uniform() < cfg.splitter_ratio;
                const DetectorModel &det = to_first ? cfg.detector1 : cfg.detector2;
                double survive = rng.uniform();
                double jitter = det.jitter_sigma_ps > 0.0 ? det.jitter_sigma_ps * rng.normal() : 0.0;
                if (survive >= det.efficiency) continue;
                out.push_back({to_first ? 1u : 2u, detail::to_tag_time(t0 + jitter)});
            }
        }
        detail::add_darks(out, rng, cfg.detector1, 1, t0, period);
        detail::add_darks(out, rng, cfg.detector2, 2, t0, period);
    };

    TimeTagStream stream;
    stream.repetition_period_ps = static_cast<std::uint64_t>(std::llround(period));
    stream.channel_names.assign(cfg.channel_names.begin(), cfg.channel_names.end());
    stream.seed = cfg.seed;
    stream.events = detail::run_pulse_blocks(cfg.pulses, cfg.threads, pulse_fn);
    detail::finalize_stream(stream.events, {0.0, cfg.detector1.dead_time_ps, cfg.detector2.dead_time_ps});
    return stream;
}

/// Schmidt decomposition with prescribed coefficients and unit-vector modes on
/// a small synthetic axis; a source model for photon-statistics studies.
inline SchmidtDecomposition synthetic_schmidt(const std::vector<double> &coefficients) {
    const auto k = static_cast<Eigen::Index>(coefficients.size());
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "need at least one Schmidt coefficient");
    double sum = 0.0;
    for (double c : coefficients) {
        if (!(c >= 0.0)) throw Error(ErrorKind::InvalidArgument, "Schmidt coefficients must be >= 0");
        sum += c;
    }
    SchmidtDecomposition s;
    s.signal = UniformAxis{1550.0, 1.0, static_cast<std::size_t>(k)};
    s.idler = s.signal;
    s.signal_modes = Eigen::MatrixXcd::Identity(k, k);
    s.idler_modes = Eigen::MatrixXcd::Identity(k, k);
    std::vector<std::size_t> order(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coefficients[a] > coefficients[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
        double l = coefficients[order[i]] / sum;
        s.coefficients.push_back(l);
        s.singular_values.push_back(std::sqrt(l));
    }
    return s;
}

/// Two-mode spectrum {l, 1 - l} with purity l^2 + (1 - l)^2 = target (0.5 <= target <= 1).
inline std::vector<double> two_mode_spectrum_for_purity(double target) {
    if (!(target >= 0.5 && target <= 1.0)) throw Error(ErrorKind::InvalidArgument, "two modes reach purity in [0.5, 1] only");
    double l = 0.5 * (1.0 + std::sqrt(2.0 * target - 1.0));
    return {l, 1.0 - l};
}

}  // namespace cpspdc

#endif
