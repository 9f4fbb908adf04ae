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

#ifndef CPSPDC_PHASEMATCH_HPP
#define CPSPDC_PHASEMATCH_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpspdc/dispersion.hpp"
#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/parallel.hpp"
#include "cpspdc/units.hpp"

namespace cpspdc {

/// Signal co-propagates with the pump. In the counter-propagating geometry the
/// idler travels backwards, so its wavevector enters the mismatch with + sign.
enum class Geometry { CoPropagating, CounterPropagating };

inline std::string to_string(Geometry g) {
    return g == Geometry::CoPropagating ? "co_propagating" : "counter_propagating";
}

/// Optional multiplicative PMF ripple 1 + a cos(2 pi lp / period + phase), a
/// stand-in for weak pump-wavelength cavity effects. Off when amplitude == 0.
struct Ripple {
    double amplitude = 0.0;
    double period_nm = 1.0;
    double phase = 0.0;

    double factor(double pump_nm) const {
        if (amplitude == 0.0) return 1.0;
        return 1.0 + amplitude * std::cos(kTwoPi * pump_nm / period_nm + phase);
    }
};

struct DeviceSpec {
    Geometry geometry = Geometry::CounterPropagating;
    double poling_period_um = 1.18;
    int qpm_order = 3;
    double duty_cycle = 0.5;
    double length_mm = 5.0;
    ModeSet modes = bundled_modes();
    /// Per-device additive index detuning applied to all three waves.
    double index_offset = 0.0;
    Ripple ripple;

    void validate() const {
        if (!(poling_period_um > 0.0)) throw Error(ErrorKind::InvalidArgument, "poling period must be > 0");
        if (!(length_mm > 0.0)) throw Error(ErrorKind::InvalidArgument, "length must be > 0");
        if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "duty cycle must lie in (0, 1)");
        }
        if (qpm_order < 1) throw Error(ErrorKind::InvalidArgument, "QPM order must be >= 1");
    }

    double grating_wavevector() const { return kTwoPi * qpm_order / poling_period_um; }
    double length_um() const { return mm_to_um(length_mm); }
};

/// Third-order 1.18 um counter-propagating device on the bundled modes,
/// L = 5 mm (illustrative).
inline DeviceSpec bundled_device() { return DeviceSpec{}; }

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

namespace detail {

inline double wave_k(const DispersionModel &mode, double wavelength_nm, double extra_offset) {
    return kTwoPi * (mode.n_eff(wavelength_nm) + extra_offset) / nm_to_um(wavelength_nm);
}

}  // namespace detail

/// Phase mismatch in rad/um with the pump fixed by energy conservation.
inline double delta_k(const DeviceSpec &device, double signal_nm, double idler_nm) {
    double pump_nm = pump_wavelength(signal_nm, idler_nm);
    double kp = detail::wave_k(device.modes.pump, pump_nm, device.index_offset);
    double ks = detail::wave_k(device.modes.telecom, signal_nm, device.index_offset);
    double ki = detail::wave_k(device.modes.telecom, idler_nm, device.index_offset);
    double idler_sign = device.geometry == Geometry::CounterPropagating ? 1.0 : -1.0;
    return kp - ks + idler_sign * ki - device.grating_wavevector();
}

/// sinc(dk L / 2), times the ripple factor when one is configured.
inline double pmf_amplitude(const DeviceSpec &device, double signal_nm, double idler_nm) {
    double x = 0.5 * delta_k(device, signal_nm, idler_nm) * device.length_um();
    double a = sinc(x);
    if (device.ripple.amplitude != 0.0) a *= device.ripple.factor(pump_wavelength(signal_nm, idler_nm));
    return a;
}

inline double pmf_intensity(const DeviceSpec &device, double signal_nm, double idler_nm) {
    double a = pmf_amplitude(device, signal_nm, idler_nm);
    return a * a;
}

/// Rows follow the signal axis, columns the idler axis.
struct PhaseMatchGrid {
    UniformAxis signal;
    UniformAxis idler;
    Eigen::MatrixXd values;
    bool intensity = true;
};

struct WavelengthRange {
    double lo_nm;
    double hi_nm;
};

inline PhaseMatchGrid sfg_map(const DeviceSpec &device, WavelengthRange signal_range,
                              WavelengthRange idler_range, std::size_t grid_n, unsigned threads = 0) {
    device.validate();
    if (grid_n < 16) throw Error(ErrorKind::InvalidArgument, "grid_n must be >= 16");
    PhaseMatchGrid g;
    g.signal = UniformAxis::from_range(signal_range.lo_nm, signal_range.hi_nm, grid_n);
    g.idler = UniformAxis::from_range(idler_range.lo_nm, idler_range.hi_nm, grid_n);
    g.values.resize(static_cast<Eigen::Index>(grid_n), static_cast<Eigen::Index>(grid_n));
    parallel_for(
        grid_n,
        [&](std::size_t r) {
            for (std::size_t c = 0; c < grid_n; ++c) {
                g.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    pmf_intensity(device, g.signal[r], g.idler[c]);
            }
        },
        threads);
    return g;
}

struct MarginalSpectra {
    UniformAxis signal;
    std::vector<double> signal_values;
    UniformAxis idler;
    std::vector<double> idler_values;
};

namespace detail {

// First side lobe of sinc^2 peaks at 0.047; anything below this threshold means
// the main lobe was not sampled.
inline constexpr double kMainLobeThreshold = 0.05;

inline void normalize_peak(std::vector<double> &v, const char *what) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    if (peak < kMainLobeThreshold) {
        throw Error(ErrorKind::EmptySupport, std::string("no phase matching in the ") + what + " range");
    }
    for (double &x : v) x /= peak;
}

}  // namespace detail

/// CW-pumped single-photon spectra. Both axes span 2*lp +- detuning_nm; the
/// partner wavelength follows from energy conservation. Values are pointwise
/// PMF intensities (no density Jacobian), unit peak.
inline MarginalSpectra marginal_spectra_cw(const DeviceSpec &device, double pump_nm, double detuning_nm,
                                           std::size_t grid_n) {
    device.validate();
    if (!(detuning_nm > 0.0) || detuning_nm >= 2.0 * pump_nm) {
        throw Error(ErrorKind::InvalidArgument, "detuning range must be positive and below 2*pump");
    }
    double centre = 2.0 * pump_nm;
    MarginalSpectra out;
    out.signal = UniformAxis::from_range(centre - detuning_nm, centre + detuning_nm, grid_n);
    out.idler = out.signal;
    out.signal_values.resize(grid_n);
    out.idler_values.resize(grid_n);
    for (std::size_t j = 0; j < grid_n; ++j) {
        double ls = out.signal[j];
        out.signal_values[j] = pmf_intensity(device, ls, partner_wavelength(pump_nm, ls));
        double li = out.idler[j];
        out.idler_values[j] = pmf_intensity(device, partner_wavelength(pump_nm, li), li);
    }
    detail::normalize_peak(out.signal_values, "signal");
    detail::normalize_peak(out.idler_values, "idler");
    return out;
}

/// Amplitude factor of an m-th order, duty-cycle D grating relative to the
/// unpoled coefficient: (2 / (pi m)) sin(pi m D).
inline double qpm_effective_nonlinearity(int order, double duty_cycle) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "QPM order must be >= 1");
    if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "duty cycle must lie in (0, 1)");
    }
    // Integer multiples of pi/2 are special-cased so even orders at D = 0.5
    // vanish exactly rather than to ~1e-16.
    double arg = order * duty_cycle;
    double twice = 2.0 * arg;
    double s;
    if (twice == std::floor(twice)) {
        long q = static_cast<long>(twice) % 4;
        s = (q == 0 || q == 2) ? 0.0 : (q == 1 ? 1.0 : -1.0);
    } else {
        s = std::sin(kPi * arg);
    }
    return 2.0 / (kPi * order) * s;
}

inline double qpm_efficiency(int order, double duty_cycle) {
    double a = qpm_effective_nonlinearity(order, duty_cycle);
    return a * a;
}

namespace detail {

/// Bisection for a sign change of f on [lo, hi]. Stops when |f| < abs_tol or
/// the bracket collapses to floating-point resolution.
template <typename F>
double bisect(F &&f, double lo, double hi, double abs_tol, const std::string &what) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw Error(ErrorKind::NoRoot, what + ": no sign change in bracket");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        double fm = f(mid);
        if (std::abs(fm) < abs_tol) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Pump wavelength at which lambda_s = lambda_i = 2 lambda_p is phase matched.
inline double find_degenerate_pump(const DeviceSpec &device) {
    device.validate();
    const auto &pump = device.modes.pump;
    const auto &tel = device.modes.telecom;
    double lo = std::max(pump.min_nm(), 0.5 * tel.min_nm());
    double hi = std::min(pump.max_nm(), 0.5 * tel.max_nm());
    // Pull the ends in so the pump recomputed from 2*lp stays inside the range.
    lo += 1e-9 * lo;
    hi -= 1e-9 * hi;
    if (!(hi > lo)) throw Error(ErrorKind::NoRoot, "pump and telecom mode ranges do not overlap at degeneracy");
    auto f = [&](double lp) { return delta_k(device, 2.0 * lp, 2.0 * lp); };
    return detail::bisect(f, lo, hi, 1e-12, "degenerate pump");
}

/// Poling period (um) that phase matches degenerate emission at `pump_nm`
/// for the device's order and geometry.
inline double poling_period_for_degeneracy(const DeviceSpec &device, double pump_nm) {
    DeviceSpec d = device;
    d.poling_period_um = 1.0;
    double residual = delta_k(d, 2.0 * pump_nm, 2.0 * pump_nm) + d.grating_wavevector();
    if (!(residual > 0.0)) throw Error(ErrorKind::NoRoot, "degenerate mismatch has no positive grating solution");
    return kTwoPi * device.qpm_order / residual;
}

/// Device index_offset that moves the degenerate pump to `target_pump_nm`.
inline double index_offset_for_degenerate_pump(const DeviceSpec &device, double target_pump_nm) {
    auto f = [&](double offset) {
        DeviceSpec d = device;
        d.index_offset = offset;
        return delta_k(d, 2.0 * target_pump_nm, 2.0 * target_pump_nm);
    };
    return detail::bisect(f, -0.05, 0.05, 1e-13, "index offset");
}

}  // namespace cpspdc

#endif
