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

#ifndef CPSPDC_INTERFERENCE_HPP
#define CPSPDC_INTERFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/jsa.hpp"
#include "cpspdc/parallel.hpp"
#include "cpspdc/phasematch.hpp"
#include "cpspdc/units.hpp"

namespace cpspdc {

/// Coincidences normalised so that classical random splitting is 1.
/// Raw coincidence probability at a balanced splitter is value / 2.
struct HomCurve {
    std::vector<double> x;
    std::vector<double> values;
    std::string x_label = "delay_ps";
};

struct Visibility {
    double value = 0.0;
    bool clamped = false;
};

/// V = 1 - min(values), clamped into [0, 1].
inline Visibility visibility(const HomCurve &curve) {
    if (curve.values.empty()) throw Error(ErrorKind::EmptyCurve, "visibility of an empty curve");
    double lo = *std::min_element(curve.values.begin(), curve.values.end());
    Visibility v{1.0 - lo, false};
    if (v.value > 1.0) v = {1.0, true};
    if (v.value < 0.0) v = {0.0, true};
    return v;
}

/// Same curve with the x axis re-expressed as free-space path length in mm.
inline HomCurve delay_to_path(HomCurve curve, double offset_mm = 0.0) {
    for (double &x : curve.x) x = path_mm_from_delay_ps(x, offset_mm);
    curve.x_label = "path_mm";
    return curve;
}

inline HomCurve path_to_delay(HomCurve curve, double offset_mm = 0.0) {
    for (double &x : curve.x) x = delay_ps_from_path_mm(x, offset_mm);
    curve.x_label = "delay_ps";
    return curve;
}

/// Frequency-entangled two-photon amplitude A(Omega) sampled on a grid that is
/// symmetric about zero (sample j and n-1-j are +-Omega).
struct DetuningAmplitude {
    std::vector<double> omega;  // rad/ps
    std::vector<cdouble> amplitude;
};

/// N(tau) = 1 - Re[sum A(W) A*(-W) exp(2iW tau) / sum |A(W)|^2].
inline HomCurve hom_dip_from_amplitude(const DetuningAmplitude &a, const std::vector<double> &delays_ps) {
    const std::size_t n = a.omega.size();
    if (n == 0 || n != a.amplitude.size()) throw Error(ErrorKind::InvalidArgument, "malformed detuning amplitude");
    std::vector<cdouble> overlap(n);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        overlap[j] = a.amplitude[j] * std::conj(a.amplitude[n - 1 - j]);
        denom += std::norm(a.amplitude[j]);
    }
    if (!(denom > 0.0)) throw Error(ErrorKind::EmptySupport, "spectral amplitude is identically zero");
    HomCurve curve;
    curve.x = delays_ps;
    curve.values.resize(delays_ps.size());
    for (std::size_t t = 0; t < delays_ps.size(); ++t) {
        double tau = delays_ps[t];
        double re = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double phi = 2.0 * a.omega[j] * tau;
            re += overlap[j].real() * std::cos(phi) - overlap[j].imag() * std::sin(phi);
        }
        curve.values[t] = 1.0 - re / denom;
    }
    return curve;
}

/// PMF amplitude along the CW energy-conservation line of `pump_nm`:
/// signal at omega_p/2 + Omega, idler at omega_p/2 - Omega. The Omega grid spans
/// the largest symmetric range inside 2*lp +- detuning_nm.
inline DetuningAmplitude cw_detuning_amplitude(const DeviceSpec &device, double pump_nm, double detuning_nm,
                                               std::size_t grid_n) {
    device.validate();
    if (grid_n < 3) throw Error(ErrorKind::InvalidArgument, "detuning grid needs at least 3 points");
    double centre = 2.0 * pump_nm;
    if (!(detuning_nm > 0.0 && detuning_nm < centre)) {
        throw Error(ErrorKind::InvalidArgument, "detuning range must lie in (0, 2*pump)");
    }
    double w0 = 0.5 * angular_frequency(pump_nm);
    double wmax = w0 - angular_frequency(centre + detuning_nm);
    DetuningAmplitude a;
    a.omega.resize(grid_n);
    a.amplitude.resize(grid_n);
    double h = 2.0 * wmax / static_cast<double>(grid_n - 1);
    double peak = 0.0;
    for (std::size_t j = 0; j < grid_n; ++j) {
        double w = -wmax + h * static_cast<double>(j);
        a.omega[j] = w;
        double ls = wavelength_from_angular(w0 + w);
        double li = wavelength_from_angular(w0 - w);
        double v = pmf_amplitude(device, ls, li);
        a.amplitude[j] = v;
        peak = std::max(peak, v * v);
    }
    if (peak < detail::kMainLobeThreshold) {
        throw Error(ErrorKind::EmptySupport, "phase matching main lobe not inside the detuning range");
    }
    return a;
}

/// Single-source signal-idler HOM under a CW pump.
inline HomCurve hom_cw_dip(const DeviceSpec &device, double pump_nm, const std::vector<double> &delays_ps,
                           double detuning_nm = 10.0, std::size_t grid_n = 4097) {
    return hom_dip_from_amplitude(cw_detuning_amplitude(device, pump_nm, detuning_nm, grid_n), delays_ps);
}

/// Rows: pump wavelength; columns: delay.
struct HomMap {
    UniformAxis pump;
    UniformAxis delay;
    Eigen::MatrixXd values;
};

inline HomMap hom_map(const DeviceSpec &device, WavelengthRange pump_range, double delay_lo_ps,
                      double delay_hi_ps, std::size_t n_pump, std::size_t n_delay, double detuning_nm = 10.0,
                      std::size_t grid_n = 4097, unsigned threads = 0) {
    HomMap map;
    map.pump = UniformAxis::from_range(pump_range.lo_nm, pump_range.hi_nm, n_pump);
    map.delay = UniformAxis::from_range(delay_lo_ps, delay_hi_ps, n_delay);
    map.values.resize(static_cast<Eigen::Index>(n_pump), static_cast<Eigen::Index>(n_delay));
    const std::vector<double> delays = map.delay.values();
    parallel_for(
        n_pump,
        [&](std::size_t r) {
            HomCurve row = hom_cw_dip(device, map.pump[r], delays, detuning_nm, grid_n);
            for (std::size_t c = 0; c < n_delay; ++c) {
                map.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.values[c];
            }
        },
        threads);
    return map;
}

/// Column of the map nearest to `delay_ps`, as a curve over pump wavelength.
inline HomCurve hom_spectral_slice(const HomMap &map, double delay_ps) {
    if (delay_ps < map.delay.lower_edge() || delay_ps > map.delay.upper_edge()) {
        throw Error(ErrorKind::OutOfRange, "slice delay outside the map's delay range");
    }
    auto col = static_cast<Eigen::Index>(map.delay.nearest(delay_ps));
    HomCurve curve;
    curve.x_label = "pump_nm";
    curve.x = map.pump.values();
    curve.values.resize(map.pump.size);
    for (std::size_t r = 0; r < map.pump.size; ++r) curve.values[r] = map.values(static_cast<Eigen::Index>(r), col);
    return curve;
}

/// Heralded photons from two sources meeting at a balanced splitter:
/// N(tau) = 1 - Re sum rhoA(w, w') rhoB(w', w) exp(i (w - w') tau).
inline HomCurve heralded_two_source_hom(const DensityMatrix &rho_a, const DensityMatrix &rho_b,
                                        const std::vector<double> &delays_ps) {
    if (!rho_a.axis.same_as(rho_b.axis) || rho_a.values.rows() != rho_b.values.rows()) {
        throw Error(ErrorKind::AxisMismatch, "density matrices live on different axes");
    }
    for (const DensityMatrix *r : {&rho_a, &rho_b}) {
        if (std::abs(r->trace() - cdouble(1.0, 0.0)) > 1e-9) {
            throw Error(ErrorKind::NotNormalized, "density matrix trace must be 1");
        }
    }
    const auto n = rho_a.values.rows();
    Eigen::VectorXd omega(n);
    for (Eigen::Index j = 0; j < n; ++j) omega(j) = angular_frequency(rho_a.axis[static_cast<std::size_t>(j)]);
    // Elementwise product P(j, k) = rhoA(j, k) rhoB(k, j) carries all tau dependence
    // through exp(i (w_j - w_k) tau).
    Eigen::MatrixXcd prod = rho_a.values.cwiseProduct(rho_b.values.transpose());
    HomCurve curve;
    curve.x = delays_ps;
    curve.values.resize(delays_ps.size());
    Eigen::VectorXcd phase(n);
    for (std::size_t t = 0; t < delays_ps.size(); ++t) {
        double tau = delays_ps[t];
        for (Eigen::Index j = 0; j < n; ++j) phase(j) = std::polar(1.0, omega(j) * tau);
        cdouble s = phase.transpose() * prod * phase.conjugate();
        curve.values[t] = 1.0 - s.real();
    }
    return curve;
}

}  // namespace cpspdc

#endif
