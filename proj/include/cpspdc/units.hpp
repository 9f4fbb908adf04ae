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

#ifndef CPSPDC_UNITS_HPP
#define CPSPDC_UNITS_HPP

#include <numbers>

namespace cpspdc {

// Unit system: wavelengths in nm, propagation constants in rad/um, lengths of
// devices in um internally (mm at the config surface), time in ps, angular
// frequency in rad/ps.

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Speed of light in vacuum, nm/ps.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;

/// Free-space delay per mm of path, ps.
inline constexpr double kPsPerMm = 1.0e6 / kSpeedOfLightNmPerPs;

inline constexpr double nm_to_um(double nm) { return nm * 1.0e-3; }
inline constexpr double mm_to_um(double mm) { return mm * 1.0e3; }

/// Angular frequency (rad/ps) of a vacuum wavelength in nm. Self-inverse.
inline constexpr double angular_frequency(double wavelength_nm) {
    return kTwoPi * kSpeedOfLightNmPerPs / wavelength_nm;
}
inline constexpr double wavelength_from_angular(double omega_rad_per_ps) {
    return kTwoPi * kSpeedOfLightNmPerPs / omega_rad_per_ps;
}

/// Pump wavelength from energy conservation 1/lp = 1/ls + 1/li.
inline constexpr double pump_wavelength(double signal_nm, double idler_nm) {
    return 1.0 / (1.0 / signal_nm + 1.0 / idler_nm);
}

/// Partner wavelength 1/lx = 1/lp - 1/ly; the caller guarantees ly > lp.
inline constexpr double partner_wavelength(double pump_nm, double other_nm) {
    return 1.0 / (1.0 / pump_nm - 1.0 / other_nm);
}

inline constexpr double delay_ps_from_path_mm(double path_mm, double offset_mm = 0.0) {
    return (path_mm - offset_mm) * kPsPerMm;
}
inline constexpr double path_mm_from_delay_ps(double delay_ps, double offset_mm = 0.0) {
    return delay_ps / kPsPerMm + offset_mm;
}

}  // namespace cpspdc

#endif
