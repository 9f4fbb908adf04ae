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

#ifndef CPSPDC_DISPERSION_HPP
#define CPSPDC_DISPERSION_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

// Boost 1.74 pchip calls isnan unqualified; math.h puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "cpspdc/error.hpp"
#include "cpspdc/units.hpp"

namespace cpspdc {

/// One resonance B * l^2 / (l^2 - C), l in um, C in um^2.
struct SellmeierTerm {
    double strength = 0.0;
    double resonance_um2 = 0.0;
};

/// n^2 = constant + sum_j B_j l^2 / (l^2 - C_j) - ir_coefficient * l^2.
struct SellmeierCoefficients {
    double constant = 1.0;
    std::vector<SellmeierTerm> terms;
    double ir_coefficient_per_um2 = 0.0;

    double index_squared(double wavelength_um) const {
        double l2 = wavelength_um * wavelength_um;
        double n2 = constant - ir_coefficient_per_um2 * l2;
        for (const auto &t : terms) n2 += t.strength * l2 / (l2 - t.resonance_um2);
        return n2;
    }
};

struct TablePoint {
    double wavelength_nm;
    double n_eff;
};

enum class DispersionKind { Sellmeier, Table };

/// Effective index of one guided mode versus vacuum wavelength. Immutable.
/// Evaluation outside the valid range throws; there is no extrapolation.
class DispersionModel {
   public:
    static DispersionModel sellmeier(SellmeierCoefficients coefficients, double min_nm,
                                     double max_nm, double index_offset = 0.0,
                                     std::string label = "sellmeier") {
        DispersionModel m;
        m.kind_ = DispersionKind::Sellmeier;
        m.sellmeier_ = std::move(coefficients);
        m.min_nm_ = min_nm;
        m.max_nm_ = max_nm;
        m.offset_ = index_offset;
        m.label_ = std::move(label);
        if (!(max_nm > min_nm) || !(min_nm > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "sellmeier valid range must satisfy 0 < min < max");
        }
        m.check_above_unity();
        return m;
    }

    static DispersionModel table(std::vector<TablePoint> points, double index_offset = 0.0,
                                 std::string label = "table") {
        if (points.size() < 4) {
            throw Error(ErrorKind::MalformedTable,
                        "cubic interpolation needs at least 4 points, got " + std::to_string(points.size()));
        }
        std::vector<double> xs, ys;
        xs.reserve(points.size());
        ys.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!std::isfinite(points[i].wavelength_nm) || !std::isfinite(points[i].n_eff)) {
                throw Error(ErrorKind::MalformedTable, "non-finite entry at row " + std::to_string(i));
            }
            if (i > 0 && !(points[i].wavelength_nm > points[i - 1].wavelength_nm)) {
                throw Error(ErrorKind::MalformedTable, "wavelengths must be strictly increasing (row " +
                                                           std::to_string(i) + ")");
            }
            xs.push_back(points[i].wavelength_nm);
            ys.push_back(points[i].n_eff);
        }
        DispersionModel m;
        m.kind_ = DispersionKind::Table;
        m.min_nm_ = xs.front();
        m.max_nm_ = xs.back();
        m.offset_ = index_offset;
        m.label_ = std::move(label);
        m.points_ = std::move(points);
        m.spline_ = std::make_shared<const Spline>(std::move(xs), std::move(ys));
        m.check_above_unity();
        return m;
    }

    /// CSV with header `wavelength_nm,n_eff`.
    static DispersionModel from_csv(const std::string &path, double index_offset = 0.0) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Io, "cannot open dispersion table '" + path + "'");
        std::string line;
        if (!std::getline(in, line)) throw Error(ErrorKind::MalformedTable, "empty file '" + path + "'");
        line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
        if (line != "wavelength_nm,n_eff") {
            throw Error(ErrorKind::MalformedTable, "'" + path + "': expected header wavelength_nm,n_eff");
        }
        std::vector<TablePoint> pts;
        std::size_t row = 1;
        while (std::getline(in, line)) {
            ++row;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            TablePoint p{};
            if (!(ss >> p.wavelength_nm >> p.n_eff)) {
                throw Error(ErrorKind::MalformedTable, "'" + path + "': bad row " + std::to_string(row));
            }
            pts.push_back(p);
        }
        return table(std::move(pts), index_offset, path);
    }

    DispersionKind kind() const { return kind_; }
    double index_offset() const { return offset_; }
    double min_nm() const { return min_nm_; }
    double max_nm() const { return max_nm_; }
    const std::string &label() const { return label_; }
    const SellmeierCoefficients &sellmeier_coefficients() const { return sellmeier_; }
    const std::vector<TablePoint> &table_points() const { return points_; }

    bool in_range(double wavelength_nm) const {
        return wavelength_nm >= min_nm_ && wavelength_nm <= max_nm_;
    }

    /// Same model with `delta` added to the index offset.
    DispersionModel shifted(double delta) const {
        DispersionModel m = *this;
        m.offset_ += delta;
        return m;
    }

    double n_eff(double wavelength_nm) const {
        if (!in_range(wavelength_nm)) {
            std::ostringstream ss;
            ss.precision(12);
            ss << "wavelength " << wavelength_nm << " nm outside [" << min_nm_ << ", " << max_nm_
               << "] of " << label_;
            throw Error(ErrorKind::OutOfRange, ss.str());
        }
        return raw(wavelength_nm) + offset_;
    }

   private:
    using Spline = boost::math::interpolators::pchip<std::vector<double>>;

    double raw(double wavelength_nm) const {
        if (kind_ == DispersionKind::Sellmeier) {
            return std::sqrt(sellmeier_.index_squared(nm_to_um(wavelength_nm)));
        }
        return (*spline_)(wavelength_nm);
    }

    void check_above_unity() const {
        constexpr int kSamples = 512;
        for (int i = 0; i <= kSamples; ++i) {
            double l = min_nm_ + (max_nm_ - min_nm_) * i / kSamples;
            double n = raw(l) + offset_;
            if (!(n > 1.0)) {
                throw Error(ErrorKind::MalformedTable,
                            label_ + ": effective index must exceed 1 over the valid range");
            }
        }
        for (const auto &p : points_) {
            if (!(p.n_eff + offset_ > 1.0)) {
                throw Error(ErrorKind::MalformedTable, label_ + ": table index must exceed 1");
            }
        }
    }

    DispersionKind kind_ = DispersionKind::Sellmeier;
    SellmeierCoefficients sellmeier_;
    std::vector<TablePoint> points_;
    std::shared_ptr<const Spline> spline_;
    double min_nm_ = 0.0;
    double max_nm_ = 0.0;
    double offset_ = 0.0;
    std::string label_;
};

inline double n_eff(const DispersionModel &model, double wavelength_nm) {
    return model.n_eff(wavelength_nm);
}

/// k = 2 pi n / lambda in rad/um.
inline double propagation_constant(const DispersionModel &model, double wavelength_nm) {
    return kTwoPi * model.n_eff(wavelength_nm) / nm_to_um(wavelength_nm);
}

/// n_g = n - lambda dn/dlambda, central difference with `step_nm`.
inline double group_index(const DispersionModel &model, double wavelength_nm, double step_nm = 0.1) {
    double up = model.n_eff(wavelength_nm + step_nm);
    double down = model.n_eff(wavelength_nm - step_nm);
    double n = model.n_eff(wavelength_nm);
    return n - wavelength_nm * (up - down) / (2.0 * step_nm);
}

// Bulk 5 mol% MgO:congruent LiNbO3 at 24.5 C, temperature-dependent fit
// rewritten in resonance form. Valid roughly 500 nm to 4 um.

inline SellmeierCoefficients mgo_ln_extraordinary_coefficients() {
    return {2.139142446537866,
            {{2.4090775414175076, 0.040804}, {1.2077800120446265, 156.7504}},
            0.0132};
}

inline SellmeierCoefficients mgo_ln_ordinary_coefficients() {
    return {2.1815473036591113,
            {{2.710255813841791, 0.04372281}, {0.7611968824990974, 117.7225}},
            0.0197};
}

inline DispersionModel bulk_mgo_ln_extraordinary(double min_nm = 500.0, double max_nm = 4000.0) {
    return DispersionModel::sellmeier(mgo_ln_extraordinary_coefficients(), min_nm, max_nm, 0.0,
                                      "bulk MgO:LN extraordinary");
}

inline DispersionModel bulk_mgo_ln_ordinary(double min_nm = 500.0, double max_nm = 4000.0) {
    return DispersionModel::sellmeier(mgo_ln_ordinary_coefficients(), min_nm, max_nm, 0.0,
                                      "bulk MgO:LN ordinary");
}

/// Guided modes of one waveguide: "telecom" for signal/idler, "pump" for the pump.
struct ModeSet {
    DispersionModel telecom;
    DispersionModel pump;

    ModeSet shifted(double delta) const { return {telecom.shifted(delta), pump.shifted(delta)}; }
};

/// Pump-mode offset fixed so that the bundled third-order 1.18 um counter-propagating
/// device is degenerate at 775.0 nm.
inline constexpr double kBundledPumpOffset = -0.20019963503994953;

/// Calibrated, not measured. Bulk extraordinary index plus a constant offset.
inline DispersionModel bundled_pump_mode() {
    return DispersionModel::sellmeier(mgo_ln_extraordinary_coefficients(), 700.0, 850.0,
                                      kBundledPumpOffset, "bundled pump mode (calibrated)");
}

/// Calibrated, not measured. The enlarged IR term stands in for geometric
/// dispersion of the thin-film mode: n_eff(1550) ~ 1.85, n_g(1550) ~ 2.02.
inline DispersionModel bundled_telecom_mode() {
    SellmeierCoefficients c = mgo_ln_extraordinary_coefficients();
    c.ir_coefficient_per_um2 = 0.125;
    return DispersionModel::sellmeier(std::move(c), 1400.0, 1700.0, -0.217,
                                      "bundled telecom mode (calibrated)");
}

inline ModeSet bundled_modes() { return {bundled_telecom_mode(), bundled_pump_mode()}; }

}  // namespace cpspdc

#endif
