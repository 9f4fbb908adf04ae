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

#ifndef CPSPDC_JSA_HPP
#define CPSPDC_JSA_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/parallel.hpp"
#include "cpspdc/phasematch.hpp"

namespace cpspdc {

using cdouble = std::complex<double>;

enum class PumpKind { Cw, Pulsed };

struct PumpSpec {
    PumpKind kind = PumpKind::Pulsed;
    double center_nm = 774.0;
    double fwhm_nm = 1.1;
    double repetition_rate_mhz = 80.0;
    double average_power_mw = 2.0;  // bookkeeping only

    static PumpSpec cw(double center_nm) {
        PumpSpec p;
        p.kind = PumpKind::Cw;
        p.center_nm = center_nm;
        p.fwhm_nm = 0.0;
        p.repetition_rate_mhz = 0.0;
        return p;
    }

    static PumpSpec pulsed(double center_nm, double fwhm_nm, double repetition_rate_mhz = 80.0) {
        PumpSpec p;
        p.center_nm = center_nm;
        p.fwhm_nm = fwhm_nm;
        p.repetition_rate_mhz = repetition_rate_mhz;
        p.validate();
        return p;
    }

    void validate() const {
        if (!(center_nm > 0.0)) throw Error(ErrorKind::InvalidArgument, "pump centre must be > 0");
        if (kind == PumpKind::Pulsed && !(fwhm_nm > 0.0 && repetition_rate_mhz > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "pulsed pump needs fwhm > 0 and repetition rate > 0");
        }
    }

    /// Time between pulses in ps (12500 ps at 80 MHz).
    double repetition_period_ps() const { return 1.0e6 / repetition_rate_mhz; }
};

/// Gaussian spectral envelope with unit peak; sigma = fwhm / (2 sqrt(2 ln 2)).
inline cdouble pump_envelope(const PumpSpec &pump, double pump_nm) {
    if (pump.kind != PumpKind::Pulsed) throw Error(ErrorKind::CwHasNoEnvelope, "CW pump has no spectral envelope");
    double sigma = pump.fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    double d = pump_nm - pump.center_nm;
    return {std::exp(-d * d / (2.0 * sigma * sigma)), 0.0};
}

/// f(lambda_s, lambda_i) on a uniform wavelength grid; rows follow the signal.
struct JointAmplitude {
    UniformAxis signal;
    UniformAxis idler;
    Eigen::MatrixXcd values;
    bool normalized = false;

    double cell_area() const { return signal.step * idler.step; }

    /// Riemann sum of |f|^2.
    double norm() const { return values.squaredNorm() * cell_area(); }

    void normalize() {
        double n = norm();
        if (!(n > 0.0)) throw Error(ErrorKind::EmptySupport, "cannot normalise an all-zero amplitude");
        values /= std::sqrt(n);
        normalized = true;
    }

    bool is_normalized(double tol = 1e-8) const { return normalized && std::abs(norm() - 1.0) <= tol; }
};

inline PhaseMatchGrid joint_intensity(const JointAmplitude &jsa) {
    return PhaseMatchGrid{jsa.signal, jsa.idler, jsa.values.cwiseAbs2(), true};
}

/// alpha(lambda_p) * sinc(dk L/2) * exp(i dk L/2), normalised.
inline JointAmplitude build_jsa(const DeviceSpec &device, const PumpSpec &pump, WavelengthRange signal_range,
                                WavelengthRange idler_range, std::size_t grid_n, unsigned threads = 0) {
    device.validate();
    pump.validate();
    if (pump.kind != PumpKind::Pulsed) {
        throw Error(ErrorKind::CwHasNoEnvelope, "a joint spectral amplitude needs a pulsed pump");
    }
    if (grid_n < 64) throw Error(ErrorKind::InvalidArgument, "grid_n must be >= 64");
    JointAmplitude jsa;
    jsa.signal = UniformAxis::from_range(signal_range.lo_nm, signal_range.hi_nm, grid_n);
    jsa.idler = UniformAxis::from_range(idler_range.lo_nm, idler_range.hi_nm, grid_n);
    auto n = static_cast<Eigen::Index>(grid_n);
    jsa.values.resize(n, n);
    const double half_length = 0.5 * device.length_um();
    parallel_for(
        grid_n,
        [&](std::size_t r) {
            for (std::size_t c = 0; c < grid_n; ++c) {
                double ls = jsa.signal[r];
                double li = jsa.idler[c];
                double lp = pump_wavelength(ls, li);
                double x = delta_k(device, ls, li) * half_length;
                double amp = sinc(x) * device.ripple.factor(lp);
                jsa.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    pump_envelope(pump, lp) * amp * std::polar(1.0, x);
            }
        },
        threads);
    if (jsa.values.cwiseAbs().maxCoeff() < 1e-12) {
        throw Error(ErrorKind::EmptySupport, "pump envelope and phase matching do not overlap on the grid");
    }
    jsa.normalize();
    return jsa;
}

/// Schmidt modes are orthonormal under the grid inner product sum u* v dlambda.
struct SchmidtDecomposition {
    std::vector<double> coefficients;     // lambda_k, descending, sum 1
    std::vector<double> singular_values;  // s_k, sum s_k^2 = 1 for a normalised JSA
    UniformAxis signal;
    UniformAxis idler;
    Eigen::MatrixXcd signal_modes;  // column k = u_k over the signal axis
    Eigen::MatrixXcd idler_modes;   // column k = v_k over the idler axis

    std::size_t rank() const { return coefficients.size(); }

    /// sum_k s_k u_k v_k^H, the JSA the decomposition came from.
    Eigen::MatrixXcd reconstruct() const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(signal_modes.rows(), idler_modes.rows());
        for (std::size_t k = 0; k < rank(); ++k) {
            auto kk = static_cast<Eigen::Index>(k);
            out.noalias() += singular_values[k] * signal_modes.col(kk) * idler_modes.col(kk).adjoint();
        }
        return out;
    }
};

inline SchmidtDecomposition schmidt_decompose(const JointAmplitude &jsa) {
    if (!jsa.is_normalized()) throw Error(ErrorKind::NotNormalized, "schmidt_decompose needs a normalised JSA");
    const double ds = jsa.signal.step;
    const double di = jsa.idler.step;
    Eigen::MatrixXcd scaled = jsa.values * std::sqrt(ds * di);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    SchmidtDecomposition out;
    out.signal = jsa.signal;
    out.idler = jsa.idler;
    double total = sv.squaredNorm();
    out.singular_values.resize(static_cast<std::size_t>(sv.size()));
    out.coefficients.resize(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        out.singular_values[static_cast<std::size_t>(k)] = sv(k);
        out.coefficients[static_cast<std::size_t>(k)] = sv(k) * sv(k) / total;
    }
    out.signal_modes = svd.matrixU() / std::sqrt(ds);
    out.idler_modes = svd.matrixV() / std::sqrt(di);
    // Fix the phase freedom: first non-negligible entry of each signal mode real positive.
    for (Eigen::Index k = 0; k < out.signal_modes.cols(); ++k) {
        auto col = out.signal_modes.col(k);
        double cutoff = 1e-8 * col.cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            if (std::abs(col(r)) > cutoff) {
                cdouble phase = std::conj(col(r)) / std::abs(col(r));
                out.signal_modes.col(k) *= phase;
                out.idler_modes.col(k) *= phase;
                break;
            }
        }
    }
    return out;
}

inline double purity(const SchmidtDecomposition &schmidt) {
    double p = 0.0;
    for (double l : schmidt.coefficients) p += l * l;
    return p;
}

inline double schmidt_number(const SchmidtDecomposition &schmidt) { return 1.0 / purity(schmidt); }

enum class Arm { Signal, Idler };

inline std::string to_string(Arm a) { return a == Arm::Signal ? "signal" : "idler"; }

/// Discrete density matrix over one axis; trace (plain diagonal sum) is 1.
struct DensityMatrix {
    UniformAxis axis;
    Eigen::MatrixXcd values;

    cdouble trace() const { return values.trace(); }
    double purity() const { return (values * values).trace().real(); }
};

/// State of the photon kept after detecting the `herald_arm` photon with a
/// spectrally flat detector: the herald's frequency is traced out.
inline DensityMatrix heralded_density_matrix(const JointAmplitude &jsa, Arm herald_arm) {
    if (!jsa.is_normalized()) throw Error(ErrorKind::NotNormalized, "heralding needs a normalised JSA");
    DensityMatrix rho;
    if (herald_arm == Arm::Idler) {
        rho.axis = jsa.signal;
        rho.values = jsa.values * jsa.values.adjoint() * jsa.idler.step;
    } else {
        rho.axis = jsa.idler;
        rho.values = jsa.values.transpose() * jsa.values.conjugate() * jsa.signal.step;
    }
    rho.values /= rho.values.trace().real();
    return rho;
}

/// Phase-less amplitude +sqrt(JSI), normalised. Purity from this is an
/// amplitude-only estimate.
inline JointAmplitude jsa_from_jsi(const PhaseMatchGrid &jsi) {
    if (jsi.values.size() == 0) throw Error(ErrorKind::EmptySupport, "empty JSI grid");
    if (jsi.values.minCoeff() < 0.0) throw Error(ErrorKind::NegativeIntensity, "JSI has negative entries");
    JointAmplitude jsa;
    jsa.signal = jsi.signal;
    jsa.idler = jsi.idler;
    jsa.values = jsi.values.cwiseSqrt().cast<cdouble>();
    jsa.normalize();
    return jsa;
}

/// Principal-axis angle (degrees, in (-90, 90]) of the intensity distribution,
/// from the covariance of the JSI over (signal, idler) in nm.
inline double jsi_principal_angle_deg(const PhaseMatchGrid &jsi) {
    double w = 0.0, ms = 0.0, mi = 0.0;
    for (Eigen::Index r = 0; r < jsi.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < jsi.values.cols(); ++c) {
            double v = jsi.values(r, c);
            w += v;
            ms += v * jsi.signal[static_cast<std::size_t>(r)];
            mi += v * jsi.idler[static_cast<std::size_t>(c)];
        }
    }
    ms /= w;
    mi /= w;
    double css = 0.0, cii = 0.0, csi = 0.0;
    for (Eigen::Index r = 0; r < jsi.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < jsi.values.cols(); ++c) {
            double v = jsi.values(r, c) / w;
            double ds = jsi.signal[static_cast<std::size_t>(r)] - ms;
            double di = jsi.idler[static_cast<std::size_t>(c)] - mi;
            css += v * ds * ds;
            cii += v * di * di;
            csi += v * ds * di;
        }
    }
    double angle = 0.5 * std::atan2(2.0 * csi, css - cii) * 180.0 / kPi;
    return angle;
}

}  // namespace cpspdc

#endif
