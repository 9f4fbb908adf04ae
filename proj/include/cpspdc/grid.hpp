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

#ifndef CPSPDC_GRID_HPP
#define CPSPDC_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cpspdc/error.hpp"

namespace cpspdc {

/// Uniform, strictly increasing sample axis. Samples are cell centres; cell i
/// covers [value(i) - step/2, value(i) + step/2).
struct UniformAxis {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;

    /// Inclusive endpoints: value(0) == lo, value(n - 1) == hi.
    static UniformAxis from_range(double lo, double hi, std::size_t n) {
        if (n < 2 || !(hi > lo)) {
            throw Error(ErrorKind::InvalidArgument,
                        "axis needs n >= 2 and hi > lo (got n=" + std::to_string(n) + ")");
        }
        return UniformAxis{lo, (hi - lo) / static_cast<double>(n - 1), n};
    }

    /// n cells tiling [lo, hi) exactly; samples sit at cell centres.
    static UniformAxis from_edges(double lo, double hi, std::size_t n) {
        if (n < 1 || !(hi > lo)) {
            throw Error(ErrorKind::InvalidArgument, "bin edges need n >= 1 and hi > lo");
        }
        double step = (hi - lo) / static_cast<double>(n);
        return UniformAxis{lo + 0.5 * step, step, n};
    }

    double operator[](std::size_t i) const { return start + step * static_cast<double>(i); }
    double front() const { return start; }
    double back() const { return (*this)[size - 1]; }
    double lower_edge() const { return start - 0.5 * step; }
    double upper_edge() const { return back() + 0.5 * step; }

    /// Cell containing x, or -1 when x lies outside [lower_edge, upper_edge).
    long cell_of(double x) const {
        double f = std::floor((x - lower_edge()) / step);
        if (!(f >= 0.0) || f >= static_cast<double>(size)) return -1;
        return static_cast<long>(f);
    }

    std::size_t nearest(double x) const {
        double f = std::round((x - start) / step);
        if (f < 0.0) return 0;
        if (f > static_cast<double>(size - 1)) return size - 1;
        return static_cast<std::size_t>(f);
    }

    std::vector<double> values() const {
        std::vector<double> out(size);
        for (std::size_t i = 0; i < size; ++i) out[i] = (*this)[i];
        return out;
    }

    bool same_as(const UniformAxis &other, double rel_tol = 1e-12) const {
        double scale = std::max(std::abs(start), std::abs(step)) + 1.0;
        return size == other.size && std::abs(start - other.start) <= rel_tol * scale &&
               std::abs(step - other.step) <= rel_tol * scale;
    }
};

}  // namespace cpspdc

#endif
