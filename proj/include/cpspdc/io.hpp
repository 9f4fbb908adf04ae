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

#ifndef CPSPDC_IO_HPP
#define CPSPDC_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/interference.hpp"
#include "cpspdc/jsa.hpp"
#include "cpspdc/phasematch.hpp"

namespace cpspdc {

/// Shortest decimal that round-trips the double.
inline std::string format_double(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace detail {

inline std::ofstream open_for_write(const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    return out;
}

}  // namespace detail

/// First row: corner label then the column axis; each later row: row-axis
/// value then the data.
inline void write_matrix_csv(const std::string &path, const UniformAxis &rows, const UniformAxis &cols,
                             const Eigen::MatrixXd &values, const std::string &corner = "signal_nm\\idler_nm") {
    auto out = detail::open_for_write(path);
    out << corner;
    for (std::size_t c = 0; c < cols.size; ++c) out << ',' << format_double(cols[c]);
    out << '\n';
    for (std::size_t r = 0; r < rows.size; ++r) {
        out << format_double(rows[r]);
        for (std::size_t c = 0; c < cols.size; ++c) {
            out << ',' << format_double(values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        out << '\n';
    }
}

struct MatrixCsv {
    std::vector<double> rows;
    std::vector<double> cols;
    Eigen::MatrixXd values;
};

inline MatrixCsv read_matrix_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    auto split = [](const std::string &line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    MatrixCsv m;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty matrix file '" + path + "'");
    auto head = split(line);
    for (std::size_t i = 1; i < head.size(); ++i) m.cols.push_back(std::stod(head[i]));
    std::vector<std::vector<double>> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != m.cols.size() + 1) throw Error(ErrorKind::Io, "ragged row in '" + path + "'");
        m.rows.push_back(std::stod(cells[0]));
        std::vector<double> row;
        for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
        data.push_back(std::move(row));
    }
    m.values.resize(static_cast<Eigen::Index>(m.rows.size()), static_cast<Eigen::Index>(m.cols.size()));
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < data[r].size(); ++c) {
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
        }
    }
    return m;
}

/// Grid read back from CSV; the axes must be uniform.
inline PhaseMatchGrid read_grid_csv(const std::string &path) {
    MatrixCsv m = read_matrix_csv(path);
    if (m.rows.size() < 2 || m.cols.size() < 2) throw Error(ErrorKind::Io, "grid '" + path + "' is too small");
    PhaseMatchGrid g;
    g.signal = UniformAxis::from_range(m.rows.front(), m.rows.back(), m.rows.size());
    g.idler = UniformAxis::from_range(m.cols.front(), m.cols.back(), m.cols.size());
    g.values = std::move(m.values);
    g.intensity = g.values.minCoeff() >= 0.0;
    return g;
}

inline void write_meta(const std::string &path, const std::map<std::string, std::string> &entries) {
    auto out = detail::open_for_write(path);
    for (const auto &[k, v] : entries) out << k << '=' << v << '\n';
}

inline std::map<std::string, std::string> axis_meta(const std::string &prefix, const UniformAxis &axis) {
    return {{prefix + "_start_nm", format_double(axis.start)},
            {prefix + "_step_nm", format_double(axis.step)},
            {prefix + "_n", std::to_string(axis.size)}};
}

inline void write_grid(const std::string &stem, const PhaseMatchGrid &grid, const std::string &kind) {
    write_matrix_csv(stem + ".csv", grid.signal, grid.idler, grid.values);
    auto meta = axis_meta("signal", grid.signal);
    meta.merge(axis_meta("idler", grid.idler));
    meta["kind"] = kind;
    meta["values"] = grid.intensity ? "intensity" : "amplitude";
    meta["layout"] = "rows=signal,cols=idler";
    write_meta(stem + ".meta", meta);
}

/// Complex grids go to `<stem>_re.csv` and `<stem>_im.csv` plus `<stem>.meta`.
inline void write_jsa(const std::string &stem, const JointAmplitude &jsa) {
    write_matrix_csv(stem + "_re.csv", jsa.signal, jsa.idler, jsa.values.real());
    write_matrix_csv(stem + "_im.csv", jsa.signal, jsa.idler, jsa.values.imag());
    auto meta = axis_meta("signal", jsa.signal);
    meta.merge(axis_meta("idler", jsa.idler));
    meta["kind"] = "jsa";
    meta["normalization"] = jsa.normalized ? "sum|f|^2*dls*dli=1" : "none";
    meta["storage"] = "complex: real part in _re.csv, imaginary part in _im.csv";
    meta["layout"] = "rows=signal,cols=idler";
    write_meta(stem + ".meta", meta);
}

inline JointAmplitude read_jsa(const std::string &stem) {
    MatrixCsv re = read_matrix_csv(stem + "_re.csv");
    MatrixCsv im = read_matrix_csv(stem + "_im.csv");
    if (re.values.rows() != im.values.rows() || re.values.cols() != im.values.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "real and imaginary parts differ in shape");
    }
    JointAmplitude jsa;
    jsa.signal = UniformAxis::from_range(re.rows.front(), re.rows.back(), re.rows.size());
    jsa.idler = UniformAxis::from_range(re.cols.front(), re.cols.back(), re.cols.size());
    jsa.values = re.values.cast<cdouble>() + cdouble(0.0, 1.0) * im.values.cast<cdouble>();
    jsa.normalized = std::abs(jsa.norm() - 1.0) < 1e-10;
    return jsa;
}

inline void write_curve_csv(const std::string &path, const std::vector<double> &x, const std::vector<double> &y) {
    auto out = detail::open_for_write(path);
    out << "x,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

inline void write_curve_csv(const std::string &path, const HomCurve &curve) {
    write_curve_csv(path, curve.x, curve.values);
}

// SVG output is a convenience view; styling is not part of any contract.

inline void write_line_svg(const std::string &path, const std::vector<double> &x, const std::vector<double> &y,
                           const std::string &title) {
    auto out = detail::open_for_write(path);
    const double w = 640, h = 400, m = 50;
    double x0 = *std::min_element(x.begin(), x.end()), x1 = *std::max_element(x.begin(), x.end());
    double y0 = std::min(0.0, *std::min_element(y.begin(), y.end()));
    double y1 = *std::max_element(y.begin(), y.end());
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << m << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
        double px = m + (x[i] - x0) / (x1 - x0) * (w - 2 * m);
        double py = h - m - (y[i] - y0) / (y1 - y0) * (h - 2 * m);
        out << format_double(px) << ',' << format_double(py) << ' ';
    }
    out << "\"/>\n</svg>\n";
}

inline void write_heatmap_svg(const std::string &path, const Eigen::MatrixXd &values, const std::string &title) {
    auto out = detail::open_for_write(path);
    const double cell = std::max(1.0, 512.0 / static_cast<double>(std::max(values.rows(), values.cols())));
    const double top = 30;
    double lo = values.minCoeff(), hi = values.maxCoeff();
    if (hi == lo) hi = lo + 1;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cell * values.cols() << "\" height=\""
        << top + cell * values.rows() << "\">\n";
    out << "<text x=\"4\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    // Row 0 at the bottom so the row axis increases upwards.
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            int v = static_cast<int>(std::lround(255.0 * (values(r, c) - lo) / (hi - lo)));
            out << "<rect x=\"" << c * cell << "\" y=\"" << top + (values.rows() - 1 - r) * cell << "\" width=\""
                << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << v << ',' << v / 2 << ',' << 255 - v
                << ")\"/>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace cpspdc

#endif
