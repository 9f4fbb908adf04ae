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

#ifndef CPSPDC_CONFIG_HPP
#define CPSPDC_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cpspdc/analysis.hpp"
#include "cpspdc/dispersion.hpp"
#include "cpspdc/error.hpp"
#include "cpspdc/jsa.hpp"
#include "cpspdc/phasematch.hpp"
#include "cpspdc/tagsim.hpp"

namespace cpspdc {

// Reader for the TOML subset used by run configs: [tables] with dotted names,
// bare or dotted keys, basic and literal strings, numbers, booleans and
// (possibly multi-line) arrays. Inline tables, arrays of tables and dates are
// rejected with a Config error.

struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<double, bool, std::string, Array> data;
    bool integer = false;
};

class TomlDocument {
   public:
    static TomlDocument parse(const std::string &text, const std::string &origin = "<config>") {
        TomlDocument doc;
        doc.origin_ = origin;
        std::istringstream in(text);
        std::string line, prefix;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            int first_line = line_no;
            std::string stmt = strip_comment(line);
            while (bracket_depth(stmt) > 0 && std::getline(in, line)) {
                ++line_no;
                stmt += ' ' + strip_comment(line);
            }
            stmt = trim(stmt);
            if (stmt.empty()) continue;
            if (stmt.front() == '[') {
                if (stmt.size() > 1 && stmt[1] == '[') doc.fail(first_line, "arrays of tables are not supported");
                if (stmt.back() != ']') doc.fail(first_line, "unterminated table header");
                prefix = trim(stmt.substr(1, stmt.size() - 2));
                if (prefix.empty() || !valid_key(prefix)) doc.fail(first_line, "bad table name '" + prefix + "'");
                if (!doc.tables_.insert(prefix).second) {
                    doc.fail(first_line, "table [" + prefix + "] defined twice");
                }
                continue;
            }
            auto eq = find_unquoted(stmt, '=');
            if (eq == std::string::npos) doc.fail(first_line, "expected key = value");
            std::string key = trim(stmt.substr(0, eq));
            if (key.empty() || !valid_key(key)) doc.fail(first_line, "unsupported key '" + key + "'");
            std::string full = prefix.empty() ? key : prefix + "." + key;
            std::string rest = trim(stmt.substr(eq + 1));
            std::size_t pos = 0;
            TomlValue v = doc.parse_value(rest, pos, first_line);
            if (!trim(rest.substr(pos)).empty()) doc.fail(first_line, "trailing characters after value");
            if (!doc.values_.emplace(full, std::move(v)).second) {
                doc.fail(first_line, "duplicate key '" + full + "'");
            }
        }
        return doc;
    }

    static TomlDocument parse_file(const std::string &path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    bool has(const std::string &key) const { return values_.count(key) != 0; }

    const TomlValue &at(const std::string &key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw Error(ErrorKind::Config, origin_ + ": missing key '" + key + "'");
        return it->second;
    }

    double number(const std::string &key) const {
        if (auto d = std::get_if<double>(&at(key).data)) return *d;
        throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must be a number");
    }
    double number_or(const std::string &key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::int64_t integer(const std::string &key) const {
        const auto &v = at(key);
        auto d = std::get_if<double>(&v.data);
        if (!d || !v.integer) throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must be an integer");
        return static_cast<std::int64_t>(*d);
    }
    std::int64_t integer_or(const std::string &key, std::int64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::string string(const std::string &key) const {
        if (auto s = std::get_if<std::string>(&at(key).data)) return *s;
        throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must be a string");
    }
    std::string string_or(const std::string &key, const std::string &fallback) const {
        return has(key) ? string(key) : fallback;
    }

    bool boolean_or(const std::string &key, bool fallback) const {
        if (!has(key)) return fallback;
        if (auto b = std::get_if<bool>(&at(key).data)) return *b;
        throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must be true or false");
    }

    std::vector<double> numbers(const std::string &key) const {
        auto arr = std::get_if<TomlValue::Array>(&at(key).data);
        if (!arr) throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must be an array");
        std::vector<double> out;
        for (const auto &e : *arr) {
            auto d = std::get_if<double>(&e.data);
            if (!d) throw Error(ErrorKind::Config, origin_ + ": '" + key + "' must hold numbers");
            out.push_back(*d);
        }
        return out;
    }

    /// Sorted names x such that some table or key lives under "prefix.x.".
    std::vector<std::string> children(const std::string &prefix) const {
        std::set<std::string> out;
        std::string head = prefix + ".";
        auto consider = [&](const std::string &name, bool is_table) {
            if (name.rfind(head, 0) != 0) return;
            std::string rest = name.substr(head.size());
            auto dot = rest.find('.');
            if (dot == std::string::npos && !is_table) return;
            out.insert(rest.substr(0, dot));
        };
        for (const auto &t : tables_) consider(t, true);
        for (const auto &kv : values_) consider(kv.first, false);
        return {out.begin(), out.end()};
    }

    /// Keys directly under `section` that are not in `known`.
    std::vector<std::string> unknown_keys(const std::string &section, const std::set<std::string> &known) const {
        std::vector<std::string> out;
        std::string head = section + ".";
        for (const auto &kv : values_) {
            if (kv.first.rfind(head, 0) != 0) continue;
            std::string rest = kv.first.substr(head.size());
            if (!known.count(rest)) out.push_back(kv.first);
        }
        return out;
    }

    std::vector<std::string> top_level_names() const {
        std::set<std::string> out;
        for (const auto &t : tables_) out.insert(t.substr(0, t.find('.')));
        for (const auto &kv : values_) out.insert(kv.first.substr(0, kv.first.find('.')));
        return {out.begin(), out.end()};
    }

    const std::string &origin() const { return origin_; }

    [[noreturn]] void fail(int line, const std::string &msg) const {
        throw Error(ErrorKind::Config, origin_ + ":" + std::to_string(line) + ": " + msg);
    }

   private:
    static bool valid_key(const std::string &key) {
        if (key.front() == '.' || key.back() == '.' || key.find("..") != std::string::npos) return false;
        return std::all_of(key.begin(), key.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
        });
    }

    static std::string trim(const std::string &s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::size_t find_unquoted(const std::string &s, char target, std::size_t from = 0) {
        char quote = 0;
        for (std::size_t i = from; i < s.size(); ++i) {
            char c = s[i];
            if (quote) {
                if (c == '\\' && quote == '"') ++i;
                else if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == target) {
                return i;
            }
        }
        return std::string::npos;
    }

    static std::string strip_comment(const std::string &line) {
        auto hash = find_unquoted(line, '#');
        return hash == std::string::npos ? line : line.substr(0, hash);
    }

    // Open-bracket balance on the value side of `key = value`.
    static int bracket_depth(const std::string &stmt) {
        auto eq = find_unquoted(stmt, '=');
        if (eq == std::string::npos) return 0;
        int depth = 0;
        char quote = 0;
        for (std::size_t i = eq + 1; i < stmt.size(); ++i) {
            char c = stmt[i];
            if (quote) {
                if (c == '\\' && quote == '"') ++i;
                else if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '[') {
                ++depth;
            } else if (c == ']') {
                --depth;
            }
        }
        return depth;
    }

    static void skip_space(const std::string &s, std::size_t &pos) {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    TomlValue parse_value(const std::string &s, std::size_t &pos, int line) const {
        skip_space(s, pos);
        if (pos >= s.size()) fail(line, "missing value");
        char c = s[pos];
        TomlValue v;
        if (c == '"' || c == '\'') {
            std::string out;
            ++pos;
            while (pos < s.size() && s[pos] != c) {
                if (c == '"' && s[pos] == '\\' && pos + 1 < s.size()) {
                    char e = s[++pos];
                    switch (e) {
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        case '\\': out += '\\'; break;
                        case '"': out += '"'; break;
                        default: fail(line, std::string("unsupported escape \\") + e);
                    }
                } else {
                    out += s[pos];
                }
                ++pos;
            }
            if (pos >= s.size()) fail(line, "unterminated string");
            ++pos;
            v.data = std::move(out);
            return v;
        }
        if (c == '[') {
            ++pos;
            TomlValue::Array arr;
            for (;;) {
                skip_space(s, pos);
                if (pos >= s.size()) fail(line, "unterminated array");
                if (s[pos] == ']') {
                    ++pos;
                    break;
                }
                arr.push_back(parse_value(s, pos, line));
                skip_space(s, pos);
                if (pos < s.size() && s[pos] == ',') ++pos;
                else if (pos < s.size() && s[pos] != ']') fail(line, "expected ',' or ']' in array");
            }
            v.data = std::move(arr);
            return v;
        }
        if (c == '{') fail(line, "inline tables are not supported");
        std::size_t end = pos;
        while (end < s.size() && s[end] != ',' && s[end] != ']' && !std::isspace(static_cast<unsigned char>(s[end]))) {
            ++end;
        }
        std::string tok = s.substr(pos, end - pos);
        pos = end;
        if (tok == "true" || tok == "false") {
            v.data = tok == "true";
            return v;
        }
        std::string digits;
        for (char d : tok) {
            if (d != '_') digits += d;
        }
        bool numeric = !digits.empty() &&
                       std::all_of(digits.begin(), digits.end(), [](char d) {
                           return std::isdigit(static_cast<unsigned char>(d)) || d == '+' || d == '-' || d == '.' ||
                                  d == 'e' || d == 'E';
                       });
        char *stop = nullptr;
        double d = numeric ? std::strtod(digits.c_str(), &stop) : 0.0;
        if (!numeric || stop != digits.c_str() + digits.size()) fail(line, "cannot parse value '" + tok + "'");
        v.data = d;
        v.integer = digits.find_first_of(".eE") == std::string::npos;
        return v;
    }

    std::map<std::string, TomlValue> values_;
    std::set<std::string> tables_;
    std::string origin_;
};

struct GridConfig {
    WavelengthRange sfg_signal{1540.0, 1560.0};
    WavelengthRange sfg_idler{1540.0, 1560.0};
    std::size_t sfg_n = 256;
    WavelengthRange jsa_signal{1536.0, 1556.0};
    WavelengthRange jsa_idler{1548.0, 1552.0};
    std::size_t jsa_n = 256;
    double marginal_detuning_nm = 3.0;
    std::size_t marginal_n = 1024;
    double hom_delay_lo_ps = -60.0;
    double hom_delay_hi_ps = 60.0;
    std::size_t hom_n_delay = 241;
    double hom_detuning_nm = 10.0;
    std::size_t hom_grid_n = 4097;
    double hom_map_pump_lo_nm = 774.6;
    double hom_map_pump_hi_nm = 775.4;
    std::size_t hom_map_n_pump = 161;
    double hom_map_delay_lo_ps = -30.0;
    double hom_map_delay_hi_ps = 30.0;
    std::size_t hom_map_n_delay = 121;
    BinSpec jsi_signal{1544.0, 1556.0, 64};
    BinSpec jsi_idler{1544.0, 1556.0, 64};
    double g2_bin_ps = 100.0;
    std::size_t g2_side_peaks = 5;
    double car_window_ps = 6000.0;  // covers the dispersive spread of true pairs
};

/// One named device plus its optional JSA window.
struct NamedDevice {
    DeviceSpec spec;
    std::optional<WavelengthRange> jsa_signal;
    std::optional<WavelengthRange> jsa_idler;
};

struct SimulationSettings {
    std::uint64_t pulses = 1000000;
    std::uint64_t seed = 1;
    double mean_pairs_per_pulse = 0.003;
    double g2_mean_pairs_per_pulse = 0.1;
    double signal_dispersion_ps_per_nm = 510.0;
    double idler_dispersion_ps_per_nm = 510.0;
    double signal_reference_nm = 1550.0;
    double idler_reference_nm = 1550.0;
    std::optional<Bandpass> signal_filter;
    std::optional<Bandpass> idler_filter;
    double splitter_ratio = 0.5;
    Arm g2_arm = Arm::Idler;
    SpectralSampling sampling = SpectralSampling::JointIntensity;
    unsigned threads = 0;
};

struct RunConfig {
    std::map<std::string, NamedDevice> devices;
    PumpSpec pump;
    GridConfig grids;
    DetectorModel detector;
    SimulationSettings simulation;
    std::string output_dir = "out";

    const NamedDevice &device(const std::string &name) const {
        auto it = devices.find(name);
        if (it == devices.end()) {
            std::string known;
            for (const auto &kv : devices) known += (known.empty() ? "" : ", ") + kv.first;
            throw Error(ErrorKind::Config, "unknown device '" + name + "' (configured: " + known + ")");
        }
        return it->second;
    }
};

namespace detail {

inline WavelengthRange range_from(const TomlDocument &doc, const std::string &key, WavelengthRange fallback) {
    if (!doc.has(key)) return fallback;
    auto v = doc.numbers(key);
    if (v.size() != 2 || !(v[1] > v[0])) {
        throw Error(ErrorKind::Config, doc.origin() + ": '" + key + "' must be [lo, hi] with lo < hi");
    }
    return {v[0], v[1]};
}

inline std::size_t count_from(const TomlDocument &doc, const std::string &key, std::size_t fallback) {
    auto v = doc.integer_or(key, static_cast<std::int64_t>(fallback));
    if (v < 1) throw Error(ErrorKind::Config, doc.origin() + ": '" + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

inline void reject_unknown(const TomlDocument &doc, const std::string &section, const std::set<std::string> &known) {
    auto extra = doc.unknown_keys(section, known);
    if (!extra.empty()) throw Error(ErrorKind::Config, doc.origin() + ": unknown key '" + extra.front() + "'");
}

inline std::string resolve_path(const std::string &path, const std::filesystem::path &base) {
    std::filesystem::path p(path);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal().string();
}

inline DispersionModel load_mode_file(const std::string &path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::Io, "dispersion file not found: '" + path + "'");
    }
    return DispersionModel::from_csv(path);
}

inline NamedDevice load_device(const TomlDocument &doc, const std::string &name, const std::filesystem::path &base) {
    const std::string s = "device." + name;
    reject_unknown(doc, s,
                   {"geometry", "poling_period_um", "qpm_order", "duty_cycle", "length_mm", "dispersion",
                    "dispersion_file.telecom", "dispersion_file.pump", "index_offset", "degenerate_pump_nm",
                    "period_for_degenerate_pump_nm", "ripple_amplitude", "ripple_period_nm", "ripple_phase",
                    "jsa_signal_nm", "jsa_idler_nm"});
    NamedDevice out;
    DeviceSpec &d = out.spec;
    std::string geometry = doc.string_or(s + ".geometry", "counter");
    if (geometry == "counter" || geometry == "counter-propagating") {
        d.geometry = Geometry::CounterPropagating;
    } else if (geometry == "co" || geometry == "co-propagating") {
        d.geometry = Geometry::CoPropagating;
    } else {
        throw Error(ErrorKind::Config, doc.origin() + ": " + s + ".geometry must be 'counter' or 'co'");
    }
    d.qpm_order = static_cast<int>(doc.integer_or(s + ".qpm_order", d.qpm_order));
    d.duty_cycle = doc.number_or(s + ".duty_cycle", d.duty_cycle);
    if (!doc.has(s + ".length_mm")) throw Error(ErrorKind::Config, doc.origin() + ": " + s + ".length_mm is required");
    d.length_mm = doc.number(s + ".length_mm");

    bool has_files = doc.has(s + ".dispersion_file.telecom") || doc.has(s + ".dispersion_file.pump");
    if (has_files && doc.has(s + ".dispersion")) {
        throw Error(ErrorKind::Config, doc.origin() + ": " + s + " sets both dispersion and dispersion_file");
    }
    if (has_files) {
        if (!doc.has(s + ".dispersion_file.telecom") || !doc.has(s + ".dispersion_file.pump")) {
            throw Error(ErrorKind::Config, doc.origin() + ": " + s + ".dispersion_file needs telecom and pump");
        }
        d.modes.telecom = load_mode_file(resolve_path(doc.string(s + ".dispersion_file.telecom"), base));
        d.modes.pump = load_mode_file(resolve_path(doc.string(s + ".dispersion_file.pump"), base));
    } else {
        std::string which = doc.string_or(s + ".dispersion", "bundled");
        if (which != "bundled") {
            throw Error(ErrorKind::Config, doc.origin() + ": " + s + ".dispersion must be \"bundled\"");
        }
        d.modes = bundled_modes();
    }

    d.ripple.amplitude = doc.number_or(s + ".ripple_amplitude", 0.0);
    d.ripple.period_nm = doc.number_or(s + ".ripple_period_nm", 1.0);
    d.ripple.phase = doc.number_or(s + ".ripple_phase", 0.0);

    if (doc.has(s + ".period_for_degenerate_pump_nm")) {
        if (doc.has(s + ".poling_period_um")) {
            throw Error(ErrorKind::Config, doc.origin() + ": " + s +
                                               " sets both poling_period_um and period_for_degenerate_pump_nm");
        }
        d.poling_period_um = poling_period_for_degeneracy(d, doc.number(s + ".period_for_degenerate_pump_nm"));
    } else {
        if (!doc.has(s + ".poling_period_um")) {
            throw Error(ErrorKind::Config, doc.origin() + ": " + s + ".poling_period_um is required");
        }
        d.poling_period_um = doc.number(s + ".poling_period_um");
    }
    try {
        d.validate();
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, doc.origin() + ": " + s + ": " + e.what());
    }

    if (doc.has(s + ".index_offset") && doc.has(s + ".degenerate_pump_nm")) {
        throw Error(ErrorKind::Config, doc.origin() + ": " + s + " sets both index_offset and degenerate_pump_nm");
    }
    if (doc.has(s + ".degenerate_pump_nm")) {
        d.index_offset = index_offset_for_degenerate_pump(d, doc.number(s + ".degenerate_pump_nm"));
    } else {
        d.index_offset = doc.number_or(s + ".index_offset", 0.0);
    }
    if (doc.has(s + ".jsa_signal_nm")) out.jsa_signal = range_from(doc, s + ".jsa_signal_nm", {});
    if (doc.has(s + ".jsa_idler_nm")) out.jsa_idler = range_from(doc, s + ".jsa_idler_nm", {});
    return out;
}

inline std::optional<Bandpass> filter_from(const TomlDocument &doc, const std::string &key) {
    if (!doc.has(key)) return std::nullopt;
    auto v = doc.numbers(key);
    if (v.size() != 2 || !(v[1] > 0.0)) {
        throw Error(ErrorKind::Config, doc.origin() + ": '" + key + "' must be [centre_nm, width_nm]");
    }
    return Bandpass{v[0], v[1]};
}

}  // namespace detail

/// Builds a RunConfig from parsed TOML. Relative file paths resolve against
/// `base_dir`.
inline RunConfig run_config_from(const TomlDocument &doc, const std::filesystem::path &base_dir = {}) {
    for (const auto &top : doc.top_level_names()) {
        static const std::set<std::string> kTop{"device", "pump", "grids", "detectors", "simulation", "output_dir"};
        if (!kTop.count(top)) throw Error(ErrorKind::Config, doc.origin() + ": unknown section '" + top + "'");
    }
    RunConfig cfg;
    for (const auto &name : doc.children("device")) cfg.devices.emplace(name, detail::load_device(doc, name, base_dir));
    if (cfg.devices.empty()) throw Error(ErrorKind::Config, doc.origin() + ": at least one [device.<name>] is required");

    detail::reject_unknown(doc, "pump", {"kind", "center_nm", "fwhm_nm", "repetition_rate_mhz", "average_power_mw"});
    std::string kind = doc.string_or("pump.kind", "pulsed");
    if (kind == "cw") {
        cfg.pump = PumpSpec::cw(doc.number_or("pump.center_nm", 775.0));
    } else if (kind == "pulsed") {
        cfg.pump.center_nm = doc.number_or("pump.center_nm", cfg.pump.center_nm);
        cfg.pump.fwhm_nm = doc.number_or("pump.fwhm_nm", cfg.pump.fwhm_nm);
        cfg.pump.repetition_rate_mhz = doc.number_or("pump.repetition_rate_mhz", cfg.pump.repetition_rate_mhz);
    } else {
        throw Error(ErrorKind::Config, doc.origin() + ": pump.kind must be 'pulsed' or 'cw'");
    }
    cfg.pump.average_power_mw = doc.number_or("pump.average_power_mw", cfg.pump.average_power_mw);
    try {
        cfg.pump.validate();
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, doc.origin() + ": pump: " + e.what());
    }

    auto &g = cfg.grids;
    detail::reject_unknown(doc, "grids",
                           {"sfg_signal_nm", "sfg_idler_nm", "sfg_n", "jsa_signal_nm", "jsa_idler_nm", "jsa_n",
                            "marginal_detuning_nm", "marginal_n", "hom_delay_ps", "hom_n_delay", "hom_detuning_nm",
                            "hom_grid_n", "hom_map_pump_nm", "hom_map_n_pump", "hom_map_delay_ps", "hom_map_n_delay",
                            "jsi_signal_nm", "jsi_idler_nm", "jsi_n", "g2_bin_ps", "g2_side_peaks", "car_window_ps"});
    g.sfg_signal = detail::range_from(doc, "grids.sfg_signal_nm", g.sfg_signal);
    g.sfg_idler = detail::range_from(doc, "grids.sfg_idler_nm", g.sfg_idler);
    g.sfg_n = detail::count_from(doc, "grids.sfg_n", g.sfg_n);
    g.jsa_signal = detail::range_from(doc, "grids.jsa_signal_nm", g.jsa_signal);
    g.jsa_idler = detail::range_from(doc, "grids.jsa_idler_nm", g.jsa_idler);
    g.jsa_n = detail::count_from(doc, "grids.jsa_n", g.jsa_n);
    g.marginal_detuning_nm = doc.number_or("grids.marginal_detuning_nm", g.marginal_detuning_nm);
    g.marginal_n = detail::count_from(doc, "grids.marginal_n", g.marginal_n);
    auto hd = detail::range_from(doc, "grids.hom_delay_ps", {g.hom_delay_lo_ps, g.hom_delay_hi_ps});
    g.hom_delay_lo_ps = hd.lo_nm;
    g.hom_delay_hi_ps = hd.hi_nm;
    g.hom_n_delay = detail::count_from(doc, "grids.hom_n_delay", g.hom_n_delay);
    g.hom_detuning_nm = doc.number_or("grids.hom_detuning_nm", g.hom_detuning_nm);
    g.hom_grid_n = detail::count_from(doc, "grids.hom_grid_n", g.hom_grid_n);
    auto mp = detail::range_from(doc, "grids.hom_map_pump_nm", {g.hom_map_pump_lo_nm, g.hom_map_pump_hi_nm});
    g.hom_map_pump_lo_nm = mp.lo_nm;
    g.hom_map_pump_hi_nm = mp.hi_nm;
    g.hom_map_n_pump = detail::count_from(doc, "grids.hom_map_n_pump", g.hom_map_n_pump);
    auto md = detail::range_from(doc, "grids.hom_map_delay_ps", {g.hom_map_delay_lo_ps, g.hom_map_delay_hi_ps});
    g.hom_map_delay_lo_ps = md.lo_nm;
    g.hom_map_delay_hi_ps = md.hi_nm;
    g.hom_map_n_delay = detail::count_from(doc, "grids.hom_map_n_delay", g.hom_map_n_delay);
    auto js = detail::range_from(doc, "grids.jsi_signal_nm", {g.jsi_signal.lo_nm, g.jsi_signal.hi_nm});
    auto ji = detail::range_from(doc, "grids.jsi_idler_nm", {g.jsi_idler.lo_nm, g.jsi_idler.hi_nm});
    std::size_t jn = detail::count_from(doc, "grids.jsi_n", g.jsi_signal.n);
    g.jsi_signal = {js.lo_nm, js.hi_nm, jn};
    g.jsi_idler = {ji.lo_nm, ji.hi_nm, jn};
    g.g2_bin_ps = doc.number_or("grids.g2_bin_ps", g.g2_bin_ps);
    g.g2_side_peaks = detail::count_from(doc, "grids.g2_side_peaks", g.g2_side_peaks);
    g.car_window_ps = doc.number_or("grids.car_window_ps", g.car_window_ps);

    detail::reject_unknown(doc, "detectors", {"efficiency", "jitter_sigma_ps", "dark_count_rate_hz", "dead_time_ps"});
    cfg.detector.efficiency = doc.number_or("detectors.efficiency", cfg.detector.efficiency);
    cfg.detector.jitter_sigma_ps = doc.number_or("detectors.jitter_sigma_ps", cfg.detector.jitter_sigma_ps);
    cfg.detector.dark_count_rate_hz = doc.number_or("detectors.dark_count_rate_hz", cfg.detector.dark_count_rate_hz);
    cfg.detector.dead_time_ps = doc.number_or("detectors.dead_time_ps", cfg.detector.dead_time_ps);
    try {
        cfg.detector.validate();
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, doc.origin() + ": detectors: " + e.what());
    }

    auto &sim = cfg.simulation;
    detail::reject_unknown(doc, "simulation",
                           {"pulses", "seed", "mean_pairs_per_pulse", "g2_mean_pairs_per_pulse",
                            "signal_dispersion_ps_per_nm", "idler_dispersion_ps_per_nm", "signal_reference_nm",
                            "idler_reference_nm", "signal_filter_nm", "idler_filter_nm", "splitter_ratio", "g2_arm",
                            "sampling", "threads"});
    sim.pulses = static_cast<std::uint64_t>(detail::count_from(doc, "simulation.pulses", sim.pulses));
    sim.seed = static_cast<std::uint64_t>(doc.integer_or("simulation.seed", static_cast<std::int64_t>(sim.seed)));
    sim.mean_pairs_per_pulse = doc.number_or("simulation.mean_pairs_per_pulse", sim.mean_pairs_per_pulse);
    sim.g2_mean_pairs_per_pulse = doc.number_or("simulation.g2_mean_pairs_per_pulse", sim.g2_mean_pairs_per_pulse);
    sim.signal_dispersion_ps_per_nm = doc.number_or("simulation.signal_dispersion_ps_per_nm", sim.signal_dispersion_ps_per_nm);
    sim.idler_dispersion_ps_per_nm = doc.number_or("simulation.idler_dispersion_ps_per_nm", sim.idler_dispersion_ps_per_nm);
    sim.signal_reference_nm = doc.number_or("simulation.signal_reference_nm", sim.signal_reference_nm);
    sim.idler_reference_nm = doc.number_or("simulation.idler_reference_nm", sim.idler_reference_nm);
    sim.signal_filter = detail::filter_from(doc, "simulation.signal_filter_nm");
    sim.idler_filter = detail::filter_from(doc, "simulation.idler_filter_nm");
    sim.splitter_ratio = doc.number_or("simulation.splitter_ratio", sim.splitter_ratio);
    std::string arm = doc.string_or("simulation.g2_arm", "idler");
    if (arm != "idler" && arm != "signal") throw Error(ErrorKind::Config, doc.origin() + ": simulation.g2_arm must be 'signal' or 'idler'");
    sim.g2_arm = arm == "idler" ? Arm::Idler : Arm::Signal;
    std::string sampling = doc.string_or("simulation.sampling", "joint-intensity");
    if (sampling == "schmidt-modes") sim.sampling = SpectralSampling::SchmidtModes;
    else if (sampling == "joint-intensity") sim.sampling = SpectralSampling::JointIntensity;
    else throw Error(ErrorKind::Config, doc.origin() + ": simulation.sampling must be 'schmidt-modes' or 'joint-intensity'");
    sim.threads = static_cast<unsigned>(doc.integer_or("simulation.threads", 0));
    if (!(sim.mean_pairs_per_pulse > 0.0) || !(sim.g2_mean_pairs_per_pulse > 0.0)) {
        throw Error(ErrorKind::Config, doc.origin() + ": mean pair numbers must be > 0");
    }
    if (!(sim.splitter_ratio > 0.0 && sim.splitter_ratio < 1.0)) {
        throw Error(ErrorKind::Config, doc.origin() + ": simulation.splitter_ratio must lie in (0, 1)");
    }

    cfg.output_dir = doc.string_or("output_dir", cfg.output_dir);
    return cfg;
}

inline RunConfig load_run_config(const std::string &path) {
    auto doc = TomlDocument::parse_file(path);
    return run_config_from(doc, std::filesystem::path(path).parent_path());
}

inline RunConfig parse_run_config(const std::string &text, const std::filesystem::path &base_dir = {}) {
    return run_config_from(TomlDocument::parse(text), base_dir);
}

}  // namespace cpspdc

#endif
