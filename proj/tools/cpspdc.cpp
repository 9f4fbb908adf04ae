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

// cpspdc: command-line front end. Every subcommand reads a TOML run config;
// flags given on the command line override the config, which overrides the
// built-in defaults.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cpspdc.hpp"

namespace fs = std::filesystem;
using namespace cpspdc;

namespace {

struct Common {
    std::string config;
    std::string device = "A";
    std::string out;
    std::optional<unsigned> threads;
    bool svg = false;
};

void add_common(CLI::App *sub, Common &c, bool with_device = true) {
    sub->add_option("-c,--config", c.config, "TOML run configuration")->required()->check(CLI::ExistingFile);
    if (with_device) sub->add_option("-d,--device", c.device, "Device section name from the config")->capture_default_str();
    sub->add_option("-o,--out", c.out, "Output directory (overrides output_dir)");
    sub->add_option("--threads", c.threads, "Worker threads, 0 = all cores (overrides simulation.threads)");
    sub->add_flag("--svg", c.svg, "Also write an SVG view next to each CSV");
}

struct Context {
    RunConfig cfg;
    fs::path out;
    unsigned threads = 0;
};

Context load(const Common &c) {
    Context ctx;
    ctx.cfg = load_run_config(c.config);
    ctx.out = c.out.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(c.out);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + ctx.out.string() + "': " + ec.message());
    ctx.threads = c.threads ? *c.threads : ctx.cfg.simulation.threads;
    return ctx;
}

std::string path_in(const Context &ctx, const std::string &name) { return (ctx.out / name).string(); }

void summary(const std::vector<std::pair<std::string, std::string>> &kv) {
    for (std::size_t i = 0; i < kv.size(); ++i) std::cout << (i ? " " : "") << kv[i].first << '=' << kv[i].second;
    std::cout << '\n';
}

std::string num(double v) { return format_double(v); }

WavelengthRange jsa_signal_window(const Context &ctx, const NamedDevice &d) {
    return d.jsa_signal.value_or(ctx.cfg.grids.jsa_signal);
}
WavelengthRange jsa_idler_window(const Context &ctx, const NamedDevice &d) {
    return d.jsa_idler.value_or(ctx.cfg.grids.jsa_idler);
}

struct PumpFlags {
    std::optional<double> center_nm;
    std::optional<double> fwhm_nm;

    void add(CLI::App *sub) {
        sub->add_option("--pump-nm", center_nm, "Pump centre wavelength (overrides pump.center_nm)");
        sub->add_option("--fwhm-nm", fwhm_nm, "Pump FWHM bandwidth (overrides pump.fwhm_nm)");
    }
    PumpSpec apply(PumpSpec p) const {
        if (center_nm) p.center_nm = *center_nm;
        if (fwhm_nm) p.fwhm_nm = *fwhm_nm;
        p.validate();
        return p;
    }
};

JointAmplitude device_jsa(const Context &ctx, const NamedDevice &d, const PumpSpec &pump, std::size_t n) {
    return build_jsa(d.spec, pump, jsa_signal_window(ctx, d), jsa_idler_window(ctx, d), n, ctx.threads);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) { return UniformAxis::from_range(lo, hi, n).values(); }

/// Weighted mean wavelength along each axis of a JSI.
std::pair<double, double> jsi_centroid(const PhaseMatchGrid &g) {
    double w = g.values.sum(), s = 0.0, i = 0.0;
    for (Eigen::Index r = 0; r < g.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.values.cols(); ++c) {
            s += g.values(r, c) * g.signal[static_cast<std::size_t>(r)];
            i += g.values(r, c) * g.idler[static_cast<std::size_t>(c)];
        }
    }
    return {s / w, i / w};
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::NoRoot:
        case ErrorKind::EmptySupport: return 3;
        default: return 2;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"cpspdc: counter-propagating SPDC source simulator and tag analysis"};
    app.require_subcommand(1);
    app.footer(
        "Precedence: command-line flags > values in --config > built-in defaults.\n"
        "Exit codes: 0 ok, 2 configuration or input error, 3 numerical failure (no root, empty support).");

    // sfg-map
    Common sfg_c;
    std::optional<std::size_t> sfg_grid;
    auto *sfg = app.add_subcommand("sfg-map", "Phase-matching intensity map |PMF|^2 over signal x idler");
    sfg->alias("sfg_map");
    add_common(sfg, sfg_c);
    sfg->add_option("--grid", sfg_grid, "Points per axis (overrides grids.sfg_n)");

    // jsa
    Common jsa_c;
    PumpFlags jsa_p;
    std::optional<std::size_t> jsa_grid;
    auto *jsa_cmd = app.add_subcommand("jsa", "Joint spectral amplitude (complex CSV pair) and intensity");
    add_common(jsa_cmd, jsa_c);
    jsa_p.add(jsa_cmd);
    jsa_cmd->add_option("--grid", jsa_grid, "Points per axis (overrides grids.jsa_n)");

    // schmidt
    Common sch_c;
    PumpFlags sch_p;
    std::optional<std::size_t> sch_grid;
    auto *sch = app.add_subcommand("schmidt", "Schmidt coefficients, purity and Schmidt number of the JSA");
    add_common(sch, sch_c);
    sch_p.add(sch);
    sch->add_option("--grid", sch_grid, "Points per axis (overrides grids.jsa_n)");

    // marginals
    Common mar_c;
    std::optional<double> mar_pump;
    std::optional<double> mar_detuning;
    std::optional<std::size_t> mar_grid;
    auto *mar = app.add_subcommand("marginals", "CW single-photon spectra of signal and idler");
    add_common(mar, mar_c);
    mar->add_option("--pump-nm", mar_pump, "CW pump wavelength (default: the device's degenerate pump)");
    mar->add_option("--detuning-nm", mar_detuning, "Half-width about 2*pump (overrides grids.marginal_detuning_nm)");
    mar->add_option("--grid", mar_grid, "Points per spectrum (overrides grids.marginal_n)");

    // hom
    Common hom_c;
    std::optional<double> hom_pump;
    std::optional<std::size_t> hom_grid;
    bool hom_path = false;
    auto *hom = app.add_subcommand("hom", "Single-source signal-idler HOM dip under a CW pump");
    add_common(hom, hom_c);
    hom->add_option("--pump-nm", hom_pump, "CW pump wavelength (default: the device's degenerate pump)");
    hom->add_option("--grid", hom_grid, "Detuning grid points (overrides grids.hom_grid_n)");
    hom->add_flag("--path-mm", hom_path, "Write the delay axis as free-space path length in mm");

    // hom-map
    Common map_c;
    std::optional<double> map_slice;
    auto *map_cmd = app.add_subcommand("hom-map", "HOM coincidences over CW pump wavelength x delay");
    map_cmd->alias("hom_map");
    add_common(map_cmd, map_c);
    map_cmd->add_option("--slice-ps", map_slice, "Also write the spectral slice nearest this delay");

    // hom2src
    Common two_c;
    std::string dev_a = "A", dev_b = "B";
    PumpFlags two_p;
    std::optional<std::size_t> two_grid;
    auto *two = app.add_subcommand("hom2src", "Heralded two-source HOM for the signal pair and the idler pair");
    add_common(two, two_c, false);
    two->add_option("--device-a", dev_a, "First source")->capture_default_str();
    two->add_option("--device-b", dev_b, "Second source")->capture_default_str();
    two_p.add(two);
    two->add_option("--grid", two_grid, "JSA points per axis (overrides grids.jsa_n)");

    // simulate-tags
    Common sim_c;
    std::string sim_mode = "pairs";
    std::optional<std::uint64_t> sim_pulses, sim_seed;
    std::optional<double> sim_mu, sim_purity;
    std::string sim_file;
    bool sim_csv = false;
    PumpFlags sim_p;
    auto *sim = app.add_subcommand("simulate-tags", "Monte Carlo time tags for pair (JSI) or single-arm (g2) setups");
    sim->alias("simulate_tags");
    add_common(sim, sim_c);
    sim->add_option("--mode", sim_mode, "pairs: trigger/signal/idler; g2: trigger/d1/d2 behind a splitter")
        ->check(CLI::IsMember({"pairs", "g2"}))
        ->capture_default_str();
    sim->add_option("--pulses", sim_pulses, "Pump pulses (overrides simulation.pulses)");
    sim->add_option("--seed", sim_seed, "RNG seed (overrides simulation.seed)");
    sim->add_option("--mu", sim_mu, "Mean pairs per pulse (overrides the config value for the mode)");
    sim->add_option("--purity", sim_purity, "g2 mode: use a two-mode source of this purity instead of the device");
    sim->add_option("--file", sim_file, "Tag file to write (default <out>/tags_<mode>.cptt)");
    sim->add_flag("--csv", sim_csv, "Also write the CSV debug export");
    sim_p.add(sim);

    // reconstruct-jsi
    Common rec_c;
    std::string rec_tags;
    std::optional<std::size_t> rec_grid;
    std::optional<double> rec_sref, rec_iref;
    std::string rec_anchor = "centroid";
    bool rec_compare = false;
    PumpFlags rec_p;
    auto *rec = app.add_subcommand("reconstruct-jsi", "Dispersive time-of-flight JSI from a pair tag file");
    rec->alias("reconstruct_jsi");
    add_common(rec, rec_c);
    rec->add_option("--tags", rec_tags, "CPTT tag file from simulate-tags --mode pairs")->required()->check(CLI::ExistingFile);
    rec->add_option("--grid", rec_grid, "Bins per axis (overrides grids.jsi_n)");
    rec->add_option("--signal-ref-nm", rec_sref, "Signal reference wavelength (overrides simulation.signal_reference_nm)");
    rec->add_option("--idler-ref-nm", rec_iref, "Idler reference wavelength (overrides simulation.idler_reference_nm)");
    rec->add_option("--anchor", rec_anchor, "centroid: mean delay maps to the reference; trigger: zero delay does")
        ->check(CLI::IsMember({"centroid", "trigger"}))
        ->capture_default_str();
    rec->add_flag("--compare", rec_compare,
                  "Compare with the device JSI; without explicit references its centroid anchors the axes");
    rec_p.add(rec);

    // g2
    Common g2_c;
    std::string g2_tags;
    std::optional<double> g2_bin;
    std::optional<std::size_t> g2_side;
    auto *g2 = app.add_subcommand("g2", "Unheralded g2(0) and purity from a d1/d2 tag file");
    add_common(g2, g2_c, false);
    g2->add_option("--tags", g2_tags, "CPTT tag file from simulate-tags --mode g2")->required()->check(CLI::ExistingFile);
    g2->add_option("--bin-ps", g2_bin, "Histogram bin width (overrides grids.g2_bin_ps)");
    g2->add_option("--side-peaks", g2_side, "Side peaks per side (overrides grids.g2_side_peaks)");

    // car
    Common car_c;
    std::string car_tags;
    std::optional<double> car_window;
    auto *car_cmd = app.add_subcommand("car", "Coincidence-to-accidental ratio from a pair tag file");
    add_common(car_cmd, car_c, false);
    car_cmd->add_option("--tags", car_tags, "CPTT tag file from simulate-tags --mode pairs")->required()->check(CLI::ExistingFile);
    car_cmd->add_option("--window-ps", car_window, "Full coincidence window (overrides grids.car_window_ps)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sfg) {
            auto ctx = load(sfg_c);
            const auto &g = ctx.cfg.grids;
            auto map = sfg_map(ctx.cfg.device(sfg_c.device).spec, g.sfg_signal, g.sfg_idler, sfg_grid.value_or(g.sfg_n),
                               ctx.threads);
            std::string stem = path_in(ctx, "sfg_" + sfg_c.device);
            write_grid(stem, map, "sfg");
            if (sfg_c.svg) write_heatmap_svg(stem + ".svg", map.values, "SFG " + sfg_c.device);
            Eigen::Index r, c;
            map.values.maxCoeff(&r, &c);
            summary({{"n", std::to_string(map.signal.size)},
                     {"peak_signal_nm", num(map.signal[static_cast<std::size_t>(r)])},
                     {"peak_idler_nm", num(map.idler[static_cast<std::size_t>(c)])}});
        } else if (*jsa_cmd) {
            auto ctx = load(jsa_c);
            const auto &d = ctx.cfg.device(jsa_c.device);
            auto f = device_jsa(ctx, d, jsa_p.apply(ctx.cfg.pump), jsa_grid.value_or(ctx.cfg.grids.jsa_n));
            std::string stem = path_in(ctx, "jsa_" + jsa_c.device);
            write_jsa(stem, f);
            auto jsi = joint_intensity(f);
            write_grid(path_in(ctx, "jsi_" + jsa_c.device), jsi, "jsi");
            if (jsa_c.svg) write_heatmap_svg(path_in(ctx, "jsi_" + jsa_c.device + ".svg"), jsi.values, "JSI " + jsa_c.device);
            summary({{"n", std::to_string(f.signal.size)}, {"purity", num(purity(schmidt_decompose(f)))}});
        } else if (*sch) {
            auto ctx = load(sch_c);
            const auto &d = ctx.cfg.device(sch_c.device);
            auto s = schmidt_decompose(device_jsa(ctx, d, sch_p.apply(ctx.cfg.pump), sch_grid.value_or(ctx.cfg.grids.jsa_n)));
            std::vector<double> k(s.rank());
            for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i);
            write_curve_csv(path_in(ctx, "schmidt_" + sch_c.device + ".csv"), k, s.coefficients);
            summary({{"purity", num(purity(s))}, {"schmidt_number", num(schmidt_number(s))}});
        } else if (*mar) {
            auto ctx = load(mar_c);
            const auto &d = ctx.cfg.device(mar_c.device).spec;
            double pump = mar_pump ? *mar_pump : find_degenerate_pump(d);
            auto m = marginal_spectra_cw(d, pump, mar_detuning.value_or(ctx.cfg.grids.marginal_detuning_nm),
                                         mar_grid.value_or(ctx.cfg.grids.marginal_n));
            std::string stem = path_in(ctx, "marginals_" + mar_c.device);
            write_curve_csv(stem + "_signal.csv", m.signal.values(), m.signal_values);
            write_curve_csv(stem + "_idler.csv", m.idler.values(), m.idler_values);
            if (mar_c.svg) {
                write_line_svg(stem + "_signal.svg", m.signal.values(), m.signal_values, "signal");
                write_line_svg(stem + "_idler.svg", m.idler.values(), m.idler_values, "idler");
            }
            auto peak = [](const UniformAxis &a, const std::vector<double> &v) {
                return a[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
            };
            summary({{"pump_nm", num(pump)},
                     {"signal_peak_nm", num(peak(m.signal, m.signal_values))},
                     {"idler_peak_nm", num(peak(m.idler, m.idler_values))}});
        } else if (*hom) {
            auto ctx = load(hom_c);
            const auto &g = ctx.cfg.grids;
            const auto &d = ctx.cfg.device(hom_c.device).spec;
            double pump = hom_pump ? *hom_pump : find_degenerate_pump(d);
            auto curve = hom_cw_dip(d, pump, linspace(g.hom_delay_lo_ps, g.hom_delay_hi_ps, g.hom_n_delay),
                                    g.hom_detuning_nm, hom_grid.value_or(g.hom_grid_n));
            auto v = visibility(curve);
            if (hom_path) curve = delay_to_path(curve);
            std::string stem = path_in(ctx, "hom_" + hom_c.device);
            write_curve_csv(stem + ".csv", curve);
            if (hom_c.svg) write_line_svg(stem + ".svg", curve.x, curve.values, "HOM " + hom_c.device);
            summary({{"pump_nm", num(pump)}, {"visibility", num(v.value)}, {"clamped", v.clamped ? "true" : "false"}});
        } else if (*map_cmd) {
            auto ctx = load(map_c);
            const auto &g = ctx.cfg.grids;
            auto m = hom_map(ctx.cfg.device(map_c.device).spec, {g.hom_map_pump_lo_nm, g.hom_map_pump_hi_nm},
                             g.hom_map_delay_lo_ps, g.hom_map_delay_hi_ps, g.hom_map_n_pump, g.hom_map_n_delay,
                             g.hom_detuning_nm, g.hom_grid_n, ctx.threads);
            std::string stem = path_in(ctx, "hom_map_" + map_c.device);
            write_matrix_csv(stem + ".csv", m.pump, m.delay, m.values, "pump_nm\\delay_ps");
            if (map_c.svg) write_heatmap_svg(stem + ".svg", m.values, "HOM map " + map_c.device);
            if (map_slice) {
                auto slice = hom_spectral_slice(m, *map_slice);
                write_curve_csv(stem + "_slice.csv", slice);
            }
            summary({{"visibility", num(std::clamp(1.0 - m.values.minCoeff(), 0.0, 1.0))},
                     {"min", num(m.values.minCoeff())},
                     {"max", num(m.values.maxCoeff())}});
        } else if (*two) {
            auto ctx = load(two_c);
            const auto &a = ctx.cfg.device(dev_a);
            const auto &b = ctx.cfg.device(dev_b);
            auto pump = two_p.apply(ctx.cfg.pump);
            std::size_t n = two_grid.value_or(ctx.cfg.grids.jsa_n);
            // Both sources share A's window so the heralded states live on one axis.
            auto fa = device_jsa(ctx, a, pump, n);
            auto fb = build_jsa(b.spec, pump, jsa_signal_window(ctx, a), jsa_idler_window(ctx, a), n, ctx.threads);
            const auto &g = ctx.cfg.grids;
            auto delays = linspace(g.hom_delay_lo_ps, g.hom_delay_hi_ps, g.hom_n_delay);
            std::vector<std::pair<std::string, std::string>> kv;
            for (Arm photon : {Arm::Signal, Arm::Idler}) {
                Arm herald = photon == Arm::Signal ? Arm::Idler : Arm::Signal;
                auto curve = heralded_two_source_hom(heralded_density_matrix(fa, herald),
                                                     heralded_density_matrix(fb, herald), delays);
                std::string stem = path_in(ctx, "hom2src_" + to_string(photon));
                write_curve_csv(stem + ".csv", curve);
                if (two_c.svg) write_line_svg(stem + ".svg", curve.x, curve.values, to_string(photon) + " pair");
                kv.emplace_back("visibility_" + to_string(photon), num(visibility(curve).value));
            }
            summary(kv);
        } else if (*sim) {
            auto ctx = load(sim_c);
            const auto &s = ctx.cfg.simulation;
            std::uint64_t pulses = sim_pulses.value_or(s.pulses);
            std::uint64_t seed = sim_seed.value_or(s.seed);
            std::string file = sim_file.empty() ? path_in(ctx, "tags_" + sim_mode + ".cptt") : sim_file;
            TimeTagStream stream;
            double generating_purity = 0.0;
            if (sim_mode == "pairs") {
                if (sim_purity) throw Error(ErrorKind::InvalidArgument, "--purity applies to --mode g2 only");
                const auto &d = ctx.cfg.device(sim_c.device);
                auto schmidt = schmidt_decompose(device_jsa(ctx, d, sim_p.apply(ctx.cfg.pump), ctx.cfg.grids.jsa_n));
                generating_purity = purity(schmidt);
                PairSimulationConfig pc;
                pc.brightness.mean_pairs_per_pulse = sim_mu.value_or(s.mean_pairs_per_pulse);
                pc.pulses = pulses;
                pc.repetition_period_ps = 1e6 / ctx.cfg.pump.repetition_rate_mhz;
                pc.signal_detector = ctx.cfg.detector;
                pc.idler_detector = ctx.cfg.detector;
                pc.signal_dispersion_ps_per_nm = s.signal_dispersion_ps_per_nm;
                pc.idler_dispersion_ps_per_nm = s.idler_dispersion_ps_per_nm;
                pc.signal_reference_nm = s.signal_reference_nm;
                pc.idler_reference_nm = s.idler_reference_nm;
                pc.signal_filter = s.signal_filter;
                pc.idler_filter = s.idler_filter;
                pc.sampling = s.sampling;
                pc.seed = seed;
                pc.threads = ctx.threads;
                stream = simulate_pair_tags(schmidt, pc);
            } else {
                SchmidtDecomposition schmidt;
                if (sim_purity) {
                    schmidt = synthetic_schmidt(two_mode_spectrum_for_purity(*sim_purity));
                } else {
                    const auto &d = ctx.cfg.device(sim_c.device);
                    schmidt = schmidt_decompose(device_jsa(ctx, d, sim_p.apply(ctx.cfg.pump), ctx.cfg.grids.jsa_n));
                }
                generating_purity = purity(schmidt);
                G2SimulationConfig gc;
                gc.brightness.mean_pairs_per_pulse = sim_mu.value_or(s.g2_mean_pairs_per_pulse);
                gc.pulses = pulses;
                gc.repetition_period_ps = 1e6 / ctx.cfg.pump.repetition_rate_mhz;
                gc.splitter_ratio = s.splitter_ratio;
                gc.detector1 = ctx.cfg.detector;
                gc.detector2 = ctx.cfg.detector;
                gc.arm = s.g2_arm;
                gc.filter = s.g2_arm == Arm::Signal ? s.signal_filter : s.idler_filter;
                gc.seed = seed;
                gc.threads = ctx.threads;
                stream = simulate_g2_tags(schmidt, gc);
            }
            write_cptt(file, stream);
            if (sim_csv) write_tags_csv(fs::path(file).replace_extension(".csv").string(), stream);
            summary({{"pulses", std::to_string(pulses)},
                     {"events", std::to_string(stream.events.size())},
                     {"generating_purity", num(generating_purity)}});
        } else if (*rec) {
            auto ctx = load(rec_c);
            const auto &s = ctx.cfg.simulation;
            auto stream = read_cptt(rec_tags);
            std::size_t n = rec_grid.value_or(ctx.cfg.grids.jsi_signal.n);
            BinSpec sb{ctx.cfg.grids.jsi_signal.lo_nm, ctx.cfg.grids.jsi_signal.hi_nm, n};
            BinSpec ib{ctx.cfg.grids.jsi_idler.lo_nm, ctx.cfg.grids.jsi_idler.hi_nm, n};
            double sref = s.signal_reference_nm, iref = s.idler_reference_nm;
            std::optional<PhaseMatchGrid> generating;
            if (rec_compare) {
                const auto &d = ctx.cfg.device(rec_c.device);
                generating = joint_intensity(device_jsa(ctx, d, rec_p.apply(ctx.cfg.pump), ctx.cfg.grids.jsa_n));
                std::tie(sref, iref) = jsi_centroid(*generating);
            }
            if (rec_sref) sref = *rec_sref;
            if (rec_iref) iref = *rec_iref;
            JsiReconstructionOptions opt;
            opt.anchor = rec_anchor == "trigger" ? AnchorMode::TriggerZero : AnchorMode::Centroid;
            opt.signal_mask = s.signal_filter;
            opt.idler_mask = s.idler_filter;
            auto r = reconstruct_jsi(stream, stream.channel("trigger"),
                                     {stream.channel("signal"), s.signal_dispersion_ps_per_nm, sref},
                                     {stream.channel("idler"), s.idler_dispersion_ps_per_nm, iref}, sb, ib, opt);
            std::string stem = path_in(ctx, "jsi_reconstructed");
            write_grid(stem, r.jsi, "jsi_reconstructed");
            if (rec_c.svg) write_heatmap_svg(stem + ".svg", r.jsi.values, "reconstructed JSI");
            std::vector<std::pair<std::string, std::string>> kv{{"pairs", std::to_string(r.pairs_used)}};
            if (r.pairs_used > 0) kv.emplace_back("purity", num(purity(schmidt_decompose(jsa_from_jsi(r.jsi)))));
            if (generating && r.pairs_used > 0) {
                kv.emplace_back("fidelity", num(fidelity(r.jsi, rebin(*generating, sb.axis(), ib.axis()))));
            }
            summary(kv);
        } else if (*g2) {
            auto ctx = load(g2_c);
            const auto &g = ctx.cfg.grids;
            auto stream = read_cptt(g2_tags);
            auto T = static_cast<double>(stream.repetition_period_ps);
            auto side = static_cast<int>(g2_side.value_or(g.g2_side_peaks));
            auto h = histogram_coincidences(stream, stream.channel("d1"), stream.channel("d2"), g2_bin.value_or(g.g2_bin_ps),
                                            (side + 0.5) * T);
            write_curve_csv(path_in(ctx, "g2_histogram.csv"), h.centers_ps, h.counts);
            if (g2_c.svg) write_line_svg(path_in(ctx, "g2_histogram.svg"), h.centers_ps, h.counts, "d1-d2 coincidences");
            auto e = g2_from_histogram(h, T, side);
            summary({{"g2_zero", num(e.g2_zero)}, {"purity", num(e.purity)}, {"err", num(e.error)}});
        } else if (*car_cmd) {
            auto ctx = load(car_c);
            auto stream = read_cptt(car_tags);
            auto e = car(stream, stream.channel("signal"), stream.channel("idler"),
                         static_cast<double>(stream.repetition_period_ps), car_window.value_or(ctx.cfg.grids.car_window_ps));
            summary({{"car", num(e.car)}, {"coincidences", num(e.coincidences)}, {"accidentals", num(e.accidentals)}});
        }
    } catch (const Error &e) {
        std::cerr << "cpspdc: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "cpspdc: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
