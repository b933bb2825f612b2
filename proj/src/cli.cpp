// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>

#include "qmem/afc.hpp"
#include "qmem/analysis.hpp"
#include "qmem/error.hpp"
#include "qmem/montecarlo.hpp"
#include "qmem/scenario.hpp"
#include "qmem/spdc.hpp"
#include "qmem/tagfile.hpp"

namespace qmem {

namespace {

struct Options {
    std::string scenario = "pr_yso";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_path;

    std::string sweep;
    std::string curve;
    std::string tau_range;
    bool stats = false;
    std::vector<double> powers;

    std::string what;
    std::string tagfile;
    std::optional<double> window_ns, center_ns, bin_ns;
    std::string range_ns;
    bool echo = false;
    std::string normalization = "singles";
    int side_windows = 2;
    std::uint64_t split_seed = 0;
    double visibility = -1, visibility_error = 0;
    double p00 = 0, p01 = 0, p10 = 0, p11 = 0;
    double noise_prob = 0, eta = 0;
    std::optional<double> eta_herald;
};

struct Range {
    double lo, hi, step;
};

Range parse_range(const std::string& s, const std::string& what)
{
    Range r{};
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':'
        || !(in >> std::ws).eof())
        throw ConfigError(what + ": expected lo:hi:step, got '" + s + "'");
    if (!(r.step > 0) || !(r.hi >= r.lo))
        throw ConfigError(what + ": need lo <= hi and step > 0");
    return r;
}

std::vector<double> grid(const Range& r)
{
    auto n = static_cast<long>(std::floor((r.hi - r.lo) / r.step * (1 + 1e-12)));
    if (n > 10'000'000)
        throw ConfigError("range has too many points");
    std::vector<double> v;
    for (long i = 0; i <= n; ++i)
        v.push_back(r.lo + static_cast<double>(i) * r.step);
    return v;
}

void kv(std::ostream& out, const std::string& key, double value)
{
    out << key << " = " << value << '\n';
}

void kv(std::ostream& out, const std::string& key, const std::string& value)
{
    out << key << " = " << value << '\n';
}

void witness(std::ostream& out, const std::string& name, const analysis::WitnessResult& w)
{
    kv(out, name, w.value);
    kv(out, name + "_error", w.statistical_error);
    kv(out, "classical_bound", w.classical_bound);
    kv(out, "violated", w.violated ? "true" : "false");
}

const afc::MemorySpec& require_memory(const Scenario& sc)
{
    if (!sc.experiment.memory)
        throw ConfigError("scenario " + sc.name + " has no [memory] section");
    return *sc.experiment.memory;
}

void cmd_efficiency(const Options& o, std::ostream& out)
{
    Scenario sc = load_scenario(o.scenario, o.overrides);
    const afc::MemorySpec& mem = require_memory(sc);
    if (!o.sweep.empty()) {
        auto eq = o.sweep.find('=');
        if (eq == std::string::npos || o.sweep.substr(0, eq) != "d_eff")
            throw ConfigError("--sweep: only d_eff=lo:hi:step is supported");
        Range r = parse_range(o.sweep.substr(eq + 1), "--sweep");
        double deph = afc::dephasing_factor(mem.comb());
        out << "d_eff,eta_afc\n";
        for (double d : grid(r)) {
            double eta = mem.direction() == afc::Direction::forward
                             ? afc::forward_efficiency(d, deph)
                             : afc::backward_efficiency(d, deph);
            out << d << ',' << eta << '\n';
        }
        return;
    }
    afc::EfficiencyBudget b = afc::total_efficiency(mem);
    kv(out, "scenario", sc.name);
    kv(out, "d_eff", b.d_eff);
    kv(out, "eta_deph", b.eta_deph);
    kv(out, "eta_afc", b.eta_afc);
    kv(out, "eta_control", b.eta_control);
    kv(out, "eta_spin", b.eta_spin);
    kv(out, "eta_total", b.eta_total);
    kv(out, "transmission", afc::memory_transmission(mem));
    kv(out, "echo_time_s", afc::echo_times(mem.comb(), mem.spin_wave_time_s()).front());
    kv(out, "multimode_capacity", afc::multimode_capacity(mem.comb()));
}

void cmd_source(const Options& o, std::ostream& out)
{
    Scenario sc = load_scenario(o.scenario, o.overrides);
    const mc::ExperimentConfig& e = sc.experiment;
    const double bw = e.pair_bandwidth_hz.value_or(
        std::min(e.source.signal_linewidth_hz, e.source.idler_linewidth_hz));
    if (o.stats) {
        std::vector<double> powers = o.powers.empty() ? sc.powers_mw : o.powers;
        out << "power_mw,p,mean_photons,g2_cross\n";
        for (double power : powers) {
            spdc::SourceSpec s = e.source;
            s.pump_power_mw = power;
            auto st = spdc::tmss_statistics(spdc::pair_probability(s, bw, sc.window_s));
            out << power << ',' << st.p << ',' << st.mean_signal_photons << ','
                << st.g2_cross << '\n';
        }
        return;
    }
    if (o.curve.empty())
        throw ConfigError("source: give --curve g2|G2 or --stats");
    if (o.curve != "g2" && o.curve != "G2")
        throw ConfigError("source: --curve must be g2 or G2");
    if (o.tau_range.empty())
        throw ConfigError("source: --curve needs --tau-range lo:hi:step (seconds)");
    std::vector<double> taus = grid(parse_range(o.tau_range, "--tau-range"));
    double p = spdc::pair_probability(e.source, bw, sc.window_s);
    spdc::CorrelationCurve single = spdc::single_mode_g2(e.source, p, taus);
    spdc::CorrelationCurve curve = single;
    if (o.curve == "G2") {
        auto raw = spdc::multimode_g2_cross(e.source, taus,
                                            spdc::default_mode_cutoff(e.source));
        double peak = *std::max_element(single.values.begin(), single.values.end());
        curve = spdc::normalize_to_peak(raw, peak);
    }
    out << "tau_s,value,error\n";
    for (std::size_t i = 0; i < taus.size(); ++i)
        out << taus[i] << ',' << curve.values[i] << ",0\n";
}

void cmd_simulate(const Options& o, std::ostream& out)
{
    Scenario sc = load_scenario(o.scenario, o.overrides);
    if (o.out_path.empty())
        throw ConfigError("simulate: --out is required");
    mc::ExperimentConfig e = sc.experiment;
    if (o.seed)
        e.seed = *o.seed;
    if (e.threads == 0)
        e.threads = mc::default_threads();
    mc::RunResult r = mc::run(e);
    write_tag_file(o.out_path, {e.duration_ps(), e.seed}, r.tags);

    KeyValues m{{"format", "qmemtags v1"},
                {"scenario", sc.name},
                {"seed", std::to_string(e.seed)},
                {"duration_ps", std::to_string(e.duration_ps())},
                {"tags.file", std::filesystem::path(o.out_path).filename().string()},
                {"tags.sha256", sha256_file(o.out_path)},
                {"tags.count", std::to_string(r.tags.size())},
                {"pairs_generated", std::to_string(r.pairs_generated)}};
    {
        std::ostringstream p;
        p << std::setprecision(12) << r.pair_probability;
        m.emplace_back("pair_probability_per_slot", p.str());
    }
    for (const auto& [origin, n] : r.counts)
        m.emplace_back("counts." + std::string(to_string(origin)), std::to_string(n));
    for (const auto& [k, v] : sc.echo())
        m.emplace_back("config." + k, v);
    write_manifest(o.out_path + ".manifest", m);
    for (std::size_t i = 0; i < 8 + r.counts.size() + 1; ++i)
        kv(out, m[i].first, m[i].second);
}

void cmd_analyze(const Options& o, std::ostream& out)
{
    using namespace analysis;
    const std::string& w = o.what;
    if (w == "witness-chsh") {
        if (o.visibility < 0)
            throw ConfigError("witness-chsh: --visibility is required");
        witness(out, "S", chsh_from_visibility(o.visibility, o.visibility_error));
        return;
    }
    if (w == "concurrence") {
        if (o.visibility < 0)
            throw ConfigError("concurrence: --visibility is required");
        Concurrence c = concurrence(o.visibility, o.p00, o.p01, o.p10, o.p11);
        kv(out, "concurrence", c.value);
        kv(out, "concurrence_raw", c.raw);
        return;
    }
    if (w == "mu1") {
        double m = mu1(o.noise_prob, o.eta);
        kv(out, "mu1", m);
        if (o.eta_herald) {
            HeraldCompatibility h = herald_compatibility(m, *o.eta_herald);
            kv(out, "herald_ratio", h.ratio);
            kv(out, "herald_compatible", h.compatible ? "true" : "false");
        }
        return;
    }
    if (w != "g2" && w != "hist" && w != "fit" && w != "witness-cs")
        throw ConfigError("analyze: unknown analysis '" + w + "'");
    if (o.tagfile.empty())
        throw ConfigError("analyze " + w + ": a tag file is required");

    Scenario sc = load_scenario(o.scenario, o.overrides);
    TagFile file = read_tag_file(o.tagfile);
    const double duration = static_cast<double>(file.header.duration_ps) * 1e-12;
    const double window = o.window_ns ? *o.window_ns * 1e-9 : sc.window_s;
    double center = o.center_ns ? *o.center_ns * 1e-9 : 0.0;
    if (o.echo) {
        const afc::MemorySpec& mem = require_memory(sc);
        center = afc::echo_times(mem.comb(), mem.spin_wave_time_s()).front();
    }

    if (w == "g2") {
        const bool sides = o.normalization != "singles";
        const bool before = o.normalization == "preceding";
        const double reach = sides ? (o.side_windows + 1.5) * window : 0.5 * window;
        auto h = histogram(file.tags, Channel::idler, Channel::signal, window,
                           center - reach, center + (sides && !before ? reach : 0.5 * window),
                           duration);
        WitnessResult g = sides ? g2_sidebands(h, window, center, o.side_windows, before)
                                : g2_windowed(h, window, center);
        kv(out, "normalization", o.normalization);
        kv(out, "window_s", window);
        kv(out, "center_s", center);
        kv(out, "coincidences",
           static_cast<double>(window_counts(h, window, center).coincidences));
        kv(out, "singles_signal", static_cast<double>(h.singles.count_b));
        kv(out, "singles_idler", static_cast<double>(h.singles.count_a));
        witness(out, "g2", g);
        return;
    }
    if (w == "witness-cs") {
        witness(out, "R", cauchy_schwarz_from_tags(file.tags, window, duration, o.split_seed));
        return;
    }

    const double bin = o.bin_ns ? *o.bin_ns * 1e-9 : sc.bin_s;
    double lo = -100 * bin, hi = 100 * bin;
    if (!o.range_ns.empty()) {
        Range r = parse_range(o.range_ns + ":1", "--range-ns");
        lo = r.lo * 1e-9;
        hi = r.hi * 1e-9;
    }
    auto h = histogram(file.tags, Channel::idler, Channel::signal, bin, lo, hi, duration);
    if (w == "hist") {
        out << "tau_s,value,error\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            out << h.taus[i] << ',' << h.counts[i] << ','
                << std::sqrt(static_cast<double>(h.counts[i])) << '\n';
        return;
    }
    ExponentialFit f = fit_two_sided_exponential(h);
    kv(out, "nu_plus_hz", f.nu_plus_hz);
    kv(out, "nu_plus_error_hz", f.nu_plus_error_hz);
    kv(out, "nu_minus_hz", f.nu_minus_hz);
    kv(out, "nu_minus_error_hz", f.nu_minus_error_hz);
    kv(out, "tau_peak_s", f.tau_peak_s);
    kv(out, "amplitude", f.amplitude);
    kv(out, "floor", f.floor);
    kv(out, "fwhm_s", f.fwhm_s);
    if (f.fwhm_with_floor_s)
        kv(out, "fwhm_with_floor_s", *f.fwhm_with_floor_s);
    kv(out, "chi2_per_dof", f.chi2_per_dof);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Quantum-memory and photon-pair source toolkit", "qmem"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--scenario", o.scenario, "scenario file or preset name (nd_yso, pr_yso)");
    app.add_option("--set", o.overrides, "override section.key=value")->take_all();
    app.add_option("--seed", o.seed, "simulation seed");
    app.add_option("--out", o.out_path, "output tag file");

    auto* eff = app.add_subcommand("efficiency", "memory efficiency budget");
    eff->add_option("--sweep", o.sweep, "d_eff=lo:hi:step, emits CSV");

    auto* src = app.add_subcommand("source", "pair-source statistics and curves");
    src->add_option("--curve", o.curve, "g2 (single mode) or G2 (multimode)");
    src->add_option("--tau-range", o.tau_range, "lo:hi:step in seconds");
    src->add_flag("--stats", o.stats, "p, mean photon number and g2 versus pump power");
    src->add_option("--powers", o.powers, "pump powers in mW")->delimiter(',');

    app.add_subcommand("simulate", "Monte Carlo time-tag stream");

    auto* ana = app.add_subcommand("analyze", "estimators over a tag file");
    ana->add_option("analysis", o.what, "g2|hist|fit|witness-cs|witness-chsh|concurrence|mu1")
        ->required();
    ana->add_option("tagfile", o.tagfile, "tag file");
    ana->add_option("--window-ns", o.window_ns);
    ana->add_option("--center-ns", o.center_ns);
    ana->add_flag("--echo", o.echo, "centre the window on the memory echo");
    ana->add_option("--normalization", o.normalization,
                    "g2 normalisation: singles (global rates), sidebands (displaced "
                    "windows on both sides) or preceding (displaced windows before the peak)")
        ->check(CLI::IsMember({"singles", "sidebands", "preceding"}));
    ana->add_option("--side-windows", o.side_windows,
                    "displaced windows per side for sidebands/preceding")
        ->check(CLI::Range(1, 100));
    ana->add_option("--bin-ns", o.bin_ns);
    ana->add_option("--range-ns", o.range_ns, "lo:hi histogram range");
    ana->add_option("--split-seed", o.split_seed, "seed of the emulated beam splitter");
    ana->add_option("--visibility", o.visibility);
    ana->add_option("--visibility-error", o.visibility_error);
    ana->add_option("--p00", o.p00);
    ana->add_option("--p01", o.p01);
    ana->add_option("--p10", o.p10);
    ana->add_option("--p11", o.p11);
    ana->add_option("--noise-prob", o.noise_prob, "noise probability per window");
    ana->add_option("--eta", o.eta, "total memory efficiency");
    ana->add_option("--eta-herald", o.eta_herald, "heralding efficiency");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    out << std::setprecision(10);
    try {
        if (eff->parsed())
            cmd_efficiency(o, out);
        else if (src->parsed())
            cmd_source(o, out);
        else if (ana->parsed())
            cmd_analyze(o, out);
        else
            cmd_simulate(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return exit_domain;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_ok;
}

}  // namespace qmem
