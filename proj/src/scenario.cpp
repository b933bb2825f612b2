// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qmem/error.hpp"

#ifndef QMEM_PRESET_DIR
#define QMEM_PRESET_DIR "presets"
#endif

namespace qmem {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"source",
         {"pump_power_mw", "brightness_pairs_per_mw_mhz_s", "signal_linewidth_mhz",
          "idler_linewidth_mhz", "fsr_signal_mhz", "fsr_idler_mhz", "transit_offset_ns",
          "phase_matching_bandwidth_ghz", "modes_per_cluster", "pair_bandwidth_mhz",
          "noise_rate_hz"}},
        {"memory",
         {"enabled", "peak_depth", "delta_mhz", "finesse", "tooth", "bandwidth_mhz",
          "direction", "eta_control", "spin_linewidth_khz", "spin_time_us",
          "spin_decay", "cavity_reflectivity", "cavity_round_trip_loss"}},
        {"chains.signal",
         {"transmissions", "filters_mhz", "efficiency", "dark_rate_hz", "jitter_ps",
          "dead_time_ns"}},
        {"chains.idler",
         {"transmissions", "filters_mhz", "efficiency", "dark_rate_hz", "jitter_ps",
          "dead_time_ns"}},
        {"run",
         {"duration_s", "slot_ns", "seed", "threads", "gating", "off_delay_ns",
          "recovery_ns", "window_ns", "bin_ns", "powers_mw"}},
    };
    return s;
}

std::string trim(std::string s)
{
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

class Values {
  public:
    explicit Values(std::map<std::string, std::string> v) : v_(std::move(v)) {}

    bool has(const std::string& key) const { return v_.count(key) > 0; }

    const std::string& text(const std::string& key) const
    {
        auto it = v_.find(key);
        if (it == v_.end())
            throw ConfigError("scenario: missing key " + key);
        return it->second;
    }

    double number(const std::string& key) const { return parse(key, text(key)); }

    double number(const std::string& key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string& s = text(key);
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ConfigError("scenario: " + key + " is not a non-negative integer: '" + s + "'");
        return v;
    }

    std::vector<double> list(const std::string& key) const
    {
        std::vector<double> out;
        if (!has(key))
            return out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!trim(item).empty())
                out.push_back(parse(key, trim(item)));
        return out;
    }

    bool flag(const std::string& key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string& s = text(key);
        if (s == "true" || s == "yes" || s == "1")
            return true;
        if (s == "false" || s == "no" || s == "0")
            return false;
        throw ConfigError("scenario: " + key + " must be true or false");
    }

    std::string choice(const std::string& key, const std::set<std::string>& options,
                       const std::string& fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string& s = text(key);
        if (!options.count(s))
            throw ConfigError("scenario: invalid value '" + s + "' for " + key);
        return s;
    }

  private:
    static double parse(const std::string& key, const std::string& s)
    {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
            throw ConfigError("scenario: " + key + " is not a number: '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> v_;
};

void check_key(const std::string& section, const std::string& key)
{
    auto sec = schema().find(section);
    if (sec == schema().end())
        throw ConfigError("scenario: unknown section [" + section + "]");
    if (!sec->second.count(key))
        throw ConfigError("scenario: unknown key '" + key + "' in [" + section + "]");
}

mc::DetectionChain read_chain(const Values& v, const std::string& s)
{
    mc::DetectionChain c;
    c.transmissions = v.list(s + ".transmissions");
    std::vector<double> f = v.list(s + ".filters_mhz");
    if (f.size() % 2)
        throw ConfigError("scenario: " + s + ".filters_mhz needs center,fwhm pairs");
    for (std::size_t i = 0; i < f.size(); i += 2)
        c.filters.push_back({f[i] * 1e6, f[i + 1] * 1e6});
    c.detector.efficiency = v.number(s + ".efficiency", 1);
    c.detector.dark_rate_hz = v.number(s + ".dark_rate_hz", 0);
    c.detector.jitter_sigma_s = v.number(s + ".jitter_ps", 0) * 1e-12;
    c.detector.dead_time_s = v.number(s + ".dead_time_ns", 0) * 1e-9;
    c.validate();
    return c;
}

Scenario build(const std::map<std::string, std::string>& raw, const std::string& name)
{
    Values v(raw);
    Scenario sc;
    sc.name = name;
    sc.values = raw;
    mc::ExperimentConfig& e = sc.experiment;

    spdc::SourceSpec& s = e.source;
    s.pump_power_mw = v.number("source.pump_power_mw");
    s.spectral_brightness = v.number("source.brightness_pairs_per_mw_mhz_s");
    s.signal_linewidth_hz = v.number("source.signal_linewidth_mhz") * 1e6;
    s.idler_linewidth_hz = v.number("source.idler_linewidth_mhz") * 1e6;
    s.phase_matching_bandwidth_hz = v.number("source.phase_matching_bandwidth_ghz") * 1e9;
    // Without a source cavity one mode spans the whole phase-matching band.
    s.fsr_signal_hz = v.number("source.fsr_signal_mhz", s.phase_matching_bandwidth_hz * 1e-6) * 1e6;
    s.fsr_idler_hz = v.number("source.fsr_idler_mhz", s.phase_matching_bandwidth_hz * 1e-6) * 1e6;
    s.transit_offset_s = v.number("source.transit_offset_ns", 0) * 1e-9;
    s.modes_per_cluster = static_cast<int>(v.integer("source.modes_per_cluster", 1));
    if (v.has("source.pair_bandwidth_mhz"))
        e.pair_bandwidth_hz = v.number("source.pair_bandwidth_mhz") * 1e6;
    e.noise_rate_hz = v.number("source.noise_rate_hz", 0);

    if (v.flag("memory.enabled", v.has("memory.delta_mhz"))) {
        std::string tooth = v.choice("memory.tooth", {"square", "gaussian", "lorentzian"}, "square");
        afc::ToothKind kind = tooth == "square"     ? afc::ToothKind::square
                              : tooth == "gaussian" ? afc::ToothKind::gaussian
                                                    : afc::ToothKind::lorentzian;
        double delta = v.number("memory.delta_mhz") * 1e6;
        auto comb = afc::CombSpec::from_finesse(
            v.number("memory.peak_depth"), delta, v.number("memory.finesse"), kind,
            v.number("memory.bandwidth_mhz", delta * 1e-6) * 1e6);
        auto dir = v.choice("memory.direction", {"forward", "backward"}, "forward") == "forward"
                       ? afc::Direction::forward
                       : afc::Direction::backward;
        std::optional<afc::Cavity> cavity;
        if (v.has("memory.cavity_reflectivity"))
            cavity = afc::Cavity{v.number("memory.cavity_reflectivity"),
                                 v.number("memory.cavity_round_trip_loss", 0)};
        auto model = v.choice("memory.spin_decay", {"gaussian", "exponential"}, "gaussian")
                             == "gaussian"
                         ? afc::SpinDecayModel::gaussian
                         : afc::SpinDecayModel::exponential;
        e.memory = afc::MemorySpec(comb, dir, v.number("memory.eta_control", 1),
                                   v.number("memory.spin_linewidth_khz", 0) * 1e3,
                                   v.number("memory.spin_time_us", 0) * 1e-6, cavity, model);
    }

    e.signal_chain = read_chain(v, "chains.signal");
    e.idler_chain = read_chain(v, "chains.idler");

    e.duration_s = v.number("run.duration_s");
    e.slot_width_s = v.number("run.slot_ns") * 1e-9;
    e.seed = v.integer("run.seed", 0);
    e.threads = static_cast<unsigned>(v.integer("run.threads", 0));
    if (v.choice("run.gating", {"cw", "off_after_herald"}, "cw") == "off_after_herald") {
        e.gating.mode = mc::PumpGating::off_after_herald;
        e.gating.off_delay_s = v.number("run.off_delay_ns", 0) * 1e-9;
        e.gating.recovery_s = v.number("run.recovery_ns") * 1e-9;
    }
    sc.window_s = v.number("run.window_ns", e.slot_width_s * 1e9) * 1e-9;
    sc.bin_s = v.number("run.bin_ns", sc.window_s * 1e9 / 10) * 1e-9;
    sc.powers_mw = v.list("run.powers_mw");
    if (sc.powers_mw.empty())
        sc.powers_mw = {s.pump_power_mw};
    detail::require(sc.window_s > 0 && sc.bin_s > 0, "scenario: window and bin must be > 0");
    e.validate();
    return sc;
}

}  // namespace

KeyValues Scenario::echo() const
{
    KeyValues kv;
    for (const auto& [k, val] : values)
        kv.emplace_back(k, val);
    return kv;
}

std::filesystem::path preset_directory()
{
    if (const char* env = std::getenv("QMEM_PRESET_DIR"))
        return env;
    return QMEM_PRESET_DIR;
}

Scenario parse_scenario(const std::string& text, const std::string& name,
                        const std::vector<std::string>& overrides)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("scenario " + name + ": " + e.message() + " on line "
                          + std::to_string(e.line()));
    }
    std::map<std::string, std::string> raw;
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw ConfigError("scenario " + name + ": key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            check_key(section, key);
            raw[section + "." + key] = trim(value.data());
        }
    }
    for (const std::string& o : overrides) {
        auto eq = o.find('=');
        auto dot = o.rfind('.', eq);
        if (eq == std::string::npos || dot == std::string::npos || dot == 0)
            throw ConfigError("override '" + o + "' is not section.key=value");
        std::string section = trim(o.substr(0, dot));
        std::string key = trim(o.substr(dot + 1, eq - dot - 1));
        check_key(section, key);
        raw[section + "." + key] = trim(o.substr(eq + 1));
    }
    return build(raw, name);
}

Scenario load_scenario(const std::string& spec, const std::vector<std::string>& overrides)
{
    std::filesystem::path path = spec;
    if (!std::filesystem::exists(path) && path.extension().empty()
        && path.filename() == path) {
        path = preset_directory() / (spec + ".ini");
        if (!std::filesystem::exists(path))
            throw ConfigError("unknown preset or scenario file '" + spec + "'");
    }
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read scenario '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.stem().string(), overrides);
}

}  // namespace qmem
