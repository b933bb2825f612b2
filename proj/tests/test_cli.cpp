// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "qmem/analysis.hpp"
#include "qmem/cli.hpp"
#include "qmem/error.hpp"
#include "qmem/scenario.hpp"
#include "qmem/tagfile.hpp"

using namespace qmem;
using doctest::Approx;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> parse_kv(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find(" = ");
        if (eq != std::string::npos)
            kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

double num(const std::map<std::string, std::string>& kv, const std::string& k)
{
    REQUIRE(kv.count(k));
    return std::stod(kv.at(k));
}

std::vector<std::vector<double>> parse_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::filesystem::path scratch()
{
    auto d = std::filesystem::temp_directory_path() / "qmem_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("efficiency table and sweep")
{
    auto r = cli({"efficiency", "--scenario", "nd_yso"});
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(num(kv, "eta_afc") <= 0.5413411329464508);
    CHECK(num(kv, "eta_total") == Approx(num(kv, "eta_afc")));
    CHECK(num(kv, "echo_time_s") == Approx(25e-9));
    CHECK(num(kv, "multimode_capacity") == 3);

    auto s = cli({"efficiency", "--scenario", "nd_yso", "--set", "memory.finesse=1e6",
                  "--sweep", "d_eff=0:6:0.05"});
    REQUIRE(s.code == 0);
    auto rows = parse_csv(s.out);
    REQUIRE(rows.size() == 121);
    auto best = std::max_element(rows.begin(), rows.end(),
                                 [](auto& a, auto& b) { return a[1] < b[1]; });
    CHECK((*best)[0] == Approx(2.0));
    CHECK((*best)[1] == Approx(4 * std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("exit codes")
{
    CHECK(cli({"efficiency", "--set", "memory.depth=3"}).code == exit_config);
    CHECK(cli({"efficiency", "--set", "run.slot=400"}).code == exit_config);
    CHECK(cli({"efficiency", "--set", "memory.finesse=abc"}).code == exit_config);
    CHECK(cli({"efficiency", "--scenario", "no_such_preset"}).code == exit_config);
    CHECK(cli({"bogus"}).code == exit_config);
    CHECK(cli({"efficiency", "--set", "memory.finesse=0.5"}).code == exit_domain);
    CHECK(cli({"source", "--stats", "--powers", "0"}).code == exit_domain);
    CHECK(cli({"source", "--scenario", "nd_yso", "--stats", "--powers", "1e4"}).code
          == exit_domain);
    CHECK(cli({"analyze", "g2", "/nonexistent/tags.csv"}).code == exit_io);
    CHECK(cli({"simulate", "--out", "/nonexistent/dir/t.csv", "--set",
               "run.duration_s=0.001"}).code == exit_io);
    CHECK(cli({"--help"}).code == exit_ok);

    auto dir = scratch();
    std::ofstream(dir / "v2.tags") << "#qmemtags v2; resolution=1ps; duration=10; seed=1\n";
    CHECK(cli({"analyze", "g2", (dir / "v2.tags").string()}).code == exit_config);

    std::ofstream(dir / "loose.ini") << "[source]\npump_power_mw = 1\n[extra]\nx = 1\n";
    CHECK(cli({"efficiency", "--scenario", (dir / "loose.ini").string()}).code == exit_config);
    std::ofstream(dir / "dup.ini") << "[run]\nslot_ns = 1\nslot_ns = 2\n";
    CHECK(cli({"efficiency", "--scenario", (dir / "dup.ini").string()}).code == exit_config);
}

TEST_CASE("source statistics fall with pump power")
{
    auto r = cli({"source", "--scenario", "nd_yso", "--stats"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i][3] < rows[i - 1][3]);
    CHECK(rows[2][0] == 5);
    CHECK(rows[2][1] == Approx(0.013545));
    CHECK(rows[2][3] == Approx(1 + 1 / 0.013545));
}

TEST_CASE("source curves")
{
    auto g = cli({"source", "--scenario", "pr_yso", "--curve", "g2", "--tau-range",
                  "-1e-6:1e-6:1e-10"});
    REQUIRE(g.code == 0);
    auto rows = parse_csv(g.out);
    std::vector<double> t, v, e;
    for (auto& row : rows) {
        t.push_back(row[0]);
        v.push_back(row[1]);
        e.push_back(0.0);
    }
    double fwhm = analysis::full_width_half_maximum(t, v);
    CHECK(fwhm > 103e-9);
    CHECK(fwhm < 107e-9);

    auto m = cli({"source", "--scenario", "pr_yso", "--curve", "G2", "--tau-range",
                  "-2e-8:2e-8:5e-11"});
    REQUIRE(m.code == 0);
    rows = parse_csv(m.out);
    t.clear();
    v.clear();
    for (auto& row : rows) {
        t.push_back(row[0]);
        v.push_back(row[1]);
    }
    e.assign(t.size(), 0.0);
    CHECK(std::abs(analysis::oscillation_period(t, v, e) - 2.5e-9) <= 5e-11);

    CHECK(cli({"source", "--curve", "g3", "--tau-range", "0:1:1"}).code == exit_config);
    CHECK(cli({"source", "--curve", "g2", "--tau-range", "1:0:1"}).code == exit_config);
}

TEST_CASE("simulate is deterministic and writes a consistent manifest")
{
    auto dir = scratch();
    auto a = (dir / "a.tags").string(), b = (dir / "b.tags").string(),
         c = (dir / "c.tags").string();
    std::vector<std::string> common{"simulate", "--scenario", "pr_yso", "--set",
                                    "run.duration_s=0.05"};
    auto run = [&](const std::string& out, const std::string& seed) {
        auto args = common;
        args.insert(args.end(), {"--seed", seed, "--out", out});
        return cli(args);
    };
    REQUIRE(run(a, "5").code == 0);
    REQUIRE(run(b, "5").code == 0);
    REQUIRE(run(c, "6").code == 0);
    CHECK(sha256_file(a) == sha256_file(b));
    CHECK(sha256_file(a) != sha256_file(c));

    auto manifest = read_manifest(a + ".manifest");
    std::map<std::string, std::string> m(manifest.begin(), manifest.end());
    CHECK(m["tags.sha256"] == sha256_file(a));
    CHECK(m["seed"] == "5");
    CHECK(m["config.source.pump_power_mw"] == "2");
    TagFile f = read_tag_file(a);
    CHECK(std::to_string(f.tags.size()) == m["tags.count"]);
    std::map<Origin, std::uint64_t> by_origin;
    for (auto& t : f.tags)
        ++by_origin[t.origin];
    for (Origin o : {Origin::pair, Origin::dark, Origin::leak, Origin::noise})
        CHECK(std::to_string(by_origin[o]) == m["counts." + std::string(to_string(o))]);
}

TEST_CASE("Nd round trip: windowed g² matches the capture-corrected 1 + F0/p")
{
    auto dir = scratch();
    auto tags = (dir / "nd.tags").string();
    REQUIRE(cli({"simulate", "--scenario", "nd_yso", "--set", "memory.enabled=false",
                 "--set", "run.duration_s=0.05", "--out", tags})
                .code == 0);
    auto kv = parse_kv(cli({"analyze", "g2", tags, "--scenario", "nd_yso"}).out);
    // Delay mass of the 350 / 43 MHz two-sided exponential inside ±5 ns.
    const double f0 = 0.7693268120965314, p = 0.013545;
    double g = num(kv, "g2"), err = num(kv, "g2_error");
    // Detector darks add a small accidental floor; allow it on top of 3σ.
    CHECK(std::abs(g - (1 + f0 / p)) < 3 * err + 1.0);
    CHECK(kv["violated"] == "true");
}

TEST_CASE("Pr round trip: fitted linewidths and gated purification")
{
    auto dir = scratch();
    auto tags = (dir / "pr.tags").string();
    REQUIRE(cli({"simulate", "--scenario", "pr_yso", "--seed", "3", "--out", tags}).code == 0);
    auto fit = parse_kv(cli({"analyze", "fit", tags, "--range-ns", "-1000:1000"}).out);
    CHECK(num(fit, "nu_plus_hz") == Approx(2.9e6).epsilon(0.05));
    CHECK(num(fit, "nu_minus_hz") == Approx(1.7e6).epsilon(0.05));

    auto in = parse_kv(cli({"analyze", "g2", tags, "--normalization", "preceding"}).out);
    auto echo = parse_kv(
        cli({"analyze", "g2", tags, "--echo", "--normalization", "preceding"}).out);
    CHECK(num(echo, "center_s") == Approx(2e-6));
    CHECK(num(echo, "g2") > num(in, "g2"));
    CHECK(num(echo, "g2") > 2);
}

TEST_CASE("formula analyses")
{
    auto s = parse_kv(cli({"analyze", "witness-chsh", "--visibility", "0.81"}).out);
    CHECK(num(s, "S") == Approx(2 * std::sqrt(2) * 0.81));
    CHECK(s["violated"] == "true");
    auto c = parse_kv(cli({"analyze", "concurrence", "--visibility", "1", "--p01", "0.5",
                           "--p10", "0.5"})
                          .out);
    CHECK(num(c, "concurrence") == 1);
    auto m = parse_kv(cli({"analyze", "mu1", "--noise-prob", "0.0025", "--eta", "0.001",
                           "--eta-herald", "0.05"})
                          .out);
    CHECK(num(m, "mu1") == Approx(2.5));
    CHECK(m["herald_compatible"] == "false");
    CHECK(cli({"analyze", "mu1", "--noise-prob", "0.1", "--eta", "0"}).code == exit_domain);
    CHECK(cli({"analyze", "witness-chsh"}).code == exit_config);
}

TEST_CASE("scenario loader")
{
    Scenario sc = load_scenario("pr_yso", {"run.seed=9", "source.pump_power_mw=1"});
    CHECK(sc.experiment.seed == 9);
    CHECK(sc.experiment.source.pump_power_mw == 1);
    CHECK(sc.experiment.pair_probability() == Approx(6.4e-3));
    CHECK(sc.experiment.gating.mode == mc::PumpGating::off_after_herald);
    REQUIRE(sc.experiment.memory);
    CHECK(sc.experiment.memory->comb().delta_hz() == Approx(0.5e6));
    CHECK(sc.window_s == Approx(400e-9));
    CHECK_THROWS_AS(load_scenario("pr_yso", {"seed=9"}), ConfigError);
    CHECK_THROWS_AS(load_scenario("pr_yso", {"run.seed"}), ConfigError);
    CHECK_THROWS_AS(load_scenario("pr_yso", {"run.gating=sometimes"}), ConfigError);
    CHECK_THROWS_AS(parse_scenario("stray = 1\n[run]\n", "x"), ConfigError);
}
