// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "qmem/error.hpp"

namespace qmem::spdc {

using detail::require;
using std::numbers::pi;
using cplx = std::complex<double>;

void SourceSpec::validate() const
{
    require(pump_power_mw >= 0, "source: pump power must be >= 0");
    require(spectral_brightness > 0, "source: spectral brightness must be > 0");
    require(signal_linewidth_hz > 0 && idler_linewidth_hz > 0,
            "source: linewidths must be > 0");
    require(fsr_signal_hz > 0 && fsr_idler_hz > 0, "source: FSRs must be > 0");
    require(phase_matching_bandwidth_hz > 0,
            "source: phase-matching bandwidth must be > 0");
    require(std::isfinite(transit_offset_s), "source: transit offset must be finite");
    require(modes_per_cluster >= 1, "source: modes per cluster must be >= 1");
}

double pair_probability(const SourceSpec& spec, double filter_bandwidth_hz,
                        double window_s)
{
    spec.validate();
    require(window_s > 0, "pair_probability: window must be > 0");
    require(filter_bandwidth_hz > 0, "pair_probability: bandwidth must be > 0");
    double p = spec.spectral_brightness * spec.pump_power_mw
               * (filter_bandwidth_hz * 1e-6) * window_s;
    require(p < 1, "pair_probability: p >= 1, outside the perturbative regime");
    return p;
}

PairStatistics tmss_statistics(double p)
{
    require(p > 0 && p < 1, "tmss_statistics: p must lie in (0,1)");
    return {p, p / (1 - p), 1 + 1 / p, 2.0, 2.0};
}

PhotonNumberDistribution photon_number_distribution(double p, int n_max)
{
    require(p >= 0 && p < 1, "photon_number_distribution: p must lie in [0,1)");
    require(n_max >= 0, "photon_number_distribution: n_max must be >= 0");
    PhotonNumberDistribution dist;
    dist.probabilities.reserve(n_max + 1);
    double pn = 1;
    for (int n = 0; n <= n_max; ++n) {
        dist.probabilities.push_back((1 - p) * pn);
        pn *= p;
    }
    dist.tail_mass = pn;
    return dist;
}

namespace {

cplx complex_sinc(cplx z)
{
    if (std::abs(z) < 1e-8)
        return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

// Signal mode indices of the main cluster, centred on zero.
std::vector<int> cluster_indices(int n_modes)
{
    std::vector<int> m(n_modes);
    int first = -(n_modes - 1) / 2;
    for (int i = 0; i < n_modes; ++i)
        m[i] = first + i;
    return m;
}

void check_taus(const std::vector<double>& taus)
{
    for (std::size_t i = 0; i < taus.size(); ++i) {
        require(std::isfinite(taus[i]), "correlation curve: taus must be finite");
        require(i == 0 || taus[i] > taus[i - 1],
                "correlation curve: taus must be strictly increasing");
    }
}

}  // namespace

int default_mode_cutoff(const SourceSpec& spec)
{
    return 4 * spec.modes_per_cluster;
}

CorrelationCurve multimode_g2_cross(const SourceSpec& spec,
                                    const std::vector<double>& taus,
                                    int m_cutoff)
{
    spec.validate();
    check_taus(taus);
    require(m_cutoff >= spec.modes_per_cluster,
            "multimode_g2_cross: mode cutoff smaller than the cluster size");

    std::vector<int> ms;
    for (int m : cluster_indices(spec.modes_per_cluster))
        if (std::abs(m) <= m_cutoff)
            ms.push_back(m);

    const double gs = spec.signal_linewidth_hz;
    const double gi = spec.idler_linewidth_hz;
    const double t0 = spec.transit_offset_s;
    const double amp = std::sqrt(gs * gi);

    auto gamma_s = [&](int m) { return cplx(gs / 2, m * spec.fsr_signal_hz); };
    // Idler partners sit at the energy-conjugate indices -m.
    auto gamma_i = [&](int m) { return cplx(gi / 2, -m * spec.fsr_idler_hz); };

    // Coefficients of the signal-side (τ >= τ₀/2) and idler-side expansions.
    std::vector<cplx> cs(ms.size()), ci(ms.size());
    for (std::size_t a = 0; a < ms.size(); ++a) {
        cplx gsa = gamma_s(ms[a]);
        cplx gia = gamma_i(ms[a]);
        cplx sum_s = 0, sum_i = 0;
        for (std::size_t b = 0; b < ms.size(); ++b) {
            sum_s += 1.0 / (gsa + gamma_i(ms[b]));
            sum_i += 1.0 / (gamma_s(ms[b]) + gia);
        }
        cs[a] = amp * complex_sinc(cplx(0, pi * t0) * gsa) * sum_s;
        ci[a] = amp * complex_sinc(cplx(0, pi * t0) * gia) * sum_i;
    }

    CorrelationCurve out;
    out.taus = taus;
    out.values.resize(taus.size());
    out.normalization = Normalization::raw;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        double dt = taus[k] - t0 / 2;
        cplx total = 0;
        if (dt >= 0) {
            for (std::size_t a = 0; a < ms.size(); ++a)
                total += cs[a] * std::exp(-2 * pi * gamma_s(ms[a]) * dt);
        } else {
            for (std::size_t a = 0; a < ms.size(); ++a)
                total += ci[a] * std::exp(2 * pi * gamma_i(ms[a]) * dt);
        }
        out.values[k] = std::norm(total);
    }
    return out;
}

CorrelationCurve single_mode_g2(const SourceSpec& spec, double p,
                                const std::vector<double>& taus)
{
    spec.validate();
    check_taus(taus);
    require(p > 0 && p < 1, "single_mode_g2: p must lie in (0,1)");
    const double gs = 2 * pi * spec.signal_linewidth_hz;
    const double gi = 2 * pi * spec.idler_linewidth_hz;
    const double height = 4 / p * gs * gi / ((gs + gi) * (gs + gi));

    CorrelationCurve out;
    out.taus = taus;
    out.normalization = Normalization::normalized;
    out.values.reserve(taus.size());
    for (double t : taus) {
        double f = t >= 0 ? std::exp(-gs * t) : std::exp(gi * t);
        out.values.push_back(1 + height * f);
    }
    return out;
}

CorrelationCurve normalize_to_peak(const CorrelationCurve& raw, double peak_g2)
{
    require(!raw.values.empty(), "normalize_to_peak: empty curve");
    double top = *std::max_element(raw.values.begin(), raw.values.end());
    require(top > 0, "normalize_to_peak: curve has no positive values");
    CorrelationCurve out = raw;
    out.normalization = Normalization::normalized;
    for (double& v : out.values)
        v = 1 + (peak_g2 - 1) * v / top;
    return out;
}

double coherence_time(double linewidth_hz)
{
    require(linewidth_hz > 0, "coherence_time: linewidth must be > 0");
    return 1 / (pi * linewidth_hz);
}

double mode_count_from_autocorrelation(double g2_auto)
{
    require(g2_auto > 1, "mode count: g2_auto <= 1 (noise-dominated)");
    require(g2_auto <= 2, "mode count: g2_auto > 2 exceeds thermal statistics");
    return 1 / (g2_auto - 1);
}

double cavity_enhancement(double finesse, double mirror_finesse)
{
    require(finesse > 0 && mirror_finesse > 0,
            "cavity_enhancement: finesses must be > 0");
    return finesse * finesse * finesse / (pi * mirror_finesse);
}

double vernier_period(const SourceSpec& spec)
{
    require(spec.fsr_signal_hz != spec.fsr_idler_hz,
            "vernier_period: degenerate FSRs");
    return spec.fsr_signal_hz * spec.fsr_idler_hz
           / std::abs(spec.fsr_signal_hz - spec.fsr_idler_hz);
}

std::vector<Cluster> cluster_structure(const SourceSpec& spec)
{
    spec.validate();
    require(spec.fsr_signal_hz != spec.fsr_idler_hz,
            "cluster_structure: degenerate FSRs");
    const double fs = spec.fsr_signal_hz;
    const double fi = spec.fsr_idler_hz;
    const double tol = std::min(spec.signal_linewidth_hz,
                                spec.idler_linewidth_hz) / 2;
    const double half = spec.phase_matching_bandwidth_hz / 2;
    const auto m_lo = static_cast<long>(std::ceil(-half / fs));
    const auto m_hi = std::max(static_cast<long>(std::ceil(half / fs)) - 1, m_lo);

    // sinc² phase-matching envelope with FWHM equal to the bandwidth.
    auto envelope = [&](double nu) {
        double x = 2 * 1.3915573689 * nu / spec.phase_matching_bandwidth_hz;
        if (x == 0)
            return 1.0;
        double s = std::sin(x) / x;
        return s * s;
    };

    struct Run {
        long first, last;
    };
    std::vector<Run> runs;
    for (long m = m_lo; m <= m_hi; ++m) {
        double nu = m * fs;
        double mismatch = std::abs(nu - std::round(nu / fi) * fi);
        if (mismatch >= tol)
            continue;
        if (!runs.empty() && runs.back().last == m - 1)
            runs.back().last = m;
        else
            runs.push_back({m, m});
    }

    std::vector<Cluster> clusters;
    for (const Run& r : runs) {
        double center = 0.5 * (r.first + r.last) * fs;
        clusters.push_back({center, static_cast<int>(r.last - r.first + 1), 0});
    }
    if (clusters.empty())
        return clusters;
    double main_env = 0;
    for (const Cluster& c : clusters)
        main_env = std::max(main_env, envelope(c.center_offset_hz));
    for (Cluster& c : clusters)
        c.suppression = 1 - envelope(c.center_offset_hz) / main_env;
    return clusters;
}

CauchySchwarz cauchy_schwarz(double g2_cross, double g2_auto_signal,
                             double g2_auto_idler)
{
    require(g2_cross > 0 && g2_auto_signal > 0 && g2_auto_idler > 0,
            "cauchy_schwarz: inputs must be > 0");
    double r = g2_cross * g2_cross / (g2_auto_signal * g2_auto_idler);
    return {r, r > 1};
}

}  // namespace qmem::spdc
