// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/afc.hpp"

#include <cmath>
#include <numbers>

#include "qmem/error.hpp"
#include "qmem/quadrature.hpp"

namespace qmem::afc {

using detail::require;
using std::numbers::ln2;
using std::numbers::pi;

CombSpec::CombSpec(double d, double delta, double finesse, ToothKind kind,
                   double bandwidth)
    : d_(d), delta_(delta), finesse_(finesse), kind_(kind),
      bandwidth_(bandwidth)
{
    require(std::isfinite(d) && d >= 0, "comb: peak depth must be >= 0");
    require(std::isfinite(delta) && delta > 0, "comb: periodicity must be > 0");
    require(std::isfinite(finesse) && finesse >= 1,
            "comb: finesse must be >= 1");
    // Truncated non-square teeth lose most of their weight below F = 2.
    require(kind == ToothKind::square || finesse >= 2,
            "comb: gaussian/lorentzian teeth require finesse >= 2");
    require(bandwidth >= delta, "comb: bandwidth must be >= periodicity");
}

CombSpec CombSpec::from_finesse(double peak_depth, double delta_hz,
                                double finesse, ToothKind kind,
                                double bandwidth_hz)
{
    return CombSpec(peak_depth, delta_hz, finesse, kind, bandwidth_hz);
}

CombSpec CombSpec::from_width(double peak_depth, double delta_hz,
                              double width_hz, ToothKind kind,
                              double bandwidth_hz)
{
    require(width_hz > 0, "comb: tooth width must be > 0");
    return CombSpec(peak_depth, delta_hz, delta_hz / width_hz, kind,
                    bandwidth_hz);
}

MemorySpec::MemorySpec(CombSpec comb, Direction direction, double eta_control,
                       double spin_linewidth_hz, double spin_wave_time_s,
                       std::optional<Cavity> cavity, SpinDecayModel spin_model)
    : comb_(comb), direction_(direction), eta_control_(eta_control),
      spin_linewidth_(spin_linewidth_hz), spin_wave_time_(spin_wave_time_s),
      cavity_(cavity), spin_model_(spin_model)
{
    require(eta_control >= 0 && eta_control <= 1,
            "memory: control efficiency must be in [0,1]");
    require(spin_linewidth_hz >= 0, "memory: spin linewidth must be >= 0");
    require(spin_wave_time_s >= 0, "memory: spin-wave time must be >= 0");
    require(direction == Direction::forward || spin_wave_time_s > 0,
            "memory: backward recall requires spin-wave storage (T_S > 0)");
    if (cavity) {
        require(cavity->mirror_reflectivity >= 0
                    && cavity->mirror_reflectivity <= 1,
                "memory: mirror reflectivity must be in [0,1]");
        require(cavity->round_trip_loss >= 0 && cavity->round_trip_loss <= 1,
                "memory: round-trip loss must be in [0,1]");
    }
}

namespace {

// Tooth absorption profile with unit peak, x = detuning in units of Δ.
double tooth(ToothKind kind, double finesse, double x)
{
    switch (kind) {
    case ToothKind::square:
        return std::abs(x) < 0.5 / finesse ? 1.0 : 0.0;
    case ToothKind::gaussian:
        return std::exp(-4 * ln2 * finesse * finesse * x * x);
    case ToothKind::lorentzian: {
        double u = 2 * finesse * x;
        return 1.0 / (1.0 + u * u);
    }
    }
    return 0;
}

// Integrates f over the symmetric tooth period [-1/2, 1/2] with breakpoints
// spaced geometrically around the narrow central feature.
template <class F>
double integrate_period(double finesse, F&& f)
{
    std::vector<double> edges{0.0};
    for (double e = 0.5 / finesse; e < 0.5; e *= 2)
        edges.push_back(e);
    edges.push_back(0.5);
    double sum = 0;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        sum += gauss_legendre(
            [&](double x) { return f(x) + f(-x); }, edges[i - 1], edges[i], 8);
    }
    return sum;
}

}  // namespace

double effective_depth(const CombSpec& comb)
{
    double d = comb.peak_depth();
    double f = comb.finesse();
    switch (comb.shape().kind) {
    case ToothKind::square:
        return d / f;
    case ToothKind::gaussian:
        return d * std::sqrt(pi / (4 * ln2)) / f * std::erf(std::sqrt(ln2) * f);
    case ToothKind::lorentzian:
        return d * std::atan(f) / f;
    }
    return 0;
}

double dephasing_factor(const CombSpec& comb)
{
    double f = comb.finesse();
    ToothKind kind = comb.shape().kind;
    if (kind == ToothKind::square) {
        double x = pi / f;
        double s = std::sin(x) / x;
        return s * s;
    }
    double area = integrate_period(
        f, [&](double x) { return tooth(kind, f, x); });
    double ft = integrate_period(f, [&](double x) {
        return tooth(kind, f, x) * std::cos(2 * pi * x);
    });
    double r = ft / area;
    return r * r;
}

double forward_efficiency(double d_eff, double eta_deph)
{
    return d_eff * d_eff * std::exp(-d_eff) * eta_deph;
}

double backward_efficiency(double d_eff, double eta_deph)
{
    double a = -std::expm1(-d_eff);
    return a * a * eta_deph;
}

EfficiencyBudget echo_efficiency(const MemorySpec& spec)
{
    require(!spec.cavity(),
            "echo_efficiency: memory has a cavity, use cavity_echo_efficiency");
    EfficiencyBudget b;
    b.d_eff = effective_depth(spec.comb());
    b.eta_deph = dephasing_factor(spec.comb());
    b.eta_afc = spec.direction() == Direction::forward
                    ? forward_efficiency(b.d_eff, b.eta_deph)
                    : backward_efficiency(b.d_eff, b.eta_deph);
    b.eta_total = b.eta_afc;
    return b;
}

double impedance_match_reflectivity(double d_eff)
{
    require(d_eff >= 0 && d_eff < 1,
            "impedance match: requires 0 <= effective depth < 1");
    return std::exp(-2 * d_eff);
}

double cavity_absorption(double d_eff, const Cavity& cavity)
{
    if (d_eff <= 0)
        return 0;
    double single = std::exp(-2 * d_eff);
    double a2 = single * (1 - cavity.round_trip_loss);
    double a = std::sqrt(a2);
    double r = std::sqrt(cavity.mirror_reflectivity);
    double rc = (r - a) / (1 - r * a);
    double lost = 1 - rc * rc;
    double atom_share = (1 - single) / (1 - a2);
    return lost * atom_share;
}

EfficiencyBudget cavity_echo_efficiency(const MemorySpec& spec)
{
    require(spec.cavity().has_value(),
            "cavity_echo_efficiency: memory has no cavity");
    EfficiencyBudget b;
    b.d_eff = effective_depth(spec.comb());
    require(b.d_eff < 1,
            "cavity_echo_efficiency: effective depth must be < 1");
    b.eta_deph = dephasing_factor(spec.comb());
    double absorbed = cavity_absorption(b.d_eff, *spec.cavity());
    b.eta_afc = absorbed * absorbed * b.eta_deph;
    b.eta_total = b.eta_afc;
    return b;
}

double spin_decay(const MemorySpec& spec)
{
    double x = pi * spec.spin_linewidth_hz() * spec.spin_wave_time_s();
    if (spec.spin_model() == SpinDecayModel::exponential)
        return std::exp(-x);
    return std::exp(-x * x / (2 * ln2));
}

EfficiencyBudget total_efficiency(const MemorySpec& spec)
{
    EfficiencyBudget b = spec.cavity() ? cavity_echo_efficiency(spec)
                                       : echo_efficiency(spec);
    if (spec.spin_wave()) {
        b.eta_control = spec.eta_control();
        b.eta_spin = spin_decay(spec);
    }
    b.eta_total = b.eta_afc * b.eta_control * b.eta_control * b.eta_spin;
    return b;
}

double memory_transmission(const MemorySpec& spec)
{
    double d_eff = effective_depth(spec.comb());
    if (spec.cavity()) {
        // Light not absorbed leaves through the input mirror.
        return 1 - cavity_absorption(d_eff, *spec.cavity());
    }
    return std::exp(-d_eff);
}

std::vector<double> echo_times(const CombSpec& comb, double spin_wave_time_s)
{
    require(spin_wave_time_s >= 0, "echo_times: T_S must be >= 0");
    return {1.0 / comb.delta_hz() + spin_wave_time_s};
}

DualCombTimes dual_comb_echo_times(double delta1_hz, double delta2_hz)
{
    require(delta1_hz > 0 && delta2_hz > 0,
            "dual comb: periodicities must be > 0");
    require(delta1_hz != delta2_hz, "dual comb: periodicities must differ");
    double t1 = 1 / delta1_hz;
    double t2 = 1 / delta2_hz;
    return {t1, t2, std::abs(t1 - t2)};
}

int multimode_capacity(const CombSpec& comb)
{
    double ratio = comb.bandwidth_hz() / comb.delta_hz();
    return static_cast<int>(std::floor(ratio * (1 + 1e-12)));
}

SpacingLimit min_comb_spacing(double gamma_h_hz, double finesse)
{
    require(gamma_h_hz > 0, "min spacing: homogeneous linewidth must be > 0");
    require(finesse >= 1, "min spacing: finesse must be >= 1");
    double delta = 2 * gamma_h_hz * finesse;
    return {delta, 1 / delta};
}

}  // namespace qmem::afc
