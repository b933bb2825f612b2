// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
/*!
 * \file analysis.hpp
 * \brief Estimators over time-tag streams and correlation curves.
 *
 * τ is always t_b - t_a; for signal/idler histograms that is the signal
 * time minus the idler time, so τ > 0 decays with the signal linewidth.
 */

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qmem/events.hpp"

namespace qmem::analysis {

struct Singles {
    std::uint64_t count_a = 0;
    std::uint64_t count_b = 0;
    double rate_a_hz = 0;
    double rate_b_hz = 0;
};

struct CoincidenceHistogram {
    double bin_width_s = 0;
    std::vector<double> taus;  //!< bin centres
    std::vector<std::uint64_t> counts;
    Singles singles;
    double duration_s = 0;

    std::uint64_t total() const;
};

struct WitnessResult {
    double value = 0;
    double statistical_error = 0;
    double classical_bound = 0;
    bool violated = false;  //!< value > classical_bound
};

//! Times (ps) of one channel, in stream order.
std::vector<std::int64_t> channel_times(const std::vector<TimeTag>& tags, Channel c);

//! Full cross-correlation of two sorted time lists over [tau_min, tau_max).
//! The range must hold a whole number of bins.
CoincidenceHistogram histogram(const std::vector<std::int64_t>& a,
                               const std::vector<std::int64_t>& b,
                               double bin_width_s, double tau_min_s,
                               double tau_max_s, double duration_s);
CoincidenceHistogram histogram(const std::vector<TimeTag>& tags, Channel a,
                               Channel b, double bin_width_s, double tau_min_s,
                               double tau_max_s, double duration_s);

//! Merges pairs of adjacent bins; a trailing odd bin is dropped.
CoincidenceHistogram rebin2(const CoincidenceHistogram& hist);

//! g² = C·T / (N_a·N_b·W) over bins whose centres lie in the window, with
//! Poisson errors; classical bound 2.
WitnessResult g2_windowed(const CoincidenceHistogram& hist, double window_s,
                          double center_s = 0);

//! g² normalised by local accidentals: coincidences in the window over the
//! mean of `n_side` displaced windows on each side, centred at
//! center ± j·window for j = 2 … n_side + 1. An empty reference is
//! replaced by a single count spread over the reference windows, so the
//! value is then a lower bound. With `preceding_only` only the windows at
//! earlier delays are used, which keeps the reference
//! outside a pump-off interval that starts after a herald. Classical bound 2.
WitnessResult g2_sidebands(const CoincidenceHistogram& hist, double window_s,
                           double center_s = 0, int n_side = 3,
                           bool preceding_only = false);

//! Coincidences in a window and their count-weighted mean delay.
struct WindowCounts {
    std::uint64_t coincidences = 0;
    double mean_tau_s = 0;
    double mean_tau_error_s = 0;
};
WindowCounts window_counts(const CoincidenceHistogram& hist, double window_s,
                           double center_s);

struct ExponentialFit {
    double nu_plus_hz;  //!< decay for τ > τ_peak
    double nu_minus_hz;
    double nu_plus_error_hz;
    double nu_minus_error_hz;
    double tau_peak_s;
    double amplitude;
    double floor;
    double fwhm_s;  //!< width of the part above the floor
    std::optional<double> fwhm_with_floor_s;  //!< literal half-maximum width
    double chi2_per_dof;
};

//! Weighted least squares of floor + A·exp(-2πΔν±|τ - τ_peak|).
ExponentialFit fit_two_sided_exponential(const CoincidenceHistogram& hist);
ExponentialFit fit_two_sided_exponential(const std::vector<double>& taus,
                                         const std::vector<double>& values,
                                         const std::vector<double>& errors);

//! Mean spacing of resolvable peaks (three or more required).
double oscillation_period(const CoincidenceHistogram& hist);
double oscillation_period(const std::vector<double>& taus,
                          const std::vector<double>& values,
                          const std::vector<double>& errors);

//! Literal full width at half maximum, linearly interpolated.
double full_width_half_maximum(const std::vector<double>& taus,
                               const std::vector<double>& values);

//! Emulated 50:50 splitter: each tag of the channel goes to arm A or B by a
//! keyed coin flip.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>
hbt_split(const std::vector<TimeTag>& tags, Channel c, std::uint64_t seed);

//! Zero-delay g² of a single channel via the split.
WitnessResult g2_auto(const std::vector<TimeTag>& tags, Channel c,
                      double window_s, double duration_s, std::uint64_t seed);

//! R = (g²_si)² / (g²_ss·g²_ii); classical bound 1.
WitnessResult cauchy_schwarz_from_tags(const std::vector<TimeTag>& tags,
                                       double window_s, double duration_s,
                                       std::uint64_t seed);

//! Stored fraction from a memory run and a same-seed transparent reference:
//! echo-window coincidences over reference input-window coincidences.
struct Estimate {
    double value;
    double error;
};
Estimate echo_efficiency(const CoincidenceHistogram& memory_run,
                              const CoincidenceHistogram& reference,
                              double window_s, double echo_delay_s);

//! (1 + V cos(φ_s + φ_i)) / 2.
double franson_fringe(double phase_s, double phase_i, double visibility);

//! S = 2√2·V; classical bound 2.
WitnessResult chsh_from_visibility(double visibility, double visibility_error = 0);

struct Concurrence {
    double value;  //!< clamped at 0
    double raw;
};

//! C = V(p10 + p01) - √(2 p00 p11).
Concurrence concurrence(double visibility, double p00, double p01, double p10,
                        double p11);

//! Mean input photon number for unit signal-to-noise: p_noise / η.
double mu1(double noise_prob_per_window, double eta_total);

struct HeraldCompatibility {
    double ratio;
    bool compatible;
};

HeraldCompatibility herald_compatibility(double mu1, double eta_herald,
                                         double threshold = 0.1);

}  // namespace qmem::analysis
