// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
/*!
 * \file spdc.hpp
 * \brief Photon-pair source statistics for (cavity-enhanced) SPDC.
 *
 * Linewidths are FWHM in Hz. Where a decay *rate* appears it is the
 * angular rate 2πΔν, so that correlation functions decay as exp(-2πΔν|τ|).
 * τ is the signal detection time minus the idler detection time.
 */

#include <vector>

namespace qmem::spdc {

struct SourceSpec {
    double pump_power_mw = 0;
    double spectral_brightness = 0;  //!< pairs / (mW · MHz · s)
    double signal_linewidth_hz = 0;
    double idler_linewidth_hz = 0;
    double fsr_signal_hz = 0;
    double fsr_idler_hz = 0;
    double transit_offset_s = 0;  //!< τ₀, signal/idler transit difference
    double phase_matching_bandwidth_hz = 0;
    int modes_per_cluster = 1;

    //! Throws DomainError on any violated invariant.
    void validate() const;
};

struct PairStatistics {
    double p;
    double mean_signal_photons;
    double g2_cross;
    double g2_auto_signal;
    double g2_auto_idler;
};

enum class Normalization { normalized, raw };

struct CorrelationCurve {
    std::vector<double> taus;
    std::vector<double> values;
    Normalization normalization = Normalization::raw;
};

struct PhotonNumberDistribution {
    std::vector<double> probabilities;  //!< P(0) ... P(n_max)
    double tail_mass;                   //!< P(n > n_max)
};

struct Cluster {
    double center_offset_hz;
    int n_modes;
    double suppression;  //!< 1 - envelope / envelope of the main cluster
};

struct CauchySchwarz {
    double ratio;
    bool nonclassical;
};

//! p = brightness · power · bandwidth[MHz] · window; throws when p >= 1.
double pair_probability(const SourceSpec& spec, double filter_bandwidth_hz,
                        double window_s);

//! Two-mode squeezed state moments for 0 < p < 1.
PairStatistics tmss_statistics(double p);

//! Geometric photon-number distribution (1-p) pⁿ, truncated at n_max.
PhotonNumberDistribution photon_number_distribution(double p, int n_max);

//! Unnormalised multimode cross-correlation of a doubly resonant cavity
//! source. The main cluster holds `modes_per_cluster` signal modes; their
//! energy-conjugate idler modes complete the double sum.
CorrelationCurve multimode_g2_cross(const SourceSpec& spec,
                                    const std::vector<double>& taus,
                                    int m_cutoff);

//! Default mode-sum cutoff (four times the cluster size).
int default_mode_cutoff(const SourceSpec& spec);

//! Normalised single-mode cross-correlation with accidental floor 1.
CorrelationCurve single_mode_g2(const SourceSpec& spec, double p,
                                const std::vector<double>& taus);

//! Maps a raw curve onto a floor-1 normalised curve with the given peak.
CorrelationCurve normalize_to_peak(const CorrelationCurve& raw,
                                   double peak_g2);

//! Lorentzian coherence time 1/(π Δν).
double coherence_time(double linewidth_hz);

//! K = 1 / (g²_auto - 1).
double mode_count_from_autocorrelation(double g2_auto);

//! Cavity enhancement Q = F³ / (π F₀).
double cavity_enhancement(double finesse, double mirror_finesse);

//! Doubly resonant mode clusters across the phase-matching bandwidth.
std::vector<Cluster> cluster_structure(const SourceSpec& spec);

//! Vernier period FSR_s·FSR_i / |FSR_s - FSR_i|.
double vernier_period(const SourceSpec& spec);

CauchySchwarz cauchy_schwarz(double g2_cross, double g2_auto_signal,
                             double g2_auto_idler);

}  // namespace qmem::spdc
