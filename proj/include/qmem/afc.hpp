// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
/*!
 * \file afc.hpp
 * \brief Closed-form atomic frequency comb (AFC) memory model.
 *
 * The comb is a periodic absorption structure with period Δ and teeth of
 * width Δ/F. A photon absorbed by the comb is re-emitted as an echo after
 * 1/Δ; optional control pulses park the excitation as a spin wave for T_S.
 *
 * All frequencies are in Hz, times in s. Each tooth occupies exactly one
 * period [-Δ/2, Δ/2]: non-square profiles are truncated there, so
 * neighbouring teeth never overlap.
 */

#include <optional>
#include <vector>

namespace qmem::afc {

enum class ToothKind { square, gaussian, lorentzian };

//! Width is the full width for square teeth and the FWHM otherwise.
struct ToothShape {
    ToothKind kind = ToothKind::square;
    double width_hz = 0;
};

//! Comb geometry. F and the tooth width are kept consistent: each
//! constructor derives the other quantity.
class CombSpec {
  public:
    static CombSpec from_finesse(double peak_depth, double delta_hz,
                                 double finesse, ToothKind kind,
                                 double bandwidth_hz);
    static CombSpec from_width(double peak_depth, double delta_hz,
                               double width_hz, ToothKind kind,
                               double bandwidth_hz);

    double peak_depth() const { return d_; }
    double delta_hz() const { return delta_; }
    double finesse() const { return finesse_; }
    ToothShape shape() const { return {kind_, delta_ / finesse_}; }
    double bandwidth_hz() const { return bandwidth_; }

  private:
    CombSpec(double d, double delta, double finesse, ToothKind kind,
             double bandwidth);

    double d_;
    double delta_;
    double finesse_;
    ToothKind kind_;
    double bandwidth_;
};

enum class Direction { forward, backward };

struct Cavity {
    double mirror_reflectivity = 0;  //!< input mirror R
    double round_trip_loss = 0;      //!< non-absorptive intracavity loss
};

enum class SpinDecayModel { gaussian, exponential };

//! Full memory: comb plus recall direction, control pulses, spin storage.
//! A zero spin-wave time means plain AFC echo operation (no control pulses).
class MemorySpec {
  public:
    MemorySpec(CombSpec comb, Direction direction, double eta_control = 1.0,
               double spin_linewidth_hz = 0.0, double spin_wave_time_s = 0.0,
               std::optional<Cavity> cavity = std::nullopt,
               SpinDecayModel spin_model = SpinDecayModel::gaussian);

    const CombSpec& comb() const { return comb_; }
    Direction direction() const { return direction_; }
    double eta_control() const { return eta_control_; }
    double spin_linewidth_hz() const { return spin_linewidth_; }
    double spin_wave_time_s() const { return spin_wave_time_; }
    const std::optional<Cavity>& cavity() const { return cavity_; }
    SpinDecayModel spin_model() const { return spin_model_; }
    bool spin_wave() const { return spin_wave_time_ > 0; }

  private:
    CombSpec comb_;
    Direction direction_;
    double eta_control_;
    double spin_linewidth_;
    double spin_wave_time_;
    std::optional<Cavity> cavity_;
    SpinDecayModel spin_model_;
};

struct EfficiencyBudget {
    double d_eff = 0;
    double eta_deph = 0;
    double eta_afc = 0;
    double eta_control = 1;
    double eta_spin = 1;
    double eta_total = 0;
};

//! Period-averaged optical depth d̃; exactly d/F for square teeth.
double effective_depth(const CombSpec& comb);

//! |Fourier transform of the normalised tooth|² at the echo time 1/Δ.
double dephasing_factor(const CombSpec& comb);

double forward_efficiency(double d_eff, double eta_deph);
double backward_efficiency(double d_eff, double eta_deph);

//! Echo efficiency without cavity; throws if the spec carries a cavity.
EfficiencyBudget echo_efficiency(const MemorySpec& spec);

//! Input mirror reflectivity exp(-2 d̃) that impedance-matches the cavity.
double impedance_match_reflectivity(double d_eff);

//! Fraction of the input absorbed by the atoms inside an asymmetric cavity
//! with a perfect back mirror, on resonance.
double cavity_absorption(double d_eff, const Cavity& cavity);

//! Echo efficiency for a cavity-assisted memory (requires d̃ < 1).
EfficiencyBudget cavity_echo_efficiency(const MemorySpec& spec);

//! Spin-wave dephasing factor η_S for the spec's storage time.
double spin_decay(const MemorySpec& spec);

//! η = η_AFC η_C² η_S, with η_C = η_S = 1 in echo-only mode.
EfficiencyBudget total_efficiency(const MemorySpec& spec);

//! Probability that an input photon passes the memory without being stored.
double memory_transmission(const MemorySpec& spec);

//! Recall times: {1/Δ} for echo mode, {1/Δ + T_S} for spin-wave mode.
std::vector<double> echo_times(const CombSpec& comb, double spin_wave_time_s);

struct DualCombTimes {
    double first_s;
    double second_s;
    double path_difference_s;
};

//! Two superposed combs act as an unbalanced interferometer.
DualCombTimes dual_comb_echo_times(double delta1_hz, double delta2_hz);

//! Number of temporal modes: floor(Γ/Δ).
int multimode_capacity(const CombSpec& comb);

struct SpacingLimit {
    double min_delta_hz;
    double max_storage_time_s;
};

//! Homogeneous-linewidth bound Δ_min = 2 γ_h F.
SpacingLimit min_comb_spacing(double gamma_h_hz, double finesse);

}  // namespace qmem::afc
