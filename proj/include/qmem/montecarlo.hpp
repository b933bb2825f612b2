// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
/*!
 * \file montecarlo.hpp
 * \brief Slot-based event simulation of heralded photon pairs through a
 *        memory and two detection chains.
 *
 * Time is cut into slots of `slot_width_s`. Each slot carries a geometric
 * number of pairs; every pair puts its idler at the slot centre and its
 * signal at a two-sided-exponential delay from it. All randomness is keyed
 * by (seed, stream, index), so the output does not depend on thread count.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qmem/afc.hpp"
#include "qmem/events.hpp"
#include "qmem/spdc.hpp"

namespace qmem::mc {

struct LorentzianFilter {
    double center_offset_hz = 0;
    double fwhm_hz = 0;
};

struct Detector {
    double efficiency = 1;
    double dark_rate_hz = 0;
    double jitter_sigma_s = 0;
    double dead_time_s = 0;
};

struct DetectionChain {
    std::vector<double> transmissions;
    std::vector<LorentzianFilter> filters;
    Detector detector;

    void validate() const;
    //! Product of transmissions and detector efficiency.
    double transmission() const;
    //! Product of Lorentzian filter weights at a frequency offset.
    double filter_weight(double offset_hz) const;
};

enum class PumpGating { cw, off_after_herald };

struct GatingSpec {
    PumpGating mode = PumpGating::cw;
    double off_delay_s = 0;  //!< herald to pump-off
    double recovery_s = 0;   //!< herald to pump-on again
};

//! What the memory does to a single signal photon.
struct MemoryResponse {
    double efficiency = 0;    //!< probability of storage and recall
    double transmission = 1;  //!< probability of leaking straight through
    double delay_s = 0;       //!< echo delay of recalled photons
};

MemoryResponse memory_response(const afc::MemorySpec& memory);

struct ExperimentConfig {
    spdc::SourceSpec source;
    //! Bandwidth entering p = B·P·bw·slot; defaults to the signal linewidth.
    std::optional<double> pair_bandwidth_hz;
    //! Uncorrelated broadband photons on the signal channel while pumped.
    double noise_rate_hz = 0;
    std::optional<afc::MemorySpec> memory;
    DetectionChain signal_chain;
    DetectionChain idler_chain;
    GatingSpec gating;
    double duration_s = 0;
    std::uint64_t seed = 0;
    double slot_width_s = 0;
    unsigned threads = 1;

    void validate() const;
    double pair_probability() const;
    std::int64_t duration_ps() const;
};

//! Signal and idler photons with pair ids, sorted by creation slot.
std::vector<PhotonEvent> generate_pairs(const ExperimentConfig& config);

//! Drops pairs and noise photons created while the pump is switched off.
std::vector<PhotonEvent> gate_pump(const std::vector<PhotonEvent>& events,
                                   const ExperimentConfig& config);

//! Stores, leaks or absorbs every signal photon.
std::vector<PhotonEvent> apply_memory(const std::vector<PhotonEvent>& events,
                                      const MemoryResponse& memory,
                                      std::uint64_t seed);
std::vector<PhotonEvent> apply_memory(const std::vector<PhotonEvent>& events,
                                      const afc::MemorySpec& memory,
                                      std::uint64_t seed);

//! Detection of one channel: thinning, filters, jitter, dark counts and
//! non-paralyzable dead time. Output is sorted and clipped to [0, duration].
std::vector<TimeTag> apply_chain(const std::vector<PhotonEvent>& events,
                                 Channel channel, const DetectionChain& chain,
                                 std::uint64_t seed, std::int64_t duration_ps);

struct RunResult {
    std::vector<TimeTag> tags;  //!< sorted by time
    std::map<Origin, std::uint64_t> counts;
    std::uint64_t pairs_generated = 0;
    double pair_probability = 0;
};

RunResult run(const ExperimentConfig& config);

//! Single channel of a K-mode thermal field sampled per slot: each slot holds
//! the sum of K geometric counts with mean `mean_per_slot / K` each.
std::vector<TimeTag> thermal_field(int n_modes, double mean_per_slot,
                                   double slot_width_s, std::int64_t n_slots,
                                   std::uint64_t seed);

//! Worker count from QMEM_THREADS, else hardware concurrency.
unsigned default_threads();

}  // namespace qmem::mc
