// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numbers>
#include <string>
#include <thread>

#include "qmem/error.hpp"
#include "qmem/rng.hpp"

namespace qmem::mc {

using detail::require;

namespace {

constexpr std::uint64_t noise_id_base = std::uint64_t{1} << 62;

std::int64_t to_ps(double seconds)
{
    return std::llround(seconds * 1e12);
}

bool is_probability(double x)
{
    return std::isfinite(x) && x >= 0 && x <= 1;
}

RngStream thin_stream(Channel c)
{
    return c == Channel::signal ? RngStream::thin_signal : RngStream::thin_idler;
}

RngStream jitter_stream(Channel c)
{
    return c == Channel::signal ? RngStream::jitter_signal : RngStream::jitter_idler;
}

RngStream dark_stream(Channel c)
{
    return c == Channel::signal ? RngStream::dark_signal : RngStream::dark_idler;
}

// Keyed detection decision; gate_pump and apply_chain must agree on it.
bool detected(const PhotonEvent& e, const DetectionChain& chain, std::uint64_t seed)
{
    double keep = chain.transmission() * chain.filter_weight(e.frequency_offset_hz);
    return CounterRng(seed, thin_stream(e.channel), e.id).uniform() < keep;
}

unsigned poisson(CounterRng& rng, double mean)
{
    // Inversion; means here are per-slot and small.
    double u = rng.uniform();
    double term = std::exp(-mean), cdf = term;
    unsigned n = 0;
    while (u > cdf && n < 10000) {
        ++n;
        term *= mean / n;
        cdf += term;
    }
    return n;
}

struct SlotBatch {
    std::vector<PhotonEvent> pairs;  // signal/idler interleaved, ids unset
    std::vector<PhotonEvent> noise;
};

SlotBatch generate_slots(const ExperimentConfig& cfg, double p, std::int64_t first,
                         std::int64_t last)
{
    SlotBatch out;
    const double slot = cfg.slot_width_s;
    const double gs = 2 * std::numbers::pi * cfg.source.signal_linewidth_hz;
    const double gi = 2 * std::numbers::pi * cfg.source.idler_linewidth_hz;
    const double positive = gi / (gs + gi);
    const double noise_mean = cfg.noise_rate_hz * slot;
    const double pm = cfg.source.phase_matching_bandwidth_hz;
    for (std::int64_t k = first; k < last; ++k) {
        const std::int64_t centre = to_ps((k + 0.5) * slot);
        CounterRng rng(cfg.seed, RngStream::pairs, static_cast<std::uint64_t>(k));
        unsigned n = rng.geometric(p);
        for (unsigned j = 0; j < n; ++j) {
            double tau = rng.uniform() < positive ? rng.exponential(gs)
                                                  : -rng.exponential(gi);
            out.pairs.push_back({centre + to_ps(tau), centre, Channel::signal,
                                 Origin::pair, 0, 0});
            out.pairs.push_back(
                {centre, centre, Channel::idler, Origin::pair, 0, 0});
        }
        if (noise_mean > 0) {
            CounterRng nrng(cfg.seed, RngStream::noise, static_cast<std::uint64_t>(k));
            unsigned m = poisson(nrng, noise_mean);
            for (unsigned j = 0; j < m; ++j) {
                std::int64_t t = to_ps((k + nrng.uniform()) * slot);
                double nu = (nrng.uniform() - 0.5) * pm;
                out.noise.push_back({t, t, Channel::signal, Origin::noise, 0, nu});
            }
        }
    }
    return out;
}

}  // namespace

void DetectionChain::validate() const
{
    for (double t : transmissions)
        require(is_probability(t), "chain: transmissions must lie in [0,1]");
    for (const LorentzianFilter& f : filters) {
        require(std::isfinite(f.center_offset_hz), "chain: filter offset must be finite");
        require(f.fwhm_hz > 0, "chain: filter FWHM must be > 0");
    }
    require(is_probability(detector.efficiency),
            "chain: detector efficiency must lie in [0,1]");
    require(detector.dark_rate_hz >= 0, "chain: dark rate must be >= 0");
    require(detector.jitter_sigma_s >= 0, "chain: jitter must be >= 0");
    require(detector.dead_time_s >= 0, "chain: dead time must be >= 0");
}

double DetectionChain::transmission() const
{
    double t = detector.efficiency;
    for (double x : transmissions)
        t *= x;
    return t;
}

double DetectionChain::filter_weight(double offset_hz) const
{
    double w = 1;
    for (const LorentzianFilter& f : filters) {
        double u = 2 * (offset_hz - f.center_offset_hz) / f.fwhm_hz;
        w /= 1 + u * u;
    }
    return w;
}

MemoryResponse memory_response(const afc::MemorySpec& memory)
{
    return {afc::total_efficiency(memory).eta_total,
            afc::memory_transmission(memory),
            afc::echo_times(memory.comb(), memory.spin_wave_time_s()).front()};
}

void ExperimentConfig::validate() const
{
    source.validate();
    require(std::isfinite(duration_s) && duration_s > 0, "run: duration must be > 0");
    require(std::isfinite(slot_width_s) && slot_width_s > 0,
            "run: slot width must be > 0");
    require(slot_width_s <= duration_s, "run: slot width exceeds duration");
    require(noise_rate_hz >= 0, "run: noise rate must be >= 0");
    require(!pair_bandwidth_hz || *pair_bandwidth_hz > 0,
            "run: pair bandwidth must be > 0");
    require(duration_s * 1e12 < 9e18, "run: duration overflows picosecond time base");
    signal_chain.validate();
    idler_chain.validate();
    if (gating.mode == PumpGating::off_after_herald) {
        require(gating.off_delay_s >= 0, "gating: off delay must be >= 0");
        require(gating.recovery_s > gating.off_delay_s,
                "gating: recovery must exceed off delay");
    }
}

double ExperimentConfig::pair_probability() const
{
    double bw = pair_bandwidth_hz.value_or(
        std::min(source.signal_linewidth_hz, source.idler_linewidth_hz));
    if (source.pump_power_mw == 0)
        return 0;
    return spdc::pair_probability(source, bw, slot_width_s);
}

std::int64_t ExperimentConfig::duration_ps() const
{
    return to_ps(duration_s);
}

unsigned default_threads()
{
    if (const char* env = std::getenv("QMEM_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PhotonEvent> generate_pairs(const ExperimentConfig& config)
{
    config.validate();
    const double p = config.pair_probability();
    const auto n_slots =
        static_cast<std::int64_t>(std::floor(config.duration_s / config.slot_width_s));

    unsigned workers = config.threads == 0 ? default_threads() : config.threads;
    workers = static_cast<unsigned>(
        std::clamp<std::int64_t>(n_slots / 50000, 1, workers));
    std::vector<SlotBatch> parts(workers);
    if (workers == 1) {
        parts[0] = generate_slots(config, p, 0, n_slots);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            std::int64_t a = n_slots * w / workers;
            std::int64_t b = n_slots * (w + 1) / workers;
            pool.emplace_back([&, w, a, b] { parts[w] = generate_slots(config, p, a, b); });
        }
        for (std::thread& t : pool)
            t.join();
    }

    std::vector<PhotonEvent> events;
    std::uint64_t pair_id = 0, noise_id = noise_id_base;
    for (SlotBatch& part : parts) {
        for (std::size_t i = 0; i < part.pairs.size(); i += 2) {
            part.pairs[i].id = part.pairs[i + 1].id = pair_id++;
            events.push_back(part.pairs[i]);
            events.push_back(part.pairs[i + 1]);
        }
        for (PhotonEvent& e : part.noise) {
            e.id = noise_id++;
            events.push_back(e);
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const PhotonEvent& a, const PhotonEvent& b) {
                         return a.created_ps < b.created_ps;
                     });
    return events;
}

std::vector<PhotonEvent> gate_pump(const std::vector<PhotonEvent>& events,
                                   const ExperimentConfig& config)
{
    if (config.gating.mode == PumpGating::cw)
        return events;
    const std::int64_t off = to_ps(config.gating.off_delay_s);
    const std::int64_t on = to_ps(config.gating.recovery_s);

    struct Interval {
        std::int64_t begin, end;  // pump off for begin < t <= end
    };
    std::deque<Interval> dark;
    std::vector<PhotonEvent> out;
    out.reserve(events.size());
    for (const PhotonEvent& e : events) {
        while (!dark.empty() && dark.front().end < e.created_ps)
            dark.pop_front();
        if (!dark.empty() && e.created_ps > dark.front().begin)
            continue;
        out.push_back(e);
        if (e.channel == Channel::idler && e.origin == Origin::pair
            && detected(e, config.idler_chain, config.seed))
            dark.push_back({e.time_ps + off, e.time_ps + on});
    }
    return out;
}

std::vector<PhotonEvent> apply_memory(const std::vector<PhotonEvent>& events,
                                      const MemoryResponse& memory,
                                      std::uint64_t seed)
{
    require(is_probability(memory.efficiency) && is_probability(memory.transmission)
                && memory.efficiency + memory.transmission <= 1 + 1e-12,
            "memory: efficiency and transmission must be probabilities summing to <= 1");
    require(memory.delay_s >= 0, "memory: delay must be >= 0");
    const std::int64_t delay = to_ps(memory.delay_s);
    std::vector<PhotonEvent> out;
    out.reserve(events.size());
    for (PhotonEvent e : events) {
        if (e.channel != Channel::signal) {
            out.push_back(e);
            continue;
        }
        double u = CounterRng(seed, RngStream::memory, e.id).uniform();
        if (e.origin == Origin::pair && u < memory.efficiency) {
            e.time_ps += delay;
            out.push_back(e);
        } else if (e.origin == Origin::noise) {
            if (u < memory.transmission)
                out.push_back(e);
        } else if (u < memory.efficiency + memory.transmission) {
            e.origin = Origin::leak;
            out.push_back(e);
        }
    }
    return out;
}

std::vector<PhotonEvent> apply_memory(const std::vector<PhotonEvent>& events,
                                      const afc::MemorySpec& memory,
                                      std::uint64_t seed)
{
    return apply_memory(events, memory_response(memory), seed);
}

std::vector<TimeTag> apply_chain(const std::vector<PhotonEvent>& events,
                                 Channel channel, const DetectionChain& chain,
                                 std::uint64_t seed, std::int64_t duration_ps)
{
    chain.validate();
    const double sigma_ps = chain.detector.jitter_sigma_s * 1e12;
    std::vector<TimeTag> tags;
    for (const PhotonEvent& e : events) {
        if (e.channel != channel || !detected(e, chain, seed))
            continue;
        std::int64_t t = e.time_ps;
        if (sigma_ps > 0)
            t += std::llround(sigma_ps
                              * CounterRng(seed, jitter_stream(channel), e.id).normal());
        tags.push_back({channel, t, e.origin});
    }
    if (chain.detector.dark_rate_hz > 0) {
        CounterRng rng(seed, dark_stream(channel), 0);
        const double rate_per_ps = chain.detector.dark_rate_hz * 1e-12;
        for (double t = rng.exponential(rate_per_ps); t <= duration_ps;
             t += rng.exponential(rate_per_ps))
            tags.push_back({channel, std::llround(t), Origin::dark});
    }
    std::stable_sort(tags.begin(), tags.end(),
                     [](const TimeTag& a, const TimeTag& b) { return a.time_ps < b.time_ps; });
    std::erase_if(tags, [&](const TimeTag& t) {
        return t.time_ps < 0 || t.time_ps > duration_ps;
    });

    const std::int64_t dead = to_ps(chain.detector.dead_time_s);
    if (dead > 0) {
        std::vector<TimeTag> kept;
        kept.reserve(tags.size());
        for (const TimeTag& t : tags)
            if (kept.empty() || t.time_ps - kept.back().time_ps >= dead)
                kept.push_back(t);
        tags = std::move(kept);
    }
    return tags;
}

RunResult run(const ExperimentConfig& config)
{
    RunResult result;
    result.pair_probability = config.pair_probability();
    std::vector<PhotonEvent> events = generate_pairs(config);
    for (const PhotonEvent& e : events)
        if (e.origin == Origin::pair && e.channel == Channel::idler)
            ++result.pairs_generated;
    events = gate_pump(events, config);
    if (config.memory)
        events = apply_memory(events, *config.memory, config.seed);

    const std::int64_t end = config.duration_ps();
    std::vector<TimeTag> s = apply_chain(events, Channel::signal, config.signal_chain,
                                         config.seed, end);
    std::vector<TimeTag> i = apply_chain(events, Channel::idler, config.idler_chain,
                                         config.seed, end);
    result.tags.resize(s.size() + i.size());
    std::merge(s.begin(), s.end(), i.begin(), i.end(), result.tags.begin(),
               [](const TimeTag& a, const TimeTag& b) { return a.time_ps < b.time_ps; });
    for (Origin o : {Origin::pair, Origin::dark, Origin::leak, Origin::noise})
        result.counts[o] = 0;
    for (const TimeTag& t : result.tags)
        ++result.counts[t.origin];
    return result;
}

std::vector<TimeTag> thermal_field(int n_modes, double mean_per_slot,
                                   double slot_width_s, std::int64_t n_slots,
                                   std::uint64_t seed)
{
    require(n_modes >= 1, "thermal_field: need at least one mode");
    require(mean_per_slot > 0, "thermal_field: mean must be > 0");
    require(slot_width_s > 0 && n_slots > 0, "thermal_field: empty time axis");
    const double m = mean_per_slot / n_modes;
    const double p = m / (1 + m);
    std::vector<TimeTag> tags;
    for (std::int64_t k = 0; k < n_slots; ++k) {
        CounterRng rng(seed, RngStream::synthetic, static_cast<std::uint64_t>(k));
        unsigned n = 0;
        for (int j = 0; j < n_modes; ++j)
            n += rng.geometric(p);
        std::int64_t t = to_ps((k + 0.5) * slot_width_s);
        for (unsigned j = 0; j < n; ++j)
            tags.push_back({Channel::signal, t, Origin::pair});
    }
    return tags;
}

}  // namespace qmem::mc
