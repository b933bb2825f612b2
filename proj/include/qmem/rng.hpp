// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index, counter), so results do not depend on how work is
// split across threads.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qmem {

//! SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class RngStream : std::uint64_t {
    pairs = 1,
    noise,
    memory,
    thin_signal,
    thin_idler,
    jitter_signal,
    jitter_idler,
    dark_signal,
    dark_idler,
    split,
    synthetic,
};

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, RngStream stream, std::uint64_t index)
        : key_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream))
                     ^ index))
    {
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++ctr_); }

    //! Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal()
    {
        double u = uniform(), v = uniform();
        return std::sqrt(-2 * std::log(u)) * std::cos(2 * std::numbers::pi * v);
    }

    //! Number of pairs from P(n) = (1-p) pⁿ.
    unsigned geometric(double p)
    {
        if (p <= 0)
            return 0;
        return static_cast<unsigned>(std::floor(std::log(uniform()) / std::log(p)));
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace qmem
