// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace qmem {

enum class Channel : std::uint8_t { signal, idler, herald };

//! Simulation-truth label. `noise` marks broadband source photons that are
//! not part of a pair.
enum class Origin : std::uint8_t { pair, dark, leak, noise };

std::string_view to_string(Channel c);
std::string_view to_string(Origin o);
std::optional<Channel> parse_channel(std::string_view s);
std::optional<Origin> parse_origin(std::string_view s);

//! A photon inside the simulation, before detection.
struct PhotonEvent {
    std::int64_t time_ps;
    std::int64_t created_ps;  //!< pump time that produced it
    Channel channel;
    Origin origin;
    std::uint64_t id;  //!< shared by the two photons of a pair
    double frequency_offset_hz = 0;
};

//! A detection record.
struct TimeTag {
    Channel channel;
    std::int64_t time_ps;
    Origin origin = Origin::pair;

    friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

}  // namespace qmem
