// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/events.hpp"

namespace qmem {

std::string_view to_string(Channel c)
{
    switch (c) {
    case Channel::signal: return "signal";
    case Channel::idler: return "idler";
    case Channel::herald: return "herald";
    }
    return "?";
}

std::string_view to_string(Origin o)
{
    switch (o) {
    case Origin::pair: return "pair";
    case Origin::dark: return "dark";
    case Origin::leak: return "leak";
    case Origin::noise: return "noise";
    }
    return "?";
}

std::optional<Channel> parse_channel(std::string_view s)
{
    for (Channel c : {Channel::signal, Channel::idler, Channel::herald})
        if (s == to_string(c))
            return c;
    return std::nullopt;
}

std::optional<Origin> parse_origin(std::string_view s)
{
    for (Origin o : {Origin::pair, Origin::dark, Origin::leak, Origin::noise})
        if (s == to_string(o))
            return o;
    return std::nullopt;
}

}  // namespace qmem
