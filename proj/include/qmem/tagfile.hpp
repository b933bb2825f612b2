// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
// Time-tag files: a `#qmemtags v1` header line followed by
// `channel,time_ps[,origin]` rows in time order.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmem/events.hpp"

namespace qmem {

struct TagFileHeader {
    std::int64_t duration_ps = 0;
    std::uint64_t seed = 0;
};

struct TagFile {
    TagFileHeader header;
    std::vector<TimeTag> tags;
    bool has_origin = false;
};

void write_tags(std::ostream& out, const TagFileHeader& header,
                const std::vector<TimeTag>& tags, bool with_origin = true);
//! Throws IoError when the file cannot be written.
void write_tag_file(const std::filesystem::path& path, const TagFileHeader& header,
                    const std::vector<TimeTag>& tags, bool with_origin = true);

//! Throws ConfigError on a malformed header, unknown version or bad row.
TagFile read_tags(std::istream& in);
//! As above; throws IoError when the file cannot be opened.
TagFile read_tag_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

//! `key = value` lines; keys keep their order.
void write_manifest(const std::filesystem::path& path, const KeyValues& entries);
KeyValues read_manifest(const std::filesystem::path& path);

}  // namespace qmem
