// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/tagfile.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "qmem/error.hpp"

namespace qmem {

namespace {

constexpr std::string_view magic = "#qmemtags";
constexpr std::string_view version = "v1";

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view what)
{
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("tag file: bad " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

TagFileHeader parse_header(std::string_view line)
{
    if (line.substr(0, magic.size()) != magic)
        throw ConfigError("tag file: missing #qmemtags header");
    line.remove_prefix(magic.size());
    auto semi = line.find(';');
    std::string_view ver = trim(line.substr(0, semi));
    if (ver != version)
        throw ConfigError("tag file: unsupported format version '" + std::string(ver) + "'");
    TagFileHeader h;
    bool have_duration = false, have_seed = false;
    while (semi != std::string_view::npos) {
        line.remove_prefix(semi + 1);
        semi = line.find(';');
        std::string_view field = trim(line.substr(0, semi));
        auto eq = field.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("tag file: bad header field '" + std::string(field) + "'");
        std::string_view key = trim(field.substr(0, eq));
        std::string_view value = trim(field.substr(eq + 1));
        if (key == "resolution") {
            if (value != "1ps")
                throw ConfigError("tag file: unsupported resolution '" + std::string(value) + "'");
        } else if (key == "duration") {
            h.duration_ps = parse_int<std::int64_t>(value, "duration");
            have_duration = true;
        } else if (key == "seed") {
            h.seed = parse_int<std::uint64_t>(value, "seed");
            have_seed = true;
        }
    }
    if (!have_duration || !have_seed)
        throw ConfigError("tag file: header lacks duration or seed");
    return h;
}

}  // namespace

void write_tags(std::ostream& out, const TagFileHeader& header,
                const std::vector<TimeTag>& tags, bool with_origin)
{
    out << magic << ' ' << version << "; resolution=1ps; duration=" << header.duration_ps
        << "; seed=" << header.seed << '\n';
    for (const TimeTag& t : tags) {
        out << to_string(t.channel) << ',' << t.time_ps;
        if (with_origin)
            out << ',' << to_string(t.origin);
        out << '\n';
    }
}

void write_tag_file(const std::filesystem::path& path, const TagFileHeader& header,
                    const std::vector<TimeTag>& tags, bool with_origin)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_tags(out, header, tags, with_origin);
    out.flush();
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

TagFile read_tags(std::istream& in)
{
    TagFile file;
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("tag file: empty input");
    file.header = parse_header(trim(line));

    std::int64_t last[3] = {INT64_MIN, INT64_MIN, INT64_MIN};
    bool first = true;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view row = trim(line);
        if (row.empty() || row.front() == '#')
            continue;
        auto where = [&] { return " on line " + std::to_string(lineno); };
        auto c1 = row.find(',');
        if (c1 == std::string_view::npos)
            throw ConfigError("tag file: missing time" + where());
        auto c2 = row.find(',', c1 + 1);
        auto channel = parse_channel(trim(row.substr(0, c1)));
        if (!channel)
            throw ConfigError("tag file: unknown channel" + where());
        TimeTag tag{*channel, 0, Origin::pair};
        tag.time_ps = parse_int<std::int64_t>(
            trim(row.substr(c1 + 1, c2 == std::string_view::npos ? row.npos : c2 - c1 - 1)),
            "time");
        bool has_origin = c2 != std::string_view::npos;
        if (has_origin) {
            auto origin = parse_origin(trim(row.substr(c2 + 1)));
            if (!origin)
                throw ConfigError("tag file: unknown origin" + where());
            tag.origin = *origin;
        }
        if (first)
            file.has_origin = has_origin;
        first = false;
        if (tag.time_ps < 0 || tag.time_ps > file.header.duration_ps)
            throw ConfigError("tag file: time outside [0, duration]" + where());
        auto& prev = last[static_cast<int>(tag.channel)];
        if (tag.time_ps < prev)
            throw ConfigError("tag file: times decrease within channel" + where());
        prev = tag.time_ps;
        file.tags.push_back(tag);
    }
    return file;
}

TagFile read_tag_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return read_tags(in);
}

std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

void write_manifest(const std::filesystem::path& path, const KeyValues& entries)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << "# qmem run manifest\n";
    for (const auto& [k, v] : entries)
        out << k << " = " << v << '\n';
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

KeyValues read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    KeyValues kv;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("manifest: bad line '" + std::string(s) + "'");
        kv.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return kv;
}

}  // namespace qmem
