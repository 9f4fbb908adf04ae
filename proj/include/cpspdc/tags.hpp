// Copyright 2026 The cpspdc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPSPDC_TAGS_HPP
#define CPSPDC_TAGS_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cpspdc/error.hpp"

namespace cpspdc {

struct TagEvent {
    std::uint32_t channel = 0;
    std::uint64_t time_ps = 0;

    friend bool operator==(const TagEvent &, const TagEvent &) = default;
};

/// Total order used for every stream: time, then channel.
inline bool tag_less(const TagEvent &a, const TagEvent &b) {
    return std::tie(a.time_ps, a.channel) < std::tie(b.time_ps, b.channel);
}

struct TimeTagStream {
    std::vector<TagEvent> events;
    std::uint64_t repetition_period_ps = 12500;
    std::vector<std::string> channel_names;
    std::uint64_t seed = 0;  // bookkeeping; not part of the file format

    std::uint32_t channel(const std::string &name) const {
        for (std::size_t i = 0; i < channel_names.size(); ++i) {
            if (channel_names[i] == name) return static_cast<std::uint32_t>(i);
        }
        throw Error(ErrorKind::UnknownChannel, "no channel named '" + name + "'");
    }

    void check_channel(std::uint32_t id) const {
        if (id >= channel_names.size()) {
            throw Error(ErrorKind::UnknownChannel, "channel id " + std::to_string(id) + " not in stream");
        }
    }

    bool is_sorted() const { return std::is_sorted(events.begin(), events.end(), tag_less); }

    /// Times of one channel, in stream order.
    std::vector<std::uint64_t> times(std::uint32_t id) const {
        check_channel(id);
        std::vector<std::uint64_t> out;
        for (const auto &e : events) {
            if (e.channel == id) out.push_back(e.time_ps);
        }
        return out;
    }

    std::size_t count(std::uint32_t id) const {
        return static_cast<std::size_t>(
            std::count_if(events.begin(), events.end(), [id](const TagEvent &e) { return e.channel == id; }));
    }
};

// CPTT binary layout, all little-endian:
//   "CPTT" | u32 version (1) | u64 repetition period ps | u32 channel count |
//   per channel: u32 byte length + UTF-8 name |
//   records of 16 bytes: u32 channel, u32 reserved (0), u64 time ps.

inline constexpr std::uint32_t kCpttVersion = 1;

namespace detail {

inline void put_u32(std::string &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_u64(std::string &out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class ByteReader {
   public:
    explicit ByteReader(const std::string &data) : data_(data) {}
    std::uint64_t get(int bytes) {
        if (pos_ + static_cast<std::size_t>(bytes) > data_.size()) {
            throw Error(ErrorKind::Io, "truncated CPTT data");
        }
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::string take(std::size_t n) {
        if (pos_ + n > data_.size()) throw Error(ErrorKind::Io, "truncated CPTT data");
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

   private:
    const std::string &data_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_cptt(const TimeTagStream &stream) {
    std::string out = "CPTT";
    detail::put_u32(out, kCpttVersion);
    detail::put_u64(out, stream.repetition_period_ps);
    detail::put_u32(out, static_cast<std::uint32_t>(stream.channel_names.size()));
    for (const auto &name : stream.channel_names) {
        detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
        out += name;
    }
    out.reserve(out.size() + 16 * stream.events.size());
    for (const auto &e : stream.events) {
        detail::put_u32(out, e.channel);
        detail::put_u32(out, 0);
        detail::put_u64(out, e.time_ps);
    }
    return out;
}

inline TimeTagStream decode_cptt(const std::string &data) {
    if (data.size() < 4 || data.compare(0, 4, "CPTT") != 0) throw Error(ErrorKind::Io, "missing CPTT magic");
    detail::ByteReader in(data);
    in.take(4);
    auto version = static_cast<std::uint32_t>(in.get(4));
    if (version != kCpttVersion) throw Error(ErrorKind::Io, "unsupported CPTT version " + std::to_string(version));
    TimeTagStream s;
    s.repetition_period_ps = in.get(8);
    auto n_channels = static_cast<std::uint32_t>(in.get(4));
    for (std::uint32_t i = 0; i < n_channels; ++i) {
        auto len = static_cast<std::size_t>(in.get(4));
        s.channel_names.push_back(in.take(len));
    }
    if (in.remaining() % 16 != 0) throw Error(ErrorKind::Io, "CPTT record section is not a multiple of 16 bytes");
    s.events.resize(in.remaining() / 16);
    for (auto &e : s.events) {
        e.channel = static_cast<std::uint32_t>(in.get(4));
        if (in.get(4) != 0) throw Error(ErrorKind::Io, "CPTT reserved field must be zero");
        e.time_ps = in.get(8);
        if (e.channel >= n_channels) throw Error(ErrorKind::Io, "CPTT record references unknown channel");
    }
    return s;
}

inline void write_cptt(const std::string &path, const TimeTagStream &stream) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    std::string bytes = encode_cptt(stream);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline TimeTagStream read_cptt(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open tag file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_cptt(ss.str());
}

/// Debug export: `# period_ps=`, `# channels=` comment lines, then `channel,time_ps`.
inline void write_tags_csv(const std::string &path, const TimeTagStream &stream) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << "# period_ps=" << stream.repetition_period_ps << "\n# channels=";
    for (std::size_t i = 0; i < stream.channel_names.size(); ++i) out << (i ? "," : "") << stream.channel_names[i];
    out << "\nchannel,time_ps\n";
    for (const auto &e : stream.events) out << e.channel << ',' << e.time_ps << '\n';
}

inline TimeTagStream read_tags_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open tag file '" + path + "'");
    TimeTagStream s;
    std::string line;
    bool header_seen = false;
    std::uint32_t max_channel = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# period_ps=", 0) == 0) {
                s.repetition_period_ps = std::stoull(line.substr(12));
            } else if (line.rfind("# channels=", 0) == 0) {
                std::stringstream names(line.substr(11));
                std::string name;
                while (std::getline(names, name, ',')) s.channel_names.push_back(name);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "channel,time_ps") throw Error(ErrorKind::Io, "expected header channel,time_ps");
            header_seen = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::Io, "bad tag row '" + line + "'");
        TagEvent e;
        e.channel = static_cast<std::uint32_t>(std::stoul(line.substr(0, comma)));
        e.time_ps = std::stoull(line.substr(comma + 1));
        max_channel = std::max(max_channel, e.channel);
        s.events.push_back(e);
    }
    while (s.channel_names.size() <= max_channel && !s.events.empty()) {
        s.channel_names.push_back("ch" + std::to_string(s.channel_names.size()));
    }
    std::stable_sort(s.events.begin(), s.events.end(), tag_less);
    return s;
}

}  // namespace cpspdc

#endif
