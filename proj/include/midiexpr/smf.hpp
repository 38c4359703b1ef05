// Standard MIDI File (SMF 1.0) decoding into per-(track chunk, channel) note
// streams plus the tempo / time-signature maps of the file.
#ifndef MIDIEXPR_SMF_HPP
#define MIDIEXPR_SMF_HPP

#include "midiexpr/rational.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace midiexpr {

using Tick = std::int64_t;

enum class SmfErrorKind {
    NotSmf,
    InvalidHeader,
    SmpteTiming,
    TruncatedChunk,
    MalformedVlq,
    MalformedEvent,
};

inline const char* to_string(SmfErrorKind kind) {
    switch (kind) {
        case SmfErrorKind::NotSmf: return "NotSmf";
        case SmfErrorKind::InvalidHeader: return "InvalidHeader";
        case SmfErrorKind::SmpteTiming: return "SmpteTiming";
        case SmfErrorKind::TruncatedChunk: return "TruncatedChunk";
        case SmfErrorKind::MalformedVlq: return "MalformedVlq";
        case SmfErrorKind::MalformedEvent: return "MalformedEvent";
    }
    return "Unknown";
}

/// Every decoding failure carries its kind and the absolute byte offset at
/// which it was detected.
class SmfError : public std::runtime_error {
public:
    SmfError(SmfErrorKind kind, std::size_t offset, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + detail),
          kind_(kind),
          offset_(offset),
          detail_(detail) {}

    SmfErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    SmfErrorKind kind_;
    std::size_t offset_;
    std::string detail_;
};

struct SmfHeader {
    int format = 0;
    int track_count = 0;
    std::uint32_t tpqn = 0;

    bool operator==(const SmfHeader&) const = default;
};

struct NoteEvent {
    Tick onset = 0;
    Tick duration = 1;
    int pitch = 0;
    int velocity = 1;
    int channel = 0;

    Tick offset() const noexcept { return onset + duration; }
    bool operator==(const NoteEvent&) const = default;
};

inline constexpr int kDrumChannel = 9;

struct AnalyzableTrack {
    int source_track_index = 0;
    int channel = 0;
    bool is_drum = false;
    std::vector<int> programs;  // sorted, unique
    int first_program = 0;      // program active at the channel's first note
    std::vector<NoteEvent> notes;
    std::uint32_t tpqn = 0;

    bool operator==(const AnalyzableTrack&) const = default;
};

struct TempoChange {
    Tick tick = 0;
    std::uint32_t usec_per_quarter = 500000;

    bool operator==(const TempoChange&) const = default;
};

struct TimeSignature {
    Tick tick = 0;
    int numerator = 4;
    int denominator = 4;

    bool operator==(const TimeSignature&) const = default;
};

struct TimingMaps {
    std::vector<TempoChange> tempo_changes;
    std::vector<TimeSignature> time_signatures;

    bool operator==(const TimingMaps&) const = default;
};

enum class WarningKind {
    FormatTwo,
    TrackCountMismatch,
    MissingEndOfTrack,
    DataAfterEndOfTrack,
    UnknownChunk,
    InvalidMeta,
};

struct ParseWarning {
    WarningKind kind;
    std::size_t offset;
    std::string message;
};

struct ParsedSmf {
    SmfHeader header;
    std::vector<AnalyzableTrack> tracks;
    TimingMaps timing;
    /// Format 2 only: one map per MTrk chunk, indexed by chunk.
    std::vector<TimingMaps> chunk_timing;
    std::vector<ParseWarning> warnings;

    const TimingMaps& timing_for(const AnalyzableTrack& track) const {
        if (header.format == 2 && track.source_track_index >= 0 &&
            static_cast<std::size_t>(track.source_track_index) < chunk_timing.size()) {
            return chunk_timing[static_cast<std::size_t>(track.source_track_index)];
        }
        return timing;
    }
};

struct VlqResult {
    std::uint32_t value = 0;
    std::size_t consumed = 0;
};

/// Decodes one variable-length quantity (7 bits per byte, big-endian, at most
/// four bytes). `base_offset` only feeds error messages.
inline VlqResult read_vlq(std::span<const std::uint8_t> bytes, std::size_t base_offset = 0) {
    if (bytes.empty()) throw SmfError(SmfErrorKind::TruncatedChunk, base_offset, "expected variable-length quantity");
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size()) {
            throw SmfError(SmfErrorKind::TruncatedChunk, base_offset + i, "variable-length quantity runs past end of data");
        }
        value = (value << 7) | (bytes[i] & 0x7Fu);
        if ((bytes[i] & 0x80u) == 0) return {value, i + 1};
    }
    throw SmfError(SmfErrorKind::MalformedVlq, base_offset, "no terminating byte within 4 bytes");
}

namespace detail {

inline std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
           std::uint32_t{b[at + 3]};
}

inline std::uint16_t read_be16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

inline bool has_tag(std::span<const std::uint8_t> b, std::size_t at, const char (&tag)[5]) {
    return at + 4 <= b.size() && std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(at));
}

/// Sorts by tick, keeps the last entry per tick and injects a tick-0 default.
template <typename Entry>
void normalize_map(std::vector<Entry>& entries, const Entry& fallback) {
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.tick < b.tick; });
    std::vector<Entry> out;
    for (const Entry& e : entries) {
        if (!out.empty() && out.back().tick == e.tick) {
            out.back() = e;
        } else {
            out.push_back(e);
        }
    }
    if (out.empty() || out.front().tick != 0) out.insert(out.begin(), fallback);
    entries = std::move(out);
}

inline void normalize(TimingMaps& maps) {
    normalize_map(maps.tempo_changes, TempoChange{});
    normalize_map(maps.time_signatures, TimeSignature{});
}

struct ChannelState {
    std::vector<NoteEvent> notes;
    std::vector<int> programs;
    std::optional<int> current_program;
    std::optional<int> program_at_first_note;
    bool has_note_on = false;
    std::map<int, std::deque<std::pair<Tick, int>>> pending;  // pitch -> FIFO of (onset, velocity)
};

class TrackDecoder {
public:
    TrackDecoder(std::span<const std::uint8_t> file, std::size_t begin, std::size_t end, int chunk_index,
                 std::uint32_t tpqn, TimingMaps& timing, std::vector<ParseWarning>& warnings)
        : file_(file), pos_(begin), end_(end), chunk_index_(chunk_index), tpqn_(tpqn), timing_(timing),
          warnings_(warnings) {}

    std::vector<AnalyzableTrack> decode() {
        bool saw_end = false;
        while (pos_ < end_) {
            const std::size_t event_start = pos_;
            auto delta = read_vlq(file_.subspan(pos_, end_ - pos_), pos_);
            pos_ += delta.consumed;
            tick_ += delta.value;
            need(1);
            const std::uint8_t lead = file_[pos_];

            if (lead == 0xFF) {
                ++pos_;
                need(1);
                const std::uint8_t type = file_[pos_++];
                const std::size_t length = read_length();
                need(length);
                handle_meta(type, file_.subspan(pos_, length), event_start);
                pos_ += length;
                running_status_ = 0;
                if (type == 0x2F) {
                    saw_end = true;
                    break;
                }
            } else if (lead == 0xF0 || lead == 0xF7) {
                ++pos_;
                const std::size_t length = read_length();
                need(length);
                pos_ += length;
                running_status_ = 0;
            } else if (lead >= 0xF1) {
                throw SmfError(SmfErrorKind::MalformedEvent, pos_, "system message not allowed in a track chunk");
            } else {
                std::uint8_t status = lead;
                if (lead & 0x80u) {
                    ++pos_;
                    running_status_ = lead;
                } else {
                    if (running_status_ == 0) {
                        throw SmfError(SmfErrorKind::MalformedEvent, pos_, "data byte without running status");
                    }
                    status = running_status_;
                }
                handle_channel_message(status);
            }
        }
        if (!saw_end) {
            warnings_.push_back({WarningKind::MissingEndOfTrack, end_, "track chunk " + std::to_string(chunk_index_) + " has no end-of-track event"});
        } else if (pos_ < end_) {
            warnings_.push_back({WarningKind::DataAfterEndOfTrack, pos_, "ignored " + std::to_string(end_ - pos_) + " bytes after end-of-track"});
        }
        return finish();
    }

private:
    void need(std::size_t n) const {
        if (n > end_ - pos_) throw SmfError(SmfErrorKind::TruncatedChunk, pos_, "event runs past end of track chunk");
    }

    std::size_t read_length() {
        auto len = read_vlq(file_.subspan(pos_, end_ - pos_), pos_);
        pos_ += len.consumed;
        return len.value;
    }

    void handle_meta(std::uint8_t type, std::span<const std::uint8_t> data, std::size_t at) {
        if (type == 0x51) {
            if (data.size() != 3) {
                warnings_.push_back({WarningKind::InvalidMeta, at, "tempo meta event with length " + std::to_string(data.size())});
                return;
            }
            std::uint32_t usec = (std::uint32_t{data[0]} << 16) | (std::uint32_t{data[1]} << 8) | data[2];
            if (usec == 0) {
                warnings_.push_back({WarningKind::InvalidMeta, at, "zero tempo ignored"});
                return;
            }
            timing_.tempo_changes.push_back({tick_, usec});
        } else if (type == 0x58) {
            if (data.size() < 2 || data[0] == 0 || data[1] > 7) {
                warnings_.push_back({WarningKind::InvalidMeta, at, "invalid time signature ignored"});
                return;
            }
            timing_.time_signatures.push_back({tick_, data[0], 1 << data[1]});
        }
    }

    std::uint8_t data_byte() {
        need(1);
        const std::uint8_t b = file_[pos_];
        if (b & 0x80u) throw SmfError(SmfErrorKind::MalformedEvent, pos_, "status byte where data byte expected");
        ++pos_;
        return b;
    }

    void handle_channel_message(std::uint8_t status) {
        const int channel = status & 0x0F;
        const int kind = status & 0xF0;
        const std::uint8_t first = data_byte();
        if (kind == 0xC0 || kind == 0xD0) {
            if (kind == 0xC0) program_change(channel, first);
            return;
        }
        const std::uint8_t second = data_byte();
        if (kind == 0x90 && second > 0) {
            note_on(channel, first, second);
        } else if (kind == 0x80 || kind == 0x90) {
            note_off(channel, first);
        }
    }

    void program_change(int channel, int program) {
        ChannelState& ch = channels_[static_cast<std::size_t>(channel)];
        ch.current_program = program;
        if (std::find(ch.programs.begin(), ch.programs.end(), program) == ch.programs.end()) ch.programs.push_back(program);
    }

    void note_on(int channel, int pitch, int velocity) {
        ChannelState& ch = channels_[static_cast<std::size_t>(channel)];
        if (!ch.has_note_on) {
            ch.has_note_on = true;
            ch.program_at_first_note = ch.current_program;
        }
        ch.pending[pitch].emplace_back(tick_, velocity);
    }

    void note_off(int channel, int pitch) {
        ChannelState& ch = channels_[static_cast<std::size_t>(channel)];
        auto it = ch.pending.find(pitch);
        if (it == ch.pending.end() || it->second.empty()) return;  // stray note-off
        auto [onset, velocity] = it->second.front();
        it->second.pop_front();
        emit(ch, channel, pitch, onset, velocity, tick_);
    }

    static void emit(ChannelState& ch, int channel, int pitch, Tick onset, int velocity, Tick off) {
        ch.notes.push_back({onset, std::max<Tick>(1, off - onset), pitch, velocity, channel});
    }

    std::vector<AnalyzableTrack> finish() {
        std::vector<AnalyzableTrack> out;
        for (int c = 0; c < 16; ++c) {
            ChannelState& ch = channels_[static_cast<std::size_t>(c)];
            for (auto& [pitch, queue] : ch.pending) {
                for (auto [onset, velocity] : queue) emit(ch, c, pitch, onset, velocity, tick_);
            }
            if (ch.notes.empty()) continue;
            std::stable_sort(ch.notes.begin(), ch.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
                return a.onset != b.onset ? a.onset < b.onset : a.pitch < b.pitch;
            });
            AnalyzableTrack track;
            track.source_track_index = chunk_index_;
            track.channel = c;
            track.is_drum = c == kDrumChannel;
            track.programs = ch.programs;
            std::sort(track.programs.begin(), track.programs.end());
            if (ch.program_at_first_note) {
                track.first_program = *ch.program_at_first_note;
            } else if (!ch.programs.empty()) {
                track.first_program = ch.programs.front();  // first program change seen, in event order
            }
            track.notes = std::move(ch.notes);
            track.tpqn = tpqn_;
            out.push_back(std::move(track));
        }
        return out;
    }

    std::span<const std::uint8_t> file_;
    std::size_t pos_;
    std::size_t end_;
    int chunk_index_;
    std::uint32_t tpqn_;
    TimingMaps& timing_;
    std::vector<ParseWarning>& warnings_;
    Tick tick_ = 0;
    std::uint8_t running_status_ = 0;
    std::array<ChannelState, 16> channels_{};
};

}  // namespace detail

/// Decodes a complete SMF image. Throws SmfError on any structural problem;
/// recoverable oddities are reported through `warnings`.
inline ParsedSmf parse_file(std::span<const std::uint8_t> bytes) {
    using detail::read_be16;
    using detail::read_be32;

    if (!detail::has_tag(bytes, 0, "MThd")) throw SmfError(SmfErrorKind::NotSmf, 0, "missing MThd signature");
    if (bytes.size() < 14) throw SmfError(SmfErrorKind::TruncatedChunk, bytes.size(), "header chunk shorter than 14 bytes");
    const std::uint32_t header_length = read_be32(bytes, 4);
    if (header_length < 6) throw SmfError(SmfErrorKind::InvalidHeader, 4, "header length " + std::to_string(header_length));
    if (header_length > bytes.size() - 8) throw SmfError(SmfErrorKind::TruncatedChunk, 4, "header chunk length exceeds file size");

    ParsedSmf out;
    out.header.format = read_be16(bytes, 8);
    const int declared_tracks = read_be16(bytes, 10);
    const std::uint16_t division = read_be16(bytes, 12);
    if (out.header.format > 2) throw SmfError(SmfErrorKind::InvalidHeader, 8, "unsupported format " + std::to_string(out.header.format));
    if (division & 0x8000u) throw SmfError(SmfErrorKind::SmpteTiming, 12, "SMPTE time division is not supported");
    if (division == 0) throw SmfError(SmfErrorKind::InvalidHeader, 12, "ticks per quarter note is zero");
    out.header.tpqn = division;
    if (out.header.format == 2) {
        out.warnings.push_back({WarningKind::FormatTwo, 8, "format 2 file: track chunks analyzed independently"});
    }

    std::size_t pos = 8 + header_length;
    int chunk_index = 0;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < 8) throw SmfError(SmfErrorKind::TruncatedChunk, pos, "incomplete chunk header");
        const std::uint32_t length = read_be32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (length > bytes.size() - body) throw SmfError(SmfErrorKind::TruncatedChunk, pos, "chunk length exceeds file size");
        if (!detail::has_tag(bytes, pos, "MTrk")) {
            out.warnings.push_back({WarningKind::UnknownChunk, pos, "skipped unknown chunk"});
            pos = body + length;
            continue;
        }
        TimingMaps local;
        TimingMaps& sink = out.header.format == 2 ? local : out.timing;
        detail::TrackDecoder decoder(bytes, body, body + length, chunk_index, out.header.tpqn, sink, out.warnings);
        for (auto& t : decoder.decode()) out.tracks.push_back(std::move(t));
        if (out.header.format == 2) {
            detail::normalize(local);
            out.chunk_timing.push_back(std::move(local));
        }
        ++chunk_index;
        pos = body + length;
    }
    out.header.track_count = chunk_index;
    if (chunk_index != declared_tracks) {
        out.warnings.push_back({WarningKind::TrackCountMismatch, 10,
                                "header declares " + std::to_string(declared_tracks) + " tracks, found " + std::to_string(chunk_index)});
    }
    detail::normalize(out.timing);
    return out;
}

inline Tick last_note_off(const AnalyzableTrack& track) {
    Tick end = 0;
    for (const NoteEvent& n : track.notes) end = std::max(end, n.offset());
    return end;
}

/// Length in bars from tick 0 to the track's last note-off, integrated over
/// the time-signature segments (bar = numerator * tpqn * 4 / denominator ticks).
inline Rational duration_bars(const AnalyzableTrack& track, const TimingMaps& timing) {
    const Tick end = last_note_off(track);
    const Rational tpqn(track.tpqn);
    std::vector<TimeSignature> sigs = timing.time_signatures;
    if (sigs.empty() || sigs.front().tick != 0) sigs.insert(sigs.begin(), TimeSignature{});

    Rational bars = 0;
    for (std::size_t i = 0; i < sigs.size() && sigs[i].tick < end; ++i) {
        const Tick seg_end = (i + 1 < sigs.size()) ? std::min(end, sigs[i + 1].tick) : end;
        const Rational bar_ticks = Rational(sigs[i].numerator) * tpqn * 4 / Rational(sigs[i].denominator);
        bars += Rational(seg_end - sigs[i].tick) / bar_ticks;
    }
    return bars;
}

}  // namespace midiexpr

#endif  // MIDIEXPR_SMF_HPP
