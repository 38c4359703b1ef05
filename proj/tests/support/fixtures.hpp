// Hand-built fixture corpus shared by the unit, CLI and acceptance suites.
//
//   grid_piano.mid          format 0, on-grid quarter notes, fixed velocity
//   grid_bass.mid           format 1, 3/4 conductor track, on-grid eighths
//   humanized_piano.mid     format 0, 64 distinct microtimings and velocities
//   humanized_strings.mid   format 1, 41 distinct microtimings, 3 velocities
//   drums/groove.mid        format 0, sixteenth-note drum loop on channel 10
//                           plus two electric piano notes on channel 1
//   corrupt.mid             track chunk length runs past end of file
#ifndef MIDIEXPR_TESTS_FIXTURES_HPP
#define MIDIEXPR_TESTS_FIXTURES_HPP

#include "smf_writer.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;

inline Bytes grid_piano() {
    TrackBuilder t;
    t.program(0, 0, 0);
    const int pitches[] = {60, 62, 64, 65, 67, 69, 71, 72};
    for (int i = 0; i < 8; ++i) t.note(i * 480, 480, 0, pitches[i], 100);
    return write_smf(0, 480, {t});
}

inline Bytes grid_bass() {
    TrackBuilder conductor;
    conductor.track_name(0, "conductor").tempo(0, 600000).time_signature(0, 3, 2);
    TrackBuilder bass;
    bass.program(0, 1, 33);
    for (int i = 0; i < 12; ++i) bass.note(i * 48, 48, 1, 36 + i % 5, 80, /*off_as_zero_velocity=*/true);
    return write_smf(1, 96, {conductor, bass});
}

inline Bytes humanized_piano() {
    TrackBuilder t;
    t.program(0, 0, 0);
    for (int i = 0; i < 64; ++i) t.note(i * 480 + 7 * i + 1, 240, 0, 48 + i % 24, 40 + i);
    return write_smf(0, 480, {t});
}

inline Bytes humanized_strings() {
    TrackBuilder conductor;
    conductor.tempo(0, 500000).time_signature(0, 4, 2).sysex(0, {0x7E, 0x7F, 0x09, 0x01, 0xF7}).tempo(960 * 20, 450000);
    TrackBuilder strings;
    strings.program(0, 2, 40).control(0, 2, 7, 100);
    const int velocities[] = {80, 90, 100};
    for (int i = 0; i < 41; ++i) strings.note(i * 960 + 11 * i + 3, 480, 2, 60 + i % 12, velocities[i % 3]);
    return write_smf(1, 960, {conductor, strings});
}

inline Bytes drum_groove() {
    TrackBuilder t;
    t.program(0, 0, 4);
    const int kit[] = {36, 42, 38, 42};
    const int velocities[] = {100, 60, 80, 110};
    for (int i = 0; i < 16; ++i) t.note(i * 120, 60, 9, kit[i % 4], velocities[i % 4], i % 2 == 1);
    t.note(0, 480, 0, 60, 70).note(960, 480, 0, 64, 70);
    return write_smf(0, 480, {t});
}

inline Bytes corrupt_file() {
    Bytes out{'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0};
    Bytes chunk{'M', 'T', 'r', 'k', 0, 0, 0x03, 0xE8, 0x00, 0x90, 0x3C, 0x40, 0x83, 0x60, 0x80, 0x3C, 0x40};
    out.insert(out.end(), chunk.begin(), chunk.end());
    return out;
}

inline void write_bytes(const fs::path& path, const Bytes& bytes) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Writes the six-file corpus under `root`.
inline void write_fixture_corpus(const fs::path& root) {
    write_bytes(root / "grid_piano.mid", grid_piano());
    write_bytes(root / "grid_bass.mid", grid_bass());
    write_bytes(root / "humanized_piano.mid", humanized_piano());
    write_bytes(root / "humanized_strings.midi", humanized_strings());
    write_bytes(root / "drums" / "groove.mid", drum_groove());
    write_bytes(root / "corrupt.mid", corrupt_file());
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("midiexpr-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

}  // namespace testsupport

#endif  // MIDIEXPR_TESTS_FIXTURES_HPP
