// Per-track expressiveness features: distinct velocity / onset-deviation
// counts, their normalized ratios (DNVR, DNODR) and the note onset median
// metric level (NOMML).
#ifndef MIDIEXPR_HEURISTICS_HPP
#define MIDIEXPR_HEURISTICS_HPP

#include "midiexpr/rational.hpp"
#include "midiexpr/smf.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace midiexpr {

/// Depth of the duple/triplet grid hierarchy. Level codes are
/// dup^i = 2i, trip^i = 2i+1 for i < k, and 2k for onsets on no grid.
struct MetricLevelConfig {
    int k = 6;

    static constexpr int kMaxDepth = 40;

    int extra_level() const noexcept { return 2 * k; }
    void validate() const {
        if (k < 1 || k > kMaxDepth) throw std::invalid_argument("metric level depth k must be in [1, 40]");
    }
};

struct TrackFeatures {
    std::int64_t note_count = 0;
    int distinct_velocity = 0;
    std::int64_t distinct_onset_dev = 0;
    Rational dnvr_pct;
    Rational dnodr_pct;
    int nomml = 0;
    std::uint32_t tpqn = 0;
    int k = 6;

    bool operator==(const TrackFeatures&) const = default;
};

/// Microtiming position of each note inside its quarter note: onset mod tpqn.
inline std::vector<std::int64_t> onset_deviations(const AnalyzableTrack& track) {
    std::vector<std::int64_t> out;
    out.reserve(track.notes.size());
    const auto tpqn = static_cast<std::int64_t>(track.tpqn);
    for (const NoteEvent& n : track.notes) out.push_back(((n.onset % tpqn) + tpqn) % tpqn);
    return out;
}

struct DistinctCounts {
    int velocity = 0;
    std::int64_t onset = 0;
};

inline DistinctCounts distinct_counts(const AnalyzableTrack& track) {
    std::set<int> velocities;
    for (const NoteEvent& n : track.notes) velocities.insert(n.velocity);
    auto deviations = onset_deviations(track);
    std::sort(deviations.begin(), deviations.end());
    const auto unique_end = std::unique(deviations.begin(), deviations.end());
    return {static_cast<int>(velocities.size()), static_cast<std::int64_t>(unique_end - deviations.begin())};
}

inline Rational velocity_ratio_pct(int distinct_velocity) { return Rational(distinct_velocity) * 100 / 127; }

inline Rational onset_ratio_pct(std::int64_t distinct_onset, std::uint32_t tpqn) {
    if (tpqn == 0) throw std::invalid_argument("tpqn must be positive");
    return Rational(distinct_onset) * 100 / Rational(tpqn);
}

struct DistinctRatios {
    Rational dnvr_pct;
    Rational dnodr_pct;
};

inline DistinctRatios dnvr_dnodr(const AnalyzableTrack& track) {
    const DistinctCounts c = distinct_counts(track);
    return {velocity_ratio_pct(c.velocity), onset_ratio_pct(c.onset, track.tpqn)};
}

/// Coarsest grid an onset lies on, duple levels tried before triplet ones.
/// The duple grid at depth j has period tpqn/2^j and the triplet grid
/// 2*tpqn/(3*2^j); both are tested as integer congruences so fractional
/// periods need no special handling.
inline int metric_level(std::int64_t onset, std::uint32_t tpqn, int k = 6) {
    if (tpqn == 0) throw std::invalid_argument("tpqn must be positive");
    if (k < 1 || k > MetricLevelConfig::kMaxDepth) throw std::invalid_argument("metric level depth k must be in [1, 40]");
    const std::uint64_t q = tpqn;
    const std::uint64_t two_q = 2 * q;
    // Both congruences only depend on onset mod 2*tpqn.
    const std::uint64_t r = static_cast<std::uint64_t>(((onset % static_cast<std::int64_t>(two_q)) + static_cast<std::int64_t>(two_q)) %
                                                       static_cast<std::int64_t>(two_q));
    using wide = unsigned __int128;
    for (int j = 0; j < k; ++j) {
        if ((wide{r % q} << j) % q == 0) return 2 * j;
    }
    for (int j = 0; j < k; ++j) {
        if ((wide{3 * r} << j) % two_q == 0) return 2 * j + 1;
    }
    return 2 * k;
}

/// Lower-middle element of the sorted levels.
inline int median_level(std::vector<int> levels) {
    if (levels.empty()) throw std::invalid_argument("median of an empty level list");
    const auto mid = levels.begin() + static_cast<std::ptrdiff_t>((levels.size() - 1) / 2);
    std::nth_element(levels.begin(), mid, levels.end());
    return *mid;
}

inline int nomml(const AnalyzableTrack& track, const MetricLevelConfig& cfg = {}) {
    cfg.validate();
    std::vector<int> levels;
    levels.reserve(track.notes.size());
    for (const NoteEvent& n : track.notes) levels.push_back(metric_level(n.onset, track.tpqn, cfg.k));
    return median_level(std::move(levels));
}

inline TrackFeatures compute_features(const AnalyzableTrack& track, const MetricLevelConfig& cfg = {}) {
    if (track.notes.empty()) throw std::invalid_argument("cannot analyze a track without notes");
    if (track.tpqn == 0) throw std::invalid_argument("tpqn must be positive");
    const DistinctCounts counts = distinct_counts(track);
    TrackFeatures f;
    f.note_count = static_cast<std::int64_t>(track.notes.size());
    f.distinct_velocity = counts.velocity;
    f.distinct_onset_dev = counts.onset;
    f.dnvr_pct = velocity_ratio_pct(counts.velocity);
    f.dnodr_pct = onset_ratio_pct(counts.onset, track.tpqn);
    f.nomml = nomml(track, cfg);
    f.tpqn = track.tpqn;
    f.k = cfg.k;
    return f;
}

}  // namespace midiexpr

#endif  // MIDIEXPR_HEURISTICS_HPP
