// Batch curation: content digests, General MIDI instrument groups, per-track
// corpus records, order-independent summary aggregation and the directory
// scanner that ties them together.
#ifndef MIDIEXPR_CORPUS_HPP
#define MIDIEXPR_CORPUS_HPP

#include "midiexpr/classify.hpp"
#include "midiexpr/heuristics.hpp"
#include "midiexpr/rational.hpp"
#include "midiexpr/smf.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace midiexpr {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- digests

inline constexpr std::string_view kDigestAlgorithm = "md5";

/// MD5 of the raw bytes as 32 lowercase hex digits. Used only to detect
/// byte-identical files.
inline std::string content_digest(std::span<const std::uint8_t> bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_md5(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &md_len) != 1) {
        throw std::runtime_error("MD5 digest computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 0x0F];
    }
    return out;
}

// ------------------------------------------------------ instrument groups

enum class InstrumentGroup : int {
    Piano,
    ChromaticPercussion,
    Organ,
    Guitar,
    Bass,
    Strings,
    Ensemble,
    Brass,
    Reed,
    Pipe,
    SynthLead,
    SynthPad,
    SynthEffects,
    Ethnic,
    Percussive,
    SoundEffects,
    Drums,
};

inline constexpr std::size_t kInstrumentGroupCount = 17;

inline constexpr std::array<std::string_view, kInstrumentGroupCount> kInstrumentGroupNames = {
    "Piano", "Chromatic Percussion", "Organ", "Guitar", "Bass", "Strings", "Ensemble", "Brass", "Reed",
    "Pipe", "Synth Lead", "Synth Pad", "Synth FX", "Ethnic", "Percussive", "Sound FX", "Drums",
};

inline std::string_view to_string(InstrumentGroup g) { return kInstrumentGroupNames[static_cast<std::size_t>(g)]; }

inline InstrumentGroup parse_instrument_group(std::string_view name) {
    for (std::size_t i = 0; i < kInstrumentGroupNames.size(); ++i) {
        if (kInstrumentGroupNames[i] == name) return static_cast<InstrumentGroup>(i);
    }
    throw std::invalid_argument("unknown instrument group '" + std::string(name) + "'");
}

/// Blocks of eight GM programs (0-indexed); anything on the drum channel is Drums.
inline InstrumentGroup instrument_group(int program, bool is_drum) {
    if (is_drum) return InstrumentGroup::Drums;
    if (program < 0 || program > 127) throw std::out_of_range("program number must be in [0, 127]");
    return static_cast<InstrumentGroup>(program / 8);
}

// ------------------------------------------------------------- records

inline constexpr int kRecordSchemaVersion = 1;

struct CorpusRecord {
    std::string file_digest;
    std::string relative_path;
    int track_index = 0;
    int channel = 0;
    bool is_drum = false;
    int program = 0;
    std::vector<int> programs;
    InstrumentGroup instrument_group = InstrumentGroup::Piano;
    TrackFeatures features;
    ExpressivenessClass quadrant_distinct = ExpressivenessClass::NE;
    ExpressivenessClass quadrant_ratio = ExpressivenessClass::NE;
    ExpressivenessClass nomml_class = ExpressivenessClass::NE;
    Rational duration_bars;
    int parse_warnings = 0;

    bool operator==(const CorpusRecord&) const = default;
};

inline bool record_order(const CorpusRecord& a, const CorpusRecord& b) {
    if (a.file_digest != b.file_digest) return a.file_digest < b.file_digest;
    if (a.track_index != b.track_index) return a.track_index < b.track_index;
    return a.channel < b.channel;
}

struct FileAnalysis {
    std::string digest;
    ParsedSmf parsed;
    std::vector<CorpusRecord> records;
};

/// Builds one record per analyzable track of an already-parsed file.
/// `force_drum` marks every track as drums regardless of channel.
inline std::vector<CorpusRecord> make_records(const ParsedSmf& parsed, const std::string& digest,
                                              const std::string& relative_path, const ThresholdSet& thresholds,
                                              bool force_drum = false) {
    std::vector<CorpusRecord> out;
    out.reserve(parsed.tracks.size());
    for (const AnalyzableTrack& track : parsed.tracks) {
        CorpusRecord r;
        r.file_digest = digest;
        r.relative_path = relative_path;
        r.track_index = track.source_track_index;
        r.channel = track.channel;
        r.is_drum = track.is_drum || force_drum;
        r.program = track.first_program;
        r.programs = track.programs;
        r.instrument_group = instrument_group(track.first_program, r.is_drum);
        r.features = compute_features(track, MetricLevelConfig{thresholds.k});
        r.quadrant_distinct = classify_quadrant(r.features, thresholds, FeatureBasis::Distinct);
        r.quadrant_ratio = classify_quadrant(r.features, thresholds, FeatureBasis::Ratio);
        r.nomml_class = classify_nomml(r.features, thresholds);
        r.duration_bars = duration_bars(track, parsed.timing_for(track));
        r.parse_warnings = static_cast<int>(parsed.warnings.size());
        out.push_back(std::move(r));
    }
    return out;
}

inline FileAnalysis analyze_bytes(std::span<const std::uint8_t> bytes, const std::string& relative_path,
                                  const ThresholdSet& thresholds, bool force_drum = false) {
    FileAnalysis a;
    a.digest = content_digest(bytes);
    a.parsed = parse_file(bytes);
    a.records = make_records(a.parsed, a.digest, relative_path, thresholds, force_drum);
    return a;
}

inline std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return bytes;
}

// ------------------------------------------------------------- summary

/// Commutative monoid over records. Holds mergeable raw tallies; shares and
/// percentiles are derived on demand.
struct CorpusSummary {
    struct FileTally {
        std::uint32_t tpqn = 0;
        std::int64_t notes = 0;
        bool operator==(const FileTally&) const = default;
    };

    std::optional<int> k;
    std::int64_t track_count = 0;
    std::int64_t note_event_count = 0;
    std::map<std::string, FileTally> files;  // by digest
    std::map<int, std::int64_t> nomml_histogram;
    std::array<std::int64_t, 4> quadrant_distinct{};
    std::array<std::int64_t, 4> quadrant_ratio{};
    std::array<std::int64_t, 2> nomml_classes{};  // NE, EP
    std::array<std::int64_t, kInstrumentGroupCount> group_notes{};

    bool operator==(const CorpusSummary&) const = default;

    std::int64_t file_count() const { return static_cast<std::int64_t>(files.size()); }

    void add(const CorpusRecord& r) {
        merge_k(r.features.k);
        ++track_count;
        note_event_count += r.features.note_count;
        FileTally& f = files[r.file_digest];
        f.tpqn = r.features.tpqn;
        f.notes += r.features.note_count;
        ++nomml_histogram[r.features.nomml];
        ++quadrant_distinct[static_cast<std::size_t>(r.quadrant_distinct)];
        ++quadrant_ratio[static_cast<std::size_t>(r.quadrant_ratio)];
        ++nomml_classes[r.nomml_class == ExpressivenessClass::EP ? 1 : 0];
        group_notes[static_cast<std::size_t>(r.instrument_group)] += r.features.note_count;
    }

    void merge(const CorpusSummary& other) {
        if (other.k) merge_k(*other.k);
        track_count += other.track_count;
        note_event_count += other.note_event_count;
        for (const auto& [digest, tally] : other.files) {
            FileTally& f = files[digest];
            f.tpqn = tally.tpqn;
            f.notes += tally.notes;
        }
        for (const auto& [level, count] : other.nomml_histogram) nomml_histogram[level] += count;
        for (std::size_t i = 0; i < 4; ++i) {
            quadrant_distinct[i] += other.quadrant_distinct[i];
            quadrant_ratio[i] += other.quadrant_ratio[i];
        }
        for (std::size_t i = 0; i < 2; ++i) nomml_classes[i] += other.nomml_classes[i];
        for (std::size_t i = 0; i < kInstrumentGroupCount; ++i) group_notes[i] += other.group_notes[i];
    }

    int depth() const { return k.value_or(6); }

    /// Dense histogram with 2k+1 bins (13 for k = 6).
    std::vector<std::int64_t> histogram_bins() const {
        std::vector<std::int64_t> bins(static_cast<std::size_t>(2 * depth() + 1), 0);
        for (const auto& [level, count] : nomml_histogram) bins.at(static_cast<std::size_t>(level)) += count;
        return bins;
    }

    static Rational share(std::int64_t part, std::int64_t whole) {
        return whole == 0 ? Rational(0) : Rational(part) / Rational(whole);
    }

    enum class FileMeasure { Tpqn, NoteCount };

    /// Nearest-rank percentile over files.
    std::int64_t file_percentile(FileMeasure measure, int pct) const {
        if (files.empty()) return 0;
        std::vector<std::int64_t> values;
        values.reserve(files.size());
        for (const auto& [digest, f] : files) values.push_back(measure == FileMeasure::Tpqn ? f.tpqn : f.notes);
        std::sort(values.begin(), values.end());
        const auto n = static_cast<std::int64_t>(values.size());
        std::int64_t rank = (pct * n + 99) / 100;
        rank = std::clamp<std::int64_t>(rank, 1, n);
        return values[static_cast<std::size_t>(rank - 1)];
    }

private:
    void merge_k(int value) {
        if (k && *k != value) throw std::invalid_argument("cannot aggregate records computed with different metric depths");
        k = value;
    }
};

template <typename Records>
CorpusSummary aggregate(const Records& records) {
    CorpusSummary s;
    for (const CorpusRecord& r : records) s.add(r);
    return s;
}

inline CorpusSummary merge(CorpusSummary a, const CorpusSummary& b) {
    a.merge(b);
    return a;
}

// ---------------------------------------------------------------- scan

struct ScanOptions {
    unsigned jobs = 1;
    /// Files under any of these directories (absolute, or relative to the
    /// scan root) are treated as drum tracks on every channel.
    std::vector<fs::path> drum_dirs;
};

struct ScanError {
    std::string relative_path;
    std::string kind;
    std::optional<std::size_t> offset;
    std::string message;
};

struct DuplicateFile {
    std::string relative_path;
    std::string duplicate_of;
};

struct ScanLog {
    std::int64_t files_enumerated = 0;
    std::int64_t files_analyzed = 0;
    std::int64_t dedup_removed = 0;
    std::int64_t parse_failures = 0;
    std::int64_t files_without_notes = 0;
    std::vector<ScanError> errors;
    std::vector<DuplicateFile> duplicates;
};

struct ScanResult {
    std::vector<CorpusRecord> records;
    CorpusSummary summary;
    ScanLog log;
};

namespace detail {

inline bool is_midi_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".mid" || ext == ".midi";
}

inline bool is_under(const fs::path& file, const fs::path& dir) {
    auto f = file.begin();
    for (auto d = dir.begin(); d != dir.end(); ++d, ++f) {
        if (d->empty()) continue;  // trailing separator
        if (f == file.end() || *f != *d) return false;
    }
    return true;
}

struct FileOutcome {
    std::string digest;
    bool failed = false;
    bool no_notes = false;
    ScanError error;
    std::vector<CorpusRecord> records;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

}  // namespace detail

/// Recursively analyzes every .mid/.midi file under `root`. Byte-identical
/// files are analyzed once (first relative path in sorted order wins); files
/// that fail to read or parse go to the error log. Output order is
/// independent of `jobs`.
inline ScanResult scan(const fs::path& root, const ThresholdSet& thresholds, const ScanOptions& options = {}) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("scan root '" + root.string() + "' is not a readable directory");

    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw IoError("cannot read directory '" + root.string() + "': " + ec.message());
    for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
        if (ec) throw IoError("error walking '" + root.string() + "': " + ec.message());
        std::error_code type_ec;
        if (it->is_regular_file(type_ec) && detail::is_midi_extension(it->path())) files.push_back(it->path());
    }

    std::vector<std::string> rel(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) rel[i] = files[i].lexically_relative(root).generic_string();
    {
        std::vector<std::size_t> idx(files.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rel[a] < rel[b]; });
        std::vector<fs::path> f2;
        std::vector<std::string> r2;
        for (std::size_t i : idx) {
            f2.push_back(files[i]);
            r2.push_back(rel[i]);
        }
        files = std::move(f2);
        rel = std::move(r2);
    }

    std::vector<fs::path> drum_dirs;
    for (const fs::path& d : options.drum_dirs) {
        drum_dirs.push_back((d.is_absolute() ? d.lexically_relative(root) : d).lexically_normal());
    }

    std::vector<detail::FileOutcome> outcomes(files.size());
    detail::parallel_for(files.size(), options.jobs, [&](std::size_t i) {
        detail::FileOutcome& out = outcomes[i];
        const fs::path rel_path(rel[i]);
        const bool force_drum = std::any_of(drum_dirs.begin(), drum_dirs.end(),
                                            [&](const fs::path& d) { return detail::is_under(rel_path, d); });
        try {
            const auto bytes = read_file_bytes(files[i]);
            out.digest = content_digest(bytes);
            try {
                ParsedSmf parsed = parse_file(bytes);
                out.records = make_records(parsed, out.digest, rel[i], thresholds, force_drum);
                out.no_notes = out.records.empty();
            } catch (const SmfError& e) {
                out.failed = true;
                out.error = {rel[i], to_string(e.kind()), e.offset(), e.detail()};
            }
        } catch (const IoError& e) {
            out.failed = true;
            out.error = {rel[i], "IoError", std::nullopt, e.what()};
        }
    });

    ScanResult result;
    result.log.files_enumerated = static_cast<std::int64_t>(files.size());
    std::map<std::string, std::string> first_path_by_digest;
    for (std::size_t i = 0; i < files.size(); ++i) {
        detail::FileOutcome& out = outcomes[i];
        if (!out.digest.empty()) {
            auto [pos, inserted] = first_path_by_digest.emplace(out.digest, rel[i]);
            if (!inserted) {
                ++result.log.dedup_removed;
                result.log.duplicates.push_back({rel[i], pos->second});
                continue;
            }
        }
        if (out.failed) {
            ++result.log.parse_failures;
            result.log.errors.push_back(std::move(out.error));
            continue;
        }
        ++result.log.files_analyzed;
        if (out.no_notes) ++result.log.files_without_notes;
        for (auto& r : out.records) result.records.push_back(std::move(r));
    }
    std::sort(result.records.begin(), result.records.end(), record_order);
    result.summary = aggregate(result.records);
    return result;
}

// --------------------------------------------------------- serialization

using Json = nlohmann::ordered_json;

inline Json to_json(const CorpusRecord& r) {
    Json j;
    j["schema_version"] = kRecordSchemaVersion;
    j["digest_algorithm"] = kDigestAlgorithm;
    j["file_digest"] = r.file_digest;
    j["relative_path"] = r.relative_path;
    j["track_index"] = r.track_index;
    j["channel"] = r.channel;
    j["is_drum"] = r.is_drum;
    j["program"] = r.program;
    j["programs"] = r.programs;
    j["instrument_group"] = to_string(r.instrument_group);
    j["tpqn"] = r.features.tpqn;
    j["k"] = r.features.k;
    j["note_count"] = r.features.note_count;
    j["distinct_velocity"] = r.features.distinct_velocity;
    j["distinct_onset_dev"] = r.features.distinct_onset_dev;
    j["dnvr_pct"] = to_exact_string(r.features.dnvr_pct);
    j["dnodr_pct"] = to_exact_string(r.features.dnodr_pct);
    j["nomml"] = r.features.nomml;
    j["quadrant_distinct"] = to_string(r.quadrant_distinct);
    j["quadrant_ratio"] = to_string(r.quadrant_ratio);
    j["nomml_class"] = to_string(r.nomml_class);
    j["duration_bars"] = to_exact_string(r.duration_bars);
    j["parse_warnings"] = r.parse_warnings;
    return j;
}

inline CorpusRecord record_from_json(const Json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion) throw std::invalid_argument("unsupported record schema_version " + std::to_string(version));
    CorpusRecord r;
    r.file_digest = j.at("file_digest").get<std::string>();
    r.relative_path = j.at("relative_path").get<std::string>();
    r.track_index = j.at("track_index").get<int>();
    r.channel = j.at("channel").get<int>();
    r.is_drum = j.at("is_drum").get<bool>();
    r.program = j.at("program").get<int>();
    r.programs = j.at("programs").get<std::vector<int>>();
    r.instrument_group = parse_instrument_group(j.at("instrument_group").get<std::string>());
    r.features.tpqn = j.at("tpqn").get<std::uint32_t>();
    r.features.k = j.at("k").get<int>();
    r.features.note_count = j.at("note_count").get<std::int64_t>();
    r.features.distinct_velocity = j.at("distinct_velocity").get<int>();
    r.features.distinct_onset_dev = j.at("distinct_onset_dev").get<std::int64_t>();
    r.features.dnvr_pct = parse_rational(j.at("dnvr_pct").get<std::string>());
    r.features.dnodr_pct = parse_rational(j.at("dnodr_pct").get<std::string>());
    r.features.nomml = j.at("nomml").get<int>();
    r.quadrant_distinct = parse_class(j.at("quadrant_distinct").get<std::string>());
    r.quadrant_ratio = parse_class(j.at("quadrant_ratio").get<std::string>());
    r.nomml_class = parse_class(j.at("nomml_class").get<std::string>());
    r.duration_bars = parse_rational(j.at("duration_bars").get<std::string>());
    r.parse_warnings = j.at("parse_warnings").get<int>();
    return r;
}

inline void write_jsonl(std::ostream& os, std::span<const CorpusRecord> records) {
    for (const CorpusRecord& r : records) os << to_json(r).dump() << '\n';
}

inline std::vector<CorpusRecord> read_jsonl(std::istream& in) {
    std::vector<CorpusRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("JSONL line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline constexpr std::string_view kCsvHeader =
    "schema_version,digest_algorithm,file_digest,relative_path,track_index,channel,is_drum,program,programs,"
    "instrument_group,tpqn,k,note_count,distinct_velocity,distinct_onset_dev,dnvr_pct,dnodr_pct,nomml,"
    "quadrant_distinct,quadrant_ratio,nomml_class,duration_bars,parse_warnings";

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline void write_csv(std::ostream& os, std::span<const CorpusRecord> records) {
    os << kCsvHeader << '\n';
    for (const CorpusRecord& r : records) {
        std::string programs;
        for (std::size_t i = 0; i < r.programs.size(); ++i) {
            if (i) programs += ';';
            programs += std::to_string(r.programs[i]);
        }
        os << kRecordSchemaVersion << ',' << kDigestAlgorithm << ',' << r.file_digest << ','
           << detail::csv_field(r.relative_path) << ',' << r.track_index << ',' << r.channel << ','
           << (r.is_drum ? "true" : "false") << ',' << r.program << ',' << programs << ','
           << to_string(r.instrument_group) << ',' << r.features.tpqn << ',' << r.features.k << ','
           << r.features.note_count << ',' << r.features.distinct_velocity << ',' << r.features.distinct_onset_dev << ','
           << to_exact_string(r.features.dnvr_pct) << ',' << to_exact_string(r.features.dnodr_pct) << ','
           << r.features.nomml << ',' << to_string(r.quadrant_distinct) << ',' << to_string(r.quadrant_ratio) << ','
           << to_string(r.nomml_class) << ',' << to_exact_string(r.duration_bars) << ',' << r.parse_warnings << '\n';
    }
}

inline constexpr int kSummarySchemaVersion = 1;

inline Json to_json(const CorpusSummary& s) {
    auto shares = [&](const std::array<std::int64_t, 4>& counts) {
        Json counts_j, shares_j;
        for (std::size_t i = 0; i < 4; ++i) {
            const char* name = to_string(static_cast<ExpressivenessClass>(i));
            counts_j[name] = counts[i];
            shares_j[name] = to_double(CorpusSummary::share(counts[i], s.track_count));
        }
        return Json{{"counts", counts_j}, {"shares", shares_j}};
    };
    using FM = CorpusSummary::FileMeasure;
    auto percentiles = [&](FM m) {
        return Json{{"p5", s.file_percentile(m, 5)}, {"p50", s.file_percentile(m, 50)}, {"p95", s.file_percentile(m, 95)}};
    };

    Json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["k"] = s.depth();
    j["file_count"] = s.file_count();
    j["track_count"] = s.track_count;
    j["note_event_count"] = s.note_event_count;
    j["nomml_histogram"] = s.histogram_bins();
    j["nomml_classes"] = {{"NE", s.nomml_classes[0]}, {"EP", s.nomml_classes[1]}};
    j["quadrants_distinct"] = shares(s.quadrant_distinct);
    j["quadrants_ratio"] = shares(s.quadrant_ratio);
    j["tpqn_percentiles"] = percentiles(FM::Tpqn);
    j["note_count_percentiles"] = percentiles(FM::NoteCount);
    Json groups_counts, groups_shares;
    for (std::size_t i = 0; i < kInstrumentGroupCount; ++i) {
        const std::string name(kInstrumentGroupNames[i]);
        groups_counts[name] = s.group_notes[i];
        groups_shares[name] = to_double(CorpusSummary::share(s.group_notes[i], s.note_event_count));
    }
    j["instrument_group_notes"] = {{"counts", groups_counts}, {"shares", groups_shares}};
    return j;
}

inline Json to_json(const ScanLog& log) {
    Json j;
    j["files_enumerated"] = log.files_enumerated;
    j["files_analyzed"] = log.files_analyzed;
    j["dedup_removed"] = log.dedup_removed;
    j["parse_failures"] = log.parse_failures;
    j["files_without_notes"] = log.files_without_notes;
    Json errors = Json::array();
    for (const ScanError& e : log.errors) {
        Json ej{{"relative_path", e.relative_path}, {"kind", e.kind}};
        ej["offset"] = e.offset ? Json(*e.offset) : Json(nullptr);
        ej["message"] = e.message;
        errors.push_back(std::move(ej));
    }
    j["errors"] = std::move(errors);
    Json dups = Json::array();
    for (const DuplicateFile& d : log.duplicates) dups.push_back({{"relative_path", d.relative_path}, {"duplicate_of", d.duplicate_of}});
    j["duplicates"] = std::move(dups);
    return j;
}

}  // namespace midiexpr

#endif  // MIDIEXPR_CORPUS_HPP
