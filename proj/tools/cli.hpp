// Command-line front end. Kept in a header so the test suites can drive it
// in-process with captured streams.
//
// Exit codes: 0 success, 1 degenerate calibration data, 2 I/O, parse or
// usage errors.
#ifndef MIDIEXPR_TOOLS_CLI_HPP
#define MIDIEXPR_TOOLS_CLI_HPP

#include "midiexpr/midiexpr.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace midiexpr::cli {

enum ExitCode : int { kOk = 0, kDegenerateData = 1, kIoError = 2 };

enum class OutputFormat { Jsonl, Csv, Pretty };

struct StreamSet {
    std::ostream& out;
    std::ostream& err;
    bool color = false;
};

struct CommonOptions {
    std::string thresholds_path;
    std::optional<int> k;
    std::optional<std::int64_t> distinct_velocity_thr;
    std::optional<std::int64_t> distinct_onset_thr;
    std::optional<std::string> dnvr_thr;
    std::optional<std::string> dnodr_thr;
    std::optional<int> nomml_thr;
    std::string format;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool deterministic = false;
    std::vector<std::string> drums_dirs;
};

inline void add_threshold_options(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--thresholds", o.thresholds_path, "Threshold config file (key = value)");
    cmd.add_option("--k", o.k, "Metric level depth")->check(CLI::Range(1, MetricLevelConfig::kMaxDepth));
    cmd.add_option("--distinct-velocity-thr", o.distinct_velocity_thr, "Override distinct_velocity_thr");
    cmd.add_option("--distinct-onset-thr", o.distinct_onset_thr, "Override distinct_onset_thr");
    cmd.add_option("--dnvr-thr", o.dnvr_thr, "Override dnvr_thr_pct");
    cmd.add_option("--dnodr-thr", o.dnodr_thr, "Override dnodr_thr_pct");
    cmd.add_option("--nomml-thr", o.nomml_thr, "Override nomml_thr");
}

inline void add_format_option(CLI::App& cmd, CommonOptions& o, const std::string& fallback) {
    o.format = fallback;
    cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"jsonl", "csv", "pretty"}));
}

inline OutputFormat parse_format(const std::string& s) {
    if (s == "jsonl") return OutputFormat::Jsonl;
    if (s == "csv") return OutputFormat::Csv;
    return OutputFormat::Pretty;
}

/// Flags override the config file, which overrides the built-in defaults.
inline ThresholdSet resolve(const CommonOptions& o) {
    ThresholdOverrides from_file;
    if (!o.thresholds_path.empty()) from_file = load_threshold_config(o.thresholds_path);
    ThresholdOverrides from_flags;
    from_flags.k = o.k;
    from_flags.distinct_velocity_thr = o.distinct_velocity_thr;
    from_flags.distinct_onset_thr = o.distinct_onset_thr;
    if (o.dnvr_thr) from_flags.dnvr_thr_pct = parse_rational(*o.dnvr_thr);
    if (o.dnodr_thr) from_flags.dnodr_thr_pct = parse_rational(*o.dnodr_thr);
    from_flags.nomml_thr = o.nomml_thr;
    return resolve_thresholds(from_flags.layered_over(from_file));
}

inline std::string paint(const StreamSet& io, ExpressivenessClass c) {
    const char* name = to_string(c);
    if (!io.color) return name;
    const char* code = c == ExpressivenessClass::EP ? "\033[32m" : c == ExpressivenessClass::NE ? "\033[2m" : "\033[33m";
    return std::string(code) + name + "\033[0m";
}

inline void write_pretty_record(std::ostream& os, const StreamSet& io, const CorpusRecord& r) {
    const TrackFeatures& f = r.features;
    os << "track " << r.track_index << ", channel " << r.channel + 1 << (r.is_drum ? " (drums)" : "") << ": "
       << to_string(r.instrument_group) << ", program " << r.program << '\n'
       << "  notes " << f.note_count << ", tpqn " << f.tpqn << ", bars " << to_decimal_string(r.duration_bars, 3) << '\n'
       << "  distinct velocity " << f.distinct_velocity << ", distinct onset " << f.distinct_onset_dev << '\n'
       << "  DNVR " << to_decimal_string(f.dnvr_pct, 3) << "%, DNODR " << to_decimal_string(f.dnodr_pct, 3) << "%, NOMML "
       << f.nomml << " (k=" << f.k << ")\n"
       << "  class: distinct " << paint(io, r.quadrant_distinct) << ", ratio " << paint(io, r.quadrant_ratio) << ", nomml "
       << paint(io, r.nomml_class) << '\n';
}

inline void write_records(std::ostream& os, const StreamSet& io, OutputFormat format, std::span<const CorpusRecord> records) {
    switch (format) {
        case OutputFormat::Jsonl: write_jsonl(os, records); break;
        case OutputFormat::Csv: write_csv(os, records); break;
        case OutputFormat::Pretty:
            for (const auto& r : records) write_pretty_record(os, io, r);
            break;
    }
}

inline std::string summary_document(const CorpusSummary& s) { return to_json(s).dump(2) + "\n"; }

inline int run_analyze(const StreamSet& io, const CommonOptions& o, const std::string& file) {
    const ThresholdSet thresholds = resolve(o);
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(file);
    } catch (const IoError& e) {
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }
    FileAnalysis a;
    try {
        a = analyze_bytes(bytes, std::filesystem::path(file).filename().generic_string(), thresholds);
    } catch (const SmfError& e) {
        io.err << "midiexpr: " << file << ": " << e.what() << '\n';
        return kIoError;
    }
    for (const ParseWarning& w : a.parsed.warnings) io.err << "midiexpr: warning: " << w.message << " (byte " << w.offset << ")\n";

    std::ostringstream buf;
    const OutputFormat format = parse_format(o.format);
    if (format == OutputFormat::Pretty) {
        buf << file << ": format " << a.parsed.header.format << ", tpqn " << a.parsed.header.tpqn << ", "
            << a.parsed.header.track_count << " track chunk(s), " << a.records.size() << " analyzable track(s), md5 "
            << a.digest << '\n';
    }
    write_records(buf, io, format, a.records);
    io.out << buf.str();
    return kOk;
}

inline int run_scan(const StreamSet& io, const CommonOptions& o, const std::string& root, const std::string& summary_path,
                    const std::string& log_path) {
    const ThresholdSet thresholds = resolve(o);
    ScanOptions options;
    options.jobs = o.deterministic ? 1u : o.jobs;
    for (const auto& d : o.drums_dirs) options.drum_dirs.emplace_back(d);

    ScanResult result;
    try {
        result = scan(root, thresholds, options);
    } catch (const IoError& e) {
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }
    for (const ScanError& e : result.log.errors) {
        io.err << "midiexpr: " << e.relative_path << ": " << e.kind;
        if (e.offset) io.err << " at byte " << *e.offset;
        io.err << ": " << e.message << '\n';
    }

    std::ostringstream buf;
    const OutputFormat format = parse_format(o.format);
    write_records(buf, io, format, result.records);
    if (format == OutputFormat::Pretty) {
        buf << "files " << result.log.files_enumerated << " (analyzed " << result.log.files_analyzed << ", duplicates "
            << result.log.dedup_removed << ", failed " << result.log.parse_failures << "), tracks "
            << result.summary.track_count << ", notes " << result.summary.note_event_count << '\n';
    }
    io.out << buf.str();

    auto write_doc = [&](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f || !(f << text)) {
            io.err << "midiexpr: cannot write '" << path << "'\n";
            return false;
        }
        return true;
    };
    if (!summary_path.empty() && !write_doc(summary_path, summary_document(result.summary))) return kIoError;
    if (!log_path.empty() && !write_doc(log_path, to_json(result.log).dump(2) + "\n")) return kIoError;
    return kOk;
}

inline int run_calibrate(const StreamSet& io, const std::string& csv_path, const std::string& key, bool with_loocv,
                         unsigned jobs) {
    std::vector<LabeledSample> samples;
    try {
        std::ifstream in(csv_path);
        if (!in) throw IoError("cannot open '" + csv_path + "'");
        samples = read_labeled_csv(in);
    } catch (const std::exception& e) {
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }
    try {
        const CalibrationResult fit = sweep_threshold(samples);
        std::optional<LoocvResult> loocv;
        if (with_loocv) loocv = loocv_evaluate(samples, jobs);
        io.out << format_calibration_report(key, samples, fit, loocv ? &*loocv : nullptr);
    } catch (const DegenerateData& e) {
        io.err << "midiexpr: degenerate calibration data: " << e.what() << '\n';
        return kDegenerateData;
    }
    return kOk;
}

inline int run_stats(const StreamSet& io, const std::string& path) {
    std::vector<CorpusRecord> records;
    try {
        if (path == "-") {
            records = read_jsonl(std::cin);
        } else {
            std::ifstream in(path);
            if (!in) throw IoError("cannot open '" + path + "'");
            records = read_jsonl(in);
        }
        io.out << summary_document(aggregate(records));
    } catch (const std::exception& e) {
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}

inline int run(std::vector<std::string> args, const StreamSet& io) {
    CLI::App app{"MIDI expressive-performance analysis toolkit", "midiexpr"};
    app.require_subcommand(1);

    CommonOptions analyze_opts, scan_opts;
    std::string analyze_file, scan_root, summary_path, log_path, calibrate_csv, calibrate_key = "threshold", stats_path;
    bool loocv = false;
    unsigned calibrate_jobs = std::max(1u, std::thread::hardware_concurrency());

    CLI::App* analyze = app.add_subcommand("analyze", "Report features and classes for every track of one file");
    analyze->add_option("file", analyze_file, "Standard MIDI File")->required();
    add_threshold_options(*analyze, analyze_opts);
    add_format_option(*analyze, analyze_opts, "pretty");

    CLI::App* scan_cmd = app.add_subcommand("scan", "Analyze every MIDI file under a directory");
    scan_cmd->add_option("root", scan_root, "Corpus root directory")->required();
    add_threshold_options(*scan_cmd, scan_opts);
    add_format_option(*scan_cmd, scan_opts, "jsonl");
    scan_cmd->add_option("--jobs", scan_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
    scan_cmd->add_flag("--deterministic", scan_opts.deterministic, "Scan serially");
    scan_cmd->add_option("--drums-dir", scan_opts.drums_dirs, "Treat files under this directory as drum tracks");
    scan_cmd->add_option("--summary", summary_path, "Write the corpus summary JSON here");
    scan_cmd->add_option("--log", log_path, "Write the scan log (dedup, errors) JSON here");

    CLI::App* calibrate = app.add_subcommand("calibrate", "Select a P4-maximizing threshold from labeled feature CSV");
    calibrate->add_option("csv", calibrate_csv, "CSV with source_id,feature,label columns")->required();
    calibrate->add_option("--key", calibrate_key, "Threshold key to emit (e.g. dnvr_thr_pct)");
    calibrate->add_flag("--loocv", loocv, "Also report leave-one-out evaluation");
    calibrate->add_option("--jobs", calibrate_jobs, "Worker threads for leave-one-out folds")->check(CLI::PositiveNumber);

    CLI::App* stats = app.add_subcommand("stats", "Aggregate a JSONL record file into a corpus summary");
    stats->add_option("jsonl", stats_path, "JSONL records ('-' for stdin)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }

    try {
        if (*analyze) return run_analyze(io, analyze_opts, analyze_file);
        if (*scan_cmd) return run_scan(io, scan_opts, scan_root, summary_path, log_path);
        if (*calibrate) return run_calibrate(io, calibrate_csv, calibrate_key, loocv, calibrate_jobs);
        if (*stats) return run_stats(io, stats_path);
    } catch (const std::exception& e) {
        // Threshold config problems and similar input errors.
        io.err << "midiexpr: " << e.what() << '\n';
        return kIoError;
    }
    return kIoError;
}

}  // namespace midiexpr::cli

#endif  // MIDIEXPR_TOOLS_CLI_HPP
