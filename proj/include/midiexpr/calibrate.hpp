// Threshold calibration from labeled single-feature data: P4 / CN metrics,
// an exhaustive threshold sweep and leave-one-out evaluation.
#ifndef MIDIEXPR_CALIBRATE_HPP
#define MIDIEXPR_CALIBRATE_HPP

#include "midiexpr/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

namespace midiexpr {

class UndefinedMetric : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Tallies may be raw counts or percentages; both metrics are homogeneous of
/// degree zero so the two are interchangeable.
template <typename T>
struct ConfusionCounts {
    T tp{};
    T tn{};
    T fp{};
    T fn{};

    bool operator==(const ConfusionCounts&) const = default;
};

/// Integral tallies produce exact rationals; everything else keeps its type.
template <typename T>
using metric_t = std::conditional_t<std::is_integral_v<T>, Rational, T>;

template <typename T>
metric_t<T> p4(const ConfusionCounts<T>& c) {
    using M = metric_t<T>;
    const M tp(c.tp), tn(c.tn), fp(c.fp), fn(c.fn);
    if (tp < 0 || tn < 0 || fp < 0 || fn < 0) throw std::invalid_argument("confusion counts must be non-negative");
    const M numerator = M(4) * tp * tn;
    const M denominator = numerator + (tp + tn) * (fp + fn);
    if (denominator == 0) throw UndefinedMetric("P4 is undefined when 4*TP*TN and (TP+TN)*(FP+FN) are both zero");
    return numerator / denominator;
}

template <typename T>
metric_t<T> correct_negative_rate(const ConfusionCounts<T>& c) {
    using M = metric_t<T>;
    const M tn(c.tn), fn(c.fn);
    if (tn + fn == 0) throw UndefinedMetric("correct-negative rate is undefined when TN + FN is zero");
    return tn / (tn + fn);
}

template <typename T>
metric_t<T> accuracy(const ConfusionCounts<T>& c) {
    using M = metric_t<T>;
    const M total = M(c.tp) + M(c.tn) + M(c.fp) + M(c.fn);
    if (total == 0) throw UndefinedMetric("accuracy is undefined for an empty confusion matrix");
    return (M(c.tp) + M(c.tn)) / total;
}

enum class Label : int { NE = 0, EP = 1 };

struct LabeledSample {
    Rational feature;
    Label label = Label::NE;
    std::string source_id;
};

enum class SweepDirection { ExpressiveIfGeq };

using Counts = ConfusionCounts<std::int64_t>;

struct CalibrationResult {
    Rational threshold;
    Rational p4_at_threshold;
    Rational accuracy;
    std::optional<Rational> cn;  // absent when nothing is predicted NE
    Rational percentile_of_threshold;  // % of samples strictly below the threshold
    Counts confusion;
};

inline Counts confusion_at(std::span<const LabeledSample> samples, const Rational& threshold) {
    Counts c;
    for (const LabeledSample& s : samples) {
        const bool predicted_ep = s.feature >= threshold;
        const bool is_ep = s.label == Label::EP;
        if (predicted_ep) {
            ++(is_ep ? c.tp : c.fp);
        } else {
            ++(is_ep ? c.fn : c.tn);
        }
    }
    return c;
}

/// Evaluates every distinct observed feature value (plus a +inf sentinel that
/// predicts everything NE) as a threshold and keeps the one with the highest
/// P4, preferring the smallest threshold on ties.
inline CalibrationResult sweep_threshold(std::span<const LabeledSample> samples,
                                         SweepDirection = SweepDirection::ExpressiveIfGeq) {
    std::int64_t total_ep = 0;
    for (const LabeledSample& s : samples) total_ep += s.label == Label::EP ? 1 : 0;
    const auto n = static_cast<std::int64_t>(samples.size());
    const std::int64_t total_ne = n - total_ep;
    if (total_ep == 0 || total_ne == 0) throw DegenerateData("calibration data must contain both NE and EP samples");

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a].feature < samples[b].feature; });
    if (samples[order.front()].feature == samples[order.back()].feature) {
        throw DegenerateData("calibration data has a single distinct feature value");
    }

    // Walking upward, `below_*` counts samples strictly under the candidate.
    std::int64_t below_ep = 0;
    std::int64_t below_ne = 0;
    std::optional<Rational> best_p4;
    CalibrationResult best;
    std::size_t i = 0;
    while (i < order.size()) {
        const Rational& candidate = samples[order[i]].feature;
        Counts c{total_ep - below_ep, below_ne, total_ne - below_ne, below_ep};
        // TP = TN = 0 (every sample misclassified) leaves P4 undefined; it
        // is the worst possible cut, so score it 0.
        const Rational score = c.tp + c.tn == 0 ? Rational(0) : p4(c);
        if (!best_p4 || score > *best_p4) {
            best_p4 = score;
            best.threshold = candidate;
            best.confusion = c;
            best.percentile_of_threshold = Rational(below_ep + below_ne) * 100 / n;
        }
        while (i < order.size() && samples[order[i]].feature == candidate) {
            ++(samples[order[i]].label == Label::EP ? below_ep : below_ne);
            ++i;
        }
    }
    // The sentinel (everything NE) scores TP = 0, hence P4 = 0, and can
    // never beat a finite candidate under strict improvement.

    best.p4_at_threshold = *best_p4;
    best.accuracy = accuracy(best.confusion);
    if (best.confusion.tn + best.confusion.fn > 0) best.cn = correct_negative_rate(best.confusion);
    return best;
}

struct FoldOutcome {
    std::size_t held_out = 0;
    std::string source_id;
    Rational threshold;
    Label predicted = Label::NE;
    Label actual = Label::NE;
};

struct LoocvResult {
    Rational p4;        // of the confusion aggregated over all folds
    Rational accuracy;  // likewise
    Counts confusion;
    std::vector<FoldOutcome> folds;  // in held-out index order
};

/// Leave-one-out: each sample is classified with the threshold calibrated on
/// all others. Folds are independent; `jobs > 1` evaluates them on threads,
/// aggregation stays in fold order.
inline LoocvResult loocv_evaluate(std::span<const LabeledSample> samples, unsigned jobs = 1) {
    if (samples.size() < 3) throw DegenerateData("leave-one-out evaluation needs at least 3 samples");
    std::vector<FoldOutcome> folds(samples.size());
    std::vector<std::string> failures(samples.size());

    auto run_fold = [&](std::size_t held) {
        std::vector<LabeledSample> training;
        training.reserve(samples.size() - 1);
        for (std::size_t j = 0; j < samples.size(); ++j) {
            if (j != held) training.push_back(samples[j]);
        }
        try {
            const CalibrationResult fit = sweep_threshold(training);
            FoldOutcome& out = folds[held];
            out.held_out = held;
            out.source_id = samples[held].source_id;
            out.threshold = fit.threshold;
            out.predicted = samples[held].feature >= fit.threshold ? Label::EP : Label::NE;
            out.actual = samples[held].label;
        } catch (const DegenerateData& e) {
            failures[held] = e.what();
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(samples.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) run_fold(i);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < samples.size(); i += jobs) run_fold(i);
            });
        }
    }

    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i].empty()) {
            throw DegenerateData("fold " + std::to_string(i) + " (" + samples[i].source_id + "): " + failures[i]);
        }
    }

    LoocvResult result;
    for (const FoldOutcome& f : folds) {
        const bool predicted_ep = f.predicted == Label::EP;
        const bool is_ep = f.actual == Label::EP;
        if (predicted_ep) {
            ++(is_ep ? result.confusion.tp : result.confusion.fp);
        } else {
            ++(is_ep ? result.confusion.fn : result.confusion.tn);
        }
    }
    // Every fold wrong leaves P4 undefined; report it as 0.
    try {
        result.p4 = p4(result.confusion);
    } catch (const UndefinedMetric&) {
        result.p4 = 0;
    }
    result.accuracy = accuracy(result.confusion);
    result.folds = std::move(folds);
    return result;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
        f.erase(0, f.find_first_not_of(" \t"));
    }
    return fields;
}

inline Label parse_label(const std::string& s) {
    if (s == "1" || s == "EP") return Label::EP;
    if (s == "0" || s == "NE") return Label::NE;
    throw std::invalid_argument("label must be 0/1 or NE/EP, got '" + s + "'");
}

}  // namespace detail

/// Reads `source_id,feature,label` rows (header required, any column order).
inline std::vector<LabeledSample> read_labeled_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    const auto header = detail::split_csv_line(line);
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::invalid_argument("CSV header is missing column '" + std::string(name) + "'");
    };
    const std::size_t id_col = column("source_id");
    const std::size_t feature_col = column("feature");
    const std::size_t label_col = column("label");
    const std::size_t needed = std::max({id_col, feature_col, label_col}) + 1;

    std::vector<LabeledSample> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() < needed) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": too few columns");
        try {
            out.push_back({parse_rational(fields[feature_col]), detail::parse_label(fields[label_col]), fields[id_col]});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

/// Key-value block: the calibrated threshold under `threshold_key` (loadable
/// as a threshold config) with the supporting metrics as comment lines.
inline std::string format_calibration_report(std::string_view threshold_key, std::span<const LabeledSample> samples,
                                             const CalibrationResult& fit, const LoocvResult* loocv = nullptr) {
    std::int64_t ep = 0;
    for (const auto& s : samples) ep += s.label == Label::EP ? 1 : 0;
    std::ostringstream os;
    os << "# samples = " << samples.size() << " (NE " << static_cast<std::int64_t>(samples.size()) - ep << ", EP " << ep << ")\n"
       << "# p4 = " << to_decimal_string(fit.p4_at_threshold, 4) << '\n'
       << "# accuracy = " << to_decimal_string(fit.accuracy, 4) << '\n'
       << "# cn = " << (fit.cn ? to_decimal_string(*fit.cn, 4) : std::string("undefined")) << '\n'
       << "# percentile = " << to_decimal_string(fit.percentile_of_threshold, 2) << '\n'
       << "# confusion = tp " << fit.confusion.tp << ", tn " << fit.confusion.tn << ", fp " << fit.confusion.fp << ", fn "
       << fit.confusion.fn << '\n';
    if (loocv) {
        os << "# loocv_p4 = " << to_decimal_string(loocv->p4, 4) << '\n'
           << "# loocv_accuracy = " << to_decimal_string(loocv->accuracy, 4) << '\n';
    }
    os << threshold_key << " = " << to_exact_string(fit.threshold) << '\n';
    return os.str();
}

}  // namespace midiexpr

#endif  // MIDIEXPR_CALIBRATE_HPP
