// Expressiveness classes and the threshold set that decides them.
#ifndef MIDIEXPR_CLASSIFY_HPP
#define MIDIEXPR_CLASSIFY_HPP

#include "midiexpr/heuristics.hpp"
#include "midiexpr/rational.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace midiexpr {

enum class ExpressivenessClass { NE, EO, EV, EP };

inline const char* to_string(ExpressivenessClass c) {
    switch (c) {
        case ExpressivenessClass::NE: return "NE";
        case ExpressivenessClass::EO: return "EO";
        case ExpressivenessClass::EV: return "EV";
        case ExpressivenessClass::EP: return "EP";
    }
    return "NE";
}

inline ExpressivenessClass parse_class(std::string_view s) {
    if (s == "NE") return ExpressivenessClass::NE;
    if (s == "EO") return ExpressivenessClass::EO;
    if (s == "EV") return ExpressivenessClass::EV;
    if (s == "EP") return ExpressivenessClass::EP;
    throw std::invalid_argument("unknown expressiveness class '" + std::string(s) + "'");
}

inline constexpr ExpressivenessClass quadrant(bool onset_expressive, bool velocity_expressive) {
    if (onset_expressive) return velocity_expressive ? ExpressivenessClass::EP : ExpressivenessClass::EO;
    return velocity_expressive ? ExpressivenessClass::EV : ExpressivenessClass::NE;
}

enum class FeatureBasis { Distinct, Ratio };

struct ThresholdSet {
    std::int64_t distinct_velocity_thr = 52;
    std::int64_t distinct_onset_thr = 42;
    Rational dnvr_thr_pct = parse_rational("40.965");
    Rational dnodr_thr_pct = parse_rational("4.175");
    int nomml_thr = 12;
    int k = 6;

    bool operator==(const ThresholdSet&) const = default;

    void validate() const {
        MetricLevelConfig{k}.validate();
        if (distinct_velocity_thr < 0 || distinct_velocity_thr > 128) throw std::invalid_argument("distinct_velocity_thr must be in [0, 128]");
        if (distinct_onset_thr < 0) throw std::invalid_argument("distinct_onset_thr must be non-negative");
        if (dnvr_thr_pct < 0 || dnvr_thr_pct > 100) throw std::invalid_argument("dnvr_thr_pct must be in [0, 100]");
        if (dnodr_thr_pct < 0 || dnodr_thr_pct > 100) throw std::invalid_argument("dnodr_thr_pct must be in [0, 100]");
        if (nomml_thr < 0 || nomml_thr > 2 * k) throw std::invalid_argument("nomml_thr must be in [0, 2k]");
    }
};

/// Axes are expressive at or above their threshold (inclusive).
inline ExpressivenessClass classify_quadrant(const TrackFeatures& f, const ThresholdSet& t, FeatureBasis basis) {
    if (basis == FeatureBasis::Distinct) {
        return quadrant(f.distinct_onset_dev >= t.distinct_onset_thr, f.distinct_velocity >= t.distinct_velocity_thr);
    }
    return quadrant(f.dnodr_pct >= t.dnodr_thr_pct, f.dnvr_pct >= t.dnvr_thr_pct);
}

inline ExpressivenessClass classify_nomml(const TrackFeatures& f, const ThresholdSet& t) {
    return f.nomml >= t.nomml_thr ? ExpressivenessClass::EP : ExpressivenessClass::NE;
}

// Threshold config file: one `key = value` per line, `#` starts a comment.
// Keys not present keep their current value.

namespace config_keys {
inline constexpr std::string_view kDistinctVelocity = "distinct_velocity_thr";
inline constexpr std::string_view kDistinctOnset = "distinct_onset_thr";
inline constexpr std::string_view kDnvr = "dnvr_thr_pct";
inline constexpr std::string_view kDnodr = "dnodr_thr_pct";
inline constexpr std::string_view kNomml = "nomml_thr";
inline constexpr std::string_view kDepth = "k";
}  // namespace config_keys

/// Which keys a config source actually set; used to layer sources.
struct ThresholdOverrides {
    std::optional<std::int64_t> distinct_velocity_thr;
    std::optional<std::int64_t> distinct_onset_thr;
    std::optional<Rational> dnvr_thr_pct;
    std::optional<Rational> dnodr_thr_pct;
    std::optional<int> nomml_thr;
    std::optional<int> k;

    void apply_to(ThresholdSet& t) const {
        if (distinct_velocity_thr) t.distinct_velocity_thr = *distinct_velocity_thr;
        if (distinct_onset_thr) t.distinct_onset_thr = *distinct_onset_thr;
        if (dnvr_thr_pct) t.dnvr_thr_pct = *dnvr_thr_pct;
        if (dnodr_thr_pct) t.dnodr_thr_pct = *dnodr_thr_pct;
        if (nomml_thr) t.nomml_thr = *nomml_thr;
        if (k) t.k = *k;
    }

    /// Later layer wins key by key.
    ThresholdOverrides layered_over(const ThresholdOverrides& lower) const {
        ThresholdOverrides out = lower;
        if (distinct_velocity_thr) out.distinct_velocity_thr = distinct_velocity_thr;
        if (distinct_onset_thr) out.distinct_onset_thr = distinct_onset_thr;
        if (dnvr_thr_pct) out.dnvr_thr_pct = dnvr_thr_pct;
        if (dnodr_thr_pct) out.dnodr_thr_pct = dnodr_thr_pct;
        if (nomml_thr) out.nomml_thr = nomml_thr;
        if (k) out.k = k;
        return out;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::int64_t parse_integer(std::string_view key, std::string_view value) {
    Rational r = parse_rational(value);
    if (boost::multiprecision::denominator(r) != 1) {
        throw std::invalid_argument(std::string(key) + " must be an integer, got '" + std::string(value) + "'");
    }
    return boost::multiprecision::numerator(r).convert_to<std::int64_t>();
}

}  // namespace detail

inline ThresholdOverrides parse_threshold_config(std::istream& in) {
    ThresholdOverrides out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("threshold config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = detail::trim(view.substr(0, eq));
        const std::string_view value = detail::trim(view.substr(eq + 1));
        try {
            using namespace config_keys;
            if (key == kDistinctVelocity) {
                out.distinct_velocity_thr = detail::parse_integer(key, value);
            } else if (key == kDistinctOnset) {
                out.distinct_onset_thr = detail::parse_integer(key, value);
            } else if (key == kDnvr) {
                out.dnvr_thr_pct = parse_rational(value);
            } else if (key == kDnodr) {
                out.dnodr_thr_pct = parse_rational(value);
            } else if (key == kNomml) {
                out.nomml_thr = static_cast<int>(detail::parse_integer(key, value));
            } else if (key == kDepth) {
                out.k = static_cast<int>(detail::parse_integer(key, value));
            } else {
                throw std::invalid_argument("unknown key '" + std::string(key) + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("threshold config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline ThresholdOverrides load_threshold_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open threshold config '" + path + "'");
    return parse_threshold_config(in);
}

/// Builds the effective threshold set from layered overrides. When the NOMML
/// threshold is not given explicitly it follows the extra-category level 2k.
inline ThresholdSet resolve_thresholds(const ThresholdOverrides& overrides) {
    ThresholdSet t;
    overrides.apply_to(t);
    if (!overrides.nomml_thr) t.nomml_thr = 2 * t.k;
    t.validate();
    return t;
}

inline std::string format_threshold_config(const ThresholdSet& t) {
    std::ostringstream os;
    os << config_keys::kDistinctVelocity << " = " << t.distinct_velocity_thr << '\n'
       << config_keys::kDistinctOnset << " = " << t.distinct_onset_thr << '\n'
       << config_keys::kDnvr << " = " << to_exact_string(t.dnvr_thr_pct) << '\n'
       << config_keys::kDnodr << " = " << to_exact_string(t.dnodr_thr_pct) << '\n'
       << config_keys::kNomml << " = " << t.nomml_thr << '\n'
       << config_keys::kDepth << " = " << t.k << '\n';
    return os.str();
}

}  // namespace midiexpr

#endif  // MIDIEXPR_CLASSIFY_HPP
