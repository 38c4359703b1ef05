// Exact rational arithmetic used by every ratio, threshold and share in the
// library. Feature values never pass through floating point on their way to
// a classification decision.
#ifndef MIDIEXPR_RATIONAL_HPP
#define MIDIEXPR_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace midiexpr {

using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses "12", "-3.25", "40.965" or "400/127" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { return std::invalid_argument("not a number: '" + std::string(text) + "'"); };
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw fail();
        return num / den;
    }

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    boost::multiprecision::cpp_int num = 0;
    boost::multiprecision::cpp_int den = 1;
    bool seen_digit = false;
    bool seen_point = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (seen_point) den *= 10;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw fail();
    Rational value(num, den);
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        std::string_view exp_text = text.substr(i + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (exp_text.empty() || exp_text.size() > 4) throw fail();
        int exponent = 0;
        for (char c : exp_text) {
            if (c < '0' || c > '9') throw fail();
            exponent = exponent * 10 + (c - '0');
        }
        boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), exponent);
        value = exp_negative ? value / Rational(scale) : value * Rational(scale);
    }
    return negative ? -value : value;
}

/// "n/d" (or "n" for integers); lossless.
inline std::string to_fraction_string(const Rational& r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Decimal rendering with at most `max_digits` fractional digits, rounded half
/// away from zero. Terminating values that fit are printed exactly with
/// trailing zeros trimmed.
inline std::string to_decimal_string(const Rational& r, int max_digits = 6) {
    using boost::multiprecision::cpp_int;
    const bool negative = r < 0;
    Rational a = negative ? Rational(-r) : r;
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), max_digits);
    Rational scaled = a * Rational(scale);
    cpp_int num = boost::multiprecision::numerator(scaled);
    cpp_int den = boost::multiprecision::denominator(scaled);
    cpp_int q = num / den;
    cpp_int rem = num % den;
    if (rem * 2 >= den) q += 1;

    std::string digits = q.str();
    if (static_cast<int>(digits.size()) <= max_digits) {
        digits.insert(0, static_cast<std::size_t>(max_digits) + 1 - digits.size(), '0');
    }
    std::string int_part = digits.substr(0, digits.size() - static_cast<std::size_t>(max_digits));
    std::string frac_part = digits.substr(digits.size() - static_cast<std::size_t>(max_digits));
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
    std::string out = (negative && q != 0) ? "-" : "";
    out += int_part;
    if (!frac_part.empty()) out += "." + frac_part;
    return out;
}

/// Decimal when the value terminates within 18 fractional digits, "n/d"
/// otherwise. Always parses back to the same value.
inline std::string to_exact_string(const Rational& r) {
    std::string decimal = to_decimal_string(r, 18);
    if (parse_rational(decimal) == r) return decimal;
    return to_fraction_string(r);
}

}  // namespace midiexpr

#endif  // MIDIEXPR_RATIONAL_HPP
