#include "midiexpr/rational.hpp"

#include <gtest/gtest.h>

#include <random>

using midiexpr::parse_rational;
using midiexpr::Rational;

TEST(Rational, ParsesDecimalsExactly) {
    EXPECT_EQ(parse_rational("40.965"), Rational(40965, 1000));
    EXPECT_EQ(parse_rational("4.175"), Rational(167, 40));
    EXPECT_EQ(parse_rational("-0.5"), Rational(-1, 2));
    EXPECT_EQ(parse_rational(" 12 "), Rational(12));
    EXPECT_EQ(parse_rational("400/127"), Rational(400, 127));
    EXPECT_EQ(parse_rational("1e2"), Rational(100));
    EXPECT_EQ(parse_rational("2.5E-1"), Rational(1, 4));
}

TEST(Rational, RejectsGarbage) {
    for (const char* bad : {"", "abc", "1.2.3", "1/0", "--1", "1e", "."}) {
        EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
    }
}

TEST(Rational, DecimalFormatting) {
    EXPECT_EQ(midiexpr::to_decimal_string(Rational(400, 127), 4), "3.1496");
    EXPECT_EQ(midiexpr::to_decimal_string(Rational(5, 6), 3), "0.833");
    EXPECT_EQ(midiexpr::to_decimal_string(Rational(1), 4), "1");
    EXPECT_EQ(midiexpr::to_decimal_string(Rational(-1, 8), 2), "-0.13");
    EXPECT_EQ(midiexpr::to_decimal_string(Rational(-1, 1000), 2), "0");
}

TEST(Rational, ExactStringRoundTrips) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-100000, 100000), den(1, 5000);
    for (int i = 0; i < 2000; ++i) {
        Rational r(num(rng), den(rng));
        EXPECT_EQ(parse_rational(midiexpr::to_exact_string(r)), r);
    }
    EXPECT_EQ(midiexpr::to_exact_string(Rational(167, 40)), "4.175");
    EXPECT_EQ(midiexpr::to_exact_string(Rational(400, 127)), "400/127");
}
