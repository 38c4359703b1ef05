#include "midiexpr/calibrate.hpp"
#include "sweep_oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace midiexpr;

namespace {

std::vector<LabeledSample> samples_of(const std::vector<std::pair<Rational, Label>>& rows) {
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({rows[i].first, rows[i].second, "s" + std::to_string(i)});
    return out;
}

std::vector<LabeledSample> separable() {
    return samples_of({{1, Label::NE}, {2, Label::NE}, {3, Label::NE}, {10, Label::EP}, {11, Label::EP}, {12, Label::EP}});
}

std::vector<LabeledSample> random_set(std::mt19937& rng, int n, int range) {
    std::vector<LabeledSample> s;
    for (int i = 0; i < n; ++i) {
        const int f = static_cast<int>(rng() % static_cast<unsigned>(range));
        // Labels lean on the feature with noise so both easy and hard sets appear.
        const bool ep = (rng() % 100) < static_cast<unsigned>(20 + 60 * f / range);
        s.push_back({Rational(f, 1 + static_cast<int>(rng() % 3)), ep ? Label::EP : Label::NE, "r" + std::to_string(i)});
    }
    return s;
}

bool both_labels(const std::vector<LabeledSample>& s) {
    bool ne = false, ep = false;
    for (const auto& x : s) (x.label == Label::EP ? ep : ne) = true;
    return ne && ep;
}

bool several_values(const std::vector<LabeledSample>& s) {
    for (const auto& x : s) {
        if (x.feature != s.front().feature) return true;
    }
    return false;
}

}  // namespace

TEST(P4, Examples) {
    EXPECT_EQ(p4(Counts{1, 1, 0, 0}), Rational(1));
    EXPECT_EQ(p4(Counts{0, 50, 0, 50}), Rational(0));
    EXPECT_EQ(p4(Counts{30, 50, 10, 10}), Rational(6000, 7600));
    EXPECT_NEAR(to_double(p4(Counts{30, 50, 10, 10})), 0.7895, 1e-4);
    EXPECT_THROW(p4(Counts{0, 0, 0, 0}), UndefinedMetric);
    EXPECT_THROW(p4(Counts{0, 0, 3, 4}), UndefinedMetric);
    EXPECT_THROW(p4(Counts{-1, 2, 0, 0}), std::invalid_argument);
}

TEST(P4, SymmetryBoundsHomogeneity) {
    std::mt19937 rng(21);
    for (int i = 0; i < 5000; ++i) {
        auto draw = [&] { return static_cast<std::int64_t>(rng() % 60); };
        Counts c{draw(), draw(), draw(), draw()};
        if (4 * c.tp * c.tn + (c.tp + c.tn) * (c.fp + c.fn) == 0) continue;
        const Rational v = p4(c);
        EXPECT_EQ(v, p4(Counts{c.tn, c.tp, c.fn, c.fp}));
        EXPECT_GE(v, 0);
        EXPECT_LE(v, 1);
        EXPECT_EQ(v == 1, c.fp == 0 && c.fn == 0 && c.tp > 0 && c.tn > 0);
        const auto s = static_cast<std::int64_t>(1 + rng() % 9);
        EXPECT_EQ(v, p4(Counts{s * c.tp, s * c.tn, s * c.fp, s * c.fn}));
        if (c.tn + c.fn > 0) {
            EXPECT_EQ(correct_negative_rate(c), correct_negative_rate(Counts{s * c.tp, s * c.tn, s * c.fp, s * c.fn}));
        }
    }
}

TEST(P4, PercentageTalliesMatchCounts) {
    EXPECT_NEAR(p4(ConfusionCounts<double>{30, 50, 10, 10}), 6000.0 / 7600.0, 1e-12);
    EXPECT_NEAR(p4(ConfusionCounts<double>{0.3, 0.5, 0.1, 0.1}), 6000.0 / 7600.0, 1e-12);
}

TEST(CorrectNegative, TableFiveRows) {
    EXPECT_DOUBLE_EQ(correct_negative_rate(ConfusionCounts<double>{0, 63.7, 0, 0}), 1.0);
    EXPECT_NEAR(correct_negative_rate(ConfusionCounts<double>{0, 53.1, 0, 11.5}), 0.822, 0.001);
    EXPECT_EQ(correct_negative_rate(Counts{0, 0, 0, 5}), Rational(0));
    EXPECT_EQ(correct_negative_rate(Counts{0, 531, 0, 115}), Rational(531, 646));
    EXPECT_THROW(correct_negative_rate(Counts{3, 0, 2, 0}), UndefinedMetric);
}

TEST(Sweep, SeparableReturnsSmallestPerfectCut) {
    const auto s = separable();
    const auto r = sweep_threshold(s);
    EXPECT_EQ(r.threshold, Rational(10));
    EXPECT_EQ(r.p4_at_threshold, Rational(1));
    EXPECT_EQ(r.accuracy, Rational(1));
    ASSERT_TRUE(r.cn);
    EXPECT_EQ(*r.cn, Rational(1));
    EXPECT_EQ(r.percentile_of_threshold, Rational(50));
    EXPECT_EQ(r.confusion, (Counts{3, 3, 0, 0}));
}

TEST(Sweep, BinaryFeatureEqualsLabel) {
    const auto s = samples_of({{0, Label::NE}, {1, Label::EP}, {0, Label::NE}, {1, Label::EP}, {1, Label::EP}});
    const auto r = sweep_threshold(s);
    EXPECT_EQ(r.threshold, Rational(1));
    EXPECT_EQ(r.p4_at_threshold, Rational(1));
}

TEST(Sweep, InvertedDataDoesNotThrow) {
    // Every EP below every NE: the best achievable P4 is 0.
    const auto s = samples_of({{1, Label::EP}, {2, Label::EP}, {5, Label::NE}, {6, Label::NE}});
    const auto r = sweep_threshold(s);
    EXPECT_EQ(r.p4_at_threshold, Rational(0));
    EXPECT_EQ(r.threshold, Rational(1));
}

TEST(Sweep, DegenerateInputs) {
    EXPECT_THROW(sweep_threshold(samples_of({{1, Label::NE}, {2, Label::NE}})), DegenerateData);
    EXPECT_THROW(sweep_threshold(samples_of({{3, Label::NE}, {3, Label::EP}})), DegenerateData);
    EXPECT_THROW(sweep_threshold(std::vector<LabeledSample>{}), DegenerateData);
}

TEST(Sweep, InterleavedWithOneMislabel) {
    std::vector<std::pair<Rational, Label>> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({i, i < 10 ? Label::NE : Label::EP});
    rows[4].second = Label::EP;
    const auto s = samples_of(rows);
    const auto r = sweep_threshold(s);
    const auto o = testsupport::oracle_sweep(s);
    ASSERT_TRUE(o.threshold);
    EXPECT_EQ(r.threshold, *o.threshold);
    EXPECT_EQ(r.p4_at_threshold, o.p4);
    EXPECT_EQ(r.threshold, Rational(10));
}

TEST(Sweep, MatchesExhaustiveOracle) {
    std::mt19937 rng(99);
    int checked = 0;
    while (checked < 400) {
        const auto s = random_set(rng, 2 + static_cast<int>(rng() % 49), 2 + static_cast<int>(rng() % 40));
        if (!both_labels(s) || !several_values(s)) continue;
        ++checked;
        const auto r = sweep_threshold(s);
        const auto o = testsupport::oracle_sweep(s);
        ASSERT_TRUE(o.threshold);
        ASSERT_EQ(r.threshold, *o.threshold);
        ASSERT_EQ(r.p4_at_threshold, o.p4);
        ASSERT_EQ(r.confusion, confusion_at(s, r.threshold));
        // No cut between observed values does better.
        for (const auto& x : s) {
            EXPECT_LE(testsupport::oracle_p4_at(s, x.feature + Rational(1, 1000)), r.p4_at_threshold);
        }
    }
}

TEST(Sweep, MonotoneTransformInvariance) {
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto s = random_set(rng, 20, 15);
        if (!both_labels(s) || !several_values(s)) continue;
        const auto r = sweep_threshold(s);
        auto t = s;
        for (auto& x : t) x.feature = x.feature * x.feature * x.feature * 3 + 7;
        const auto rt = sweep_threshold(t);
        EXPECT_EQ(rt.threshold, r.threshold * r.threshold * r.threshold * 3 + 7);
        EXPECT_EQ(rt.p4_at_threshold, r.p4_at_threshold);
        EXPECT_EQ(rt.confusion, r.confusion);
    }
}

TEST(Loocv, SeparableWithRepeatedValuesIsPerfect) {
    const auto s = samples_of({{1, Label::NE}, {1, Label::NE}, {2, Label::NE}, {3, Label::NE}, {3, Label::NE},
                               {10, Label::EP}, {10, Label::EP}, {11, Label::EP}, {12, Label::EP}});
    const auto r = loocv_evaluate(s);
    EXPECT_EQ(r.accuracy, Rational(1));
    EXPECT_EQ(r.p4, Rational(1));
    ASSERT_EQ(r.folds.size(), 9u);
    EXPECT_EQ(r.folds[0].source_id, "s0");
}

TEST(Loocv, SeparableSingletonBoundaryMissesHeldOutEdge) {
    // Holding out 10 leaves 11 as the smallest perfect training cut, so 10 is
    // predicted NE. Every other fold is correct.
    const auto r = loocv_evaluate(separable());
    EXPECT_EQ(r.confusion, (Counts{2, 3, 0, 1}));
    EXPECT_EQ(r.accuracy, Rational(5, 6));
    EXPECT_EQ(r.folds[3].threshold, Rational(11));
    EXPECT_EQ(r.folds[3].predicted, Label::NE);
}

TEST(Loocv, DegenerateInputs) {
    EXPECT_THROW(loocv_evaluate(samples_of({{1, Label::NE}, {1, Label::EP}, {1, Label::NE}})), DegenerateData);
    EXPECT_THROW(loocv_evaluate(samples_of({{1, Label::NE}, {2, Label::EP}})), DegenerateData);
    // Holding out the only EP sample leaves a single-class training set.
    EXPECT_THROW(loocv_evaluate(samples_of({{1, Label::NE}, {2, Label::NE}, {3, Label::EP}})), DegenerateData);
}

TEST(Loocv, MatchesPerFoldOracle) {
    std::mt19937 rng(30);
    std::vector<LabeledSample> s;
    for (int i = 0; i < 30; ++i) {
        const bool ep = i >= 15;
        const bool noisy = i % 10 == 3;
        s.push_back({Rational(static_cast<int>(rng() % 20) + (ep ? 12 : 0)), (ep != noisy) ? Label::EP : Label::NE, "p" + std::to_string(i)});
    }
    const auto r1 = loocv_evaluate(s, 1);
    const auto r4 = loocv_evaluate(s, 4);
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t held = 0; held < s.size(); ++held) {
        std::vector<LabeledSample> train;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j != held) train.push_back(s[j]);
        }
        const auto cut = testsupport::oracle_sweep(train);
        const bool pred = cut.threshold && s[held].feature >= *cut.threshold;
        const bool ep = s[held].label == Label::EP;
        tp += pred && ep;
        fp += pred && !ep;
        tn += !pred && !ep;
        fn += !pred && ep;
        EXPECT_EQ(r1.folds[held].threshold, *cut.threshold);
    }
    EXPECT_EQ(r1.confusion, (Counts{tp, tn, fp, fn}));
    EXPECT_EQ(r1.p4, testsupport::oracle_p4(tp, tn, fp, fn));
    EXPECT_EQ(r1.accuracy, Rational(tp + tn, 30));
    EXPECT_EQ(r4.confusion, r1.confusion);
    EXPECT_EQ(r4.p4, r1.p4);
}

TEST(Csv, ParsesAnyColumnOrderAndLabels) {
    std::istringstream in("label,feature,source_id\n0,1.5,a\nEP,40.965,\"b,c\"\n\n1,3/2,d\r\n");
    const auto s = read_labeled_csv(in);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].feature, Rational(3, 2));
    EXPECT_EQ(s[0].label, Label::NE);
    EXPECT_EQ(s[1].source_id, "b,c");
    EXPECT_EQ(s[1].feature, Rational(40965, 1000));
    EXPECT_EQ(s[2].label, Label::EP);
}

TEST(Csv, Errors) {
    std::istringstream missing("id,feature,label\n");
    EXPECT_THROW(read_labeled_csv(missing), std::invalid_argument);
    std::istringstream bad_label("source_id,feature,label\na,1,2\n");
    EXPECT_THROW(read_labeled_csv(bad_label), std::invalid_argument);
    std::istringstream short_row("source_id,feature,label\na,1\n");
    EXPECT_THROW(read_labeled_csv(short_row), std::invalid_argument);
    std::istringstream empty("");
    EXPECT_TRUE(read_labeled_csv(empty).empty());
}

TEST(Report, LoadableAsConfigLine) {
    const auto s = separable();
    const auto fit = sweep_threshold(s);
    const std::string out = format_calibration_report("distinct_onset_thr", s, fit);
    EXPECT_NE(out.find("# p4 = 1\n"), std::string::npos);
    EXPECT_NE(out.find("distinct_onset_thr = 10\n"), std::string::npos);
}
