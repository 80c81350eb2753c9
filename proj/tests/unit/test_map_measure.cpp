#include <tribaker/measure.hpp>

#include <gtest/gtest.h>

using namespace tribaker;

namespace {
double circ_dist(double a, double b) {
    double d = std::fabs(a - b);
    return std::min(d, 1.0 - d);
}
}  // namespace

TEST(TribakerMap, ForwardKnownPoints) {
    PhasePoint o = tribaker_forward({0.0, 0.0});
    EXPECT_DOUBLE_EQ(o.q, 0.0);
    EXPECT_DOUBLE_EQ(o.p, 0.0);

    o = tribaker_forward({0.25, 0.75});
    EXPECT_DOUBLE_EQ(o.q, 0.75);
    EXPECT_DOUBLE_EQ(o.p, 0.25);

    o = tribaker_forward({0.5, 0.5});
    EXPECT_DOUBLE_EQ(o.q, 0.5);
    EXPECT_DOUBLE_EQ(o.p, 0.5);
}

TEST(TribakerMap, BackwardInvertsForward) {
    PhasePoint o = tribaker_backward({0.75, 0.25});
    EXPECT_DOUBLE_EQ(o.q, 0.25);
    EXPECT_DOUBLE_EQ(o.p, 0.75);
    o = tribaker_backward({0.0, 0.0});
    EXPECT_DOUBLE_EQ(o.q, 0.0);
    EXPECT_DOUBLE_EQ(o.p, 0.0);

    SplitMix64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        PhasePoint x{rng.next_double(), rng.next_double()};
        PhasePoint back = tribaker_backward(tribaker_forward(x));
        worst = std::max({worst, circ_dist(back.q, x.q), circ_dist(back.p, x.p)});
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Measure, ClosedMapIsUniform) {
    ReflectivityProfile closed{ReflectivityShape::constant, 1.0};
    MeasureGrid g = compute_measure(closed, EvolveDirection::forward, 8, 9, 3, 1);
    ASSERT_FALSE(g.zero_flag);
    for (double v : g.values) EXPECT_NEAR(v, 1.0 / 81.0, 1e-14);
    EXPECT_NEAR(g.total(), 1.0, 1e-12);
}

TEST(Measure, CompleteOpeningKillsOpeningCellsInOneStep) {
    ReflectivityProfile full{ReflectivityShape::complete, 0.0};
    MeasureGrid g = compute_measure(full, EvolveDirection::forward, 1, 9, 10, 2);
    // cells fully inside the opening strip die on the first step
    const int mid = 4;  // q in [4/9, 5/9) subset of (1/3, 2/3)
    for (int b = 0; b < 9; ++b) EXPECT_DOUBLE_EQ(g.at(mid, b), 0.0);
    EXPECT_GT(g.at(0, 0), 0.0);
}

TEST(Measure, CompleteOpeningDecayOracle) {
    // Lebesgue measure of survivors under middle-third removal: (2/3)^t
    ReflectivityProfile full{ReflectivityShape::complete, 0.0};
    const double mean = mean_survival_intensity(full, 5, 1000000, 99);
    const double expect = std::pow(2.0 / 3.0, 5);
    EXPECT_NEAR(mean, expect, 0.02 * expect);
}

TEST(Measure, SurvivalMonotoneInR) {
    ReflectivityProfile prof{ReflectivityShape::step, 0.0};
    double last = -1.0;
    for (double r : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        prof.r = r;
        const double m = mean_survival_intensity(prof, 6, 20000, 5);
        EXPECT_GE(m, last);
        last = m;
    }
    EXPECT_NEAR(last, 1.0, 1e-12);  // R = 1 keeps every trajectory at unit intensity
}

TEST(Measure, IntersectionOfUniformIsUniform) {
    ReflectivityProfile closed{ReflectivityShape::constant, 1.0};
    MeasureGrid f = compute_measure(closed, EvolveDirection::forward, 3, 9, 2, 1);
    MeasureGrid b = compute_measure(closed, EvolveDirection::backward, 3, 9, 2, 1);
    MeasureGrid inter = continuous_repeller(f, b);
    for (double v : inter.values) EXPECT_NEAR(v, 1.0 / 81.0, 1e-13);
    EXPECT_EQ(inter.direction, EvolveDirection::intersection);
}

TEST(Measure, IntersectionInheritsZeros) {
    ReflectivityProfile closed{ReflectivityShape::constant, 1.0};
    MeasureGrid f = compute_measure(closed, EvolveDirection::forward, 1, 9, 2, 1);
    MeasureGrid b = f;
    for (int b_idx = 0; b_idx < 9; ++b_idx) f.at(4, b_idx) = 0.0;
    MeasureGrid inter = continuous_repeller(f, b);
    for (int b_idx = 0; b_idx < 9; ++b_idx) EXPECT_DOUBLE_EQ(inter.at(4, b_idx), 0.0);
}

TEST(Measure, ZeroGridIsFlaggedNotNan) {
    // coarse grid, long horizon, one sample per cell: every trajectory of the
    // fully open map dies with overwhelming probability
    ReflectivityProfile full{ReflectivityShape::complete, 0.0};
    MeasureGrid g = compute_measure(full, EvolveDirection::forward, 40, 3, 1, 12345);
    ASSERT_TRUE(g.zero_flag);
    for (double v : g.values) {
        EXPECT_FALSE(std::isnan(v));
        EXPECT_DOUBLE_EQ(v, 0.0);
    }
    MeasureGrid inter = continuous_repeller(g, g);
    EXPECT_TRUE(inter.zero_flag);
}

TEST(Measure, DeterministicAcrossCalls) {
    ReflectivityProfile prof{ReflectivityShape::step, 0.01};
    MeasureGrid a = compute_measure(prof, EvolveDirection::forward, 6, 27, 4, 31337);
    MeasureGrid b = compute_measure(prof, EvolveDirection::forward, 6, 27, 4, 31337);
    EXPECT_EQ(a.values, b.values);
    MeasureGrid c = compute_measure(prof, EvolveDirection::forward, 6, 27, 4, 31338);
    EXPECT_NE(a.values, c.values);
}

TEST(Measure, IntersectionTransposeSymmetry) {
    // the repeller is symmetric under (q,p) -> (p,q); the sampled measure
    // of the fully open map follows it statistically
    ReflectivityProfile prof{ReflectivityShape::complete, 0.0};
    const std::uint64_t seed = 20240515;
    MeasureGrid f = compute_measure(prof, EvolveDirection::forward, 10, 81, 700, seed);
    MeasureGrid b = compute_measure(prof, EvolveDirection::backward, 10, 81, 700, seed);
    MeasureGrid inter = continuous_repeller(f, b);
    EXPECT_GT(cosine_similarity(inter.values, inter.transposed().values), 0.95);
}

TEST(Measure, SmallRContinuity) {
    // lifting the flat bottom from 0 to 0.01 barely moves the measure
    const std::uint64_t seed = 20240515;
    auto intersection = [&](const ReflectivityProfile& prof) {
        MeasureGrid f = compute_measure(prof, EvolveDirection::forward, 10, 243, 20, seed);
        MeasureGrid b = compute_measure(prof, EvolveDirection::backward, 10, 243, 20, seed);
        return continuous_repeller(f, b);
    };
    MeasureGrid r001 = intersection({ReflectivityShape::step, 0.01});
    MeasureGrid r0 = intersection({ReflectivityShape::step, 0.0});
    EXPECT_GT(cosine_similarity(r001.values, r0.values), 0.9);
}

TEST(Measure, RejectsBadArguments) {
    ReflectivityProfile prof{ReflectivityShape::step, 0.1};
    EXPECT_THROW(compute_measure(prof, EvolveDirection::forward, -1, 9, 1, 0), config_error);
    EXPECT_THROW(compute_measure(prof, EvolveDirection::forward, 1, 2, 1, 0), config_error);
    EXPECT_THROW(compute_measure(prof, EvolveDirection::forward, 1, 9, 0, 0), config_error);
    EXPECT_THROW(compute_measure(prof, EvolveDirection::intersection, 1, 9, 1, 0), config_error);
    MeasureGrid g = compute_measure(prof, EvolveDirection::forward, 1, 9, 1, 0);
    MeasureGrid h = compute_measure(prof, EvolveDirection::forward, 1, 27, 1, 0);
    EXPECT_THROW(continuous_repeller(g, h), config_error);
}
