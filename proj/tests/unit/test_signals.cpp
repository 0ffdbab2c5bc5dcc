#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "swioss/error.hpp"
#include "swioss/family.hpp"
#include "swioss/signals.hpp"

namespace swioss {
namespace {

SwitchingRules two_class_rules() {
  SwitchingRules r;
  r.classes = {{1, StabilityClass::Stable}, {2, StabilityClass::Unstable}};
  r.graph = SwitchGraph({{1, 2}, {2, 1}});
  r.delta = 3.5;
  r.Delta = 4.0;
  return r;
}

bool mentions(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations) {
    if (v.reason.find(text) != std::string::npos) return true;
  }
  return false;
}

TEST(SwitchingSignalTest, RightContinuousEvaluation) {
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}}, 10.0);
  EXPECT_EQ(s.evaluate(3.5), 2);
  EXPECT_EQ(s.evaluate(3.499), 1);
  EXPECT_EQ(s.evaluate(0.0), 1);
  EXPECT_EQ(s.evaluate(10.0), 2);
  EXPECT_EQ(SwitchingSignal::constant(1, 10.0).evaluate(10.0), 1);
}

TEST(SwitchingSignalTest, EvaluationOutsideHorizonThrows) {
  const SwitchingSignal s({{0.0, 1}}, 10.0);
  EXPECT_THROW(s.evaluate(-0.1), DomainError);
  EXPECT_THROW(s.evaluate(10.1), DomainError);
}

TEST(SwitchingSignalTest, ConstructorValidates) {
  EXPECT_THROW(SwitchingSignal({}, 1.0), DomainError);
  EXPECT_THROW(SwitchingSignal({{0.5, 1}}, 1.0), DomainError);
  EXPECT_THROW(SwitchingSignal({{0.0, 1}, {2.0, 2}, {2.0, 1}}, 5.0), DomainError);
  EXPECT_THROW(SwitchingSignal({{0.0, 1}, {2.0, 2}}, 2.0), DomainError);
}

TEST(CountsTest, HandEnumeratedIntervals) {
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 10.0);
  const SwitchingRules r = two_class_rules();
  SwitchCounts c = counts(s, r, 0.0, 10.0);
  EXPECT_EQ(c.N, 2);
  EXPECT_EQ(c.N_S, 1);
  EXPECT_EQ(c.N_U, 1);
  EXPECT_DOUBLE_EQ(c.T_S, 6.0);
  EXPECT_DOUBLE_EQ(c.T_U, 4.0);

  c = counts(s, r, 0.0, 3.5);
  EXPECT_EQ(c.N, 1);
  EXPECT_EQ(c.N_U, 1);
  EXPECT_DOUBLE_EQ(c.T_S, 3.5);
  EXPECT_DOUBLE_EQ(c.T_U, 0.0);

  c = counts(s, r, 3.5, 7.5);  // switch at s excluded, switch at t included
  EXPECT_EQ(c.N, 1);
  EXPECT_EQ(c.N_S, 1);
  EXPECT_DOUBLE_EQ(c.T_U, 4.0);
}

TEST(CountsTest, ConstantSignal) {
  const SwitchingRules r = two_class_rules();
  const SwitchCounts c = counts(SwitchingSignal::constant(2, 10.0), r, 1.25, 8.0);
  EXPECT_EQ(c.N, 0);
  EXPECT_DOUBLE_EQ(c.T_U, 6.75);
  EXPECT_DOUBLE_EQ(c.T_S, 0.0);
}

TEST(CountsTest, DegenerateIntervalThrows) {
  const SwitchingSignal s({{0.0, 1}}, 10.0);
  EXPECT_THROW(counts(s, two_class_rules(), 2.0, 2.0), DomainError);
  EXPECT_THROW(counts(s, two_class_rules(), 3.0, 2.0), DomainError);
  EXPECT_THROW(counts(s, two_class_rules(), 0.0, 11.0), DomainError);
}

TEST(ValidateAdmissibleTest, ExampleStyleSignalPasses) {
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 10.0);
  EXPECT_TRUE(validate_admissible(s, testing::example_rules()).ok());
}

TEST(ValidateAdmissibleTest, DwellTooLong) {
  const SwitchingSignal s({{0.0, 1}, {4.5, 2}}, 8.0);
  const ValidationReport r = validate_admissible(s, testing::example_rules());
  EXPECT_TRUE(mentions(r, "dwell too long at 0")) << r.summary();
}

TEST(ValidateAdmissibleTest, DwellTooShort) {
  const SwitchingSignal s({{0.0, 1}, {3.0, 2}}, 6.0);
  EXPECT_TRUE(mentions(validate_admissible(s, testing::example_rules()), "dwell too short at 0"));
}

TEST(ValidateAdmissibleTest, EdgeNotAllowed) {
  const SwitchingSignal s({{0.0, 2}, {3.5, 3}}, 7.0);
  const ValidationReport r = validate_admissible(s, testing::example_rules());
  EXPECT_TRUE(mentions(r, "edge not allowed")) << r.summary();
}

TEST(ValidateAdmissibleTest, FinalPartialDwellOnlyCapped) {
  const SwitchingRules rules = testing::example_rules();
  EXPECT_TRUE(validate_admissible(SwitchingSignal({{0.0, 1}, {3.5, 2}}, 4.0), rules).ok());
  EXPECT_FALSE(validate_admissible(SwitchingSignal({{0.0, 1}, {3.5, 2}}, 8.0), rules).ok());
}

TEST(ValidateAdmissibleTest, UnknownIndex) {
  const SwitchingSignal s({{0.0, 9}}, 1.0);
  EXPECT_TRUE(mentions(validate_admissible(s, testing::example_rules()), "unknown subsystem 9"));
}

TEST(ValidateStabilizingTest, AlternatingSignalPasses) {
  const SwitchingSignal s({{0.0, 1}, {3.6, 2}, {7.6, 1}, {11.5, 3}, {15.2, 1}}, 18.0);
  const ValidationReport r =
      validate_stabilizing(s, testing::example_rules(), testing::example_dwell());
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(ValidateStabilizingTest, ConsecutiveUnstable) {
  SwitchingRules rules = testing::example_rules();
  rules.graph = SwitchGraph({{1, 2}, {2, 3}, {3, 1}, {2, 1}, {1, 3}});
  const SwitchingSignal s({{0.0, 2}, {3.5, 3}}, 7.0);
  const ValidationReport r = validate_stabilizing(s, rules, testing::example_dwell());
  EXPECT_TRUE(mentions(r, "consecutive unstable")) << r.summary();
}

TEST(ValidateStabilizingTest, StableDwellBelowDeltaCheck) {
  const SwitchingSignal s({{0.0, 1}, {3.6, 2}}, 7.0);
  const ValidationReport r = validate_stabilizing(s, testing::example_rules(), {3.7, 4.0});
  EXPECT_TRUE(mentions(r, "stable dwell too short")) << r.summary();
}

TEST(ValidateStabilizingTest, UnstableDwellAboveDeltaHat) {
  const SwitchingSignal s({{0.0, 2}, {3.9, 1}}, 7.0);
  const ValidationReport r = validate_stabilizing(s, testing::example_rules(), {3.5, 3.8});
  EXPECT_TRUE(mentions(r, "unstable dwell too long")) << r.summary();
}

TEST(GenerateSignalTest, ExampleSeedSeven) {
  const SwitchingRules rules = testing::example_rules();
  const SwitchingSignal s = generate_signal(rules, testing::example_dwell(), 15.0, 7);
  EXPECT_TRUE(validate_stabilizing(s, rules, testing::example_dwell()).ok());
  for (std::size_t k = 0; k + 1 < s.entries().size(); ++k) {
    EXPECT_GE(s.dwell(k), 3.5 - 1e-12);
    EXPECT_LE(s.dwell(k), 4.0 + 1e-12);
  }
  EXPECT_GE(s.switch_count(), 3u);
}

TEST(GenerateSignalTest, Deterministic) {
  const SwitchingRules rules = testing::example_rules();
  EXPECT_EQ(generate_signal(rules, testing::example_dwell(), 50.0, 11),
            generate_signal(rules, testing::example_dwell(), 50.0, 11));
  EXPECT_NE(generate_signal(rules, testing::example_dwell(), 50.0, 11),
            generate_signal(rules, testing::example_dwell(), 50.0, 12));
}

TEST(GenerateSignalTest, InstantsOnQuantumGrid) {
  const SwitchingSignal s =
      generate_signal(testing::example_rules(), testing::example_dwell(), 100.0, 3, 1e-3);
  for (const auto& e : s.entries()) {
    EXPECT_EQ(e.tau, std::round(e.tau * 1000.0) / 1000.0);
  }
}

TEST(GenerateSignalTest, SingleSubsystemIsConstant) {
  SwitchingRules rules;
  rules.classes = {{1, StabilityClass::Stable}};
  rules.delta = 1.0;
  rules.Delta = 1.0;
  const SwitchingSignal s = generate_signal(rules, {1.0, 1.0}, 25.0, 4);
  EXPECT_EQ(s.switch_count(), 0u);
  EXPECT_EQ(counts(s, rules, 0.0, 25.0).N, 0);
  EXPECT_TRUE(validate_stabilizing(s, rules, {1.0, 1.0}).ok());
}

TEST(GenerateSignalTest, DeadEndNamesIndex) {
  SwitchingRules rules = two_class_rules();
  rules.classes[3] = StabilityClass::Stable;
  rules.graph = SwitchGraph({{1, 2}, {2, 1}, {2, 3}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    try {
      generate_signal(rules, {3.5, 4.0}, 100.0, seed);
    } catch (const DomainError& e) {
      EXPECT_NE(std::string(e.what()).find("subsystem 3"), std::string::npos) << e.what();
      return;
    }
  }
  FAIL() << "no seed reached the dead end at subsystem 3";
}

TEST(GenerateSignalTest, EmptyWindowRejected) {
  EXPECT_THROW(generate_signal(testing::example_rules(), {3.5, 4.0}, 10.0, 1, 3.0), DomainError);
  EXPECT_THROW(generate_signal(testing::example_rules(), {3.5, 4.0}, 0.0, 1), DomainError);
}

TEST(SignalPropertyTest, GeneratedSignalsValidateAndCountsAreConsistent) {
  testing::Gen g(77);
  const SwitchingRules rules = testing::example_rules();
  for (int trial = 0; trial < 300; ++trial) {
    const double horizon = g.uniform(1.0, 80.0);
    const SwitchingSignal s = generate_signal(rules, testing::example_dwell(), horizon, g.seed());
    ASSERT_TRUE(validate_stabilizing(s, rules, testing::example_dwell()).ok());
    const testing::Interval iv = testing::draw_interval(g, horizon);
    const SwitchCounts c = counts(s, rules, iv.s, iv.t);
    EXPECT_EQ(c.N, c.N_S + c.N_U);
    EXPECT_NEAR(c.T_S + c.T_U, iv.t - iv.s, 1e-12);
  }
}

// Bounds that hold on every subinterval of a signal of the stabilizing class.
TEST(SignalPropertyTest, SharpBoundsHoldOnRandomSubintervals) {
  testing::Gen g(1234);
  const SwitchingRules rules = testing::example_rules();
  const DwellPair dwell = testing::example_dwell();
  for (int trial = 0; trial < 1000; ++trial) {
    const SwitchingSignal s = generate_signal(rules, dwell, 60.0, g.seed());
    const testing::Interval iv = testing::draw_interval(g, 60.0);
    const SwitchCounts c = counts(s, rules, iv.s, iv.t);
    const LemmaBounds b = check_sharp_bounds(c, iv.s, iv.t, rules, dwell);
    ASSERT_TRUE(b.all()) << "]" << iv.s << ", " << iv.t << "] N=" << c.N << " N_U=" << c.N_U
                         << " N_S=" << c.N_S << " T_S=" << c.T_S << " T_U=" << c.T_U;
  }
}

// From a stable activation to a later switching instant the literal count
// bounds hold; the unstable-count bound needs the interval to close on a
// stable activation as well.
TEST(SignalPropertyTest, LiteralBoundsHoldBetweenSwitchingInstants) {
  testing::Gen g(99);
  const SwitchingRules rules = testing::example_rules();
  const DwellPair dwell = testing::example_dwell();
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SwitchingSignal s = generate_signal(rules, dwell, 80.0, g.seed());
    const auto& e = s.entries();
    if (e.size() < 3) continue;
    const auto i = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(e.size()) - 2));
    const auto j = static_cast<std::size_t>(g.integer(static_cast<std::int64_t>(i) + 1,
                                                      static_cast<std::int64_t>(e.size()) - 1));
    if (rules.is_unstable(e[i].index)) continue;
    const SwitchCounts c = counts(s, rules, e[i].tau, e[j].tau);
    const LemmaBounds b = check_lemma_bounds(c, e[i].tau, e[j].tau, rules, dwell);
    EXPECT_TRUE(b.count_lower);
    EXPECT_TRUE(b.count_upper);
    EXPECT_TRUE(b.unstable_time);
    if (rules.is_stable(e[j].index)) {
      EXPECT_TRUE(b.unstable_count);
    }
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(LemmaBoundsTest, LiteralUpperCountFailsOnStraddlingInterval) {
  const SwitchingRules rules = two_class_rules();
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 10.0);
  const SwitchCounts c = counts(s, rules, 3.4, 7.6);
  EXPECT_EQ(c.N, 2);
  EXPECT_FALSE(check_lemma_bounds(c, 3.4, 7.6, rules, {3.5, 4.0}).count_upper);
  EXPECT_TRUE(check_sharp_bounds(c, 3.4, 7.6, rules, {3.5, 4.0}).count_upper);
}

TEST(LemmaBoundsTest, LiteralUnstableCountFailsWhenIntervalOpensBeforeUnstable) {
  const SwitchingRules rules = two_class_rules();
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 10.0);
  const SwitchCounts c = counts(s, rules, 3.0, 4.0);
  EXPECT_EQ(c.N, 1);
  EXPECT_EQ(c.N_U, 1);
  EXPECT_FALSE(check_lemma_bounds(c, 3.0, 4.0, rules, {3.5, 4.0}).unstable_count);
  EXPECT_TRUE(check_sharp_bounds(c, 3.0, 4.0, rules, {3.5, 4.0}).unstable_count);
}

TEST(LemmaBoundsTest, LiteralStableTimeFailsWhenLastStableIsTruncated) {
  const SwitchingRules rules = two_class_rules();
  const SwitchingSignal s({{0.0, 2}, {4.0, 1}}, 10.0);
  const SwitchCounts c = counts(s, rules, 0.0, 5.0);
  EXPECT_EQ(c.N_S, 1);
  EXPECT_DOUBLE_EQ(c.T_S, 1.0);
  EXPECT_FALSE(check_lemma_bounds(c, 0.0, 5.0, rules, {3.5, 4.0}).stable_time);
  EXPECT_TRUE(check_sharp_bounds(c, 0.0, 5.0, rules, {3.5, 4.0}).stable_time);
}

TEST(LemmaBoundsTest, SnappingAbsorbsFloorJitter) {
  const SwitchingRules rules = two_class_rules();
  const SwitchingSignal s({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 12.0);
  // 0.1 + 0.2 style round-off must not flip floor((t - s) / Delta).
  const double a = 0.1 + 0.2;
  const double b = a + 8.0;
  const SwitchCounts c = counts(s, rules, a, b);
  EXPECT_TRUE(check_lemma_bounds(c, a, b, rules, {3.5, 4.0}).count_lower);
}

TEST(TicksToTimeTest, DecimalQuantumGivesNearestDouble) {
  EXPECT_EQ(ticks_to_time(2800, 1e-3), 2.8);
  EXPECT_EQ(ticks_to_time(3587, 1e-3), 3.587);
  EXPECT_EQ(ticks_to_time(3, 0.25), 0.75);
}

}  // namespace
}  // namespace swioss
