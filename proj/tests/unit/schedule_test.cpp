#include "rcpsp/schedule.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcpsp/closure.hpp"
#include "rcpsp/instance.hpp"
#include "rcpsp/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_instances.hpp"

using rcpsp::ActivityId;
using rcpsp::ActivityList;
using rcpsp::DecodeWorkspace;
using rcpsp::decode_partial;
using rcpsp::format_schedule;
using rcpsp::Instance;
using rcpsp::is_precedence_feasible_list;
using rcpsp::PrecedenceClosure;
using rcpsp::Rng;
using rcpsp::Schedule;
using rcpsp::serial_sgs;
using rcpsp::Time;
using rcpsp::transitive_closure;
using rcpsp::validate_schedule;
using rcpsp::Violation;
using rcpsp::testing::build_instance;
using rcpsp::testing::grid_decode;
using rcpsp::testing::random_feasible_list;
using rcpsp::testing::random_instance;
using rcpsp::testing::reachability;

namespace {

Instance diamond() {
  return build_instance({4}, {{3, {2}, {3}}, {2, {3}, {3}}, {4, {2}, {}}});
}

std::optional<Violation> find_violation(const std::vector<Violation>& violations,
                                        Violation::Kind kind) {
  for (const Violation& v : violations) {
    if (v.kind == kind) return v;
  }
  return std::nullopt;
}

}  // namespace

TEST(SerialSgs, SerializesWhenCapacityIsOne) {
  const Instance in = build_instance({1}, {{3, {1}, {}}, {2, {1}, {}}});
  const Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4}}, in);
  EXPECT_EQ(s.start[2], 0);
  EXPECT_EQ(s.start[3], 3);
  EXPECT_EQ(s.makespan, 5);
}

TEST(SerialSgs, RunsInParallelWhenCapacityAllows) {
  const Instance in = build_instance({2}, {{3, {1}, {}}, {2, {1}, {}}});
  const Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4}}, in);
  EXPECT_EQ(s.start[2], 0);
  EXPECT_EQ(s.start[3], 0);
  EXPECT_EQ(s.makespan, 3);
}

TEST(SerialSgs, AllDummyProjectHasZeroMakespan) {
  const Instance in = build_instance({1}, {});
  const Schedule s = serial_sgs(ActivityList{{1, 2}}, in);
  EXPECT_EQ(rcpsp::makespan(s), 0);
}

TEST(SerialSgs, SingleActivityMakespanIsItsDuration) {
  const Instance in = build_instance({1}, {{5, {1}, {}}});
  const Schedule s = serial_sgs(ActivityList{{1, 2, 3}}, in);
  EXPECT_EQ(rcpsp::makespan(s), 5);
}

TEST(SerialSgs, RejectsNonPermutationsAndInfeasibleOrders) {
  const Instance in = diamond();
  EXPECT_THROW(serial_sgs(ActivityList{{1, 2, 2, 4, 5}}, in), std::invalid_argument);
  EXPECT_THROW(serial_sgs(ActivityList{{1, 2, 3}}, in), std::invalid_argument);
  EXPECT_THROW(serial_sgs(ActivityList{{1, 4, 2, 3, 5}}, in), std::invalid_argument);
}

TEST(SerialSgs, MatchesGridOracleOnRandomInstances) {
  Rng rng(4242);
  for (int trial = 0; trial < 120; ++trial) {
    const Instance in = random_instance(rng);
    for (int rep = 0; rep < 3; ++rep) {
      const ActivityList list = random_feasible_list(in, rng);
      const Schedule fast = serial_sgs(list, in);
      const Schedule slow = grid_decode(list, in);
      ASSERT_EQ(fast.start, slow.start) << "start times differ on trial " << trial;
      ASSERT_EQ(fast.finish, slow.finish);
      ASSERT_EQ(fast.makespan, slow.makespan);
    }
  }
}

TEST(SerialSgs, OutputAlwaysPassesValidator) {
  Rng rng(555);
  for (int trial = 0; trial < 80; ++trial) {
    const Instance in = random_instance(rng);
    const Schedule s = serial_sgs(random_feasible_list(in, rng), in);
    EXPECT_TRUE(validate_schedule(in, s).empty());
  }
}

TEST(DecodePartial, EqualsFullDecodeOnCompleteLists) {
  Rng rng(909);
  DecodeWorkspace ws;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(rng);
    const PrecedenceClosure closure = transitive_closure(in);
    const ActivityList list = random_feasible_list(in, rng);
    const Time partial = decode_partial(std::span<const ActivityId>(list.order), in, closure, ws);
    EXPECT_EQ(partial, serial_sgs(list, in).makespan);
  }
}

TEST(DecodePartial, PrefixesMatchTransitivePredecessorReplay) {
  Rng rng(808);
  DecodeWorkspace ws;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(rng);
    const PrecedenceClosure closure = transitive_closure(in);
    const ActivityList list = random_feasible_list(in, rng);
    const auto reach = reachability(in);
    const int length = rng.range(1, in.activity_count);
    const std::span<const ActivityId> prefix(list.order.data(), length);

    // Replay on an explicit grid, with the earliest start bounded by the
    // latest finish among transitive predecessors present in the prefix.
    const Time width = in.duration_sum() + 1;
    std::vector<std::vector<int>> used(in.resource_count, std::vector<int>(width, 0));
    std::vector<Time> finish(in.activity_count + 1, 0);
    Time expected = 0;
    for (int i = 0; i < length; ++i) {
      const ActivityId a = prefix[i];
      Time earliest = 0;
      for (int j = 0; j < i; ++j) {
        if (reach[prefix[j]][a]) earliest = std::max(earliest, finish[prefix[j]]);
      }
      for (Time t = earliest;; ++t) {
        bool fits = true;
        for (Time u = t; fits && u < t + in.durations[a]; ++u) {
          for (int k = 0; fits && k < in.resource_count; ++k) {
            if (used[k][u] + in.demands[a][k] > in.capacities[k]) fits = false;
          }
        }
        if (!fits) continue;
        finish[a] = t + in.durations[a];
        for (Time u = t; u < finish[a]; ++u) {
          for (int k = 0; k < in.resource_count; ++k) used[k][u] += in.demands[a][k];
        }
        break;
      }
      expected = std::max(expected, finish[a]);
    }

    EXPECT_EQ(decode_partial(prefix, in, closure, ws), expected) << "prefix length " << length;
  }
}

TEST(FeasibleList, DetectsOrderViolations) {
  const Instance in = diamond();
  const PrecedenceClosure closure = transitive_closure(in);
  EXPECT_TRUE(is_precedence_feasible_list(ActivityList{{1, 2, 3, 4, 5}}, closure));
  EXPECT_TRUE(is_precedence_feasible_list(ActivityList{{1, 3, 2, 4, 5}}, closure));
  EXPECT_FALSE(is_precedence_feasible_list(ActivityList{{1, 4, 2, 3, 5}}, closure));
  EXPECT_FALSE(is_precedence_feasible_list(ActivityList{{5, 2, 3, 4, 1}}, closure));
  // Partial lists: membership-restricted order is what counts.
  const std::vector<ActivityId> good{2, 4};
  const std::vector<ActivityId> bad{4, 2};
  EXPECT_TRUE(is_precedence_feasible_list(std::span<const ActivityId>(good), closure));
  EXPECT_FALSE(is_precedence_feasible_list(std::span<const ActivityId>(bad), closure));
  // Duplicates are malformed, never feasible.
  const std::vector<ActivityId> duplicated{1, 2, 2, 4, 5};
  EXPECT_FALSE(is_precedence_feasible_list(std::span<const ActivityId>(duplicated), closure));
}

TEST(ValidateSchedule, CleanScheduleHasNoViolations) {
  const Instance in = diamond();
  const Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
  EXPECT_TRUE(validate_schedule(in, s).empty());
}

TEST(ValidateSchedule, NamesThePrecedenceEdge) {
  const Instance in = diamond();
  Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
  s.start[4] = 1;  // predecessors 2 and 3 finish at 3 and 5
  s.finish[4] = 1 + in.durations[4];
  const auto violations = validate_schedule(in, s);
  const auto violation = find_violation(violations, Violation::Kind::precedence);
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->b, 4);
  EXPECT_TRUE(violation->a == 2 || violation->a == 3);
}

TEST(ValidateSchedule, NamesResourceAndOnsetTime) {
  const Instance in = build_instance({1}, {{3, {1}, {}}, {2, {1}, {}}});
  Schedule s;
  s.start = {0, 0, 0, 1, 3};  // both reals start together; capacity is 1
  s.finish = {0, 0, 3, 3, 3};
  s.makespan = 3;
  const auto violations = validate_schedule(in, s);
  const auto violation = find_violation(violations, Violation::Kind::resource_overuse);
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->resource, 1);
  EXPECT_EQ(violation->time, 1);  // overload begins when the second activity starts
}

TEST(ValidateSchedule, FlagsCompletionAndMakespanMismatches) {
  const Instance in = diamond();
  {
    Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
    s.finish[2] = s.start[2] + in.durations[2] + 1;
    const auto violations = validate_schedule(in, s);
    const auto violation = find_violation(violations, Violation::Kind::completion_mismatch);
    ASSERT_TRUE(violation.has_value());
    EXPECT_EQ(violation->a, 2);
  }
  {
    Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
    s.makespan += 1;
    EXPECT_TRUE(
        find_violation(validate_schedule(in, s), Violation::Kind::makespan_mismatch).has_value());
  }
}

TEST(ValidateSchedule, FlagsNegativeStartsAndMalformedInput) {
  const Instance in = diamond();
  {
    Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
    s.start[3] = -1;
    s.finish[3] = -1 + in.durations[3];
    EXPECT_TRUE(
        find_violation(validate_schedule(in, s), Violation::Kind::negative_start).has_value());
  }
  {
    Schedule s;  // empty vectors
    const auto violations = validate_schedule(in, s);
    ASSERT_EQ(violations.size(), 1u);
    EXPECT_EQ(violations[0].kind, Violation::Kind::malformed);
  }
}

TEST(ValidateSchedule, ViolationDescriptionsMentionTheActors) {
  const Instance in = build_instance({1}, {{3, {1}, {}}, {2, {1}, {}}});
  Schedule s;
  s.start = {0, 0, 0, 1, 3};
  s.finish = {0, 0, 3, 3, 3};
  s.makespan = 3;
  const auto violations = validate_schedule(in, s);
  ASSERT_FALSE(violations.empty());
  const std::string text = violations.front().describe();
  EXPECT_NE(text.find("resource 1"), std::string::npos) << text;
}

TEST(FormatSchedule, EmitsOneLinePerActivityAndAFooter) {
  const Instance in = diamond();
  const Schedule s = serial_sgs(ActivityList{{1, 2, 3, 4, 5}}, in);
  EXPECT_EQ(format_schedule(s, in),
            "1 0 0\n"
            "2 0 3\n"
            "3 3 5\n"
            "4 5 9\n"
            "5 9 9\n"
            "makespan 9\n");
}
