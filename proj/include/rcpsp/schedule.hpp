#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcpsp/closure.hpp"
#include "rcpsp/instance.hpp"

namespace rcpsp {

// Precedence-feasible permutation of all activities, dummy source first and
// dummy sink last. The search representation: every operator below works on
// positions in this list.
struct ActivityList {
  std::vector<ActivityId> order;

  bool operator==(const ActivityList&) const = default;
};

struct Schedule {
  std::vector<Time> start;   // [1..n]
  std::vector<Time> finish;  // finish[a] = start[a] + duration[a]
  Time makespan = 0;
};

inline Time makespan(const Schedule& schedule) { return schedule.makespan; }

namespace detail {

// Earliest start >= est whose whole duration fits in the remaining-capacity
// grid, applying the demands once found. When a slot is short, every start
// covering that slot is infeasible too, so the scan jumps past it; the
// result is identical to probing every t in turn.
inline Time place_activity(std::vector<int>& remaining, Time grid_width, const Instance& in,
                           ActivityId a, Time est) {
  const Time p = in.durations[a];
  if (p == 0) return est;
  const auto& demand = in.demands[a];
  bool uses_resources = false;
  for (int k = 0; k < in.resource_count; ++k) {
    if (demand[k] > 0) {
      uses_resources = true;
      break;
    }
  }
  if (!uses_resources) return est;

  Time t = est;
  for (;;) {
    Time conflict = -1;
    for (int k = 0; k < in.resource_count && conflict < 0; ++k) {
      const int d = demand[k];
      if (d == 0) continue;
      const int* row = remaining.data() + static_cast<std::size_t>(k) * grid_width;
      for (Time u = t; u < t + p; ++u) {
        if (row[u] < d) {
          conflict = u;
          break;
        }
      }
    }
    if (conflict < 0) break;
    t = conflict + 1;
  }
  for (int k = 0; k < in.resource_count; ++k) {
    const int d = demand[k];
    if (d == 0) continue;
    int* row = remaining.data() + static_cast<std::size_t>(k) * grid_width;
    for (Time u = t; u < t + p; ++u) row[u] -= d;
  }
  return t;
}

}  // namespace detail

/**
 * Serial schedule generation scheme. Walks the list in order and gives each
 * activity the earliest start at or after the completion of its direct
 * predecessors at which its whole duration fits into the remaining capacity
 * of every resource. Pure: identical inputs produce identical schedules.
 * Throws std::invalid_argument if the list is not a precedence-feasible
 * permutation of all activities; it never reorders.
 */
inline Schedule serial_sgs(const ActivityList& list, const Instance& in) {
  const int n = in.activity_count;
  if (static_cast<int>(list.order.size()) != n)
    throw std::invalid_argument("activity list must contain all " + std::to_string(n) +
                                " activities");
  Schedule schedule;
  schedule.start.assign(n + 1, 0);
  schedule.finish.assign(n + 1, 0);

  const Time width = in.duration_sum() + 1;
  std::vector<int> remaining(static_cast<std::size_t>(in.resource_count) * width);
  for (int k = 0; k < in.resource_count; ++k) {
    std::fill_n(remaining.begin() + static_cast<std::size_t>(k) * width, width, in.capacities[k]);
  }

  std::vector<char> placed(n + 1, 0);
  for (ActivityId a : list.order) {
    if (a < 1 || a > n || placed[a])
      throw std::invalid_argument("activity list is not a permutation");
    Time est = 0;
    for (ActivityId p : in.predecessors[a]) {
      if (!placed[p])
        throw std::invalid_argument("list is not precedence-feasible: activity " +
                                    std::to_string(a) + " appears before its predecessor " +
                                    std::to_string(p));
      est = std::max(est, schedule.finish[p]);
    }
    const Time start = detail::place_activity(remaining, width, in, a, est);
    placed[a] = 1;
    schedule.start[a] = start;
    schedule.finish[a] = start + in.durations[a];
    schedule.makespan = std::max(schedule.makespan, schedule.finish[a]);
  }
  return schedule;
}

// Reusable decode buffers; sized on first use per instance. A search loop
// keeps one of these so inner decodes do not allocate.
struct DecodeWorkspace {
  std::vector<int> remaining;
  std::vector<Time> finish;
  std::vector<std::uint64_t> placed;
  Time grid_width = 0;
  int sized_for = -1;
  int resources_for = -1;

  void prepare(const Instance& in) {
    const Time width = in.duration_sum() + 1;
    if (sized_for != in.activity_count || resources_for != in.resource_count ||
        grid_width != width) {
      grid_width = width;
      remaining.assign(static_cast<std::size_t>(in.resource_count) * grid_width, 0);
      finish.assign(in.activity_count + 1, 0);
      placed.assign((in.activity_count + 1 + 63) / 64, 0);
      sized_for = in.activity_count;
      resources_for = in.resource_count;
    }
    for (int k = 0; k < in.resource_count; ++k) {
      std::fill_n(remaining.begin() + static_cast<std::size_t>(k) * grid_width, grid_width,
                  in.capacities[k]);
    }
    std::fill(placed.begin(), placed.end(), 0);
  }
};

/**
 * Decodes any precedence-feasible sequence over a subset of activities as a
 * standalone subproject with the full capacities: each member starts at the
 * earliest resource-feasible time after the completion of every transitive
 * predecessor present in the sequence. On a complete list this equals
 * serial_sgs (with all intermediates placed, the latest-finishing direct
 * predecessor dominates every transitive one). Returns the makespan.
 */
inline Time decode_partial(std::span<const ActivityId> order, const Instance& in,
                           const PrecedenceClosure& closure, DecodeWorkspace& ws) {
  ws.prepare(in);
  Time makespan = 0;
  for (ActivityId a : order) {
    Time est = 0;
    const auto preds = closure.predecessors.row(a);
    for (std::size_t w = 0; w < ws.placed.size(); ++w) {
      std::uint64_t both = preds[w] & ws.placed[w];
      while (both) {
        const int bit = __builtin_ctzll(both);
        both &= both - 1;
        est = std::max(est, ws.finish[w * 64 + bit]);
      }
    }
    const Time start = detail::place_activity(ws.remaining, ws.grid_width, in, a, est);
    ws.finish[a] = start + in.durations[a];
    ws.placed[a >> 6] |= std::uint64_t{1} << (a & 63);
    makespan = std::max(makespan, ws.finish[a]);
  }
  return makespan;
}

inline Time decode_partial(std::span<const ActivityId> order, const Instance& in,
                           const PrecedenceClosure& closure) {
  DecodeWorkspace ws;
  return decode_partial(order, in, closure, ws);
}

// True when the sequence has distinct in-range ids and every member appears
// after all of its transitive predecessors that are present. Works for both
// complete lists and partial ones (subset sequences).
inline bool is_precedence_feasible_list(std::span<const ActivityId> order,
                                        const PrecedenceClosure& closure) {
  const int n = closure.id_count();
  const std::size_t words = (n + 1 + 63) / 64;
  std::vector<std::uint64_t> member(words, 0), seen(words, 0);
  for (ActivityId a : order) {
    if (a < 1 || a > n) return false;
    std::uint64_t& w = member[a >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (a & 63);
    if (w & bit) return false;  // duplicate
    w |= bit;
  }
  for (ActivityId a : order) {
    const auto preds = closure.predecessors.row(a);
    for (std::size_t w = 0; w < words; ++w) {
      if (preds[w] & member[w] & ~seen[w]) return false;
    }
    seen[a >> 6] |= std::uint64_t{1} << (a & 63);
  }
  return true;
}

inline bool is_precedence_feasible_list(const ActivityList& list,
                                        const PrecedenceClosure& closure) {
  return is_precedence_feasible_list(std::span<const ActivityId>(list.order), closure);
}

struct Violation {
  enum class Kind {
    malformed,            // schedule vectors do not match the instance
    completion_mismatch,  // finish != start + duration for activity a
    negative_start,       // start[a] < 0
    precedence,           // edge a -> b with start[b] < finish[a]
    resource_overuse,     // resource (1-based) overbooked starting at time
    makespan_mismatch,    // stored makespan != max finish
  };

  Kind kind;
  ActivityId a = 0;
  ActivityId b = 0;
  int resource = 0;
  Time time = -1;

  std::string describe() const {
    switch (kind) {
      case Kind::malformed:
        return "schedule shape does not match the instance";
      case Kind::completion_mismatch:
        return "activity " + std::to_string(a) + ": finish != start + duration";
      case Kind::negative_start:
        return "activity " + std::to_string(a) + ": negative start time";
      case Kind::precedence:
        return "precedence violated: activity " + std::to_string(b) +
               " starts before predecessor " + std::to_string(a) + " finishes";
      case Kind::resource_overuse:
        return "resource " + std::to_string(resource) + " overbooked at time " +
               std::to_string(time);
      case Kind::makespan_mismatch:
        return "stored makespan differs from max completion time";
    }
    return "unknown violation";
  }
};

/**
 * Feasibility check of an arbitrary schedule against the instance; the
 * acceptance oracle for every search result. Returns one entry per violated
 * constraint, each naming the activities, resource, and time involved; an
 * empty result means the schedule is feasible. Deliberately shares no code
 * with serial_sgs: resource load is re-derived with an event sweep over
 * activity intervals.
 */
inline std::vector<Violation> validate_schedule(const Instance& in, const Schedule& schedule) {
  std::vector<Violation> violations;
  const int n = in.activity_count;
  if (static_cast<int>(schedule.start.size()) != n + 1 ||
      static_cast<int>(schedule.finish.size()) != n + 1) {
    violations.push_back({Violation::Kind::malformed});
    return violations;
  }

  Time max_finish = 0;
  for (ActivityId a = 1; a <= n; ++a) {
    if (schedule.start[a] < 0)
      violations.push_back({Violation::Kind::negative_start, a});
    if (schedule.finish[a] != schedule.start[a] + in.durations[a])
      violations.push_back({Violation::Kind::completion_mismatch, a});
    max_finish = std::max(max_finish, schedule.finish[a]);
  }
  for (ActivityId a = 1; a <= n; ++a) {
    for (ActivityId s : in.successors[a]) {
      if (schedule.start[s] < schedule.finish[a])
        violations.push_back({Violation::Kind::precedence, a, s});
    }
  }
  if (schedule.makespan != max_finish)
    violations.push_back({Violation::Kind::makespan_mismatch});

  // Event sweep per resource: +demand at start, -demand at finish, removals
  // first at equal times (an activity occupies [start, finish)).
  for (int k = 0; k < in.resource_count; ++k) {
    std::vector<std::pair<Time, int>> events;
    for (ActivityId a = 1; a <= n; ++a) {
      const int d = in.demands[a][k];
      if (d > 0 && in.durations[a] > 0) {
        events.emplace_back(schedule.start[a], d);
        events.emplace_back(schedule.start[a] + in.durations[a], -d);
      }
    }
    std::sort(events.begin(), events.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first < y.first : x.second < y.second;
    });
    int load = 0;
    bool over = false;
    for (const auto& [time, delta] : events) {
      load += delta;
      if (load > in.capacities[k]) {
        if (!over) violations.push_back({Violation::Kind::resource_overuse, 0, 0, k + 1, time});
        over = true;
      } else {
        over = false;
      }
    }
  }
  return violations;
}

// Text export: one "id start finish" line per activity plus a makespan
// footer.
inline std::string format_schedule(const Schedule& schedule, const Instance& in) {
  std::string out;
  for (ActivityId a = 1; a <= in.activity_count; ++a) {
    out += std::to_string(a) + ' ' + std::to_string(schedule.start[a]) + ' ' +
           std::to_string(schedule.finish[a]) + '\n';
  }
  out += "makespan " + std::to_string(schedule.makespan) + '\n';
  return out;
}

}  // namespace rcpsp
