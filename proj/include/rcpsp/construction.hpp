#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcpsp/closure.hpp"
#include "rcpsp/instance.hpp"
#include "rcpsp/rng.hpp"
#include "rcpsp/schedule.hpp"

namespace rcpsp {

// Legal insertion slots for one activity into a partial list, as inclusive
// list indices: every position after the latest transitive predecessor
// present and before the earliest transitive successor present.
struct InsertionWindow {
  int low = 0;
  int high = 0;
};

// A precedence-feasible sequence over a subset of the activities, with an
// O(1) membership test.
struct PartialList {
  std::vector<ActivityId> order;
  std::vector<std::uint8_t> member;  // indexed by activity id

  explicit PartialList(int activity_count) : member(activity_count + 1, 0) {}

  int size() const { return static_cast<int>(order.size()); }
  bool contains(ActivityId a) const { return member[a] != 0; }

  void insert_at(int position, ActivityId a) {
    order.insert(order.begin() + position, a);
    member[a] = 1;
  }
};

// Uniformly random m-subset of the non-dummy activities, ascending.
inline std::vector<ActivityId> select_seed_subset(const Instance& in, int m, Rng& rng) {
  if (m < 1 || m > in.real_count())
    throw std::invalid_argument("seed subset size must be between 1 and the non-dummy count");
  std::vector<ActivityId> ids;
  ids.reserve(in.real_count());
  for (ActivityId a = 2; a < in.sink(); ++a) ids.push_back(a);
  rng.shuffle_prefix(ids, m);
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct SubInstance {
  Instance instance;
  std::vector<ActivityId> to_original;  // indexed by sub-instance id; 0 for the dummies
};

/**
 * Sub-RCPSP over a subset of activities plus fresh dummies. Durations,
 * demands and capacities are copied; an edge i -> j is included exactly when
 * j is a transitive successor of i in the full project, so any ordering that
 * is feasible for the subinstance extends to a feasible ordering of the full
 * project. Members map to sub ids 2..m+1 in ascending original order.
 */
inline SubInstance induced_subinstance(const Instance& in, std::span<const ActivityId> subset,
                                       const PrecedenceClosure& closure) {
  std::vector<ActivityId> members(subset.begin(), subset.end());
  std::sort(members.begin(), members.end());
  const int m = static_cast<int>(members.size());
  if (m == 0) throw std::invalid_argument("subset must be nonempty");

  Instance sub;
  sub.name = in.name + "#sub";
  sub.activity_count = m + 2;
  sub.resource_count = in.resource_count;
  sub.capacities = in.capacities;
  sub.durations.assign(m + 3, 0);
  sub.demands.assign(m + 3, std::vector<int>(in.resource_count, 0));
  sub.successors.assign(m + 3, {});

  Time total = 0;
  for (int i = 0; i < m; ++i) {
    sub.durations[i + 2] = in.durations[members[i]];
    sub.demands[i + 2] = in.demands[members[i]];
    total += in.durations[members[i]];
  }
  sub.horizon = std::max<Time>(1, total);

  for (int i = 0; i < m; ++i) {
    bool has_pred = false, has_succ = false;
    for (int j = 0; j < m; ++j) {
      if (closure.is_succ(members[j], members[i])) {
        sub.successors[i + 2].push_back(j + 2);
        has_succ = true;
      }
      if (closure.is_pred(members[j], members[i])) has_pred = true;
    }
    if (!has_pred) sub.successors[1].push_back(i + 2);
    if (!has_succ) sub.successors[i + 2].push_back(m + 2);
  }

  SubInstance result;
  result.instance = finalize_instance(std::move(sub));
  result.to_original.assign(m + 3, 0);
  for (int i = 0; i < m; ++i) result.to_original[i + 2] = members[i];
  return result;
}

struct BnbResult {
  ActivityList list;
  Time makespan = 0;
  bool optimal = false;
  std::uint64_t nodes = 0;
};

namespace detail {

// Depth-first branch-and-bound over precedence-feasible list prefixes,
// decoding incrementally with the serial scheme. A node is one activity
// placement. Deterministic: branches in ascending id order, incumbent
// replaced only on strict improvement.
class BnbSolver {
 public:
  BnbSolver(const Instance& in, std::uint64_t node_budget)
      : in_(in),
        budget_(node_budget),
        closure_(transitive_closure(in)),
        tails_(critical_path_tails(in)),
        width_(in.duration_sum() + 1) {}

  BnbResult run() {
    const int n = in_.activity_count;
    BnbResult result;
    result.list.order = topological_order(in_);  // ascending-id greedy incumbent
    result.makespan = serial_sgs(result.list, in_).makespan;

    remaining_.assign(static_cast<std::size_t>(in_.resource_count) * width_, 0);
    for (int k = 0; k < in_.resource_count; ++k) {
      std::fill_n(remaining_.begin() + static_cast<std::size_t>(k) * width_, width_,
                  in_.capacities[k]);
    }
    finish_.assign(n + 1, 0);
    placed_bits_.assign((n + 1 + 63) / 64, 0);
    pending_.assign(n + 1, 0);
    for (ActivityId a = 1; a <= n; ++a) {
      for (ActivityId s : in_.successors[a]) ++pending_[s];
    }
    prefix_.clear();
    prefix_.reserve(n);
    incumbent_ = &result;

    dfs(0);
    result.optimal = !out_of_budget_;
    result.nodes = nodes_;
    return result;
  }

 private:
  void dfs(Time prefix_makespan) {
    const int n = in_.activity_count;
    if (static_cast<int>(prefix_.size()) == n) {
      if (prefix_makespan < incumbent_->makespan) {
        incumbent_->makespan = prefix_makespan;
        incumbent_->list.order = prefix_;
      }
      return;
    }
    for (ActivityId a = 1; a <= n; ++a) {
      if (pending_[a] != 0 || is_placed(a)) continue;
      if (nodes_ == budget_) {
        out_of_budget_ = true;
        return;
      }
      ++nodes_;

      Time est = 0;
      for (ActivityId p : in_.predecessors[a]) est = std::max(est, finish_[p]);
      const Time start = place_activity(remaining_, width_, in_, a, est);
      finish_[a] = start + in_.durations[a];
      set_placed(a);
      for (ActivityId s : in_.successors[a]) --pending_[s];
      prefix_.push_back(a);
      const Time extended = std::max(prefix_makespan, finish_[a]);

      if (lower_bound(extended) < incumbent_->makespan) dfs(extended);

      prefix_.pop_back();
      for (ActivityId s : in_.successors[a]) ++pending_[s];
      clear_placed(a);
      unplace(a, start);
      if (out_of_budget_) return;
    }
  }

  // Admissible completion bound: every unscheduled activity must start no
  // earlier than the latest finish among its already-placed transitive
  // predecessors, and needs its critical-path tail after that.
  Time lower_bound(Time prefix_makespan) const {
    Time bound = prefix_makespan;
    const int n = in_.activity_count;
    for (ActivityId j = 1; j <= n; ++j) {
      if (is_placed(j)) continue;
      Time est = 0;
      const auto preds = closure_.predecessors.row(j);
      for (std::size_t w = 0; w < placed_bits_.size(); ++w) {
        std::uint64_t both = preds[w] & placed_bits_[w];
        while (both) {
          const int bit = __builtin_ctzll(both);
          both &= both - 1;
          est = std::max(est, finish_[w * 64 + bit]);
        }
      }
      bound = std::max(bound, est + tails_[j]);
    }
    return bound;
  }

  void unplace(ActivityId a, Time start) {
    const Time p = in_.durations[a];
    if (p == 0) return;
    for (int k = 0; k < in_.resource_count; ++k) {
      const int d = in_.demands[a][k];
      if (d == 0) continue;
      int* row = remaining_.data() + static_cast<std::size_t>(k) * width_;
      for (Time u = start; u < start + p; ++u) row[u] += d;
    }
  }

  bool is_placed(ActivityId a) const {
    return (placed_bits_[a >> 6] >> (a & 63)) & 1u;
  }
  void set_placed(ActivityId a) { placed_bits_[a >> 6] |= std::uint64_t{1} << (a & 63); }
  void clear_placed(ActivityId a) { placed_bits_[a >> 6] &= ~(std::uint64_t{1} << (a & 63)); }

  const Instance& in_;
  std::uint64_t budget_;
  PrecedenceClosure closure_;
  std::vector<Time> tails_;
  Time width_;
  std::vector<int> remaining_;
  std::vector<Time> finish_;
  std::vector<std::uint64_t> placed_bits_;
  std::vector<int> pending_;
  std::vector<ActivityId> prefix_;
  BnbResult* incumbent_ = nullptr;
  std::uint64_t nodes_ = 0;
  bool out_of_budget_ = false;
};

}  // namespace detail

/**
 * Exact minimum-makespan activity list by depth-first branch-and-bound.
 * Intended for the small seed subproblems; `optimal` is true when the whole
 * tree was explored within the node budget, otherwise the incumbent found so
 * far is returned with the flag false. Budget exhaustion is not an error.
 */
inline BnbResult bnb_exact(const Instance& in, std::uint64_t node_budget = 1'000'000) {
  return detail::BnbSolver(in, node_budget).run();
}

inline InsertionWindow feasible_insert_positions(const PartialList& partial, ActivityId a,
                                                 const PrecedenceClosure& closure) {
  InsertionWindow window{0, partial.size()};
  for (int i = 0; i < partial.size(); ++i) {
    if (closure.is_pred(partial.order[i], a)) window.low = i + 1;
  }
  for (int i = 0; i < partial.size(); ++i) {
    if (closure.is_succ(partial.order[i], a)) {
      window.high = i;
      break;
    }
  }
  // Predecessors precede successors in any feasible partial list, so the
  // window cannot be empty.
  if (window.low > window.high)
    throw std::logic_error("insertion window empty: partial list is precedence-infeasible");
  return window;
}

namespace detail {

// Inserts `a` at a position drawn uniformly from the argmin set of decoded
// makespans over its feasible window; returns that minimal makespan.
inline Time insert_at_best_position(PartialList& partial, ActivityId a, const Instance& in,
                                    const PrecedenceClosure& closure, Rng& rng,
                                    DecodeWorkspace& ws, std::vector<ActivityId>& scratch,
                                    std::uint64_t* decode_count) {
  const InsertionWindow window = feasible_insert_positions(partial, a, closure);

  // Candidate orders differ only in where `a` sits; slide it one slot at a
  // time instead of rebuilding the sequence.
  scratch.resize(partial.order.size() + 1);
  std::copy(partial.order.begin(), partial.order.begin() + window.low, scratch.begin());
  scratch[window.low] = a;
  std::copy(partial.order.begin() + window.low, partial.order.end(),
            scratch.begin() + window.low + 1);

  Time best_makespan = 0;
  std::vector<int> best_positions;
  for (int pos = window.low;; ++pos) {
    const Time mk = decode_partial(scratch, in, closure, ws);
    if (decode_count) ++*decode_count;
    if (best_positions.empty() || mk < best_makespan) {
      best_makespan = mk;
      best_positions.assign(1, pos);
    } else if (mk == best_makespan) {
      best_positions.push_back(pos);
    }
    if (pos == window.high) break;
    std::swap(scratch[pos], scratch[pos + 1]);
  }

  partial.insert_at(best_positions[rng.index(static_cast<int>(best_positions.size()))], a);
  return best_makespan;
}

}  // namespace detail

// Default seed-subset size: one tenth of the non-dummy activities, clamped
// to [10, 25] and capped at the non-dummy count.
inline int default_construction_m(int real_count) {
  const int tenth = static_cast<int>(std::lround(real_count / 10.0));
  return std::min(real_count, std::clamp(tenth, 10, 25));
}

/**
 * Initial solution: a uniformly random seed subset of m activities is solved
 * exactly as an induced sub-RCPSP, then the remaining activities are drawn
 * in uniformly random order and each inserted at a makespan-minimal feasible
 * position (ties broken uniformly). Returns a complete precedence-feasible
 * list with the dummies at both ends.
 */
inline ActivityList best_insertion_construct(const Instance& in, const PrecedenceClosure& closure,
                                             int m, Rng& rng,
                                             std::uint64_t bnb_node_budget = 1'000'000,
                                             std::uint64_t* decode_count = nullptr) {
  if (m < 1 || m > in.real_count())
    throw std::invalid_argument("construction seed size must be between 1 and the non-dummy count");

  const std::vector<ActivityId> subset = select_seed_subset(in, m, rng);
  const SubInstance sub = induced_subinstance(in, subset, closure);
  const BnbResult seed = bnb_exact(sub.instance, bnb_node_budget);
  if (decode_count) *decode_count += seed.nodes;

  PartialList partial(in.activity_count);
  for (ActivityId sub_id : seed.list.order) {
    const ActivityId original = sub.to_original[sub_id];
    if (original != 0) partial.insert_at(partial.size(), original);
  }

  std::vector<ActivityId> pending;
  pending.reserve(in.real_count() - m);
  for (ActivityId a = 2; a < in.sink(); ++a) {
    if (!partial.contains(a)) pending.push_back(a);
  }
  rng.shuffle(pending);

  DecodeWorkspace ws;
  std::vector<ActivityId> scratch;
  for (ActivityId a : pending) {
    detail::insert_at_best_position(partial, a, in, closure, rng, ws, scratch, decode_count);
  }

  ActivityList list;
  list.order.reserve(in.activity_count);
  list.order.push_back(in.source());
  list.order.insert(list.order.end(), partial.order.begin(), partial.order.end());
  list.order.push_back(in.sink());
  return list;
}

}  // namespace rcpsp
