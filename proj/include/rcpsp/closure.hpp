#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcpsp/instance.hpp"

namespace rcpsp {

// Dense bit matrix over 1-based activity ids. Row a holds the related set of
// activity a; word-level access backs the hot feasibility checks.
class BitRelation {
 public:
  BitRelation() = default;

  explicit BitRelation(int id_count)
      : id_count_(id_count),
        words_per_row_((id_count + 1 + 63) / 64),
        bits_((id_count + 1) * words_per_row_, 0) {}

  bool contains(ActivityId row, ActivityId id) const {
    return (word(row, id >> 6) >> (id & 63)) & 1u;
  }

  void add(ActivityId row, ActivityId id) {
    bits_[row * words_per_row_ + (id >> 6)] |= std::uint64_t{1} << (id & 63);
  }

  void merge_row(ActivityId into, ActivityId from) {
    std::uint64_t* dst = &bits_[into * words_per_row_];
    const std::uint64_t* src = &bits_[from * words_per_row_];
    for (int w = 0; w < words_per_row_; ++w) dst[w] |= src[w];
  }

  std::span<const std::uint64_t> row(ActivityId a) const {
    return {&bits_[a * words_per_row_], static_cast<std::size_t>(words_per_row_)};
  }

  int id_count() const { return id_count_; }
  int words_per_row() const { return words_per_row_; }

  int count_row(ActivityId a) const {
    int total = 0;
    for (std::uint64_t w : row(a)) total += __builtin_popcountll(w);
    return total;
  }

 private:
  std::uint64_t word(ActivityId row, int index) const {
    return bits_[row * words_per_row_ + index];
  }

  int id_count_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

/**
 * Transitive closure of the direct precedence relation. For any two
 * activities, j is in transitive_successors(i) exactly when i is in
 * transitive_predecessors(j); the relation is irreflexive (DAG).
 */
struct PrecedenceClosure {
  BitRelation predecessors;  // row a: all transitive predecessors of a
  BitRelation successors;    // row a: all transitive successors of a

  bool is_pred(ActivityId p, ActivityId of) const { return predecessors.contains(of, p); }
  bool is_succ(ActivityId s, ActivityId of) const { return successors.contains(of, s); }
  int id_count() const { return predecessors.id_count(); }
};

// Closure by propagation along a topological order. Throws if the instance
// graph has a cycle (parsing should already have rejected it).
inline PrecedenceClosure transitive_closure(const Instance& in) {
  const std::vector<ActivityId> order = topological_order(in);
  if (order.empty()) throw std::invalid_argument("cycle detected while building closure");
  PrecedenceClosure closure{BitRelation(in.activity_count), BitRelation(in.activity_count)};
  for (ActivityId a : order) {
    for (ActivityId s : in.successors[a]) {
      closure.predecessors.add(s, a);
      closure.predecessors.merge_row(s, a);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (ActivityId s : in.successors[*it]) {
      closure.successors.add(*it, s);
      closure.successors.merge_row(*it, s);
    }
  }
  return closure;
}

// Longest duration-weighted path from each activity to the sink, counting
// the activity's own duration. tails[source] is the critical-path length.
inline std::vector<Time> critical_path_tails(const Instance& in) {
  const std::vector<ActivityId> order = topological_order(in);
  if (order.empty()) throw std::invalid_argument("cycle detected while computing critical path");
  std::vector<Time> tails(in.activity_count + 1, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const ActivityId a = *it;
    Time best = 0;
    for (ActivityId s : in.successors[a]) best = std::max(best, tails[s]);
    tails[a] = best + in.durations[a];
  }
  return tails;
}

// Resource-blind lower bound on the makespan: the longest duration-weighted
// source-to-sink path.
inline Time critical_path_lower_bound(const Instance& in) {
  return critical_path_tails(in)[in.source()];
}

}  // namespace rcpsp
