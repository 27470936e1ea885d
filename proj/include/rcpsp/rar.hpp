#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcpsp/closure.hpp"
#include "rcpsp/construction.hpp"
#include "rcpsp/instance.hpp"
#include "rcpsp/rng.hpp"
#include "rcpsp/schedule.hpp"

namespace rcpsp {

struct SearchConfig {
  int max_iterations = 3000;
  int m_remove = 0;          // 0: one tenth of the non-dummy activities, at least 1
  int stagnation_threshold = 50;
  int construction_m = 0;    // 0: default_construction_m
  std::uint64_t seed = 1;
  std::uint64_t bnb_node_budget = 1'000'000;
  std::uint64_t max_decodes = 0;  // 0: unlimited; otherwise stop once reached

  // Optional instrumentation: one entry per iteration, 0 = kept current,
  // 1 = accepted an improvement, 2 = stagnation switch.
  std::vector<std::uint8_t>* acceptance_log = nullptr;
};

struct TraceRow {
  int iteration = 0;
  Time current = 0;
  Time best = 0;
};

struct RunReport {
  ActivityList best;
  Time best_makespan = 0;
  int best_iteration = 0;  // 0 when the construction was never improved
  int iterations_run = 0;
  std::uint64_t evaluations = 0;  // schedule decodes, including branch-and-bound nodes
  std::vector<TraceRow> trace;
};

inline int resolved_m_remove(int configured, const Instance& in) {
  if (configured != 0) return configured;
  return std::max(1, static_cast<int>(std::lround(in.real_count() / 10.0)));
}

inline int resolved_construction_m(int configured, const Instance& in) {
  if (configured != 0) return configured;
  return default_construction_m(in.real_count());
}

inline void check_search_config(const SearchConfig& cfg, const Instance& in) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (cfg.stagnation_threshold < 1)
    throw std::invalid_argument("stagnation_threshold must be positive");
  if (cfg.m_remove < 0 || cfg.m_remove > in.real_count())
    throw std::invalid_argument("m_remove must be between 0 and the non-dummy count");
  if (cfg.construction_m < 0 || cfg.construction_m > in.real_count())
    throw std::invalid_argument("construction_m must be between 0 and the non-dummy count");
}

/**
 * Removes a uniformly random m-subset of the non-dummy activities from the
 * list. Returns the remaining partial list (relative order preserved, so it
 * stays precedence-feasible) and the removed activities in uniformly random
 * order, ready for sequential reinsertion.
 */
inline std::pair<PartialList, std::vector<ActivityId>> remove_activities(const ActivityList& list,
                                                                         int m, const Instance& in,
                                                                         Rng& rng) {
  if (m < 1 || m > in.real_count())
    throw std::invalid_argument("removal count must be between 1 and the non-dummy count");

  std::vector<ActivityId> reals;
  reals.reserve(in.real_count());
  for (ActivityId a : list.order) {
    if (!in.is_dummy(a)) reals.push_back(a);
  }
  rng.shuffle_prefix(reals, m);
  std::vector<ActivityId> removed(reals.begin(), reals.begin() + m);

  PartialList partial(in.activity_count);
  std::vector<std::uint8_t> out(in.activity_count + 1, 0);
  for (ActivityId a : removed) out[a] = 1;
  partial.order.reserve(list.order.size() - m);
  for (ActivityId a : list.order) {
    if (!out[a]) {
      partial.order.push_back(a);
      partial.member[a] = 1;
    }
  }
  return {std::move(partial), std::move(removed)};
}

// Re-inserts one removed activity at a makespan-minimal feasible position
// (ties uniform); returns the decoded makespan of the extended partial list.
inline Time reinsert_best(PartialList& partial, ActivityId a, const Instance& in,
                          const PrecedenceClosure& closure, Rng& rng, DecodeWorkspace& ws,
                          std::vector<ActivityId>& scratch, std::uint64_t* decode_count = nullptr) {
  return detail::insert_at_best_position(partial, a, in, closure, rng, ws, scratch, decode_count);
}

inline Time reinsert_best(PartialList& partial, ActivityId a, const Instance& in,
                          const PrecedenceClosure& closure, Rng& rng) {
  DecodeWorkspace ws;
  std::vector<ActivityId> scratch;
  return reinsert_best(partial, a, in, closure, rng, ws, scratch, nullptr);
}

struct RarMove {
  ActivityList candidate;
  Time makespan = 0;
  std::vector<ActivityId> removed;  // sorted
};

/**
 * One remove-and-reinsert cycle: take out m activities, put each back at its
 * best position in the random removal order. The makespan of the last
 * reinsertion is the makespan of the complete candidate list.
 */
inline RarMove rar_iteration(const ActivityList& current, int m, const Instance& in,
                             const PrecedenceClosure& closure, Rng& rng, DecodeWorkspace& ws,
                             std::vector<ActivityId>& scratch,
                             std::uint64_t* decode_count = nullptr) {
  auto [partial, removed] = remove_activities(current, m, in, rng);
  Time makespan = 0;
  for (ActivityId a : removed) {
    makespan = reinsert_best(partial, a, in, closure, rng, ws, scratch, decode_count);
  }
  RarMove move;
  move.candidate.order = std::move(partial.order);
  move.makespan = makespan;
  move.removed = std::move(removed);
  std::sort(move.removed.begin(), move.removed.end());
  return move;
}

inline RarMove rar_iteration(const ActivityList& current, int m, const Instance& in,
                             const PrecedenceClosure& closure, Rng& rng) {
  DecodeWorkspace ws;
  std::vector<ActivityId> scratch;
  return rar_iteration(current, m, in, closure, rng, ws, scratch, nullptr);
}

/**
 * Remove-and-reinsert local search. Starts from the best-insertion
 * construction, then repeats the removal/reinsertion cycle: a strictly
 * better candidate replaces the current solution, an equal or worse one is
 * discarded — except that after `stagnation_threshold` consecutive
 * non-improving iterations the candidate is taken regardless, to force the
 * walk onto a different plateau. The best list ever seen is reported, not
 * the final one.
 */
inline RunReport rar_search(const Instance& in, const SearchConfig& cfg) {
  check_search_config(cfg, in);
  Rng rng(cfg.seed);
  const PrecedenceClosure closure = transitive_closure(in);
  const int m = resolved_m_remove(cfg.m_remove, in);

  RunReport report;
  ActivityList current = best_insertion_construct(
      in, closure, resolved_construction_m(cfg.construction_m, in), rng, cfg.bnb_node_budget,
      &report.evaluations);
  Time current_makespan = serial_sgs(current, in).makespan;
  ++report.evaluations;

  report.best = current;
  report.best_makespan = current_makespan;
  report.trace.reserve(cfg.max_iterations);

  DecodeWorkspace ws;
  std::vector<ActivityId> scratch;
  int non_improving = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (cfg.max_decodes != 0 && report.evaluations >= cfg.max_decodes) break;
    const RarMove move = rar_iteration(current, m, in, closure, rng, ws, scratch,
                                       &report.evaluations);
    std::uint8_t action = 0;
    if (move.makespan < current_makespan) {
      current = move.candidate;
      current_makespan = move.makespan;
      non_improving = 0;
      action = 1;
    } else if (++non_improving >= cfg.stagnation_threshold) {
      current = move.candidate;
      current_makespan = move.makespan;
      non_improving = 0;
      action = 2;
    }
    if (move.makespan < report.best_makespan) {
      report.best = move.candidate;
      report.best_makespan = move.makespan;
      report.best_iteration = it;
    }
    report.trace.push_back({it, current_makespan, report.best_makespan});
    if (cfg.acceptance_log) cfg.acceptance_log->push_back(action);
    report.iterations_run = it;
  }
  return report;
}

}  // namespace rcpsp
