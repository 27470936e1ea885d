#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcpsp/closure.hpp"
#include "rcpsp/construction.hpp"
#include "rcpsp/instance.hpp"
#include "rcpsp/rar.hpp"
#include "rcpsp/rng.hpp"
#include "rcpsp/schedule.hpp"

namespace rcpsp {

enum class Neighborhood { multi_move, remove_reinsert };

// Exchange of the activities at list positions p < q; i and j are the
// activities occupying those positions before the swap.
struct SwapMove {
  ActivityId i = 0;
  ActivityId j = 0;
  int p = 0;
  int q = 0;
};

struct MetaConfig {
  Neighborhood neighborhood = Neighborhood::multi_move;
  int iterations = 3000;
  int tenure_min = 10;
  int tenure_max = 15;
  double initial_temperature = 2.0;
  double cooling_ratio = 0.99;
  int samples_per_temperature = 100;
  int m_remove = 0;           // 0: one tenth of the non-dummy activities, at least 1
  int rar_candidate_pool = 5; // remove-and-reinsert candidates sampled per iteration
  int construction_m = 0;     // 0: default_construction_m
  std::uint64_t seed = 1;
  std::uint64_t bnb_node_budget = 1'000'000;
  std::uint64_t max_decodes = 0;  // 0: unlimited

  // Optional instrumentation: every tenure drawn by tabu_search.
  std::vector<int>* tenure_log = nullptr;
};

inline void check_meta_config(const MetaConfig& cfg, const Instance& in) {
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (cfg.tenure_min < 0 || cfg.tenure_min > cfg.tenure_max)
    throw std::invalid_argument("tabu tenure bounds must satisfy 0 <= min <= max");
  if (!(cfg.initial_temperature > 0.0))
    throw std::invalid_argument("initial temperature must be positive");
  if (!(cfg.cooling_ratio > 0.0 && cfg.cooling_ratio < 1.0))
    throw std::invalid_argument("cooling ratio must lie strictly between 0 and 1");
  if (cfg.samples_per_temperature < 1)
    throw std::invalid_argument("samples per temperature must be positive");
  if (cfg.m_remove < 0 || cfg.m_remove > in.real_count())
    throw std::invalid_argument("m_remove must be between 0 and the non-dummy count");
  if (cfg.rar_candidate_pool < 1)
    throw std::invalid_argument("candidate pool size must be positive");
  if (cfg.construction_m < 0 || cfg.construction_m > in.real_count())
    throw std::invalid_argument("construction_m must be between 0 and the non-dummy count");
}

namespace detail {

// A swap of positions p < q keeps the list precedence-feasible iff the
// activity at q has no transitive predecessor in positions p..q-1 and the
// activity at p has no transitive successor in positions p+1..q.
inline bool swap_is_legal(const std::vector<ActivityId>& order, int p, int q,
                          const PrecedenceClosure& closure) {
  const ActivityId a = order[p];
  const ActivityId b = order[q];
  for (int x = p + 1; x <= q; ++x) {
    if (closure.is_succ(order[x], a)) return false;
  }
  for (int x = p; x < q; ++x) {
    if (closure.is_pred(order[x], b)) return false;
  }
  return true;
}

}  // namespace detail

/**
 * All position pairs whose exchange keeps the list precedence-feasible. The
 * dummies stay pinned at the ends, so only positions 1..L-2 take part. Moves
 * come out in lexicographic (p, q) order.
 */
inline std::vector<SwapMove> swap_neighborhood(const ActivityList& list,
                                               const PrecedenceClosure& closure) {
  const int size = static_cast<int>(list.order.size());
  std::vector<SwapMove> moves;
  for (int p = 1; p <= size - 2; ++p) {
    const ActivityId a = list.order[p];
    for (int q = p + 1; q <= size - 2; ++q) {
      const ActivityId b = list.order[q];
      // Once a transitive successor of a appears at q, every wider pair
      // (p, q') would move a past it as well.
      if (closure.is_succ(b, a)) break;
      bool legal = true;
      for (int x = p; x < q; ++x) {
        if (closure.is_pred(list.order[x], b)) {
          legal = false;
          break;
        }
      }
      if (legal) moves.push_back({a, b, p, q});
    }
  }
  return moves;
}

// Metropolis rule: non-worsening moves always pass, a worsening one with
// probability exp(-delta / temperature).
inline bool sa_accept(Time delta, double temperature, Rng& rng) {
  if (delta <= 0) return true;
  if (temperature <= 0.0) return false;
  return rng.unit() < std::exp(-static_cast<double>(delta) / temperature);
}

// Temperature in effect for the given 0-based sampled-move index: the start
// value decays by the cooling ratio every samples_per_temperature moves.
inline double annealing_temperature(const MetaConfig& cfg, int move_index) {
  const int level = move_index / cfg.samples_per_temperature;
  return cfg.initial_temperature * std::pow(cfg.cooling_ratio, level);
}

namespace detail {

struct DriverState {
  Rng rng;
  PrecedenceClosure closure;
  ActivityList current;
  Time current_makespan = 0;
  RunReport report;
  DecodeWorkspace ws;
  std::vector<ActivityId> scratch;
};

inline DriverState init_driver(const Instance& in, const MetaConfig& cfg) {
  DriverState st{Rng(cfg.seed), transitive_closure(in)};
  st.current = best_insertion_construct(in, st.closure,
                                        resolved_construction_m(cfg.construction_m, in), st.rng,
                                        cfg.bnb_node_budget, &st.report.evaluations);
  st.current_makespan = serial_sgs(st.current, in).makespan;
  ++st.report.evaluations;
  st.report.best = st.current;
  st.report.best_makespan = st.current_makespan;
  st.report.trace.reserve(cfg.iterations);
  return st;
}

inline void record_iteration(DriverState& st, int iteration) {
  st.report.trace.push_back({iteration, st.current_makespan, st.report.best_makespan});
  st.report.iterations_run = iteration;
}

inline void note_best(DriverState& st, const ActivityList& candidate, Time makespan,
                      int iteration) {
  if (makespan < st.report.best_makespan) {
    st.report.best = candidate;
    st.report.best_makespan = makespan;
    st.report.best_iteration = iteration;
  }
}

inline void fill_flat(DriverState& st, int from_iteration, int to_iteration) {
  for (int it = from_iteration; it <= to_iteration; ++it) record_iteration(st, it);
}

inline Time swapped_makespan(DriverState& st, const Instance& in, const SwapMove& move) {
  std::swap(st.current.order[move.p], st.current.order[move.q]);
  const Time mk = decode_partial(st.current.order, in, st.closure, st.ws);
  std::swap(st.current.order[move.p], st.current.order[move.q]);
  ++st.report.evaluations;
  return mk;
}

inline std::uint64_t swap_attribute(ActivityId i, ActivityId j) {
  const auto [lo, hi] = std::minmax(i, j);
  return (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint32_t>(lo);
}

// FNV-1a over the sorted removed-activity set.
inline std::uint64_t removal_attribute(const std::vector<ActivityId>& sorted_removed) {
  std::uint64_t h = 1469598103934665603ull;
  for (ActivityId a : sorted_removed) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (static_cast<std::uint32_t>(a) >> shift) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline bool tabu_expired(const std::unordered_map<std::uint64_t, int>& tabu_until,
                         std::uint64_t attribute, int iteration) {
  const auto entry = tabu_until.find(attribute);
  return entry == tabu_until.end() || iteration > entry->second;
}

// Uniform draw over unordered position pairs, retried until one is legal;
// falls back to enumerating the neighborhood when rejection sampling keeps
// missing (e.g. nearly-chain projects where few pairs commute).
inline std::optional<SwapMove> draw_random_swap(DriverState& st) {
  const auto& order = st.current.order;
  const int lo = 1;
  const int hi = static_cast<int>(order.size()) - 2;
  if (hi - lo + 1 < 2) return std::nullopt;
  const int attempts = 8 * (hi - lo + 1);
  for (int t = 0; t < attempts; ++t) {
    int p = st.rng.range(lo, hi);
    int q = st.rng.range(lo, hi);
    if (p == q) continue;
    if (p > q) std::swap(p, q);
    if (swap_is_legal(order, p, q, st.closure)) return SwapMove{order[p], order[q], p, q};
  }
  const std::vector<SwapMove> all = swap_neighborhood(st.current, st.closure);
  if (all.empty()) return std::nullopt;
  return all[st.rng.index(static_cast<int>(all.size()))];
}

}  // namespace detail

/**
 * Best-admissible-neighbor tabu search. Each iteration evaluates the full
 * swap neighborhood (or a sampled pool of remove-and-reinsert cycles), takes
 * the best candidate whose attribute is not tabu — a tabu one is still
 * admitted when it beats the global best — and forbids the chosen attribute
 * for a tenure drawn uniformly from [tenure_min, tenure_max]. When every
 * candidate is tabu and none aspires, the best overall is taken anyway.
 */
inline RunReport tabu_search(const Instance& in, const MetaConfig& cfg) {
  check_meta_config(cfg, in);
  detail::DriverState st = detail::init_driver(in, cfg);
  const int m = resolved_m_remove(cfg.m_remove, in);
  std::unordered_map<std::uint64_t, int> tabu_until;

  struct Candidate {
    Time makespan;
    std::uint64_t attribute;
    int index;
  };
  std::vector<Candidate> candidates;
  std::vector<RarMove> pool;
  std::vector<int> picks;

  for (int it = 1; it <= cfg.iterations; ++it) {
    if (cfg.max_decodes != 0 && st.report.evaluations >= cfg.max_decodes) break;

    candidates.clear();
    std::vector<SwapMove> moves;
    pool.clear();
    if (cfg.neighborhood == Neighborhood::multi_move) {
      moves = swap_neighborhood(st.current, st.closure);
      if (moves.empty()) {
        detail::fill_flat(st, it, cfg.iterations);
        break;
      }
      for (int idx = 0; idx < static_cast<int>(moves.size()); ++idx) {
        const Time mk = detail::swapped_makespan(st, in, moves[idx]);
        candidates.push_back({mk, detail::swap_attribute(moves[idx].i, moves[idx].j), idx});
      }
    } else {
      for (int idx = 0; idx < cfg.rar_candidate_pool; ++idx) {
        pool.push_back(rar_iteration(st.current, m, in, st.closure, st.rng, st.ws, st.scratch,
                                     &st.report.evaluations));
        candidates.push_back({pool.back().makespan, detail::removal_attribute(pool.back().removed),
                              idx});
      }
    }

    // Best admissible candidate, ties broken uniformly; if everything is
    // tabu without aspiring, fall back to the best candidate overall.
    picks.clear();
    Time pick_makespan = 0;
    for (bool admissible_only : {true, false}) {
      for (const Candidate& c : candidates) {
        if (admissible_only && !detail::tabu_expired(tabu_until, c.attribute, it) &&
            c.makespan >= st.report.best_makespan) {
          continue;
        }
        if (picks.empty() || c.makespan < pick_makespan) {
          pick_makespan = c.makespan;
          picks.assign(1, c.index);
        } else if (c.makespan == pick_makespan) {
          picks.push_back(c.index);
        }
      }
      if (!picks.empty()) break;
    }
    const int chosen = picks[st.rng.index(static_cast<int>(picks.size()))];

    std::uint64_t attribute = 0;
    if (cfg.neighborhood == Neighborhood::multi_move) {
      const SwapMove& move = moves[chosen];
      std::swap(st.current.order[move.p], st.current.order[move.q]);
      attribute = detail::swap_attribute(move.i, move.j);
    } else {
      st.current = pool[chosen].candidate;
      attribute = detail::removal_attribute(pool[chosen].removed);
    }
    st.current_makespan = pick_makespan;
    const int tenure = st.rng.range(cfg.tenure_min, cfg.tenure_max);
    if (cfg.tenure_log) cfg.tenure_log->push_back(tenure);
    tabu_until[attribute] = it + tenure;

    detail::note_best(st, st.current, st.current_makespan, it);
    detail::record_iteration(st, it);
  }
  return std::move(st.report);
}

/**
 * Simulated annealing: each iteration draws one uniformly random neighbor
 * and accepts it by the Metropolis rule; the temperature starts at
 * initial_temperature and is multiplied by cooling_ratio after every
 * samples_per_temperature draws.
 */
inline RunReport simulated_annealing(const Instance& in, const MetaConfig& cfg) {
  check_meta_config(cfg, in);
  detail::DriverState st = detail::init_driver(in, cfg);
  const int m = resolved_m_remove(cfg.m_remove, in);

  for (int it = 1; it <= cfg.iterations; ++it) {
    if (cfg.max_decodes != 0 && st.report.evaluations >= cfg.max_decodes) break;
    const double temperature = annealing_temperature(cfg, it - 1);

    if (cfg.neighborhood == Neighborhood::multi_move) {
      const std::optional<SwapMove> move = detail::draw_random_swap(st);
      if (!move) {
        detail::fill_flat(st, it, cfg.iterations);
        break;
      }
      const Time mk = detail::swapped_makespan(st, in, *move);
      if (sa_accept(mk - st.current_makespan, temperature, st.rng)) {
        std::swap(st.current.order[move->p], st.current.order[move->q]);
        st.current_makespan = mk;
        detail::note_best(st, st.current, mk, it);
      }
    } else {
      const RarMove move = rar_iteration(st.current, m, in, st.closure, st.rng, st.ws, st.scratch,
                                         &st.report.evaluations);
      if (sa_accept(move.makespan - st.current_makespan, temperature, st.rng)) {
        st.current = move.candidate;
        st.current_makespan = move.makespan;
        detail::note_best(st, st.current, move.makespan, it);
      }
    }
    detail::record_iteration(st, it);
  }
  return std::move(st.report);
}

/**
 * Randomized hill climbing: move to a neighbor drawn uniformly from the
 * strictly improving ones. With the swap neighborhood the search stops at a
 * local optimum and the remaining trace rows stay flat; with the sampled
 * remove-and-reinsert neighborhood a barren pool only wastes the iteration,
 * since a later pool may still improve.
 */
inline RunReport hill_climbing(const Instance& in, const MetaConfig& cfg) {
  check_meta_config(cfg, in);
  detail::DriverState st = detail::init_driver(in, cfg);
  const int m = resolved_m_remove(cfg.m_remove, in);
  std::vector<int> improving;

  for (int it = 1; it <= cfg.iterations; ++it) {
    if (cfg.max_decodes != 0 && st.report.evaluations >= cfg.max_decodes) break;

    if (cfg.neighborhood == Neighborhood::multi_move) {
      const std::vector<SwapMove> moves = swap_neighborhood(st.current, st.closure);
      improving.clear();
      std::vector<Time> makespans(moves.size());
      for (int idx = 0; idx < static_cast<int>(moves.size()); ++idx) {
        makespans[idx] = detail::swapped_makespan(st, in, moves[idx]);
        if (makespans[idx] < st.current_makespan) improving.push_back(idx);
      }
      if (improving.empty()) {
        detail::fill_flat(st, it, cfg.iterations);
        break;
      }
      const int chosen = improving[st.rng.index(static_cast<int>(improving.size()))];
      std::swap(st.current.order[moves[chosen].p], st.current.order[moves[chosen].q]);
      st.current_makespan = makespans[chosen];
    } else {
      std::vector<RarMove> pool;
      pool.reserve(cfg.rar_candidate_pool);
      improving.clear();
      for (int idx = 0; idx < cfg.rar_candidate_pool; ++idx) {
        pool.push_back(rar_iteration(st.current, m, in, st.closure, st.rng, st.ws, st.scratch,
                                     &st.report.evaluations));
        if (pool.back().makespan < st.current_makespan) improving.push_back(idx);
      }
      if (improving.empty()) {
        detail::record_iteration(st, it);
        continue;
      }
      const int chosen = improving[st.rng.index(static_cast<int>(improving.size()))];
      st.current = pool[chosen].candidate;
      st.current_makespan = pool[chosen].makespan;
    }
    detail::note_best(st, st.current, st.current_makespan, it);
    detail::record_iteration(st, it);
  }
  return std::move(st.report);
}

}  // namespace rcpsp
