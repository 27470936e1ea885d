#pragma once

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcpsp/instance.hpp"
#include "rcpsp/metaheuristics.hpp"
#include "rcpsp/rar.hpp"
#include "rcpsp/schedule.hpp"

namespace rcpsp {

enum class Algorithm { rar, tabu_mm, tabu_rar, sa_mm, sa_rar, hc_mm, hc_rar };

inline constexpr std::string_view kAlgorithmFlags[] = {"rar",   "tabu-mm", "tabu-rar", "sa-mm",
                                                       "sa-rar", "hc-mm",   "hc-rar"};

inline std::optional<Algorithm> algorithm_from_flag(std::string_view flag) {
  for (std::size_t i = 0; i < std::size(kAlgorithmFlags); ++i) {
    if (flag == kAlgorithmFlags[i]) return static_cast<Algorithm>(i);
  }
  return std::nullopt;
}

inline std::string_view algorithm_flag(Algorithm algorithm) {
  return kAlgorithmFlags[static_cast<int>(algorithm)];
}

// Row labels as they appear in published comparison tables; the plain
// remove-and-reinsert label carries the resolved removal count.
inline std::string algorithm_label(Algorithm algorithm, int m_remove = 0) {
  switch (algorithm) {
    case Algorithm::rar:
      return "Remove and Reinsert with " + std::to_string(m_remove) + " activities";
    case Algorithm::tabu_mm:
      return "Tabu search – MultiMove (MM)";
    case Algorithm::tabu_rar:
      return "Tabu search – Remove and reinsert (RAR)";
    case Algorithm::sa_mm:
      return "Simulated Annealing - MM";
    case Algorithm::sa_rar:
      return "Simulated Annealing - RAR";
    case Algorithm::hc_mm:
      return "Hill Climbing – MM";
    case Algorithm::hc_rar:
      return "Hill Climbing – RAR";
  }
  return {};
}

inline bool uses_multi_move(Algorithm algorithm) {
  return algorithm == Algorithm::tabu_mm || algorithm == Algorithm::sa_mm ||
         algorithm == Algorithm::hc_mm;
}

// One algorithm column of a benchmark: everything needed to run it on any
// instance. Zeros mean instance-dependent defaults.
struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::rar;
  int iterations = 3000;
  int m_remove = 0;
  int construction_m = 0;
  int stagnation_threshold = 50;
  int tenure_min = 10;
  int tenure_max = 15;
  double initial_temperature = 2.0;
  double cooling_ratio = 0.99;
  int samples_per_temperature = 100;
  int rar_candidate_pool = 5;
  std::uint64_t bnb_node_budget = 1'000'000;
  std::uint64_t max_decodes = 0;
};

inline RunReport run_algorithm(const Instance& in, const AlgorithmConfig& cfg,
                               std::uint64_t seed) {
  if (cfg.algorithm == Algorithm::rar) {
    SearchConfig search;
    search.max_iterations = cfg.iterations;
    search.m_remove = cfg.m_remove;
    search.stagnation_threshold = cfg.stagnation_threshold;
    search.construction_m = cfg.construction_m;
    search.seed = seed;
    search.bnb_node_budget = cfg.bnb_node_budget;
    search.max_decodes = cfg.max_decodes;
    return rar_search(in, search);
  }
  MetaConfig meta;
  meta.neighborhood =
      uses_multi_move(cfg.algorithm) ? Neighborhood::multi_move : Neighborhood::remove_reinsert;
  meta.iterations = cfg.iterations;
  meta.tenure_min = cfg.tenure_min;
  meta.tenure_max = cfg.tenure_max;
  meta.initial_temperature = cfg.initial_temperature;
  meta.cooling_ratio = cfg.cooling_ratio;
  meta.samples_per_temperature = cfg.samples_per_temperature;
  meta.m_remove = cfg.m_remove;
  meta.rar_candidate_pool = cfg.rar_candidate_pool;
  meta.construction_m = cfg.construction_m;
  meta.seed = seed;
  meta.bnb_node_budget = cfg.bnb_node_budget;
  meta.max_decodes = cfg.max_decodes;
  switch (cfg.algorithm) {
    case Algorithm::tabu_mm:
    case Algorithm::tabu_rar:
      return tabu_search(in, meta);
    case Algorithm::sa_mm:
    case Algorithm::sa_rar:
      return simulated_annealing(in, meta);
    default:
      return hill_climbing(in, meta);
  }
}

struct BenchmarkRow {
  std::string instance;
  std::string algorithm;
  Time best = 0;
  std::optional<int> best_known;
  int iterations = 0;
  std::uint64_t decodes = 0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kResultsHeader =
    "instance,algorithm,best,best_known,dev_pct,iterations,decodes,seconds,seed";

inline std::string format_dev_pct(Time best, int best_known) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f",
                100.0 * (best - best_known) / static_cast<double>(best_known));
  return buffer;
}

inline std::string format_benchmark_row(const BenchmarkRow& row) {
  std::ostringstream out;
  out << row.instance << ',' << row.algorithm << ',' << row.best << ',';
  if (row.best_known) out << *row.best_known;
  out << ',';
  if (row.best_known) out << format_dev_pct(row.best, *row.best_known);
  char seconds[32];
  std::snprintf(seconds, sizeof seconds, "%.3f", row.seconds);
  out << ',' << row.iterations << ',' << row.decodes << ',' << seconds << ',' << row.seed;
  return std::move(out).str();
}

/**
 * Reads a "name value" reference file mapping instance names to best-known
 * makespans. Blank lines are ignored; anything else that is not exactly two
 * columns with an integer second column is a ParseError naming the line.
 */
inline std::map<std::string, int> load_best_known(std::istream& input) {
  std::map<std::string, int> known;
  std::string line;
  int number = 0;
  while (std::getline(input, line)) {
    ++number;
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;  // blank line
    long long value = 0;
    std::string extra;
    if (!(fields >> value) || (fields >> extra)) {
      throw ParseError("best-known line " + std::to_string(number) +
                       ": expected \"name value\", got \"" + line + "\"");
    }
    known[name] = static_cast<int>(value);
  }
  return known;
}

inline std::map<std::string, int> load_best_known_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot read best-known file " + path);
  return load_best_known(file);
}

// One row per iteration of the run, ready for plotting cost against
// iteration count.
inline void emit_trace(const RunReport& report, std::ostream& out) {
  out << "iteration,current_cost,best_cost\n";
  for (const TraceRow& row : report.trace) {
    out << row.iteration << ',' << row.current << ',' << row.best << '\n';
  }
}

// Expands {instance}, {algorithm}, {seed} and {m} placeholders in a path
// template. {algorithm} uses the flag spelling (safe in file names), {m} the
// resolved removal count.
inline std::string render_template(std::string_view pattern, std::string_view instance,
                                   std::string_view algorithm, std::uint64_t seed, int m_remove) {
  std::string result(pattern);
  const auto substitute = [&result](std::string_view token, const std::string& value) {
    for (std::size_t at = result.find(token); at != std::string::npos;
         at = result.find(token, at + value.size())) {
      result.replace(at, token.size(), value);
    }
  };
  substitute("{instance}", std::string(instance));
  substitute("{algorithm}", std::string(algorithm));
  substitute("{seed}", std::to_string(seed));
  substitute("{m}", std::to_string(m_remove));
  return result;
}

/**
 * Expands a path argument that may contain shell-style wildcards in its
 * final component (*, ?, [...]); a plain path is returned as-is. Matches are
 * sorted; a wildcard matching nothing yields an empty list.
 */
inline std::vector<std::string> expand_instance_arg(const std::string& pattern) {
  if (pattern.find_first_of("*?[") == std::string::npos) return {pattern};
  const std::filesystem::path full(pattern);
  const std::filesystem::path directory =
      full.has_parent_path() ? full.parent_path() : std::filesystem::path(".");
  const std::string leaf = full.filename().string();
  std::vector<std::string> matches;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(leaf.c_str(), name.c_str(), 0) == 0) matches.push_back(entry.path().string());
  }
  std::sort(matches.begin(), matches.end());
  return matches;
}

struct BenchConfig {
  std::vector<std::string> instance_paths;
  std::vector<AlgorithmConfig> algorithms;
  std::vector<std::uint64_t> seeds;  // empty: 1..5
  std::string best_known_path;
  std::string out_path;            // empty: results go to stdout
  std::string trace_template;      // empty: no traces
  std::string schedule_template;   // empty: no schedule dumps
};

namespace detail {

inline bool write_rendered_file(const std::string& path, const std::string& contents,
                                std::ostream& log) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream file(path);
  if (!file) {
    log << "error: cannot write " << path << '\n';
    return false;
  }
  file << contents;
  file.flush();
  if (!file) {
    log << "error: write failed for " << path << '\n';
    return false;
  }
  return true;
}

}  // namespace detail

/**
 * Runs every (instance, algorithm, seed) triple in deterministic sorted
 * order, validates each best schedule before its row is written, and
 * appends rows to the results file (the header is written only when the
 * file starts empty, so successive invocations can build one table).
 * Failures are reported per triple on `log`; returns nonzero if any run
 * failed validation or I/O. A per-configuration minimum over the seeds is
 * logged at the end.
 */
inline int run_benchmark(const BenchConfig& cfg, std::ostream& log) {
  std::map<std::string, int> best_known;
  if (!cfg.best_known_path.empty()) {
    try {
      best_known = load_best_known_file(cfg.best_known_path);
    } catch (const std::exception& error) {
      log << "error: " << error.what() << '\n';
      return 1;
    }
  }

  struct Loaded {
    std::string name;
    Instance instance;
  };
  std::vector<Loaded> instances;
  for (const std::string& path : cfg.instance_paths) {
    std::ifstream file(path);
    if (!file) {
      log << "error: cannot read instance file " << path << '\n';
      return 1;
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const std::string name = std::filesystem::path(path).stem().string();
    try {
      instances.push_back({name, parse_psplib(buffer.str(), name)});
    } catch (const std::exception& error) {
      log << "error: " << path << ": " << error.what() << '\n';
      return 1;
    }
  }

  std::vector<std::uint64_t> seeds = cfg.seeds.empty()
                                         ? std::vector<std::uint64_t>{1, 2, 3, 4, 5}
                                         : cfg.seeds;
  std::sort(seeds.begin(), seeds.end());

  struct Triple {
    int instance_index;
    int config_index;
    std::uint64_t seed;
    std::string label;
    int m_remove;
  };
  std::vector<Triple> triples;
  for (int ii = 0; ii < static_cast<int>(instances.size()); ++ii) {
    for (int ci = 0; ci < static_cast<int>(cfg.algorithms.size()); ++ci) {
      const AlgorithmConfig& algorithm = cfg.algorithms[ci];
      const int m = resolved_m_remove(algorithm.m_remove, instances[ii].instance);
      const std::string label = algorithm_label(algorithm.algorithm, m);
      for (std::uint64_t seed : seeds) triples.push_back({ii, ci, seed, label, m});
    }
  }
  std::sort(triples.begin(), triples.end(), [&](const Triple& a, const Triple& b) {
    const std::string& name_a = instances[a.instance_index].name;
    const std::string& name_b = instances[b.instance_index].name;
    return std::tie(name_a, a.label, a.seed) < std::tie(name_b, b.label, b.seed);
  });

  std::ofstream out_file;
  std::ostream* out = &std::cout;
  bool need_header = true;
  if (!cfg.out_path.empty()) {
    const std::filesystem::path parent = std::filesystem::path(cfg.out_path).parent_path();
    if (!parent.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(parent, ec);
    }
    std::error_code ec;
    need_header = !std::filesystem::exists(cfg.out_path, ec) ||
                  std::filesystem::file_size(cfg.out_path, ec) == 0;
    out_file.open(cfg.out_path, std::ios::app);
    if (!out_file) {
      log << "error: cannot open results file " << cfg.out_path << '\n';
      return 1;
    }
    out = &out_file;
  }
  if (need_header) *out << kResultsHeader << '\n';

  int status = 0;
  std::map<std::pair<std::string, std::string>, Time> group_minimum;
  for (const Triple& triple : triples) {
    const Loaded& loaded = instances[triple.instance_index];
    const AlgorithmConfig& algorithm = cfg.algorithms[triple.config_index];

    RunReport report;
    double seconds = 0.0;
    try {
      const auto started = std::chrono::steady_clock::now();
      report = run_algorithm(loaded.instance, algorithm, triple.seed);
      seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    } catch (const std::exception& error) {
      log << "error: " << loaded.name << " / " << triple.label << " / seed " << triple.seed
          << ": " << error.what() << '\n';
      status = 1;
      continue;
    }

    const Schedule schedule = serial_sgs(report.best, loaded.instance);
    const std::vector<Violation> violations = validate_schedule(loaded.instance, schedule);
    if (!violations.empty()) {
      log << "validation failure: " << loaded.name << " / " << triple.label << " / seed "
          << triple.seed << ": " << violations.front().describe() << '\n';
      status = 1;
      continue;
    }

    BenchmarkRow row;
    row.instance = loaded.name;
    row.algorithm = triple.label;
    row.best = report.best_makespan;
    if (const auto found = best_known.find(loaded.name); found != best_known.end()) {
      row.best_known = found->second;
    }
    row.iterations = report.iterations_run;
    row.decodes = report.evaluations;
    row.seconds = seconds;
    row.seed = triple.seed;
    *out << format_benchmark_row(row) << '\n';

    const auto key = std::make_pair(loaded.name, triple.label);
    const auto current = group_minimum.find(key);
    if (current == group_minimum.end() || report.best_makespan < current->second) {
      group_minimum[key] = report.best_makespan;
    }

    const std::string_view flag = algorithm_flag(algorithm.algorithm);
    if (!cfg.trace_template.empty()) {
      const std::string path =
          render_template(cfg.trace_template, loaded.name, flag, triple.seed, triple.m_remove);
      std::ostringstream trace;
      emit_trace(report, trace);
      if (!detail::write_rendered_file(path, std::move(trace).str(), log)) status = 1;
    }
    if (!cfg.schedule_template.empty()) {
      const std::string path = render_template(cfg.schedule_template, loaded.name, flag,
                                               triple.seed, triple.m_remove);
      if (!detail::write_rendered_file(path, format_schedule(schedule, loaded.instance), log)) {
        status = 1;
      }
    }
  }

  out->flush();
  if (out_file.is_open() && !out_file) {
    log << "error: write failed for " << cfg.out_path << '\n';
    status = 1;
  }
  for (const auto& [key, makespan] : group_minimum) {
    log << "min: " << key.first << " / " << key.second << " = " << makespan << '\n';
  }
  return status;
}

}  // namespace rcpsp
