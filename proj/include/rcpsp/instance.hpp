#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rcpsp {

// Activity identifiers are 1-based, matching PSPLIB files: activity 1 is the
// dummy source, activity `activity_count` the dummy sink. Index 0 of the
// per-activity vectors is unused.
using ActivityId = int;
using Time = int;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * An immutable single-mode RCPSP instance: n activities (two of them dummies)
 * with integer durations, per-resource demands, renewable resource
 * capacities, and an acyclic direct-precedence relation with a unique source
 * and a unique sink.
 */
struct Instance {
  std::string name;
  int activity_count = 0;  // includes both dummies, as in the PSPLIB jobs field
  int resource_count = 0;
  Time horizon = 0;
  std::vector<Time> durations;                      // [1..n]
  std::vector<std::vector<int>> demands;            // [1..n][0..r-1]
  std::vector<int> capacities;                      // [0..r-1]
  std::vector<std::vector<ActivityId>> successors;  // direct, sorted ascending
  std::vector<std::vector<ActivityId>> predecessors;  // derived from successors

  int real_count() const { return activity_count - 2; }
  ActivityId source() const { return 1; }
  ActivityId sink() const { return activity_count; }
  bool is_dummy(ActivityId a) const { return a == 1 || a == activity_count; }

  // Safe time bound for any serial placement: no activity ever needs to
  // start at or beyond the sum of all durations.
  Time duration_sum() const {
    Time total = 0;
    for (ActivityId a = 1; a <= activity_count; ++a) total += durations[a];
    return total;
  }
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail

// Topological order of all activities, or an empty vector if the precedence
// graph has a cycle. Kahn's algorithm; ties broken by ascending id.
inline std::vector<ActivityId> topological_order(const Instance& in) {
  const int n = in.activity_count;
  std::vector<int> pending(n + 1, 0);
  for (ActivityId a = 1; a <= n; ++a) {
    for (ActivityId s : in.successors[a]) ++pending[s];
  }
  std::vector<ActivityId> ready;
  for (ActivityId a = 1; a <= n; ++a) {
    if (pending[a] == 0) ready.push_back(a);
  }
  std::vector<ActivityId> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), std::greater<>());
    const ActivityId a = ready.back();
    ready.pop_back();
    order.push_back(a);
    for (ActivityId s : in.successors[a]) {
      if (--pending[s] == 0) {
        ready.push_back(s);
        std::push_heap(ready.begin(), ready.end(), std::greater<>());
      }
    }
  }
  if (static_cast<int>(order.size()) != n) return {};
  return order;
}

// Checks every Instance invariant; throws std::invalid_argument naming the
// first violation. Dummies must be activities 1 and n with zero duration and
// zero demands, the graph must be a DAG with unique source/sink, and no
// single demand may exceed its capacity.
inline void check_instance(const Instance& in) {
  using detail::require;
  const int n = in.activity_count;
  require(n >= 2, "instance needs at least the two dummy activities");
  require(in.resource_count >= 0, "negative resource count");
  require(in.horizon >= 1, "horizon must be positive");
  require(static_cast<int>(in.durations.size()) == n + 1, "durations size mismatch");
  require(static_cast<int>(in.demands.size()) == n + 1, "demands size mismatch");
  require(static_cast<int>(in.successors.size()) == n + 1, "successors size mismatch");
  require(static_cast<int>(in.predecessors.size()) == n + 1, "predecessors size mismatch");
  require(static_cast<int>(in.capacities.size()) == in.resource_count, "capacities size mismatch");
  for (int k = 0; k < in.resource_count; ++k) {
    require(in.capacities[k] >= 1, "capacity of resource " + std::to_string(k + 1) + " must be positive");
  }
  for (ActivityId a = 1; a <= n; ++a) {
    require(in.durations[a] >= 0, "negative duration of activity " + std::to_string(a));
    require(static_cast<int>(in.demands[a].size()) == in.resource_count,
            "demand row size mismatch at activity " + std::to_string(a));
    for (int k = 0; k < in.resource_count; ++k) {
      require(in.demands[a][k] >= 0, "negative demand of activity " + std::to_string(a));
      require(in.demands[a][k] <= in.capacities[k],
              "activity " + std::to_string(a) + " demands " + std::to_string(in.demands[a][k]) +
                  " of resource " + std::to_string(k + 1) + ", capacity is " +
                  std::to_string(in.capacities[k]));
    }
    for (ActivityId s : in.successors[a]) {
      require(s >= 1 && s <= n && s != a, "successor id out of range at activity " + std::to_string(a));
    }
  }
  for (ActivityId d : {in.source(), in.sink()}) {
    require(in.durations[d] == 0, "dummy activity " + std::to_string(d) + " has nonzero duration");
    for (int k = 0; k < in.resource_count; ++k) {
      require(in.demands[d][k] == 0, "dummy activity " + std::to_string(d) + " has nonzero demand");
    }
  }
  require(in.successors[in.sink()].empty(), "dummy sink has successors");
  require(in.predecessors[in.source()].empty(), "dummy source has predecessors");
  for (ActivityId a = 2; a <= n; ++a) {
    require(!in.predecessors[a].empty(),
            "activity " + std::to_string(a) + " has no predecessor; source is not unique");
  }
  for (ActivityId a = 1; a < n; ++a) {
    require(!in.successors[a].empty(),
            "activity " + std::to_string(a) + " has no successor; sink is not unique");
  }
  require(!topological_order(in).empty(), "precedence graph has a cycle");
}

// Derives predecessor lists from successors, sorts both, and validates.
// Builders (parser, tests, generators) fill successors only and finish here.
inline Instance finalize_instance(Instance in) {
  const int n = in.activity_count;
  in.predecessors.assign(n + 1, {});
  for (ActivityId a = 1; a <= n; ++a) {
    std::sort(in.successors[a].begin(), in.successors[a].end());
    for (ActivityId s : in.successors[a]) {
      if (s >= 1 && s <= n) in.predecessors[s].push_back(a);
    }
  }
  for (ActivityId a = 1; a <= n; ++a) {
    std::sort(in.predecessors[a].begin(), in.predecessors[a].end());
  }
  check_instance(in);
  return in;
}

namespace detail {

struct PsplibCursor {
  std::vector<std::string> lines;
  int next = 0;  // 0-based index of the next unread line

  bool done() const { return next >= static_cast<int>(lines.size()); }

  [[noreturn]] void fail(int line_index, const std::string& what) const {
    throw ParseError("line " + std::to_string(line_index + 1) + ": " + what);
  }
};

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(begin, end - begin));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    begin = end + 1;
  }
  return lines;
}

inline bool is_separator(const std::string& line) {
  for (char c : line) {
    if (c != '*' && c != '-' && c != ' ' && c != '\t') return false;
  }
  return true;  // blank lines and ***/--- rules
}

// All whitespace-separated integer tokens of a line; non-numeric tokens stop
// the scan (column headers mix words and digits, data rows are all-numeric).
inline bool parse_int_row(const std::string& line, std::vector<long long>& out) {
  out.clear();
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) {
    try {
      std::size_t used = 0;
      long long value = std::stoll(token, &used);
      if (used != token.size()) return false;
      out.push_back(value);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

// First integer appearing after the last ':' of the line, for header fields
// such as "jobs (incl. supersource/sink ):  92".
inline long long header_value(const PsplibCursor& cur, int line_index) {
  const std::string& line = cur.lines[line_index];
  const std::size_t colon = line.rfind(':');
  const std::string tail = colon == std::string::npos ? line : line.substr(colon + 1);
  std::istringstream stream(tail);
  long long value = 0;
  if (!(stream >> value)) cur.fail(line_index, "expected an integer value in header field");
  return value;
}

inline std::string lstripped(const std::string& line) {
  const std::size_t pos = line.find_first_not_of(" \t");
  return pos == std::string::npos ? std::string() : line.substr(pos);
}

}  // namespace detail

/**
 * Parses the PSPLIB single-mode (.sm) text format. Needs the jobs/horizon
 * header, the renewable-resource count, and the "PRECEDENCE RELATIONS:",
 * "REQUESTS/DURATIONS:" and "RESOURCEAVAILABILITIES" sections; other header
 * fields are free text and ignored. Whitespace is not significant.
 * Throws ParseError naming the offending line.
 */
inline Instance parse_psplib(std::string_view text, std::string name = {}) {
  using detail::header_value;
  using detail::lstripped;
  using detail::parse_int_row;
  detail::PsplibCursor cur{detail::split_lines(text), 0};

  Instance in;
  in.name = std::move(name);
  int jobs_line = -1, horizon_line = -1, renewable_line = -1;
  int precedence_line = -1, requests_line = -1, availabilities_line = -1;
  for (int i = 0; i < static_cast<int>(cur.lines.size()); ++i) {
    const std::string head = lstripped(cur.lines[i]);
    if (jobs_line < 0 && head.rfind("jobs", 0) == 0) jobs_line = i;
    if (horizon_line < 0 && head.rfind("horizon", 0) == 0) horizon_line = i;
    if (renewable_line < 0 && head.rfind("- renewable", 0) == 0) renewable_line = i;
    if (precedence_line < 0 && head.rfind("PRECEDENCE RELATIONS", 0) == 0) precedence_line = i;
    if (requests_line < 0 && head.rfind("REQUESTS/DURATIONS", 0) == 0) requests_line = i;
    if (availabilities_line < 0 && head.rfind("RESOURCEAVAILABILITIES", 0) == 0)
      availabilities_line = i;
  }
  if (jobs_line < 0) throw ParseError("missing \"jobs\" header line");
  if (horizon_line < 0) throw ParseError("missing \"horizon\" header line");
  if (renewable_line < 0) throw ParseError("missing \"- renewable\" resource count line");
  if (precedence_line < 0) throw ParseError("missing \"PRECEDENCE RELATIONS:\" section");
  if (requests_line < 0) throw ParseError("missing \"REQUESTS/DURATIONS:\" section");
  if (availabilities_line < 0) throw ParseError("missing \"RESOURCEAVAILABILITIES:\" section");
  if (!(precedence_line < requests_line && requests_line < availabilities_line))
    throw ParseError("sections out of order");

  const long long jobs = header_value(cur, jobs_line);
  if (jobs < 2 || jobs > 100000) cur.fail(jobs_line, "implausible jobs count");
  const long long horizon = header_value(cur, horizon_line);
  if (horizon < 1) cur.fail(horizon_line, "horizon must be positive");
  const long long renewables = header_value(cur, renewable_line);
  if (renewables < 0 || renewables > 1000) cur.fail(renewable_line, "implausible resource count");

  const int n = static_cast<int>(jobs);
  in.activity_count = n;
  in.resource_count = static_cast<int>(renewables);
  in.horizon = static_cast<Time>(horizon);
  in.durations.assign(n + 1, 0);
  in.demands.assign(n + 1, std::vector<int>(in.resource_count, 0));
  in.successors.assign(n + 1, {});

  std::vector<long long> row;

  // PRECEDENCE RELATIONS: one row per job: jobnr #modes #successors succ...
  int line = precedence_line + 1;
  for (int job = 1; job <= n; ++job) {
    while (line < requests_line &&
           (detail::is_separator(cur.lines[line]) || !parse_int_row(cur.lines[line], row))) {
      ++line;
    }
    if (line >= requests_line)
      throw ParseError("PRECEDENCE RELATIONS: expected " + std::to_string(n) +
                       " rows, found " + std::to_string(job - 1));
    if (row.size() < 3) cur.fail(line, "precedence row needs jobnr, #modes, #successors");
    if (row[0] != job)
      cur.fail(line, "inconsistent job count: expected job " + std::to_string(job) + ", got " +
                         std::to_string(row[0]));
    const long long successor_count = row[2];
    if (successor_count < 0 || static_cast<long long>(row.size()) != 3 + successor_count)
      cur.fail(line, "expected " + std::to_string(successor_count) + " successors, got " +
                         std::to_string(row.size() - 3));
    for (std::size_t s = 3; s < row.size(); ++s) {
      if (row[s] < 1 || row[s] > n) cur.fail(line, "successor id out of range");
      in.successors[job].push_back(static_cast<ActivityId>(row[s]));
    }
    ++line;
  }

  // REQUESTS/DURATIONS: one row per job: jobnr mode duration demand[1..r]
  line = requests_line + 1;
  for (int job = 1; job <= n; ++job) {
    while (line < availabilities_line &&
           (detail::is_separator(cur.lines[line]) || !parse_int_row(cur.lines[line], row))) {
      ++line;
    }
    if (line >= availabilities_line)
      throw ParseError("REQUESTS/DURATIONS: expected " + std::to_string(n) + " rows, found " +
                       std::to_string(job - 1));
    if (static_cast<int>(row.size()) != 3 + in.resource_count)
      cur.fail(line, "expected jobnr, mode, duration and " + std::to_string(in.resource_count) +
                         " demands");
    if (row[0] != job)
      cur.fail(line, "inconsistent job count: expected job " + std::to_string(job) + ", got " +
                         std::to_string(row[0]));
    if (row[2] < 0) cur.fail(line, "negative duration");
    in.durations[job] = static_cast<Time>(row[2]);
    for (int k = 0; k < in.resource_count; ++k) {
      if (row[3 + k] < 0) cur.fail(line, "negative demand");
      in.demands[job][k] = static_cast<int>(row[3 + k]);
    }
    ++line;
  }

  // RESOURCEAVAILABILITIES: one all-numeric row with r capacities.
  line = availabilities_line + 1;
  while (line < static_cast<int>(cur.lines.size()) &&
         (detail::is_separator(cur.lines[line]) || !parse_int_row(cur.lines[line], row))) {
    ++line;
  }
  if (in.resource_count > 0) {
    if (line >= static_cast<int>(cur.lines.size()))
      throw ParseError("RESOURCEAVAILABILITIES: missing capacity row");
    if (static_cast<int>(row.size()) != in.resource_count)
      cur.fail(line, "expected " + std::to_string(in.resource_count) + " capacities, got " +
                         std::to_string(row.size()));
    in.capacities.assign(in.resource_count, 0);
    for (int k = 0; k < in.resource_count; ++k) {
      in.capacities[k] = static_cast<int>(row[k]);
    }
  }

  try {
    return finalize_instance(std::move(in));
  } catch (const std::invalid_argument& error) {
    throw ParseError(std::string("invalid instance: ") + error.what());
  }
}

// Writes the canonical .sm layout parse_psplib reads back; logical content
// (counts, durations, demands, successors, capacities) round-trips exactly.
inline std::string write_psplib(const Instance& in) {
  std::ostringstream out;
  const std::string rule(72, '*');
  out << rule << '\n';
  out << "file with basedata            : NONE\n";
  out << "initial value random generator: 0\n";
  out << rule << '\n';
  out << "projects                      :  1\n";
  out << "jobs (incl. supersource/sink ):  " << in.activity_count << '\n';
  out << "horizon                       :  " << in.horizon << '\n';
  out << "RESOURCES\n";
  out << "  - renewable                 :  " << in.resource_count << "   R\n";
  out << "  - nonrenewable              :  0   N\n";
  out << "  - doubly constrained        :  0   D\n";
  out << rule << '\n';
  out << "PRECEDENCE RELATIONS:\n";
  out << "jobnr.    #modes  #successors   successors\n";
  for (ActivityId a = 1; a <= in.activity_count; ++a) {
    out << "  " << a << "  1  " << in.successors[a].size();
    for (ActivityId s : in.successors[a]) out << "  " << s;
    out << '\n';
  }
  out << rule << '\n';
  out << "REQUESTS/DURATIONS:\n";
  out << "jobnr. mode duration";
  for (int k = 0; k < in.resource_count; ++k) out << "  R " << k + 1;
  out << '\n' << std::string(72, '-') << '\n';
  for (ActivityId a = 1; a <= in.activity_count; ++a) {
    out << "  " << a << "  1  " << in.durations[a];
    for (int k = 0; k < in.resource_count; ++k) out << "  " << in.demands[a][k];
    out << '\n';
  }
  out << rule << '\n';
  out << "RESOURCEAVAILABILITIES:\n";
  for (int k = 0; k < in.resource_count; ++k) out << "  R " << k + 1;
  out << '\n';
  for (int k = 0; k < in.resource_count; ++k) out << "  " << in.capacities[k];
  out << '\n' << rule << '\n';
  return out.str();
}

}  // namespace rcpsp
