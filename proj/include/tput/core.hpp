// Instance and schedule data model: jobs with integer time windows,
// feasibility checking, normalization, JSON I/O and seeded generation.
//
// Time is integer ticks throughout; all intervals are half-open [a, b).
#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tput/rng.hpp"

namespace tput {

using Tick = std::int64_t;
using json = nlohmann::ordered_json;

/// Half-open interval [a, b). Empty iff a == b; dummy blocks [T, T) are legal.
struct Interval {
  Tick a = 0;
  Tick b = 0;

  Tick length() const { return b - a; }
  bool empty() const { return a == b; }
  bool contains(Tick t) const { return a <= t && t < b; }
  bool contains(const Interval& o) const { return a <= o.a && o.b <= b; }
  bool operator==(const Interval& o) const = default;
};

inline Tick intersection_length(const Interval& x, const Interval& y) {
  return std::max<Tick>(0, std::min(x.b, y.b) - std::max(x.a, y.a));
}

struct Job {
  std::string id;
  Tick p = 1;  // processing time, >= 1
  Tick r = 0;  // release
  Tick d = 1;  // deadline, window is [r, d)

  Interval window() const { return {r, d}; }
  bool schedulable() const { return d - r >= p; }
};

struct Instance {
  std::vector<Job> jobs;
  int m = 1;        // machine count
  Tick T = 0;       // horizon = max deadline (0 for empty instance)
  Tick offset = 0;  // shift applied by normalize()

  // Rank of each job in lexicographic id order; used for deterministic
  // tie-breaking everywhere ("job id order").
  std::vector<int> id_rank;

  const Job& job(int idx) const { return jobs[static_cast<std::size_t>(idx)]; }
  int n() const { return static_cast<int>(jobs.size()); }

  int index_of(const std::string& id) const {
    for (int i = 0; i < n(); ++i)
      if (jobs[static_cast<std::size_t>(i)].id == id) return i;
    return -1;
  }

  std::vector<int> schedulable_jobs() const {
    std::vector<int> out;
    for (int i = 0; i < n(); ++i)
      if (job(i).schedulable()) out.push_back(i);
    return out;
  }

  void finalize() {
    T = 0;
    for (const Job& j : jobs) T = std::max(T, j.d);
    std::vector<int> order(jobs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return jobs[static_cast<std::size_t>(x)].id < jobs[static_cast<std::size_t>(y)].id;
    });
    id_rank.assign(jobs.size(), 0);
    for (std::size_t k = 0; k < order.size(); ++k)
      id_rank[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
  }
};

/// Job-to-(machine, start) assignment.
struct Schedule {
  struct Entry {
    int machine = 0;
    Tick start = 0;
  };
  std::map<int, Entry> entries;  // keyed by job index

  int size() const { return static_cast<int>(entries.size()); }
  bool contains(int job) const { return entries.count(job) != 0; }

  void add(int job, int machine, Tick start) { entries[job] = Entry{machine, start}; }

  void shift(Tick delta) {
    for (auto& [job, e] : entries) e.start += delta;
  }
};

struct Violation {
  enum class Kind { window, overlap, unknown_job, duplicate_job, bad_machine, unschedulable };
  Kind kind;
  std::string job_id;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

/// Lists every violation of the schedule against the instance; an empty
/// list means the schedule is feasible. Violations are data, not errors.
inline FeasibilityReport check_feasible(const Instance& inst, const Schedule& sched) {
  FeasibilityReport report;
  auto flag = [&](Violation::Kind k, const std::string& id, std::string detail) {
    report.violations.push_back(Violation{k, id, std::move(detail)});
  };

  std::vector<std::vector<std::pair<Interval, int>>> per_machine(
      static_cast<std::size_t>(std::max(inst.m, 1)));
  for (const auto& [job, e] : sched.entries) {
    if (job < 0 || job >= inst.n()) {
      flag(Violation::Kind::unknown_job, "#" + std::to_string(job), "job index out of range");
      continue;
    }
    const Job& j = inst.job(job);
    if (e.machine < 0 || e.machine >= inst.m) {
      flag(Violation::Kind::bad_machine, j.id,
           "machine " + std::to_string(e.machine) + " not in [0," + std::to_string(inst.m) + ")");
      continue;
    }
    Interval run{e.start, e.start + j.p};
    if (!(j.r <= run.a && run.b <= j.d)) {
      std::ostringstream os;
      os << "runs [" << run.a << "," << run.b << ") outside window [" << j.r << "," << j.d << ")";
      flag(Violation::Kind::window, j.id, os.str());
    }
    per_machine[static_cast<std::size_t>(e.machine)].push_back({run, job});
  }
  for (auto& lane : per_machine) {
    std::sort(lane.begin(), lane.end(),
              [](const auto& x, const auto& y) { return x.first.a < y.first.a; });
    for (std::size_t i = 1; i < lane.size(); ++i) {
      if (lane[i].first.a < lane[i - 1].first.b) {
        flag(Violation::Kind::overlap, inst.job(lane[i].second).id,
             "overlaps job " + inst.job(lane[i - 1].second).id);
      }
    }
  }
  return report;
}

/// Shifts all releases/deadlines so that the earliest release is 0.
/// Idempotent; throughput of any schedule is invariant under the shift.
inline Instance normalize(const Instance& inst) {
  if (inst.jobs.empty()) return inst;
  Tick shift = inst.jobs.front().r;
  for (const Job& j : inst.jobs) shift = std::min(shift, j.r);
  Instance out = inst;
  for (Job& j : out.jobs) {
    j.r -= shift;
    j.d -= shift;
  }
  out.offset = inst.offset + shift;
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------
// JSON I/O
//
// Instance: {"m": int, "jobs": [{"id","p","r","d"}, ...]}
// Schedule: {"entries": [{"id","machine","start"}, ...]}
// Both round-trip byte-stable: keys in fixed order, jobs in input order,
// schedule entries sorted by job id.

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Instance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("instance parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("m") || !doc.contains("jobs"))
    throw ParseError("instance must be an object with \"m\" and \"jobs\"");
  Instance inst;
  inst.m = doc.at("m").get<int>();
  if (inst.m < 1) throw ParseError("machine count must be >= 1");
  std::unordered_map<std::string, bool> seen;
  for (const auto& item : doc.at("jobs")) {
    Job j;
    try {
      j.id = item.at("id").get<std::string>();
      j.p = item.at("p").get<Tick>();
      j.r = item.at("r").get<Tick>();
      j.d = item.at("d").get<Tick>();
    } catch (const std::exception& e) {
      throw ParseError(std::string("malformed job entry: ") + e.what());
    }
    if (j.p < 1)
      throw ParseError("validation error: job \"" + j.id + "\" has p < 1");
    if (j.d <= j.r)
      throw ParseError("validation error: job \"" + j.id + "\" has d <= r");
    if (seen.count(j.id))
      throw ParseError("validation error: duplicate job id \"" + j.id + "\"");
    seen[j.id] = true;
    inst.jobs.push_back(std::move(j));
  }
  inst.finalize();
  return inst;
}

inline std::string save_instance(const Instance& inst) {
  json doc;
  doc["m"] = inst.m;
  doc["jobs"] = json::array();
  for (const Job& j : inst.jobs) {
    json item;
    item["id"] = j.id;
    item["p"] = j.p;
    item["r"] = j.r;
    item["d"] = j.d;
    doc["jobs"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

inline Schedule load_schedule(const Instance& inst, const std::string& text,
                              FeasibilityReport* id_errors = nullptr) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("schedule parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries"))
    throw ParseError("schedule must be an object with \"entries\"");
  Schedule sched;
  for (const auto& item : doc.at("entries")) {
    std::string id;
    Schedule::Entry e;
    try {
      id = item.at("id").get<std::string>();
      e.machine = item.at("machine").get<int>();
      e.start = item.at("start").get<Tick>();
    } catch (const std::exception& ex) {
      throw ParseError(std::string("malformed schedule entry: ") + ex.what());
    }
    int idx = inst.index_of(id);
    if (idx < 0) {
      if (id_errors)
        id_errors->violations.push_back(
            Violation{Violation::Kind::unknown_job, id, "job id not in instance"});
      continue;
    }
    if (sched.contains(idx)) {
      if (id_errors)
        id_errors->violations.push_back(
            Violation{Violation::Kind::duplicate_job, id, "job scheduled twice"});
      continue;
    }
    sched.entries[idx] = e;
  }
  return sched;
}

inline std::string save_schedule(const Instance& inst, const Schedule& sched) {
  std::vector<int> order;
  for (const auto& [job, e] : sched.entries) order.push_back(job);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return inst.job(x).id < inst.job(y).id; });
  json doc;
  doc["entries"] = json::array();
  for (int job : order) {
    const auto& e = sched.entries.at(job);
    json item;
    item["id"] = inst.job(job).id;
    item["machine"] = e.machine;
    item["start"] = e.start;
    doc["entries"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Random instances

struct GenParams {
  int n = 10;
  Tick T = 50;
  int m = 1;
  Tick p_min = 1;
  Tick p_max = 8;
  Tick slack_min = 0;  // window slack beyond p, d = min(T, r + p + slack)
  Tick slack_max = 12;
  std::uint64_t seed = 1;
};

/// Seed-deterministic instance with every job schedulable (d - r >= p).
inline Instance gen_random(const GenParams& gp) {
  if (gp.n < 0 || gp.T < 1) throw std::invalid_argument("gen_random: need n >= 0, T >= 1");
  if (gp.m < 1) throw std::invalid_argument("gen_random: need m >= 1");
  if (gp.p_min < 1 || gp.p_max < gp.p_min)
    throw std::invalid_argument("gen_random: bad processing-time distribution");
  if (gp.slack_min < 0 || gp.slack_max < gp.slack_min)
    throw std::invalid_argument("gen_random: bad slack distribution");
  if (gp.p_min > gp.T)
    throw std::invalid_argument("gen_random: p_min exceeds horizon");

  Rng rng(derive_seed(gp.seed, "gen"));
  Instance inst;
  inst.m = gp.m;
  for (int i = 0; i < gp.n; ++i) {
    Job j;
    {
      std::ostringstream os;
      os << "j" << std::setw(4) << std::setfill('0') << i;
      j.id = os.str();
    }
    Tick p_hi = std::min(gp.p_max, gp.T);
    j.p = gp.p_min + static_cast<Tick>(rng.below(static_cast<std::uint64_t>(p_hi - gp.p_min + 1)));
    j.r = static_cast<Tick>(rng.below(static_cast<std::uint64_t>(gp.T - j.p + 1)));
    Tick slack =
        gp.slack_min +
        static_cast<Tick>(rng.below(static_cast<std::uint64_t>(gp.slack_max - gp.slack_min + 1)));
    j.d = std::min(gp.T, j.r + j.p + slack);
    inst.jobs.push_back(std::move(j));
  }
  inst.finalize();
  return inst;
}

}  // namespace tput
