// Rounding by job assignment: every global job is independently sent to
// one (machine, block) with probability (1-2*eps)*y or discarded, long
// jobs relative to their window-in-block are dropped, capacity-style bad
// events discard a few more, and the survivors always pack greedily.
// Local jobs are never scheduled here.
#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "tput/blocks.hpp"
#include "tput/conflp.hpp"
#include "tput/core.hpp"
#include "tput/greedy.hpp"
#include "tput/rng.hpp"

namespace tput::round_assign {

struct AssignmentDraw {
  std::vector<int> block;    // per job, -1 = discarded or not drawn
  std::vector<int> machine;  // per job, -1 likewise
};

/// Independent categorical draw per global job over its (machine, block)
/// masses scaled by (1-2*eps); the remaining mass discards the job. Local
/// and unschedulable jobs are skipped.
inline AssignmentDraw assign_jobs(const Instance& inst,
                                  const std::vector<blocks::JobGeometry>& geo,
                                  const conflp::Marginals& marg, double eps, std::uint64_t seed,
                                  double tol = 1e-6) {
  blocks::validate_inv_eps(eps);
  AssignmentDraw draw;
  draw.block.assign(static_cast<std::size_t>(inst.n()), -1);
  draw.machine.assign(static_cast<std::size_t>(inst.n()), -1);
  const double scale = 1.0 - 2.0 * eps;
  const int m = inst.m;

  for (int j = 0; j < inst.n(); ++j) {
    const auto& g = geo[static_cast<std::size_t>(j)];
    if (!g.schedulable || g.local) continue;
    const auto& masses = marg.yiB[static_cast<std::size_t>(j)];
    double total = 0.0;
    for (const auto& [key, y] : masses) total += scale * y;
    if (total > 1.0 + tol)
      throw std::invalid_argument("assign_jobs: assignment mass exceeds 1 for job " +
                                  inst.job(j).id);
    Rng rng(derive_seed(seed, "assign", static_cast<std::uint64_t>(j)));
    double u = rng.uniform01();
    double acc = 0.0;
    for (const auto& [key, y] : masses) {
      acc += scale * y;
      if (u < acc) {
        draw.block[static_cast<std::size_t>(j)] = static_cast<int>(key / m);
        draw.machine[static_cast<std::size_t>(j)] = static_cast<int>(key % m);
        break;
      }
    }
  }
  return draw;
}

/// Long iff p_j > eps^4 * |tw(j) intersect B|, evaluated in exact integer
/// arithmetic (eps = 1/k).
inline std::pair<std::vector<int>, std::vector<int>> split_long_short(
    const Instance& inst, const std::vector<int>& assigned, const Interval& block, double eps) {
  long long k = blocks::validate_inv_eps(eps);
  long long k4 = k * k * k * k;
  std::vector<int> longs, shorts;
  for (int j : assigned) {
    Tick len = intersection_length(inst.job(j).window(), block);
    if (inst.job(j).p * k4 > len)
      longs.push_back(j);
    else
      shorts.push_back(j);
  }
  return {std::move(longs), std::move(shorts)};
}

struct AlterationOutcome {
  std::vector<int> survivors;      // Z = 1
  bool total_fired = false;        // all short jobs dropped
  std::vector<int> right_dropped;  // dropped by their own right event
  std::vector<int> left_dropped;
};

/// Bad events over the short jobs of one (block, machine): E_total fires
/// when the total processing exceeds |B|; E_right(j) for a window
/// entering from the right (s < r_j < t) when the jobs released at or
/// after r_j overflow [r_j, t); E_left(j) mirrors it under time reversal.
inline AlterationOutcome apply_bad_events(const Instance& inst, const std::vector<int>& shorts,
                                          const Interval& block) {
  AlterationOutcome out;
  Tick total = 0;
  for (int j : shorts) total += inst.job(j).p;
  if (total > block.length()) {
    out.total_fired = true;
    return out;
  }
  for (int j : shorts) {
    const Job& job = inst.job(j);
    if (block.a < job.r && job.r < block.b) {
      Tick sum = 0;
      for (int j2 : shorts)
        if (inst.job(j2).r >= job.r) sum += inst.job(j2).p;
      if (sum > block.b - job.r) {
        out.right_dropped.push_back(j);
        continue;
      }
    } else if (block.a < job.d && job.d < block.b) {
      Tick sum = 0;
      for (int j2 : shorts)
        if (inst.job(j2).d <= job.d) sum += inst.job(j2).p;
      if (sum > job.d - block.a) {
        out.left_dropped.push_back(j);
        continue;
      }
    }
    out.survivors.push_back(j);
  }
  return out;
}

struct TrialReport {
  int assigned = 0;
  int longs = 0;
  int dropped_by_events = 0;
  int scheduled = 0;
  int total_events = 0;
  int right_events = 0;
  int left_events = 0;
};

struct AssignReport {
  std::vector<TrialReport> trials;
  int best_trial = -1;

  json to_json() const {
    json doc;
    doc["best_trial"] = best_trial;
    doc["trials"] = json::array();
    for (const auto& t : trials) {
      json row;
      row["assigned"] = t.assigned;
      row["long"] = t.longs;
      row["dropped_by_events"] = t.dropped_by_events;
      row["scheduled"] = t.scheduled;
      row["total_events"] = t.total_events;
      row["right_events"] = t.right_events;
      row["left_events"] = t.left_events;
      doc["trials"].push_back(std::move(row));
    }
    return doc;
  }
};

/// assign -> split -> alteration -> in-block greedy per (block, machine),
/// best of `trials`. The greedy cannot fail on survivors; a failure is a
/// hard internal error.
inline Schedule run(const Instance& inst, const blocks::BlockSuperblockPartition& part,
                    const std::vector<blocks::JobGeometry>& geo, const conflp::Marginals& marg,
                    double eps, int trials, std::uint64_t seed, AssignReport* report = nullptr) {
  if (trials < 1) throw std::invalid_argument("round_assign::run: trials must be >= 1");
  Schedule best;
  int best_trial = -1;
  std::vector<TrialReport> trail;

  for (int trial = 0; trial < trials; ++trial) {
    auto draw = assign_jobs(inst, geo, marg, eps,
                            derive_seed(seed, "round_assign", static_cast<std::uint64_t>(trial)));
    std::map<std::pair<int, int>, std::vector<int>> groups;
    TrialReport tr;
    for (int j = 0; j < inst.n(); ++j) {
      if (draw.block[static_cast<std::size_t>(j)] < 0) continue;
      groups[{draw.block[static_cast<std::size_t>(j)],
              draw.machine[static_cast<std::size_t>(j)]}]
          .push_back(j);
      ++tr.assigned;
    }

    Schedule sched;
    for (const auto& [key, assigned] : groups) {
      const Interval block = part.B.blocks[static_cast<std::size_t>(key.first)];
      auto [longs, shorts] = split_long_short(inst, assigned, block, eps);
      tr.longs += static_cast<int>(longs.size());
      auto outcome = apply_bad_events(inst, shorts, block);
      tr.total_events += outcome.total_fired ? 1 : 0;
      tr.right_events += static_cast<int>(outcome.right_dropped.size());
      tr.left_events += static_cast<int>(outcome.left_dropped.size());
      tr.dropped_by_events += static_cast<int>(shorts.size() - outcome.survivors.size());

      std::vector<int> left, right, mid;
      for (int j : outcome.survivors) {
        const Job& job = inst.job(j);
        if (block.a < job.d && job.d < block.b)
          left.push_back(j);
        else if (block.a < job.r && job.r < block.b)
          right.push_back(j);
        else
          mid.push_back(j);
      }
      auto [packed, err] =
          greedy::block_greedy_schedule(inst, left, right, mid, block, key.second);
      if (!packed)
        throw std::logic_error("round_assign: greedy failed after alteration: " + err.what);
      for (const auto& [j, e] : packed->entries) sched.add(j, e.machine, e.start);
    }
    tr.scheduled = sched.size();
    trail.push_back(tr);
    if (sched.size() > best.size()) {
      best = std::move(sched);
      best_trial = trial;
    }
  }
  if (report) {
    report->trials = std::move(trail);
    report->best_trial = best_trial;
  }
  return best;
}

}  // namespace tput::round_assign
