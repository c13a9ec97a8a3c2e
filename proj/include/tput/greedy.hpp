// Earliest-finishing-time greedy (the baseline 2-approximation) and the
// in-block three-class packing used by the alternative rounding.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tput/core.hpp"

namespace tput::greedy {

/// Acceptance order with per-job placements, plus rejection reasons for
/// the jobs the greedy could not fit. Finishes are non-decreasing along
/// the acceptance order.
struct GreedyTrace {
  struct Accepted {
    int job;
    int machine;
    Tick start;
    Tick finish;
  };
  std::vector<Accepted> accepted;
  std::map<int, std::string> rejected;
};

namespace detail {

// Busy intervals of one timeline, keyed by start. Gaps are queried for the
// earliest feasible placement of a length-p run inside [lo, hi).
class Timeline {
 public:
  std::optional<Tick> earliest_start(Tick lo, Tick hi, Tick p) const {
    if (hi - lo < p) return std::nullopt;
    Tick s = lo;
    auto it = busy_.upper_bound(s);
    if (it != busy_.begin()) {
      auto prev = std::prev(it);
      if (prev->second > s) s = prev->second;  // starts inside a busy interval
    }
    while (true) {
      if (s + p > hi) return std::nullopt;
      if (it == busy_.end() || s + p <= it->first) return s;
      s = std::max(s, it->second);
      ++it;
    }
  }

  void occupy(Tick a, Tick b) { busy_[a] = b; }

 private:
  std::map<Tick, Tick> busy_;
};

// A candidate may carry several admissible windows (used by the block
// construction, which lifts m machines to one concatenated horizon).
struct Candidate {
  int job = -1;
  int rank = 0;  // id order, for tie-breaking
  Tick p = 1;
  std::vector<Interval> windows;
};

struct Placement {
  int cand;
  int lane;
  Tick start;
  Tick finish;
};

// One greedy round: the candidate whose feasible completion (within the
// region, within one of its windows, avoiding busy time on some lane) is
// minimal. Ties: completion, then id rank, then lane.
inline std::optional<Placement> best_placement(const std::vector<Candidate>& cands,
                                               const std::vector<bool>& done,
                                               const std::vector<Timeline>& lanes,
                                               const Interval& region) {
  std::optional<Placement> best;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (done[c]) continue;
    const Candidate& cd = cands[c];
    for (std::size_t lane = 0; lane < lanes.size(); ++lane) {
      std::optional<Tick> pick;
      for (const Interval& w : cd.windows) {
        Tick lo = std::max(w.a, region.a);
        Tick hi = std::min(w.b, region.b);
        auto s = lanes[lane].earliest_start(lo, hi, cd.p);
        if (s && (!pick || *s < *pick)) pick = s;
      }
      if (!pick) continue;
      Placement pl{static_cast<int>(c), static_cast<int>(lane), *pick, *pick + cd.p};
      bool better = !best || pl.finish < best->finish ||
                    (pl.finish == best->finish &&
                     (cd.rank < cands[static_cast<std::size_t>(best->cand)].rank ||
                      (cd.rank == cands[static_cast<std::size_t>(best->cand)].rank &&
                       pl.lane < best->lane)));
      if (better) best = pl;
    }
  }
  return best;
}

// Core loop shared by eft_greedy and the block construction sweeps.
inline std::vector<Placement> run_eft(const std::vector<Candidate>& cands,
                                      std::vector<Timeline>& lanes, const Interval& region) {
  std::vector<bool> done(cands.size(), false);
  std::vector<Placement> placed;
  while (true) {
    auto pl = best_placement(cands, done, lanes, region);
    if (!pl) break;
    done[static_cast<std::size_t>(pl->cand)] = true;
    lanes[static_cast<std::size_t>(pl->lane)].occupy(pl->start, pl->finish);
    placed.push_back(*pl);
  }
  return placed;
}

}  // namespace detail

/// Iteratively schedules the job with the earliest feasible completion
/// time within `region` on any of `m` machines, until no job fits.
inline std::pair<Schedule, GreedyTrace> eft_greedy(const Instance& inst,
                                                   const std::vector<int>& jobs,
                                                   const Interval& region, int m) {
  std::vector<detail::Candidate> cands;
  for (int idx : jobs) {
    const Job& j = inst.job(idx);
    if (!j.schedulable()) continue;
    cands.push_back({idx, inst.id_rank[static_cast<std::size_t>(idx)], j.p, {j.window()}});
  }
  std::vector<detail::Timeline> lanes(static_cast<std::size_t>(m));
  auto placed = detail::run_eft(cands, lanes, region);

  Schedule sched;
  GreedyTrace trace;
  for (const auto& pl : placed) {
    int job = cands[static_cast<std::size_t>(pl.cand)].job;
    sched.add(job, pl.lane, pl.start);
    trace.accepted.push_back({job, pl.lane, pl.start, pl.finish});
  }
  for (int idx : jobs) {
    if (!inst.job(idx).schedulable())
      trace.rejected[idx] = "window shorter than processing time";
    else if (!sched.contains(idx))
      trace.rejected[idx] = "no feasible placement left";
  }
  return {std::move(sched), std::move(trace)};
}

inline std::pair<Schedule, GreedyTrace> eft_greedy(const Instance& inst, const Interval& region,
                                                   int m) {
  std::vector<int> all(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  return eft_greedy(inst, all, region, m);
}

/// Error outcome of block_greedy_schedule: the packing does not fit, which
/// after the alteration step indicates a bug upstream.
struct CapacityError {
  std::string what;
};

/// Packs three job classes into block [s, t) on one lane: `left` (windows
/// ending inside the block) back-to-back from s ordered by deadline,
/// `right` (windows starting inside) back-to-back ending at t ordered by
/// release, `mid` (windows spanning the block) in id order between them.
inline std::pair<std::optional<Schedule>, CapacityError> block_greedy_schedule(
    const Instance& inst, std::vector<int> left, std::vector<int> right, std::vector<int> mid,
    const Interval& block, int machine = 0) {
  auto by_rank = [&](int x, int y) {
    return inst.id_rank[static_cast<std::size_t>(x)] < inst.id_rank[static_cast<std::size_t>(y)];
  };
  std::sort(left.begin(), left.end(), [&](int x, int y) {
    return inst.job(x).d != inst.job(y).d ? inst.job(x).d < inst.job(y).d : by_rank(x, y);
  });
  std::sort(right.begin(), right.end(), [&](int x, int y) {
    return inst.job(x).r != inst.job(y).r ? inst.job(x).r < inst.job(y).r : by_rank(x, y);
  });
  std::sort(mid.begin(), mid.end(), by_rank);

  Tick total = 0;
  for (const auto& group : {left, right, mid})
    for (int idx : group) total += inst.job(idx).p;
  if (total > block.length())
    return {std::nullopt, {"total processing exceeds block length"}};

  Schedule sched;
  Tick cursor = block.a;
  for (int idx : left) {
    const Job& j = inst.job(idx);
    if (cursor < j.r || cursor + j.p > j.d)
      return {std::nullopt, {"left job " + j.id + " misses its window"}};
    sched.add(idx, machine, cursor);
    cursor += j.p;
  }
  for (int idx : mid) {
    const Job& j = inst.job(idx);
    if (cursor < j.r || cursor + j.p > j.d)
      return {std::nullopt, {"mid job " + j.id + " does not span the block"}};
    sched.add(idx, machine, cursor);
    cursor += j.p;
  }
  Tick back = block.b;
  for (auto it = right.rbegin(); it != right.rend(); ++it) {
    const Job& j = inst.job(*it);
    back -= j.p;
    if (back < j.r || back < block.a || back + j.p > j.d)
      return {std::nullopt, {"right job " + j.id + " misses its window"}};
    sched.add(*it, machine, back);
  }
  return {std::move(sched), {}};
}

}  // namespace tput::greedy
