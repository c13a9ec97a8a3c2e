// Brute-force reference solvers, used exclusively to validate the main
// algorithms on small inputs. They refuse inputs beyond their limits
// instead of degrading.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tput/core.hpp"

namespace tput::oracle {

struct OracleLimits {
  int max_jobs = 15;
  Tick max_horizon = 64;
  int max_machines = 2;
};

class LimitsExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr Tick kInfeasible = std::numeric_limits<Tick>::max();

// Earliest completion time of scheduling *all* jobs of a subset on one
// machine, each within its (clipped) window, starting no earlier than
// `origin`. Exact: the DP minimizes over the job scheduled last.
struct SubsetDp {
  std::vector<Tick> finish;   // per mask, kInfeasible if the set cannot be scheduled
  std::vector<int> last_job;  // per mask, local index of the job scheduled last

  // jobs given as (p, r, d) already clipped to the region of interest
  SubsetDp(const std::vector<std::array<Tick, 3>>& jobs, Tick origin) {
    const int n = static_cast<int>(jobs.size());
    const std::size_t total = std::size_t{1} << n;
    finish.assign(total, kInfeasible);
    last_job.assign(total, -1);
    finish[0] = origin;
    for (std::size_t mask = 1; mask < total; ++mask) {
      for (int j = 0; j < n; ++j) {
        if (!(mask >> j & 1)) continue;
        Tick prev = finish[mask ^ (std::size_t{1} << j)];
        if (prev == kInfeasible) continue;
        Tick s = std::max(prev, jobs[static_cast<std::size_t>(j)][1]);
        Tick f = s + jobs[static_cast<std::size_t>(j)][0];
        if (f > jobs[static_cast<std::size_t>(j)][2]) continue;
        if (f < finish[mask]) {
          finish[mask] = f;
          last_job[mask] = j;
        }
      }
    }
  }

  bool feasible(std::size_t mask) const { return finish[mask] != kInfeasible; }

  // (local job index, start) pairs realizing the earliest completion
  std::vector<std::pair<int, Tick>> starts(std::size_t mask,
                                           const std::vector<std::array<Tick, 3>>& jobs) const {
    std::vector<std::pair<int, Tick>> out;
    while (mask) {
      int j = last_job[mask];
      std::size_t prev_mask = mask ^ (std::size_t{1} << j);
      Tick s = std::max(finish[prev_mask], jobs[static_cast<std::size_t>(j)][1]);
      out.push_back({j, s});
      mask = prev_mask;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline std::vector<std::array<Tick, 3>> clip_jobs(const Instance& inst,
                                                  const std::vector<int>& ids,
                                                  const Interval& region) {
  std::vector<std::array<Tick, 3>> out;
  out.reserve(ids.size());
  for (int idx : ids) {
    const Job& j = inst.job(idx);
    out.push_back({j.p, std::max(j.r, region.a), std::min(j.d, region.b)});
  }
  return out;
}

}  // namespace detail

/// Maximum-cardinality feasible schedule by exhaustive subset DP
/// (m = 1) plus machine-split enumeration (m = 2).
inline Schedule exact_opt(const Instance& inst, const OracleLimits& limits = {}) {
  std::vector<int> cand = inst.schedulable_jobs();
  const int n = static_cast<int>(cand.size());
  if (n > limits.max_jobs)
    throw LimitsExceeded("exact_opt: " + std::to_string(n) + " jobs exceed limit");
  if (inst.T > limits.max_horizon)
    throw LimitsExceeded("exact_opt: horizon exceeds limit");
  if (inst.m > limits.max_machines)
    throw LimitsExceeded("exact_opt: machine count exceeds limit");

  Interval region{0, inst.T};
  auto jobs = detail::clip_jobs(inst, cand, region);
  detail::SubsetDp dp(jobs, region.a);
  const std::size_t total = std::size_t{1} << n;

  std::size_t best_mask = 0, best_split = 0;
  int best_count = -1;
  if (inst.m == 1) {
    for (std::size_t mask = 0; mask < total; ++mask) {
      if (!dp.feasible(mask)) continue;
      int c = std::popcount(mask);
      if (c > best_count) {
        best_count = c;
        best_mask = mask;
        best_split = mask;
      }
    }
  } else {
    // mask feasible on two machines iff some submask and its complement
    // within mask are each single-machine feasible
    for (std::size_t mask = 0; mask < total; ++mask) {
      int c = std::popcount(mask);
      if (c <= best_count) continue;
      std::size_t sub = mask;
      while (true) {
        if (dp.feasible(sub) && dp.feasible(mask ^ sub)) {
          best_count = c;
          best_mask = mask;
          best_split = sub;
          break;
        }
        if (sub == 0) break;
        sub = (sub - 1) & mask;
      }
    }
  }

  Schedule sched;
  for (auto [lane, lane_mask] :
       {std::pair<int, std::size_t>{0, best_split},
        std::pair<int, std::size_t>{1, best_mask ^ best_split}}) {
    if (lane == 1 && inst.m == 1) break;
    for (auto [local, start] : dp.starts(lane_mask, jobs))
      sched.add(cand[static_cast<std::size_t>(local)], lane, start);
  }
  return sched;
}

struct WeightedConfig {
  std::vector<int> jobs;  // instance job indices
  Schedule schedule;      // machine/start per chosen job
  double weight = 0.0;
};

/// Maximum total-weight subset of size <= cap feasibly schedulable inside
/// `block` on m machines, by subset enumeration. Empty set (weight 0) is
/// always feasible, so nonpositive weights never help.
inline WeightedConfig max_weight_config_bf(const Interval& block,
                                           const Instance& inst,
                                           const std::vector<int>& candidates,
                                           const std::vector<double>& weights,
                                           int cap, int m,
                                           int max_candidates = 15) {
  const int n = static_cast<int>(candidates.size());
  if (n > max_candidates)
    throw LimitsExceeded("max_weight_config_bf: too many candidates");
  if (m < 1 || m > 2)
    throw LimitsExceeded("max_weight_config_bf: m must be 1 or 2");

  auto jobs = detail::clip_jobs(inst, candidates, block);
  detail::SubsetDp dp(jobs, block.a);
  const std::size_t total = std::size_t{1} << n;

  WeightedConfig best;  // empty configuration
  std::size_t best_mask = 0, best_sub = 0;
  for (std::size_t mask = 1; mask < total; ++mask) {
    if (std::popcount(mask) > cap) continue;
    double w = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1) w += weights[static_cast<std::size_t>(j)];
    if (w <= best.weight) continue;
    bool ok = false;
    std::size_t sub = mask;
    if (m == 1) {
      ok = dp.feasible(mask);
    } else {
      std::size_t s = mask;
      while (true) {
        if (dp.feasible(s) && dp.feasible(mask ^ s)) {
          ok = true;
          sub = s;
          break;
        }
        if (s == 0) break;
        s = (s - 1) & mask;
      }
    }
    if (ok) {
      best.weight = w;
      best_mask = mask;
      best_sub = sub;
    }
  }

  if (best_mask) {
    for (auto [lane, lane_mask] :
         {std::pair<int, std::size_t>{0, m == 1 ? best_mask : best_sub},
          std::pair<int, std::size_t>{1, m == 1 ? 0 : best_mask ^ best_sub}}) {
      for (auto [local, start] : dp.starts(lane_mask, jobs)) {
        best.jobs.push_back(candidates[static_cast<std::size_t>(local)]);
        best.schedule.add(candidates[static_cast<std::size_t>(local)], lane, start);
      }
    }
    std::sort(best.jobs.begin(), best.jobs.end());
  }
  return best;
}

/// Exact maximum-cardinality bipartite matching, <= 12 vertices per side.
/// adj[i] lists right-side neighbours of left vertex i.
inline int max_matching_bf(const std::vector<std::vector<int>>& adj, int right_count,
                           int max_side = 12) {
  const int left = static_cast<int>(adj.size());
  if (left > max_side || right_count > max_side)
    throw LimitsExceeded("max_matching_bf: side exceeds limit");
  std::vector<std::vector<int>> memo(
      static_cast<std::size_t>(left) + 1,
      std::vector<int>(std::size_t{1} << right_count, -1));
  auto rec = [&](auto&& self, int i, std::uint32_t used) -> int {
    if (i == left) return 0;
    int& slot = memo[static_cast<std::size_t>(i)][used];
    if (slot >= 0) return slot;
    int best = self(self, i + 1, used);  // leave i unmatched
    for (int q : adj[static_cast<std::size_t>(i)]) {
      if (used >> q & 1) continue;
      best = std::max(best, 1 + self(self, i + 1, used | (std::uint32_t{1} << q)));
    }
    return slot = best;
  };
  return rec(rec, 0, 0);
}

}  // namespace tput::oracle
