// Rounding by slot matching: sample one configuration per block from the
// LP distribution, reinterpret the sampled execution intervals as slots
// open to any fitting job, and keep a maximum bipartite matching between
// jobs and slots. Also hosts the harmonic-grouping and concentration
// diagnostics defined on superblocks.
#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "tput/blocks.hpp"
#include "tput/conflp.hpp"
#include "tput/core.hpp"
#include "tput/rng.hpp"

namespace tput::round_match {

struct Slot {
  Interval iv;
  int block = -1;
  int machine = 0;
  int origin_job = -1;
};

struct BipartiteGraph {
  std::vector<int> jobs;  // left side, instance job indices
  std::vector<Slot> slots;
  std::vector<std::vector<int>> adj;  // per left vertex: slot indices
};

/// One independent categorical draw per non-dummy block, after
/// renormalizing the block's weights to sum exactly 1. Returns the chosen
/// configuration index per block (-1 for dummies).
inline std::vector<int> sample_configs(const blocks::BlockSuperblockPartition& part,
                                       const conflp::LpSolution& sol, std::uint64_t seed,
                                       double tol = 1e-6) {
  std::vector<std::vector<int>> per_block(static_cast<std::size_t>(part.B.size()));
  for (std::size_t c = 0; c < sol.configs.size(); ++c) {
    if (sol.x[c] < -tol)
      throw std::invalid_argument("sample_configs: negative configuration weight");
    per_block[static_cast<std::size_t>(sol.configs[c].block)].push_back(static_cast<int>(c));
  }
  std::vector<int> chosen(static_cast<std::size_t>(part.B.size()), -1);
  for (int b = 0; b < part.B.size(); ++b) {
    if (part.B.is_dummy(b)) continue;
    const auto& cols = per_block[static_cast<std::size_t>(b)];
    if (cols.empty()) continue;
    double sum = 0.0;
    for (int c : cols) sum += std::max(0.0, sol.x[static_cast<std::size_t>(c)]);
    int pick = cols.front();
    if (sum > 0.0) {
      Rng rng(derive_seed(seed, "sample", static_cast<std::uint64_t>(b)));
      double u = rng.uniform01() * sum;
      double acc = 0.0;
      for (int c : cols) {
        acc += std::max(0.0, sol.x[static_cast<std::size_t>(c)]);
        if (u < acc) {
          pick = c;
          break;
        }
        pick = c;  // u == sum lands on the last configuration
      }
    }
    chosen[static_cast<std::size_t>(b)] = pick;
  }
  return chosen;
}

/// One slot per scheduled job of every sampled configuration.
inline std::vector<Slot> build_slots(const Instance& inst, const conflp::LpSolution& sol,
                                     const std::vector<int>& sampled) {
  std::vector<Slot> slots;
  for (int c : sampled) {
    if (c < 0) continue;
    const conflp::Configuration& cfg = sol.configs[static_cast<std::size_t>(c)];
    for (int u = 0; u < cfg.size(); ++u) {
      int j = cfg.jobs[static_cast<std::size_t>(u)];
      Tick s = cfg.start[static_cast<std::size_t>(u)];
      slots.push_back({{s, s + inst.job(j).p}, cfg.block,
                       cfg.machine[static_cast<std::size_t>(u)], j});
    }
  }
  return slots;
}

/// Job j connects to slot [s,t) iff min(t, d_j) - max(s, r_j) >= p_j.
inline BipartiteGraph build_graph(const Instance& inst, std::vector<Slot> slots) {
  BipartiteGraph g;
  g.jobs = inst.schedulable_jobs();
  g.slots = std::move(slots);
  g.adj.assign(g.jobs.size(), {});
  for (std::size_t u = 0; u < g.jobs.size(); ++u) {
    const Job& j = inst.job(g.jobs[u]);
    for (std::size_t q = 0; q < g.slots.size(); ++q) {
      const Interval& iv = g.slots[q].iv;
      if (std::min(iv.b, j.d) - std::max(iv.a, j.r) >= j.p)
        g.adj[u].push_back(static_cast<int>(q));
    }
  }
  return g;
}

struct Matching {
  std::vector<int> slot_of_job;  // per left vertex, -1 if unmatched
  std::vector<int> job_of_slot;  // per slot, -1 if unmatched
  int size = 0;
};

/// Hopcroft-Karp maximum matching.
inline Matching max_matching(const BipartiteGraph& g) {
  const int nl = static_cast<int>(g.jobs.size());
  const int nr = static_cast<int>(g.slots.size());
  Matching m;
  m.slot_of_job.assign(static_cast<std::size_t>(nl), -1);
  m.job_of_slot.assign(static_cast<std::size_t>(nr), -1);

  constexpr int kInf = 1 << 30;
  std::vector<int> level(static_cast<std::size_t>(nl), kInf);
  auto bfs = [&]() {
    std::queue<int> q;
    for (int u = 0; u < nl; ++u) {
      if (m.slot_of_job[static_cast<std::size_t>(u)] < 0) {
        level[static_cast<std::size_t>(u)] = 0;
        q.push(u);
      } else {
        level[static_cast<std::size_t>(u)] = kInf;
      }
    }
    bool reachable = false;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int s : g.adj[static_cast<std::size_t>(u)]) {
        int w = m.job_of_slot[static_cast<std::size_t>(s)];
        if (w < 0) {
          reachable = true;
        } else if (level[static_cast<std::size_t>(w)] == kInf) {
          level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(u)] + 1;
          q.push(w);
        }
      }
    }
    return reachable;
  };
  auto dfs = [&](auto&& self, int u) -> bool {
    for (int s : g.adj[static_cast<std::size_t>(u)]) {
      int w = m.job_of_slot[static_cast<std::size_t>(s)];
      if (w < 0 || (level[static_cast<std::size_t>(w)] ==
                        level[static_cast<std::size_t>(u)] + 1 &&
                    self(self, w))) {
        m.slot_of_job[static_cast<std::size_t>(u)] = s;
        m.job_of_slot[static_cast<std::size_t>(s)] = u;
        return true;
      }
    }
    level[static_cast<std::size_t>(u)] = kInf;
    return false;
  };
  while (bfs()) {
    for (int u = 0; u < nl; ++u)
      if (m.slot_of_job[static_cast<std::size_t>(u)] < 0 && dfs(dfs, u)) ++m.size;
  }
  return m;
}

/// Job j matched to slot [s,t) starts at max(s, r_j) on the slot's
/// machine. The result must be feasible; anything else is a graph bug.
inline Schedule matching_to_schedule(const Instance& inst, const BipartiteGraph& g,
                                     const Matching& m) {
  Schedule sched;
  for (std::size_t u = 0; u < g.jobs.size(); ++u) {
    int s = m.slot_of_job[u];
    if (s < 0) continue;
    const Slot& slot = g.slots[static_cast<std::size_t>(s)];
    sched.add(g.jobs[u], slot.machine, std::max(slot.iv.a, inst.job(g.jobs[u]).r));
  }
  auto report = check_feasible(inst, sched);
  if (!report.feasible())
    throw std::logic_error("matching_to_schedule: infeasible result (" +
                           report.violations.front().detail + ")");
  return sched;
}

struct MatchReport {
  std::vector<int> matching_sizes;  // per trial
  int best_trial = -1;

  json to_json() const {
    json doc;
    doc["matching_sizes"] = matching_sizes;
    doc["best_trial"] = best_trial;
    return doc;
  }
};

/// sample -> slots -> graph -> matching -> schedule, best of `trials`.
inline Schedule run(const Instance& inst, const blocks::BlockSuperblockPartition& part,
                    const conflp::LpSolution& sol, int trials, std::uint64_t seed,
                    MatchReport* report = nullptr) {
  if (trials < 1) throw std::invalid_argument("round_match::run: trials must be >= 1");
  Schedule best;
  int best_trial = -1;
  std::vector<int> sizes;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t tseed = derive_seed(seed, "round_match", static_cast<std::uint64_t>(trial));
    auto sampled = sample_configs(part, sol, tseed);
    auto slots = build_slots(inst, sol, sampled);
    auto graph = build_graph(inst, std::move(slots));
    auto matching = max_matching(graph);
    auto sched = matching_to_schedule(inst, graph, matching);
    sizes.push_back(sched.size());
    if (sched.size() > best.size()) {
      best = std::move(sched);
      best_trial = trial;
    }
  }
  if (report) {
    report->matching_sizes = std::move(sizes);
    report->best_trial = best_trial;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Superblock diagnostics

struct Grouping {
  std::vector<std::vector<int>> groups;  // 1/eps groups of job indices, longest jobs first
  std::vector<double> n_ell;             // fractional mass per group
  double Y = 0.0;
};

/// Partition of a superblock's spanning jobs into 1/eps groups, ordered
/// by non-increasing processing time, each carrying nearly the same
/// fractional mass: eps*Y - 1 <= n_ell <= eps*Y + 1.
inline Grouping harmonic_grouping(const Instance& inst,
                                  const std::vector<std::pair<int, double>>& jobs_mass,
                                  int inv_eps) {
  if (inv_eps < 1) throw std::invalid_argument("harmonic_grouping: 1/eps must be >= 1");
  std::vector<std::pair<int, double>> sorted = jobs_mass;
  std::sort(sorted.begin(), sorted.end(), [&](const auto& x, const auto& y) {
    if (inst.job(x.first).p != inst.job(y.first).p)
      return inst.job(x.first).p > inst.job(y.first).p;
    return inst.id_rank[static_cast<std::size_t>(x.first)] <
           inst.id_rank[static_cast<std::size_t>(y.first)];
  });

  Grouping out;
  for (const auto& [job, y] : sorted) out.Y += y;
  const std::size_t k = sorted.size();
  std::vector<double> prefix(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + sorted[i].second;

  out.groups.assign(static_cast<std::size_t>(inv_eps), {});
  out.n_ell.assign(static_cast<std::size_t>(inv_eps), 0.0);
  std::size_t t_prev = 0;
  for (int ell = 1; ell <= inv_eps; ++ell) {
    double cap = static_cast<double>(ell) / inv_eps * out.Y;
    std::size_t t = t_prev;
    while (t < k && prefix[t + 1] <= cap + 1e-12) ++t;
    if (ell == inv_eps) t = k;  // the last threshold equals Y, everything fits
    for (std::size_t i = t_prev; i < t; ++i) {
      out.groups[static_cast<std::size_t>(ell - 1)].push_back(sorted[i].first);
      out.n_ell[static_cast<std::size_t>(ell - 1)] += sorted[i].second;
    }
    t_prev = t;
  }
  return out;
}

struct ConcentrationReport {
  int superblock = -1;
  double K = 0.0;
  double eps = 0.0;
  int trials = 0;
  std::vector<double> n_ell;
  std::vector<double> violation_rate;  // empirical Pr[N_ell < (1-eps)*n_ell - 2K/eps^3]
  double bound = 0.0;                  // the eps^2 tail bound this is compared against

  json to_json() const {
    json doc;
    doc["superblock"] = superblock;
    doc["K"] = K;
    doc["eps"] = eps;
    doc["trials"] = trials;
    doc["n_ell"] = n_ell;
    doc["violation_rate"] = violation_rate;
    doc["bound"] = bound;
    return doc;
  }
};

/// Monte-Carlo estimate of how often a superblock's sampled slot count
/// per group falls below (1-eps)*n_ell - 2K/eps^3. Diagnostic only.
inline ConcentrationReport concentration_diag(const Instance& inst,
                                              const blocks::BlockSuperblockPartition& part,
                                              const std::vector<blocks::JobGeometry>& geo,
                                              const conflp::LpSolution& sol,
                                              const conflp::Marginals& marg, int superblock,
                                              double eps, int trials, std::uint64_t seed) {
  int inv_eps = blocks::validate_inv_eps(eps);
  ConcentrationReport report;
  report.superblock = superblock;
  report.K = static_cast<double>(sol.effective_K);
  report.eps = eps;
  report.trials = trials;
  report.bound = eps * eps;
  if (trials <= 0) return report;

  std::vector<std::pair<int, double>> mass;
  for (int j = 0; j < inst.n(); ++j) {
    const auto& g = geo[static_cast<std::size_t>(j)];
    if (std::find(g.spanned_superblocks.begin(), g.spanned_superblocks.end(), superblock) ==
        g.spanned_superblocks.end())
      continue;
    auto it = marg.yS[static_cast<std::size_t>(j)].find(superblock);
    mass.push_back({j, it == marg.yS[static_cast<std::size_t>(j)].end() ? 0.0 : it->second});
  }
  auto grouping = harmonic_grouping(inst, mass, inv_eps);
  report.n_ell = grouping.n_ell;

  std::vector<int> group_of(static_cast<std::size_t>(inst.n()), -1);
  for (std::size_t g = 0; g < grouping.groups.size(); ++g)
    for (int j : grouping.groups[g]) group_of[static_cast<std::size_t>(j)] = static_cast<int>(g);

  std::vector<int> violations(static_cast<std::size_t>(inv_eps), 0);
  double slack = 2.0 * report.K * inv_eps * inv_eps * inv_eps;  // 2K/eps^3
  for (int trial = 0; trial < trials; ++trial) {
    auto sampled =
        sample_configs(part, sol, derive_seed(seed, "conc", static_cast<std::uint64_t>(trial)));
    std::vector<int> count(static_cast<std::size_t>(inv_eps), 0);
    for (int b = 0; b < part.B.size(); ++b) {
      int c = sampled[static_cast<std::size_t>(b)];
      if (c < 0) continue;
      if (part.super_of_block[static_cast<std::size_t>(b)] != superblock) continue;
      for (int j : sol.configs[static_cast<std::size_t>(c)].jobs) {
        int g = group_of[static_cast<std::size_t>(j)];
        if (g >= 0) ++count[static_cast<std::size_t>(g)];
      }
    }
    for (int g = 0; g < inv_eps; ++g) {
      double threshold = (1.0 - eps) * grouping.n_ell[static_cast<std::size_t>(g)] - slack;
      if (static_cast<double>(count[static_cast<std::size_t>(g)]) < threshold)
        ++violations[static_cast<std::size_t>(g)];
    }
  }
  for (int g = 0; g < inv_eps; ++g)
    report.violation_rate.push_back(static_cast<double>(violations[static_cast<std::size_t>(g)]) /
                                    trials);
  return report;
}

}  // namespace tput::round_match
