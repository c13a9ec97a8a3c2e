// Configuration LP over a block-superblock partition: per-block feasible
// job sets with a fixed witness schedule, solved either by explicit
// enumeration or by column generation whose pricing problem (max-weight
// configuration) is a color-coding dynamic program. The same DP, run over
// the whole horizon with unit weights, solves instances with small
// optimum exactly.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tput/blocks.hpp"
#include "tput/core.hpp"
#include "tput/rng.hpp"
#include "tput/simplex.hpp"

namespace tput::conflp {

/// A block together with a feasible job set (|jobs| <= K), its machine
/// split and one fixed witness schedule inside the block.
struct Configuration {
  int block = -1;
  std::vector<int> jobs;      // instance job indices, ascending
  std::vector<int> machine;   // parallel to jobs
  std::vector<Tick> start;    // parallel to jobs

  int size() const { return static_cast<int>(jobs.size()); }
};

struct LpSolution {
  std::vector<Configuration> configs;
  std::vector<double> x;       // per configuration
  double objective = 0.0;
  std::vector<double> alpha;   // dual per job (0 where no LP row exists)
  std::vector<double> beta;    // dual per block (0 for dummy blocks)
  bool optimal = false;
  bool iteration_capped = false;
  int rounds = 0;
  int effective_K = 0;
  bool heuristic = false;      // the level K was clamped by the config cap
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct DpJob {
  int job = -1;    // instance index
  Tick p = 1;
  Tick rp = 0;     // clipped release + p (earliest feasible completion)
  Tick d = 0;      // clipped deadline
  double w = 0.0;
  int color = 0;
};

struct DpPick {
  int job;
  int machine;
  Tick start;
};

// Max-weight scheduling DP inside [s, t) where selected jobs must carry
// pairwise distinct colors from the cell's color subset. Cells (A, q) are
// filled for increasing A; the job finishing last determines the
// transition, placed as late as possible before the frontier q.
class ColorDp {
 public:
  ColorDp(const std::vector<DpJob>& jobs, Tick s, Tick t, int ncolors, int size_cap, bool witness)
      : jobs_(jobs), s_(s), len_(t - s), nc_(ncolors), cap_(size_cap) {
    const std::size_t states = std::size_t{1} << nc_;
    const std::size_t stride = static_cast<std::size_t>(len_) + 1;
    value_.assign(states * stride, 0.0);
    if (witness) choice_.assign(states * stride, -1);
    for (std::size_t a = 1; a < states; ++a) {
      if (std::popcount(a) > cap_) continue;
      for (Tick q = 0; q <= len_; ++q) {
        double best = 0.0;
        int pick = -1;
        for (std::size_t j = 0; j < jobs_.size(); ++j) {
          const DpJob& job = jobs_[j];
          if (!(a >> job.color & 1)) continue;
          Tick qe = std::min(s_ + q, job.d);
          if (qe < job.rp) continue;
          double v = value_[(a ^ (std::size_t{1} << job.color)) * stride +
                            static_cast<std::size_t>(qe - job.p - s_)] +
                     job.w;
          if (v > best + 1e-15) {
            best = v;
            pick = static_cast<int>(j);
          }
        }
        value_[a * stride + static_cast<std::size_t>(q)] = best;
        if (witness) choice_[a * stride + static_cast<std::size_t>(q)] = pick;
      }
    }
  }

  double best(std::size_t color_set) const {
    return value_[color_set * (static_cast<std::size_t>(len_) + 1) +
                  static_cast<std::size_t>(len_)];
  }

  std::vector<DpPick> witness(std::size_t color_set, int machine) const {
    const std::size_t stride = static_cast<std::size_t>(len_) + 1;
    std::vector<DpPick> out;
    std::size_t a = color_set;
    Tick q = len_;
    while (a) {
      int pick = choice_[a * stride + static_cast<std::size_t>(q)];
      if (pick < 0) break;
      const DpJob& job = jobs_[static_cast<std::size_t>(pick)];
      Tick qe = std::min(s_ + q, job.d);
      out.push_back({job.job, machine, qe - job.p});
      a ^= std::size_t{1} << job.color;
      q = qe - job.p - s_;
    }
    return out;
  }

 private:
  std::vector<DpJob> jobs_;
  Tick s_;
  Tick len_;
  int nc_;
  int cap_;
  std::vector<double> value_;
  std::vector<int> choice_;
};

// Splits colors over identical machines: g_i(A) = best value using i
// machines and colors from A. Returns the chosen submask per machine for
// witness reconstruction.
struct MachineCombine {
  std::vector<double> total;
  std::vector<std::vector<std::uint32_t>> split;  // per extra machine, per state

  MachineCombine(const ColorDp& dp, int ncolors, int machines, int size_cap) {
    const std::size_t states = std::size_t{1} << ncolors;
    std::vector<double> base(states, 0.0);
    for (std::size_t a = 0; a < states; ++a)
      if (std::popcount(a) <= size_cap) base[a] = dp.best(a);
    total = base;
    for (int i = 1; i < machines; ++i) {
      std::vector<double> next(states, 0.0);
      std::vector<std::uint32_t> pick(states, 0);
      for (std::size_t a = 0; a < states; ++a) {
        if (std::popcount(a) > size_cap) continue;
        double best = total[a];  // whole set on earlier machines
        std::uint32_t arg = 0;
        std::size_t b = a;
        while (b) {
          double v = total[a ^ b] + base[b];
          if (v > best + 1e-15) {
            best = v;
            arg = static_cast<std::uint32_t>(b);
          }
          b = (b - 1) & a;
        }
        next[a] = best;
        pick[a] = arg;
      }
      split.push_back(std::move(pick));
      total = std::move(next);
    }
  }

  std::pair<double, std::size_t> best(int ncolors, int size_cap) const {
    double best = 0.0;
    std::size_t arg = 0;
    const std::size_t states = std::size_t{1} << ncolors;
    for (std::size_t a = 0; a < states; ++a) {
      if (std::popcount(a) > size_cap) continue;
      if (total[a] > best + 1e-15) {
        best = total[a];
        arg = a;
      }
    }
    return {best, arg};
  }

  // color subset handled by each machine, machine 0 last
  std::vector<std::size_t> machine_sets(std::size_t color_set) const {
    std::vector<std::size_t> sets;
    std::size_t rest = color_set;
    for (auto it = split.rbegin(); it != split.rend(); ++it) {
      std::size_t b = (*it)[rest];
      sets.push_back(b);
      rest ^= b;
    }
    sets.push_back(rest);
    std::reverse(sets.begin(), sets.end());  // machine 0 first
    return sets;
  }
};

inline Configuration config_from_picks(int block, std::vector<DpPick> picks) {
  std::sort(picks.begin(), picks.end(),
            [](const DpPick& x, const DpPick& y) { return x.job < y.job; });
  Configuration c;
  c.block = block;
  for (const DpPick& p : picks) {
    c.jobs.push_back(p.job);
    c.machine.push_back(p.machine);
    c.start.push_back(p.start);
  }
  return c;
}

inline double colorful_probability(int k) {
  double p = 1.0;
  for (int i = 1; i < k; ++i) p *= 1.0 - static_cast<double>(i) / k;
  return p;  // k!/k^k
}

inline int trials_for(double fail_prob, double success_prob) {
  if (success_prob >= 1.0) return 1;
  return static_cast<int>(std::ceil(std::log(1.0 / fail_prob) / success_prob));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Explicit enumeration

struct EnumerateOptions {
  int max_candidates = 18;
  long long max_configs = 100000;
};

namespace detail {

// Feasibility of scheduling `subset` inside the block on m machines, by
// machine assignments in lexicographic order, then per machine every
// order of the (deadline, id)-sorted jobs, earliest-start packing; the
// first feasible witness is kept.
inline std::optional<Configuration> canonical_witness(const Instance& inst, const Interval& block,
                                                      const std::vector<int>& subset, int block_id,
                                                      int m) {
  const int k = static_cast<int>(subset.size());
  std::vector<int> order(subset);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (inst.job(x).d != inst.job(y).d) return inst.job(x).d < inst.job(y).d;
    return inst.id_rank[static_cast<std::size_t>(x)] < inst.id_rank[static_cast<std::size_t>(y)];
  });

  auto pack_machine = [&](const std::vector<int>& lane_jobs)
      -> std::optional<std::vector<Tick>> {
    std::vector<int> perm(lane_jobs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    do {
      std::vector<Tick> starts(lane_jobs.size());
      Tick cursor = block.a;
      bool ok = true;
      for (int pi : perm) {
        const Job& j = inst.job(lane_jobs[static_cast<std::size_t>(pi)]);
        Tick s = std::max(cursor, std::max(j.r, block.a));
        if (s + j.p > std::min(j.d, block.b)) {
          ok = false;
          break;
        }
        starts[static_cast<std::size_t>(pi)] = s;
        cursor = s + j.p;
      }
      if (ok) return starts;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
  };

  std::vector<int> assign(static_cast<std::size_t>(k), 0);
  while (true) {
    std::vector<std::vector<int>> lanes(static_cast<std::size_t>(m));
    for (int i = 0; i < k; ++i)
      lanes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(
          order[static_cast<std::size_t>(i)]);
    std::vector<std::vector<Tick>> starts(static_cast<std::size_t>(m));
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      auto st = pack_machine(lanes[static_cast<std::size_t>(i)]);
      if (!st)
        ok = false;
      else
        starts[static_cast<std::size_t>(i)] = *st;
    }
    if (ok) {
      std::vector<detail::DpPick> picks;
      for (int i = 0; i < m; ++i)
        for (std::size_t u = 0; u < lanes[static_cast<std::size_t>(i)].size(); ++u)
          picks.push_back({lanes[static_cast<std::size_t>(i)][u], i,
                           starts[static_cast<std::size_t>(i)][u]});
      return config_from_picks(block_id, std::move(picks));
    }
    int pos = k - 1;
    while (pos >= 0 && assign[static_cast<std::size_t>(pos)] == m - 1) {
      assign[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++assign[static_cast<std::size_t>(pos)];
  }
  return std::nullopt;
}

}  // namespace detail

/// All configurations of a block: every feasible candidate subset of size
/// <= K, each with one canonical witness. The empty configuration comes
/// first. Feasibility is downward closed, so infeasible subsets are never
/// extended.
inline std::vector<Configuration> enumerate_configs(const Instance& inst, const Interval& block,
                                                    int block_id, const std::vector<int>& candidates,
                                                    int K, int m,
                                                    const EnumerateOptions& opt = {}) {
  if (static_cast<int>(candidates.size()) > opt.max_candidates)
    throw CapExceeded("enumerate_configs: " + std::to_string(candidates.size()) +
                      " candidates exceed cap, use column generation");
  std::vector<Configuration> out;
  out.push_back(Configuration{block_id, {}, {}, {}});

  std::vector<std::pair<std::vector<int>, Configuration>> frontier;
  frontier.push_back({{}, out.front()});
  for (int depth = 0; depth < K; ++depth) {
    std::vector<std::pair<std::vector<int>, Configuration>> next;
    for (const auto& [subset, cfg] : frontier) {
      int from = subset.empty() ? 0 : 1 + static_cast<int>(std::find(candidates.begin(),
                                                                     candidates.end(),
                                                                     subset.back()) -
                                                           candidates.begin());
      for (std::size_t c = static_cast<std::size_t>(from); c < candidates.size(); ++c) {
        std::vector<int> bigger = subset;
        bigger.push_back(candidates[c]);
        auto witness = detail::canonical_witness(inst, block, bigger, block_id, m);
        if (!witness) continue;
        out.push_back(*witness);
        if (static_cast<long long>(out.size()) > opt.max_configs)
          throw CapExceeded("enumerate_configs: config cap exceeded, use column generation");
        next.push_back({std::move(bigger), std::move(*witness)});
      }
    }
    frontier = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Color-coding pricing

struct PriceOptions {
  int coloring_budget = 0;     // 0 derives the trial count from fail_prob
  double fail_prob = 1e-4;
  int det_threshold = 8;       // injective coloring when few candidates
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

struct PricedConfig {
  Configuration config;
  double weight = 0.0;
  int trials = 0;
  bool deterministic = false;
};

/// Maximum-weight configuration for one block under job weights `w`
/// (typically 1 - alpha). Candidates with few enough jobs get a single
/// injective coloring (exact); otherwise `coloring_budget` random
/// K-colorings are tried and the best positive find is returned.
inline std::optional<PricedConfig> price_config(const Instance& inst,
                                                const blocks::BlockSuperblockPartition& part,
                                                const std::vector<blocks::JobGeometry>& geo,
                                                int block_id, const std::vector<double>& w, int K,
                                                int m, const PriceOptions& opt = {}) {
  const Interval block = part.B.blocks[static_cast<std::size_t>(block_id)];
  if (block.empty() || K < 1) return std::nullopt;

  std::vector<detail::DpJob> cand;
  for (int j = 0; j < inst.n(); ++j) {
    if (w[static_cast<std::size_t>(j)] <= opt.tol) continue;
    if (!blocks::admissible(part, geo, j, block_id)) continue;
    const Job& job = inst.job(j);
    Tick r = std::max(job.r, block.a), d = std::min(job.d, block.b);
    if (d - r < job.p) continue;
    cand.push_back({j, job.p, r + job.p, d, w[static_cast<std::size_t>(j)], 0});
  }
  if (cand.empty()) return std::nullopt;
  const int n = static_cast<int>(cand.size());

  auto evaluate = [&](int ncolors, int size_cap, bool witness)
      -> std::pair<double, std::optional<Configuration>> {
    detail::ColorDp dp(cand, block.a, block.b, ncolors, size_cap, witness);
    if (m == 1) {
      std::size_t full = (std::size_t{1} << ncolors) - 1;
      double best = 0.0;
      std::size_t arg = 0;
      for (std::size_t a = 0; a <= full; ++a) {
        if (std::popcount(a) > size_cap) continue;
        if (dp.best(a) > best + 1e-15) {
          best = dp.best(a);
          arg = a;
        }
      }
      if (!witness) return {best, std::nullopt};
      return {best, detail::config_from_picks(block_id, dp.witness(arg, 0))};
    }
    detail::MachineCombine comb(dp, ncolors, m, size_cap);
    auto [best, arg] = comb.best(ncolors, size_cap);
    if (!witness) return {best, std::nullopt};
    std::vector<detail::DpPick> picks;
    auto sets = comb.machine_sets(arg);
    for (int i = 0; i < m; ++i)
      for (auto& p : dp.witness(sets[static_cast<std::size_t>(i)], i)) picks.push_back(p);
    return {best, detail::config_from_picks(block_id, std::move(picks))};
  };

  if (n <= std::max(K, opt.det_threshold)) {
    // one injective coloring is perfect for every subset
    for (int i = 0; i < n; ++i) cand[static_cast<std::size_t>(i)].color = i;
    auto [best, cfg] = evaluate(n, std::min(K, n), true);
    if (best <= opt.tol) return std::nullopt;
    return PricedConfig{std::move(*cfg), best, 1, true};
  }

  double p_colorful = detail::colorful_probability(K);
  int trials = opt.coloring_budget > 0 ? opt.coloring_budget
                                       : detail::trials_for(opt.fail_prob, p_colorful);
  double upper = 0.0;
  {
    std::vector<double> ws;
    for (const auto& c : cand) ws.push_back(c.w);
    std::sort(ws.rbegin(), ws.rend());
    for (int i = 0; i < std::min<int>(K, static_cast<int>(ws.size())); ++i) upper += ws[static_cast<std::size_t>(i)];
  }

  double best = 0.0;
  std::uint64_t best_seed = 0;
  int used = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t cseed = derive_seed(opt.seed, "price", static_cast<std::uint64_t>(block_id),
                                      static_cast<std::uint64_t>(trial));
    Rng rng(cseed);
    for (auto& c : cand) c.color = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    auto [v, cfg] = evaluate(K, K, false);
    ++used;
    if (v > best + 1e-12) {
      best = v;
      best_seed = cseed;
    }
    if (best >= upper - 1e-12) break;  // nothing heavier exists
  }
  if (best <= opt.tol) return std::nullopt;
  Rng rng(best_seed);
  for (auto& c : cand) c.color = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
  auto [v, cfg] = evaluate(K, K, true);
  return PricedConfig{std::move(*cfg), v, used, false};
}

// ---------------------------------------------------------------------------
// LP assembly

struct SolveLpOptions {
  enum class Mode { enumerate, colgen };
  Mode mode = Mode::colgen;
  double tol_lp = 1e-9;
  int K_cap = 4;  // configuration size actually used; levels above it run in heuristic mode
  EnumerateOptions enumerate;
  PriceOptions pricing;
  int max_rounds = 500;
  std::uint64_t seed = 1;
};

namespace detail {

struct MasterLp {
  std::vector<int> row_of_block;  // partition block -> row or -1
  std::vector<int> row_of_job;    // job -> row or -1
  int nrows = 0;
  std::vector<lp::Sense> sense;
  std::vector<double> rhs;
};

inline lp::Column to_column(const MasterLp& master, const Configuration& c) {
  lp::Column col;
  col.cost = static_cast<double>(c.size());
  col.rows.push_back({master.row_of_block[static_cast<std::size_t>(c.block)], 1.0});
  for (int j : c.jobs)
    col.rows.push_back({master.row_of_job[static_cast<std::size_t>(j)], 1.0});
  return col;
}

inline std::string signature(const Configuration& c) {
  std::string s = std::to_string(c.block) + ":";
  for (int j : c.jobs) s += std::to_string(j) + ",";
  return s;
}

}  // namespace detail

/// Candidate jobs of a block: admissible (boundary or spanned-superblock)
/// and actually fitting inside the block.
inline std::vector<int> block_candidates(const Instance& inst,
                                         const blocks::BlockSuperblockPartition& part,
                                         const std::vector<blocks::JobGeometry>& geo,
                                         int block_id) {
  std::vector<int> out;
  const Interval block = part.B.blocks[static_cast<std::size_t>(block_id)];
  if (block.empty()) return out;
  for (int j = 0; j < inst.n(); ++j) {
    if (!blocks::admissible(part, geo, j, block_id)) continue;
    if (intersection_length(inst.job(j).window(), block) < inst.job(j).p) continue;
    out.push_back(j);
  }
  return out;
}

/// Solves the configuration LP of one partition level. Column generation
/// starts from the per-block empty configurations (they absorb the
/// convexity slack) and prices with weights 1 - alpha until no block
/// yields a column with positive reduced cost.
inline LpSolution solve_lp(const Instance& inst, const blocks::BlockSuperblockPartition& part,
                           const std::vector<blocks::JobGeometry>& geo,
                           const SolveLpOptions& opt = {}) {
  LpSolution sol;
  sol.effective_K = static_cast<int>(std::min<long long>(part.K, opt.K_cap));
  sol.heuristic = part.heuristic || part.K > opt.K_cap;
  const int K = sol.effective_K;
  const int m = inst.m;

  detail::MasterLp master;
  master.row_of_block.assign(static_cast<std::size_t>(part.B.size()), -1);
  master.row_of_job.assign(static_cast<std::size_t>(inst.n()), -1);
  std::vector<std::vector<int>> cands(static_cast<std::size_t>(part.B.size()));
  for (int b = 0; b < part.B.size(); ++b) {
    if (part.B.is_dummy(b)) continue;
    master.row_of_block[static_cast<std::size_t>(b)] = master.nrows++;
    master.sense.push_back(lp::Sense::eq);
    master.rhs.push_back(1.0);
    cands[static_cast<std::size_t>(b)] = block_candidates(inst, part, geo, b);
  }
  for (int b = 0; b < part.B.size(); ++b)
    for (int j : cands[static_cast<std::size_t>(b)])
      if (master.row_of_job[static_cast<std::size_t>(j)] < 0) {
        master.row_of_job[static_cast<std::size_t>(j)] = master.nrows++;
        master.sense.push_back(lp::Sense::le);
        master.rhs.push_back(1.0);
      }

  std::set<std::string> seen;
  auto add_config = [&](Configuration c) {
    auto sig = detail::signature(c);
    if (!seen.insert(sig).second) return false;
    sol.configs.push_back(std::move(c));
    return true;
  };
  for (int b = 0; b < part.B.size(); ++b)
    if (!part.B.is_dummy(b)) add_config(Configuration{b, {}, {}, {}});
  const int n_empty = static_cast<int>(sol.configs.size());

  if (opt.mode == SolveLpOptions::Mode::enumerate) {
    for (int b = 0; b < part.B.size(); ++b) {
      if (part.B.is_dummy(b)) continue;
      for (auto& c : enumerate_configs(inst, part.B.blocks[static_cast<std::size_t>(b)], b,
                                       cands[static_cast<std::size_t>(b)], K, m, opt.enumerate))
        add_config(std::move(c));
    }
  }

  auto run_master = [&](bool bland) {
    std::vector<lp::Column> cols;
    cols.reserve(sol.configs.size());
    for (const auto& c : sol.configs) cols.push_back(detail::to_column(master, c));
    std::vector<int> basis(static_cast<std::size_t>(master.nrows), -1);
    for (int e = 0; e < n_empty; ++e)
      basis[static_cast<std::size_t>(
          master.row_of_block[static_cast<std::size_t>(sol.configs[static_cast<std::size_t>(e)]
                                                           .block)])] = e;
    lp::SimplexOptions sopt;
    sopt.tol = opt.tol_lp;
    sopt.bland = bland;
    return lp::simplex_max(master.nrows, master.sense, master.rhs, cols, basis, sopt);
  };

  auto solve_and_repair = [&]() {
    auto healthy = [&](const lp::SimplexResult& r) {
      if (r.status != lp::SimplexStatus::optimal) return false;
      for (double v : r.x)
        if (v < -1e-6) return false;
      std::vector<double> row_sum(static_cast<std::size_t>(master.nrows), 0.0);
      for (std::size_t c = 0; c < sol.configs.size(); ++c) {
        row_sum[static_cast<std::size_t>(
            master.row_of_block[static_cast<std::size_t>(sol.configs[c].block)])] += r.x[c];
        for (int j : sol.configs[c].jobs)
          row_sum[static_cast<std::size_t>(master.row_of_job[static_cast<std::size_t>(j)])] +=
              r.x[c];
      }
      for (int row = 0; row < master.nrows; ++row) {
        double s = row_sum[static_cast<std::size_t>(row)];
        if (master.sense[static_cast<std::size_t>(row)] == lp::Sense::eq ? std::abs(s - 1.0) > 1e-6
                                                                         : s > 1.0 + 1e-6)
          return false;
      }
      return true;
    };
    auto res = run_master(false);
    if (!healthy(res)) res = run_master(true);  // basis repair: re-solve with Bland's rule
    if (res.status != lp::SimplexStatus::optimal || !healthy(res))
      throw std::runtime_error("configuration LP: simplex failed to converge");
    return res;
  };

  lp::SimplexResult res = solve_and_repair();

  if (opt.mode == SolveLpOptions::Mode::colgen) {
    PriceOptions popt = opt.pricing;
    for (sol.rounds = 1; sol.rounds <= opt.max_rounds; ++sol.rounds) {
      bool improved = false;
      std::vector<double> w(static_cast<std::size_t>(inst.n()), 0.0);
      for (int j = 0; j < inst.n(); ++j) {
        int row = master.row_of_job[static_cast<std::size_t>(j)];
        double alpha = row >= 0 ? std::max(0.0, res.duals[static_cast<std::size_t>(row)]) : 0.0;
        w[static_cast<std::size_t>(j)] = 1.0 - alpha;
      }
      for (int b = 0; b < part.B.size(); ++b) {
        int row = master.row_of_block[static_cast<std::size_t>(b)];
        if (row < 0) continue;
        double beta = std::max(0.0, res.duals[static_cast<std::size_t>(row)]);
        popt.seed = derive_seed(opt.seed, "colgen", static_cast<std::uint64_t>(sol.rounds),
                                static_cast<std::uint64_t>(b));
        auto priced = price_config(inst, part, geo, b, w, K, m, popt);
        if (!priced) continue;
        if (priced->weight > beta + opt.tol_lp && add_config(std::move(priced->config)))
          improved = true;
      }
      if (!improved) break;
      res = solve_and_repair();
    }
    sol.iteration_capped = sol.rounds > opt.max_rounds;
  }

  sol.x = res.x;
  sol.objective = res.objective;
  sol.optimal = !sol.iteration_capped;
  sol.alpha.assign(static_cast<std::size_t>(inst.n()), 0.0);
  for (int j = 0; j < inst.n(); ++j) {
    int row = master.row_of_job[static_cast<std::size_t>(j)];
    if (row >= 0) sol.alpha[static_cast<std::size_t>(j)] = std::max(0.0, res.duals[static_cast<std::size_t>(row)]);
  }
  sol.beta.assign(static_cast<std::size_t>(part.B.size()), 0.0);
  for (int b = 0; b < part.B.size(); ++b) {
    int row = master.row_of_block[static_cast<std::size_t>(b)];
    if (row >= 0) sol.beta[static_cast<std::size_t>(b)] = std::max(0.0, res.duals[static_cast<std::size_t>(row)]);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Marginals

struct Marginals {
  std::vector<double> y;                         // total per job
  std::vector<double> yL, yR;                    // boundary-block masses
  std::vector<std::map<int, double>> yS;         // per job: spanned superblock -> mass
  std::vector<std::map<int, double>> yB;         // per job: block -> mass
  std::vector<std::map<long long, double>> yiB;  // per job: block * m + machine -> mass
};

/// Per-job fractional masses derived from an LP solution. The spanned-
/// superblock mass excludes the job's boundary blocks, so that
/// y_j = y_{j,L} + y_{j,R} + sum_S y_{j,S} holds exactly even when a
/// window boundary coincides with a block boundary.
inline Marginals marginals(const Instance& inst, const blocks::BlockSuperblockPartition& part,
                           const std::vector<blocks::JobGeometry>& geo, const LpSolution& sol) {
  Marginals out;
  const std::size_t n = static_cast<std::size_t>(inst.n());
  out.y.assign(n, 0.0);
  out.yL.assign(n, 0.0);
  out.yR.assign(n, 0.0);
  out.yS.assign(n, {});
  out.yB.assign(n, {});
  out.yiB.assign(n, {});
  const int m = inst.m;

  for (std::size_t c = 0; c < sol.configs.size(); ++c) {
    double xv = sol.x[c];
    if (xv <= 0.0) continue;
    const Configuration& cfg = sol.configs[c];
    for (int u = 0; u < cfg.size(); ++u) {
      std::size_t j = static_cast<std::size_t>(cfg.jobs[static_cast<std::size_t>(u)]);
      out.y[j] += xv;
      out.yB[j][cfg.block] += xv;
      out.yiB[j][static_cast<long long>(cfg.block) * m +
                 cfg.machine[static_cast<std::size_t>(u)]] += xv;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const blocks::JobGeometry& g = geo[j];
    if (!g.schedulable) continue;
    auto mass = [&](int b) {
      auto it = out.yB[j].find(b);
      return it == out.yB[j].end() ? 0.0 : it->second;
    };
    out.yL[j] = g.release_block >= 0 ? mass(g.release_block) : 0.0;
    out.yR[j] = (g.deadline_block >= 0 && g.deadline_block != g.release_block)
                    ? mass(g.deadline_block)
                    : 0.0;
    for (int s : g.spanned_superblocks) {
      double acc = 0.0;
      for (const auto& [b, v] : out.yB[j]) {
        if (b == g.release_block || b == g.deadline_block) continue;
        if (part.super_of_block[static_cast<std::size_t>(b)] == s) acc += v;
      }
      out.yS[j][s] = acc;
    }
  }
  return out;
}

inline json lp_dump(const Instance& inst, const LpSolution& sol) {
  json doc;
  doc["objective"] = sol.objective;
  doc["optimal"] = sol.optimal;
  doc["heuristic"] = sol.heuristic;
  doc["K"] = sol.effective_K;
  doc["columns"] = json::array();
  for (std::size_t c = 0; c < sol.configs.size(); ++c) {
    const Configuration& cfg = sol.configs[c];
    json col;
    col["block"] = cfg.block;
    col["jobs"] = json::array();
    for (int j : cfg.jobs) col["jobs"].push_back(inst.job(j).id);
    col["x"] = sol.x[c];
    doc["columns"].push_back(std::move(col));
  }
  doc["alpha"] = json::object();
  for (int j = 0; j < inst.n(); ++j)
    doc["alpha"][inst.job(j).id] = sol.alpha[static_cast<std::size_t>(j)];
  doc["beta"] = sol.beta;
  return doc;
}

// ---------------------------------------------------------------------------
// Exact solver for instances with small optimum

struct ExactOptions {
  int k_max = 20;
  double fail_prob = 1e-6;
  int det_threshold = 8;
  double work_cap = 1e10;  // DP cell-operations before giving up
  std::uint64_t seed = 1;
};

struct ExactResult {
  Schedule schedule;
  bool exact = false;            // saturated, or the deepening stopped below the caps
  bool budget_exceeded = false;  // k_max or work cap hit first: lower bound only
  int deepest_k = 0;
};

/// Iterative-deepening color-coding over the whole horizon with unit
/// weights: seeks a feasible k-job schedule for k = 1, 2, ... and stops at
/// the first k with no find. Few candidates are handled by one injective
/// coloring, which settles every k at once.
inline ExactResult exact_small_opt(const Instance& inst, const ExactOptions& opt = {}) {
  ExactResult out;
  std::vector<int> ids = inst.schedulable_jobs();
  const int n = static_cast<int>(ids.size());
  if (n == 0) {
    out.exact = true;
    return out;
  }
  const int m = inst.m;

  std::vector<detail::DpJob> cand;
  for (int j : ids) {
    const Job& job = inst.job(j);
    cand.push_back({j, job.p, job.r + job.p, job.d, 1.0, 0});
  }

  auto evaluate = [&](int ncolors, int size_cap, bool witness)
      -> std::pair<double, Schedule> {
    detail::ColorDp dp(cand, 0, inst.T, ncolors, size_cap, witness);
    std::vector<detail::DpPick> picks;
    double best = 0.0;
    if (m == 1) {
      std::size_t arg = 0;
      const std::size_t states = std::size_t{1} << ncolors;
      for (std::size_t a = 0; a < states; ++a) {
        if (std::popcount(a) > size_cap) continue;
        if (dp.best(a) > best + 1e-15) {
          best = dp.best(a);
          arg = a;
        }
      }
      if (witness) picks = dp.witness(arg, 0);
    } else {
      detail::MachineCombine comb(dp, ncolors, m, size_cap);
      auto [v, arg] = comb.best(ncolors, size_cap);
      best = v;
      if (witness) {
        auto sets = comb.machine_sets(arg);
        for (int i = 0; i < m; ++i)
          for (auto& p : dp.witness(sets[static_cast<std::size_t>(i)], i)) picks.push_back(p);
      }
    }
    Schedule sched;
    for (const auto& p : picks) sched.add(p.job, p.machine, p.start);
    return {best, std::move(sched)};
  };

  if (n <= opt.det_threshold) {
    for (int i = 0; i < n; ++i) cand[static_cast<std::size_t>(i)].color = i;
    auto [best, sched] = evaluate(n, n, true);
    out.schedule = std::move(sched);
    out.exact = true;
    out.deepest_k = out.schedule.size();
    return out;
  }

  double work = 0.0;
  const int k_top = std::min(opt.k_max, n);
  for (int k = 1; k <= k_top; ++k) {
    out.deepest_k = k;
    if (k >= n) {
      for (int i = 0; i < n; ++i) cand[static_cast<std::size_t>(i)].color = i;
      auto [best, sched] = evaluate(n, n, true);
      if (sched.size() > out.schedule.size()) out.schedule = std::move(sched);
      out.exact = true;
      return out;
    }
    double p_colorful = detail::colorful_probability(k);
    int trials = detail::trials_for(opt.fail_prob, p_colorful);
    double per_trial = std::ldexp(static_cast<double>((inst.T + 1) * n), k) +
                       (m > 1 ? std::pow(3.0, k) * m : 0.0);
    if (work + per_trial * trials > opt.work_cap) {
      out.budget_exceeded = true;
      return out;
    }
    bool found = false;
    for (int trial = 0; trial < trials && !found; ++trial) {
      Rng rng(derive_seed(opt.seed, "exact", static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(trial)));
      for (auto& c : cand) c.color = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      work += per_trial;
      auto [best, sched] = evaluate(k, k, false);
      if (best >= static_cast<double>(k) - 0.5) {
        auto [v2, sched2] = evaluate(k, k, true);
        out.schedule = std::move(sched2);
        found = true;
      }
    }
    if (!found) {
      out.exact = true;  // no k-schedule found at full budget, so |OPT| = k-1 (whp)
      return out;
    }
  }
  out.exact = out.schedule.size() == n;
  out.budget_exceeded = !out.exact;
  return out;
}

}  // namespace tput::conflp
