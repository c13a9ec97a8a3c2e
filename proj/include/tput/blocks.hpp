// Horizon partitioning: elementary blocks from the iterated greedy
// construction, the nested block/superblock hierarchy built on top of
// them, per-job boundary/spanning geometry, and the multi-machine lift
// that folds a concatenated per-machine horizon back onto [0, T).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tput/core.hpp"
#include "tput/greedy.hpp"

namespace tput::blocks {

enum class BlockClass { full, plain };  // class I carries a fixed schedule, class II does not

struct BlockPartition {
  Tick T = 0;
  std::vector<Interval> blocks;        // consecutive, disjoint, union [0,T); trailing [T,T) dummies allowed
  std::vector<BlockClass> clazz;       // provenance tag per block
  std::vector<int> fixed_job_count;    // jobs of the fixed class-I schedule per block

  int size() const { return static_cast<int>(blocks.size()); }
  bool is_dummy(int b) const { return blocks[static_cast<std::size_t>(b)].empty(); }
};

struct BlockSuperblockPartition {
  BlockPartition B;  // blocks
  BlockPartition S;  // superblocks, each a union of consecutive blocks of B
  long long K = 1;   // per-block job cap of this level
  int level = 1;
  long long delta = 1;
  bool heuristic = false;              // a configured cap bound during construction
  std::vector<int> super_of_block;     // block index -> superblock index
};

struct JobGeometry {
  bool schedulable = false;
  int release_block = -1;   // block containing r_j
  int deadline_block = -1;  // block [s,t) with d_j in (s,t]
  bool local = false;       // tw(j) inside one block
  std::vector<int> spanned_superblocks;  // S with S inside tw(j)
};

class OverflowGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int validate_inv_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  double inv = 1.0 / eps;
  long long r = std::llround(inv);
  if (r < 1 || std::abs(inv - static_cast<double>(r)) > 1e-9)
    throw std::invalid_argument("1/eps must be an integer, got eps=" + std::to_string(eps));
  return static_cast<int>(r);
}

namespace detail {

constexpr long long kSat = std::numeric_limits<long long>::max() / 4;

inline long long sat_mul(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

inline long long sat_pow(long long base, int e) {
  long long r = 1;
  while (e-- > 0) r = sat_mul(r, base);
  return r;
}

struct CoreBlock {
  Interval iv;
  bool full = false;
  std::vector<std::pair<int, Interval>> fixed;  // (candidate slot, run interval), start order
};

// Cuts `block` after every `chunk`-th fixed run, reusing the runs already
// attached to it. Pieces with fixed runs are class I; an empty-tail piece
// stays class II.
inline std::vector<CoreBlock> cut_block(const CoreBlock& block, long long chunk) {
  std::vector<CoreBlock> out;
  Tick lo = block.iv.a;
  std::size_t i = 0;
  while (i < block.fixed.size()) {
    std::size_t j = std::min(block.fixed.size(), i + static_cast<std::size_t>(chunk));
    Tick hi = (j == block.fixed.size()) ? block.iv.b : block.fixed[j - 1].second.b;
    CoreBlock piece{{lo, hi}, true, {}};
    piece.fixed.assign(block.fixed.begin() + static_cast<std::ptrdiff_t>(i),
                       block.fixed.begin() + static_cast<std::ptrdiff_t>(j));
    if (!piece.iv.empty()) out.push_back(std::move(piece));
    lo = hi;
    i = j;
  }
  if (lo < block.iv.b) out.push_back(CoreBlock{{lo, block.iv.b}, false, {}});
  if (out.empty()) out.push_back(CoreBlock{block.iv, false, {}});
  return out;
}

// The iterated greedy block construction over one timeline [0, H).
// Candidates may carry several admissible windows. Returns blocks in
// order; class-I blocks carry their fixed runs.
inline std::vector<CoreBlock> build_elementary(const std::vector<greedy::detail::Candidate>& cands,
                                               Tick H, long long ktilde, int iterations,
                                               long long k0) {
  std::vector<bool> in_pool(cands.size(), true);
  auto pool = [&]() {
    std::vector<greedy::detail::Candidate> out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (!in_pool[i]) continue;
      auto c = cands[i];
      c.job = static_cast<int>(i);  // job field doubles as the slot index here
      out.push_back(std::move(c));
    }
    return out;
  };
  auto sweep_block = [&](CoreBlock& block, long long threshold) -> bool {
    std::vector<greedy::detail::Timeline> lanes(1);
    auto cur = pool();
    auto placed = greedy::detail::run_eft(cur, lanes, block.iv);
    if (static_cast<long long>(placed.size()) <= threshold) return false;
    std::sort(placed.begin(), placed.end(),
              [](const auto& x, const auto& y) { return x.start < y.start; });
    block.full = true;
    for (const auto& pl : placed) {
      int slot = cur[static_cast<std::size_t>(pl.cand)].job;
      block.fixed.push_back({slot, {pl.start, pl.finish}});
      in_pool[static_cast<std::size_t>(slot)] = false;
    }
    return true;
  };

  std::vector<CoreBlock> blocks{CoreBlock{{0, H}, false, {}}};
  long long threshold = sat_pow(ktilde, 3);
  if (sweep_block(blocks[0], threshold)) blocks = cut_block(blocks[0], threshold);

  for (int i = 2; i <= iterations; ++i) {
    threshold = sat_pow(ktilde, i + 2);
    bool changed = false;
    std::vector<CoreBlock> next;
    for (auto& block : blocks) {
      if (block.full || block.iv.empty()) {
        next.push_back(std::move(block));
        continue;
      }
      if (sweep_block(block, threshold)) {
        changed = true;
        for (auto& piece : cut_block(block, threshold)) next.push_back(std::move(piece));
      } else {
        next.push_back(std::move(block));
      }
    }
    blocks = std::move(next);
    if (!changed) break;  // thresholds only grow, later sweeps are identical
  }

  std::vector<CoreBlock> out;
  for (auto& block : blocks) {
    if (block.full && static_cast<long long>(block.fixed.size()) > k0) {
      for (auto& piece : cut_block(block, k0)) out.push_back(std::move(piece));
    } else {
      out.push_back(std::move(block));
    }
  }
  return out;
}

inline BlockPartition to_partition(const std::vector<CoreBlock>& core, Tick H) {
  BlockPartition part;
  part.T = H;
  for (const auto& b : core) {
    part.blocks.push_back(b.iv);
    part.clazz.push_back(b.full ? BlockClass::full : BlockClass::plain);
    part.fixed_job_count.push_back(static_cast<int>(b.fixed.size()));
  }
  if (part.blocks.empty()) {
    part.blocks.push_back({0, H});
    part.clazz.push_back(BlockClass::plain);
    part.fixed_job_count.push_back(0);
  }
  return part;
}

}  // namespace detail

struct ElementaryOptions {
  long long K0 = 64;  // per-block cap for the final class-I subdivision
};

/// Single-machine elementary blocks: greedy over [0, T), a cut after
/// every Ktilde^3 scheduled jobs (Ktilde = 6/eps), then left-to-right
/// refinement sweeps with growing thresholds, and a final subdivision so
/// the fixed schedule places at most K0 jobs per block.
inline BlockPartition elementary_blocks(const Instance& inst, double eps,
                                        const ElementaryOptions& opt = {}) {
  if (inst.m != 1) throw std::invalid_argument("elementary_blocks: needs m = 1");
  int inv = validate_inv_eps(eps);
  if (inv < 6) throw std::invalid_argument("elementary_blocks: needs eps <= 1/6");
  long long ktilde = 6LL * inv;
  int iterations =
      static_cast<int>(std::ceil(static_cast<double>(ktilde) * std::log(static_cast<double>(ktilde)))) + 1;

  std::vector<greedy::detail::Candidate> cands;
  for (int i = 0; i < inst.n(); ++i) {
    const Job& j = inst.job(i);
    if (!j.schedulable()) continue;
    cands.push_back({i, inst.id_rank[static_cast<std::size_t>(i)], j.p, {j.window()}});
  }
  auto core = detail::build_elementary(cands, inst.T, ktilde, iterations, opt.K0);
  return detail::to_partition(core, inst.T);
}

/// Multi-machine lift: runs the same construction with eps' = eps/(2m) on
/// the concatenated horizon [0, mT), where job j may also run in
/// [r_j + (i-1)T, d_j + (i-1)T) for each machine i, then reduces all cut
/// points modulo T.
inline BlockPartition mm_elementary_blocks(const Instance& inst, double eps,
                                           const ElementaryOptions& opt = {}) {
  if (inst.m < 1) throw std::invalid_argument("mm_elementary_blocks: needs m >= 1");
  int inv = validate_inv_eps(eps);
  if (inv < 6) throw std::invalid_argument("mm_elementary_blocks: needs eps <= 1/6");
  const Tick T = inst.T;
  long long ktilde = 6LL * 2 * inst.m * inv;  // 6/eps' with eps' = eps/(2m)
  int iterations =
      static_cast<int>(std::ceil(static_cast<double>(ktilde) * std::log(static_cast<double>(ktilde)))) + 1;

  std::vector<greedy::detail::Candidate> cands;
  for (int i = 0; i < inst.n(); ++i) {
    const Job& j = inst.job(i);
    if (!j.schedulable()) continue;
    greedy::detail::Candidate c{i, inst.id_rank[static_cast<std::size_t>(i)], j.p, {}};
    for (int machine = 0; machine < inst.m; ++machine) {
      Tick shift = static_cast<Tick>(machine) * T;
      c.windows.push_back({j.r + shift, j.d + shift});
    }
    cands.push_back(std::move(c));
  }
  auto core =
      detail::build_elementary(cands, T * static_cast<Tick>(inst.m), ktilde, iterations, opt.K0);

  std::set<Tick> cuts{0, T};
  for (const auto& b : core) {
    for (Tick t : {b.iv.a, b.iv.b}) {
      if (T > 0) {
        Tick mod = t % T;
        if (mod != 0) cuts.insert(mod);
      }
    }
  }
  BlockPartition part;
  part.T = T;
  Tick prev = 0;
  for (Tick t : cuts) {
    if (t == 0) continue;
    part.blocks.push_back({prev, t});
    part.clazz.push_back(BlockClass::plain);
    part.fixed_job_count.push_back(0);
    prev = t;
  }
  if (part.blocks.empty()) {
    part.blocks.push_back({0, T});
    part.clazz.push_back(BlockClass::plain);
    part.fixed_job_count.push_back(0);
  }
  return part;
}

struct PartitionOptions {
  long long K0 = 64;
  long long max_merge_factor = 64;  // cap on the 2*K0/eps^5 merge arity
  long long pad_limit = 4096;       // guard on the dummy-padding multiple
};

/// Builds the 1/eps nested levels: level 1 merges 2*Delta consecutive
/// elementary blocks, each further level merges `F` blocks of the level
/// below, and each superblock merges `F` blocks of its own level, where
/// F = 2*K0/eps^5 (capped by max_merge_factor). B0 is padded with [T,T)
/// dummies so every level closes exactly.
inline std::vector<BlockSuperblockPartition> build_partitions(const BlockPartition& b0, double eps,
                                                              long long delta, long long k0,
                                                              const PartitionOptions& opt = {}) {
  int levels = validate_inv_eps(eps);
  if (delta < 1) throw std::invalid_argument("build_partitions: Delta must be >= 1");
  if (k0 < 1) throw std::invalid_argument("build_partitions: K0 must be >= 1");

  long long f_raw = detail::sat_mul(2 * k0, detail::sat_pow(levels, 5));
  long long f = std::min(f_raw, opt.max_merge_factor);
  bool heuristic = f < f_raw || k0 < opt.K0;
  long long pad_multiple = detail::sat_mul(2 * delta, detail::sat_pow(f, levels));
  if (pad_multiple > opt.pad_limit)
    throw OverflowGuard("build_partitions: padding multiple " + std::to_string(pad_multiple) +
                        " exceeds limit " + std::to_string(opt.pad_limit) +
                        " (reduce K0, Delta or max_merge_factor)");

  const Tick T = b0.T;
  std::vector<Interval> padded = b0.blocks;
  while (static_cast<long long>(padded.size()) % pad_multiple != 0) padded.push_back({T, T});

  auto merge = [&](const std::vector<Interval>& fine, long long arity) {
    std::vector<Interval> coarse;
    std::vector<int> group_of(fine.size());
    for (std::size_t i = 0; i < fine.size(); i += static_cast<std::size_t>(arity)) {
      Interval u = fine[i];
      for (std::size_t k = 1; k < static_cast<std::size_t>(arity); ++k)
        u.b = std::max(u.b, fine[i + k].b);
      for (std::size_t k = 0; k < static_cast<std::size_t>(arity); ++k)
        group_of[i + k] = static_cast<int>(coarse.size());
      coarse.push_back(u);
    }
    return std::pair{coarse, group_of};
  };

  auto as_partition = [&](const std::vector<Interval>& ivs) {
    BlockPartition p;
    p.T = T;
    p.blocks = ivs;
    p.clazz.assign(ivs.size(), BlockClass::plain);
    p.fixed_job_count.assign(ivs.size(), 0);
    return p;
  };

  std::vector<BlockSuperblockPartition> out;
  std::vector<Interval> current = merge(padded, 2 * delta).first;
  for (int level = 1; level <= levels; ++level) {
    auto [supers, super_of] = merge(current, f);
    BlockSuperblockPartition part;
    part.B = as_partition(current);
    part.S = as_partition(supers);
    part.super_of_block = super_of;
    part.level = level;
    part.delta = delta;
    part.K = detail::sat_mul(detail::sat_mul(2 * delta, k0), detail::sat_pow(f_raw, level - 1));
    part.heuristic = heuristic;
    out.push_back(std::move(part));
    current = supers;
  }
  return out;
}

/// Per-job boundary blocks, local flag and spanned superblocks.
/// Unschedulable jobs get empty geometry.
inline std::vector<JobGeometry> job_geometry(const Instance& inst,
                                             const BlockSuperblockPartition& part) {
  std::vector<JobGeometry> out(static_cast<std::size_t>(inst.n()));

  auto block_of = [&](const BlockPartition& p, Tick t) {
    for (int b = 0; b < p.size(); ++b)
      if (!p.is_dummy(b) && p.blocks[static_cast<std::size_t>(b)].contains(t)) return b;
    return -1;
  };

  for (int i = 0; i < inst.n(); ++i) {
    const Job& j = inst.job(i);
    JobGeometry& g = out[static_cast<std::size_t>(i)];
    if (!j.schedulable()) continue;
    g.schedulable = true;
    g.release_block = block_of(part.B, j.r);
    g.deadline_block = block_of(part.B, j.d - 1);  // d in (s,t] iff d-1 in [s,t)
    g.local = g.release_block == g.deadline_block;
    for (int s = 0; s < part.S.size(); ++s) {
      const Interval& sb = part.S.blocks[static_cast<std::size_t>(s)];
      if (!sb.empty() && j.window().contains(sb)) g.spanned_superblocks.push_back(s);
    }
  }
  return out;
}

/// True iff `block` may host job `job` in a configuration: boundary block
/// or a block of a spanned superblock.
inline bool admissible(const BlockSuperblockPartition& part, const std::vector<JobGeometry>& geo,
                       int job, int block) {
  const JobGeometry& g = geo[static_cast<std::size_t>(job)];
  if (!g.schedulable) return false;
  if (block == g.release_block || block == g.deadline_block) return true;
  int s = part.super_of_block[static_cast<std::size_t>(block)];
  return std::find(g.spanned_superblocks.begin(), g.spanned_superblocks.end(), s) !=
         g.spanned_superblocks.end();
}

inline json partition_dump(const std::vector<BlockSuperblockPartition>& parts) {
  json doc = json::array();
  for (const auto& part : parts) {
    json level;
    level["level"] = part.level;
    level["delta"] = part.delta;
    level["K"] = part.K;
    level["heuristic"] = part.heuristic;
    auto ivs = [](const BlockPartition& p) {
      json arr = json::array();
      for (const auto& iv : p.blocks) arr.push_back(json::array({iv.a, iv.b}));
      return arr;
    };
    level["blocks"] = ivs(part.B);
    level["superblocks"] = ivs(part.S);
    level["block_superblock"] = part.super_of_block;
    doc.push_back(std::move(level));
  }
  return doc;
}

}  // namespace tput::blocks
