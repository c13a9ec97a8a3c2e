// Dense revised simplex for small maximization LPs with <= and == rows.
//
// Built for the configuration master LP: the caller supplies an initial
// feasible basis of unit columns (one structural unit column per == row,
// the implicit slack for <= rows), so no phase-1 is ever needed. Dantzig
// pricing with a Bland fallback against cycling; the basis inverse is
// refactorized periodically.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tput::lp {

enum class Sense { le, eq };

struct Column {
  double cost = 0.0;
  std::vector<std::pair<int, double>> rows;  // (row index, coefficient)
};

struct SimplexOptions {
  double tol = 1e-9;
  int max_iterations = 50000;
  int refactor_every = 64;
  bool bland = false;  // start directly with Bland's rule
};

enum class SimplexStatus { optimal, iteration_limit, numerical };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::numerical;
  double objective = 0.0;
  std::vector<double> x;      // per structural column
  std::vector<double> duals;  // per row
  int iterations = 0;
};

namespace detail {

class DenseInverse {
 public:
  bool factor(const std::vector<std::vector<double>>& cols) {
    const std::size_t m = cols.size();
    inv_.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) inv_[i][i] = 1.0;
    auto a = std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0));
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t r = 0; r < m; ++r) a[r][c] = cols[c][r];
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      for (std::size_t r = k + 1; r < m; ++r)
        if (std::abs(a[r][k]) > std::abs(a[piv][k])) piv = r;
      if (std::abs(a[piv][k]) < 1e-12) return false;
      std::swap(a[k], a[piv]);
      std::swap(inv_[k], inv_[piv]);
      double d = a[k][k];
      for (std::size_t c = 0; c < m; ++c) {
        a[k][c] /= d;
        inv_[k][c] /= d;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == k) continue;
        double f = a[r][k];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m; ++c) {
          a[r][c] -= f * a[k][c];
          inv_[r][c] -= f * inv_[k][c];
        }
      }
    }
    return true;
  }

  std::vector<double> apply(const std::vector<double>& v) const {
    const std::size_t m = inv_.size();
    std::vector<double> out(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += inv_[r][c] * v[c];
      out[r] = s;
    }
    return out;
  }

  std::vector<double> apply_transposed(const std::vector<double>& v) const {
    const std::size_t m = inv_.size();
    std::vector<double> out(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += inv_[r][c] * v[r];
      out[c] = s;
    }
    return out;
  }

  // Pivot update: basis column `row` replaced by a column whose
  // transformed image is u.
  void pivot(const std::vector<double>& u, std::size_t row) {
    const std::size_t m = inv_.size();
    double d = u[row];
    for (std::size_t c = 0; c < m; ++c) inv_[row][c] /= d;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || u[r] == 0.0) continue;
      double f = u[r];
      for (std::size_t c = 0; c < m; ++c) inv_[r][c] -= f * inv_[row][c];
    }
  }

 private:
  std::vector<std::vector<double>> inv_;
};

}  // namespace detail

/// Maximizes cost^T x over {x >= 0 : rows with the given senses and rhs}.
/// `initial_basis[row]` names a structural column that is the unit vector
/// of that row, or -1 to use the slack of a <= row.
inline SimplexResult simplex_max(int nrows, const std::vector<Sense>& sense,
                                 const std::vector<double>& rhs,
                                 const std::vector<Column>& structural,
                                 const std::vector<int>& initial_basis,
                                 const SimplexOptions& opt = {}) {
  const std::size_t m = static_cast<std::size_t>(nrows);
  const int nstruct = static_cast<int>(structural.size());

  // internal dense columns: structural first, then one slack per <= row
  std::vector<std::vector<double>> dense;
  std::vector<double> cost;
  dense.reserve(structural.size() + m);
  for (const Column& col : structural) {
    std::vector<double> d(m, 0.0);
    for (auto [r, v] : col.rows) d[static_cast<std::size_t>(r)] = v;
    dense.push_back(std::move(d));
    cost.push_back(col.cost);
  }
  std::vector<int> slack_col(m, -1);
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != Sense::le) continue;
    std::vector<double> d(m, 0.0);
    d[r] = 1.0;
    slack_col[r] = static_cast<int>(dense.size());
    dense.push_back(std::move(d));
    cost.push_back(0.0);
  }
  const int ncols = static_cast<int>(dense.size());

  std::vector<int> basis(m);
  std::vector<bool> basic(static_cast<std::size_t>(ncols), false);
  for (std::size_t r = 0; r < m; ++r) {
    int b = initial_basis[r] >= 0 ? initial_basis[r] : slack_col[r];
    if (b < 0) throw std::invalid_argument("simplex_max: equality row without a basis column");
    basis[r] = b;
    basic[static_cast<std::size_t>(b)] = true;
  }

  detail::DenseInverse binv;
  auto refactor = [&]() {
    std::vector<std::vector<double>> bcols;
    bcols.reserve(m);
    for (std::size_t r = 0; r < m; ++r) bcols.push_back(dense[static_cast<std::size_t>(basis[r])]);
    return binv.factor(bcols);
  };
  if (!refactor()) return {SimplexStatus::numerical, 0.0, {}, {}, 0};

  std::vector<double> xb = binv.apply(rhs);
  bool bland = opt.bland;
  int degenerate_streak = 0;
  SimplexResult res;

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (res.iterations > 0 && res.iterations % opt.refactor_every == 0) {
      if (!refactor()) return {SimplexStatus::numerical, 0.0, {}, {}, res.iterations};
      xb = binv.apply(rhs);
    }
    std::vector<double> cb(m);
    for (std::size_t r = 0; r < m; ++r) cb[r] = cost[static_cast<std::size_t>(basis[r])];
    std::vector<double> y = binv.apply_transposed(cb);

    int enter = -1;
    double best = opt.tol;
    for (int c = 0; c < ncols; ++c) {
      if (basic[static_cast<std::size_t>(c)]) continue;
      double d = cost[static_cast<std::size_t>(c)];
      const auto& col = dense[static_cast<std::size_t>(c)];
      for (std::size_t r = 0; r < m; ++r) d -= y[r] * col[r];
      if (d > best) {
        enter = c;
        best = d;
        if (bland) break;
      }
    }
    if (enter < 0) {
      res.status = SimplexStatus::optimal;
      break;
    }

    std::vector<double> u = binv.apply(dense[static_cast<std::size_t>(enter)]);
    int leave = -1;
    double step = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (u[r] <= opt.tol) continue;
      double ratio = std::max(0.0, xb[r]) / u[r];
      if (leave < 0 || ratio < step - 1e-12 ||
          (std::abs(ratio - step) <= 1e-12 && basis[r] < basis[static_cast<std::size_t>(leave)])) {
        leave = static_cast<int>(r);
        step = ratio;
      }
    }
    if (leave < 0) return {SimplexStatus::numerical, 0.0, {}, {}, res.iterations};

    degenerate_streak = step <= opt.tol ? degenerate_streak + 1 : 0;
    if (degenerate_streak > 2 * (ncols + nrows)) bland = true;

    basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = false;
    basic[static_cast<std::size_t>(enter)] = true;
    basis[static_cast<std::size_t>(leave)] = enter;
    binv.pivot(u, static_cast<std::size_t>(leave));
    xb = binv.apply(rhs);
  }
  if (res.status != SimplexStatus::optimal) res.status = SimplexStatus::iteration_limit;

  if (!refactor()) return {SimplexStatus::numerical, 0.0, {}, {}, res.iterations};
  xb = binv.apply(rhs);
  res.x.assign(static_cast<std::size_t>(nstruct), 0.0);
  res.objective = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < nstruct) res.x[static_cast<std::size_t>(basis[r])] = xb[r];
    res.objective += cost[static_cast<std::size_t>(basis[r])] * xb[r];
  }
  std::vector<double> cb(m);
  for (std::size_t r = 0; r < m; ++r) cb[r] = cost[static_cast<std::size_t>(basis[r])];
  res.duals = binv.apply_transposed(cb);
  return res;
}

}  // namespace tput::lp
