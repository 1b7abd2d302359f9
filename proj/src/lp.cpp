#include "reachcert/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;    // minimum usable pivot magnitude
constexpr double kCostTol = 1e-9;     // reduced-cost optimality tolerance
constexpr double kDegenStep = 1e-12;  // ratio-test steps at or below this count as degenerate
constexpr double kRecheckTol = 1e-8;  // final row re-check, relative to max(1, |rhs|)

struct Row {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// Sums duplicate variables within a row and drops exact zeros; terms come
// out sorted by variable index.
Row normalize_row(const LpRow& in) {
  std::unordered_map<int, double> acc;
  for (const auto& [j, a] : in.terms) {
    acc[j] += a;
  }
  Row r;
  r.rhs = in.rhs;
  r.terms.reserve(acc.size());
  for (const auto& [j, a] : acc) {
    if (a != 0.0) {
      r.terms.emplace_back(j, a);
    }
  }
  std::sort(r.terms.begin(), r.terms.end());
  return r;
}

// Bounded-variable phase-1 simplex over one independent block.
//
// Columns 0..n-1 are the structural variables, then one slack per <= row,
// then one artificial per row that starts infeasible under the crash
// assignment (structurals at their lower bounds, or the upper/zero when the
// lower is infinite). Rows are stored with the starting basic variable's
// coefficient at +1, so the tableau begins in canonical form. The rhs
// column rides along as the last tableau column. Feasibility needs no
// phase 2: the phase-1 basic solution is the answer.
class BlockSimplex {
 public:
  BlockSimplex(const std::vector<Row>& eq, const std::vector<Row>& le,
               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
      : n_(static_cast<int>(lo.size())),
        m_(static_cast<int>(eq.size() + le.size())),
        n_slack_(static_cast<int>(le.size())) {
    cols_ = n_ + n_slack_ + m_;  // worst case: every row needs an artificial
    tab_.setZero(m_, cols_ + 1);
    basis_.assign(m_, -1);
    beta_.setZero(m_);
    value_.setZero(cols_);
    at_upper_.assign(cols_, false);
    is_artificial_.assign(cols_, false);
    vlo_ = Eigen::VectorXd::Constant(cols_, 0.0);
    vhi_ = Eigen::VectorXd::Constant(cols_, kInf);
    vlo_.head(n_) = lo;
    vhi_.head(n_) = hi;

    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo(j))) {
        value_(j) = lo(j);
      } else if (std::isfinite(hi(j))) {
        value_(j) = hi(j);
        at_upper_[j] = true;
      }  // else: nonbasic free at zero
    }

    int row = 0;
    int next_art = n_ + n_slack_;
    auto add_row = [&](const Row& r, int slack) {
      double act = 0.0;
      for (const auto& [j, a] : r.terms) {
        act += a * value_(j);
      }
      const double resid = r.rhs - act;
      const double s = resid < 0.0 ? -1.0 : 1.0;
      for (const auto& [j, a] : r.terms) {
        tab_(row, j) = s * a;
      }
      if (slack >= 0) {
        tab_(row, n_ + slack) = s;
      }
      tab_(row, cols_) = s * r.rhs;
      if (slack >= 0 && resid >= 0.0) {
        basis_[row] = n_ + slack;  // slack absorbs the residual
        beta_(row) = resid;
      } else {
        tab_(row, next_art) = 1.0;
        is_artificial_[next_art] = true;
        basis_[row] = next_art;
        beta_(row) = std::abs(resid);
        ++next_art;
      }
      ++row;
    };
    for (const Row& r : eq) {
      add_row(r, -1);
    }
    int slack = 0;
    for (const Row& r : le) {
      add_row(r, slack++);
    }

    basic_.assign(cols_, false);
    for (int i = 0; i < m_; ++i) {
      basic_[basis_[i]] = true;
    }
    recompute_reduced_costs();
  }

  // Returns the artificial sum at termination.
  double minimize_infeasibility(long max_iters, long* iterations,
                                bool* hit_limit) {
    long degenerate = 0;
    bool bland = false;
    long it = 0;
    for (; it < max_iters; ++it) {
      if ((it & 0xFF) == 0xFF) {
        refresh();
      }

      // Entering column.
      int q = -1;
      double sigma = 1.0;
      double best = kCostTol;
      for (int j = 0; j < cols_; ++j) {
        if (basic_[j] || vhi_(j) - vlo_(j) == 0.0) {
          continue;
        }
        double score, dir;
        if (!std::isfinite(vlo_(j)) && !std::isfinite(vhi_(j))) {
          score = std::abs(d_(j));
          dir = d_(j) < 0.0 ? 1.0 : -1.0;
        } else if (at_upper_[j]) {
          score = d_(j);
          dir = -1.0;
        } else {
          score = -d_(j);
          dir = 1.0;
        }
        if (score > best) {
          best = score;
          q = j;
          sigma = dir;
          if (bland) {
            break;
          }
        }
      }
      if (q < 0) {
        break;  // optimal
      }

      // Ratio test; start from the entering variable's own bound flip.
      double t_best = kInf;
      {
        const double span = vhi_(q) - vlo_(q);
        if (std::isfinite(span)) {
          t_best = span;
        }
      }
      int leave_row = -1;
      int leave_var = std::numeric_limits<int>::max();
      for (int i = 0; i < m_; ++i) {
        if (std::abs(tab_(i, q)) <= kPivotTol) {
          continue;
        }
        const double rate = -sigma * tab_(i, q);
        const int bv = basis_[i];
        double t;
        if (rate > 0.0) {
          if (!std::isfinite(vhi_(bv))) {
            continue;
          }
          t = (vhi_(bv) - beta_(i)) / rate;
        } else {
          if (!std::isfinite(vlo_(bv))) {
            continue;
          }
          t = (beta_(i) - vlo_(bv)) / (-rate);
        }
        t = std::max(t, 0.0);
        if (t < t_best || (t == t_best && bv < leave_var)) {
          t_best = t;
          leave_row = i;
          leave_var = bv;
        }
      }
      if (!std::isfinite(t_best)) {
        throw Error(
            "solve_feasibility: unbounded descent in phase 1 (numerical "
            "breakdown)");
      }
      if (t_best <= kDegenStep && !bland && ++degenerate > 10L * cols_) {
        bland = true;
      }

      if (leave_row < 0) {
        // Bound flip; basis unchanged.
        const double delta = sigma * t_best;
        beta_ -= delta * tab_.col(q);
        value_(q) += delta;
        at_upper_[q] = !at_upper_[q];
        continue;
      }

      const int leaving = basis_[leave_row];
      const double leave_rate = -sigma * tab_(leave_row, q);
      beta_ -= (sigma * t_best) * tab_.col(q);
      const double entering_value = value_(q) + sigma * t_best;
      value_(leaving) = leave_rate > 0.0 ? vhi_(leaving) : vlo_(leaving);
      at_upper_[leaving] = leave_rate > 0.0;
      if (is_artificial_[leaving]) {
        value_(leaving) = 0.0;
        vhi_(leaving) = 0.0;  // retired; never re-enters
      }
      basic_[leaving] = false;
      basic_[q] = true;
      basis_[leave_row] = q;
      beta_(leave_row) = entering_value;

      const double piv = tab_(leave_row, q);
      Eigen::VectorXd colq = tab_.col(q) / piv;
      colq(leave_row) = 0.0;
      tab_.noalias() -= colq * tab_.row(leave_row);
      tab_.row(leave_row) /= piv;
      d_ -= d_(q) * tab_.row(leave_row).head(cols_);
    }
    *iterations = it;
    *hit_limit = it >= max_iters;
    return artificial_sum();
  }

  Eigen::VectorXd structural_values() const {
    Eigen::VectorXd x = value_.head(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) {
        x(basis_[i]) = beta_(i);
      }
    }
    return x;
  }

 private:
  double artificial_sum() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (is_artificial_[basis_[i]]) {
        s += beta_(i);
      }
    }
    return s;
  }

  void recompute_reduced_costs() {
    d_.setZero(cols_);
    for (int j = 0; j < cols_; ++j) {
      if (is_artificial_[j]) {
        d_(j) = 1.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      if (is_artificial_[basis_[i]]) {
        d_ -= tab_.row(i).head(cols_);
      }
    }
  }

  // Sheds accumulated pivot roundoff: basic values from the maintained
  // B^-1 [A b], reduced costs from the basis.
  void refresh() {
    beta_ = tab_.col(cols_);
    for (int j = 0; j < cols_; ++j) {
      if (!basic_[j] && value_(j) != 0.0) {
        beta_ -= value_(j) * tab_.col(j);
      }
    }
    recompute_reduced_costs();
  }

  int n_, m_, n_slack_;
  int cols_ = 0;
  Eigen::MatrixXd tab_;  // m x (cols_ + 1); last column is B^-1 b
  Eigen::VectorXd beta_;
  Eigen::VectorXd value_;
  Eigen::RowVectorXd d_;
  Eigen::VectorXd vlo_, vhi_;
  std::vector<bool> at_upper_, is_artificial_, basic_;
  std::vector<int> basis_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

LpSolution solve_feasibility(const LpProblem& p, double tol, long max_iters) {
  const int n = p.num_vars;
  for (const auto& rows : {std::cref(p.eq), std::cref(p.le)}) {
    for (const LpRow& r : rows.get()) {
      if (!std::isfinite(r.rhs)) {
        throw DomainError("solve_feasibility: nonfinite rhs");
      }
      for (const auto& [j, a] : r.terms) {
        if (j < 0 || j >= n) {
          throw DomainError("solve_feasibility: variable index out of range");
        }
        if (!std::isfinite(a)) {
          throw DomainError("solve_feasibility: nonfinite coefficient");
        }
      }
    }
  }

  LpSolution sol;
  auto infeasible = [&](LpStatus status) {
    sol.status = status;
    sol.phase1_objective = kInf;
    return sol;
  };

  // Presolve: empty rows become verdicts, singleton rows become variable
  // bounds; everything else goes to the simplex.
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -kInf);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, kInf);
  std::vector<Row> eq_rows, le_rows;
  for (const bool is_eq : {true, false}) {
    for (const LpRow& in : is_eq ? p.eq : p.le) {
      Row r = normalize_row(in);
      if (r.terms.empty()) {
        const double excess = is_eq ? std::abs(r.rhs) : -r.rhs;
        if (excess > kRecheckTol * std::max(1.0, std::abs(r.rhs))) {
          return infeasible(LpStatus::Infeasible);
        }
        continue;
      }
      if (r.terms.size() == 1) {
        const auto [j, a] = r.terms.front();
        const double v = r.rhs / a;
        if (is_eq) {
          lo(j) = std::max(lo(j), v);
          hi(j) = std::min(hi(j), v);
        } else if (a > 0.0) {
          hi(j) = std::min(hi(j), v);
        } else {
          lo(j) = std::max(lo(j), v);
        }
        continue;
      }
      (is_eq ? eq_rows : le_rows).push_back(std::move(r));
    }
  }
  for (int j = 0; j < n; ++j) {
    const double gap = lo(j) - hi(j);
    if (gap > 1e-9 * std::max({1.0, std::abs(lo(j)), std::abs(hi(j))})) {
      return infeasible(LpStatus::Infeasible);
    }
    if (gap > 0.0) {
      lo(j) = hi(j) = 0.5 * (lo(j) + hi(j));  // sub-tolerance crossing
    }
  }

  // Variables connected through shared rows form independent blocks.
  UnionFind uf(n);
  std::unordered_set<int> row_roots;
  for (const auto& rows : {std::cref(eq_rows), std::cref(le_rows)}) {
    for (const Row& r : rows.get()) {
      for (std::size_t k = 1; k < r.terms.size(); ++k) {
        uf.unite(r.terms[0].first, r.terms[k].first);
      }
    }
  }
  for (const auto& rows : {std::cref(eq_rows), std::cref(le_rows)}) {
    for (const Row& r : rows.get()) {
      row_roots.insert(uf.find(r.terms[0].first));
    }
  }
  std::unordered_map<int, std::vector<int>> block_vars;
  for (int j = 0; j < n; ++j) {
    const int root = uf.find(j);
    if (row_roots.count(root)) {
      block_vars[root].push_back(j);
    }
  }
  std::vector<int> roots(row_roots.begin(), row_roots.end());
  std::sort(roots.begin(), roots.end());

  // Defaults for variables no block touches.
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    x(j) = std::isfinite(lo(j)) ? lo(j) : (std::isfinite(hi(j)) ? hi(j) : 0.0);
  }

  sol.phase1_objective = 0.0;
  for (const int root : roots) {
    const std::vector<int>& members = block_vars.at(root);
    std::unordered_map<int, int> local;
    local.reserve(members.size());
    Eigen::VectorXd blo(members.size()), bhi(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      local[members[k]] = static_cast<int>(k);
      blo(k) = lo(members[k]);
      bhi(k) = hi(members[k]);
    }
    auto localize = [&](const std::vector<Row>& rows) {
      std::vector<Row> out;
      for (const Row& r : rows) {
        if (uf.find(r.terms[0].first) != root) {
          continue;
        }
        Row lr;
        lr.rhs = r.rhs;
        lr.terms.reserve(r.terms.size());
        for (const auto& [j, a] : r.terms) {
          lr.terms.emplace_back(local.at(j), a);
        }
        out.push_back(std::move(lr));
      }
      return out;
    };
    const std::vector<Row> beq = localize(eq_rows);
    const std::vector<Row> ble = localize(le_rows);

    const long m = static_cast<long>(beq.size() + ble.size());
    const long cols = static_cast<long>(members.size()) + m + ble.size();
    const long cap =
        max_iters > 0 ? max_iters : std::max<long>(5000, 5 * (m + cols));

    BlockSimplex simplex(beq, ble, blo, bhi);
    long iters = 0;
    bool hit_limit = false;
    const double infeas = simplex.minimize_infeasibility(cap, &iters, &hit_limit);
    sol.iterations += iters;
    if (infeas > tol) {
      sol.phase1_objective = infeas;
      sol.status = hit_limit ? LpStatus::IterationLimit : LpStatus::Infeasible;
      return sol;
    }
    sol.phase1_objective += infeas;
    const Eigen::VectorXd bx = simplex.structural_values();
    for (std::size_t k = 0; k < members.size(); ++k) {
      x(members[k]) = bx(k);
    }
  }

  // Belt and braces: the returned point must satisfy every original row.
  for (const bool is_eq : {true, false}) {
    for (const LpRow& r : is_eq ? p.eq : p.le) {
      double act = 0.0;
      for (const auto& [j, a] : r.terms) {
        act += a * x(j);
      }
      const double excess = is_eq ? std::abs(act - r.rhs) : act - r.rhs;
      if (excess > kRecheckTol * std::max(1.0, std::abs(r.rhs))) {
        throw Error("solve_feasibility: feasible verdict failed the row re-check");
      }
    }
  }

  sol.status = LpStatus::Feasible;
  sol.point = std::move(x);
  return sol;
}

}  // namespace reachcert
