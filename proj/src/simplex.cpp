#include "martvar/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace martvar {

namespace {

constexpr double kEps = 1e-9;

// Full-tableau two-phase simplex. The tableau carries one extra column for
// the artificial variable (id -1) used to drive the most-violated row
// feasible, and two objective rows: row m for the actual objective, row m+1
// for the feasibility objective.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
          const std::vector<double>& c)
      : m_(b.size()),
        n_(c.size()),
        nonbasic_(n_ + 1),
        basic_(m_),
        tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)),
        iter_cap_(10000 + 50 * (m_ + n_)) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = a[i][j];
      basic_[i] = static_cast<int>(n_ + i);
      tab_[i][n_] = -1.0;
      tab_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<int>(j);
      tab_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    tab_[m_ + 1][n_] = 1.0;
  }

  LpResult run() {
    LpResult res;
    // make the basis feasible first if some b is negative
    std::size_t worst = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (tab_[i][n_ + 1] < tab_[worst][n_ + 1]) worst = i;
    if (tab_[worst][n_ + 1] < -kEps) {
      pivot(worst, n_);
      if (!optimize(true) || tab_[m_ + 1][n_ + 1] < -kEps) {
        res.status = LpResult::Status::infeasible;
        return res;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j < n_ + 1; ++j)
          if (std::make_pair(tab_[i][j], nonbasic_[j]) <
              std::make_pair(tab_[i][s], nonbasic_[s]))
            s = j;
        pivot(i, s);
      }
    }
    if (!optimize(false)) {
      res.status = LpResult::Status::unbounded;
      return res;
    }
    res.status = LpResult::Status::optimal;
    res.objective = tab_[m_][n_ + 1];
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < static_cast<int>(n_))
        res.x[static_cast<std::size_t>(basic_[i])] = tab_[i][n_ + 1];
    return res;
  }

 private:
  // feasibility pass works on row m+1 and may move the artificial variable;
  // the optimality pass works on row m and must keep the artificial out
  bool optimize(bool feasibility) {
    const std::size_t obj = feasibility ? m_ + 1 : m_;
    for (;;) {
      if (iters_++ > iter_cap_) throw SolverError("simplex: iteration limit reached");
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j < n_ + 1; ++j) {
        if (!feasibility && nonbasic_[j] == -1) continue;
        if (s == n_ + 1 || std::make_pair(tab_[obj][j], nonbasic_[j]) <
                               std::make_pair(tab_[obj][s], nonbasic_[s]))
          s = j;
      }
      if (tab_[obj][s] >= -kEps) return true;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][s] <= kEps) continue;
        const double ratio = tab_[i][n_ + 1] / tab_[i][s];
        if (r == m_ || std::make_pair(ratio, basic_[i]) <
                           std::make_pair(tab_[r][n_ + 1] / tab_[r][s], basic_[r]))
          r = i;
      }
      if (r == m_) return false;
      pivot(r, s);
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    std::vector<double>& prow = tab_[r];
    const double inv = 1.0 / prow[s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(tab_[i][s]) <= 1e-14) continue;
      std::vector<double>& row = tab_[i];
      const double factor = row[s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j) row[j] -= prow[j] * factor;
      row[s] = prow[s] * factor;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) prow[j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i)
      if (i != r) tab_[i][s] *= -inv;
    prow[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  std::size_t m_, n_;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> tab_;
  std::size_t iter_cap_;
  std::size_t iters_ = 0;
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                  const std::vector<double>& c) {
  if (c.empty()) throw ConfigError("solve_lp: no variables");
  if (a.size() != b.size()) throw ConfigError("solve_lp: row count mismatch");
  for (const auto& row : a)
    if (row.size() != c.size()) throw ConfigError("solve_lp: column count mismatch");
  if (a.empty()) {
    // no constraints: optimal iff no improving direction exists
    LpResult res;
    for (double cj : c) {
      if (cj > 0.0) {
        res.status = LpResult::Status::unbounded;
        return res;
      }
    }
    res.status = LpResult::Status::optimal;
    res.objective = 0.0;
    res.x.assign(c.size(), 0.0);
    return res;
  }
  Tableau t(a, b, c);
  return t.run();
}

int LpBuilder::add_var(bool nonneg) {
  nonneg_.push_back(nonneg);
  return static_cast<int>(nonneg_.size()) - 1;
}

void LpBuilder::add_le(const Terms& terms, double rhs) {
  rows_.push_back(Row{terms, rhs, false});
}

void LpBuilder::add_ge(const Terms& terms, double rhs) {
  Terms neg;
  neg.reserve(terms.size());
  for (const auto& [id, coef] : terms) neg.emplace_back(id, -coef);
  rows_.push_back(Row{std::move(neg), -rhs, false});
}

void LpBuilder::add_eq(const Terms& terms, double rhs) {
  rows_.push_back(Row{terms, rhs, true});
}

void LpBuilder::set_objective(const Terms& terms) { objective_ = terms; }

LpResult LpBuilder::solve() const {
  const std::size_t nv = nonneg_.size();
  if (nv == 0) throw ConfigError("LpBuilder: no variables");

  // column layout: nonneg var -> one column, free var -> (plus, minus) pair
  std::vector<std::size_t> col(nv);
  std::size_t ncols = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    col[v] = ncols;
    ncols += nonneg_[v] ? 1 : 2;
  }

  std::size_t nrows = 0;
  for (const Row& r : rows_) nrows += r.eq ? 2 : 1;

  std::vector<std::vector<double>> a(nrows, std::vector<double>(ncols, 0.0));
  std::vector<double> b(nrows, 0.0);
  std::vector<double> c(ncols, 0.0);

  auto scatter = [&](std::vector<double>& out, const Terms& terms, double sign) {
    for (const auto& [id, coef] : terms) {
      if (id < 0 || static_cast<std::size_t>(id) >= nv)
        throw std::logic_error("LpBuilder: bad variable id");
      const std::size_t cidx = col[static_cast<std::size_t>(id)];
      out[cidx] += sign * coef;
      if (!nonneg_[static_cast<std::size_t>(id)]) out[cidx + 1] -= sign * coef;
    }
  };

  std::size_t ri = 0;
  for (const Row& r : rows_) {
    scatter(a[ri], r.terms, 1.0);
    b[ri] = r.rhs;
    ++ri;
    if (r.eq) {
      scatter(a[ri], r.terms, -1.0);
      b[ri] = -r.rhs;
      ++ri;
    }
  }
  scatter(c, objective_, 1.0);

  LpResult std_res = solve_lp(a, b, c);
  LpResult res;
  res.status = std_res.status;
  res.objective = std_res.objective;
  if (res.status == LpResult::Status::optimal) {
    res.x.assign(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
      res.x[v] = std_res.x[col[v]];
      if (!nonneg_[v]) res.x[v] -= std_res.x[col[v] + 1];
    }
  }
  return res;
}

}  // namespace martvar
