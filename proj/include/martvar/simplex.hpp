#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "martvar/common.hpp"

namespace martvar {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense two-phase simplex for
///   max c.x  subject to  A x <= b,  x >= 0.
/// Entering and leaving variables are chosen by (value, variable index)
/// pairs, i.e. steepest coefficient with the smallest-index tie break;
/// an iteration cap guards the (unobserved in practice) cycling case and
/// raises SolverError so callers can retry on perturbed data.
LpResult solve_lp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                  const std::vector<double>& c);

/// Incremental LP builder in general form: free or nonnegative variables,
/// <= and == rows, maximization objective.  Lowered to the standard form
/// of solve_lp (free variables split into differences, equalities into
/// opposing inequalities).
class LpBuilder {
 public:
  using Terms = std::vector<std::pair<int, double>>;

  /// Returns the variable id to use in rows and the objective.
  int add_var(bool nonneg);

  void add_le(const Terms& terms, double rhs);
  void add_ge(const Terms& terms, double rhs);
  void add_eq(const Terms& terms, double rhs);

  /// Maximized objective; variables absent from terms get coefficient 0.
  void set_objective(const Terms& terms);

  std::size_t num_vars() const { return nonneg_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  /// Lowers and solves.  The returned x is indexed by builder variable id.
  LpResult solve() const;

 private:
  struct Row {
    Terms terms;
    double rhs = 0.0;
    bool eq = false;
  };

  std::vector<bool> nonneg_;
  std::vector<Row> rows_;
  Terms objective_;
};

}  // namespace martvar
