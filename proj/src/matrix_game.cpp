#include "martvar/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace martvar {

namespace {

void check_matrix(const Matrix& g) {
  if (g.empty() || g.front().empty()) throw ConfigError("matrix game: empty matrix");
  const std::size_t cols = g.front().size();
  for (const auto& row : g) {
    if (row.size() != cols) throw ConfigError("matrix game: ragged matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw ConfigError("matrix game: non-finite payoff");
  }
}

// best value for the maximizer: max v s.t. v <= sum_i x_i g[i][j] for all j
double solve_side(const Matrix& g, bool row_player, std::vector<double>* strategy) {
  const std::size_t m = g.size();
  const std::size_t n = g.front().size();
  const std::size_t own = row_player ? m : n;
  const std::size_t other = row_player ? n : m;

  LpBuilder lp;
  std::vector<int> xs(own);
  for (std::size_t i = 0; i < own; ++i) xs[i] = lp.add_var(true);
  const int v = lp.add_var(false);

  for (std::size_t j = 0; j < other; ++j) {
    LpBuilder::Terms terms;
    terms.emplace_back(v, row_player ? 1.0 : -1.0);
    for (std::size_t i = 0; i < own; ++i) {
      const double payoff = row_player ? g[i][j] : g[j][i];
      terms.emplace_back(xs[i], row_player ? -payoff : payoff);
    }
    lp.add_le(terms, 0.0);
  }
  LpBuilder::Terms simplex_row;
  for (std::size_t i = 0; i < own; ++i) simplex_row.emplace_back(xs[i], 1.0);
  lp.add_eq(simplex_row, 1.0);
  lp.set_objective({{v, row_player ? 1.0 : -1.0}});

  LpResult res = lp.solve();
  if (res.status != LpResult::Status::optimal)
    throw SolverError("matrix game: linear program not optimal");

  if (strategy) {
    strategy->assign(own, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < own; ++i) {
      (*strategy)[i] = std::max(0.0, res.x[static_cast<std::size_t>(xs[i])]);
      total += (*strategy)[i];
    }
    if (total > 0.0)
      for (double& w : *strategy) w /= total;
    else
      (*strategy)[0] = 1.0;
  }
  return res.x[static_cast<std::size_t>(v)];
}

}  // namespace

double matrix_norm(const Matrix& g) {
  check_matrix(g);
  double m = 0.0;
  for (const auto& row : g)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

GameValueResult matrix_value(const Matrix& g) {
  check_matrix(g);

  Matrix work = g;
  std::string last_error;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) {
      // deterministic sub-tolerance nudge to step off a degenerate basis
      const double scale = 1e-12 * attempt;
      for (std::size_t i = 0; i < work.size(); ++i)
        for (std::size_t j = 0; j < work[i].size(); ++j)
          work[i][j] = g[i][j] + scale * static_cast<double>((i + 1) + 7 * (j + 1));
    }
    try {
      GameValueResult out;
      solve_side(work, true, &out.p1_strategy);
      solve_side(work, false, &out.p2_strategy);

      // re-evaluate the returned strategies on the original matrix: the
      // guarantee pair (worst column payoff of x*, worst row payoff of y*)
      // brackets the value regardless of LP roundoff
      const std::size_t m = g.size(), n = g.front().size();
      double row_guarantee = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += out.p1_strategy[i] * g[i][j];
        row_guarantee = std::min(row_guarantee, s);
      }
      double col_guarantee = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += g[i][j] * out.p2_strategy[j];
        col_guarantee = std::max(col_guarantee, s);
      }
      out.value = 0.5 * (row_guarantee + col_guarantee);
      out.duality_gap = col_guarantee - row_guarantee;
      out.certificate =
          BoundCertificate::make("duality_gap", out.duality_gap, kDualityGapTolerance);
      if (out.duality_gap > kDualityGapTolerance)
        throw SolverError("matrix game: strategy guarantees do not meet within tolerance");
      return out;
    } catch (const SolverError& e) {
      last_error = e.what();
    }
  }
  throw SolverError("matrix game: solver failed after retries: " + last_error);
}

}  // namespace martvar
