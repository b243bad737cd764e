#include "martvar/repeated_game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "martvar/maxvar.hpp"
#include "martvar/simplex.hpp"

namespace martvar {

namespace {

constexpr double kZeroWeight = 1e-12;
// dense-simplex dimension cap for the sequence-form LPs; the game-size
// budget admits trees whose LP would not fit a dense tableau
constexpr std::size_t kLpDimCap = 3000;

int grid_segments(double h, const char* what) {
  if (!(h > 0.0) || h > 0.5) throw ConfigError(std::string(what) + ": bad grid step");
  const long long n = std::llround(1.0 / h);
  if (n < 2 || n > 100000 || std::abs(static_cast<double>(n) * h - 1.0) > 1e-9)
    throw ConfigError(std::string(what) + ": 1/step must be an integer");
  return static_cast<int>(n);
}

std::vector<double> uniform_grid(int segments) {
  std::vector<double> g(static_cast<std::size_t>(segments) + 1);
  for (int i = 0; i <= segments; ++i)
    g[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(segments);
  return g;
}

double lerp_uniform(const std::vector<double>& values, double x) {
  const int n = static_cast<int>(values.size()) - 1;
  double pos = x * static_cast<double>(n);
  int i = static_cast<int>(pos);
  i = std::clamp(i, 0, n - 1);
  const double frac = pos - static_cast<double>(i);
  const std::size_t si = static_cast<std::size_t>(i);
  return values[si] + frac * (values[si + 1] - values[si]);
}

Matrix averaged_matrix(const IncompleteInfoGame& g, const std::vector<double>& q) {
  const std::size_t ni = g.num_p1_actions();
  const std::size_t nj = g.num_p2_actions();
  Matrix avg(ni, std::vector<double>(nj, 0.0));
  for (std::size_t x = 0; x < g.num_states(); ++x)
    for (std::size_t i = 0; i < ni; ++i)
      for (std::size_t j = 0; j < nj; ++j) avg[i][j] += q[x] * g.payoffs[x][i][j];
  return avg;
}

}  // namespace

void IncompleteInfoGame::validate() const {
  if (states.empty()) throw ConfigError("game: no states");
  if (prior.size() != states.size()) throw ConfigError("game: prior length mismatch");
  try {
    (void)prior_dist();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("game: bad prior: ") + e.what());
  }
  if (payoffs.size() != states.size()) throw ConfigError("game: one payoff matrix per state");
  const std::size_t ni = num_p1_actions();
  const std::size_t nj = num_p2_actions();
  if (ni == 0 || nj == 0) throw ConfigError("game: empty payoff matrix");
  for (const Matrix& m : payoffs) {
    if (m.size() != ni) throw ConfigError("game: payoff row count differs across states");
    for (const auto& row : m) {
      if (row.size() != nj) throw ConfigError("game: payoff column count differs across states");
      for (double v : row)
        if (!std::isfinite(v)) throw ConfigError("game: non-finite payoff");
    }
  }
}

nlohmann::json IncompleteInfoGame::to_json() const {
  return nlohmann::json{{"states", states}, {"prior", prior}, {"payoffs", payoffs}};
}

IncompleteInfoGame IncompleteInfoGame::from_json(const nlohmann::json& j) {
  IncompleteInfoGame g{j.at("states").get<LabelSet>(), j.at("prior").get<std::vector<double>>(),
                       j.at("payoffs").get<std::vector<Matrix>>()};
  g.validate();
  return g;
}

double game_norm(const IncompleteInfoGame& g) {
  g.validate();
  double m = 0.0;
  for (const Matrix& mat : g.payoffs) m = std::max(m, matrix_norm(mat));
  return m;
}

IncompleteInfoGame example_game() {
  IncompleteInfoGame g{{"0", "1"},
                       {0.5, 0.5},
                       {Matrix{{3.0, -1.0}, {-3.0, 1.0}}, Matrix{{2.0, -2.0}, {-2.0, 2.0}}}};
  g.validate();
  return g;
}

IncompleteInfoGame tensor_games(const IncompleteInfoGame& a, const IncompleteInfoGame& b) {
  a.validate();
  b.validate();
  const std::size_t nia = a.num_p1_actions(), nja = a.num_p2_actions();
  const std::size_t nib = b.num_p1_actions(), njb = b.num_p2_actions();

  IncompleteInfoGame g;
  for (std::size_t xa = 0; xa < a.num_states(); ++xa)
    for (std::size_t xb = 0; xb < b.num_states(); ++xb) {
      g.states.push_back("(" + a.states[xa] + "," + b.states[xb] + ")");
      g.prior.push_back(a.prior[xa] * b.prior[xb]);
      Matrix m(nia + nib, std::vector<double>(nja * njb, 0.0));
      for (std::size_t ja = 0; ja < nja; ++ja)
        for (std::size_t jb = 0; jb < njb; ++jb) {
          const std::size_t jc = ja * njb + jb;
          for (std::size_t i = 0; i < nia; ++i) m[i][jc] = a.payoffs[xa][i][ja];
          for (std::size_t i = 0; i < nib; ++i) m[nia + i][jc] = b.payoffs[xb][i][jb];
        }
      g.payoffs.push_back(std::move(m));
    }
  g.validate();
  return g;
}

double nonrevealing_value(const IncompleteInfoGame& g, const std::vector<double>& q) {
  g.validate();
  if (q.size() != g.num_states()) throw std::domain_error("nonrevealing_value: belief length");
  double total = 0.0;
  for (double v : q) {
    if (!(v >= -1e-12)) throw std::domain_error("nonrevealing_value: negative belief weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("nonrevealing_value: belief mass not 1");
  return matrix_value(averaged_matrix(g, q)).value;
}

CavUResult cav_u_binary(const IncompleteInfoGame& g, double h) {
  g.validate();
  if (g.num_states() != 2) throw ConfigError("cav_u_binary: needs exactly two states");
  const int n = grid_segments(h, "cav_u_binary");
  std::vector<double> grid = uniform_grid(n);
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    u[i] = matrix_value(averaged_matrix(g, {grid[i], 1.0 - grid[i]})).value;
  ValueTable cav = concave_envelope(grid, u);
  return CavUResult{ValueTable(std::move(grid), std::move(u)), std::move(cav)};
}

namespace {

// flattened per-level history indexing for the sequence-form LPs; a history
// before stage t is one of S^t outcome strings, child(ht, i, j) lives at the
// next level
struct HistoryIndex {
  std::size_t nI, nJ, S;
  int k;
  std::vector<std::size_t> level_count;   // S^t for t = 0..k-1
  std::vector<std::size_t> level_offset;  // cumulative
  std::size_t total = 0;

  HistoryIndex(std::size_t ni, std::size_t nj, int horizon) : nI(ni), nJ(nj), S(ni * nj), k(horizon) {
    level_count.resize(static_cast<std::size_t>(k));
    level_offset.resize(static_cast<std::size_t>(k));
    std::size_t c = 1;
    for (int t = 0; t < k; ++t) {
      level_count[static_cast<std::size_t>(t)] = c;
      level_offset[static_cast<std::size_t>(t)] = total;
      total += c;
      c *= S;
    }
  }

  std::size_t flat(int t, std::size_t ht) const {
    return level_offset[static_cast<std::size_t>(t)] + ht;
  }
  std::size_t child(std::size_t ht, std::size_t i, std::size_t j) const {
    return ht * S + i * nJ + j;
  }
};

void check_exact_budget(const IncompleteInfoGame& g, int k, std::size_t budget) {
  const double s = static_cast<double>(g.num_p1_actions() * g.num_p2_actions());
  long double size = static_cast<long double>(g.num_states());
  for (int t = 0; t < k; ++t) size *= s;
  if (size > static_cast<long double>(budget))
    throw SizeError("value_exact: |X|*(|I||J|)^k = " + format_double(static_cast<double>(size)) +
                    " exceeds budget " + std::to_string(budget));
}

// max over P1 realization weights of the game value certified by per-history
// dual variables of the uninformed player
double solve_informed_lp(const IncompleteInfoGame& g, const HistoryIndex& hist, int k,
                         std::vector<double>* plan) {
  const std::size_t nx = g.num_states(), ni = hist.nI, nj = hist.nJ;
  LpBuilder lp;

  std::vector<int> wid(nx * hist.total * ni);
  auto w = [&](std::size_t x, int t, std::size_t ht, std::size_t i) -> int& {
    return wid[(x * hist.total + hist.flat(t, ht)) * ni + i];
  };
  for (std::size_t x = 0; x < nx; ++x)
    for (int t = 0; t < k; ++t)
      for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht)
        for (std::size_t i = 0; i < ni; ++i) w(x, t, ht, i) = lp.add_var(true);

  std::vector<int> mid(hist.total);
  for (auto& id : mid) id = lp.add_var(false);

  // flow of realization weights per state
  for (std::size_t x = 0; x < nx; ++x) {
    {
      LpBuilder::Terms terms;
      for (std::size_t i = 0; i < ni; ++i) terms.emplace_back(w(x, 0, 0, i), 1.0);
      lp.add_eq(terms, 1.0);
    }
    for (int t = 1; t < k; ++t)
      for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht) {
        const std::size_t parent = ht / hist.S;
        const std::size_t last_i = (ht % hist.S) / nj;
        LpBuilder::Terms terms;
        for (std::size_t i = 0; i < ni; ++i) terms.emplace_back(w(x, t, ht, i), 1.0);
        terms.emplace_back(w(x, t - 1, parent, last_i), -1.0);
        lp.add_eq(terms, 0.0);
      }
  }

  // value coupling: one row per (history, P2 action)
  const double inv_k = 1.0 / static_cast<double>(k);
  for (int t = 0; t < k; ++t)
    for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht)
      for (std::size_t j = 0; j < nj; ++j) {
        LpBuilder::Terms terms;
        terms.emplace_back(mid[hist.flat(t, ht)], 1.0);
        for (std::size_t x = 0; x < nx; ++x)
          for (std::size_t i = 0; i < ni; ++i)
            terms.emplace_back(w(x, t, ht, i), -g.prior[x] * g.payoffs[x][i][j] * inv_k);
        if (t + 1 < k)
          for (std::size_t i = 0; i < ni; ++i)
            terms.emplace_back(mid[hist.flat(t + 1, hist.child(ht, i, j))], -1.0);
        lp.add_le(terms, 0.0);
      }

  lp.set_objective({{mid[0], 1.0}});
  LpResult res = lp.solve();
  if (res.status != LpResult::Status::optimal)
    throw SolverError("value_exact: informed-player LP not optimal");
  if (plan) {
    plan->clear();
    plan->reserve(wid.size());
    for (int id : wid) plan->push_back(std::max(0.0, res.x[static_cast<std::size_t>(id)]));
  }
  return res.objective;
}

// min over P2 realization weights certified by per-(state, history) dual
// variables of the informed player; returned as the (positive) game value
double solve_uninformed_lp(const IncompleteInfoGame& g, const HistoryIndex& hist, int k,
                           std::vector<double>* plan) {
  const std::size_t nx = g.num_states(), ni = hist.nI, nj = hist.nJ;
  LpBuilder lp;

  std::vector<int> zid(hist.total * nj);
  auto z = [&](int t, std::size_t ht, std::size_t j) -> int& {
    return zid[hist.flat(t, ht) * nj + j];
  };
  for (int t = 0; t < k; ++t)
    for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht)
      for (std::size_t j = 0; j < nj; ++j) z(t, ht, j) = lp.add_var(true);

  std::vector<int> nuid(nx * hist.total);
  auto nu = [&](std::size_t x, int t, std::size_t ht) -> int& {
    return nuid[x * hist.total + hist.flat(t, ht)];
  };
  for (auto& id : nuid) id = lp.add_var(false);

  {
    LpBuilder::Terms terms;
    for (std::size_t j = 0; j < nj; ++j) terms.emplace_back(z(0, 0, j), 1.0);
    lp.add_eq(terms, 1.0);
  }
  for (int t = 1; t < k; ++t)
    for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht) {
      const std::size_t parent = ht / hist.S;
      const std::size_t last_j = ht % nj;
      LpBuilder::Terms terms;
      for (std::size_t j = 0; j < nj; ++j) terms.emplace_back(z(t, ht, j), 1.0);
      terms.emplace_back(z(t - 1, parent, last_j), -1.0);
      lp.add_eq(terms, 0.0);
    }

  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t x = 0; x < nx; ++x)
    for (int t = 0; t < k; ++t)
      for (std::size_t ht = 0; ht < hist.level_count[static_cast<std::size_t>(t)]; ++ht)
        for (std::size_t i = 0; i < ni; ++i) {
          LpBuilder::Terms terms;
          for (std::size_t j = 0; j < nj; ++j)
            terms.emplace_back(z(t, ht, j), g.prior[x] * g.payoffs[x][i][j] * inv_k);
          terms.emplace_back(nu(x, t, ht), -1.0);
          if (t + 1 < k)
            for (std::size_t j = 0; j < nj; ++j)
              terms.emplace_back(nu(x, t + 1, hist.child(ht, i, j)), 1.0);
          lp.add_le(terms, 0.0);
        }

  LpBuilder::Terms obj;
  for (std::size_t x = 0; x < nx; ++x) obj.emplace_back(nu(x, 0, 0), -1.0);
  lp.set_objective(obj);
  LpResult res = lp.solve();
  if (res.status != LpResult::Status::optimal)
    throw SolverError("value_exact: uninformed-player LP not optimal");
  if (plan) {
    plan->clear();
    plan->reserve(zid.size());
    for (int id : zid) plan->push_back(std::max(0.0, res.x[static_cast<std::size_t>(id)]));
  }
  return -res.objective;
}

}  // namespace

GameValueResult value_exact(const IncompleteInfoGame& g, int k, std::size_t budget) {
  g.validate();
  if (k < 1) throw ConfigError("value_exact: need at least one stage");
  check_exact_budget(g, k, budget);

  HistoryIndex hist(g.num_p1_actions(), g.num_p2_actions(), k);
  const std::size_t nx = g.num_states();
  // standard-form dimensions of the two LPs (free vars split, eqs doubled)
  const std::size_t dims[] = {nx * hist.total * hist.nI + 2 * hist.total,
                              2 * nx * hist.total + hist.total * hist.nJ,
                              hist.total * hist.nJ + 2 * nx * hist.total,
                              2 * hist.total + nx * hist.total * hist.nI};
  for (std::size_t d : dims)
    if (d > kLpDimCap)
      throw SizeError("value_exact: sequence-form LP dimensions exceed the dense solver cap");

  GameValueResult out;
  const double v1 = solve_informed_lp(g, hist, k, &out.p1_strategy);
  const double v2 = solve_uninformed_lp(g, hist, k, &out.p2_strategy);
  out.value = 0.5 * (v1 + v2);
  out.duality_gap = std::abs(v1 - v2);
  out.certificate = BoundCertificate::make("duality_gap", out.duality_gap, kDualityGapTolerance);
  return out;
}

namespace {

// objective of the one-stage maximization inside the recursion, for a
// two-state game with at most two P1 actions; sigma = (s, t) are the
// probabilities of the first action in states 0 and 1
double recursion_objective(const IncompleteInfoGame& g, double p, double s, double t,
                           const std::vector<double>& w_prev) {
  const std::size_t nj = g.num_p2_actions();
  const bool two_actions = g.num_p1_actions() == 2;
  const double q = 1.0 - p;

  double stage_min = 0.0;
  for (std::size_t j = 0; j < nj; ++j) {
    double stage = p * (s * g.payoffs[0][0][j] + (two_actions ? (1.0 - s) * g.payoffs[0][1][j] : 0.0)) +
                   q * (t * g.payoffs[1][0][j] + (two_actions ? (1.0 - t) * g.payoffs[1][1][j] : 0.0));
    if (j == 0 || stage < stage_min) stage_min = stage;
  }

  double cont = 0.0;
  if (!w_prev.empty()) {
    const double sbar0 = p * s + q * t;
    if (sbar0 > kZeroWeight) {
      const double post0 = std::clamp(p * s / sbar0, 0.0, 1.0);
      cont += sbar0 * lerp_uniform(w_prev, post0);
    }
    if (two_actions) {
      const double sbar1 = p * (1.0 - s) + q * (1.0 - t);
      if (sbar1 > kZeroWeight) {
        const double post1 = std::clamp(p * (1.0 - s) / sbar1, 0.0, 1.0);
        cont += sbar1 * lerp_uniform(w_prev, post1);
      }
    }
  }
  return stage_min + cont;
}

}  // namespace

std::vector<ValueTable> value_recursive_stages(const IncompleteInfoGame& g, int k,
                                               const RecursiveOptions& opt) {
  g.validate();
  if (g.num_states() != 2) throw ConfigError("value_recursive: needs exactly two states");
  if (g.num_p1_actions() > 2)
    throw ConfigError("value_recursive: supports at most two first-player actions");
  if (k < 1) throw ConfigError("value_recursive: need at least one stage");
  if (opt.refine_rounds < 0 || opt.refine_rounds > 12)
    throw ConfigError("value_recursive: refine_rounds out of range");

  const int np = grid_segments(opt.p_grid, "value_recursive");
  const int ns = grid_segments(opt.sigma_grid, "value_recursive");
  const std::vector<double> grid = uniform_grid(np);
  const bool two_actions = g.num_p1_actions() == 2;

  std::vector<double> w_prev;  // empty means zero continuation
  std::vector<double> w_cur(grid.size(), 0.0);
  std::vector<ValueTable> out;
  out.reserve(static_cast<std::size_t>(k));

  for (int stage = 1; stage <= k; ++stage) {
    for (std::size_t ip = 0; ip < grid.size(); ++ip) {
      const double p = grid[ip];
      double best = 0.0, best_s = 1.0, best_t = 1.0;
      bool first = true;

      if (two_actions) {
        for (int a = 0; a <= ns; ++a)
          for (int b = 0; b <= ns; ++b) {
            const double s = static_cast<double>(a) / static_cast<double>(ns);
            const double t = static_cast<double>(b) / static_cast<double>(ns);
            const double val = recursion_objective(g, p, s, t, w_prev);
            if (first || val > best) {
              best = val;
              best_s = s;
              best_t = t;
              first = false;
            }
          }
        for (int round = 1; round <= opt.refine_rounds; ++round) {
          const double radius = 0.5 * std::pow(10.0, -round);
          const int steps = 20;
          const double lo_s = std::max(0.0, best_s - radius);
          const double hi_s = std::min(1.0, best_s + radius);
          const double lo_t = std::max(0.0, best_t - radius);
          const double hi_t = std::min(1.0, best_t + radius);
          double round_best = best, round_s = best_s, round_t = best_t;
          for (int a = 0; a <= steps; ++a)
            for (int b = 0; b <= steps; ++b) {
              const double s = lo_s + (hi_s - lo_s) * static_cast<double>(a) / steps;
              const double t = lo_t + (hi_t - lo_t) * static_cast<double>(b) / steps;
              const double val = recursion_objective(g, p, s, t, w_prev);
              if (val > round_best) {
                round_best = val;
                round_s = s;
                round_t = t;
              }
            }
          best = round_best;
          best_s = round_s;
          best_t = round_t;
        }
      } else {
        best = recursion_objective(g, p, 1.0, 1.0, w_prev);
      }
      w_cur[ip] = best;
    }

    std::vector<double> v(grid.size());
    for (std::size_t ip = 0; ip < grid.size(); ++ip)
      v[ip] = w_cur[ip] / static_cast<double>(stage);
    out.emplace_back(grid, std::move(v));
    w_prev = w_cur;
  }
  return out;
}

ValueTable value_recursive(const IncompleteInfoGame& g, int k, const RecursiveOptions& opt) {
  return value_recursive_stages(g, k, opt).back();
}

bool ErrorTermReport::all_hold() const {
  for (const auto& c : certificates)
    if (!c.holds) return false;
  return true;
}

ErrorTermReport certify_error_term(const IncompleteInfoGame& g, int k, std::size_t budget) {
  g.validate();
  if (g.num_states() != 2) throw ConfigError("certify_error_term: needs exactly two states");
  if (k < 1) throw ConfigError("certify_error_term: need at least one stage");

  ErrorTermReport rep;
  rep.k = k;
  rep.norm = game_norm(g);
  const double prior0 = g.prior[0];

  const double grid_step = 1e-2;
  CavUResult cav = cav_u_binary(g, grid_step);
  rep.cav_u_at_prior = cav.cav_u.at(prior0);

  try {
    rep.value = value_exact(g, k, budget).value;
    rep.used_exact = true;
  } catch (const SizeError&) {
    rep.value = value_recursive(g, k).at(prior0);
    rep.used_exact = false;
  }

  const double error_term = rep.value - rep.cav_u_at_prior;
  const double grid_var = maxvar_binary(k, grid_step).at(prior0);
  const double grid_slack = 10.0 * grid_step * static_cast<double>(k);
  rep.certificates.push_back(BoundCertificate::make(
      "error_term_variation_bound", error_term,
      rep.norm * (grid_var + grid_slack) / static_cast<double>(k)));
  rep.certificates.push_back(BoundCertificate::make(
      "error_term_logd_bound", error_term,
      rep.norm * std::sqrt(2.0 * std::log(static_cast<double>(g.num_states())) /
                           static_cast<double>(k))));
  rep.certificates.push_back(
      BoundCertificate::make("value_dominates_cav_u", rep.cav_u_at_prior, rep.value));

  // superadditivity of the tensor square, one stage per component
  try {
    const double v1 = value_exact(g, 1, budget).value;
    const double v2 = value_exact(tensor_games(g, g), 2, budget).value;
    rep.certificates.push_back(BoundCertificate::make("tensor_superadditivity", v1, v2));
  } catch (const SizeError&) {
    // skipped when the exact solver cannot afford the tensor square
  }
  return rep;
}

}  // namespace martvar
