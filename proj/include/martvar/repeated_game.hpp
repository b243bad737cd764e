#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "martvar/certificate.hpp"
#include "martvar/distribution.hpp"
#include "martvar/matrix_game.hpp"
#include "martvar/value_table.hpp"

namespace martvar {

/// Zero-sum repeated game with incomplete information on one side: a state
/// x is drawn once from the prior and revealed to player 1 (the maximizer)
/// only; the stage matrix payoffs[x] is then played k times with both
/// players observing all past actions.  The k-stage payoff is the average
/// of the stage payoffs.
struct IncompleteInfoGame {
  LabelSet states;
  std::vector<double> prior;    // same length as states
  std::vector<Matrix> payoffs;  // one matrix per state, identical shapes

  std::size_t num_states() const { return states.size(); }
  std::size_t num_p1_actions() const { return payoffs.empty() ? 0 : payoffs.front().size(); }
  std::size_t num_p2_actions() const {
    return payoffs.empty() || payoffs.front().empty() ? 0 : payoffs.front().front().size();
  }

  Distribution prior_dist() const { return Distribution(states, prior); }

  /// Throws ConfigError on shape or prior inconsistencies.
  void validate() const;

  nlohmann::json to_json() const;
  static IncompleteInfoGame from_json(const nlohmann::json& j);
};

/// Largest absolute payoff across all states.
double game_norm(const IncompleteInfoGame& g);

/// Two-state, two-action game with prior (1/2, 1/2) whose averaged one-shot
/// value u vanishes at every belief (rows of the averaged matrix are
/// negatives of each other) while the repeated values v_k stay strictly
/// positive, of order 1/sqrt(k).
IncompleteInfoGame example_game();

/// Combined game on the product state space with the product prior.
/// Player 1 picks which component to play each stage (actions are the
/// disjoint union of the components' actions), player 2 must cover both
/// components (actions are pairs), and the payoff is read off the chosen
/// component at its own state coordinate.
IncompleteInfoGame tensor_games(const IncompleteInfoGame& a, const IncompleteInfoGame& b);

/// Value of the belief-averaged one-shot matrix game sum_x q(x) payoffs[x]
/// (the non-revealing value u(q)).
double nonrevealing_value(const IncompleteInfoGame& g, const std::vector<double>& q);

struct CavUResult {
  ValueTable u;      ///< non-revealing value on the belief grid
  ValueTable cav_u;  ///< its upper concave envelope
};

/// u and cav u sampled on a uniform belief grid with step h (1/h must be an
/// integer).  Requires exactly two states; the belief coordinate is the
/// probability of states[0].
CavUResult cav_u_binary(const IncompleteInfoGame& g, double h);

/// Exact per-stage value v_k of the k-stage game via one sequence-form LP
/// per player (realization weights for the informed player over full
/// histories; mirrored for the uninformed player).  The reported value is
/// the midpoint of the two optima; the certificate bounds the gap.
/// Refuses instances with |X| * (|I||J|)^k above the budget.
GameValueResult value_exact(const IncompleteInfoGame& g, int k, std::size_t budget = 1000000);

struct RecursiveOptions {
  double p_grid = 1e-2;      ///< uniform belief grid step (1/step integer)
  double sigma_grid = 1e-2;  ///< coarse scan step for P1's one-stage strategy
  int refine_rounds = 3;     ///< each round shrinks the scan box 10x around the incumbent
};

/// Approximate v_t on the belief grid for every horizon t = 1..k, by the
/// value recursion
///   t v_t(p) = max_sigma [ min_j stage(p, sigma, j)
///                          + sum_i sbar(i) (t-1) v_{t-1}(p_i) ]
/// where sbar(i) is the prior-averaged probability of action i and p_i the
/// Bayes posterior (the prior when sbar(i) = 0; that branch carries no
/// weight).  The continuation does not depend on j because player 2's
/// actions reveal nothing.  Supports two states and at most two P1 actions.
std::vector<ValueTable> value_recursive_stages(const IncompleteInfoGame& g, int k,
                                               const RecursiveOptions& opt = {});

/// Final table of value_recursive_stages.
ValueTable value_recursive(const IncompleteInfoGame& g, int k, const RecursiveOptions& opt = {});

struct ErrorTermReport {
  int k = 0;
  bool used_exact = false;  ///< exact LP when the budget allows, else recursion
  double value = 0.0;       ///< v_k at the game's prior
  double cav_u_at_prior = 0.0;
  double norm = 0.0;
  std::vector<BoundCertificate> certificates;

  bool all_hold() const;
};

/// Certifies the error-term bounds at the game's prior for two-state games:
/// (a) v_k - cav u <= norm * (grid max variation + 10 h k) / k,
/// (b) v_k - cav u <= norm * sqrt(2 ln|X| / k),
/// (c) v_k >= cav u, and
/// (d) superadditivity of the tensor square at one stage each:
///     v_2(g (x) g) >= v_1(g), when the exact solver budget allows it.
ErrorTermReport certify_error_term(const IncompleteInfoGame& g, int k,
                                   std::size_t budget = 1000000);

}  // namespace martvar
