// Copyright 2026 The lswap authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LSWAP_EQUILIBRIUM_HPP
#define LSWAP_EQUILIBRIUM_HPP

#include <memory>
#include <vector>

#include "lswap/regret.hpp"

namespace lswap {

// n-player convex game under the polynomial utility gradient property:
// u_i(x) = g_i(x_{-i})[0] + <g_i(x_{-i}).tail, x_i> for the augmented
// gradient g_i in R^{d_i + 1} (leading entry = constant term). The gradient
// oracle must be pure.
class ConvexGame {
 public:
  virtual ~ConvexGame() = default;

  int players() const { return static_cast<int>(bodies_.size()); }
  const std::vector<BodyPtr>& bodies() const { return bodies_; }
  const BodyPtr& body(int i) const { return bodies_[static_cast<size_t>(i)]; }
  Eigen::Index dim(int i) const { return bodies_[static_cast<size_t>(i)]->dim; }

  virtual Vec gradient(int player, const std::vector<Vec>& profile) const = 0;

  double utility(int player, const std::vector<Vec>& profile) const {
    Vec g = gradient(player, profile);
    return g[0] + g.tail(g.size() - 1).dot(profile[static_cast<size_t>(player)]);
  }

 protected:
  explicit ConvexGame(std::vector<BodyPtr> bodies) : bodies_(std::move(bodies)) {}

 private:
  std::vector<BodyPtr> bodies_;
};

using GamePtr = std::shared_ptr<const ConvexGame>;

// Dense-tensor normal-form game: each player's strategy set is the
// probability simplex over their actions, utilities stored as full tensors
// (row-major, last player's index fastest).
class NormalFormGame : public ConvexGame {
 public:
  NormalFormGame(std::vector<Eigen::Index> action_counts,
                 std::vector<std::vector<double>> tensors);
  Vec gradient(int player, const std::vector<Vec>& profile) const override;
  const std::vector<Eigen::Index>& action_counts() const { return counts_; }
  const std::vector<std::vector<double>>& tensors() const { return tensors_; }
  double pure_utility(int player, const std::vector<Eigen::Index>& actions) const;

 private:
  std::vector<Eigen::Index> counts_;
  std::vector<std::vector<double>> tensors_;  // one per player
};

// Pairwise-separable utilities u_i = sum_j x_i^T A_{ij} x_j over supplied
// bodies.
class PolymatrixGame : public ConvexGame {
 public:
  struct Pair {
    int i;
    int j;
    Mat payoff;  // d_i x d_j, accrues to player i
  };
  PolymatrixGame(std::vector<BodyPtr> bodies, std::vector<Pair> pairs);
  Vec gradient(int player, const std::vector<Vec>& profile) const override;
  const std::vector<Pair>& pairs() const { return pairs_; }

 private:
  std::vector<Pair> pairs_;
};

// --- the Correlator-Deviator oracle and EAH ----------------------------------

// A deviation profile y = (1, phi_1, ..., phi_n) flattened into R^N with
// N = 1 + sum_i d_i (d_i + 1).
struct DeviationLayout {
  std::vector<Eigen::Index> dims;
  std::vector<Eigen::Index> block_offsets;  // offset of each player's block
  Eigen::Index total = 0;                   // N

  static DeviationLayout of(const ConvexGame& game);
  Vec pack(const std::vector<AffineMap>& maps) const;
  AffineMap unpack(const Vec& y, int player) const;
};

struct GerOrSep {
  bool is_ger = false;
  std::vector<Vec> atom;  // product profile x (one point per player)
  Vec row;                // x^T A as a vector over R^N
  Halfspace sep;          // valid when !is_ger
};

// Sum over players of the expected deviation regret
// u_i(x) - u_i(phi_i(x_i), x_{-i}) under the product profile x.
double correlator_value(const ConvexGame& game, const std::vector<Vec>& profile,
                        const std::vector<AffineMap>& deviations);

// The Correlator-Deviator oracle of the equilibrium computation: separates y
// from the deviation set (leading coordinate, then per-player
// semi-separation), or returns a good-enough-response built from fixed
// points.
GerOrSep cd_oracle(const ConvexGame& game, const Vec& y,
                   double fp_tol = kDefaultFpTol);

struct CorrelatedSolution {
  std::vector<std::vector<Vec>> atoms;  // product profiles
  Vec weights;
  std::vector<long> ger_indices;  // dual-loop iteration of each atom
};

struct EahStats {
  long dual_iterations = 0;
  long ger_count = 0;      // L
  long ger_bound = 0;      // Theorem iteration bound in force
  long sep_count = 0;
  long primal_rounds = 0;
  double primal_value = 0.0;  // certified min_y lambda^T (X^T A) y over the
                              // shell of the deviation set
};

// Generalized Ellipsoid Against Hope: runs the central-cut loop on the
// infeasible dual over ball(0, R_y), harvesting GER responses and separating
// cuts, then solves the compressed primal over mixtures of the responses.
// `interior` must be a point of the deviation set (leading coordinate 1);
// the identity-deviation profile always qualifies.
CorrelatedSolution eah_solve(
    const std::function<GerOrSep(const Vec&)>& oracle, Eigen::Index n_dim,
    double r_y, double R_y, double B, double eps, const Vec& interior,
    EahStats* stats = nullptr);

// eps-approximate linear correlated equilibrium of the game.
CorrelatedSolution compute_lce(const ConvexGame& game, double eps,
                               EahStats* stats = nullptr);

// Exact maximum expected gain of player i over all linear deviations
// phi in Phi(P_i), under the solution mixture. The player's body must be a
// simplex or an H-polytope.
double lce_gap(const CorrelatedSolution& solution, const ConvexGame& game,
               int player);

// --- self-play -----------------------------------------------------------------

struct SelfPlayResult {
  std::vector<RegretReport> reports;     // exact, when evaluable
  CorrelatedSolution empirical;          // uniform mixture over rounds
  std::vector<std::vector<Vec>> rounds;  // per-round product profiles
};

// n independent linear-swap learners; player i's loss at round t is the
// negated utility gradient given the others' play, clipped into [-1,1].
SelfPlayResult selfplay(const ConvexGame& game, long horizon,
                        double fp_tol = kDefaultFpTol);

}  // namespace lswap

#endif  // LSWAP_EQUILIBRIUM_HPP
