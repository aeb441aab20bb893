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

#ifndef LSWAP_REGRET_HPP
#define LSWAP_REGRET_HPP

#include <vector>

#include "lswap/ellipsoid.hpp"
#include "lswap/endo.hpp"
#include "lswap/geometry.hpp"

namespace lswap {

// Outer approximation of the endomorphism set: an origin-centered base ball
// in transformation space intersected with accumulated sound cuts.
struct ShellSet {
  Eigen::Index flat_dim = 0;
  double base_radius = 0.0;   // R_phi
  double inner_radius = 0.0;  // certified ball inside Phi(P) (0 if flat)
  Vec inner_center;           // flat phi_a

  std::vector<TransformHalfspace> cuts;

  BodyPtr to_body() const;
  // Appends cuts, skipping near-duplicates. Returns how many were added.
  long absorb(const std::vector<TransformHalfspace>& more);
};

ShellSet make_base_shell(const BoundedBody& body, double base_radius_override = -1.0);

// One step of shell gradient descent: an eps-accurate Euclidean projection of
// (x_prev - eta * loss_prev) onto the shell.
Vec shell_gd_step(const Vec& x_prev, const Vec& loss_prev, double eta,
                  const ShellSet& shell, double eps);

struct ShellProjResult {
  ShellSet shell;
  AffineMap transform;
  Vec fixed_point;
  double fp_residual = 0.0;
  // q-bracket of the search: the shell provably excludes the open ball of
  // radius q_lo around the target, and the transform lies within q_hi.
  double q_lo = 0.0;
  double q_hi = 0.0;
  // sqrt(max(q_hi^2 - q_lo^2, 0)): honest bound on the distance between the
  // returned transform and the true projection of the target onto the shell.
  double projection_slack = 0.0;
  long shell_ellipsoid_runs = 0;
};

// Shell projection: grows a ball around `target_flat` until ShellEllipsoid
// finds a transformation with a fixed point, accumulating separating
// frontiers into the shell. The q level is located by doubling + bisection
// at resolution delta = eps/(4D); every bracket endpoint is certified by an
// actual ShellEllipsoid run, so the Theorem guarantees are preserved.
ShellProjResult shell_proj(const BoundedBody& body, const ShellSet& base,
                           const Vec& target_flat, double eps,
                           double fp_tol = kDefaultFpTol);

// --- the main learner ---------------------------------------------------------

struct RegretRound {
  Vec play;             // original coordinates
  Vec loss;             // original coordinates (after clipping)
  double realized = 0.0;
  double dual_loss = 0.0;          // <L_t, phi_t> in work coordinates
  double loss_matrix_norm = 0.0;   // ||L_t||_F in work coordinates
  double projection_slack = 0.0;
};

// Linear-swap regret minimizer for a convex body. Internally reduces the
// probability simplex to its full-dimensional affine-hull coordinates,
// preconditions the body so the certified inner ball sits at the origin, and
// transports losses accordingly; plays are mapped back to the original
// coordinates.
class LinSwapLearner {
 public:
  LinSwapLearner(BodyPtr body, long horizon, double fp_tol = kDefaultFpTol);

  const Vec& next() const { return play_; }
  void observe(const Vec& loss);

  long round() const { return t_; }
  long horizon() const { return horizon_; }
  double beta() const { return beta_; }
  double projection_eps() const { return eps_proj_; }
  double shell_radius() const { return shell_radius_; }
  double loss_matrix_bound() const { return loss_bound_; }
  bool clipped_any() const { return clipped_; }
  const std::vector<RegretRound>& history() const { return history_; }
  // work-space internals, exposed for the dual-regret inequality checks
  const AffineMap& current_transform() const { return phi_; }
  const Vec& current_work_play() const { return work_play_; }
  Vec work_loss(const Vec& loss) const;
  const BoundedBody& work_body() const { return *work_; }
  double loss_scale() const;  // original regret = loss_scale * work regret

 private:
  Vec to_original(const Vec& work_point) const;

  BodyPtr original_;
  BodyPtr work_;
  Mat hull_basis_;      // d x d' (identity when no reduction)
  Vec hull_offset_;
  Mat loss_transport_;  // work loss = loss_transport * original loss
  double regret_scale_ = 1.0;
  long horizon_;
  double fp_tol_;
  double shell_radius_ = 0.0;
  double beta_ = 0.0;
  double eps_proj_ = 0.0;
  double loss_bound_ = 0.0;  // G
  long t_ = 0;
  AffineMap phi_;
  Vec work_play_;
  Vec play_;
  bool clipped_ = false;
  std::vector<RegretRound> history_;
};

// Projected-gradient external-regret baseline.
class OgdLearner {
 public:
  OgdLearner(BodyPtr body, long horizon);
  const Vec& next() const { return play_; }
  void observe(const Vec& loss);
  double step_size() const { return eta_; }

 private:
  BodyPtr body_;
  double eta_;
  Vec play_;
};

// --- exact evaluation ---------------------------------------------------------

struct RegretReport {
  double realized = 0.0;
  double best_fixed_deviation_value = 0.0;
  double linswap_regret = 0.0;
  std::vector<double> per_round_realized;
  std::vector<double> per_round_regret;  // exact prefix regret when cheap,
                                         // else empty
};

// Minimizes <sum_t L_t, phi> over the endomorphisms of P: closed-form
// column-wise best response for the simplex, cutting-plane over the H-rep
// membership oracle for H-polytopes. Throws UnsupportedBody otherwise.
RegretReport exact_linswap_regret(const std::vector<Vec>& plays,
                                  const std::vector<Vec>& losses,
                                  const BoundedBody& body);

// Same evaluation, forced through the H-representation route (for
// cross-validating the closed form; `rows`/`offsets` must describe `body`).
RegretReport exact_linswap_regret_hrep(const std::vector<Vec>& plays,
                                       const std::vector<Vec>& losses,
                                       const BoundedBody& body, const Mat& rows,
                                       const Vec& offsets);

// H-representation of the probability simplex in R^d: x >= 0 plus the two
// halves of sum x = 1.
void simplex_hrep(Eigen::Index d, Mat& rows, Vec& offsets);

struct EndoOptResult {
  AffineMap transform;
  double value = 0.0;
};

// Optimizes <(gm|gb), phi> over the endomorphisms of a body described by an
// H-representation, with linear maximization answered by `source` (the same
// body; kept separate so closed-form linopt shapes stay on the fast path).
// Value accuracy ~1e-7.
EndoOptResult optimize_linear_over_endo_hrep(const BoundedBody& source,
                                             const Mat& rows, const Vec& offsets,
                                             const Mat& gm, const Vec& gb,
                                             bool maximize);

// Closed-form optimum over the column-stochastic representatives of the
// simplex endomorphisms. Requires an objective assembled from simplex plays
// (so that gm's column sums equal gb, making the offset part fold in).
EndoOptResult optimize_linear_over_endo_simplex(Eigen::Index d, const Mat& gm,
                                                bool maximize);

}  // namespace lswap

#endif  // LSWAP_REGRET_HPP
