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

#include "lswap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lswap {

// --- game adapters ------------------------------------------------------------

namespace {

std::vector<BodyPtr> simplex_bodies(const std::vector<Eigen::Index>& counts) {
  std::vector<BodyPtr> out;
  out.reserve(counts.size());
  for (Eigen::Index c : counts) out.push_back(make_simplex(c));
  return out;
}

}  // namespace

NormalFormGame::NormalFormGame(std::vector<Eigen::Index> action_counts,
                               std::vector<std::vector<double>> tensors)
    : ConvexGame(simplex_bodies(action_counts)),
      counts_(std::move(action_counts)),
      tensors_(std::move(tensors)) {
  require(!counts_.empty() && tensors_.size() == counts_.size(),
          ErrorCode::kInvalidArgument, "normal form: players mismatch");
  size_t cells = 1;
  for (Eigen::Index c : counts_) {
    require(c >= 1, ErrorCode::kInvalidArgument, "normal form: empty action set");
    cells *= static_cast<size_t>(c);
  }
  for (const auto& t : tensors_) {
    require(t.size() == cells, ErrorCode::kInvalidArgument,
            "normal form: tensor size mismatch");
    for (double v : t) {
      require(std::abs(v) <= 1.0 + 1e-12, ErrorCode::kInvalidArgument,
              "normal form: utilities must lie in [-1,1]");
    }
  }
}

double NormalFormGame::pure_utility(int player,
                                    const std::vector<Eigen::Index>& a) const {
  size_t idx = 0;
  for (size_t j = 0; j < counts_.size(); ++j) {
    idx = idx * static_cast<size_t>(counts_[j]) + static_cast<size_t>(a[j]);
  }
  return tensors_[static_cast<size_t>(player)][idx];
}

Vec NormalFormGame::gradient(int player, const std::vector<Vec>& profile) const {
  const int n = players();
  const Eigen::Index di = counts_[static_cast<size_t>(player)];
  Vec g = Vec::Zero(di + 1);
  std::vector<Eigen::Index> idx(static_cast<size_t>(n), 0);
  // direct contraction over all pure profiles (desk-scale tensors)
  while (true) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      w *= profile[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]];
    }
    if (w != 0.0) {
      for (Eigen::Index a = 0; a < di; ++a) {
        idx[static_cast<size_t>(player)] = a;
        g[1 + a] += w * pure_utility(player, idx);
      }
      idx[static_cast<size_t>(player)] = 0;
    }
    // advance the mixed-radix counter over the other players
    int j = n - 1;
    for (; j >= 0; --j) {
      if (j == player) continue;
      if (++idx[static_cast<size_t>(j)] < counts_[static_cast<size_t>(j)]) break;
      idx[static_cast<size_t>(j)] = 0;
    }
    if (j < 0) break;
  }
  return g;
}

PolymatrixGame::PolymatrixGame(std::vector<BodyPtr> bodies,
                               std::vector<Pair> pairs)
    : ConvexGame(std::move(bodies)), pairs_(std::move(pairs)) {
  for (const Pair& p : pairs_) {
    require(p.i >= 0 && p.i < players() && p.j >= 0 && p.j < players() &&
                p.i != p.j,
            ErrorCode::kInvalidArgument, "polymatrix: bad pair");
    require(p.payoff.rows() == dim(p.i) && p.payoff.cols() == dim(p.j),
            ErrorCode::kDimensionMismatch, "polymatrix: payoff dims");
  }
}

Vec PolymatrixGame::gradient(int player, const std::vector<Vec>& profile) const {
  Vec g = Vec::Zero(dim(player) + 1);
  for (const Pair& p : pairs_) {
    if (p.i != player) continue;
    g.tail(dim(player)) += p.payoff * profile[static_cast<size_t>(p.j)];
  }
  return g;
}

// --- deviation layout ----------------------------------------------------------

DeviationLayout DeviationLayout::of(const ConvexGame& game) {
  DeviationLayout l;
  l.total = 1;
  for (int i = 0; i < game.players(); ++i) {
    const Eigen::Index d = game.dim(i);
    l.dims.push_back(d);
    l.block_offsets.push_back(l.total);
    l.total += d * (d + 1);
  }
  return l;
}

Vec DeviationLayout::pack(const std::vector<AffineMap>& maps) const {
  Vec y = Vec::Zero(total);
  y[0] = 1.0;
  for (size_t i = 0; i < maps.size(); ++i) {
    y.segment(block_offsets[i], dims[i] * (dims[i] + 1)) = maps[i].flatten();
  }
  return y;
}

AffineMap DeviationLayout::unpack(const Vec& y, int player) const {
  const Eigen::Index d = dims[static_cast<size_t>(player)];
  return AffineMap::unflatten(
      y.segment(block_offsets[static_cast<size_t>(player)], d * (d + 1)), d);
}

// --- Correlator value and the CD oracle -----------------------------------------

double correlator_value(const ConvexGame& game, const std::vector<Vec>& profile,
                        const std::vector<AffineMap>& deviations) {
  require(static_cast<int>(profile.size()) == game.players() &&
              deviations.size() == profile.size(),
          ErrorCode::kDimensionMismatch, "correlator_value");
  double total = 0.0;
  for (int i = 0; i < game.players(); ++i) {
    Vec g = game.gradient(i, profile);
    const Vec& xi = profile[static_cast<size_t>(i)];
    total += g.tail(g.size() - 1)
                 .dot(xi - deviations[static_cast<size_t>(i)].apply(xi));
  }
  return total;
}

GerOrSep cd_oracle(const ConvexGame& game, const Vec& y, double fp_tol) {
  DeviationLayout layout = DeviationLayout::of(game);
  require_dim(y, layout.total, "cd_oracle");
  GerOrSep out;
  if (std::abs(y[0] - 1.0) > 1e-9) {
    Vec e0 = Vec::Zero(layout.total);
    e0[0] = y[0] > 1.0 ? 1.0 : -1.0;
    out.sep = Halfspace(e0, e0[0] > 0.0 ? 1.0 : -1.0);
    return out;
  }
  std::vector<Vec> fixed;
  for (int i = 0; i < game.players(); ++i) {
    AffineMap phi = layout.unpack(y, i);
    SemiSeparationResult s = semi_separate(*game.body(i), phi, fp_tol);
    if (!s.fixed_point.has_value()) {
      // lift the player's halfspace to R^N (zeros elsewhere)
      Vec n = Vec::Zero(layout.total);
      const Eigen::Index d = layout.dims[static_cast<size_t>(i)];
      n.segment(layout.block_offsets[static_cast<size_t>(i)], d * (d + 1)) =
          s.halfspace.halfspace.normal;
      out.sep = Halfspace(std::move(n), s.halfspace.halfspace.offset);
      return out;
    }
    fixed.push_back(std::move(*s.fixed_point));
  }
  // All components have fixed points: the product profile is a GER, and the
  // row vector reproduces the Correlator utility against any deviation
  // profile: <row, y'> = sum_i <g_i, x_i - phi'_i(x_i)>.
  out.is_ger = true;
  out.atom = fixed;
  out.row = Vec::Zero(layout.total);
  for (int i = 0; i < game.players(); ++i) {
    Vec g = game.gradient(i, fixed);
    Vec gt = g.tail(g.size() - 1);
    const Vec& xi = fixed[static_cast<size_t>(i)];
    out.row[0] += gt.dot(xi);
    const Eigen::Index d = layout.dims[static_cast<size_t>(i)];
    Mat m = gt * xi.transpose();
    Vec block(d * (d + 1));
    block.head(d * d) = Eigen::Map<const Vec>(m.data(), d * d);
    block.tail(d) = gt;
    out.row.segment(layout.block_offsets[static_cast<size_t>(i)], d * (d + 1)) =
        -block;
  }
  return out;
}

// --- EAH -----------------------------------------------------------------------

namespace {

// Sliced deviation-set shell: the hyperplane y0 = 1 removed, leaving a
// full-dimensional intersection body in R^{N-1}.
struct SlicedShell {
  Eigen::Index n_dim;  // original N
  double radius = 0.0;
  std::vector<Halfspace> cuts;  // over R^{N-1}
  Vec interior;                 // sliced identity-deviation point

  BodyPtr to_body() const {
    BodyPtr ball = make_ball(Vec::Zero(n_dim - 1), radius);
    if (cuts.empty()) return ball;
    return make_intersection(std::move(ball), cuts, 1e-9, interior);
  }
  void add(const Halfspace& full) {
    // slice <h, (1, yhat)> <= b  into  <h_tail, yhat> <= b - h_0
    Vec tail = full.normal.tail(n_dim - 1);
    const double tn = tail.norm();
    if (tn < 1e-12) return;  // pure leading-coordinate constraint
    cuts.emplace_back(tail, full.offset - full.normal[0]);
  }
  // minimize <w, y> over {1} x (sliced shell); w given over R^N
  double minimize(const Vec& w, double tol, Vec* arg) const {
    Vec wt = w.tail(n_dim - 1);
    if (wt.norm() < 1e-14) {
      if (arg) *arg = interior;
      return w[0];
    }
    BodyPtr body = to_body();
    LinOptResult r = linopt(*body, -wt, tol);
    if (arg) *arg = r.point;
    return w[0] - r.value;
  }
};

}  // namespace

CorrelatedSolution eah_solve(const std::function<GerOrSep(const Vec&)>& oracle,
                             Eigen::Index n_dim, double r_y, double R_y,
                             double B, double eps, const Vec& interior,
                             EahStats* stats) {
  require(B >= 1.0 && eps > 0.0 && R_y > 0.0, ErrorCode::kInvalidArgument,
          "eah_solve");
  require_dim(interior, n_dim, "eah_solve: interior");
  require(std::abs(interior[0] - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
          "eah_solve: interior point must have leading coordinate 1");
  (void)r_y;  // recorded by callers; the strong loop only needs R_y
  const double eps_dual = eps / 3.0;
  const double xi = eps / 4.0;  // inner linopt budget of the compressed primal

  // ---- dual loop over the infeasible program -------------------------------
  Ellipsoid e = Ellipsoid::ball(Vec::Zero(n_dim), R_y);
  const double floor =
      log_unit_ball_volume(n_dim) + n_dim * std::log(eps_dual / B);
  const long bound = static_cast<long>(std::ceil(
      2.0 * (static_cast<double>(n_dim) + 1.0) * static_cast<double>(n_dim) *
      std::log(std::max(R_y, 1.0) * B / eps_dual)));
  const long cap = engine_cap(n_dim, e.log_volume(), floor);

  std::vector<std::vector<Vec>> atoms;
  std::vector<Vec> rows;
  std::vector<long> ger_iters;
  SlicedShell shell;
  shell.n_dim = n_dim;
  shell.radius = std::sqrt(std::max(R_y * R_y - 1.0, 1e-6));
  shell.interior = interior.tail(n_dim - 1);

  EahStats local;
  EahStats& st = stats ? *stats : local;
  st = EahStats{};
  st.ger_bound = bound;

  while (e.log_volume() >= floor) {
    require(st.dual_iterations < cap, ErrorCode::kIterationCapExceeded,
            "eah_solve: dual iteration cap exceeded");
    ++st.dual_iterations;
    const Vec z = e.center();
    GerOrSep r = oracle(z);
    if (r.is_ger) {
      // cut {y : <row, y> <= 0}; the row vanishes at the query center
      const double rn = r.row.norm();
      require(rn > 1e-300, ErrorCode::kInternal, "eah_solve: zero GER row");
      Halfspace h(r.row / rn, 0.0);
      require(h.violation(z) >= -1e-6, ErrorCode::kInconsistentOracle,
              "eah_solve: GER row does not vanish at the query");
      e.central_cut(h, 1e-6);
      atoms.push_back(std::move(r.atom));
      rows.push_back(std::move(r.row));
      ger_iters.push_back(st.dual_iterations);
      ++st.ger_count;
    } else {
      e.central_cut(r.sep);
      shell.add(r.sep);
      ++st.sep_count;
    }
  }
  require(st.ger_count <= bound, ErrorCode::kInternal,
          "eah_solve: GER count exceeded the theorem bound");
  require(!atoms.empty(), ErrorCode::kCompressedPrimalInfeasible,
          "eah_solve: dual loop produced no GER responses");

  // ---- compressed primal over mixtures of the responses ---------------------
  // Active-set search: solve the feasibility program over the mixture weights
  // of a small working set, enlarging the set (or the shell) on demand.
  const long L = static_cast<long>(atoms.size());
  std::vector<long> active;
  const auto is_dup = [&](long a, long b) {
    return (rows[static_cast<size_t>(a)] - rows[static_cast<size_t>(b)]).norm() <
           1e-9;
  };
  for (long k = L - 1; k >= 0 && static_cast<long>(active.size()) < 32; --k) {
    bool dup = false;
    for (long a : active) dup = dup || is_dup(a, k);
    if (!dup) active.push_back(k);
  }

  Vec lambda_full = Vec::Zero(L);
  const double accept = -(eps - xi);
  bool solved = false;
  Vec last_y;  // most recent inner minimizer (candidate for augmentation)

  for (int round = 0; round < 64 && !solved; ++round) {
    ++st.primal_rounds;
    const long m = static_cast<long>(active.size());
    Mat w_rows(m, n_dim);
    for (long k = 0; k < m; ++k) {
      w_rows.row(k) = rows[static_cast<size_t>(active[static_cast<size_t>(k)])];
    }

    // feasibility over the weight simplex, sliced to its full-dimensional
    // corner coordinates
    const auto lambda_of = [&](const Vec& lhat) {
      Vec l(m);
      l.head(m - 1) = lhat;
      l[m - 1] = 1.0 - lhat.sum();
      return l;
    };
    std::optional<Vec> found;
    const auto sep = [&](const Vec& lhat) -> std::optional<Halfspace> {
      // corner-simplex constraints first
      for (Eigen::Index i = 0; i < m - 1; ++i) {
        if (lhat[i] < 0.0) {
          Vec n = Vec::Zero(m - 1);
          n[i] = -1.0;
          return Halfspace(n, 0.0);
        }
      }
      if (lhat.sum() > 1.0) {
        return Halfspace(Vec::Constant(m - 1, 1.0), 1.0);
      }
      Vec lam = lambda_of(lhat);
      Vec w = w_rows.transpose() * lam;
      Vec y_arg;
      const double val = shell.minimize(w, xi, &y_arg);
      last_y = y_arg;
      if (val >= accept) {
        found = lam;
        return std::nullopt;
      }
      // cut on the violated linear constraint <scores, lambda> >= accept
      Vec scores(m);
      Vec y_full(n_dim);
      y_full[0] = 1.0;
      y_full.tail(n_dim - 1) = y_arg;
      for (long k = 0; k < m; ++k) {
        scores[k] = rows[static_cast<size_t>(active[static_cast<size_t>(k)])]
                        .dot(y_full);
      }
      Vec n = -(scores.head(m - 1).array() - scores[m - 1]).matrix();
      const double off = scores[m - 1] - accept;
      if (n.norm() < 1e-14) return Halfspace(Vec::Constant(m - 1, 1.0), 1.0);
      return Halfspace(n, off);
    };

    if (m == 1) {
      Vec w = w_rows.row(0).transpose();
      Vec y_arg;
      if (shell.minimize(w, xi, &y_arg) >= accept) {
        found = Vec::Constant(1, 1.0);
      } else {
        last_y = y_arg;
      }
    } else {
      const double gamma =
          eps / (12.0 * std::sqrt(static_cast<double>(m)) * B * R_y);
      Ellipsoid le = Ellipsoid::ball(Vec::Constant(m - 1, 1.0 / m), 2.0);
      const double lfloor =
          log_unit_ball_volume(m - 1) + (m - 1) * std::log(gamma);
      try {
        FeasibilityResult fr = feasibility_engine(
            sep, le, lfloor, engine_cap(m - 1, le.log_volume(), lfloor));
        (void)fr;
      } catch (const Error&) {
        found.reset();
      }
    }

    if (found.has_value()) {
      Vec lam = found->cwiseMax(0.0);
      lam /= lam.sum();
      for (long k = 0; k < m; ++k) {
        lambda_full[active[static_cast<size_t>(k)]] = lam[k];
      }
      // certify the final mixture against the shell at full precision
      Vec w = w_rows.transpose() * lam;
      st.primal_value = shell.minimize(w, xi, nullptr);
      solved = st.primal_value >= -eps;
      if (solved) break;
      lambda_full.setZero();
    }

    // augmentation: consult the oracle at the offending shell point
    require(last_y.size() == n_dim - 1, ErrorCode::kCompressedPrimalInfeasible,
            "eah_solve: compressed primal stalled without a witness");
    Vec y_full(n_dim);
    y_full[0] = 1.0;
    y_full.tail(n_dim - 1) = last_y;
    GerOrSep r = oracle(y_full);
    bool progressed = false;
    if (r.is_ger) {
      bool dup = false;
      for (long a : active) {
        dup = dup || (rows[static_cast<size_t>(a)] - r.row).norm() < 1e-9;
      }
      if (!dup) {
        atoms.push_back(std::move(r.atom));
        rows.push_back(std::move(r.row));
        ger_iters.push_back(-1);
        lambda_full.conservativeResize(atoms.size());
        lambda_full[atoms.size() - 1] = 0.0;
        active.push_back(static_cast<long>(atoms.size()) - 1);
        progressed = true;
      }
    } else {
      const size_t before = shell.cuts.size();
      shell.add(r.sep);
      progressed = shell.cuts.size() > before;
    }
    require(progressed, ErrorCode::kCompressedPrimalInfeasible,
            "eah_solve: compressed primal could not be certified");
  }
  require(solved, ErrorCode::kCompressedPrimalInfeasible,
          "eah_solve: compressed primal unsolved after the round cap");

  // assemble the sparse mixture
  CorrelatedSolution sol;
  for (Eigen::Index k = 0; k < lambda_full.size(); ++k) {
    if (lambda_full[k] > 1e-12) {
      sol.atoms.push_back(atoms[static_cast<size_t>(k)]);
      sol.weights.conservativeResize(sol.atoms.size());
      sol.weights[sol.atoms.size() - 1] = lambda_full[k];
      sol.ger_indices.push_back(ger_iters[static_cast<size_t>(k)]);
    }
  }
  sol.weights /= sol.weights.sum();
  return sol;
}

CorrelatedSolution compute_lce(const ConvexGame& game, double eps,
                               EahStats* stats) {
  DeviationLayout layout = DeviationLayout::of(game);
  double r_sq = 1.0;
  double r_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.players(); ++i) {
    EndoBounds eb = EndoBounds::of(*game.body(i));
    r_sq += eb.outer_radius * eb.outer_radius;
    r_min = std::min(r_min, eb.inner_radius);
  }
  const double R_y = std::sqrt(r_sq);
  const double B = std::sqrt(static_cast<double>(layout.total));
  const auto oracle = [&](const Vec& y) { return cd_oracle(game, y); };
  std::vector<AffineMap> identities;
  for (int i = 0; i < game.players(); ++i) {
    identities.push_back(AffineMap::identity(game.dim(i)));
  }
  return eah_solve(oracle, layout.total, r_min, R_y, B, eps,
                   layout.pack(identities), stats);
}

double lce_gap(const CorrelatedSolution& solution, const ConvexGame& game,
               int player) {
  require(player >= 0 && player < game.players(), ErrorCode::kInvalidArgument,
          "lce_gap: player index");
  require(!solution.atoms.empty(), ErrorCode::kInvalidArgument,
          "lce_gap: empty solution");
  const BoundedBody& body = *game.body(player);
  const Eigen::Index d = body.dim;
  Mat gm = Mat::Zero(d, d);
  Vec gb = Vec::Zero(d);
  double linear_base = 0.0;  // sum_k w_k <g_k, x_ik>
  for (size_t k = 0; k < solution.atoms.size(); ++k) {
    const double w = solution.weights[static_cast<Eigen::Index>(k)];
    const std::vector<Vec>& atom = solution.atoms[k];
    Vec g = game.gradient(player, atom);
    Vec gt = g.tail(d);
    const Vec& xi = atom[static_cast<size_t>(player)];
    gm += w * gt * xi.transpose();
    gb += w * gt;
    linear_base += w * gt.dot(xi);
  }
  EndoOptResult opt;
  if (std::holds_alternative<SimplexShape>(body.shape)) {
    opt = optimize_linear_over_endo_simplex(d, gm, true);
  } else if (const auto* hp = std::get_if<HPolytopeShape>(&body.shape)) {
    opt = optimize_linear_over_endo_hrep(body, hp->normals, hp->offsets, gm, gb,
                                         true);
  } else {
    throw Error(ErrorCode::kUnsupportedBody,
                "lce_gap: player body must be a simplex or an H-polytope");
  }
  // gap = max_phi E[u(phi(x_i), x_-i)] - E[u(x)]. The constant utility terms
  // g_k[0] appear in both expectations and cancel.
  return opt.value - linear_base;
}

SelfPlayResult selfplay(const ConvexGame& game, long horizon, double fp_tol) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "selfplay: T >= 1");
  const int n = game.players();
  std::vector<LinSwapLearner> learners;
  learners.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    learners.emplace_back(game.body(i), horizon, fp_tol);
  }
  SelfPlayResult out;
  out.rounds.reserve(static_cast<size_t>(horizon));
  for (long t = 0; t < horizon; ++t) {
    std::vector<Vec> profile;
    profile.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) profile.push_back(learners[static_cast<size_t>(i)].next());
    for (int i = 0; i < n; ++i) {
      Vec g = game.gradient(i, profile);
      Vec loss = (-g.tail(game.dim(i))).cwiseMax(-1.0).cwiseMin(1.0);
      learners[static_cast<size_t>(i)].observe(loss);
    }
    out.rounds.push_back(std::move(profile));
  }
  // empirical mixture
  out.empirical.atoms = out.rounds;
  out.empirical.weights =
      Vec::Constant(static_cast<Eigen::Index>(out.rounds.size()),
                    1.0 / static_cast<double>(out.rounds.size()));
  out.empirical.ger_indices.assign(out.rounds.size(), -1);
  // exact per-player reports where the body supports them
  for (int i = 0; i < n; ++i) {
    std::vector<Vec> plays, losses;
    plays.reserve(out.rounds.size());
    losses.reserve(out.rounds.size());
    for (size_t t = 0; t < out.rounds.size(); ++t) {
      plays.push_back(out.rounds[t][static_cast<size_t>(i)]);
      losses.push_back(learners[static_cast<size_t>(i)].history()[t].loss);
    }
    try {
      out.reports.push_back(exact_linswap_regret(plays, losses, *game.body(i)));
    } catch (const Error&) {
      out.reports.emplace_back();
    }
  }
  return out;
}

}  // namespace lswap
