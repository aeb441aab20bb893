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

#include "lswap/regret.hpp"

#include <algorithm>
#include <cmath>

namespace lswap {

namespace {

bool near_duplicate(const Halfspace& a, const Halfspace& b) {
  return a.normal.dot(b.normal) > 1.0 - 1e-12 &&
         std::abs(a.offset - b.offset) < 1e-10;
}

}  // namespace

BodyPtr ShellSet::to_body() const {
  std::vector<Halfspace> plain;
  plain.reserve(cuts.size());
  for (const TransformHalfspace& c : cuts) plain.push_back(c.halfspace);
  BodyPtr ball = make_ball(Vec::Zero(flat_dim), base_radius);
  if (plain.empty()) return ball;
  // Phi(P)'s certified inner ball survives every sound cut.
  const double r = inner_radius > 0.0 ? inner_radius : 1e-9;
  return make_intersection(std::move(ball), std::move(plain), r, inner_center);
}

long ShellSet::absorb(const std::vector<TransformHalfspace>& more) {
  long added = 0;
  for (const TransformHalfspace& c : more) {
    bool dup = false;
    for (auto it = cuts.rbegin(); it != cuts.rend() && !dup; ++it) {
      dup = near_duplicate(it->halfspace, c.halfspace);
    }
    if (!dup) {
      cuts.push_back(c);
      ++added;
    }
  }
  return added;
}

ShellSet make_base_shell(const BoundedBody& body, double base_radius_override) {
  EndoBounds eb = EndoBounds::of(body);
  ShellSet s;
  s.flat_dim = body.dim * (body.dim + 1);
  s.base_radius =
      base_radius_override > 0.0 ? base_radius_override : eb.outer_radius;
  s.inner_radius = eb.inner_radius;
  s.inner_center = eb.center_map.flatten();
  return s;
}

Vec shell_gd_step(const Vec& x_prev, const Vec& loss_prev, double eta,
                  const ShellSet& shell, double eps) {
  require(eta > 0.0 && eps > 0.0, ErrorCode::kInvalidArgument, "shell_gd_step");
  require(x_prev.size() == shell.flat_dim && loss_prev.size() == shell.flat_dim,
          ErrorCode::kDimensionMismatch, "shell_gd_step");
  Vec target = x_prev - eta * loss_prev;
  BodyPtr body = shell.to_body();
  QuadMinOptions opt;
  opt.value_tol = 0.5 * eps * eps;  // 1-strong convexity: distance <= eps
  opt.gap_target = 0.0;
  QuadMinResult r = quadmin_opt(*body, Mat::Identity(shell.flat_dim, shell.flat_dim),
                                -target, opt);
  return r.point;
}

// --- shell projection ---------------------------------------------------------

namespace {

struct RunOutcome {
  bool found = false;
  AffineMap transform;
  Vec fixed_point;
  double residual = 0.0;
};

}  // namespace

ShellProjResult shell_proj(const BoundedBody& body, const ShellSet& base,
                           const Vec& target_flat, double eps, double fp_tol) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::kInvalidArgument,
          "shell_proj: eps must lie in (0,1)");
  require(target_flat.size() == base.flat_dim, ErrorCode::kDimensionMismatch,
          "shell_proj");
  const Eigen::Index n = base.flat_dim;
  const double big_d = base.base_radius;
  const double delta = eps / (4.0 * big_d);
  // Algorithm precision: ShellEllipsoid volume floor V_n(eps') with
  // eps' = eps * r / (32 R D^2).
  const double eps_prime = std::max(
      eps * body.inner_radius / (32.0 * body.outer_radius * big_d * big_d),
      1e-15);
  const double log_floor = log_unit_ball_volume(n) + n * std::log(eps_prime);

  ShellProjResult out;
  out.shell = base;

  // One ShellEllipsoid run at level q. Bisection/hunt runs drop the
  // accumulated cuts from the region for speed (each failure is certified by
  // its own frontier); the final confirming run includes them so the
  // returned transform provably lies in the final shell.
  const auto run = [&](double q, bool with_cuts) -> RunOutcome {
    TransformRegion region;
    region.center = target_flat;
    region.radius = q;
    region.base_radius = out.shell.base_radius;
    if (with_cuts) {
      region.cuts.reserve(out.shell.cuts.size());
      for (const TransformHalfspace& c : out.shell.cuts) {
        region.cuts.push_back(c.halfspace);
      }
    }
    ShellOutcome so = shell_ellipsoid(body, region, log_floor, fp_tol);
    ++out.shell_ellipsoid_runs;
    RunOutcome r;
    if (so.transform.has_value()) {
      r.found = true;
      r.transform = std::move(*so.transform);
      r.fixed_point = std::move(so.fixed_point);
    } else {
      out.shell.absorb(so.frontier.halfspaces);
    }
    return r;
  };

  const auto satisfies_shell = [&](const AffineMap& phi) {
    Vec flat = phi.flatten();
    if (flat.norm() > out.shell.base_radius + 1e-9) return false;
    for (const TransformHalfspace& c : out.shell.cuts) {
      if (!c.halfspace.contains(flat, 1e-9)) return false;
    }
    return true;
  };

  const long run_cap = 600;
  bool have_hi = false;
  double q_lo = 0.0, q_hi = 0.0;
  RunOutcome cand;

  RunOutcome r0 = run(0.0, false);
  if (r0.found) {
    have_hi = true;
    q_hi = 0.0;
    cand = std::move(r0);
  }
  while (true) {
    require(out.shell_ellipsoid_runs < run_cap, ErrorCode::kIterationCapExceeded,
            "shell_proj: run cap exceeded");
    if (!have_hi) {
      // hunt upward (doubling)
      double q = std::max(q_lo > 0.0 ? 2.0 * q_lo : delta, delta);
      q = std::min(q, 2.0 * big_d + delta);
      require(q_lo <= 2.0 * big_d + delta, ErrorCode::kQExceededBound,
              "shell_proj: q exceeded 2D bound");
      RunOutcome r = run(q, false);
      if (r.found) {
        have_hi = true;
        q_hi = q;
        cand = std::move(r);
      } else {
        require(q < 2.0 * big_d + delta - 1e-12, ErrorCode::kQExceededBound,
                "shell_proj: q exceeded 2D bound");
        q_lo = q;
      }
      continue;
    }
    if (q_hi - q_lo > delta) {
      const double mid = 0.5 * (q_lo + q_hi);
      RunOutcome r = run(mid, false);
      if (r.found) {
        q_hi = mid;
        cand = std::move(r);
      } else {
        q_lo = mid;
      }
      continue;
    }
    // bracket tight: confirm the candidate against the final shell
    if (cand.found && satisfies_shell(cand.transform)) break;
    RunOutcome r = run(q_hi, true);
    if (r.found && satisfies_shell(r.transform)) {
      cand = std::move(r);
      break;
    }
    // the confirm run cut the candidate level away: resume hunting above q_hi
    q_lo = q_hi;
    have_hi = false;
  }

  out.transform = std::move(cand.transform);
  out.fixed_point = std::move(cand.fixed_point);
  out.fp_residual = (out.transform.apply(out.fixed_point) - out.fixed_point).norm();
  out.q_lo = q_lo;
  out.q_hi = q_hi;
  out.projection_slack = std::sqrt(std::max(q_hi * q_hi - q_lo * q_lo, 0.0));
  return out;
}

// --- learner -------------------------------------------------------------------

namespace {

// Orthonormal basis of the hyperplane {sum x = 0} in R^d.
Mat hull_basis_for_simplex(Eigen::Index d) {
  Mat a = Mat::Zero(d, d);
  a.col(0) = Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  for (Eigen::Index j = 1; j < d; ++j) a(j - 1, j) = 1.0;
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  return q.rightCols(d - 1);
}

bool isotropic_like(const BoundedBody& body) {
  return body.inner_center.norm() <= 1e-12 && body.inner_radius >= 1.0 - 1e-12 &&
         body.outer_radius <= static_cast<double>(body.dim) + 1.0 + 1e-9;
}

}  // namespace

LinSwapLearner::LinSwapLearner(BodyPtr body, long horizon, double fp_tol)
    : original_(std::move(body)), horizon_(horizon), fp_tol_(fp_tol) {
  require(original_ != nullptr, ErrorCode::kInvalidArgument, "learner: null");
  require(horizon_ >= 1, ErrorCode::kInvalidArgument, "learner: T >= 1");
  const Eigen::Index d = original_->dim;

  BodyPtr reduced;
  double reduced_outer;
  if (original_->flat) {
    require(std::holds_alternative<SimplexShape>(original_->shape),
            ErrorCode::kUnsupportedBody,
            "learner: flat bodies other than the simplex are unsupported");
    require(d >= 2, ErrorCode::kInvalidArgument, "learner: simplex dim >= 2");
    // Hull reduction: isometric coordinates on {sum x = 1}. The regular
    // (d-1)-simplex that results is full-dimensional, and linear-swap regret
    // is preserved exactly (losses transport through the basis).
    hull_basis_ = hull_basis_for_simplex(d);
    hull_offset_ = Vec::Constant(d, 1.0 / static_cast<double>(d));
    std::vector<Vec> verts;
    verts.reserve(static_cast<size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
      Vec e = Vec::Zero(d);
      e[i] = 1.0;
      verts.push_back(hull_basis_.transpose() * (e - hull_offset_));
    }
    const double r_rel = original_->inner_radius;
    reduced = make_vpolytope(std::move(verts), r_rel, Vec::Zero(d - 1));
    reduced_outer = reduced->outer_radius;
    // precondition: scale by 1/r (center already at the origin)
    std::vector<Vec> scaled;
    const auto& vs = std::get<VPolytopeShape>(reduced->shape).vertices;
    scaled.reserve(vs.size());
    for (const Vec& v : vs) scaled.push_back(v / r_rel);
    work_ = make_vpolytope(std::move(scaled), 1.0, Vec::Zero(d - 1));
    loss_transport_ =
        (r_rel / (2.0 * reduced_outer)) * hull_basis_.transpose();
    regret_scale_ = 2.0 * reduced_outer;
  } else {
    hull_basis_ = Mat::Identity(d, d);
    hull_offset_ = Vec::Zero(d);
    PreconditionResult pre = precondition(original_);
    work_ = pre.body;
    reduced_outer = original_->outer_radius;
    loss_transport_ = (original_->inner_radius / (2.0 * reduced_outer)) *
                      Mat::Identity(d, d);
    regret_scale_ = 2.0 * reduced_outer;
  }

  const Eigen::Index dw = work_->dim;
  EndoBounds eb = EndoBounds::of(*work_);
  shell_radius_ = isotropic_like(*work_)
                      ? 4.0 * static_cast<double>(dw) * static_cast<double>(dw)
                      : eb.outer_radius;
  // G bounds ||L_t||_F for the transported losses.
  double linf = 0.0;
  for (Eigen::Index i = 0; i < loss_transport_.rows(); ++i) {
    linf = std::max(linf, loss_transport_.row(i).cwiseAbs().sum());
  }
  loss_bound_ = std::sqrt(static_cast<double>(dw)) * (work_->outer_radius + 1.0) * linf;
  beta_ = shell_radius_ / (loss_bound_ * std::sqrt(static_cast<double>(horizon_)));
  eps_proj_ = 1.0 / (shell_radius_ * shell_radius_ *
                     static_cast<double>(horizon_) * static_cast<double>(horizon_));

  phi_ = AffineMap::identity(dw);
  work_play_ = work_->inner_center;
  play_ = to_original(work_play_);
}

Vec LinSwapLearner::to_original(const Vec& work_point) const {
  if (original_->flat) {
    const double r_rel = original_->inner_radius;
    return hull_offset_ + hull_basis_ * (r_rel * work_point);
  }
  // inverse of the precondition map psi(x) = (x - a)/r
  return original_->inner_center + original_->inner_radius * work_point;
}

Vec LinSwapLearner::work_loss(const Vec& loss) const {
  return loss_transport_ * loss;
}

double LinSwapLearner::loss_scale() const { return regret_scale_; }

void LinSwapLearner::observe(const Vec& loss) {
  require_dim(loss, original_->dim, "learner: loss");
  require(t_ < horizon_, ErrorCode::kInvalidArgument,
          "learner: horizon exhausted");
  Vec clipped = loss.cwiseMax(-1.0).cwiseMin(1.0);
  if ((clipped - loss).norm() > 0.0) clipped_ = true;

  Vec lw = loss_transport_ * clipped;
  Vec lmat = dual_loss_matrix(work_play_, lw);

  RegretRound round;
  round.play = play_;
  round.loss = clipped;
  round.realized = play_.dot(clipped);
  round.dual_loss = lmat.dot(phi_.flatten());
  round.loss_matrix_norm = lmat.norm();

  Vec target = phi_.flatten() - beta_ * lmat;
  ShellSet base = make_base_shell(*work_, shell_radius_);
  ShellProjResult sp = shell_proj(*work_, base, target, eps_proj_, fp_tol_);
  round.projection_slack = sp.projection_slack;
  history_.push_back(std::move(round));

  phi_ = sp.transform;
  Vec p = sp.fixed_point;
  double residual = sp.fp_residual;
  // p_t must be a fixed point to residual 1e-7; re-solve via the linear
  // system when it is well-conditioned.
  if (residual > 1e-7) {
    FixedPointResult fr = find_fixed_point(*work_, phi_, 1e-7);
    if (!fr.found) {
      throw Error(ErrorCode::kFixedPointMissing,
                  "learner: shell_proj returned a transform without a 1e-7 "
                  "fixed point");
    }
    p = fr.point;
    residual = fr.residual;
  }
  work_play_ = p;
  play_ = to_original(work_play_);
  ++t_;
}

// --- OGD baseline --------------------------------------------------------------

OgdLearner::OgdLearner(BodyPtr body, long horizon) : body_(std::move(body)) {
  require(body_ != nullptr && horizon >= 1, ErrorCode::kInvalidArgument, "ogd");
  const double diam = 2.0 * body_->outer_radius;
  const double g = std::sqrt(static_cast<double>(body_->dim));
  eta_ = diam / (g * std::sqrt(static_cast<double>(horizon)));
  play_ = body_->flat ? project(*body_, body_->inner_center) : body_->inner_center;
}

void OgdLearner::observe(const Vec& loss) {
  require_dim(loss, body_->dim, "ogd: loss");
  Vec clipped = loss.cwiseMax(-1.0).cwiseMin(1.0);
  play_ = project(*body_, play_ - eta_ * clipped);
}

// --- exact evaluation ----------------------------------------------------------

EndoOptResult optimize_linear_over_endo_simplex(Eigen::Index d, const Mat& gm,
                                                bool maximize) {
  // Column-wise best response over column-stochastic representatives. On the
  // hull the value of (M, b) equals that of (M + b 1^T, 0), and the offset
  // part of the objective folds into the matrix part whenever gm's column
  // sums equal gb (true for objectives built from simplex plays).
  const double sign = maximize ? 1.0 : -1.0;
  Mat obj = sign * gm;
  Mat best_m = Mat::Zero(d, d);
  double val = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (obj(i, j) > obj(arg, j)) arg = i;
    }
    best_m(arg, j) = 1.0;
    val += obj(arg, j);
  }
  return {AffineMap(best_m, Vec::Zero(d)), sign * val};
}

void simplex_hrep(Eigen::Index d, Mat& rows, Vec& offsets) {
  rows = Mat::Zero(d + 2, d);
  offsets = Vec::Zero(d + 2);
  for (Eigen::Index i = 0; i < d; ++i) {
    rows(i, i) = -1.0;
    offsets[i] = 0.0;
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  rows.row(d).setConstant(s);
  offsets[d] = s;
  rows.row(d + 1).setConstant(-s);
  offsets[d + 1] = -s;
}

EndoOptResult optimize_linear_over_endo_hrep(const BoundedBody& source,
                                             const Mat& rows, const Vec& offsets,
                                             const Mat& gm, const Vec& gb,
                                             bool maximize) {
  const Eigen::Index d = source.dim;
  require(gm.rows() == d && gm.cols() == d && gb.size() == d &&
              rows.cols() == d,
          ErrorCode::kDimensionMismatch, "optimize_linear_over_endo_hrep");
  const double sign = maximize ? 1.0 : -1.0;

  // Sliding-objective loop over transformation space with the H-rep
  // endomorphism membership oracle (tol-inflated so the feasible region is
  // full-dimensional even for flat polytopes like the simplex).
  const Eigen::Index n = d * (d + 1);
  EndoBounds eb = EndoBounds::of(source);
  const double big_r = eb.outer_radius + 1.0;
  const double infl = 1e-9;
  Vec cflat(n);
  cflat.head(d * d) = Eigen::Map<const Vec>(gm.data(), d * d);
  cflat.tail(d) = gb;
  const double cn = std::max(cflat.norm(), 1e-300);
  Vec chat = sign * cflat / cn;

  const double value_tol = 1e-7 / std::max(cn, 1.0);
  const double rho = std::max(
      value_tol * std::max(eb.inner_radius, 0.3 * infl) / (8.0 * big_r), 1e-15);
  Ellipsoid e = Ellipsoid::ball(Vec::Zero(n), big_r);
  const double floor = log_unit_ball_volume(n) + n * std::log(rho);
  const long cap = engine_cap(n, e.log_volume(), floor);

  bool have = false;
  Vec best_x;
  double best_v = -std::numeric_limits<double>::infinity();
  long iters = 0;
  while (e.log_volume() >= floor) {
    require(iters++ < cap, ErrorCode::kNumericalStall,
            "optimize_linear_over_endo_hrep: iteration cap");
    const Vec z = e.center();
    AffineMap phi = AffineMap::unflatten(z, d);
    auto hs = endo_membership_hrep(rows, offsets, source, phi, infl);
    if (!hs.has_value()) {
      const double v = chat.dot(z);
      if (!have || v > best_v) {
        have = true;
        best_v = v;
        best_x = z;
      }
      e.central_cut(Halfspace(-chat, -v));
    } else {
      e.central_cut(hs->halfspace);
    }
  }
  require(have, ErrorCode::kNumericalStall,
          "optimize_linear_over_endo_hrep: no feasible transform found");
  return {AffineMap::unflatten(best_x, d), sign * cn * best_v};
}

namespace {

RegretReport accumulate_history(const std::vector<Vec>& plays,
                                const std::vector<Vec>& losses, Eigen::Index d,
                                bool running_simplex_regret, Mat& gm, Vec& gb) {
  RegretReport rep;
  rep.per_round_realized.reserve(plays.size());
  gm = Mat::Zero(d, d);
  gb = Vec::Zero(d);
  double realized = 0.0;
  for (size_t t = 0; t < plays.size(); ++t) {
    require(plays[t].size() == d && losses[t].size() == d,
            ErrorCode::kDimensionMismatch, "exact_linswap_regret");
    gm += losses[t] * plays[t].transpose();
    gb += losses[t];
    realized += plays[t].dot(losses[t]);
    rep.per_round_realized.push_back(plays[t].dot(losses[t]));
    if (running_simplex_regret) {
      double best = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) best += gm.col(j).minCoeff();
      rep.per_round_regret.push_back(realized - best);
    }
  }
  rep.realized = realized;
  return rep;
}

}  // namespace

RegretReport exact_linswap_regret(const std::vector<Vec>& plays,
                                  const std::vector<Vec>& losses,
                                  const BoundedBody& body) {
  require(plays.size() == losses.size(), ErrorCode::kInvalidArgument,
          "exact_linswap_regret: history length mismatch");
  const bool is_simplex = std::holds_alternative<SimplexShape>(body.shape);
  const HPolytopeShape* hp = std::get_if<HPolytopeShape>(&body.shape);
  require(is_simplex || hp != nullptr, ErrorCode::kUnsupportedBody,
          "exact_linswap_regret: simplex or H-polytope required");
  Mat gm;
  Vec gb;
  RegretReport rep =
      accumulate_history(plays, losses, body.dim, is_simplex, gm, gb);
  if (plays.empty()) return rep;
  EndoOptResult opt =
      is_simplex
          ? optimize_linear_over_endo_simplex(body.dim, gm, false)
          : optimize_linear_over_endo_hrep(body, hp->normals, hp->offsets, gm,
                                           gb, false);
  rep.best_fixed_deviation_value = opt.value;
  rep.linswap_regret = rep.realized - opt.value;
  return rep;
}

RegretReport exact_linswap_regret_hrep(const std::vector<Vec>& plays,
                                       const std::vector<Vec>& losses,
                                       const BoundedBody& body, const Mat& rows,
                                       const Vec& offsets) {
  require(plays.size() == losses.size(), ErrorCode::kInvalidArgument,
          "exact_linswap_regret_hrep: history length mismatch");
  Mat gm;
  Vec gb;
  RegretReport rep = accumulate_history(plays, losses, body.dim, false, gm, gb);
  if (plays.empty()) return rep;
  EndoOptResult opt =
      optimize_linear_over_endo_hrep(body, rows, offsets, gm, gb, false);
  rep.best_fixed_deviation_value = opt.value;
  rep.linswap_regret = rep.realized - opt.value;
  return rep;
}

}  // namespace lswap
