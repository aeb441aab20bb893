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

#include "lswap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lswap/ellipsoid.hpp"

namespace lswap {

namespace {

constexpr double kUnitNormTol = 1e-12;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

Vec clamp_to_box(const BoxShape& box, const Vec& x) {
  return x.cwiseMax(box.lo).cwiseMin(box.hi);
}

}  // namespace

Halfspace::Halfspace(Vec n, double b) : normal(std::move(n)), offset(b) {
  const double nn = normal.norm();
  require(nn > 0.0, ErrorCode::kInvalidArgument, "Halfspace: zero normal");
  if (std::abs(nn - 1.0) > kUnitNormTol) {
    normal /= nn;
    offset /= nn;
  }
}

const char* BoundedBody::shape_name() const {
  struct Visitor {
    const char* operator()(const BallShape&) { return "ball"; }
    const char* operator()(const BoxShape&) { return "box"; }
    const char* operator()(const SimplexShape&) { return "simplex"; }
    const char* operator()(const HPolytopeShape&) { return "hpolytope"; }
    const char* operator()(const VPolytopeShape&) { return "vpolytope"; }
    const char* operator()(const CappedBallShape&) { return "capped_ball"; }
    const char* operator()(const AffineImageShape&) { return "affine_image"; }
    const char* operator()(const IntersectionShape&) { return "intersection"; }
  };
  return std::visit(Visitor{}, shape);
}

// --- constructors ------------------------------------------------------------

BodyPtr make_ball(Vec center, double radius) {
  require(radius > 0.0, ErrorCode::kInvalidArgument, "ball: radius <= 0");
  auto b = std::make_shared<BoundedBody>();
  b->dim = center.size();
  b->inner_radius = radius;
  b->inner_center = center;
  b->outer_radius = center.norm() + radius;
  b->shape = BallShape{std::move(center), radius};
  return b;
}

BodyPtr make_box(Vec lo, Vec hi) {
  require(lo.size() == hi.size(), ErrorCode::kDimensionMismatch, "box");
  require(((hi - lo).array() > 0.0).all(), ErrorCode::kInvalidArgument,
          "box: hi must exceed lo in every coordinate");
  auto b = std::make_shared<BoundedBody>();
  b->dim = lo.size();
  b->inner_center = 0.5 * (lo + hi);
  b->inner_radius = 0.5 * (hi - lo).minCoeff();
  b->outer_radius = std::max(lo.norm(), hi.norm());
  // corner-norm bound: the farthest corner picks per-coordinate extremes
  Vec far = lo.cwiseAbs().cwiseMax(hi.cwiseAbs());
  b->outer_radius = far.norm();
  b->shape = BoxShape{std::move(lo), std::move(hi)};
  return b;
}

BodyPtr make_simplex(Eigen::Index d) {
  require(d >= 1, ErrorCode::kInvalidArgument, "simplex: dim >= 1");
  auto b = std::make_shared<BoundedBody>();
  b->dim = d;
  b->inner_center = Vec::Constant(d, 1.0 / static_cast<double>(d));
  // inradius within the affine hull {sum x = 1}
  b->inner_radius =
      d > 1 ? 1.0 / std::sqrt(static_cast<double>(d) * (d - 1)) : 1.0;
  b->outer_radius = 1.0;
  b->flat = true;
  b->shape = SimplexShape{d};
  return b;
}

BodyPtr make_hpolytope(Mat normals, Vec offsets, double inner_radius,
                       Vec inner_center, double outer_radius) {
  require(normals.rows() == offsets.size(), ErrorCode::kDimensionMismatch,
          "hpolytope: rows/offsets mismatch");
  require(normals.rows() >= 1, ErrorCode::kInvalidArgument,
          "hpolytope: needs at least one row");
  require(inner_radius > 0.0 && outer_radius >= inner_radius,
          ErrorCode::kInvalidArgument, "hpolytope: bad bounding data");
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    const double nn = normals.row(i).norm();
    require(nn > 0.0, ErrorCode::kInvalidArgument, "hpolytope: zero row");
    normals.row(i) /= nn;
    offsets[i] /= nn;
    require(normals.row(i).dot(inner_center) <= offsets[i] - inner_radius + 1e-9,
            ErrorCode::kInvalidArgument,
            "hpolytope: certified inner ball violates row " + std::to_string(i));
  }
  auto b = std::make_shared<BoundedBody>();
  b->dim = normals.cols();
  b->inner_radius = inner_radius;
  b->inner_center = std::move(inner_center);
  b->outer_radius = outer_radius;
  b->shape = HPolytopeShape{std::move(normals), std::move(offsets)};
  return b;
}

BodyPtr make_vpolytope(std::vector<Vec> vertices, double inner_radius,
                       Vec inner_center) {
  require(!vertices.empty(), ErrorCode::kInvalidArgument, "vpolytope: empty");
  const Eigen::Index d = vertices.front().size();
  double outer = 0.0;
  for (const Vec& v : vertices) {
    require(v.size() == d, ErrorCode::kDimensionMismatch, "vpolytope");
    outer = std::max(outer, v.norm());
  }
  require(inner_radius > 0.0, ErrorCode::kInvalidArgument,
          "vpolytope: bad bounding data");
  auto b = std::make_shared<BoundedBody>();
  b->dim = d;
  b->inner_radius = inner_radius;
  b->inner_center = std::move(inner_center);
  b->outer_radius = outer;
  b->shape = VPolytopeShape{std::move(vertices)};
  return b;
}

BodyPtr make_capped_ball(double radius, Vec direction, double cap) {
  require(radius > 0.0, ErrorCode::kInvalidArgument, "capped_ball: radius");
  const double dn = direction.norm();
  require(dn > 0.0, ErrorCode::kInvalidArgument, "capped_ball: direction");
  direction /= dn;
  require(cap > 0.0 && cap < radius, ErrorCode::kInvalidArgument,
          "capped_ball: cap must lie in (0, radius)");
  auto b = std::make_shared<BoundedBody>();
  b->dim = direction.size();
  // B(((cap-radius)/2) u, (radius+cap)/2) fits inside both the sphere and
  // the cap constraint.
  b->inner_center = 0.5 * (cap - radius) * direction;
  b->inner_radius = 0.5 * (radius + cap);
  b->outer_radius = radius;
  b->shape = CappedBallShape{radius, std::move(direction), cap};
  return b;
}

BodyPtr make_affine_image(BodyPtr base, const AffineMap& map) {
  require(base != nullptr, ErrorCode::kInvalidArgument, "affine_image: null");
  require(map.dim() == base->dim, ErrorCode::kDimensionMismatch,
          "affine_image");
  AffineMap inverse = map.inverse();  // throws if singular
  Eigen::JacobiSVD<Mat> svd(map.matrix());
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  const bool similarity =
      (map.matrix().transpose() * map.matrix() - smax * smax * Mat::Identity(map.dim(), map.dim()))
          .norm() < 1e-10 * std::max(1.0, smax * smax);
  auto b = std::make_shared<BoundedBody>();
  b->dim = base->dim;
  b->inner_center = map.apply(base->inner_center);
  b->inner_radius = base->inner_radius * smin;
  b->outer_radius = smax * base->outer_radius + map.offset().norm();
  b->flat = base->flat;
  b->shape = AffineImageShape{std::move(base), map,      std::move(inverse),
                              similarity,      smax, smin};
  return b;
}

BodyPtr make_intersection(BodyPtr base, std::vector<Halfspace> cuts,
                          double inner_radius, Vec inner_center) {
  require(base != nullptr, ErrorCode::kInvalidArgument, "intersection: null");
  for (const Halfspace& h : cuts) {
    require(h.normal.size() == base->dim, ErrorCode::kDimensionMismatch,
            "intersection: cut dimension");
  }
  require(inner_radius > 0.0, ErrorCode::kInvalidArgument,
          "intersection: bad bounding data");
  auto b = std::make_shared<BoundedBody>();
  b->dim = base->dim;
  b->inner_radius = inner_radius;
  b->inner_center = std::move(inner_center);
  b->outer_radius = base->outer_radius;
  b->flat = base->flat;
  b->shape = IntersectionShape{std::move(base), std::move(cuts)};
  return b;
}

// --- simplex projections -----------------------------------------------------

Vec project_simplex(const Vec& y) {
  const Eigen::Index d = y.size();
  if (d == 1) return Vec::Constant(1, 1.0);
  // Bisection on the KKT threshold tau with sum(max(y - tau, 0)) = 1.
  double lo = y.minCoeff() - 1.0 / static_cast<double>(d);
  double hi = y.maxCoeff();
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = (y.array() - mid).cwiseMax(0.0).sum();
    (s > 1.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  return (y.array() - tau).cwiseMax(0.0);
}

Vec project_corner_simplex(const Vec& y) {
  Vec clamped = y.cwiseMax(0.0);
  if (clamped.sum() <= 1.0) return clamped;
  return project_simplex(y);
}

WeightFitResult fit_convex_combination(const std::vector<Vec>& vertices,
                                       const Vec& x, double tol) {
  const Eigen::Index k = static_cast<Eigen::Index>(vertices.size());
  const Eigen::Index d = x.size();
  Mat V(d, k);
  for (Eigen::Index j = 0; j < k; ++j) V.col(j) = vertices[j];
  if (k == 1) {
    WeightFitResult r;
    r.weights = Vec::Constant(1, 1.0);
    r.point = V.col(0);
    r.distance = (r.point - x).norm();
    return r;
  }
  const double lip = std::max(V.squaredNorm(), 1e-30);
  Vec w = Vec::Constant(k, 1.0 / static_cast<double>(k));
  Vec z = w;
  double t_momentum = 1.0;
  double f_prev = std::numeric_limits<double>::infinity();
  const int max_iter = 20000;
  for (int it = 0; it < max_iter; ++it) {
    Vec resid = V * z - x;
    Vec grad = V.transpose() * resid;
    Vec w_next = project_simplex(z - grad / lip);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    z = w_next + ((t_momentum - 1.0) / t_next) * (w_next - w);
    const double f = 0.5 * (V * w_next - x).squaredNorm();
    if (f > f_prev) {  // adaptive restart
      z = w_next;
      t_momentum = 1.0;
    } else {
      t_momentum = t_next;
    }
    w = w_next;
    f_prev = std::min(f_prev, f);
    if ((it & 31) == 31) {
      Vec g = V.transpose() * (V * w - x);
      const double gap = g.dot(w) - g.minCoeff();
      if (gap <= tol * std::max(1.0, f_prev)) break;
    }
  }
  WeightFitResult r;
  r.weights = w;
  r.point = V * w;
  r.distance = (r.point - x).norm();
  return r;
}

// --- membership ---------------------------------------------------------------

namespace {

double capped_ball_distance(const CappedBallShape& s, const Vec& x);

struct MembershipVisitor {
  const BoundedBody& body;
  const Vec& x;
  double tol;

  bool operator()(const BallShape& s) const {
    return (x - s.center).norm() <= s.radius + tol;
  }
  bool operator()(const BoxShape& s) const {
    return (x - clamp_to_box(s, x)).norm() <= tol;
  }
  bool operator()(const SimplexShape&) const {
    return (x - project_simplex(x)).norm() <= tol;
  }
  bool operator()(const HPolytopeShape& s) const {
    return ((s.normals * x - s.offsets).array() <= tol).all();
  }
  bool operator()(const VPolytopeShape& s) const {
    return fit_convex_combination(s.vertices, x).distance <= tol;
  }
  bool operator()(const CappedBallShape& s) const {
    return capped_ball_distance(s, x) <= tol;
  }
  bool operator()(const AffineImageShape& s) const {
    return membership(*s.base, s.inverse.apply(x),
                      tol / std::max(s.sigma_max, 1e-300));
  }
  bool operator()(const IntersectionShape& s) const {
    for (const Halfspace& h : s.cuts) {
      if (!h.contains(x, tol)) return false;
    }
    return membership(*s.base, x, tol);
  }
};

Vec capped_ball_project(const CappedBallShape& s, const Vec& x) {
  const double along = x.dot(s.direction);
  if (along <= s.cap) {
    const double nx = x.norm();
    if (nx <= s.radius) return x;
    return x * (s.radius / nx);  // shrinking keeps <x,u> below the cap
  }
  // Drop onto the cap plane, then clamp to the rim disk if needed.
  Vec planar = x - (along - s.cap) * s.direction;
  Vec in_plane = planar - s.cap * s.direction;
  const double disk = std::sqrt(std::max(0.0, s.radius * s.radius - s.cap * s.cap));
  if (in_plane.norm() <= disk) {
    if (planar.norm() <= s.radius) return planar;
  }
  // Check the spherical part on the feasible side as an alternative.
  Vec best;
  double best_d = std::numeric_limits<double>::infinity();
  if (in_plane.norm() > 0.0) {
    Vec rim = s.cap * s.direction + (disk / in_plane.norm()) * in_plane;
    best = rim;
    best_d = (x - rim).norm();
  } else {
    // x is on the axis beyond the cap; any rim point is equidistant. Pick a
    // deterministic perpendicular.
    Vec perp = Vec::Zero(x.size());
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      if (std::abs(s.direction[i]) < std::abs(s.direction[j])) j = i;
    }
    perp[j] = 1.0;
    perp -= perp.dot(s.direction) * s.direction;
    if (perp.norm() < 1e-14) {
      // 1-D capped ball: the cap point itself
      best = s.cap * s.direction;
      best_d = (x - best).norm();
    } else {
      perp.normalize();
      best = s.cap * s.direction + disk * perp;
      best_d = (x - best).norm();
    }
  }
  const double nx = x.norm();
  if (nx > s.radius) {
    Vec sphere = x * (s.radius / nx);
    if (sphere.dot(s.direction) <= s.cap && (x - sphere).norm() < best_d) {
      best = sphere;
      best_d = (x - sphere).norm();
    }
  }
  return best;
}

double capped_ball_distance(const CappedBallShape& s, const Vec& x) {
  return (x - capped_ball_project(s, x)).norm();
}

}  // namespace

bool membership(const BoundedBody& body, const Vec& x, double tol) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "membership: tol <= 0");
  require_dim(x, body.dim, "membership");
  return std::visit(MembershipVisitor{body, x, tol}, body.shape);
}

// --- separation ---------------------------------------------------------------

namespace {

// Builds the supporting halfspace at the projection point.
SeparationResult from_projection(const Vec& x, const Vec& proj, double tol) {
  const double dist = (x - proj).norm();
  require(dist > tol, ErrorCode::kDegenerateProjection,
          "separate: point is within tol of its projection yet membership "
          "failed; widen tol");
  SeparationResult r;
  r.inside = false;
  Vec n = (x - proj) / dist;
  r.halfspace = Halfspace(n, n.dot(proj));
  return r;
}

struct SeparateVisitor {
  const BoundedBody& body;
  const Vec& x;
  double tol;

  SeparationResult operator()(const BallShape& s) const {
    return from_projection(x, s.center + (x - s.center) * (s.radius / (x - s.center).norm()), tol);
  }
  SeparationResult operator()(const BoxShape& s) const {
    return from_projection(x, clamp_to_box(s, x), tol);
  }
  SeparationResult operator()(const SimplexShape&) const {
    return from_projection(x, project_simplex(x), tol);
  }
  SeparationResult operator()(const HPolytopeShape& s) const {
    // Most violated row; lowest index wins ties.
    Eigen::Index best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    Vec viol = s.normals * x - s.offsets;
    for (Eigen::Index i = 0; i < viol.size(); ++i) {
      if (viol[i] > best_v + 1e-15) {
        best_v = viol[i];
        best = i;
      }
    }
    SeparationResult r;
    r.inside = false;
    r.halfspace = Halfspace(s.normals.row(best).transpose(), s.offsets[best]);
    return r;
  }
  SeparationResult operator()(const VPolytopeShape& s) const {
    return from_projection(x, fit_convex_combination(s.vertices, x).point, tol);
  }
  SeparationResult operator()(const CappedBallShape& s) const {
    return from_projection(x, capped_ball_project(s, x), tol);
  }
  SeparationResult operator()(const AffineImageShape& s) const {
    SeparationResult inner = separate(*s.base, s.inverse.apply(x), tol * 1e-3);
    if (inner.inside) {
      // borderline; fall back to a projection-based cut on the image
      return from_projection(x, project(body, x, tol), tol);
    }
    // Pull the base halfspace <c, z> <= beta through z = inverse(y):
    // <c, Ainv y + t_inv> <= beta  =>  <Ainv^T c, y> <= beta - <c, t_inv>.
    Vec n = s.inverse.matrix().transpose() * inner.halfspace.normal;
    const double off =
        inner.halfspace.offset - inner.halfspace.normal.dot(s.inverse.offset());
    SeparationResult r;
    r.inside = false;
    r.halfspace = Halfspace(std::move(n), off);
    if (r.halfspace.violation(x) <= tol) {
      return from_projection(x, project(body, x, tol), tol);
    }
    return r;
  }
  SeparationResult operator()(const IntersectionShape& s) const {
    Eigen::Index best = -1;
    double best_v = tol;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(s.cuts.size()); ++i) {
      const double v = s.cuts[i].violation(x);
      if (v > best_v + 1e-15) {
        best_v = v;
        best = i;
      }
    }
    if (best >= 0) {
      SeparationResult r;
      r.inside = false;
      r.halfspace = s.cuts[static_cast<size_t>(best)];
      return r;
    }
    return separate(*s.base, x, tol);
  }
};

}  // namespace

SeparationResult separate(const BoundedBody& body, const Vec& x, double tol) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "separate: tol <= 0");
  require_dim(x, body.dim, "separate");
  if (membership(body, x, tol)) {
    SeparationResult r;
    r.inside = true;
    return r;
  }
  return std::visit(SeparateVisitor{body, x, tol}, body.shape);
}

// --- linear optimization --------------------------------------------------------

namespace {

struct LinOptVisitor {
  const BoundedBody& body;
  const Vec& c;
  double tol;

  LinOptResult operator()(const BallShape& s) const {
    Vec x = s.center + c * (s.radius / c.norm());
    return {x, c.dot(x)};
  }
  LinOptResult operator()(const BoxShape& s) const {
    Vec x(s.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] = c[i] > 0.0 ? s.hi[i] : s.lo[i];  // ties go to lo
    }
    return {x, c.dot(x)};
  }
  LinOptResult operator()(const SimplexShape& s) const {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < s.dim; ++i) {
      if (c[i] > c[best] + 0.0) best = i;  // lowest index wins exact ties
    }
    Vec x = Vec::Zero(s.dim);
    x[best] = 1.0;
    return {x, c[best]};
  }
  LinOptResult operator()(const VPolytopeShape& s) const {
    size_t best = 0;
    double best_v = c.dot(s.vertices[0]);
    for (size_t i = 1; i < s.vertices.size(); ++i) {
      const double v = c.dot(s.vertices[i]);
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    return {s.vertices[best], best_v};
  }
  LinOptResult operator()(const CappedBallShape&) const {
    return linopt_cutting_plane(body, c, tol);
  }
  LinOptResult operator()(const HPolytopeShape&) const {
    return linopt_cutting_plane(body, c, tol);
  }
  LinOptResult operator()(const AffineImageShape&) const {
    return linopt_cutting_plane(body, c, tol);
  }
  LinOptResult operator()(const IntersectionShape&) const {
    return linopt_cutting_plane(body, c, tol);
  }
};

}  // namespace

LinOptResult linopt(const BoundedBody& body, const Vec& c, double tol) {
  require_dim(c, body.dim, "linopt");
  require(c.norm() > 0.0, ErrorCode::kInvalidArgument, "linopt: zero objective");
  return std::visit(LinOptVisitor{body, c, tol}, body.shape);
}

// --- quadratic minimization -------------------------------------------------

namespace {

// Support function of the capped ball (closed form), used internally by the
// accelerated solver below; the public linopt for this shape goes through the
// cutting-plane path.
Vec capped_ball_support(const CappedBallShape& s, const Vec& c) {
  Vec top = c * (s.radius / c.norm());
  if (top.dot(s.direction) <= s.cap) return top;
  const double along = c.dot(s.direction);
  Vec perp = c - along * s.direction;
  const double disk = std::sqrt(std::max(0.0, s.radius * s.radius - s.cap * s.cap));
  if (perp.norm() < 1e-14) {
    Vec alt = Vec::Zero(c.size());
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < c.size(); ++i) {
      if (std::abs(s.direction[i]) < std::abs(s.direction[j])) j = i;
    }
    alt[j] = 1.0;
    alt -= alt.dot(s.direction) * s.direction;
    if (alt.norm() < 1e-14) return s.cap * s.direction;  // 1-D cap point
    perp = alt;
  }
  return s.cap * s.direction + (disk / perp.norm()) * perp;
}

// Accelerated projected gradient for f(x) = 0.5||Mx + b||^2 with an exact
// projector, used for the shapes where Euclidean projection is closed form.
// `support` maximizes a linear functional over the body (for the gap check).
QuadMinResult fista_quadmin(const Mat& M, const Vec& b,
                            const QuadMinOptions& opt, const Vec& start,
                            const std::function<Vec(const Vec&)>& proj,
                            const std::function<Vec(const Vec&)>& support) {
  const auto f = [&](const Vec& x) { return 0.5 * (M * x + b).squaredNorm(); };
  Eigen::JacobiSVD<Mat> svd(M);
  const double smax = svd.singularValues().maxCoeff();
  const double lip = std::max(smax * smax, 1e-30);
  double gap_target = opt.gap_target;
  if (gap_target < 0.0) gap_target = 10.0 * opt.value_tol;

  Vec x = proj(start);
  Vec z = x;
  double tm = 1.0;
  double f_best = f(x);
  Vec x_best = x;
  double gap = std::numeric_limits<double>::infinity();
  const int max_iter = 60000;
  for (int it = 0; it < max_iter; ++it) {
    Vec grad = M.transpose() * (M * z + b);
    Vec x_next = proj(z - grad / lip);
    const double fx = f(x_next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tm * tm));
    if (fx > f_best) {
      z = x_next;
      tm = 1.0;
    } else {
      z = x_next + ((tm - 1.0) / t_next) * (x_next - x);
      tm = t_next;
    }
    x = x_next;
    if (fx < f_best) {
      f_best = fx;
      x_best = x_next;
    }
    if ((it & 15) != 15 && it != max_iter - 1) continue;
    Vec g = M.transpose() * (M * x_best + b);
    if (g.norm() < 1e-300) {
      gap = 0.0;
      break;
    }
    Vec s = support(-g);
    gap = g.dot(x_best) - g.dot(s);
    if (opt.residual_mode) {
      if (f_best <= opt.residual_floor) break;
      if (gap <= std::max(gap_target, f_best / 4.0)) break;
    }
    if (gap_target > 0.0 && gap <= gap_target) break;
    if (gap_target == 0.0 && gap <= std::max(1e-14, opt.value_tol)) break;
  }
  QuadMinResult r;
  r.point = x_best;
  r.value = f_best;
  r.stationarity = std::max(gap, 0.0);
  return r;
}

}  // namespace

QuadMinResult quadmin_opt(const BoundedBody& body, const Mat& M, const Vec& b,
                          const QuadMinOptions& opt) {
  require(M.cols() == body.dim && M.rows() == b.size(),
          ErrorCode::kDimensionMismatch, "quadmin");
  if (M.norm() < 1e-300) {
    // Constant objective: any feasible point attains the minimum.
    QuadMinResult r;
    r.point = body.flat ? project(body, body.inner_center, opt.value_tol)
                        : body.inner_center;
    r.value = 0.5 * b.squaredNorm();
    r.stationarity = 0.0;
    return r;
  }

  struct Visitor {
    const BoundedBody& body;
    const Mat& M;
    const Vec& b;
    const QuadMinOptions& opt;

    QuadMinResult operator()(const BallShape& s) const {
      return fista_quadmin(
          M, b, opt, body.inner_center,
          [&](const Vec& y) {
            Vec d = y - s.center;
            const double n = d.norm();
            return n <= s.radius ? y : Vec(s.center + d * (s.radius / n));
          },
          [&](const Vec& c) -> Vec { return s.center + c * (s.radius / c.norm()); });
    }
    QuadMinResult operator()(const BoxShape& s) const {
      return fista_quadmin(
          M, b, opt, body.inner_center,
          [&](const Vec& y) { return clamp_to_box(s, y); },
          [&](const Vec& c) -> Vec {
            Vec x(s.lo.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              x[i] = c[i] > 0.0 ? s.hi[i] : s.lo[i];
            }
            return x;
          });
    }
    QuadMinResult operator()(const SimplexShape& s) const {
      return fista_quadmin(
          M, b, opt, body.inner_center,
          [&](const Vec& y) { return project_simplex(y); },
          [&](const Vec& c) -> Vec {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < s.dim; ++i) {
              if (c[i] > c[best]) best = i;
            }
            Vec x = Vec::Zero(s.dim);
            x[best] = 1.0;
            return x;
          });
    }
    QuadMinResult operator()(const CappedBallShape& s) const {
      return fista_quadmin(
          M, b, opt, body.inner_center,
          [&](const Vec& y) { return capped_ball_project(s, y); },
          [&](const Vec& c) -> Vec { return capped_ball_support(s, c); });
    }
    QuadMinResult operator()(const VPolytopeShape& s) const {
      // Substitute x = V w over barycentric weights.
      const Eigen::Index k = static_cast<Eigen::Index>(s.vertices.size());
      Mat V(body.dim, k);
      for (Eigen::Index j = 0; j < k; ++j) V.col(j) = s.vertices[j];
      Mat MV = M * V;
      const auto fw = [&](const Vec& w) { return 0.5 * (MV * w + b).squaredNorm(); };
      const double lip = std::max(MV.squaredNorm(), 1e-30);
      Vec w = Vec::Constant(k, 1.0 / static_cast<double>(k));
      Vec z = w;
      double tm = 1.0;
      double f_best = fw(w);
      Vec w_best = w;
      double gap = std::numeric_limits<double>::infinity();
      const int max_iter = 60000;
      double gap_target = opt.gap_target < 0.0 ? 10.0 * opt.value_tol : opt.gap_target;
      for (int it = 0; it < max_iter; ++it) {
        Vec grad = MV.transpose() * (MV * z + b);
        Vec w_next = project_simplex(z - grad / lip);
        const double fx = fw(w_next);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tm * tm));
        if (fx > f_best) {
          z = w_next;
          tm = 1.0;
        } else {
          z = w_next + ((tm - 1.0) / t_next) * (w_next - w);
          tm = t_next;
        }
        w = w_next;
        if (fx < f_best) {
          f_best = fx;
          w_best = w_next;
        }
        if ((it & 15) != 15 && it != max_iter - 1) continue;
        // Frank-Wolfe gap in x-space via the vertex scan.
        Vec gx = M.transpose() * (MV * w_best + b);
        Vec sc = V.transpose() * gx;
        gap = sc.dot(w_best) - sc.minCoeff();
        if (opt.residual_mode) {
          if (f_best <= opt.residual_floor) break;
          if (gap <= std::max(gap_target, f_best / 4.0)) break;
        }
        if (gap_target > 0.0 && gap <= gap_target) break;
        if (gap_target == 0.0 && gap <= std::max(1e-14, opt.value_tol)) break;
      }
      QuadMinResult r;
      r.point = V * w_best;
      r.value = f_best;
      r.stationarity = std::max(gap, 0.0);
      return r;
    }
    QuadMinResult operator()(const AffineImageShape& s) const {
      // x = A z + t: minimize 0.5||(MA) z + (Mt + b)||^2 over the base.
      QuadMinOptions inner = opt;
      QuadMinResult rb = quadmin_opt(*s.base, M * s.map.matrix(),
                                     M * s.map.offset() + b, inner);
      rb.point = s.map.apply(rb.point);
      return rb;
    }
    QuadMinResult operator()(const HPolytopeShape&) const {
      return quadmin_cutting_plane(body, M, b, opt);
    }
    QuadMinResult operator()(const IntersectionShape&) const {
      return quadmin_cutting_plane(body, M, b, opt);
    }
  };
  return std::visit(Visitor{body, M, b, opt}, body.shape);
}

QuadMinResult quadmin(const BoundedBody& body, const Mat& M, const Vec& b,
                      double tol) {
  QuadMinOptions opt;
  opt.value_tol = tol;
  return quadmin_opt(body, M, b, opt);
}

QuadMinResult frank_wolfe_polish(const BoundedBody& body, const Mat& M,
                                 const Vec& b, QuadMinResult start,
                                 double gap_target, int max_steps) {
  QuadMinResult cur = std::move(start);
  for (int step = 0; step < max_steps; ++step) {
    Vec g = M.transpose() * (M * cur.point + b);
    if (g.norm() < 1e-300) {
      cur.stationarity = 0.0;
      return cur;
    }
    Vec s = linopt(body, -g).point;
    Vec dir = s - cur.point;
    const double gap = -g.dot(dir);
    cur.stationarity = std::max(gap, 0.0);
    if (gap <= std::max(gap_target, cur.value / 4.0)) return cur;
    Vec adir = M * dir;
    const double denom = adir.squaredNorm();
    if (denom < 1e-300) return cur;
    const double gamma = clamp01(gap / denom);
    cur.point += gamma * dir;
    cur.value = 0.5 * (M * cur.point + b).squaredNorm();
  }
  return cur;
}

// --- projection ----------------------------------------------------------------

Vec project(const BoundedBody& body, const Vec& y, double tol) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "project: tol <= 0");
  require_dim(y, body.dim, "project");
  struct Visitor {
    const BoundedBody& body;
    const Vec& y;
    double tol;

    Vec operator()(const BallShape& s) const {
      Vec d = y - s.center;
      const double n = d.norm();
      return n <= s.radius ? y : Vec(s.center + d * (s.radius / n));
    }
    Vec operator()(const BoxShape& s) const { return clamp_to_box(s, y); }
    Vec operator()(const SimplexShape&) const { return project_simplex(y); }
    Vec operator()(const CappedBallShape& s) const {
      return capped_ball_project(s, y);
    }
    Vec operator()(const VPolytopeShape& s) const {
      return fit_convex_combination(s.vertices, y).point;
    }
    Vec operator()(const AffineImageShape& s) const {
      if (s.similarity) {
        return s.map.apply(project(*s.base, s.inverse.apply(y), tol));
      }
      return generic();
    }
    Vec operator()(const HPolytopeShape&) const { return generic(); }
    Vec operator()(const IntersectionShape&) const { return generic(); }

    Vec generic() const {
      // f = 0.5||x - y||^2 is 1-strongly convex, so value accuracy tol^2/2
      // yields distance accuracy tol.
      QuadMinOptions opt;
      opt.value_tol = 0.5 * tol * tol;
      opt.gap_target = 0.0;
      QuadMinResult r = quadmin_opt(body, Mat::Identity(body.dim, body.dim),
                                    -y, opt);
      return r.point;
    }
  };
  return std::visit(Visitor{body, y, tol}, body.shape);
}

// --- preconditioning --------------------------------------------------------

PreconditionResult precondition(const BodyPtr& body) {
  require(body != nullptr, ErrorCode::kInvalidArgument, "precondition: null");
  const Eigen::Index d = body->dim;
  const double r = body->inner_radius;
  const Vec& a = body->inner_center;
  PreconditionResult out;
  if (a.norm() <= 1e-14 && std::abs(r - 1.0) <= 1e-14) {
    out.preconditioner = {AffineMap::identity(d), AffineMap::identity(d),
                          2.0 * body->outer_radius};
    out.body = body;
    return out;
  }
  AffineMap psi(Mat::Identity(d, d) / r, -a / r);
  AffineMap psi_inv = psi.inverse();
  out.preconditioner = {psi, psi_inv, 2.0 * body->outer_radius};

  struct Visitor {
    const BodyPtr& base;
    const AffineMap& psi;
    double r;
    const Vec& a;

    BodyPtr operator()(const BallShape& s) const {
      return make_ball((s.center - a) / r, s.radius / r);
    }
    BodyPtr operator()(const BoxShape& s) const {
      return make_box((s.lo - a) / r, (s.hi - a) / r);
    }
    BodyPtr operator()(const VPolytopeShape& s) const {
      std::vector<Vec> verts;
      verts.reserve(s.vertices.size());
      for (const Vec& v : s.vertices) verts.push_back((v - a) / r);
      return make_vpolytope(std::move(verts), base->inner_radius / r,
                            Vec::Zero(a.size()));
    }
    BodyPtr operator()(const HPolytopeShape& s) const {
      Vec offsets = (s.offsets - s.normals * a) / r;
      return make_hpolytope(s.normals, std::move(offsets),
                            base->inner_radius / r, Vec::Zero(a.size()),
                            (base->outer_radius + a.norm()) / r);
    }
    template <typename Other>
    BodyPtr operator()(const Other&) const {
      return make_affine_image(base, psi);
    }
  };
  out.body = std::visit(Visitor{body, psi, r, a}, body->shape);
  return out;
}

}  // namespace lswap
