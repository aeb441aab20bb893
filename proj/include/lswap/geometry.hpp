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

#ifndef LSWAP_GEOMETRY_HPP
#define LSWAP_GEOMETRY_HPP

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "lswap/affine_map.hpp"
#include "lswap/common.hpp"

namespace lswap {

// A closed halfspace {x : <normal, x> <= offset}. Normals are kept at unit
// Euclidean norm.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Vec n, double b);

  double violation(const Vec& x) const { return normal.dot(x) - offset; }
  bool contains(const Vec& x, double tol = 0.0) const {
    return violation(x) <= tol;
  }
};

struct BoundedBody;
using BodyPtr = std::shared_ptr<const BoundedBody>;

// --- shape descriptions ----------------------------------------------------

struct BallShape {
  Vec center;
  double radius;
};

struct BoxShape {
  Vec lo;
  Vec hi;
};

// The standard probability simplex {x >= 0, sum x = 1} in R^d. It is flat
// (its affine hull is the hyperplane sum x = 1); the stored inner ball is
// relative to that hull.
struct SimplexShape {
  Eigen::Index dim;
};

struct HPolytopeShape {
  Mat normals;  // one row per constraint, unit Euclidean norm
  Vec offsets;
};

struct VPolytopeShape {
  std::vector<Vec> vertices;
};

// Unit-direction cap: ball(0, radius) intersected with {<x, direction> <= cap}.
struct CappedBallShape {
  double radius;
  Vec direction;
  double cap;
};

// The image phi(base) of a base body under an invertible affine map.
struct AffineImageShape {
  BodyPtr base;
  AffineMap map;
  AffineMap inverse;   // cached
  bool similarity;     // map is (uniform scale)*(orthogonal) + translation
  double sigma_max;    // extreme singular values of the matrix part
  double sigma_min;
};

struct IntersectionShape {
  BodyPtr base;
  std::vector<Halfspace> cuts;
};

using BodyShape = std::variant<BallShape, BoxShape, SimplexShape,
                               HPolytopeShape, VPolytopeShape, CappedBallShape,
                               AffineImageShape, IntersectionShape>;

// --- the convex body -------------------------------------------------------

// A convex body described by oracles plus certified bounding balls:
// ball(inner_center, inner_radius) <= body <= ball(0, outer_radius).
// For the (flat) probability simplex the inner ball lives in the affine hull
// and `flat` is set. Immutable after construction; all operations are pure.
struct BoundedBody {
  Eigen::Index dim;
  double inner_radius;
  Vec inner_center;
  double outer_radius;
  bool flat = false;
  BodyShape shape;

  const char* shape_name() const;
};

BodyPtr make_ball(Vec center, double radius);
BodyPtr make_box(Vec lo, Vec hi);
BodyPtr make_simplex(Eigen::Index d);
// Bounding data for H- and V-polytopes must be supplied by the caller; it is
// validated but not recomputed.
BodyPtr make_hpolytope(Mat normals, Vec offsets, double inner_radius,
                       Vec inner_center, double outer_radius);
BodyPtr make_vpolytope(std::vector<Vec> vertices, double inner_radius,
                       Vec inner_center);
BodyPtr make_capped_ball(double radius, Vec direction, double cap);
BodyPtr make_affine_image(BodyPtr base, const AffineMap& map);
BodyPtr make_intersection(BodyPtr base, std::vector<Halfspace> cuts,
                          double inner_radius, Vec inner_center);

// --- oracle operations ------------------------------------------------------

// True iff x is within distance tol of the body.
bool membership(const BoundedBody& body, const Vec& x, double tol = kDefaultTol);

struct SeparationResult {
  bool inside = false;
  Halfspace halfspace;  // valid only when !inside
};

// Inside iff membership holds at the same tol; otherwise a halfspace that
// contains the body and excludes x. Throws DegenerateProjection when x is
// within tol of its projection yet membership failed.
SeparationResult separate(const BoundedBody& body, const Vec& x,
                          double tol = kDefaultTol);

struct LinOptResult {
  Vec point;
  double value = 0.0;
};

// Maximizes <c, x> over the body. Closed-form for Ball/Box/Simplex/VPolytope
// (vertex scan, lowest index wins ties); cutting-plane over the separation
// oracle for the rest.
LinOptResult linopt(const BoundedBody& body, const Vec& c,
                    double tol = kDefaultTol);

// Euclidean projection of y onto the body, within tol.
Vec project(const BoundedBody& body, const Vec& y, double tol = kDefaultTol);

struct QuadMinResult {
  Vec point;
  double value = 0.0;          // f(point) = 0.5*||M point + b||^2
  double stationarity = 0.0;   // Frank-Wolfe gap at point (>= 0)
};

struct QuadMinOptions {
  double value_tol = kDefaultTol;
  // Raw Frank-Wolfe gap target; 0 disables the gap criterion, negative
  // derives it from value_tol.
  double gap_target = -1.0;
  // Fixed-point search mode: allows an early exit once the gap is small
  // relative to the attained value (enough for a sound separating direction).
  bool residual_mode = false;
  double residual_floor = 0.0;  // with residual_mode: value at which to stop
};

// Minimizes f(x) = 0.5*||M x + b||^2 over the body to value accuracy tol.
QuadMinResult quadmin(const BoundedBody& body, const Mat& M, const Vec& b,
                      double tol = kDefaultTol);
QuadMinResult quadmin_opt(const BoundedBody& body, const Mat& M, const Vec& b,
                          const QuadMinOptions& opt);

// Frank-Wolfe refinement with exact line search, used to certify small
// stationarity gaps on oracle-only bodies. Stops once the gap drops below
// max(gap_target, value/4) or after max_steps.
QuadMinResult frank_wolfe_polish(const BoundedBody& body, const Mat& M,
                                 const Vec& b, QuadMinResult start,
                                 double gap_target, int max_steps = 16);

// --- preconditioning --------------------------------------------------------

// The affine change of variables psi(x) = (x - a)/r that moves the certified
// inner ball to B(0,1), together with the loss-transport scale of the regret
// reduction.
struct Preconditioner {
  AffineMap map;       // psi
  AffineMap inverse;   // psi^{-1}
  double scale_bound;  // 2R of the original body; losses transport as
                       // l' = (1/scale_bound) * (A^{-1})^T l = (r/2R) l
};

struct PreconditionResult {
  Preconditioner preconditioner;
  BodyPtr body;  // psi(body), with B(0,1) inside and outer radius <= 2R/r
};

PreconditionResult precondition(const BodyPtr& body);

// Projection onto the probability simplex computed by bisection on the
// KKT threshold. (The sort-based variant lives in test code as the
// independent oracle.)
Vec project_simplex(const Vec& y);

// Projection onto {w >= 0, sum w <= 1}.
Vec project_corner_simplex(const Vec& y);

// min_{w in simplex} ||V w - x||^2 via accelerated projected gradient over
// the barycentric weights; returns the weights and the attained point.
struct WeightFitResult {
  Vec weights;
  Vec point;
  double distance = 0.0;
};
WeightFitResult fit_convex_combination(const std::vector<Vec>& vertices,
                                       const Vec& x, double tol = 1e-12);

}  // namespace lswap

#endif  // LSWAP_GEOMETRY_HPP
