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

#ifndef LSWAP_ELLIPSOID_HPP
#define LSWAP_ELLIPSOID_HPP

#include <functional>
#include <optional>
#include <vector>

#include "lswap/common.hpp"
#include "lswap/endo.hpp"
#include "lswap/geometry.hpp"

namespace lswap {

// log of the volume of the unit ball in R^n.
double log_unit_ball_volume(Eigen::Index n);

// Exact per-cut log-volume drop of the central-cut update in R^n. Always
// at least 1/(2(n+1)).
double central_cut_log_drop(Eigen::Index n);

// {x : (x-center)^T shape^{-1} (x-center) <= 1}. The cached log_volume is
// updated in closed form with every cut.
class Ellipsoid {
 public:
  Ellipsoid(Vec center, Mat shape);
  static Ellipsoid ball(Vec center, double radius);

  const Vec& center() const { return center_; }
  const Mat& shape() const { return shape_; }
  Eigen::Index dim() const { return center_.size(); }
  double log_volume() const { return log_volume_; }

  // Central-cut update: replaces this ellipsoid by the minimum-volume
  // ellipsoid containing {x in E : <h.normal, x> <= <h.normal, center>}.
  // Requires the halfspace to pass through or exclude the center.
  // Throws ShapeDegenerate when the shape matrix has collapsed.
  void central_cut(const Halfspace& h, double tol = 1e-9);

 private:
  Vec center_;
  Mat shape_;
  double log_volume_;
};

// One engine iteration record, used for the optional JSON trace.
struct EngineTraceRow {
  long iter;
  double log_volume;
  const char* cut_kind;
};
using EngineTrace = std::function<void(const EngineTraceRow&)>;

struct FeasibilityResult {
  std::optional<Vec> point;          // set on Found
  std::vector<Halfspace> cuts;       // all cuts issued, in order
  long iterations = 0;
  double final_log_volume = 0.0;
};

// Queries `sep` at the current center, cuts on returned halfspaces, stops
// with Found on Inside, or Infeasible (point unset) once log-volume drops
// below log_vol_floor. Never exceeds `cap` iterations (IterationCapExceeded).
// Deterministic: identical inputs give identical outputs.
FeasibilityResult feasibility_engine(
    const std::function<std::optional<Halfspace>(const Vec&)>& sep,
    Ellipsoid init, double log_vol_floor, long cap,
    const EngineTrace& trace = nullptr);

// Default iteration cap: twice the volume-shrink arithmetic bound.
long engine_cap(Eigen::Index n, double log_vol_init, double log_vol_floor);

// Running tally of the volume-law check: every cut in every run must drop
// log-volume by at least 1/(2(n+1)) - 1e-9.
struct CutLawStats {
  static long cuts();
  static double min_margin();  // min over all cuts of (drop - 1/(2(n+1)))
  static void reset();
};

// Maximizes <c, x> over a body via the sliding-objective central-cut loop.
// Returns a point in body^{+tol} whose value is within tol of the optimum
// over body^{-tol}.
LinOptResult linopt_cutting_plane(const BoundedBody& body, const Vec& c,
                                  double tol);

// Minimizes 0.5||Mx + b||^2 over a body with only membership/separation
// access: sliding-objective loop with gradient cuts.
QuadMinResult quadmin_cutting_plane(const BoundedBody& body, const Mat& M,
                                    const Vec& b, const QuadMinOptions& opt);

// --- ShellEllipsoid ---------------------------------------------------------

// Q of Lemma 4.2: the ordered semi-separation cuts, each containing the
// endomorphism set of P.
struct Frontier {
  std::vector<TransformHalfspace> halfspaces;
  long count_bound = 0;  // engine iteration cap in force when emitted
};

struct ShellOutcome {
  // FoundTransform when `transform` is set; Separated(frontier) otherwise.
  std::optional<AffineMap> transform;
  Vec fixed_point;  // valid only with transform
  Frontier frontier;
  long iterations = 0;
};

// Explicit description of the search region F: ball(center, radius) in
// transformation space, optionally intersected with an origin-centered base
// ball and halfspaces over flat vectors.
struct TransformRegion {
  Vec center;  // flat, dimension d(d+1)
  double radius = 0.0;
  double base_radius = -1.0;  // origin-centered outer ball; <0 disables
  std::vector<Halfspace> cuts;

  bool contains(const Vec& flat, double tol) const;
};

// Algorithm of Lemma 4.2: either finds a transformation in F with a fixed
// point inside P (FoundTransform), or returns the frontier of
// semi-separation cuts once the enclosing ellipsoid volume drops below
// exp(log_vol_floor). Only semi-separation cuts enter the frontier; cuts
// against F's own description do not.
ShellOutcome shell_ellipsoid(const BoundedBody& body,
                             const TransformRegion& region,
                             double log_vol_floor, double fp_tol,
                             const EngineTrace& trace = nullptr);

}  // namespace lswap

#endif  // LSWAP_ELLIPSOID_HPP
