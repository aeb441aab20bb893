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

#ifndef LSWAP_ENDO_HPP
#define LSWAP_ENDO_HPP

#include <optional>
#include <variant>
#include <vector>

#include "lswap/affine_map.hpp"
#include "lswap/geometry.hpp"

namespace lswap {

// Well-boundedness of the endomorphism set of a body with inner ball
// B(a, r) and outer ball B(0, R):
//   ball(phi_a, r/(2R))  <=  Phi(P)  <=  ball(0, (3R/r) sqrt(R^2 + d))
// where phi_a is the constant map onto a. For the flat probability simplex
// the inner radius degenerates to 0 and the outer radius bounds the
// column-stochastic representatives instead.
struct EndoBounds {
  AffineMap center_map;
  double inner_radius;
  double outer_radius;

  static EndoBounds of(const BoundedBody& body);
};

// Provenance of a separating halfspace in transformation space.
struct SemiSeparationTag {
  Vec direction;   // u = phi(p*) - p*
  Vec maximizer;   // p_u = argmax <p, u> over the body
};
struct HRepViolationTag {
  Eigen::Index row;
  Vec witness;
};
struct VRepViolationTag {
  Eigen::Index vertex;
  Halfspace inner;
};
using TransformHalfspaceTag =
    std::variant<SemiSeparationTag, HRepViolationTag, VRepViolationTag>;

// A halfspace over flattened transformations (unit Frobenius-norm normal)
// that contains the endomorphism set of the body it was derived from.
struct TransformHalfspace {
  Halfspace halfspace;  // over R^{d(d+1)}
  TransformHalfspaceTag provenance;
};

struct FixedPointResult {
  bool found = false;
  Vec point;              // minimizer of ||phi(p) - p||^2 over the body
  double residual = 0.0;  // ||phi(point) - point|| when found
  double min_residual_sq = 0.0;  // attained value of ||phi(p)-p||^2
};

// Minimizes ||phi(p) - p||^2 over the body. When I - M is well-conditioned
// the linear-system solution is tried first and returned immediately if it
// lies in the body. found iff the attained residual is at most fp_tol.
FixedPointResult find_fixed_point(const BoundedBody& body, const AffineMap& phi,
                                  double fp_tol = kDefaultFpTol);

// Member iff phi(v) lies within tol of `target` for every vertex; otherwise
// the halfspace lifted from the violated vertex.
std::optional<TransformHalfspace> endo_membership_vrep(
    const std::vector<Vec>& vertices, const BoundedBody& target,
    const AffineMap& phi, double tol = kDefaultTol);

// Member iff max_{x in source} <a_i, phi(x)> <= b_i + tol for every row of
// the target H-representation (one linopt per row).
std::optional<TransformHalfspace> endo_membership_hrep(
    const Mat& normals, const Vec& offsets, const BoundedBody& source,
    const AffineMap& phi, double tol = kDefaultTol);

struct SemiSeparationResult {
  // FixedPoint when `fixed_point` is set, otherwise a separating halfspace.
  std::optional<Vec> fixed_point;
  double residual = 0.0;
  TransformHalfspace halfspace;
};

// The semi-separation oracle: returns a fixed point of phi inside the body,
// or a halfspace that every endomorphism satisfies and phi violates.
// Throws InconsistentOracle when the constructed halfspace is violated by
// phi by less than fp_tol^2/4 (quadmin under-convergence).
SemiSeparationResult semi_separate(const BoundedBody& body,
                                   const AffineMap& phi,
                                   double fp_tol = kDefaultFpTol);

}  // namespace lswap

#endif  // LSWAP_ENDO_HPP
