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

#include "lswap/endo.hpp"

#include <cmath>

namespace lswap {

EndoBounds EndoBounds::of(const BoundedBody& body) {
  EndoBounds out{AffineMap::constant(body.inner_center), 0.0, 0.0};
  const double d = static_cast<double>(body.dim);
  if (body.flat) {
    // Probability simplex: every endomorphism acts on the hull like a
    // column-stochastic map, whose flat norm is at most sqrt(d). The
    // constant-map ball degenerates.
    out.inner_radius = 0.0;
    out.outer_radius = std::sqrt(d);
    return out;
  }
  const double r = body.inner_radius;
  const double R = body.outer_radius;
  out.inner_radius = r / (2.0 * R);
  out.outer_radius = (3.0 * R / r) * std::sqrt(R * R + d);
  return out;
}

namespace {

// Lifts a halfspace <c, phi(v)> <= beta on images of the point v to a
// halfspace over flattened transformations, with unit Frobenius normal.
Halfspace lift_point_constraint(const Vec& c, const Vec& v, double beta) {
  const Eigen::Index d = c.size();
  Vec normal(d * (d + 1));
  Mat m = c * v.transpose();
  normal.head(d * d) = Eigen::Map<const Vec>(m.data(), d * d);
  normal.tail(d) = c;
  return Halfspace(std::move(normal), beta);  // ctor normalizes
}

}  // namespace

FixedPointResult find_fixed_point(const BoundedBody& body, const AffineMap& phi,
                                  double fp_tol) {
  require(fp_tol > 0.0, ErrorCode::kInvalidArgument, "find_fixed_point: fp_tol");
  require(phi.dim() == body.dim, ErrorCode::kDimensionMismatch,
          "find_fixed_point");
  const Eigen::Index d = body.dim;
  const Mat A = Mat::Identity(d, d) - phi.matrix();

  // Nonsingular case: the fixed point solves (I - M) p = b directly.
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (smin > 1e-300 && smax / smin < 1e6) {
    Vec p = svd.solve(phi.offset());
    if (membership(body, p, 1e-12)) {
      FixedPointResult r;
      r.found = true;
      r.point = p;
      r.residual = (phi.apply(p) - p).norm();
      r.min_residual_sq = r.residual * r.residual;
      return r;
    }
  }

  const auto solve = [&](double scale) {
    QuadMinOptions opt;
    opt.value_tol = scale * fp_tol * fp_tol / 8.0;
    opt.gap_target = scale * fp_tol * fp_tol / 8.0;
    opt.residual_mode = true;
    opt.residual_floor = scale * fp_tol * fp_tol / 8.0;
    return quadmin_opt(body, phi.matrix() - Mat::Identity(d, d), phi.offset(),
                       opt);
  };
  QuadMinResult q = solve(1.0);
  if (!q.point.size()) {
    throw Error(ErrorCode::kNumericalStall, "find_fixed_point: empty quadmin");
  }
  if (q.stationarity > std::max(fp_tol * fp_tol / 8.0, q.value / 4.0)) {
    q = frank_wolfe_polish(body, phi.matrix() - Mat::Identity(d, d),
                           phi.offset(), q, fp_tol * fp_tol / 8.0);
  }
  double res_sq = 2.0 * q.value;  // quadmin carries the 1/2 factor
  // Ambiguous band: refine once before deciding.
  if (res_sq > 0.5 * fp_tol * fp_tol && res_sq <= fp_tol * fp_tol) {
    q = solve(0.1);
    res_sq = 2.0 * q.value;
  }
  FixedPointResult r;
  r.point = q.point;
  r.min_residual_sq = res_sq;
  if (res_sq <= fp_tol * fp_tol) {
    r.found = true;
    r.residual = (phi.apply(q.point) - q.point).norm();
  }
  return r;
}

std::optional<TransformHalfspace> endo_membership_vrep(
    const std::vector<Vec>& vertices, const BoundedBody& target,
    const AffineMap& phi, double tol) {
  require(!vertices.empty(), ErrorCode::kInvalidArgument,
          "endo_membership_vrep: no vertices");
  for (size_t i = 0; i < vertices.size(); ++i) {
    Vec image = phi.apply(vertices[i]);
    SeparationResult s = separate(target, image, tol);
    if (s.inside) continue;
    TransformHalfspace out;
    out.halfspace = lift_point_constraint(s.halfspace.normal, vertices[i],
                                          s.halfspace.offset);
    out.provenance =
        VRepViolationTag{static_cast<Eigen::Index>(i), s.halfspace};
    return out;
  }
  return std::nullopt;
}

std::optional<TransformHalfspace> endo_membership_hrep(
    const Mat& normals, const Vec& offsets, const BoundedBody& source,
    const AffineMap& phi, double tol) {
  require(normals.rows() == offsets.size(), ErrorCode::kDimensionMismatch,
          "endo_membership_hrep");
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    Vec a = normals.row(i).transpose();
    Vec c = phi.matrix().transpose() * a;
    Vec v;
    if (c.norm() < 1e-14) {
      // The image direction does not depend on the source point.
      v = source.inner_center;
    } else {
      v = linopt(source, c, tol).point;
    }
    if (a.dot(phi.apply(v)) <= offsets[i] + tol) continue;
    TransformHalfspace out;
    out.halfspace = lift_point_constraint(a, v, offsets[i]);
    out.provenance = HRepViolationTag{i, v};
    return out;
  }
  return std::nullopt;
}

SemiSeparationResult semi_separate(const BoundedBody& body,
                                   const AffineMap& phi, double fp_tol) {
  FixedPointResult fp = find_fixed_point(body, phi, fp_tol);
  SemiSeparationResult out;
  if (fp.found) {
    out.fixed_point = fp.point;
    out.residual = fp.residual;
    return out;
  }
  // u is the residual direction at the quadmin minimizer; by approximate
  // first-order optimality every p in the body has <phi(p) - p, u> > 0,
  // while every endomorphism phi' must satisfy <phi'(p_u), u> <= <p_u, u>.
  Vec u = phi.apply(fp.point) - fp.point;
  Vec p_u = linopt(body, u).point;
  const double raw_norm = u.norm() * std::sqrt(p_u.squaredNorm() + 1.0);
  out.halfspace.halfspace = lift_point_constraint(u, p_u, u.dot(p_u));
  out.halfspace.provenance = SemiSeparationTag{u, p_u};

  Vec flat = phi.flatten();
  const double viol = out.halfspace.halfspace.violation(flat);
  require(viol >= fp_tol * fp_tol / (4.0 * raw_norm),
          ErrorCode::kInconsistentOracle,
          "semi_separate: constructed halfspace barely violated; quadmin "
          "under-converged");
  return out;
}

}  // namespace lswap
