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

#include "lswap/ellipsoid.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace lswap {

namespace {

std::atomic<long> g_cuts{0};
std::atomic<double> g_min_margin{std::numeric_limits<double>::infinity()};

void record_cut_margin(double margin) {
  g_cuts.fetch_add(1, std::memory_order_relaxed);
  double cur = g_min_margin.load(std::memory_order_relaxed);
  while (margin < cur &&
         !g_min_margin.compare_exchange_weak(cur, margin,
                                             std::memory_order_relaxed)) {
  }
}

}  // namespace

long CutLawStats::cuts() { return g_cuts.load(); }
double CutLawStats::min_margin() { return g_min_margin.load(); }
void CutLawStats::reset() {
  g_cuts.store(0);
  g_min_margin.store(std::numeric_limits<double>::infinity());
}

double log_unit_ball_volume(Eigen::Index n) {
  return 0.5 * static_cast<double>(n) * std::log(M_PI) -
         std::lgamma(0.5 * static_cast<double>(n) + 1.0);
}

double central_cut_log_drop(Eigen::Index n) {
  if (n == 1) return std::log(2.0);
  const double nd = static_cast<double>(n);
  return 0.5 * (std::log((nd + 1.0) / (nd - 1.0)) -
                nd * std::log(nd * nd / (nd * nd - 1.0)));
}

Ellipsoid::Ellipsoid(Vec center, Mat shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  require(shape_.rows() == shape_.cols() && shape_.rows() == center_.size(),
          ErrorCode::kInvalidArgument, "Ellipsoid: shape/center mismatch");
  shape_ = 0.5 * (shape_ + shape_.transpose());
  Eigen::LLT<Mat> llt(shape_);
  require(llt.info() == Eigen::Success, ErrorCode::kShapeDegenerate,
          "Ellipsoid: shape matrix not positive definite");
  const Mat& l = llt.matrixLLT();
  double half_logdet = 0.0;
  for (Eigen::Index i = 0; i < shape_.rows(); ++i) {
    half_logdet += std::log(l(i, i));
  }
  log_volume_ = log_unit_ball_volume(dim()) + half_logdet;
}

Ellipsoid Ellipsoid::ball(Vec center, double radius) {
  require(radius > 0.0, ErrorCode::kInvalidArgument, "Ellipsoid::ball");
  const Eigen::Index n = center.size();
  return Ellipsoid(std::move(center), radius * radius * Mat::Identity(n, n));
}

void Ellipsoid::central_cut(const Halfspace& h, double tol) {
  const Eigen::Index n = dim();
  require_dim(h.normal, n, "central_cut");
  require(h.violation(center_) >= -tol, ErrorCode::kInvalidArgument,
          "central_cut: halfspace strictly contains the center");
  Vec g = shape_ * h.normal;
  const double s = h.normal.dot(g);
  require(s > 1e-300, ErrorCode::kShapeDegenerate,
          "central_cut: ellipsoid collapsed along the cut direction");
  const double rs = std::sqrt(s);
  const double before = log_volume_;
  if (n == 1) {
    center_[0] -= 0.5 * g[0] / rs;
    shape_(0, 0) *= 0.25;
  } else {
    const double nd = static_cast<double>(n);
    center_ -= (1.0 / (nd + 1.0)) * g / rs;
    shape_ = (nd * nd / (nd * nd - 1.0)) *
             (shape_ - (2.0 / (nd + 1.0)) * (g * g.transpose()) / s);
    shape_ = 0.5 * (shape_ + shape_.transpose());
  }
  log_volume_ -= central_cut_log_drop(n);
  record_cut_margin((before - log_volume_) -
                    1.0 / (2.0 * (static_cast<double>(n) + 1.0)));
}

long engine_cap(Eigen::Index n, double log_vol_init, double log_vol_floor) {
  const double budget = std::max(log_vol_init - log_vol_floor, 1.0);
  return static_cast<long>(
             std::ceil(4.0 * (static_cast<double>(n) + 1.0) * budget)) +
         16;
}

FeasibilityResult feasibility_engine(
    const std::function<std::optional<Halfspace>(const Vec&)>& sep,
    Ellipsoid e, double log_vol_floor, long cap, const EngineTrace& trace) {
  require(cap >= 1, ErrorCode::kInvalidArgument, "feasibility_engine: cap");
  FeasibilityResult out;
  while (true) {
    std::optional<Halfspace> h = sep(e.center());
    if (!h.has_value()) {
      out.point = e.center();
      out.final_log_volume = e.log_volume();
      return out;
    }
    e.central_cut(*h);
    out.cuts.push_back(std::move(*h));
    ++out.iterations;
    if (trace) trace({out.iterations, e.log_volume(), "cut"});
    if (e.log_volume() < log_vol_floor) {
      out.final_log_volume = e.log_volume();
      return out;  // infeasible: point unset
    }
    if (out.iterations >= cap) {
      throw Error(ErrorCode::kIterationCapExceeded,
                  "feasibility_engine: iteration cap " + std::to_string(cap) +
                      " exceeded");
    }
  }
}

// --- sliding-objective linear optimization -----------------------------------

LinOptResult linopt_cutting_plane(const BoundedBody& body, const Vec& c,
                                  double tol) {
  const Eigen::Index n = body.dim;
  const double cn = c.norm();
  Vec chat = c / cn;
  const double r = body.inner_radius;
  const double big_r = body.outer_radius;
  const double rho = std::max(tol * r / (8.0 * std::max(big_r, 1.0)), 1e-15);
  Ellipsoid e = Ellipsoid::ball(Vec::Zero(n), big_r + tol);
  const double floor = log_unit_ball_volume(n) + n * std::log(rho);
  const long cap = engine_cap(n, e.log_volume(), floor);

  bool have_best = false;
  Vec best_x;
  double best_v = -std::numeric_limits<double>::infinity();
  long iters = 0;
  while (e.log_volume() >= floor) {
    if (iters++ >= cap) {
      throw Error(ErrorCode::kNumericalStall,
                  "linopt: cutting-plane iteration cap exceeded");
    }
    const Vec z = e.center();
    if (membership(body, z, tol)) {
      const double v = chat.dot(z);
      if (!have_best || v > best_v) {
        have_best = true;
        best_v = v;
        best_x = z;
      }
      e.central_cut(Halfspace(-chat, -v));
    } else {
      e.central_cut(separate(body, z, tol).halfspace);
    }
  }
  require(have_best, ErrorCode::kNumericalStall,
          "linopt: no feasible center found before the volume floor");
  return {best_x, cn * best_v};
}

QuadMinResult quadmin_cutting_plane(const BoundedBody& body, const Mat& M,
                                    const Vec& b, const QuadMinOptions& opt) {
  const Eigen::Index n = body.dim;
  const auto f = [&](const Vec& x) { return 0.5 * (M * x + b).squaredNorm(); };
  const auto grad = [&](const Vec& x) -> Vec {
    return M.transpose() * (M * x + b);
  };
  Eigen::JacobiSVD<Mat> svd(M);
  const double smax = svd.singularValues().maxCoeff();
  const double lip = std::max(smax * smax, 1e-30);
  const double big_r = body.outer_radius;
  const double fhat = 0.5 * std::pow(smax * big_r + b.norm(), 2) + 1e-12;

  double gap_target = opt.gap_target;
  double alpha = opt.value_tol;
  if (gap_target < 0.0) gap_target = 10.0 * opt.value_tol;
  if (gap_target > 0.0) {
    alpha = std::min(alpha,
                     gap_target * gap_target / (8.0 * lip * big_r * big_r + 1.0));
  }
  alpha = std::max(alpha, 1e-14 * fhat);

  const double rho =
      std::max(alpha * body.inner_radius / (2.0 * fhat + alpha), 1e-15);
  Ellipsoid e = Ellipsoid::ball(Vec::Zero(n), big_r + 1e-9);
  const double floor = log_unit_ball_volume(n) + n * std::log(rho);
  const long cap = engine_cap(n, e.log_volume(), floor);

  bool have_best = false;
  Vec best_x;
  double best_f = std::numeric_limits<double>::infinity();
  long iters = 0;
  while (e.log_volume() >= floor) {
    if (iters++ >= cap) {
      throw Error(ErrorCode::kNumericalStall,
                  "quadmin: cutting-plane iteration cap exceeded");
    }
    const Vec z = e.center();
    if (membership(body, z, kDefaultTol)) {
      const double fz = f(z);
      if (!have_best || fz < best_f) {
        have_best = true;
        best_f = fz;
        best_x = z;
        if (opt.residual_mode && best_f <= opt.residual_floor) break;
      }
      Vec g = grad(z);
      const double gn = g.norm();
      if (gn < 1e-300) break;  // unconstrained minimum
      e.central_cut(Halfspace(g / gn, (g / gn).dot(z)));
    } else {
      e.central_cut(separate(body, z, kDefaultTol).halfspace);
    }
  }
  require(have_best, ErrorCode::kNumericalStall,
          "quadmin: no feasible center found before the volume floor");
  QuadMinResult out;
  out.point = best_x;
  out.value = best_f;
  Vec g = grad(best_x);
  if (g.norm() < 1e-300) {
    out.stationarity = 0.0;
  } else {
    LinOptResult lin = linopt(body, -g, std::max(opt.value_tol, 1e-12));
    out.stationarity = std::max(g.dot(best_x) - g.dot(lin.point), 0.0);
  }
  return out;
}

// --- ShellEllipsoid -----------------------------------------------------------

bool TransformRegion::contains(const Vec& flat, double tol) const {
  if ((flat - center).norm() > radius + tol) return false;
  if (base_radius >= 0.0 && flat.norm() > base_radius + tol) return false;
  for (const Halfspace& h : cuts) {
    if (!h.contains(flat, tol)) return false;
  }
  return true;
}

namespace {

// Separation against the explicit description of F; nullopt when inside.
std::optional<Halfspace> region_separate(const TransformRegion& f,
                                         const Vec& z) {
  Vec d = z - f.center;
  const double dn = d.norm();
  if (dn > f.radius) {
    Vec nrm = d / dn;
    return Halfspace(nrm, nrm.dot(f.center) + f.radius);
  }
  if (f.base_radius >= 0.0) {
    const double zn = z.norm();
    if (zn > f.base_radius) {
      Vec nrm = z / zn;
      return Halfspace(nrm, f.base_radius);
    }
  }
  for (const Halfspace& h : f.cuts) {
    if (h.violation(z) > 0.0) return h;
  }
  return std::nullopt;
}

}  // namespace

ShellOutcome shell_ellipsoid(const BoundedBody& body,
                             const TransformRegion& region,
                             double log_vol_floor, double fp_tol,
                             const EngineTrace& trace) {
  const Eigen::Index d = body.dim;
  const Eigen::Index n = d * (d + 1);
  require_dim(region.center, n, "shell_ellipsoid");
  ShellOutcome out;

  // A zero-radius region degenerates to a single semi-separation query.
  if (region.radius <= 0.0) {
    AffineMap phi = AffineMap::unflatten(region.center, d);
    SemiSeparationResult s = semi_separate(body, phi, fp_tol);
    if (s.fixed_point.has_value()) {
      out.transform = phi;
      out.fixed_point = *s.fixed_point;
    } else {
      out.frontier.halfspaces.push_back(s.halfspace);
      out.frontier.count_bound = 1;
    }
    out.iterations = 1;
    return out;
  }

  Ellipsoid e = Ellipsoid::ball(region.center, region.radius);
  const long cap = engine_cap(n, e.log_volume(), log_vol_floor);
  out.frontier.count_bound = cap;
  while (e.log_volume() >= log_vol_floor) {
    require(out.iterations < cap, ErrorCode::kIterationCapExceeded,
            "shell_ellipsoid: iteration cap exceeded");
    ++out.iterations;
    const Vec z = e.center();
    std::optional<Halfspace> fcut = region_separate(region, z);
    if (fcut.has_value()) {
      e.central_cut(*fcut);
      if (trace) trace({out.iterations, e.log_volume(), "region"});
      continue;
    }
    AffineMap phi = AffineMap::unflatten(z, d);
    SemiSeparationResult s = semi_separate(body, phi, fp_tol);
    if (s.fixed_point.has_value()) {
      out.transform = std::move(phi);
      out.fixed_point = *s.fixed_point;
      return out;
    }
    e.central_cut(s.halfspace.halfspace);
    if (trace) trace({out.iterations, e.log_volume(), "semi_separation"});
    out.frontier.halfspaces.push_back(std::move(s.halfspace));
  }
  return out;
}

}  // namespace lswap
