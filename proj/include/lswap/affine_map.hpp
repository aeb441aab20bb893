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

#ifndef LSWAP_AFFINE_MAP_HPP
#define LSWAP_AFFINE_MAP_HPP

#include "lswap/common.hpp"

namespace lswap {

// An affine transformation x |-> M x + b of R^d, identified with a flat
// vector of dimension d*(d+1). The flattening order is column-major M
// followed by b, and is fixed forever: serialized ellipsoid and shell state
// depend on it.
class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(Mat matrix, Vec offset)
      : matrix_(std::move(matrix)), offset_(std::move(offset)) {
    require(matrix_.rows() == matrix_.cols(),
            ErrorCode::kInvalidArgument, "AffineMap: matrix must be square");
    require(matrix_.rows() == offset_.size(), ErrorCode::kDimensionMismatch,
            "AffineMap: matrix/offset dimension mismatch");
  }

  static AffineMap identity(Eigen::Index d) {
    return AffineMap(Mat::Identity(d, d), Vec::Zero(d));
  }
  // The constant map x |-> a.
  static AffineMap constant(const Vec& a) {
    return AffineMap(Mat::Zero(a.size(), a.size()), a);
  }
  static AffineMap scaling(Eigen::Index d, double s) {
    return AffineMap(s * Mat::Identity(d, d), Vec::Zero(d));
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  Eigen::Index flat_size() const { return dim() * (dim() + 1); }
  const Mat& matrix() const { return matrix_; }
  const Vec& offset() const { return offset_; }

  Vec apply(const Vec& x) const {
    require_dim(x, dim(), "AffineMap::apply");
    return matrix_ * x + offset_;
  }

  // phi2 after phi1, i.e. x |-> phi2(phi1(x)).
  AffineMap compose_after(const AffineMap& inner) const {
    require(dim() == inner.dim(), ErrorCode::kDimensionMismatch,
            "AffineMap::compose_after");
    return AffineMap(matrix_ * inner.matrix_,
                     matrix_ * inner.offset_ + offset_);
  }

  AffineMap inverse() const {
    Eigen::FullPivLU<Mat> lu(matrix_);
    require(lu.isInvertible(), ErrorCode::kInvalidArgument,
            "AffineMap::inverse: singular matrix");
    Mat inv = lu.inverse();
    return AffineMap(inv, -inv * offset_);
  }

  double frobenius_norm() const {
    return std::sqrt(matrix_.squaredNorm() + offset_.squaredNorm());
  }

  Vec flatten() const {
    const Eigen::Index d = dim();
    Vec out(flat_size());
    out.head(d * d) = Eigen::Map<const Vec>(matrix_.data(), d * d);
    out.tail(d) = offset_;
    return out;
  }

  static AffineMap unflatten(const Vec& flat, Eigen::Index d) {
    require(flat.size() == d * (d + 1), ErrorCode::kDimensionMismatch,
            "AffineMap::unflatten: bad flat size");
    Mat m = Eigen::Map<const Mat>(flat.data(), d, d);
    return AffineMap(std::move(m), flat.tail(d));
  }

 private:
  Mat matrix_;
  Vec offset_;
};

// The loss matrix L_t of the dual online learning problem: the unique flat
// vector satisfying <L_t, phi> = <loss, phi(play)> for every affine phi.
// Its M-part is loss * play^T and its b-part is loss.
inline Vec dual_loss_matrix(const Vec& play, const Vec& loss) {
  require(play.size() == loss.size(), ErrorCode::kDimensionMismatch,
          "dual_loss_matrix");
  const Eigen::Index d = play.size();
  Vec out(d * (d + 1));
  Mat m = loss * play.transpose();
  out.head(d * d) = Eigen::Map<const Vec>(m.data(), d * d);
  out.tail(d) = loss;
  return out;
}

}  // namespace lswap

#endif  // LSWAP_AFFINE_MAP_HPP
