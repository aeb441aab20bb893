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

#ifndef LSWAP_COMMON_HPP
#define LSWAP_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lswap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy shared by the C++ core and the C API. Every failure mode of
// the solvers maps onto one of these codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kDimensionMismatch = 3,
  kDegenerateProjection = 4,
  kNumericalStall = 5,
  kShapeDegenerate = 6,
  kIterationCapExceeded = 7,
  kQExceededBound = 8,
  kFixedPointMissing = 9,
  kInconsistentOracle = 10,
  kCompressedPrimalInfeasible = 11,
  kUnsupportedBody = 12,
  kInternal = 13,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline void require_dim(const Vec& x, Eigen::Index d, const char* where) {
  if (x.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(where) + ": expected dimension " +
                    std::to_string(d) + ", got " + std::to_string(x.size()));
  }
}

// Default tolerance of the geometry oracles.
inline constexpr double kDefaultTol = 1e-9;
// Default fixed-point residual tolerance.
inline constexpr double kDefaultFpTol = 1e-8;

}  // namespace lswap

#endif  // LSWAP_COMMON_HPP
