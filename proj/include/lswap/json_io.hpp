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

#ifndef LSWAP_JSON_IO_HPP
#define LSWAP_JSON_IO_HPP

#include <string>

#include "lswap/equilibrium.hpp"
#include "lswap/geometry.hpp"

namespace lswap {

// Body schema, e.g.
//   {"shape": "hpolytope", "dim": 3, "rows": [[[...normal...], offset], ...],
//    "inner": {"center": [...], "radius": r}, "outer_radius": R}
// Round-trips preserve values to 1e-15 relative (not bit-exact).
std::string body_to_json(const BoundedBody& body);
BodyPtr body_from_json(const std::string& text);

// AffineMap schema: {"M": [[row-major rows]], "b": [...]}. The flattened
// vector order (column-major M, then b) is part of the wire contract.
std::string affine_map_to_json(const AffineMap& map);
AffineMap affine_map_from_json(const std::string& text);

// Game schema: {"players": n, "bodies": [...], "utilities":
//   {"kind": "normal_form", "tensors": [{"values": [...]} ...]} |
//   {"kind": "polymatrix", "pairs": [{"i":., "j":., "matrix": [[...]]} ...]}}
// Normal-form tensors are flat, row-major with the last player's action
// index fastest.
std::string game_to_json(const ConvexGame& game);
GamePtr game_from_json(const std::string& text);

// Solution schema: {"atoms": [[[player strategy] ...] ...], "weights": [...],
//                   "gaps": [...]} (gaps optional).
std::string solution_to_json(const CorrelatedSolution& solution,
                             const std::vector<double>* gaps = nullptr);
CorrelatedSolution solution_from_json(const std::string& text);

}  // namespace lswap

#endif  // LSWAP_JSON_IO_HPP
