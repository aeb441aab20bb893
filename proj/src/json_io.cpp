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

#include "lswap/json_io.hpp"

#include <json.hpp>

namespace lswap {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a, const char* where) {
  require(a.is_array(), ErrorCode::kParse,
          std::string(where) + ": expected an array");
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    require(a[i].is_number(), ErrorCode::kParse,
            std::string(where) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

json mat_to_json(const Mat& m) {  // row-major rows
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(vec_to_json(m.row(i).transpose()));
  }
  return rows;
}

Mat mat_from_json(const json& a, const char* where) {
  require(a.is_array() && !a.empty(), ErrorCode::kParse,
          std::string(where) + ": expected a non-empty array of rows");
  Vec first = vec_from_json(a[0], where);
  Mat m(a.size(), first.size());
  m.row(0) = first.transpose();
  for (size_t i = 1; i < a.size(); ++i) {
    Vec row = vec_from_json(a[i], where);
    require(row.size() == m.cols(), ErrorCode::kParse,
            std::string(where) + ": ragged rows");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json parse(const std::string& text, const char* where) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::kParse,
          std::string(where) + ": malformed JSON");
  return j;
}

json body_to_json_impl(const BoundedBody& body);

struct BodyJsonVisitor {
  const BoundedBody& body;

  json operator()(const BallShape& s) const {
    return {{"shape", "ball"},
            {"center", vec_to_json(s.center)},
            {"radius", s.radius}};
  }
  json operator()(const BoxShape& s) const {
    return {{"shape", "box"}, {"lo", vec_to_json(s.lo)}, {"hi", vec_to_json(s.hi)}};
  }
  json operator()(const SimplexShape& s) const {
    return {{"shape", "simplex"}, {"dim", s.dim}};
  }
  json operator()(const HPolytopeShape& s) const {
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.normals.rows(); ++i) {
      rows.push_back(
          json::array({vec_to_json(s.normals.row(i).transpose()), s.offsets[i]}));
    }
    return {{"shape", "hpolytope"},
            {"dim", body.dim},
            {"rows", rows},
            {"inner",
             {{"center", vec_to_json(body.inner_center)},
              {"radius", body.inner_radius}}},
            {"outer_radius", body.outer_radius}};
  }
  json operator()(const VPolytopeShape& s) const {
    json verts = json::array();
    for (const Vec& v : s.vertices) verts.push_back(vec_to_json(v));
    return {{"shape", "vpolytope"},
            {"vertices", verts},
            {"inner",
             {{"center", vec_to_json(body.inner_center)},
              {"radius", body.inner_radius}}}};
  }
  json operator()(const CappedBallShape& s) const {
    return {{"shape", "capped_ball"},
            {"radius", s.radius},
            {"direction", vec_to_json(s.direction)},
            {"cap", s.cap}};
  }
  json operator()(const AffineImageShape& s) const {
    return {{"shape", "affine_image"},
            {"base", body_to_json_impl(*s.base)},
            {"M", mat_to_json(s.map.matrix())},
            {"b", vec_to_json(s.map.offset())}};
  }
  json operator()(const IntersectionShape& s) const {
    json cuts = json::array();
    for (const Halfspace& h : s.cuts) {
      cuts.push_back(json::array({vec_to_json(h.normal), h.offset}));
    }
    return {{"shape", "intersection"},
            {"base", body_to_json_impl(*s.base)},
            {"cuts", cuts},
            {"inner",
             {{"center", vec_to_json(body.inner_center)},
              {"radius", body.inner_radius}}}};
  }
};

json body_to_json_impl(const BoundedBody& body) {
  return std::visit(BodyJsonVisitor{body}, body.shape);
}

BodyPtr body_from_json_impl(const json& j) {
  require(j.is_object() && j.contains("shape"), ErrorCode::kParse,
          "body: missing shape");
  const std::string kind = j.at("shape").get<std::string>();
  try {
    if (kind == "ball") {
      return make_ball(vec_from_json(j.at("center"), "ball"),
                       j.at("radius").get<double>());
    }
    if (kind == "box") {
      return make_box(vec_from_json(j.at("lo"), "box"),
                      vec_from_json(j.at("hi"), "box"));
    }
    if (kind == "simplex") {
      return make_simplex(j.at("dim").get<Eigen::Index>());
    }
    if (kind == "hpolytope") {
      const json& rows = j.at("rows");
      require(rows.is_array() && !rows.empty(), ErrorCode::kParse,
              "hpolytope: rows");
      Mat normals(rows.size(), j.at("dim").get<Eigen::Index>());
      Vec offsets(rows.size());
      for (size_t i = 0; i < rows.size(); ++i) {
        Vec n = vec_from_json(rows[i].at(0), "hpolytope row");
        require(n.size() == normals.cols(), ErrorCode::kParse,
                "hpolytope: row dimension");
        normals.row(static_cast<Eigen::Index>(i)) = n.transpose();
        offsets[static_cast<Eigen::Index>(i)] = rows[i].at(1).get<double>();
      }
      const json& inner = j.at("inner");
      return make_hpolytope(std::move(normals), std::move(offsets),
                            inner.at("radius").get<double>(),
                            vec_from_json(inner.at("center"), "hpolytope inner"),
                            j.at("outer_radius").get<double>());
    }
    if (kind == "vpolytope") {
      std::vector<Vec> verts;
      for (const json& v : j.at("vertices")) {
        verts.push_back(vec_from_json(v, "vpolytope vertex"));
      }
      const json& inner = j.at("inner");
      return make_vpolytope(std::move(verts), inner.at("radius").get<double>(),
                            vec_from_json(inner.at("center"), "vpolytope inner"));
    }
    if (kind == "capped_ball") {
      return make_capped_ball(j.at("radius").get<double>(),
                              vec_from_json(j.at("direction"), "capped_ball"),
                              j.at("cap").get<double>());
    }
    if (kind == "affine_image") {
      BodyPtr base = body_from_json_impl(j.at("base"));
      return make_affine_image(
          base, AffineMap(mat_from_json(j.at("M"), "affine_image"),
                          vec_from_json(j.at("b"), "affine_image")));
    }
    if (kind == "intersection") {
      BodyPtr base = body_from_json_impl(j.at("base"));
      std::vector<Halfspace> cuts;
      for (const json& c : j.at("cuts")) {
        cuts.emplace_back(vec_from_json(c.at(0), "intersection cut"),
                          c.at(1).get<double>());
      }
      const json& inner = j.at("inner");
      return make_intersection(base, std::move(cuts),
                               inner.at("radius").get<double>(),
                               vec_from_json(inner.at("center"),
                                             "intersection inner"));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("body: ") + e.what());
  }
  throw Error(ErrorCode::kParse, "body: unknown shape '" + kind + "'");
}

}  // namespace

std::string body_to_json(const BoundedBody& body) {
  return body_to_json_impl(body).dump();
}

BodyPtr body_from_json(const std::string& text) {
  return body_from_json_impl(parse(text, "body"));
}

std::string affine_map_to_json(const AffineMap& map) {
  json j = {{"M", mat_to_json(map.matrix())}, {"b", vec_to_json(map.offset())}};
  return j.dump();
}

AffineMap affine_map_from_json(const std::string& text) {
  json j = parse(text, "affine_map");
  try {
    return AffineMap(mat_from_json(j.at("M"), "affine_map"),
                     vec_from_json(j.at("b"), "affine_map"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("affine_map: ") + e.what());
  }
}

std::string game_to_json(const ConvexGame& game) {
  json j;
  j["players"] = game.players();
  json bodies = json::array();
  for (const BodyPtr& b : game.bodies()) bodies.push_back(body_to_json_impl(*b));
  j["bodies"] = bodies;
  if (const auto* nf = dynamic_cast<const NormalFormGame*>(&game)) {
    json tensors = json::array();
    for (const auto& t : nf->tensors()) tensors.push_back(json{{"values", t}});
    j["utilities"] = {{"kind", "normal_form"}, {"tensors", tensors}};
  } else if (const auto* pm = dynamic_cast<const PolymatrixGame*>(&game)) {
    json pairs = json::array();
    for (const auto& p : pm->pairs()) {
      pairs.push_back(
          {{"i", p.i}, {"j", p.j}, {"matrix", mat_to_json(p.payoff)}});
    }
    j["utilities"] = {{"kind", "polymatrix"}, {"pairs", pairs}};
  } else {
    throw Error(ErrorCode::kUnsupportedBody,
                "game_to_json: unknown game adapter");
  }
  return j.dump();
}

GamePtr game_from_json(const std::string& text) {
  json j = parse(text, "game");
  try {
    const int n = j.at("players").get<int>();
    std::vector<BodyPtr> bodies;
    for (const json& b : j.at("bodies")) bodies.push_back(body_from_json_impl(b));
    require(static_cast<int>(bodies.size()) == n, ErrorCode::kParse,
            "game: players/bodies mismatch");
    const json& u = j.at("utilities");
    const std::string kind = u.at("kind").get<std::string>();
    if (kind == "normal_form") {
      std::vector<Eigen::Index> counts;
      for (const BodyPtr& b : bodies) counts.push_back(b->dim);
      std::vector<std::vector<double>> tensors;
      for (const json& t : u.at("tensors")) {
        tensors.push_back(t.at("values").get<std::vector<double>>());
      }
      return std::make_shared<NormalFormGame>(std::move(counts),
                                              std::move(tensors));
    }
    if (kind == "polymatrix") {
      std::vector<PolymatrixGame::Pair> pairs;
      for (const json& p : u.at("pairs")) {
        pairs.push_back({p.at("i").get<int>(), p.at("j").get<int>(),
                         mat_from_json(p.at("matrix"), "polymatrix")});
      }
      return std::make_shared<PolymatrixGame>(std::move(bodies),
                                              std::move(pairs));
    }
    throw Error(ErrorCode::kParse, "game: unknown utilities kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("game: ") + e.what());
  }
}

std::string solution_to_json(const CorrelatedSolution& solution,
                             const std::vector<double>* gaps) {
  json j;
  json atoms = json::array();
  for (const auto& atom : solution.atoms) {
    json players = json::array();
    for (const Vec& x : atom) players.push_back(vec_to_json(x));
    atoms.push_back(players);
  }
  j["atoms"] = atoms;
  j["weights"] = vec_to_json(solution.weights);
  if (gaps) j["gaps"] = *gaps;
  return j.dump();
}

CorrelatedSolution solution_from_json(const std::string& text) {
  json j = parse(text, "solution");
  CorrelatedSolution s;
  try {
    for (const json& atom : j.at("atoms")) {
      std::vector<Vec> players;
      for (const json& x : atom) players.push_back(vec_from_json(x, "solution"));
      s.atoms.push_back(std::move(players));
    }
    s.weights = vec_from_json(j.at("weights"), "solution weights");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("solution: ") + e.what());
  }
  require(static_cast<size_t>(s.weights.size()) == s.atoms.size(),
          ErrorCode::kParse, "solution: atoms/weights mismatch");
  s.ger_indices.assign(s.atoms.size(), -1);
  return s;
}

}  // namespace lswap
