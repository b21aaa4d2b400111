#include "cubsc/complex.hpp"

#include <doctest.h>

#include <bit>
#include <set>

#include "cubsc/json_io.hpp"

using namespace cubsc;

namespace {

// one vertex, loops a=0 and b=1, square with left/right b and bottom/top a
RawComplex torus_raw() {
  RawComplex raw;
  raw.cubes = {{{}}, {{0, 0}, {0, 0}}, {{1, 1, 0, 0}}};
  raw.labels = {{"v"}, {"a", "b"}, {"ab"}};
  return raw;
}

// loops a,b,c at one vertex with the three pairwise commutation squares
RawComplex three_square_raw() {
  RawComplex raw;
  raw.cubes = {{{}}, {{0, 0}, {0, 0}, {0, 0}}, {{1, 1, 0, 0}, {2, 2, 1, 1}, {2, 2, 0, 0}}};
  return raw;
}

RawComplex circle_raw(int n) {
  RawComplex raw;
  raw.cubes.resize(2);
  for (int i = 0; i < n; ++i) raw.cubes[0].push_back({});
  for (int i = 0; i < n; ++i) raw.cubes[1].push_back({i, (i + 1) % n});
  return raw;
}

}  // namespace

TEST_CASE("torus complex validates with the expected census") {
  auto r = validate_complex(torus_raw());
  REQUIRE(ok(r));
  const CubeComplex& X = value(r);
  CHECK(X.dim() == 2);
  CHECK(X.vertex_count() == 1);
  CHECK(X.edge_count() == 2);
  CHECK(X.size(2) == 1);
  CHECK(X.germs_at(0).size() == 4);
  CHECK(X.corners_at(0).size() == 4 + 2 * 2);
  CHECK(X.label(1, 1) == "b");
}

TEST_CASE("face count and reference errors") {
  RawComplex missing;
  missing.cubes = {{{}}, {{0, 0}}, {{0, 0, 0}}};
  auto r1 = validate_complex(missing);
  REQUIRE(!ok(r1));
  CHECK(error(r1).kind == "InconsistentFaces");

  RawComplex dangling;
  dangling.cubes = {{{}}, {{0, 0}}, {{0, 0, 0, 99}}};
  auto r2 = validate_complex(dangling);
  REQUIRE(!ok(r2));
  CHECK(error(r2).kind == "DanglingReference");

  RawComplex dup;
  dup.cubes = {{{}}, {{0, 0}, {0, 0}}, {{1, 1, 0, 0}, {0, 0, 1, 1}}};
  auto r3 = validate_complex(dup);
  REQUIRE(!ok(r3));
  CHECK(error(r3).kind == "InconsistentFaces");
}

TEST_CASE("solid cube face lattice") {
  for (int d = 1; d <= 4; ++d) {
    auto raw = standard_cube(d);
    auto r = validate_complex(raw);
    REQUIRE(ok(r));
    const CubeComplex& X = value(r);
    // census oracle: C(d,k) * 2^(d-k) cells per dimension
    for (int k = 0; k <= d; ++k) {
      std::size_t want = 1;
      for (int i = 0; i < k; ++i) want = want * (d - i) / (i + 1);
      CHECK(X.size(k) == want << (d - k));
    }
    // vertex ids are coordinate bit patterns
    const int top = static_cast<int>(X.size(d)) - 1;
    for (unsigned bits = 0; bits < (1u << d); ++bits)
      CHECK(X.corner_vertex(d, top, bits) == static_cast<int>(bits));
    // corner germs walk the d incident edges, pairwise distinct
    for (unsigned bits = 0; bits < (1u << d); ++bits) {
      auto germs = X.corner_germs(d, top, bits);
      std::set<Germ> uniq(germs.begin(), germs.end());
      CHECK(uniq.size() == static_cast<std::size_t>(d));
    }
    CHECK(check_npc(X).npc);
  }
}

TEST_CASE("npc detection") {
  auto torus = validate_complex(torus_raw());
  CHECK(check_npc(value(torus)).npc);

  auto three = validate_complex(three_square_raw());
  REQUIRE(ok(three));
  auto report = check_npc(value(three));
  CHECK(!report.npc);
  CHECK(report.kind == "empty_simplex");
  CHECK(report.germs.size() == 3);
  CHECK(report.replay(value(three)));

  // two squares sharing two adjacent edges at a corner
  RawComplex repeated;
  repeated.cubes = {{{}}, {{0, 0}, {0, 0}, {0, 0}}, {{1, 1, 0, 0}, {1, 2, 0, 0}}};
  auto rep = validate_complex(repeated);
  REQUIRE(ok(rep));
  auto rr = check_npc(value(rep));
  CHECK(!rr.npc);
  CHECK(rr.kind == "repeated_simplex");
  CHECK(rr.replay(value(rep)));

  // square whose four sides are one loop: corners repeat a germ
  RawComplex degen;
  degen.cubes = {{{}}, {{0, 0}}, {{0, 0, 0, 0}}};
  auto dg = validate_complex(degen);
  REQUIRE(ok(dg));
  auto dr = check_npc(value(dg));
  CHECK(!dr.npc);
  CHECK(dr.kind == "degenerate_corner");
  CHECK(dr.replay(value(dg)));
}

TEST_CASE("local isometries") {
  auto torus = validate_complex(torus_raw());
  const CubeComplex& T = value(torus);

  auto circ1 = validate_complex(circle_raw(1));
  const CubeComplex& C1 = value(circ1);
  auto inc = validate_map(C1, T, {{0}, {0}});
  REQUIRE(ok(inc));
  CHECK(check_local_isometry(value(inc)));

  // wedge of two loops onto one loop: germs collide
  RawComplex wedge;
  wedge.cubes = {{{}}, {{0, 0}, {0, 0}}};
  auto w = validate_complex(wedge);
  const CubeComplex& W = value(w);
  auto crush = validate_map(W, T, {{0}, {0, 0}});
  REQUIRE(ok(crush));
  CHECK(!check_local_isometry(value(crush)));

  // immersed circle spelling abab
  auto circ4 = validate_complex(circle_raw(4));
  const CubeComplex& C4 = value(circ4);
  auto imm = validate_map(C4, W, {{0, 0, 0, 0}, {0, 1, 0, 1}});
  REQUIRE(ok(imm));
  CHECK(check_local_isometry(value(imm)));

  // a local isometry restricted to one cube stays injective
  auto id = validate_map(T, T, {{0}, {0, 1}, {0}});
  REQUIRE(ok(id));
  CHECK(check_local_isometry(value(id)));

  auto bad = validate_map(C4, W, {{0, 0, 0, 0}, {0, 1, 0, 99}});
  CHECK(!ok(bad));
}

TEST_CASE("maps must commute with faces") {
  auto c2 = validate_complex(circle_raw(2));
  auto c4 = validate_complex(circle_raw(4));
  // edge 0 of the 4-circle runs 0->1 but images are vertex 0 twice
  auto f = validate_map(value(c4), value(c2), {{0, 0, 1, 1}, {0, 0, 1, 1}});
  REQUIRE(!ok(f));
  CHECK(error(f).kind == "InconsistentFaces");
}

TEST_CASE("json round trip is byte identical") {
  auto torus = validate_complex(torus_raw());
  const CubeComplex& T = value(torus);
  auto doc = complex_to_json(T);
  std::string once = canonical_json(doc);
  auto back = complex_from_json(nlohmann::json::parse(once));
  REQUIRE(ok(back));
  CHECK(canonical_json(complex_to_json(value(back))) == once);
  CHECK(value(back).raw().cubes == T.raw().cubes);

  auto noname = validate_complex(circle_raw(3));
  auto doc2 = complex_to_json(value(noname));
  CHECK(!doc2.contains("labels"));
  auto back2 = complex_from_json(doc2);
  REQUIRE(ok(back2));
  CHECK(canonical_json(complex_to_json(value(back2))) == canonical_json(doc2));

  CHECK(!ok(complex_from_json(nlohmann::json::parse("{\"dim\": 1}"))));
}
