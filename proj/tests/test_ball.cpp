#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cubsc/ball.hpp"
#include "cubsc/json_io.hpp"
#include "cubsc/words.hpp"
#include "doctest.h"

using namespace cubsc;

namespace {

RawComplex torus_raw() {
  RawComplex r;
  r.cubes = {{{}}, {{0, 0}, {0, 0}}, {{1, 1, 0, 0}}};
  return r;
}

RawComplex wedge2_raw() {
  RawComplex r;
  r.cubes = {{{}}, {{0, 0}, {0, 0}}};
  return r;
}

RawComplex t3_raw() {
  RawComplex r;
  r.cubes = {{{}},
             {{0, 0}, {0, 0}, {0, 0}},
             {{1, 1, 0, 0}, {2, 2, 0, 0}, {2, 2, 1, 1}},
             {{2, 2, 1, 1, 0, 0}}};
  return r;
}

RawComplex circle_raw(int n) {
  RawComplex r;
  r.cubes.resize(2);
  for (int i = 0; i < n; ++i) {
    r.cubes[0].push_back({});
    r.cubes[1].push_back({i, (i + 1) % n});
  }
  return r;
}

// balls keep a pointer to their base, so test bases live forever
const CubeComplex& built(const RawComplex& raw) {
  static std::vector<std::unique_ptr<CubeComplex>> keep;
  auto r = validate_complex(raw);
  REQUIRE(ok(r));
  keep.push_back(std::make_unique<CubeComplex>(std::move(value(r))));
  return *keep.back();
}

DevelopedBall ball_of(const RawComplex& raw, int R) {
  auto b = develop_ball(built(raw), 0, R);
  REQUIRE(ok(b));
  return value(b);
}

// follow a base word from the lifted basepoint
int walk(const DevelopedBall& B, const std::string& s) {
  int v = B.lifted_basepoint();
  const Word w = *word_from_string(s);
  for (int letter : w) {
    Germ g{std::abs(letter) - 1, letter > 0 ? 0 : 1};
    auto lifted = B.lift_germ(v, g);
    REQUIRE(lifted.has_value());
    v = B.across(v, *lifted);
  }
  return v;
}

}  // namespace

TEST_CASE("torus ball census matches the grid") {
  auto B = ball_of(torus_raw(), 2);
  CHECK(B.complex().vertex_count() == 13);
  CHECK(B.complex().size(1) == 16);
  CHECK(B.complex().size(2) == 4);
  CHECK(B.hyperplanes().size() == 8);
  int interior = 0;
  for (std::size_t v = 0; v < B.complex().vertex_count(); ++v)
    if (B.interior(static_cast<int>(v))) ++interior;
  CHECK(interior == 5);

  auto B3 = ball_of(torus_raw(), 3);
  CHECK(B3.complex().vertex_count() == 25);
  CHECK(B3.complex().size(1) == 36);
  CHECK(B3.complex().size(2) == 12);
}

TEST_CASE("ball of a wedge of circles is a tree") {
  auto B = ball_of(wedge2_raw(), 2);
  CHECK(B.complex().vertex_count() == 17);
  CHECK(B.complex().size(1) == 16);
  CHECK(B.hyperplanes().size() == 16);

  auto B0 = ball_of(torus_raw(), 0);
  CHECK(B0.complex().vertex_count() == 1);
  CHECK(B0.complex().size(1) == 0);
}

TEST_CASE("three-cube balls export solid cubes") {
  auto B = ball_of(t3_raw(), 2);
  CHECK(B.complex().vertex_count() == 25);
  CHECK(B.complex().size(1) == 36);
  CHECK(B.complex().size(2) == 12);
  CHECK(B.complex().size(3) == 0);

  auto B3 = ball_of(t3_raw(), 3);
  CHECK(B3.complex().vertex_count() == 63);
  CHECK(B3.complex().size(3) == 8);
}

TEST_CASE("development refuses non-npc bases") {
  RawComplex bad;
  bad.cubes = {{{}},
               {{0, 0}, {0, 0}, {0, 0}},
               {{1, 1, 0, 0}, {2, 2, 1, 1}, {2, 2, 0, 0}}};
  auto r = develop_ball(built(bad), 0, 2);
  REQUIRE(!ok(r));
  CHECK(error(r).kind == "NotNpc");
}

TEST_CASE("names are lex-least path words") {
  auto B = ball_of(torus_raw(), 2);
  CHECK(B.vertex_name(0) == "");
  std::set<std::string> level1;
  for (const Germ& g : B.complex().germs_at(0))
    level1.insert(B.vertex_name(B.across(0, g)));
  CHECK(level1 == std::set<std::string>{"a", "A", "b", "B"});
  CHECK(B.vertex_name(walk(B, "ba")) == "ab");
  CHECK(B.vertex_name(walk(B, "BA")) == "AB");
}

TEST_CASE("covering data commutes with the base") {
  for (auto raw : {torus_raw(), t3_raw()}) {
    auto B = ball_of(raw, 2);
    const CubeComplex& C = B.complex();
    const CubeComplex& X = B.base();
    for (std::size_t e = 0; e < C.size(1); ++e) {
      for (int end = 0; end < 2; ++end) {
        int v = C.endpoint(static_cast<int>(e), end);
        CHECK(B.image(0, v) == X.endpoint(B.image(1, static_cast<int>(e)), end));
        auto g = B.lift_germ(v, Germ{B.image(1, static_cast<int>(e)), end});
        REQUIRE(g.has_value());
        CHECK(g->edge == static_cast<int>(e));
        CHECK(g->end == end);
      }
    }
    for (std::size_t sq = 0; sq < C.size(2); ++sq)
      for (int i = 0; i < 4; ++i)
        CHECK(B.image(1, C.faces(2, static_cast<int>(sq))[i]) ==
              X.faces(2, B.image(2, static_cast<int>(sq)))[i]);
  }
}

TEST_CASE("development is deterministic") {
  auto a = ball_of(torus_raw(), 3);
  auto b = ball_of(torus_raw(), 3);
  CHECK(canonical_json(complex_to_json(a.complex())) ==
        canonical_json(complex_to_json(b.complex())));
}

TEST_CASE("distance equals separating hyperplane count") {
  for (auto raw : {torus_raw(), wedge2_raw()}) {
    auto B = ball_of(raw, 3);
    for (std::size_t x = 0; x < B.complex().vertex_count(); ++x) {
      if (!B.interior(static_cast<int>(x))) continue;
      auto d = B.bfs_dist(static_cast<int>(x));
      for (std::size_t y = x + 1; y < B.complex().vertex_count(); ++y) {
        if (!B.interior(static_cast<int>(y))) continue;
        auto hs = B.separating_hyperplanes(static_cast<int>(x), static_cast<int>(y));
        REQUIRE(ok(hs));
        CHECK(static_cast<int>(value(hs).size()) == d[y]);
      }
    }
  }
}

TEST_CASE("geodesics replay to their endpoints") {
  auto B = ball_of(torus_raw(), 4);
  int x = walk(B, "AAb");
  int y = walk(B, "aab");
  auto path = B.geodesic(x, y);
  REQUIRE(ok(path));
  CHECK(value(path).size() == 4);
  int at = x;
  for (int letter : value(path)) {
    int e = std::abs(letter) - 1;
    at = B.complex().endpoint(e, letter > 0 ? 1 : 0);
  }
  CHECK(at == y);
  auto bad = B.geodesic(walk(B, "aaaa"), 0);
  CHECK(!ok(bad));
}

TEST_CASE("medians follow grid coordinates") {
  auto B = ball_of(torus_raw(), 4);
  CHECK(value(B.median(walk(B, "a"), walk(B, "b"), walk(B, "ab"))) == walk(B, "ab"));
  CHECK(value(B.median(0, walk(B, "aab"), walk(B, "b"))) == walk(B, "b"));
  CHECK(value(B.median(0, walk(B, "a"), walk(B, "b"))) == 0);
  auto tree = ball_of(wedge2_raw(), 3);
  CHECK(value(tree.median(walk(tree, "ab"), walk(tree, "aB"), 0)) == walk(tree, "a"));
}

TEST_CASE("hulls close intervals and report truncation") {
  auto B = ball_of(torus_raw(), 4);
  auto hull = B.convex_hull({0, walk(B, "aab")});
  REQUIRE(ok(hull));
  CHECK(value(hull).vertices.size() == 6);
  CHECK(value(hull).edges.size() == 7);
  CHECK(value(hull).cubes.size() == 2);

  auto single = B.convex_hull({walk(B, "ab")});
  CHECK(value(single).vertices.size() == 1);

  auto truncated = B.convex_hull({walk(B, "aa"), walk(B, "bb")});
  REQUIRE(!ok(truncated));
  CHECK(error(truncated).kind == "HullTruncated");

  auto out = B.convex_hull({walk(B, "aaaa"), 0});
  REQUIRE(!ok(out));
  CHECK(error(out).kind == "OutOfBall");
}

TEST_CASE("gates project onto convex subcomplexes") {
  auto B = ball_of(torus_raw(), 4);
  auto axis = value(B.convex_hull({0, walk(B, "bb")}));
  CHECK(value(B.gate(axis, walk(B, "aab"))) == walk(B, "b"));
  CHECK(value(B.gate(axis, walk(B, "b"))) == walk(B, "b"));
  SubComplex corners;
  corners.vertices = {0, walk(B, "ab")};
  CHECK_THROWS_AS((void)B.gate(corners, walk(B, "aa")), std::invalid_argument);
}

TEST_CASE("hyperplane carriers are closed cube unions") {
  auto B = ball_of(torus_raw(), 2);
  bool found = false;
  for (const auto& h : B.hyperplanes()) {
    if (h.dual_edges.size() == 3) {
      found = true;
      CHECK(h.carrier.cubes.size() == 2);
      CHECK(h.carrier.edges.size() == 7);
      CHECK(h.carrier.vertices.size() == 6);
    }
  }
  CHECK(found);
}

TEST_CASE("elevations enumerate lines once each") {
  const CubeComplex& X = built(wedge2_raw());
  const CubeComplex& circle2 = built(circle_raw(2));
  CubicalMap f{&circle2, &X, {{0, 0}, {0, 0}}};
  REQUIRE(check_local_isometry(f));
  auto B = ball_of(wedge2_raw(), 4);
  auto els = elevations(f, B, 1);
  CHECK(els.size() == 3);
  std::size_t through_base = 0;
  for (const auto& el : els) {
    for (auto [ye, be] : el.edges) CHECK(B.image(1, be) == 0);
    if (el.image.has_vertex(0)) {
      ++through_base;
      CHECK(el.image.vertices.size() == 9);
      CHECK(el.image.edges.size() == 8);
    }
  }
  CHECK(through_base == 1);
}

TEST_CASE("identity elevations cover the ball") {
  const CubeComplex& X = built(torus_raw());
  CubicalMap id{&X, &X, {{0}, {0, 1}, {0}}};
  REQUIRE(check_local_isometry(id));
  auto B = ball_of(torus_raw(), 2);
  auto els = elevations(id, B, 0);
  REQUIRE(els.size() == 1);
  CHECK(els[0].image.vertices.size() == 13);
  CHECK(els[0].image.cubes.size() == 4);
}

TEST_CASE("wall projection keeps shared-wall edges") {
  auto B = ball_of(torus_raw(), 4);
  auto U = value(B.convex_hull({0, walk(B, "aa")}));
  auto V = value(B.convex_hull({walk(B, "b"), walk(B, "aab")}));
  auto P = proj(B, U, V);
  CHECK(P.vertices == V.vertices);
  CHECK(P.edges == V.edges);

  auto W = value(B.convex_hull({walk(B, "b"), walk(B, "bb")}));
  auto Q = proj(B, U, W);
  CHECK(Q.vertices == W.vertices);
  CHECK(Q.edges.empty());
  CHECK(intrinsic_diameter(B, Q) == 0);
  CHECK(intrinsic_diameter(B, P) == 2);
  CHECK(components(B, Q).size() == 2);
  CHECK(components(B, P).size() == 1);

  auto self = proj(B, U, U);
  CHECK(self.vertices == U.vertices);
  CHECK(self.edges == U.edges);
}

TEST_CASE("subdivision squares every cube") {
  auto sq = built(standard_cube(2));
  auto sub = subdivide(sq);
  CHECK(sub.vertex_count() == 9);
  CHECK(sub.size(1) == 12);
  CHECK(sub.size(2) == 4);
  CHECK(check_npc(sub).npc);

  auto t2 = subdivide(built(torus_raw()));
  CHECK(t2.vertex_count() == 4);
  CHECK(t2.size(1) == 8);
  CHECK(t2.size(2) == 4);
  CHECK(check_npc(t2).npc);

  auto loop = subdivide(built(circle_raw(1)));
  CHECK(loop.vertex_count() == 2);
  CHECK(loop.size(1) == 2);

  auto cube = subdivide(built(standard_cube(3)));
  CHECK(cube.vertex_count() == 27);
  CHECK(cube.size(3) == 8);
  CHECK(check_npc(cube).npc);
}
