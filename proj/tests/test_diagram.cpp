#include "cubsc/diagram.hpp"

#include <algorithm>
#include <memory>

#include <doctest.h>

#include "cubsc/json_io.hpp"

using namespace cubsc;

namespace {

RawComplex wedge_raw(int k) {
  RawComplex raw;
  raw.cubes.resize(2);
  raw.cubes[0].push_back({});
  for (int i = 0; i < k; ++i) raw.cubes[1].push_back({0, 0});
  return raw;
}

RawComplex torus_raw() {
  RawComplex raw;
  raw.cubes = {{{}}, {{0, 0}, {0, 0}}, {{1, 1, 0, 0}}};
  return raw;
}

RawComplex torus_loop_raw() {
  RawComplex raw;
  raw.cubes = {{{}}, {{0, 0}, {0, 0}, {0, 0}}, {{1, 1, 0, 0}}};
  return raw;
}

// one vertex, three loops, three squares, one 3-cube
RawComplex three_torus_raw() {
  RawComplex raw;
  raw.cubes = {{{}},
               {{0, 0}, {0, 0}, {0, 0}},
               {{1, 1, 0, 0}, {2, 2, 0, 0}, {2, 2, 1, 1}},
               {{2, 2, 1, 1, 0, 0}}};
  return raw;
}

RawComplex three_torus_no_cube_raw() {
  RawComplex raw = three_torus_raw();
  raw.cubes.resize(3);
  return raw;
}

RawComplex circle_raw(int n) {
  RawComplex raw;
  raw.cubes.resize(2);
  for (int i = 0; i < n; ++i) raw.cubes[0].push_back({});
  for (int i = 0; i < n; ++i) raw.cubes[1].push_back({i, (i + 1) % n});
  return raw;
}

std::pair<RawComplex, std::vector<std::vector<int>>> circle_relator(const Word& w) {
  int n = static_cast<int>(w.size());
  RawComplex Y;
  Y.cubes.resize(2);
  Y.cubes[0].assign(n, {});
  std::vector<int> vimg(n, 0), eimg(n);
  for (int k = 0; k < n; ++k) {
    int nxt = (k + 1) % n;
    if (w[k] > 0) {
      Y.cubes[1].push_back({k, nxt});
      eimg[k] = w[k] - 1;
    } else {
      Y.cubes[1].push_back({nxt, k});
      eimg[k] = -w[k] - 1;
    }
  }
  return {Y, {vimg, eimg}};
}

Word recipe_word(int m) {
  Word w;
  for (int k = 0; k < m; ++k) w.push_back(k % 2 == 0 ? 1 : 2);
  Word half;
  for (int k = 0; k < m; ++k) half.push_back(k % 2 == 0 ? 2 : 1);
  Word inv = inverse_word(half);
  w.insert(w.end(), inv.begin(), inv.end());
  return w;
}

const CubeComplex& built(const RawComplex& raw) {
  static std::vector<std::unique_ptr<CubeComplex>> keep;
  auto res = validate_complex(raw);
  REQUIRE(ok(res));
  keep.push_back(std::make_unique<CubeComplex>(std::move(value(res))));
  return *keep.back();
}

// presentation with no relators over the given base
const CubicalPresentation& plain(RawComplex raw) {
  static std::vector<std::unique_ptr<Result<CubicalPresentation>>> keep;
  keep.push_back(std::make_unique<Result<CubicalPresentation>>(
      assemble_presentation(std::move(raw), {}, {}, Frac(1, 144), false)));
  REQUIRE(ok(*keep.back()));
  return value(*keep.back());
}

const CubicalPresentation& hold(Result<CubicalPresentation> res) {
  static std::vector<std::unique_ptr<Result<CubicalPresentation>>> keep;
  keep.push_back(std::make_unique<Result<CubicalPresentation>>(std::move(res)));
  REQUIRE(ok(*keep.back()));
  return value(*keep.back());
}

// three squares around an interior vertex, one per pair of axes of a 3-cube
// corner; boundary reads c a^-1 b c^-1 a b^-1 from the first outer edge
RawDiagram hexagon_raw() {
  RawDiagram raw;
  raw.vertices = 7;
  raw.vertex_image.assign(7, 0);
  raw.edge_ends = {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {2, 5}, {3, 5}, {3, 6}, {1, 6}};
  raw.edge_image = {0, 1, 2, 1, 0, 2, 1, 0, 2};
  raw.cells = {{"square", 0, {1, 4, -5, -2}},
               {"square", 2, {2, 6, -7, -3}},
               {"square", 1, {3, 8, -9, -1}}};
  raw.outer = {9, -8, 7, -6, 5, -4};
  return raw;
}

// a square and a cone-cell sharing the two sides of an interior corner
RawDiagram corner_raw() {
  RawDiagram raw;
  raw.vertices = 5;
  raw.vertex_image.assign(5, 0);
  raw.edge_ends = {{0, 1}, {1, 2}, {3, 2}, {0, 3}, {0, 4}, {4, 2}};
  raw.edge_image = {0, 1, 0, 1, 1, 0};
  raw.cells = {{"square", 0, {1, 2, -3, -4}}, {"cone", 0, {-2, -1, 5, 6}}};
  raw.outer = {4, 3, -6, -5};
  return raw;
}

// two mirror-image squares glued along one edge
RawDiagram mirror_raw() {
  RawDiagram raw;
  raw.vertices = 6;
  raw.vertex_image.assign(6, 0);
  raw.edge_ends = {{0, 1}, {1, 2}, {3, 2}, {0, 3}, {4, 1}, {4, 5}, {5, 2}};
  raw.edge_image = {0, 1, 0, 1, 0, 1, 0};
  raw.cells = {{"square", 0, {1, 2, -3, -4}}, {"square", 0, {-2, -5, 6, 7}}};
  raw.outer = {-1, 4, 3, -7, -6, 5};
  return raw;
}

int interior_vertex(const DiscDiagram& D) {
  for (int v = 0; v < D.vertex_count(); ++v)
    if (D.boundary_passes(v) == 0) return v;
  return -1;
}

}  // namespace

TEST_CASE("a square boundary fills with one square") {
  const CubicalPresentation& P = plain(torus_raw());
  Word w{1, 2, -1, -2};
  auto res = find_diagram(P, 0, w, DiagramBudget{});
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{0, 1});
  CHECK(D.boundary_word() == w);
  CHECK(D.cell(0).kind == "square");
  CHECK(D.cell(0).image == 0);
  CHECK(D.vertex_count() == 4);
  CHECK(D.edge_count() == 4);

  // relabeling vertices or rotating a stored cell cycle leaves the
  // serialization untouched
  std::string bytes = canonical_json(diagram_to_json(D));
  RawDiagram perm = D.raw();
  for (auto& [a, b] : perm.edge_ends) {
    a = (a + 1) % 4;
    b = (b + 1) % 4;
  }
  auto res2 = validate_diagram(perm, P.complex(), &P);
  REQUIRE(ok(res2));
  CHECK(canonical_json(diagram_to_json(value(res2))) == bytes);

  RawDiagram rot = D.raw();
  std::rotate(rot.cells[0].boundary.begin(), rot.cells[0].boundary.begin() + 1,
              rot.cells[0].boundary.end());
  auto res3 = validate_diagram(rot, P.complex(), &P);
  REQUIRE(ok(res3));
  CHECK(canonical_json(diagram_to_json(value(res3))) == bytes);
}

TEST_CASE("a relator boundary fills with one cone-cell") {
  auto [Y, img] = circle_relator(recipe_word(3));
  const CubicalPresentation& P =
      hold(assemble_presentation(wedge_raw(2), {Y}, {img}, Frac(1, 144), true));
  const Word& w = P.relator_word(0);
  auto res = find_diagram(P, 0, w, DiagramBudget{});
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{1, 0});
  CHECK(D.cell_count() == 1);
  CHECK(D.cell(0).kind == "cone");
  CHECK(D.cell(0).image == 0);
  CHECK(D.boundary_word() == w);
}

TEST_CASE("a commutator over a torus needs a two-by-two grid") {
  const CubicalPresentation& P = plain(torus_raw());
  Word w{1, 1, 2, 2, -1, -1, -2, -2};
  DiagramBudget b;
  b.max_cones = 0;
  b.max_squares = 6;
  b.max_length = 12;
  auto res = find_diagram(P, 0, w, b);
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{0, 4});
  CHECK(D.boundary_word() == w);
  for (int f = 0; f < D.cell_count(); ++f) CHECK(D.cell(f).kind == "square");

  int center = interior_vertex(D);
  REQUIRE(center >= 0);
  CHECK(D.darts_at(center).size() == 4);
  auto hex = hexagon_move(D, center);
  REQUIRE(!ok(hex));
  CHECK(error(hex).kind == "NoSite");
  auto hexb = hexagon_move(D, D.origin(D.boundary_darts()[0]));
  REQUIRE(!ok(hexb));
  CHECK(error(hexb).kind == "NoSite");

  CHECK(!cancel_square_pair(D).has_value());
  DiscDiagram r = reduce(D, b);
  CHECK(canonical_json(diagram_to_json(r)) == canonical_json(diagram_to_json(D)));
}

TEST_CASE("backtracking boundaries fold flat") {
  const CubicalPresentation& P = plain(circle_raw(2));
  auto res = find_diagram(P, 0, Word{1, -1}, DiagramBudget{});
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{0, 0});
  CHECK(D.edge_count() == 1);
  CHECK(D.vertex_count() == 2);
  CHECK(D.boundary_word() == Word{1, -1});

  auto open = find_diagram(P, 0, Word{1}, DiagramBudget{});
  REQUIRE(!ok(open));
  CHECK(error(open).kind == "NotClosed");

  DiagramBudget tight;
  tight.max_cones = 0;
  tight.max_squares = 1;
  auto loop = find_diagram(P, 0, Word{1, 2}, tight);
  REQUIRE(!ok(loop));
  CHECK(error(loop).kind == "BudgetExceeded");
}

TEST_CASE("hexagon moves flip a cube corner both ways") {
  const CubicalPresentation& P = plain(three_torus_raw());
  auto hand = validate_diagram(hexagon_raw(), P.complex(), &P);
  REQUIRE(ok(hand));
  CHECK(value(hand).boundary_word() == Word{3, -1, 2, -3, 1, -2});

  auto res = find_diagram(P, 0, Word{3, -1, 2, -3, 1, -2}, DiagramBudget{});
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{0, 3});
  int center = interior_vertex(D);
  REQUIRE(center >= 0);

  auto moved = hexagon_move(D, center);
  REQUIRE(ok(moved));
  const DiscDiagram& H = value(moved);
  CHECK(H.complexity() == std::pair<int, int>{0, 3});
  CHECK(H.boundary_word() == D.boundary_word());
  CHECK(canonical_json(diagram_to_json(H)) != canonical_json(diagram_to_json(D)));

  int center2 = interior_vertex(H);
  REQUIRE(center2 >= 0);
  auto back = hexagon_move(H, center2);
  REQUIRE(ok(back));
  CHECK(canonical_json(diagram_to_json(value(back))) == canonical_json(diagram_to_json(D)));

  // same squares over a base without the 3-cube: the site exists, the cube
  // does not
  const CubeComplex& nc = built(three_torus_no_cube_raw());
  auto flat = validate_diagram(hexagon_raw(), nc, nullptr);
  REQUIRE(ok(flat));
  auto stuck = hexagon_move(value(flat), 0);
  REQUIRE(!ok(stuck));
  CHECK(error(stuck).kind == "NoCube");
}

TEST_CASE("a cone-cell absorbs a square across a shared corner") {
  const CubicalPresentation& P = hold(
      assemble_presentation(torus_raw(), {torus_raw()}, {{{0}, {0, 1}, {0}}}, Frac(1, 144), true));
  auto res = validate_diagram(corner_raw(), P.complex(), &P);
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{1, 1});

  auto wrong = absorb_square(D, 0, 1);
  REQUIRE(!ok(wrong));
  CHECK(error(wrong).kind == "NotAbsorbable");

  auto merged = absorb_square(D, 1, 0);
  REQUIRE(ok(merged));
  const DiscDiagram& M = value(merged);
  CHECK(M.complexity() == std::pair<int, int>{1, 0});
  CHECK(M.boundary_word() == D.boundary_word());

  DiscDiagram r = reduce(D, DiagramBudget{});
  CHECK(r.complexity() == std::pair<int, int>{1, 0});
  CHECK(canonical_json(diagram_to_json(r)) == canonical_json(diagram_to_json(M)));
}

TEST_CASE("mirror squares cancel") {
  const CubicalPresentation& P = plain(torus_raw());
  auto res = validate_diagram(mirror_raw(), P.complex(), nullptr);
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{0, 2});

  auto cancelled = cancel_square_pair(D);
  REQUIRE(cancelled.has_value());
  CHECK(cancelled->complexity() == std::pair<int, int>{0, 0});
  CHECK(cancelled->boundary_word() == D.boundary_word());

  DiscDiagram r = reduce(D, DiagramBudget{});
  CHECK(r.complexity() == std::pair<int, int>{0, 0});
}

TEST_CASE("a cone and a square pinched at a vertex stay put") {
  auto [Y, img] = circle_relator(Word{3, 3, 3});
  const CubicalPresentation& P =
      hold(assemble_presentation(torus_loop_raw(), {Y}, {img}, Frac(1, 144), true));
  Word w{3, 3, 3, 1, 2, -1, -2};
  DiagramBudget b;
  b.max_cones = 2;
  b.max_squares = 4;
  b.max_length = 16;
  auto res = find_diagram(P, 0, w, b);
  REQUIRE(ok(res));
  const DiscDiagram& D = value(res);
  CHECK(D.complexity() == std::pair<int, int>{1, 1});
  CHECK(D.boundary_word() == w);

  int cone = -1, square = -1;
  for (int f = 0; f < D.cell_count(); ++f)
    (D.cell(f).kind == "cone" ? cone : square) = f;
  REQUIRE(cone >= 0);
  REQUIRE(square >= 0);
  auto no = absorb_square(D, cone, square);
  REQUIRE(!ok(no));
  CHECK(error(no).kind == "NotAbsorbable");
  CHECK(!cancel_square_pair(D).has_value());
  DiscDiagram r = reduce(D, b);
  CHECK(r.complexity() == std::pair<int, int>{1, 1});
}

TEST_CASE("malformed diagrams are rejected") {
  const CubicalPresentation& P = plain(torus_raw());
  auto res = find_diagram(P, 0, Word{1, 2, -1, -2}, DiagramBudget{});
  REQUIRE(ok(res));
  const RawDiagram base = value(res).raw();

  RawDiagram a = base;
  std::reverse(a.outer.begin(), a.outer.end());
  auto ra = validate_diagram(a, P.complex(), &P);
  REQUIRE(!ok(ra));
  CHECK(error(ra).kind == "BadDiagram");

  RawDiagram b = base;
  b.cells.clear();
  auto rb = validate_diagram(b, P.complex(), &P);
  REQUIRE(!ok(rb));
  CHECK(error(rb).kind == "BadDiagram");

  RawDiagram c = base;
  c.vertex_image[0] = 7;
  auto rc = validate_diagram(c, P.complex(), &P);
  REQUIRE(!ok(rc));
  CHECK(error(rc).kind == "NotInBase");

  RawDiagram d = base;
  d.cells[0].kind = "blob";
  auto rd = validate_diagram(d, P.complex(), &P);
  REQUIRE(!ok(rd));
  CHECK(error(rd).kind == "BadCell");

  RawDiagram e = base;
  e.cells[0].kind = "cone";
  e.cells[0].image = 0;
  auto re = validate_diagram(e, P.complex(), nullptr);
  REQUIRE(!ok(re));
  CHECK(error(re).kind == "BadCell");
}
