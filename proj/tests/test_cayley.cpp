#include "cubsc/cayley.hpp"

#include <memory>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "cubsc/ball.hpp"
#include "cubsc/diagram.hpp"
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

const CubicalPresentation& hold(Result<CubicalPresentation> res) {
  static std::vector<std::unique_ptr<Result<CubicalPresentation>>> keep;
  keep.push_back(std::make_unique<Result<CubicalPresentation>>(std::move(res)));
  REQUIRE(ok(*keep.back()));
  return value(*keep.back());
}

const CubicalPresentation& plain(RawComplex raw) {
  return hold(assemble_presentation(std::move(raw), {}, {}, Frac(1, 144), false));
}

const CubicalPresentation& id_t2() {
  static const CubicalPresentation& P =
      hold(assemble_presentation(torus_raw(), {torus_raw()}, {{{0}, {0, 1}, {0}}}, Frac(1, 144),
                                 true));
  return P;
}

Word random_cyc_reduced(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> pick(0, 3);
  const int alpha[4] = {1, -1, 2, -2};
  Word w;
  while (static_cast<int>(w.size()) < n) {
    int c = alpha[pick(rng)];
    if (!w.empty() && c == -w.back()) continue;
    if (static_cast<int>(w.size()) == n - 1 && c == -w.front()) continue;
    w.push_back(c);
  }
  return w;
}

Word relator300() {
  std::mt19937 rng(93);
  return random_cyc_reduced(rng, 300);
}

const CubicalPresentation& classical300() {
  static const CubicalPresentation* P = nullptr;
  if (!P) {
    Word w = relator300();
    REQUIRE(classical_max_piece(w) <= 8);
    auto [Y, img] = circle_relator(w);
    P = &hold(assemble_presentation(wedge_raw(2), {Y}, {img}, Frac(1, 144), true));
  }
  return *P;
}

const CubicalPresentation& power_a5() {
  static const CubicalPresentation* P = nullptr;
  if (!P) {
    auto [Y, img] = circle_relator({1, 1, 1, 1, 1});
    P = &hold(assemble_presentation(wedge_raw(1), {Y}, {img}, Frac(1, 144), true));
  }
  return *P;
}

std::vector<std::string> kinds(const Reduction& r) {
  std::vector<std::string> out;
  for (const auto& s : r.steps) out.push_back(s.kind);
  return out;
}

}  // namespace

TEST_CASE("backtracks cancel") {
  auto res = dehn_reduce(classical300(), 0, {1, -1}, {});
  REQUIRE(ok(res));
  CHECK(value(res).output.empty());
  CHECK(kinds(value(res)) == std::vector<std::string>{"backtrack"});
  CHECK(value(res).exhausted);
}

TEST_CASE("long relator factor is replaced by the complement") {
  Word r = relator300();
  Word w(r.begin(), r.begin() + 151);
  auto res = dehn_reduce(classical300(), 0, w, {});
  REQUIRE(ok(res));
  Word expect = inverse_word(Word(r.begin() + 151, r.end()));
  CHECK(value(res).output == expect);
  REQUIRE(value(res).steps.size() == 1);
  const ReduceStep& st = value(res).steps[0];
  CHECK(st.kind == "shell");
  CHECK(st.pos == 0);
  CHECK(st.relator == 0);
  CHECK(st.cone_word == r);
  // geodesic already: reducing again changes nothing
  auto again = dehn_reduce(classical300(), 0, value(res).output, {});
  REQUIRE(ok(again));
  CHECK(value(again).output == value(res).output);
  CHECK(value(again).steps.empty());
}

TEST_CASE("half the relator is already geodesic") {
  Word r = relator300();
  Word w(r.begin(), r.begin() + 149);
  auto res = dehn_reduce(classical300(), 0, w, {});
  REQUIRE(ok(res));
  CHECK(value(res).output == w);
  CHECK(value(res).exhausted);
}

TEST_CASE("length never increases along random reductions") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> letter(0, 3);
  const int alpha[4] = {1, -1, 2, -2};
  for (int t = 0; t < 50; ++t) {
    Word w;
    for (int i = 0; i < 30; ++i) w.push_back(alpha[letter(rng)]);
    auto res = dehn_reduce(classical300(), 0, w, {});
    REQUIRE(ok(res));
    CHECK(value(res).output.size() <= w.size());
    auto again = dehn_reduce(classical300(), 0, value(res).output, {});
    REQUIRE(ok(again));
    CHECK(value(again).output == value(res).output);
  }
}

TEST_CASE("reduction is deterministic") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> letter(0, 3);
  const int alpha[4] = {1, -1, 2, -2};
  Word w;
  for (int i = 0; i < 24; ++i) w.push_back(alpha[letter(rng)]);
  auto a = dehn_reduce(classical300(), 0, w, {});
  auto b = dehn_reduce(classical300(), 0, w, {});
  REQUIRE(ok(a));
  REQUIRE(ok(b));
  CHECK(value(a).output == value(b).output);
  CHECK(kinds(value(a)) == kinds(value(b)));
}

TEST_CASE("paths must start in the base") {
  auto res = dehn_reduce(plain(circle_raw(5)), 0, {5}, {});
  REQUIRE(!ok(res));
  CHECK(error(res).kind == "NotInBase");
  auto fine = dehn_reduce(plain(circle_raw(5)), 0, {1, 2, -2, -1}, {});
  REQUIRE(ok(fine));
  CHECK(value(fine).output.empty());
}

TEST_CASE("step budget interrupts with the partial word") {
  ReduceBudget tight;
  tight.max_steps = 1;
  auto res = dehn_reduce(classical300(), 0, {1, -1, 2, -2}, tight);
  REQUIRE(!ok(res));
  CHECK(error(res).kind == "BudgetExceeded");
  CHECK(error(res).detail.find("partial") != std::string::npos);
}

TEST_CASE("relator word is null with a one-cone certificate") {
  Word r = relator300();
  NullHomotopy nh = is_null_homotopic(classical300(), 0, r, {});
  REQUIRE(nh.verdict == "yes");
  REQUIRE(nh.certificate.has_value());
  CHECK(nh.certificate->complexity() == std::pair<int, int>{1, 0});
  CHECK(nh.certificate->boundary_word() == r);
}

TEST_CASE("conjugated relator is null") {
  Word r = relator300();
  Word w{1, 2, 1};
  w.insert(w.end(), r.begin(), r.end());
  w.push_back(-1);
  w.push_back(-2);
  w.push_back(-1);
  NullHomotopy nh = is_null_homotopic(classical300(), 0, w, {});
  REQUIRE(nh.verdict == "yes");
  REQUIRE(nh.certificate.has_value());
  CHECK(nh.certificate->complexity() == std::pair<int, int>{1, 0});
  CHECK(nh.certificate->boundary_word() == w);
}

TEST_CASE("rotated relator needs a rotation step") {
  Word w = rotate_word(relator300(), 150);
  NullHomotopy nh = is_null_homotopic(classical300(), 0, w, {});
  REQUIRE(nh.verdict == "yes");
  CHECK(nh.certificate->complexity() == std::pair<int, int>{1, 0});
  CHECK(nh.certificate->boundary_word() == w);
}

TEST_CASE("short nontrivial words are rejected with a witness") {
  NullHomotopy nh = is_null_homotopic(classical300(), 0, {1, 2, -1, -2}, {});
  CHECK(nh.verdict == "no");
  CHECK(!nh.witness.empty());
  CHECK(!nh.certificate.has_value());
}

TEST_CASE("empty word is null") {
  NullHomotopy nh = is_null_homotopic(classical300(), 0, {}, {});
  REQUIRE(nh.verdict == "yes");
  CHECK(nh.certificate->complexity() == std::pair<int, int>{0, 0});
  CHECK(nh.certificate->boundary_word().empty());
}

TEST_CASE("open paths are not null") {
  NullHomotopy nh = is_null_homotopic(plain(circle_raw(5)), 0, {1, 2}, {});
  CHECK(nh.verdict == "no");
  CHECK(nh.witness == Word{1, 2});
}

TEST_CASE("circle loop generates infinite cyclic, never null") {
  NullHomotopy nh = is_null_homotopic(plain(circle_raw(5)), 0, {1, 2, 3, 4, 5}, {});
  CHECK(nh.verdict == "no");
}

TEST_CASE("commutator fills with one square when the base is a torus") {
  NullHomotopy nh = is_null_homotopic(plain(torus_raw()), 0, {1, 2, -1, -2}, {});
  REQUIRE(nh.verdict == "yes");
  REQUIRE(nh.certificate.has_value());
  CHECK(nh.certificate->complexity() == std::pair<int, int>{0, 1});
  CHECK(nh.certificate->boundary_word() == Word{1, 2, -1, -2});
}

TEST_CASE("doubled commutator fills with squares") {
  Word w{1, 2, -1, -2, 1, 2, -1, -2};
  NullHomotopy nh = is_null_homotopic(plain(torus_raw()), 0, w, {});
  REQUIRE(nh.verdict == "yes");
  CHECK(nh.certificate->complexity().first == 0);
  CHECK(nh.certificate->boundary_word() == w);
}

TEST_CASE("torus words off the diagonal are not null") {
  NullHomotopy nh = is_null_homotopic(plain(torus_raw()), 0, {1, 2}, {});
  CHECK(nh.verdict == "no");
  NullHomotopy nh2 = is_null_homotopic(plain(torus_raw()), 0, {1, 2, 1, -2}, {});
  CHECK(nh2.verdict == "no");
}

TEST_CASE("identity relator cones off every loop") {
  NullHomotopy nh = is_null_homotopic(id_t2(), 0, {1, 2, -1, -2}, {});
  REQUIRE(nh.verdict == "yes");
  CHECK(nh.certificate->complexity() == std::pair<int, int>{1, 0});
  NullHomotopy single = is_null_homotopic(id_t2(), 0, {1}, {});
  REQUIRE(single.verdict == "yes");
  CHECK(single.certificate->complexity() == std::pair<int, int>{1, 0});
  CHECK(single.certificate->boundary_word() == Word{1});
}

TEST_CASE("verdicts agree with the diagram search on short words") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_int_distribution<int> len(2, 12);
  const int alpha[4] = {1, -1, 2, -2};
  DiagramBudget oracle;
  oracle.max_cones = 1;
  oracle.max_squares = 0;
  oracle.max_length = 310;
  oracle.max_states = 2000000;
  int yes = 0, no = 0;
  for (int t = 0; t < 40; ++t) {
    Word w;
    int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(alpha[letter(rng)]);
    NullHomotopy nh = is_null_homotopic(classical300(), 0, w, {});
    auto d = find_diagram(classical300(), 0, w, oracle);
    if (ok(d)) {
      CHECK(nh.verdict == "yes");
      ++yes;
    } else {
      CHECK(nh.verdict == "no");
      ++no;
    }
  }
  CHECK(yes > 0);
  CHECK(no > 0);
}

TEST_CASE("unknown verdict under a starved budget") {
  ReduceBudget starved;
  starved.max_steps = 0;
  NullHomotopy nh = is_null_homotopic(classical300(), 0, {1, -1}, starved);
  CHECK(nh.verdict == "unknown");
}

TEST_CASE("ball without relators matches the development") {
  const CubicalPresentation& P = plain(torus_raw());
  auto res = cayley_ball(P, 0, 2, {});
  REQUIRE(ok(res));
  const CayleyBall& B = value(res);
  auto dev = develop_ball(P.complex(), 0, 2);
  REQUIRE(ok(dev));
  CHECK(canonical_json(complex_to_json(B.complex())) ==
        canonical_json(complex_to_json(value(dev).complex())));
  CHECK(B.folds().empty());
  CHECK(B.relator_copies().empty());
  CHECK(B.basepoint() == 0);
  CHECK(B.radius() == 2);
  for (std::size_t v = 0; v < B.complex().vertex_count(); ++v)
    CHECK(B.developed_class(static_cast<int>(v)) == static_cast<int>(v));
}

TEST_CASE("free ball of the classical presentation stays a tree") {
  auto res = cayley_ball(classical300(), 0, 4, {});
  REQUIRE(ok(res));
  const CayleyBall& B = value(res);
  CHECK(B.complex().vertex_count() == 161);
  CHECK(B.complex().edge_count() == 160);
  CHECK(B.folds().empty());
  CHECK(B.relator_copies().empty());
}

TEST_CASE("power relator folds the line into a cycle") {
  auto res = cayley_ball(power_a5(), 0, 3, {});
  REQUIRE(ok(res));
  const CayleyBall& B = value(res);
  CHECK(B.complex().vertex_count() == 5);
  CHECK(B.complex().edge_count() == 5);
  CHECK(!B.folds().empty());
  bool has_reduction = false;
  for (const FoldRecord& f : B.folds())
    if (f.kind == "reduction") {
      has_reduction = true;
      CHECK(!f.witness.empty());
      NullHomotopy nh = is_null_homotopic(power_a5(), 0, f.witness, {});
      CHECK(nh.verdict == "yes");
    }
  CHECK(has_reduction);
  // every vertex of the quotient reads degree 2
  std::vector<int> deg(5, 0);
  for (std::size_t e = 0; e < B.complex().edge_count(); ++e) {
    deg[B.complex().endpoint(static_cast<int>(e), 0)]++;
    deg[B.complex().endpoint(static_cast<int>(e), 1)]++;
  }
  for (int d : deg) CHECK(d == 2);
  REQUIRE(B.relator_copies().size() == 1);
  const RelatorCopy& c = B.relator_copies()[0];
  CHECK(c.relator == 0);
  CHECK(c.vertices.size() == 5);
  CHECK(c.edges.size() == 5);
  // covering data and developed classes stay consistent
  for (std::size_t e = 0; e < B.complex().edge_count(); ++e)
    CHECK(B.image(1, static_cast<int>(e)) == 0);
  CHECK(B.developed_class(0) == 0);
}

TEST_CASE("candidate pair budget trips") {
  ReduceBudget tiny;
  tiny.max_pairs = 10;
  auto res = cayley_ball(classical300(), 0, 4, tiny);
  REQUIRE(!ok(res));
  CHECK(error(res).kind == "BudgetExceeded");
}

TEST_CASE("undecided pairs are reported, not folded") {
  ReduceBudget starved;
  starved.max_steps = 0;
  auto res = cayley_ball(power_a5(), 0, 3, starved);
  REQUIRE(!ok(res));
  CHECK(error(res).kind == "BudgetExceeded");
  CHECK(error(res).detail.find("unfolded") != std::string::npos);
}

TEST_CASE("ball paths reduce through their base image") {
  const CubicalPresentation& P = plain(torus_raw());
  auto res = cayley_ball(P, 0, 2, {});
  REQUIRE(ok(res));
  const CayleyBall& B = value(res);
  Germ g = B.complex().germs_at(0)[0];
  int letter = g.end == 0 ? g.edge + 1 : -(g.edge + 1);
  auto red = dehn_reduce(P, B, 0, {letter, -letter}, {});
  REQUIRE(ok(red));
  CHECK(value(red).output.empty());
  auto bad = dehn_reduce(P, B, 0, {1000}, {});
  REQUIRE(!ok(bad));
  CHECK(error(bad).kind == "NotInBase");
}

TEST_CASE("ball serialization carries the covering and the folds") {
  auto res = cayley_ball(power_a5(), 0, 3, {});
  REQUIRE(ok(res));
  nlohmann::json j = cayley_ball_to_json(value(res));
  CHECK(j["radius"] == 3);
  CHECK(j["basepoint"] == 0);
  CHECK(j["complex"].contains("cubes"));
  CHECK(j["covering"].size() == 2);
  CHECK(!j["folds"].empty());
  CHECK(j["relator_copies"].size() == 1);
}
