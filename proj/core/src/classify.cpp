#include "cubsc/classify.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

#include "cubsc/rectify.hpp"

namespace cubsc {

namespace {

int germ_letter(const Germ& g) { return g.end == 0 ? g.edge + 1 : -(g.edge + 1); }
int germ_target(const CubeComplex& C, const Germ& g) { return C.endpoint(g.edge, 1 - g.end); }

std::vector<int> graph_dist(const CubeComplex& C, int from) {
  std::vector<int> dist(C.vertex_count(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (const Germ& g : C.germs_at(v)) {
      int t = germ_target(C, g);
      if (dist[t] < 0) {
        dist[t] = dist[v] + 1;
        q.push(t);
      }
    }
  }
  return dist;
}

/// Geodesics from s to the BFS source of `dist`, germ-order lexicographic,
/// at most `cap`; the first one is the reference representative of its class.
std::vector<Word> enum_geodesics(const CubeComplex& C, int s, const std::vector<int>& dist,
                                 int cap) {
  std::vector<Word> out;
  if (cap <= 0 || s < 0 || dist[s] < 0) return out;
  Word cur;
  auto rec = [&](auto&& self, int v) -> bool {
    if (dist[v] == 0) {
      out.push_back(cur);
      return static_cast<int>(out.size()) >= cap;
    }
    for (const Germ& g : C.germs_at(v)) {
      int t = germ_target(C, g);
      if (dist[t] != dist[v] - 1) continue;
      cur.push_back(germ_letter(g));
      bool full = self(self, t);
      cur.pop_back();
      if (full) return true;
    }
    return false;
  };
  rec(rec, s);
  return out;
}

template <class TBall>
Word to_base_word(const TBall& B, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    int b = B.image(1, std::abs(l) - 1) + 1;
    out.push_back(l > 0 ? b : -b);
  }
  return out;
}

Word join_words(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

Error violation(const std::string& why, const DiscDiagram& D) {
  return Error{"StructureViolation",
               nlohmann::json{{"reason", why}, {"diagram", diagram_to_json(D)}}.dump()};
}

template <class TBall>
Result<TriangleClassification> classify_impl(const CubicalPresentation& P, const TBall& B, int x,
                                             int y, int z, const ClassifyBudget& budget) {
  const CubeComplex& C = B.complex();
  for (int v : {x, y, z})
    if (v < 0 || v >= C.vertex_count())
      return Error{"NotInBase", "vertex " + std::to_string(v) + " outside the ball"};

  std::vector<int> Dx = graph_dist(C, x), Dy = graph_dist(C, y), Dz = graph_dist(C, z);

  // distance-sum minimizer; the tripod point when a tripod label comes out
  int m = -1;
  long best_sum = std::numeric_limits<long>::max();
  for (int v = 0; v < C.vertex_count(); ++v) {
    if (Dx[v] < 0 || Dy[v] < 0 || Dz[v] < 0) continue;
    long s = static_cast<long>(Dx[v]) + Dy[v] + Dz[v];
    if (s < best_sum) {
      best_sum = s;
      m = v;
    }
  }

  int K = std::max(1, budget.max_side_candidates);
  std::array<std::vector<Word>, 3> cand = {enum_geodesics(C, x, Dy, K),
                                           enum_geodesics(C, y, Dz, K),
                                           enum_geodesics(C, z, Dx, K)};
  for (const auto& c : cand)
    if (c.empty()) return Error{"NotInBase", "corners not connected in the ball"};

  // Candidate side triples: the median-routed triple first when its legs
  // concatenate to geodesics (it bounds without cells whenever geodesics
  // branch through the midpoint), then products of enumerated geodesics.
  std::vector<std::array<Word, 3>> tries;
  if (m >= 0 && Dx[m] + Dy[m] == Dx[y] && Dy[m] + Dz[m] == Dy[z] && Dz[m] + Dx[m] == Dz[x]) {
    auto lx = enum_geodesics(C, m, Dx, 1);
    auto ly = enum_geodesics(C, m, Dy, 1);
    auto lz = enum_geodesics(C, m, Dz, 1);
    if (!lx.empty() && !ly.empty() && !lz.empty())
      tries.push_back({join_words(inverse_word(lx[0]), ly[0]),
                       join_words(inverse_word(ly[0]), lz[0]),
                       join_words(inverse_word(lz[0]), lx[0])});
  }
  {
    std::vector<std::array<int, 4>> order;
    for (int i = 0; i < static_cast<int>(cand[0].size()); ++i)
      for (int j = 0; j < static_cast<int>(cand[1].size()); ++j)
        for (int k = 0; k < static_cast<int>(cand[2].size()); ++k)
          order.push_back({i + j + k, i, j, k});
    std::sort(order.begin(), order.end());
    for (const auto& o : order) {
      if (static_cast<int>(tries.size()) >= budget.max_triples) break;
      std::array<Word, 3> t = {cand[0][o[1]], cand[1][o[2]], cand[2][o[3]]};
      if (std::find(tries.begin(), tries.end(), t) == tries.end()) tries.push_back(std::move(t));
    }
  }

  int bx = B.image(0, x);
  std::optional<DiscDiagram> bestD;
  std::pair<int, int> bestC{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  std::array<Word, 3> sides{};
  int tried = 0;
  for (const auto& t : tries) {
    if (tried >= budget.max_triples) break;
    ++tried;
    Word w = join_words(join_words(to_base_word(B, t[0]), to_base_word(B, t[1])),
                        to_base_word(B, t[2]));
    std::optional<DiscDiagram> D;
    if (free_reduce(w).empty()) {
      // spur-tree boundary: the certificate is the cell-free minimum
      NullHomotopy nh = is_null_homotopic(P, bx, w, ReduceBudget{});
      if (nh.verdict == "yes" && nh.certificate) D = *nh.certificate;
    }
    if (!D) {
      auto r = find_diagram(P, bx, w, budget.diagram);
      if (ok(r)) D = value(r);
    }
    if (!D) continue;
    auto cx = D->complexity();
    if (cx < bestC) {
      bestC = cx;
      bestD = std::move(D);
      sides = t;
    }
    if (bestC == std::pair<int, int>{0, 0}) break;
  }
  if (!bestD)
    return Error{"BudgetExceeded", nlohmann::json{{"triples", tried}}.dump()};

  const DiscDiagram& D = *bestD;
  TriangleClassification out;
  out.diagram = D;
  for (int s = 0; s < 3; ++s) out.sides[s] = to_base_word(B, sides[s]);

  if (budget.bigons) {
    std::array<int, 3> starts = {x, y, z};
    for (int i = 0; i < 3; ++i) {
      if (sides[i] == cand[i][0]) continue;
      Word bw = join_words(to_base_word(B, cand[i][0]),
                           inverse_word(to_base_word(B, sides[i])));
      DiagramBudget db = budget.diagram;
      db.max_cones = 0;
      auto r = find_diagram(P, B.image(0, starts[i]), bw, db);
      if (ok(r)) out.bigons[i] = value(r);
    }
  }

  std::vector<int> cone_cells;
  for (int f = 0; f < D.cell_count(); ++f)
    if (D.raw().cells[f].kind == "cone") cone_cells.push_back(f);
  int cones = static_cast<int>(cone_cells.size());

  int la = static_cast<int>(sides[0].size());
  int lb = static_cast<int>(sides[1].size());
  int lc = static_cast<int>(sides[2].size());
  int L = la + lb + lc;

  if (L == 0) {
    out.label = "degenerate";
    for (auto& f : out.corners) f = {"flat", -1, 0};
    out.tripod_point = m;
    return out;
  }

  const auto& bd = D.boundary_darts();
  std::vector<int> bpos(L);
  for (int p = 0; p < L; ++p) bpos[p] = D.origin(bd[p]);
  Word w = D.boundary_word();
  auto side_of = [&](int p) { return p < la ? 0 : (p < la + lb ? 1 : 2); };

  std::vector<std::array<bool, 3>> vside(D.vertex_count(), {false, false, false});
  for (int p = 0; p < L; ++p) {
    vside[bpos[p]][side_of(p)] = true;
    vside[bpos[p]][side_of((p + L - 1) % L)] = true;
  }

  std::vector<std::set<int>> cverts(D.cell_count());
  std::vector<std::array<bool, 3>> cside(D.cell_count(), {false, false, false});
  for (int f = 0; f < D.cell_count(); ++f) {
    for (int s : D.raw().cells[f].boundary) {
      int e = std::abs(s) - 1;
      cverts[f].insert(s > 0 ? D.raw().edge_ends[e].first : D.raw().edge_ends[e].second);
    }
    for (int v : cverts[f])
      for (int s = 0; s < 3; ++s)
        if (vside[v][s]) cside[f][s] = true;
  }

  // corner i joins side i to side i+1
  std::array<int, 3> cpos = {la % L, (la + lb) % L, 0};
  for (int i = 0; i < 3; ++i) {
    int p = cpos[i];
    CornerFeature f;
    f.vertex = bpos[p];
    if (w[(p + L - 1) % L] == -w[p]) {
      f.kind = "spur";
    } else {
      int cc = -1, sq = -1;
      for (int c = 0; c < D.cell_count(); ++c) {
        if (!cverts[c].count(f.vertex)) continue;
        if (D.raw().cells[c].kind == "cone") {
          if (cc < 0) cc = c;
        } else if (sq < 0) {
          sq = c;
        }
      }
      if (cc >= 0) {
        f.kind = "cone";
        f.cell = cc;
      } else if (sq >= 0) {
        f.kind = "square";
        f.cell = sq;
      } else {
        f.kind = "flat";
      }
    }
    out.corners[i] = f;
  }

  // degenerate shapes: a side collapsed to a point, a lone vertex or cone
  // cell, or a recognized ladder between cone cells
  bool degenerate = la == 0 || lb == 0 || lc == 0;
  if (!degenerate && D.cell_count() == 0 && D.edge_count() == 0) degenerate = true;
  if (!degenerate && cones == 1 && D.cell_count() == 1 &&
      D.edge_count() == static_cast<int>(D.raw().cells[0].boundary.size()))
    degenerate = true;
  if (!degenerate && cones >= 2) {
    auto lad = is_padded_ladder(D);
    if (lad && lad->is_ladder) degenerate = true;
  }
  if (degenerate) {
    out.label = "degenerate";
    out.tripod_point = m;
    if (cones == 1) out.median_cell = cone_cells[0];
    return out;
  }

  std::vector<int> full;
  for (int c : cone_cells)
    if (cside[c][0] && cside[c][1] && cside[c][2]) full.push_back(c);
  if (full.size() >= 2) return violation("two cone-cells meet all three sides", D);
  bool generic = full.size() == 1;
  int M = generic ? full[0] : -1;
  for (int c : cone_cells) {
    if (c == M) continue;
    int k = cside[c][0] + cside[c][1] + cside[c][2];
    if (k == 0) return violation("internal cone-cell", D);
    if (k == 1) return violation("cone-cell meeting a single side", D);
  }

  int shells = 0;
  for (const auto& f : out.corners)
    if (f.kind == "cone") ++shells;
  out.label = (shells == 0 ? std::string("no-shell") : std::to_string(shells) + "-shell") +
              (generic ? " generic" : " tripod");
  if (generic)
    out.median_cell = M;
  else
    out.tripod_point = m;

  std::array<int, 3> side_len = {la, lb, lc};
  for (int i = 0; i < 3; ++i) {
    TriangleLadder lad;
    lad.corner = i;
    int a = i, b = (i + 1) % 3;
    std::vector<std::pair<int, int>> keyed;  // (steps back from the corner, cell)
    for (int c : cone_cells) {
      if (c == M) continue;
      if (!(cside[c][a] && cside[c][b])) continue;
      int q = std::numeric_limits<int>::max();
      for (int t = 0; t <= side_len[a] && q == std::numeric_limits<int>::max(); ++t) {
        int p = (cpos[i] - t % L + L) % L;
        if (cverts[c].count(bpos[p])) q = t;
      }
      keyed.push_back({q, c});
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [q, c] : keyed) lad.cells.push_back(c);
    out.ladders.push_back(std::move(lad));
  }

  return out;
}

}  // namespace

Result<TriangleClassification> classify_triangle(const CubicalPresentation& P, const CayleyBall& B,
                                                 int x, int y, int z,
                                                 const ClassifyBudget& budget) {
  return classify_impl(P, B, x, y, z, budget);
}

Result<TriangleClassification> classify_triangle(const CubicalPresentation& P,
                                                 const DevelopedBall& B, int x, int y, int z,
                                                 const ClassifyBudget& budget) {
  return classify_impl(P, B, x, y, z, budget);
}

nlohmann::json classification_to_json(const TriangleClassification& C) {
  nlohmann::json corners = nlohmann::json::array();
  for (const auto& f : C.corners)
    corners.push_back({{"kind", f.kind}, {"cell", f.cell}, {"vertex", f.vertex}});
  nlohmann::json ladders = nlohmann::json::array();
  for (const auto& l : C.ladders) ladders.push_back({{"corner", l.corner}, {"cells", l.cells}});
  nlohmann::json sides = nlohmann::json::array();
  for (const auto& s : C.sides) sides.push_back(word_to_string(s));
  nlohmann::json bigons = nlohmann::json::array();
  for (const auto& b : C.bigons)
    bigons.push_back(b ? diagram_to_json(*b) : nlohmann::json());
  return {{"label", C.label},       {"sides", sides},
          {"corners", corners},     {"ladders", ladders},
          {"median_cell", C.median_cell}, {"tripod_point", C.tripod_point},
          {"diagram", diagram_to_json(C.diagram)}, {"bigons", bigons}};
}

}  // namespace cubsc
