#include "cubsc/diagram.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace cubsc {

namespace {

int dart_of(int s) { return s > 0 ? 2 * (s - 1) : 2 * (-s - 1) + 1; }

/// One oriented traversal of a square of X: letters[i] is the signed X edge
/// read along side i, verts[i] the X vertex before it. All 4 rotations and
/// both orientations of every square appear in the list.
struct SquareCycle {
  int square = -1;
  std::array<int, 4> letters{};
  std::array<int, 4> verts{};
};

std::vector<SquareCycle> square_cycles(const CubeComplex& X) {
  std::vector<SquareCycle> out;
  if (X.dim() < 2) return out;
  for (std::size_t c = 0; c < X.size(2); ++c) {
    int ci = static_cast<int>(c);
    int v00 = X.corner_vertex(2, ci, 0u), v10 = X.corner_vertex(2, ci, 1u);
    int v01 = X.corner_vertex(2, ci, 2u), v11 = X.corner_vertex(2, ci, 3u);
    std::array<int, 4> L{X.face(2, ci, 1, 0) + 1, X.face(2, ci, 0, 1) + 1,
                         -(X.face(2, ci, 1, 1) + 1), -(X.face(2, ci, 0, 0) + 1)};
    std::array<int, 4> V{v00, v10, v11, v01};
    std::array<int, 4> RL{-L[3], -L[2], -L[1], -L[0]};
    std::array<int, 4> RV{v00, v01, v11, v10};
    for (int r = 0; r < 4; ++r) {
      SquareCycle a, b;
      a.square = b.square = ci;
      for (int i = 0; i < 4; ++i) {
        a.letters[i] = L[(i + r) % 4];
        a.verts[i] = V[(i + r) % 4];
        b.letters[i] = RL[(i + r) % 4];
        b.verts[i] = RV[(i + r) % 4];
      }
      out.push_back(a);
      out.push_back(b);
    }
  }
  return out;
}

/// Unique lift of one letter from Y-vertex y through the attaching map, or -1.
int lift_step(const CubeComplex& Y, const CubicalMap& f, int y, int letter) {
  int want = std::abs(letter) - 1;
  int end = letter > 0 ? 0 : 1;
  for (const Germ& g : Y.germs_at(y))
    if (f.edge_image(g.edge) == want && g.end == end) return Y.endpoint(g.edge, 1 - end);
  return -1;
}

/// Whether the labelled cycle (letters with preceding vertex images) lifts to
/// a closed path in Y through f.
bool lifts_closed(const CubeComplex& Y, const CubicalMap& f, const std::vector<int>& letters,
                  const std::vector<int>& vimgs) {
  int n = static_cast<int>(letters.size());
  if (n == 0) return true;
  for (int y0 = 0; y0 < static_cast<int>(Y.vertex_count()); ++y0) {
    if (f.vertex_image(y0) != vimgs[0]) continue;
    int y = y0;
    bool good = true;
    for (int i = 0; i < n && good; ++i) {
      y = lift_step(Y, f, y, letters[i]);
      if (y < 0 || f.vertex_image(y) != vimgs[(i + 1) % n]) good = false;
    }
    if (good && y == y0) return true;
  }
  return false;
}

template <class T>
void rotate_left(std::vector<T>& a, int r) {
  std::rotate(a.begin(), a.begin() + r, a.end());
}

}  // namespace

Word DiscDiagram::boundary_word() const {
  Word w;
  for (int d : face_darts_[cell_count()]) w.push_back(letter(d));
  return w;
}

std::pair<int, int> DiscDiagram::complexity() const {
  int c = 0, s = 0;
  for (const auto& cell : raw_.cells) (cell.kind == "cone" ? c : s)++;
  return {c, s};
}

Result<DiscDiagram> validate_diagram(RawDiagram raw, const CubeComplex& X,
                                     const CubicalPresentation* P) {
  int n = raw.vertices;
  int E = static_cast<int>(raw.edge_ends.size());
  int F = static_cast<int>(raw.cells.size());
  if (n < 1) return Error{"BadDiagram", "a diagram has at least one vertex"};
  if (static_cast<int>(raw.vertex_image.size()) != n)
    return Error{"BadDiagram", "vertex_image size mismatch"};
  if (static_cast<int>(raw.edge_image.size()) != E)
    return Error{"BadDiagram", "edge_image size mismatch"};
  for (int v = 0; v < n; ++v)
    if (raw.vertex_image[v] < 0 || raw.vertex_image[v] >= static_cast<int>(X.vertex_count()))
      return Error{"NotInBase", "vertex image out of range at vertex " + std::to_string(v)};
  for (int e = 0; e < E; ++e) {
    auto [a, b] = raw.edge_ends[e];
    if (a < 0 || a >= n || b < 0 || b >= n)
      return Error{"BadDiagram", "edge endpoint out of range at edge " + std::to_string(e)};
    int img = raw.edge_image[e];
    if (img < 0 || img >= static_cast<int>(X.edge_count()))
      return Error{"NotInBase", "edge image out of range at edge " + std::to_string(e)};
    if (X.endpoint(img, 0) != raw.vertex_image[a] || X.endpoint(img, 1) != raw.vertex_image[b])
      return Error{"NotInBase",
                   "edge image disagrees with vertex images at edge " + std::to_string(e)};
  }

  // faces (cells then the outer face) must partition the darts
  std::vector<int> used(2 * E, 0), nxt(2 * E, -1), fof(2 * E, -1);
  std::vector<std::vector<int>> fdarts(F + 1);
  for (int f = 0; f <= F; ++f) {
    const std::vector<int>& bd = f < F ? raw.cells[f].boundary : raw.outer;
    if (f < F && bd.empty()) return Error{"BadDiagram", "cell " + std::to_string(f) + " is empty"};
    for (int s : bd) {
      if (s == 0 || std::abs(s) > E)
        return Error{"BadDiagram", "signed edge out of range in face " + std::to_string(f)};
      fdarts[f].push_back(dart_of(s));
    }
    const auto& ds = fdarts[f];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      used[ds[i]]++;
      nxt[ds[i]] = ds[(i + 1) % ds.size()];
      fof[ds[i]] = f;
    }
  }
  for (int d = 0; d < 2 * E; ++d)
    if (used[d] != 1)
      return Error{"BadDiagram",
                   "dart " + std::to_string(d) + " used " + std::to_string(used[d]) + " times"};

  auto org = [&](int d) {
    const auto& e = raw.edge_ends[d >> 1];
    return (d & 1) == 0 ? e.first : e.second;
  };
  for (int d = 0; d < 2 * E; ++d)
    if (org(d ^ 1) != org(nxt[d]))
      return Error{"BadDiagram", "face boundaries do not chain at dart " + std::to_string(d)};

  // rotation orbits of next(twin(.)) are the vertices
  std::vector<std::vector<int>> datv(n);
  std::vector<int> orbits(n, 0);
  std::vector<char> seen(2 * E, 0);
  for (int d0 = 0; d0 < 2 * E; ++d0) {
    if (seen[d0]) continue;
    int v = org(d0);
    orbits[v]++;
    int d = d0;
    while (!seen[d]) {
      seen[d] = 1;
      datv[v].push_back(d);
      d = nxt[d ^ 1];
    }
  }
  if (E > 0)
    for (int v = 0; v < n; ++v)
      if (orbits[v] != 1)
        return Error{"BadDiagram", "vertex " + std::to_string(v) + " has " +
                                       std::to_string(orbits[v]) + " rotation orbits"};
  if (n - E + (F + 1) != 2) return Error{"BadDiagram", "Euler characteristic is not a sphere's"};

  // connectivity
  {
    std::vector<char> vis(n, 0);
    std::vector<std::vector<int>> adj(n);
    for (int e = 0; e < E; ++e) {
      adj[raw.edge_ends[e].first].push_back(raw.edge_ends[e].second);
      adj[raw.edge_ends[e].second].push_back(raw.edge_ends[e].first);
    }
    std::queue<int> q;
    q.push(0);
    vis[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[v])
        if (!vis[u]) vis[u] = 1, cnt++, q.push(u);
    }
    if (cnt != n) return Error{"BadDiagram", "diagram is not connected"};
  }

  // labels per cell
  auto cycles = square_cycles(X);
  for (int f = 0; f < F; ++f) {
    auto& cell = raw.cells[f];
    std::vector<int> L, V;
    for (int d : fdarts[f]) {
      int base = raw.edge_image[d >> 1] + 1;
      L.push_back((d & 1) == 0 ? base : -base);
      V.push_back(raw.vertex_image[org(d)]);
    }
    if (cell.kind == "square") {
      if (L.size() != 4)
        return Error{"BadCell", "square cell " + std::to_string(f) + " has " +
                                    std::to_string(L.size()) + " sides"};
      int found = -1;
      for (const auto& sc : cycles) {
        if (cell.image >= 0 && sc.square != cell.image) continue;
        bool eq = true;
        for (int i = 0; i < 4 && eq; ++i) eq = sc.letters[i] == L[i] && sc.verts[i] == V[i];
        if (eq) {
          found = sc.square;
          break;
        }
      }
      if (found < 0)
        return Error{"BadCell",
                     "cell " + std::to_string(f) + " does not match a square of the base"};
      cell.image = found;
    } else if (cell.kind == "cone") {
      if (!P) return Error{"BadCell", "cone-cell without a presentation"};
      if (cell.image < 0 || cell.image >= P->relator_count())
        return Error{"BadCell", "cone image out of range in cell " + std::to_string(f)};
      if (!lifts_closed(P->relator(cell.image), P->attaching(cell.image), L, V))
        return Error{"BadCell", "cone boundary of cell " + std::to_string(f) +
                                    " does not lift closed in relator " +
                                    std::to_string(cell.image)};
    } else {
      return Error{"BadCell", "unknown cell kind '" + cell.kind + "'"};
    }
  }

  DiscDiagram D;
  D.raw_ = std::move(raw);
  D.X_ = &X;
  D.P_ = P;
  D.next_ = std::move(nxt);
  D.prev_.assign(2 * E, -1);
  for (int d = 0; d < 2 * E; ++d)
    if (D.next_[d] >= 0) D.prev_[D.next_[d]] = d;
  D.face_of_ = std::move(fof);
  D.face_darts_ = std::move(fdarts);
  D.darts_at_ = std::move(datv);
  D.passes_.assign(n, 0);
  for (int d : D.face_darts_[F]) D.passes_[D.origin(d)]++;
  return D;
}

nlohmann::json diagram_to_json(const DiscDiagram& D) {
  const RawDiagram& raw = D.raw();
  nlohmann::json j;
  int E = D.edge_count(), F = D.cell_count();
  if (E == 0) {
    j["vertices"] = 1;
    j["vertex_image"] = std::vector<int>{raw.vertex_image[0]};
    j["edges"] = nlohmann::json::array();
    j["cells"] = nlohmann::json::array();
    j["outer"] = nlohmann::json::array();
    return j;
  }
  std::vector<int> vmap(raw.vertices, -1), emap(E, -1);
  std::vector<int> vorder, eorder, corder;
  auto touch = [&](int d) {
    int v = D.origin(d);
    if (vmap[v] < 0) {
      vmap[v] = static_cast<int>(vorder.size());
      vorder.push_back(v);
    }
    int e = d >> 1;
    if (emap[e] < 0) {
      emap[e] = static_cast<int>(eorder.size());
      eorder.push_back(e);
    }
  };
  std::vector<char> fseen(F + 1, 0);
  std::vector<int> entry(F + 1, -1);
  std::queue<int> q;
  int root = D.boundary_darts()[0];
  fseen[F] = 1;
  entry[F] = root;
  q.push(F);
  while (!q.empty()) {
    int f = q.front();
    q.pop();
    int d = entry[f];
    do {
      touch(d);
      int tf = D.face_of(DiscDiagram::twin(d));
      if (!fseen[tf]) {
        fseen[tf] = 1;
        entry[tf] = DiscDiagram::twin(d);
        corder.push_back(tf);
        q.push(tf);
      }
      d = D.next(d);
    } while (d != entry[f]);
  }
  auto signed_of = [&](int d) {
    int s = emap[d >> 1] + 1;
    return (d & 1) == 0 ? s : -s;
  };
  j["vertices"] = raw.vertices;
  {
    std::vector<int> vi(raw.vertices);
    for (int i = 0; i < raw.vertices; ++i) vi[i] = raw.vertex_image[vorder[i]];
    j["vertex_image"] = vi;
  }
  {
    auto edges = nlohmann::json::array();
    for (int e : eorder)
      edges.push_back({vmap[raw.edge_ends[e].first], vmap[raw.edge_ends[e].second],
                       raw.edge_image[e]});
    j["edges"] = edges;
  }
  {
    auto cells = nlohmann::json::array();
    for (int f : corder) {
      nlohmann::json c;
      c["kind"] = raw.cells[f].kind;
      c["image"] = raw.cells[f].image;
      std::vector<int> bd;
      int d = entry[f];
      do {
        bd.push_back(signed_of(d));
        d = D.next(d);
      } while (d != entry[f]);
      c["boundary"] = bd;
      cells.push_back(c);
    }
    j["cells"] = cells;
  }
  {
    std::vector<int> ou;
    for (int d : D.boundary_darts()) ou.push_back(signed_of(d));
    j["outer"] = ou;
  }
  return j;
}

namespace {

/// One recorded glue of the diagram search; folds are implicit (both the
/// search and the replay fold greedily between glues with the same scan).
struct Move {
  int kind = 0;  // 0 square, 1 cone
  int pos = 0;   // segment start at application time
  int k = 0;     // matched length
  int cyc = 0;   // square: index into the cycle table; cone: relator id
  int y0 = -1;   // cone: lift start vertex in the relator
};

/// Inserted segment replacing a matched square prefix of length k: remaining
/// cycle letters inverted, with the X images of the interior vertices.
void square_insertion(const SquareCycle& sc, int k, Word& ins, std::vector<int>& insv) {
  ins.clear();
  insv.clear();
  for (int j = 3; j >= k; --j) {
    ins.push_back(-sc.letters[j]);
    if (j > k) insv.push_back(sc.verts[j]);
  }
}

/// Complement arc of a lifted segment in a circle relator: walks on from the
/// arrival germ back to y0, producing the inserted segment (arc inverted) and
/// interior X images. Fails only on a malformed circle.
bool cone_insertion(const CubeComplex& Y, const CubicalMap& f, int y0, int y1, Germ arrive,
                    Word& ins, std::vector<int>& insv) {
  ins.clear();
  insv.clear();
  if (y1 == y0) return true;
  std::vector<int> letters, interior;
  int z = y1;
  Germ at = arrive;
  int guard = static_cast<int>(Y.vertex_count()) + 1;
  while (z != y0) {
    if (--guard < 0) return false;
    const auto& gs = Y.germs_at(z);
    if (gs.size() != 2) return false;
    Germ h = gs[0] == at ? gs[1] : gs[0];
    letters.push_back(h.end == 0 ? f.edge_image(h.edge) + 1 : -(f.edge_image(h.edge) + 1));
    z = Y.endpoint(h.edge, 1 - h.end);
    at = Germ{h.edge, 1 - h.end};
    if (z != y0) interior.push_back(z);
  }
  for (int t = static_cast<int>(letters.size()) - 1; t >= 0; --t) ins.push_back(-letters[t]);
  for (int t = static_cast<int>(interior.size()) - 1; t >= 0; --t)
    insv.push_back(f.vertex_image(interior[t]));
  return true;
}

/// Greedy fold of the first adjacent cancelling pair; the replay runs the
/// identical scan on its hole so no fold positions are recorded.
bool fold_once(Word& w, std::vector<int>& vi) {
  int len = static_cast<int>(w.size());
  if (len < 2) return false;
  int pos = -1;
  for (int i = 0; i < len; ++i)
    if (w[(i + 1) % len] == -w[i]) {
      pos = i;
      break;
    }
  if (pos < 0) return false;
  if (pos + 2 >= len) {
    rotate_left(w, pos);
    rotate_left(vi, pos);
    pos = 0;
  }
  if (len == 2) {
    w.clear();
    vi.clear();
    return true;
  }
  w.erase(w.begin() + pos, w.begin() + pos + 2);
  vi.erase(vi.begin() + pos + 1, vi.begin() + pos + 3);
  return true;
}

std::string canonical_key(const Word& w, const std::vector<int>& vi) {
  int len = static_cast<int>(w.size());
  auto render = [&](int r) {
    std::string s;
    for (int i = 0; i < len; ++i) {
      s += std::to_string(w[(r + i) % len]);
      s += ':';
      s += std::to_string(vi[(r + i) % len]);
      s += ';';
    }
    return s;
  };
  std::string best = render(0);
  for (int r = 1; r < len; ++r) best = std::min(best, render(r));
  return best;
}

struct Cand {
  Move m;
  Word ins;
  std::vector<int> insv;
  int len_after = 0;
};

struct SearchCtx {
  const CubicalPresentation& P;
  const std::vector<SquareCycle>& cycles;
  const DiagramBudget& budget;
  long long states = 0;
  bool tripped = false;
  std::map<std::string, char> visited;
  std::vector<Move> best;
};

std::vector<Cand> enumerate_moves(const Word& w, const std::vector<int>& vi, int rc, int rs,
                                  SearchCtx& C) {
  int len = static_cast<int>(w.size());
  std::vector<Cand> out;
  if (rs > 0) {
    for (int k = std::min(4, len); k >= 1; --k)
      for (int pos = 0; pos < len; ++pos) {
        if (k == len && pos > 0) continue;
        for (int ci = 0; ci < static_cast<int>(C.cycles.size()); ++ci) {
          const SquareCycle& sc = C.cycles[ci];
          bool eq = true;
          for (int j = 0; j < k && eq; ++j)
            eq = sc.letters[j] == w[(pos + j) % len] && sc.verts[j] == vi[(pos + j) % len];
          if (!eq || sc.verts[k % 4] != vi[(pos + k) % len]) continue;
          Cand c;
          c.m = Move{0, pos, k, ci, -1};
          square_insertion(sc, k, c.ins, c.insv);
          c.len_after = len - 2 * k + 4;
          if (c.len_after <= C.budget.max_length) out.push_back(std::move(c));
        }
      }
  }
  if (rc > 0) {
    for (int rel = 0; rel < C.P.relator_count(); ++rel) {
      if (C.P.relator_word(rel).empty()) continue;
      const CubeComplex& Y = C.P.relator(rel);
      const CubicalMap& f = C.P.attaching(rel);
      for (int pos = 0; pos < len; ++pos) {
        for (int y0 = 0; y0 < static_cast<int>(Y.vertex_count()); ++y0) {
          if (f.vertex_image(y0) != vi[pos]) continue;
          int y = y0;
          Germ at{-1, 0};
          for (int k = 1; k <= len; ++k) {
            int letter = w[(pos + k - 1) % len];
            int want = std::abs(letter) - 1;
            int end = letter > 0 ? 0 : 1;
            Germ used{-1, 0};
            for (const Germ& g : Y.germs_at(y))
              if (f.edge_image(g.edge) == want && g.end == end) {
                used = g;
                break;
              }
            if (used.edge < 0) break;
            y = Y.endpoint(used.edge, 1 - end);
            at = Germ{used.edge, 1 - end};
            if (f.vertex_image(y) != vi[(pos + k) % len]) break;
            if (k == len && pos > 0) continue;
            Cand c;
            c.m = Move{1, pos, k, rel, y0};
            if (!cone_insertion(Y, f, y0, y, at, c.ins, c.insv)) continue;
            c.len_after = len - k + static_cast<int>(c.ins.size());
            if (c.len_after <= C.budget.max_length) out.push_back(std::move(c));
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
    return std::tie(a.len_after, a.m.kind, a.m.pos, a.m.cyc, a.m.y0, a.m.k) <
           std::tie(b.len_after, b.m.kind, b.m.pos, b.m.cyc, b.m.y0, b.m.k);
  });
  return out;
}

void apply_glue(Word& w, std::vector<int>& vi, const Cand& c) {
  int len = static_cast<int>(w.size());
  int pos = c.m.pos, k = c.m.k;
  if (pos + k > len) {
    rotate_left(w, pos);
    rotate_left(vi, pos);
    pos = 0;
  }
  w.erase(w.begin() + pos, w.begin() + pos + k);
  w.insert(w.begin() + pos, c.ins.begin(), c.ins.end());
  if (c.ins.empty() && k < len) {
    // the replaced arc closes onto itself: its endpoints merge, so one of
    // the two (equal) endpoint entries goes too
    if (pos + k < len) {
      vi.erase(vi.begin() + pos + 1, vi.begin() + pos + k + 1);
    } else {
      vi.erase(vi.begin() + pos + 1, vi.end());
      vi.pop_back();
    }
  } else {
    vi.erase(vi.begin() + pos + 1, vi.begin() + pos + k);
    vi.insert(vi.begin() + pos + 1, c.insv.begin(), c.insv.end());
  }
  if (w.empty()) vi.clear();
}

bool dfs(Word w, std::vector<int> vi, int rc, int rs, SearchCtx& C, std::vector<Move>& path) {
  while (fold_once(w, vi)) {
  }
  if (w.empty()) {
    C.best = path;
    return true;
  }
  if (++C.states > C.budget.max_states) {
    C.tripped = true;
    return false;
  }
  if (rc == 0 && rs == 0) return false;
  std::string key = canonical_key(w, vi);
  key += '#';
  key += std::to_string(rc);
  key += ',';
  key += std::to_string(rs);
  if (!C.visited.emplace(key, 1).second) return false;
  for (const Cand& c : enumerate_moves(w, vi, rc, rs, C)) {
    Word w2 = w;
    std::vector<int> vi2 = vi;
    apply_glue(w2, vi2, c);
    path.push_back(c.m);
    if (dfs(std::move(w2), std::move(vi2), rc - (c.m.kind == 1), rs - (c.m.kind == 0), C, path))
      return true;
    path.pop_back();
    if (C.tripped) return false;
  }
  return false;
}

/// Rebuilds the diagram from the glue trace: the hole is the not-yet-bounded
/// part of the boundary, kept parallel to the search word; folds identify
/// edges via a union-find with orientation flips.
struct Replay {
  std::vector<int> vuf, vimg;
  std::vector<std::pair<int, int>> ends;
  std::vector<int> eimg;
  std::vector<int> euf;
  std::vector<char> eflip;
  std::vector<RawDiagram::Cell> cells;
  std::vector<int> outer, hole, hvert;

  int vfind(int v) {
    while (vuf[v] != v) v = vuf[v] = vuf[vuf[v]];
    return v;
  }
  void vunion(int a, int b) { vuf[vfind(a)] = vfind(b); }
  std::pair<int, char> efind(int e) {
    char f = 0;
    while (euf[e] != e) {
      f ^= eflip[e];
      e = euf[e];
    }
    return {e, f};
  }
  int new_vertex(int img) {
    vuf.push_back(static_cast<int>(vuf.size()));
    vimg.push_back(img);
    return static_cast<int>(vuf.size()) - 1;
  }
  int new_edge(int tail, int head, int img) {
    ends.emplace_back(tail, head);
    eimg.push_back(img);
    euf.push_back(static_cast<int>(euf.size()));
    eflip.push_back(0);
    return static_cast<int>(euf.size()) - 1;
  }
  int letter_of(int s) const {
    return s > 0 ? eimg[s - 1] + 1 : -(eimg[-s - 1] + 1);
  }
  /// identify the edge of sb with the edge of sa reversed
  void merge_edges(int sb, int sa) {
    auto [rb, fb] = efind(std::abs(sb) - 1);
    auto [ra, fa] = efind(std::abs(sa) - 1);
    char bb = sb < 0, ba = sa > 0;  // target carries the opposite sign of sa
    if (rb == ra) return;
    euf[rb] = ra;
    eflip[rb] = fb ^ bb ^ ba ^ fa;
  }

  bool fold_once() {
    int len = static_cast<int>(hole.size());
    if (len < 2) return false;
    int pos = -1;
    for (int i = 0; i < len; ++i)
      if (letter_of(hole[(i + 1) % len]) == -letter_of(hole[i])) {
        pos = i;
        break;
      }
    if (pos < 0) return false;
    if (pos + 2 >= len) {
      rotate_left(hole, pos);
      rotate_left(hvert, pos);
      pos = 0;
    }
    int sa = hole[pos], sb = hole[(pos + 1) % len];
    vunion(hvert[pos], hvert[(pos + 2) % len]);
    merge_edges(sb, sa);
    if (len == 2) {
      hole.clear();
      hvert.clear();
      return true;
    }
    hole.erase(hole.begin() + pos, hole.begin() + pos + 2);
    hvert.erase(hvert.begin() + pos + 1, hvert.begin() + pos + 3);
    return true;
  }

  void glue(const Move& m, const std::vector<SquareCycle>& cycles, const CubicalPresentation& P) {
    int len = static_cast<int>(hole.size());
    int pos = m.pos, k = m.k;
    if (pos + k > len) {
      rotate_left(hole, pos);
      rotate_left(hvert, pos);
      pos = 0;
    }
    Word ins;
    std::vector<int> insv;
    std::string kind;
    int image = -1;
    if (m.kind == 0) {
      square_insertion(cycles[m.cyc], k, ins, insv);
      kind = "square";
      image = cycles[m.cyc].square;
    } else {
      const CubeComplex& Y = P.relator(m.cyc);
      const CubicalMap& f = P.attaching(m.cyc);
      int y = m.y0;
      Germ at{-1, 0};
      for (int t = 0; t < k; ++t) {
        int letter = letter_of(hole[pos + t]);
        int want = std::abs(letter) - 1;
        int end = letter > 0 ? 0 : 1;
        Germ used{-1, 0};
        for (const Germ& g : Y.germs_at(y))
          if (f.edge_image(g.edge) == want && g.end == end) {
            used = g;
            break;
          }
        if (used.edge < 0) throw std::logic_error("diagram replay lost a cone lift");
        y = Y.endpoint(used.edge, 1 - end);
        at = Germ{used.edge, 1 - end};
      }
      if (!cone_insertion(Y, f, m.y0, y, at, ins, insv))
        throw std::logic_error("diagram replay lost a cone complement");
      kind = "cone";
      image = m.cyc;
    }
    std::vector<int> fb;
    for (int j = k - 1; j >= 0; --j) fb.push_back(-hole[pos + j]);
    int A = hvert[pos], Z = hvert[(pos + k) % len];
    std::vector<int> ins_signed, fresh;
    int cur = A;
    for (std::size_t t = 0; t < ins.size(); ++t) {
      int nxtv = t + 1 == ins.size() ? Z : new_vertex(insv[t]);
      int lam = ins[t];
      int e = lam > 0 ? new_edge(cur, nxtv, lam - 1) : new_edge(nxtv, cur, -lam - 1);
      ins_signed.push_back(lam > 0 ? e + 1 : -(e + 1));
      if (t + 1 < ins.size()) fresh.push_back(nxtv);
      cur = nxtv;
    }
    fb.insert(fb.end(), ins_signed.begin(), ins_signed.end());
    cells.push_back(RawDiagram::Cell{kind, image, fb});
    hole.erase(hole.begin() + pos, hole.begin() + pos + k);
    hole.insert(hole.begin() + pos, ins_signed.begin(), ins_signed.end());
    if (ins.empty() && k < len) {
      vunion(A, Z);
      if (pos + k < len) {
        hvert.erase(hvert.begin() + pos + 1, hvert.begin() + pos + k + 1);
      } else {
        hvert.erase(hvert.begin() + pos + 1, hvert.end());
        hvert.pop_back();
      }
    } else {
      hvert.erase(hvert.begin() + pos + 1, hvert.begin() + pos + k);
      hvert.insert(hvert.begin() + pos + 1, fresh.begin(), fresh.end());
    }
    if (hole.empty()) hvert.clear();
  }

  RawDiagram assemble() {
    RawDiagram out;
    int N = static_cast<int>(vuf.size());
    std::vector<int> vdense(N, -1);
    for (int v = 0; v < N; ++v) {
      int r = vfind(v);
      if (vdense[r] < 0) {
        vdense[r] = out.vertices++;
        out.vertex_image.push_back(vimg[r]);
      }
    }
    int M = static_cast<int>(euf.size());
    std::vector<int> edense(M, -1);
    for (int e = 0; e < M; ++e)
      if (efind(e).first == e) {
        edense[e] = static_cast<int>(out.edge_ends.size());
        out.edge_ends.emplace_back(vdense[vfind(ends[e].first)], vdense[vfind(ends[e].second)]);
        out.edge_image.push_back(eimg[e]);
      }
    auto remap = [&](int s) {
      auto [r, f] = efind(std::abs(s) - 1);
      int v = edense[r] + 1;
      return (s > 0) != static_cast<bool>(f) ? v : -v;
    };
    for (auto& c : cells) {
      for (int& s : c.boundary) s = remap(s);
      out.cells.push_back(std::move(c));
    }
    for (int s : outer) out.outer.push_back(remap(s));
    return out;
  }
};

}  // namespace

Result<DiscDiagram> find_diagram(const CubicalPresentation& P, int base, const Word& w,
                                 const DiagramBudget& budget) {
  const CubeComplex& X = P.complex();
  if (base < 0 || base >= static_cast<int>(X.vertex_count()))
    return Error{"NotClosed", "base vertex out of range"};
  std::vector<int> vi;
  {
    int v = base;
    for (int letter : w) {
      int e = std::abs(letter) - 1;
      if (letter == 0 || e >= static_cast<int>(X.edge_count()))
        return Error{"NotClosed", "letter out of range"};
      if (X.endpoint(e, letter > 0 ? 0 : 1) != v)
        return Error{"NotClosed", "path breaks at vertex " + std::to_string(v)};
      vi.push_back(v);
      v = X.endpoint(e, letter > 0 ? 1 : 0);
    }
    if (v != base) return Error{"NotClosed", "path ends away from its base"};
  }
  if (static_cast<int>(w.size()) > budget.max_length)
    return Error{"BudgetExceeded", "boundary longer than max_length"};
  if (w.empty()) {
    RawDiagram raw;
    raw.vertices = 1;
    raw.vertex_image = {base};
    return validate_diagram(std::move(raw), X, &P);
  }

  auto cycles = square_cycles(X);
  SearchCtx C{P, cycles, budget};
  bool found = false;
  for (int c = 0; c <= budget.max_cones && !found && !C.tripped; ++c)
    for (int s = 0; s <= budget.max_squares; ++s) {
      C.visited.clear();
      std::vector<Move> path;
      if (dfs(w, vi, c, s, C, path)) {
        found = true;
        break;
      }
      if (C.tripped) break;
    }
  if (!found)
    return Error{"BudgetExceeded", "no diagram with cone-cells <= " +
                                       std::to_string(budget.max_cones) + ", squares <= " +
                                       std::to_string(budget.max_squares) + " (" +
                                       std::to_string(C.states) + " states)"};

  Replay R;
  int L = static_cast<int>(w.size());
  for (int i = 0; i < L; ++i) R.new_vertex(vi[i]);
  for (int i = 0; i < L; ++i) {
    int lam = w[i], nxt = (i + 1) % L;
    int e = lam > 0 ? R.new_edge(i, nxt, lam - 1) : R.new_edge(nxt, i, -lam - 1);
    R.hole.push_back(lam > 0 ? e + 1 : -(e + 1));
    R.hvert.push_back(i);
  }
  R.outer = R.hole;
  for (const Move& m : C.best) {
    while (R.fold_once()) {
    }
    R.glue(m, cycles, P);
  }
  while (R.fold_once()) {
  }
  if (!R.hole.empty()) throw std::logic_error("diagram replay left an open hole");
  auto res = validate_diagram(R.assemble(), X, &P);
  if (!ok(res))
    throw std::logic_error("diagram replay produced an invalid diagram: " + error(res).detail);
  return res;
}

Result<DiscDiagram> hexagon_move(const DiscDiagram& D, int vertex) {
  const CubeComplex& X = D.base();
  if (vertex < 0 || vertex >= D.vertex_count()) return Error{"NoSite", "vertex out of range"};
  if (D.boundary_passes(vertex) != 0) return Error{"NoSite", "vertex lies on the boundary"};
  const auto& rot = D.darts_at(vertex);
  if (rot.size() != 3) return Error{"NoSite", "vertex valence is not 3"};
  std::array<int, 3> eids{rot[0] >> 1, rot[1] >> 1, rot[2] >> 1};
  if (eids[0] == eids[1] || eids[1] == eids[2] || eids[0] == eids[2])
    return Error{"NoSite", "a loop is incident to the vertex"};
  std::array<int, 3> fid{};
  for (int i = 0; i < 3; ++i) fid[i] = D.face_of(DiscDiagram::twin(rot[i]));
  if (fid[0] == fid[1] || fid[1] == fid[2] || fid[0] == fid[2])
    return Error{"NoSite", "two corner squares coincide"};
  for (int f : fid)
    if (f == D.outer_face() || D.cell(f).kind != "square")
      return Error{"NoSite", "a corner cell is not a square"};

  // hexagon darts: per face, the two sides away from the vertex
  std::array<int, 3> g1{}, g2{}, bvert{};
  for (int i = 0; i < 3; ++i) {
    int d = rot[(i + 1) % 3];  // the face fid[i] contains twin(rot[i]) then rot[i+1]
    g1[i] = D.next(d);
    g2[i] = D.next(g1[i]);
    bvert[i] = D.target(g1[i]);
  }

  int x = D.vertex_image(vertex);
  std::array<Germ, 3> dg;
  for (int i = 0; i < 3; ++i) {
    int lam = D.letter(rot[i]);
    dg[i] = Germ{std::abs(lam) - 1, lam > 0 ? 0 : 1};
  }
  std::array<int, 3> fimg{D.cell(fid[0]).image, D.cell(fid[1]).image, D.cell(fid[2]).image};

  int cube = -1;
  unsigned bits = 0;
  std::array<int, 3> axis{};  // axis of the edge at rot[i]
  for (const Corner& k : X.corners_at(x)) {
    if (k.dim != 3 || cube >= 0) continue;
    auto cg = X.corner_germs(3, k.cube, k.bits);
    std::array<int, 3> perm{0, 1, 2};
    do {
      bool okp = true;
      for (int i = 0; i < 3 && okp; ++i) okp = cg[perm[i]] == dg[i];
      for (int i = 0; i < 3 && okp; ++i) {
        int t = 3 - perm[i] - perm[(i + 1) % 3];
        okp = X.face(3, k.cube, t, (k.bits >> t) & 1u) == fimg[i];
      }
      if (okp) {
        cube = k.cube;
        bits = k.bits;
        axis = perm;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  if (cube < 0) return Error{"NoCube", "no 3-cube of the base spans the three squares"};

  unsigned abits = bits ^ 7u;
  int wimg = X.corner_vertex(3, cube, abits);
  auto ag = X.corner_germs(3, cube, abits);

  RawDiagram raw = D.raw();
  // compact ids: drop `vertex`, the 3 edges, the 3 cells; append replacements
  std::vector<int> vmap(raw.vertices, 0), emap(raw.edge_ends.size(), 0);
  {
    RawDiagram out;
    for (int v = 0; v < raw.vertices; ++v) {
      if (v == vertex) {
        vmap[v] = -1;
        continue;
      }
      vmap[v] = out.vertices++;
      out.vertex_image.push_back(raw.vertex_image[v]);
    }
    int wnew = out.vertices++;
    out.vertex_image.push_back(wimg);
    for (int e = 0; e < static_cast<int>(raw.edge_ends.size()); ++e) {
      if (e == eids[0] || e == eids[1] || e == eids[2]) {
        emap[e] = -1;
        continue;
      }
      emap[e] = static_cast<int>(out.edge_ends.size());
      out.edge_ends.emplace_back(vmap[raw.edge_ends[e].first], vmap[raw.edge_ends[e].second]);
      out.edge_image.push_back(raw.edge_image[e]);
    }
    // new edge along the axis missing from face fid[i]: joins wnew to bvert[i]
    std::array<int, 3> nsigned{};  // signed id reading wnew -> bvert[i]
    for (int i = 0; i < 3; ++i) {
      int t = 3 - axis[i] - axis[(i + 1) % 3];
      const Germ& g = ag[t];
      int id = static_cast<int>(out.edge_ends.size());
      if (g.end == 0) {
        out.edge_ends.emplace_back(wnew, vmap[bvert[i]]);
        nsigned[i] = id + 1;
      } else {
        out.edge_ends.emplace_back(vmap[bvert[i]], wnew);
        nsigned[i] = -(id + 1);
      }
      out.edge_image.push_back(g.edge);
    }
    auto signed_old = [&](int d) {
      int s = emap[d >> 1] + 1;
      return (d & 1) == 0 ? s : -s;
    };
    for (int f = 0; f < static_cast<int>(raw.cells.size()); ++f) {
      if (f == fid[0] || f == fid[1] || f == fid[2]) continue;
      RawDiagram::Cell c = raw.cells[f];
      for (int& s : c.boundary) {
        int d = dart_of(s);
        s = signed_old(d);
      }
      out.cells.push_back(std::move(c));
    }
    // replacement square through target(rot[i]): wnew -> b_i -> a_i -> b_{i-1} -> wnew
    for (int i = 0; i < 3; ++i) {
      int prev = (i + 2) % 3;
      int t = 3 - axis[(i + 1) % 3] - axis[(i + 2) % 3];
      RawDiagram::Cell c;
      c.kind = "square";
      c.image = X.face(3, cube, t, (abits >> t) & 1u);
      c.boundary = {nsigned[i], signed_old(g2[i]), signed_old(g1[prev]), -nsigned[prev]};
      out.cells.push_back(std::move(c));
    }
    for (int s : raw.outer) out.outer.push_back(signed_old(dart_of(s)));
    auto res = validate_diagram(std::move(out), X, D.presentation());
    if (!ok(res)) return Error{"NoCube", "replacement does not embed: " + error(res).detail};
    return res;
  }
}

Result<DiscDiagram> absorb_square(const DiscDiagram& D, int cone_cell, int square) {
  if (cone_cell < 0 || cone_cell >= D.cell_count() || square < 0 || square >= D.cell_count() ||
      cone_cell == square)
    return Error{"NotAbsorbable", "cell ids out of range"};
  if (D.cell(cone_cell).kind != "cone" || D.cell(square).kind != "square")
    return Error{"NotAbsorbable", "cells are not a cone-cell and a square"};

  // a corner of the square whose two sides are shared consecutively with the
  // cone-cell, meeting at an interior valence-2 vertex
  int da = -1, db = -1;
  for (int d : D.face_darts(square)) {
    int d2 = D.next(d);
    if (D.face_of(DiscDiagram::twin(d)) != cone_cell) continue;
    if (D.face_of(DiscDiagram::twin(d2)) != cone_cell) continue;
    if (D.next(DiscDiagram::twin(d2)) != DiscDiagram::twin(d)) continue;
    int B = D.target(d);
    if (D.boundary_passes(B) != 0 || D.darts_at(B).size() != 2) continue;
    da = d;
    db = d2;
    break;
  }
  if (da < 0) return Error{"NotAbsorbable", "no shared corner between the cells"};

  int B = D.target(da);
  int d3 = D.next(db), d4 = D.next(d3);
  const RawDiagram& raw = D.raw();
  int e1 = da >> 1, e2 = db >> 1;

  RawDiagram out;
  std::vector<int> vmap(raw.vertices, -1), emap(raw.edge_ends.size(), -1);
  for (int v = 0; v < raw.vertices; ++v) {
    if (v == B) continue;
    vmap[v] = out.vertices++;
    out.vertex_image.push_back(raw.vertex_image[v]);
  }
  for (int e = 0; e < static_cast<int>(raw.edge_ends.size()); ++e) {
    if (e == e1 || e == e2) continue;
    emap[e] = static_cast<int>(out.edge_ends.size());
    out.edge_ends.emplace_back(vmap[raw.edge_ends[e].first], vmap[raw.edge_ends[e].second]);
    out.edge_image.push_back(raw.edge_image[e]);
  }
  auto signed_old = [&](int d) {
    int s = emap[d >> 1] + 1;
    return (d & 1) == 0 ? s : -s;
  };
  for (int f = 0; f < static_cast<int>(raw.cells.size()); ++f) {
    if (f == cone_cell || f == square) continue;
    RawDiagram::Cell c = raw.cells[f];
    for (int& s : c.boundary) s = signed_old(dart_of(s));
    out.cells.push_back(std::move(c));
  }
  {
    RawDiagram::Cell c;
    c.kind = "cone";
    c.image = D.cell(cone_cell).image;
    // walk the cone boundary, replacing [twin(db), twin(da)] by [d3, d4]
    const auto& ds = D.face_darts(cone_cell);
    int M = static_cast<int>(ds.size());
    int p = -1;
    for (int i = 0; i < M; ++i)
      if (ds[i] == DiscDiagram::twin(db)) p = i;
    c.boundary.push_back(signed_old(d3));
    c.boundary.push_back(signed_old(d4));
    for (int q = (p + 2) % M; q != p; q = (q + 1) % M) c.boundary.push_back(signed_old(ds[q]));
    out.cells.push_back(std::move(c));
  }
  for (int s : raw.outer) out.outer.push_back(signed_old(dart_of(s)));
  auto res = validate_diagram(std::move(out), D.base(), D.presentation());
  if (!ok(res))
    return Error{"NotAbsorbable", "rerouted boundary does not lift: " + error(res).detail};
  return res;
}

std::optional<DiscDiagram> cancel_square_pair(const DiscDiagram& D) {
  const RawDiagram& raw = D.raw();
  for (int e = 0; e < D.edge_count(); ++e) {
    int f1 = D.face_of(2 * e), f2 = D.face_of(2 * e + 1);
    if (f1 == f2 || f1 == D.outer_face() || f2 == D.outer_face()) continue;
    if (D.cell(f1).kind != "square" || D.cell(f2).kind != "square") continue;
    if (D.cell(f1).image != D.cell(f2).image) continue;
    std::array<int, 3> a{}, b{};
    a[0] = D.next(2 * e);
    a[1] = D.next(a[0]);
    a[2] = D.next(a[1]);
    b[0] = D.next(2 * e + 1);
    b[1] = D.next(b[0]);
    b[2] = D.next(b[1]);
    bool mirror = true;
    for (int j = 0; j < 3 && mirror; ++j) mirror = D.letter(a[j]) == -D.letter(b[2 - j]);
    if (!mirror) continue;

    // zip the two remaining paths together
    std::vector<int> vuf(raw.vertices);
    for (int v = 0; v < raw.vertices; ++v) vuf[v] = v;
    std::function<int(int)> vfind = [&](int v) {
      while (vuf[v] != v) v = vuf[v] = vuf[vuf[v]];
      return v;
    };
    int M = static_cast<int>(raw.edge_ends.size());
    std::vector<int> euf(M);
    std::vector<char> eflip(M, 0);
    for (int i = 0; i < M; ++i) euf[i] = i;
    auto efind = [&](int x) {
      char f = 0;
      while (euf[x] != x) {
        f ^= eflip[x];
        x = euf[x];
      }
      return std::pair<int, char>{x, f};
    };
    bool bad = false;
    for (int j = 0; j < 3 && !bad; ++j) {
      int ea = a[j] >> 1, eb = b[2 - j] >> 1;
      // dart a[j] must become the twin of dart b[2-j]
      char fa_dir = static_cast<char>(a[j] & 1), fb_dir = static_cast<char>(b[2 - j] & 1);
      auto [ra, fa] = efind(ea);
      auto [rb, fb] = efind(eb);
      char want = fa_dir ^ fb_dir ^ 1 ^ fa ^ fb;  // relative flip between roots
      if (ra == rb) {
        if (want != 0) bad = true;
        continue;
      }
      euf[rb] = ra;
      eflip[rb] = want;
      vuf[vfind(D.origin(a[j]))] = vfind(D.target(b[2 - j]));
      vuf[vfind(D.target(a[j]))] = vfind(D.origin(b[2 - j]));
    }
    if (bad) continue;

    RawDiagram out;
    std::vector<int> vdense(raw.vertices, -1), edense(M, -1);
    for (int v = 0; v < raw.vertices; ++v) {
      int r = vfind(v);
      if (vdense[r] < 0) {
        vdense[r] = out.vertices++;
        out.vertex_image.push_back(raw.vertex_image[r]);
      }
    }
    for (int x = 0; x < M; ++x) {
      if (x == e || efind(x).first != x) continue;
      edense[x] = static_cast<int>(out.edge_ends.size());
      out.edge_ends.emplace_back(vdense[vfind(raw.edge_ends[x].first)],
                                 vdense[vfind(raw.edge_ends[x].second)]);
      out.edge_image.push_back(raw.edge_image[x]);
    }
    auto remap = [&](int s) {
      auto [r, f] = efind(std::abs(s) - 1);
      int v = edense[r] + 1;
      return (s > 0) != static_cast<bool>(f) ? v : -v;
    };
    for (int f = 0; f < static_cast<int>(raw.cells.size()); ++f) {
      if (f == f1 || f == f2) continue;
      RawDiagram::Cell c = raw.cells[f];
      for (int& s : c.boundary) s = remap(s);
      out.cells.push_back(std::move(c));
    }
    for (int s : raw.outer) out.outer.push_back(remap(s));
    auto res = validate_diagram(std::move(out), D.base(), D.presentation());
    if (ok(res)) return value(res);
  }
  return std::nullopt;
}

DiscDiagram reduce(const DiscDiagram& D, const DiagramBudget& budget) {
  DiscDiagram cur = D;
  long long probes = 0;
  auto one_reduction = [](const DiscDiagram& d) -> std::optional<DiscDiagram> {
    if (auto nxt = cancel_square_pair(d)) return nxt;
    for (int c = 0; c < d.cell_count(); ++c) {
      if (d.cell(c).kind != "cone") continue;
      for (int s = 0; s < d.cell_count(); ++s) {
        if (d.cell(s).kind != "square") continue;
        auto r = absorb_square(d, c, s);
        if (ok(r)) return value(r);
      }
    }
    return std::nullopt;
  };
  for (;;) {
    if (auto nxt = one_reduction(cur)) {
      cur = *nxt;
      continue;
    }
    bool advanced = false;
    for (int v = 0; v < cur.vertex_count() && !advanced; ++v) {
      if (probes >= budget.max_states) break;
      auto h = hexagon_move(cur, v);
      if (!ok(h)) continue;
      ++probes;
      if (auto nxt = one_reduction(value(h))) {
        cur = *nxt;
        advanced = true;
      }
    }
    if (!advanced) break;
  }
  return cur;
}

}  // namespace cubsc
