#include "cubsc/ball.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "cubsc/words.hpp"

namespace cubsc {

bool SubComplex::has_vertex(int v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}
bool SubComplex::has_edge(int e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

namespace {

void sort_unique(std::vector<int>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

// all edges of d-cube c: freeze every axis but one
std::vector<int> edges_of_cube(const CubeComplex& X, int d, int c) {
  if (d == 1) return {c};
  std::vector<int> out;
  for (int a = 0; a < d; ++a) {
    for (unsigned bits = 0; bits < (1u << d); ++bits) {
      if ((bits >> a) & 1u) continue;
      int cur = c, curdim = d;
      for (int b = d - 1; b >= 0; --b) {
        if (b == a) continue;
        cur = X.faces(curdim, cur)[2 * b + ((bits >> b) & 1u)];
        --curdim;
      }
      out.push_back(cur);
    }
  }
  sort_unique(out);
  return out;
}

// development workspace: vertex/edge instances with union-find folding
struct Builder {
  const CubeComplex& X;
  int R;

  std::vector<int> vparent, vimage, vdist;
  std::vector<std::map<Germ, int>> out;  // per vertex root: base germ -> edge instance
  std::vector<int> eparent, eimage;
  std::vector<std::array<int, 2>> eends;
  std::vector<std::pair<int, int>> pending;
  bool changed = false;

  Builder(const CubeComplex& base, int basepoint, int radius) : X(base), R(radius) {
    new_vertex(basepoint, 0);
  }

  int vfind(int a) {
    while (vparent[a] != a) a = vparent[a] = vparent[vparent[a]];
    return a;
  }
  int efind(int a) {
    while (eparent[a] != a) a = eparent[a] = eparent[eparent[a]];
    return a;
  }

  int new_vertex(int img, int d) {
    vparent.push_back(static_cast<int>(vparent.size()));
    vimage.push_back(img);
    vdist.push_back(d);
    out.emplace_back();
    return static_cast<int>(vparent.size()) - 1;
  }

  // edge instance over base germ g leaving v; creates the far vertex
  int new_edge(int v, Germ g) {
    const int img = g.edge;
    const int far_img = X.endpoint(img, 1 - g.end);
    const int u = new_vertex(far_img, vdist[v] + 1);
    eparent.push_back(static_cast<int>(eparent.size()));
    eimage.push_back(img);
    std::array<int, 2> ends{};
    ends[g.end] = v;
    ends[1 - g.end] = u;
    eends.push_back(ends);
    const int e = static_cast<int>(eparent.size()) - 1;
    out[v][g] = e;
    out[u][Germ{img, 1 - g.end}] = e;
    changed = true;
    return e;
  }

  int ensure_edge(int v, Germ g) {
    auto it = out[v].find(g);
    if (it != out[v].end()) return efind(it->second);
    return new_edge(v, g);
  }

  int far_end(int e, Germ g) { return vfind(eends[efind(e)][1 - g.end]); }

  void merge_edges(int a, int b) {
    a = efind(a);
    b = efind(b);
    if (a == b) return;
    assert(eimage[a] == eimage[b]);
    eparent[b] = a;
    pending.emplace_back(eends[a][0], eends[b][0]);
    pending.emplace_back(eends[a][1], eends[b][1]);
    changed = true;
  }

  void merge_vertices(int a, int b) {
    a = vfind(a);
    b = vfind(b);
    if (a == b) return;
    assert(vimage[a] == vimage[b]);
    if (out[a].size() < out[b].size()) std::swap(a, b);
    vparent[b] = a;
    vdist[a] = std::min(vdist[a], vdist[b]);
    for (auto& [g, e] : out[b]) {
      auto it = out[a].find(g);
      if (it == out[a].end())
        out[a][g] = e;
      else
        merge_edges(it->second, e);
    }
    out[b].clear();
    changed = true;
  }

  void drain() {
    while (!pending.empty()) {
      auto [a, b] = pending.back();
      pending.pop_back();
      merge_vertices(a, b);
    }
  }

  void recompute_dist() {
    for (auto& d : vdist) d = -1;
    std::queue<int> q;
    const int root = vfind(0);
    vdist[root] = 0;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto& [g, e] : out[v]) {
        int u = far_end(e, g);
        if (vdist[u] == -1) {
          vdist[u] = vdist[v] + 1;
          q.push(u);
        }
      }
    }
  }

  void grow_and_complete() {
    // snapshot roots; new vertices this pass wait for the next one
    std::vector<int> roots;
    for (int v = 0; v < static_cast<int>(vparent.size()); ++v)
      if (vfind(v) == v && vdist[v] != -1 && vdist[v] <= R - 1) roots.push_back(v);
    for (int v : roots) {
      if (vfind(v) != v) continue;
      for (const Germ& g : X.germs_at(vimage[vfind(v)])) ensure_edge(vfind(v), g);
    }
    for (int v0 : roots) {
      int v = vfind(v0);
      if (v != v0) continue;
      for (const Corner& k : X.corners_at(vimage[v])) {
        if (k.dim != 2) continue;
        auto germs = X.corner_germs(2, k.cube, k.bits);
        const Germ g0 = germs[0], g1 = germs[1];
        auto i0 = out[v].find(g0);
        auto i1 = out[v].find(g1);
        if (i0 == out[v].end() || i1 == out[v].end()) continue;
        const int s = k.cube;
        const int b0 = static_cast<int>(k.bits & 1u), b1 = static_cast<int>((k.bits >> 1) & 1u);
        const int u0 = far_end(i0->second, g0);
        const int u1 = far_end(i1->second, g1);
        const Germ g1p{X.face(2, s, 0, 1 - b0), g1.end};
        const Germ g0p{X.face(2, s, 1, 1 - b1), g0.end};
        const int e1p = ensure_edge(u0, g1p);
        const int e0p = ensure_edge(vfind(u1), g0p);
        const int w0 = far_end(e1p, g1p);
        const int w1 = far_end(e0p, g0p);
        pending.emplace_back(w0, w1);
        drain();
      }
    }
  }

  void run() {
    while (true) {
      changed = false;
      grow_and_complete();
      drain();
      recompute_dist();
      if (!changed) break;
    }
  }
};

}  // namespace

Result<DevelopedBall> develop_ball(const CubeComplex& X, int basepoint, int R) {
  auto npc = check_npc(X);
  if (!npc.npc)
    return Error{"NotNpc", "link violation (" + npc.kind + ") at base vertex " +
                               std::to_string(npc.vertex)};
  Builder b(X, basepoint, R);
  b.run();

  DevelopedBall ball;
  ball.base_ = &X;
  ball.basepoint_ = basepoint;
  ball.radius_ = R;

  // breadth-first export in germ order: vertex ids follow lex-least paths
  std::map<int, int> vid;  // builder root -> exported id
  std::vector<int> order;  // exported id -> builder root
  std::vector<Word> paths;
  {
    const int root = b.vfind(0);
    vid[root] = 0;
    order.push_back(root);
    paths.push_back({});
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto& [g, e] : b.out[v]) {
        int u = b.far_end(e, g);
        if (b.vdist[u] > R || b.vdist[u] == -1) continue;
        if (vid.count(u)) continue;
        vid[u] = static_cast<int>(order.size());
        order.push_back(u);
        Word p = paths[vid[v]];
        p.push_back(g.end == 0 ? g.edge + 1 : -(g.edge + 1));
        paths.push_back(std::move(p));
        q.push(u);
      }
    }
  }

  RawComplex raw;
  raw.cubes.resize(X.dim() + 1);
  ball.covering_.resize(X.dim() + 1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    raw.cubes[0].push_back({});
    ball.covering_[0].push_back(b.vimage[order[i]]);
    ball.dist_.push_back(b.vdist[order[i]]);
    ball.names_.push_back(word_to_string(paths[i]));
  }
  raw.labels.push_back(ball.names_);

  std::map<int, int> eid;  // edge root -> exported id
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto& [g, e] : b.out[order[i]]) {
      int er = b.efind(e);
      if (eid.count(er)) continue;
      int u = b.far_end(e, g);
      if (!vid.count(u)) continue;
      eid[er] = static_cast<int>(raw.cubes[1].size());
      raw.cubes[1].push_back({vid[b.vfind(b.eends[er][0])], vid[b.vfind(b.eends[er][1])]});
      ball.covering_[1].push_back(b.eimage[er]);
    }
  }

  // lifted cubes of dimension >= 2: walk from every corner, dedupe by the
  // corner-vertex vector over the base cube's own corner coordinates
  std::vector<std::map<std::pair<int, std::vector<int>>, int>> known(X.dim() + 1);
  for (int d = 2; d <= X.dim(); ++d) {
    for (std::size_t v_out = 0; v_out < order.size(); ++v_out) {
      const int v = order[v_out];
      for (const Corner& k : X.corners_at(b.vimage[v])) {
        if (k.dim != d) continue;
        // corners[bits] = builder root at base corner bits, walked by flipping
        // axes in ascending order from k.bits
        std::vector<int> corners(1u << d, -1);
        corners[k.bits] = v;
        bool complete = true;
        for (unsigned target = 0; target < (1u << d) && complete; ++target) {
          unsigned cur = k.bits;
          int at = v;
          for (int a = 0; a < d && complete; ++a) {
            if (((cur ^ target) >> a & 1u) == 0) continue;
            // germ along axis a at corner cur of base cube k.cube
            int edge = k.cube, dim = d;
            for (int bb = d - 1; bb >= 0; --bb) {
              if (bb == a) continue;
              edge = X.faces(dim, edge)[2 * bb + ((cur >> bb) & 1u)];
              --dim;
            }
            Germ g{edge, static_cast<int>((cur >> a) & 1u)};
            auto it = b.out[at].find(g);
            if (it == b.out[at].end()) {
              complete = false;
              break;
            }
            at = b.far_end(it->second, g);
            cur ^= 1u << a;
          }
          if (complete) {
            if (corners[target] != -1 && corners[target] != at) complete = false;
            corners[target] = at;
          }
        }
        if (!complete) continue;
        bool exported = true;
        for (int c : corners)
          if (!vid.count(c)) exported = false;
        if (!exported) continue;
        std::vector<int> key_verts;
        for (int c : corners) key_verts.push_back(vid[c]);
        auto key = std::make_pair(k.cube, key_verts);
        if (known[d].count(key)) continue;
        known[d][key] = -1;  // assigned below in deterministic key order
      }
    }
    // assign ids sorted by key for determinism
    for (auto& [key, id] : known[d]) {
      id = static_cast<int>(raw.cubes[d].size());
      raw.cubes[d].push_back({});  // faces resolved in a second pass
      ball.covering_[d].push_back(key.first);
    }
  }
  // resolve face arrays top-down now that every lifted cube has an id
  // edges are keyed separately: (base edge, end0 vertex, end1 vertex)
  std::map<std::tuple<int, int, int>, int> edge_key;
  for (std::size_t e = 0; e < raw.cubes[1].size(); ++e)
    edge_key[{ball.covering_[1][e], raw.cubes[1][e][0], raw.cubes[1][e][1]}] =
        static_cast<int>(e);
  for (int d = 2; d <= X.dim(); ++d) {
    for (auto& [key, id] : known[d]) {
      const int s = key.first;
      const auto& kv = key.second;
      std::vector<int> faces;
      for (int a = 0; a < d; ++a) {
        for (int side = 0; side < 2; ++side) {
          const int fbase = X.face(d, s, a, side);
          std::vector<int> sub;
          for (unsigned bits = 0; bits < (1u << (d - 1)); ++bits) {
            // insert `side` at axis a
            unsigned full = 0;
            for (int x = 0, j = 0; x < d; ++x)
              full |= (x == a ? static_cast<unsigned>(side) : ((bits >> j++) & 1u)) << x;
            sub.push_back(kv[full]);
          }
          if (d == 2) {
            // lifts preserve edge sides: sub[t] is the side-t end of the
            // lifted face edge
            auto it = edge_key.find({fbase, sub[0], sub[1]});
            assert(it != edge_key.end());
            faces.push_back(it->second);
          } else {
            auto it = known[d - 1].find({fbase, sub});
            assert(it != known[d - 1].end());
            faces.push_back(it->second);
          }
        }
      }
      raw.cubes[d][id] = std::move(faces);
    }
  }

  auto validated = validate_complex(raw);
  if (!ok(validated)) throw std::logic_error("development export failed: " + error(validated).detail);
  ball.complex_ = value(validated);

  // germ lifts per exported vertex
  ball.germ_lift_.resize(order.size());
  for (std::size_t e = 0; e < ball.complex_.size(1); ++e) {
    for (int end = 0; end < 2; ++end) {
      int v = ball.complex_.endpoint(static_cast<int>(e), end);
      ball.germ_lift_[v][Germ{ball.covering_[1][e], end}] = Germ{static_cast<int>(e), end};
    }
  }

  // hyperplanes: square-opposite-edge classes over the exported complex
  const auto& C = ball.complex_;
  std::vector<int> hp(C.size(1));
  for (std::size_t e = 0; e < hp.size(); ++e) hp[e] = static_cast<int>(e);
  std::vector<int> hrank(hp.size(), 0);
  auto hfind = [&](int a) {
    while (hp[a] != a) a = hp[a] = hp[hp[a]];
    return a;
  };
  auto hunion = [&](int a, int b) {
    a = hfind(a);
    b = hfind(b);
    if (a == b) return;
    if (hrank[a] < hrank[b]) std::swap(a, b);
    hp[b] = a;
    if (hrank[a] == hrank[b]) ++hrank[a];
  };
  for (std::size_t sq = 0; sq < C.size(2); ++sq) {
    const auto& f = C.faces(2, static_cast<int>(sq));
    hunion(f[0], f[1]);
    hunion(f[2], f[3]);
  }
  std::map<int, int> hid;
  ball.edge_hyperplane_.resize(C.size(1));
  for (std::size_t e = 0; e < C.size(1); ++e) {
    int r = hfind(static_cast<int>(e));
    if (!hid.count(r)) {
      hid[r] = static_cast<int>(ball.hyperplanes_.size());
      ball.hyperplanes_.emplace_back();
    }
    ball.edge_hyperplane_[e] = hid[r];
    ball.hyperplanes_[hid[r]].dual_edges.push_back(static_cast<int>(e));
  }
  for (auto& h : ball.hyperplanes_) {
    std::set<int> dual(h.dual_edges.begin(), h.dual_edges.end());
    std::set<std::pair<int, int>> closure;
    std::vector<std::pair<int, int>> stack;
    for (int d = 1; d <= C.dim(); ++d) {
      for (std::size_t c = 0; c < C.size(d); ++c) {
        auto edges = edges_of_cube(C, d, static_cast<int>(c));
        if (std::any_of(edges.begin(), edges.end(), [&](int e) { return dual.count(e) > 0; }))
          stack.push_back({d, static_cast<int>(c)});
      }
    }
    std::set<int> cverts, cedges;
    while (!stack.empty()) {
      auto [d, c] = stack.back();
      stack.pop_back();
      if (d == 0) {
        cverts.insert(c);
        continue;
      }
      if (d == 1 && !cedges.insert(c).second) continue;
      if (d >= 2 && !closure.insert({d, c}).second) continue;
      for (int i = 0; i < 2 * d; ++i) stack.push_back({d - 1, C.faces(d, c)[i]});
    }
    h.carrier.vertices.assign(cverts.begin(), cverts.end());
    h.carrier.edges.assign(cedges.begin(), cedges.end());
    h.carrier.cubes.assign(closure.begin(), closure.end());
  }

  return ball;
}

bool DevelopedBall::frontier(int d, int c) const {
  if (d == 0) return dist_[c] >= radius_ - 1;
  for (unsigned bits = 0; bits < (1u << d); ++bits)
    if (dist_[complex_.corner_vertex(d, c, bits)] >= radius_ - 1) return true;
  return false;
}

std::optional<Germ> DevelopedBall::lift_germ(int v, Germ base_germ) const {
  auto it = germ_lift_[v].find(base_germ);
  if (it == germ_lift_[v].end()) return std::nullopt;
  return it->second;
}

int DevelopedBall::across(int v, const Germ& ball_germ) const {
  (void)v;
  return complex_.endpoint(ball_germ.edge, 1 - ball_germ.end);
}

std::vector<int> DevelopedBall::bfs_dist(int from) const {
  std::vector<int> d(complex_.vertex_count(), -1);
  std::queue<int> q;
  d[from] = 0;
  q.push(from);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (const Germ& g : complex_.germs_at(v)) {
      int u = complex_.endpoint(g.edge, 1 - g.end);
      if (d[u] == -1) {
        d[u] = d[v] + 1;
        q.push(u);
      }
    }
  }
  return d;
}

int DevelopedBall::distance(int x, int y) const { return bfs_dist(x)[y]; }

Result<std::vector<int>> DevelopedBall::geodesic(int x, int y) const {
  if (!interior(x) || !interior(y)) return Error{"OutOfBall", "geodesic endpoints must be interior"};
  auto dy = bfs_dist(y);
  if (dy[x] == -1) return Error{"OutOfBall", "endpoints not connected in the ball"};
  std::vector<int> letters;
  int at = x;
  while (at != y) {
    bool moved = false;
    for (const Germ& g : complex_.germs_at(at)) {
      int u = complex_.endpoint(g.edge, 1 - g.end);
      if (dy[u] == dy[at] - 1) {
        letters.push_back(g.end == 0 ? g.edge + 1 : -(g.edge + 1));
        at = u;
        moved = true;
        break;
      }
    }
    if (!moved) return Error{"OutOfBall", "descent stalled"};
  }
  return letters;
}

Result<std::vector<int>> DevelopedBall::separating_hyperplanes(int x, int y) const {
  auto path = geodesic(x, y);
  if (!ok(path)) return error(path);
  std::vector<int> hs;
  for (int letter : value(path)) hs.push_back(edge_hyperplane_[std::abs(letter) - 1]);
  sort_unique(hs);
  return hs;
}

Result<int> DevelopedBall::median(int x, int y, int z) const {
  if (!interior(x) || !interior(y) || !interior(z))
    return Error{"OutOfBall", "median inputs must be interior"};
  auto dx = bfs_dist(x), dy = bfs_dist(y), dz = bfs_dist(z);
  const int dxy = dx[y], dxz = dx[z], dyz = dy[z];
  for (std::size_t v = 0; v < complex_.vertex_count(); ++v) {
    if (!interior(static_cast<int>(v))) continue;
    if (dx[v] + dy[v] == dxy && dx[v] + dz[v] == dxz && dy[v] + dz[v] == dyz)
      return static_cast<int>(v);
  }
  return Error{"OutOfBall", "median not visible in the ball interior"};
}

SubComplex DevelopedBall::span(std::vector<int> vertices) const {
  SubComplex s;
  sort_unique(vertices);
  s.vertices = std::move(vertices);
  for (std::size_t e = 0; e < complex_.size(1); ++e)
    if (s.has_vertex(complex_.endpoint(static_cast<int>(e), 0)) &&
        s.has_vertex(complex_.endpoint(static_cast<int>(e), 1)))
      s.edges.push_back(static_cast<int>(e));
  for (int d = 2; d <= complex_.dim(); ++d) {
    for (std::size_t c = 0; c < complex_.size(d); ++c) {
      bool in = true;
      for (unsigned bits = 0; bits < (1u << d) && in; ++bits)
        in = s.has_vertex(complex_.corner_vertex(d, static_cast<int>(c), bits));
      if (in) s.cubes.push_back({d, static_cast<int>(c)});
    }
  }
  return s;
}

Result<SubComplex> DevelopedBall::convex_hull(std::vector<int> S) const {
  for (int v : S)
    if (!interior(v)) return Error{"OutOfBall", "hull seeds must be interior"};
  if (S.empty()) return SubComplex{};
  sort_unique(S);
  std::set<int> T(S.begin(), S.end());
  std::map<int, std::vector<int>> dists;
  auto dist_of = [&](int v) -> const std::vector<int>& {
    auto it = dists.find(v);
    if (it == dists.end()) it = dists.emplace(v, bfs_dist(v)).first;
    return it->second;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<int> members(T.begin(), T.end());
    for (std::size_t i = 0; i < members.size() && !grew; ++i) {
      for (std::size_t j = i + 1; j < members.size() && !grew; ++j) {
        const auto& da = dist_of(members[i]);
        const auto& db = dist_of(members[j]);
        const int dab = da[members[j]];
        for (std::size_t v = 0; v < complex_.vertex_count(); ++v) {
          if (T.count(static_cast<int>(v))) continue;
          if (da[v] + db[v] == dab) {
            if (dist_[v] >= radius_) return Error{"HullTruncated", "hull reaches the frontier"};
            T.insert(static_cast<int>(v));
            grew = true;
          }
        }
      }
    }
  }
  for (int v : T)
    if (!interior(v)) return Error{"HullTruncated", "hull reaches the frontier"};
  return span({T.begin(), T.end()});
}

Result<int> DevelopedBall::gate(const SubComplex& C, int x) const {
  if (!interior(x)) return Error{"OutOfBall", "gate input must be interior"};
  if (C.vertices.empty()) return Error{"OutOfBall", "empty target"};
  for (int v : C.vertices)
    if (!interior(v)) return Error{"OutOfBall", "gate target must be interior"};
  auto dx = bfs_dist(x);
  int best = C.vertices.front();
  for (int v : C.vertices)
    if (dx[v] < dx[best]) best = v;
  auto dg = bfs_dist(best);
  for (int c : C.vertices)
    if (dx[c] != dx[best] + dg[c])
      throw std::invalid_argument("gate wants a convex target subcomplex");
  return best;
}

Elevation develop_elevation(const CubicalMap& f, const DevelopedBall& B, int y0, int v0) {
  const CubeComplex& Y = *f.source;
  const CubeComplex& C = B.complex();
  std::map<int, int> at;  // ball vertex -> Y vertex
  std::map<int, int> edge_at;
  std::queue<int> q;
  at[v0] = y0;
  q.push(v0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    int y = at[v];
    for (const Germ& gy : Y.germs_at(y)) {
      Germ gx{f.edge_image(gy.edge), gy.end};
      auto gb = B.lift_germ(v, gx);
      if (!gb) continue;
      int u = C.endpoint(gb->edge, 1 - gb->end);
      int yu = Y.endpoint(gy.edge, 1 - gy.end);
      edge_at.emplace(gb->edge, gy.edge);
      auto it = at.find(u);
      if (it == at.end()) {
        at[u] = yu;
        q.push(u);
      } else if (it->second != yu) {
        throw std::logic_error("elevation failed to embed");
      }
    }
  }
  Elevation el;
  el.seed = {y0, v0};
  for (auto& [v, y] : at) el.vertices.push_back({y, v});
  for (auto& [e, ye] : edge_at) el.edges.push_back({ye, e});
  for (auto& [v, y] : at) el.image.vertices.push_back(v);
  for (auto& [e, ye] : edge_at) el.image.edges.push_back(e);
  sort_unique(el.image.vertices);
  sort_unique(el.image.edges);
  // ball cubes covered by Y cubes
  std::set<std::pair<int, int>> cubes;
  for (auto& [v, y] : at) {
    for (const Corner& k : Y.corners_at(y)) {
      if (k.dim < 2) continue;
      auto gys = Y.corner_germs(k.dim, k.cube, k.bits);
      std::vector<Germ> gbs;
      bool all = true;
      for (const Germ& gy : gys) {
        auto gb = B.lift_germ(v, Germ{f.edge_image(gy.edge), gy.end});
        if (!gb || !el.image.has_edge(gb->edge)) {
          all = false;
          break;
        }
        gbs.push_back(*gb);
      }
      if (!all) continue;
      auto corner = C.corner_spanning(v, gbs);
      if (corner) cubes.insert({corner->dim, corner->cube});
    }
  }
  el.image.cubes.assign(cubes.begin(), cubes.end());
  return el;
}

std::vector<Elevation> elevations(const CubicalMap& f, const DevelopedBall& B, int core_radius) {
  const CubeComplex& Y = *f.source;
  const CubeComplex& C = B.complex();
  std::vector<Elevation> out;
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  for (std::size_t v0 = 0; v0 < C.vertex_count(); ++v0) {
    if (B.dist(static_cast<int>(v0)) > core_radius) continue;
    for (std::size_t y0 = 0; y0 < Y.vertex_count(); ++y0) {
      if (f.vertex_image(static_cast<int>(y0)) != B.image(0, static_cast<int>(v0))) continue;
      Elevation el = develop_elevation(f, B, static_cast<int>(y0), static_cast<int>(v0));
      if (!seen.insert({el.image.vertices, el.image.edges}).second) continue;
      out.push_back(std::move(el));
    }
  }
  return out;
}

SubComplex proj(const DevelopedBall& B, const SubComplex& U, const SubComplex& V) {
  std::set<int> walls;
  for (int e : U.edges) walls.insert(B.edge_hyperplane(e));
  SubComplex out;
  out.vertices = V.vertices;
  for (int e : V.edges)
    if (walls.count(B.edge_hyperplane(e))) out.edges.push_back(e);
  for (auto [d, c] : V.cubes) {
    auto edges = edges_of_cube(B.complex(), d, c);
    if (std::all_of(edges.begin(), edges.end(), [&](int e) { return out.has_edge(e); }))
      out.cubes.push_back({d, c});
  }
  return out;
}

int intrinsic_diameter(const DevelopedBall& B, const SubComplex& S) {
  const CubeComplex& C = B.complex();
  std::map<int, std::vector<int>> adj;
  for (int v : S.vertices) adj[v];
  for (int e : S.edges) {
    adj[C.endpoint(e, 0)].push_back(C.endpoint(e, 1));
    adj[C.endpoint(e, 1)].push_back(C.endpoint(e, 0));
  }
  int diam = 0;
  for (auto& [src, _] : adj) {
    std::map<int, int> d;
    std::queue<int> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[v])
        if (!d.count(u)) {
          d[u] = d[v] + 1;
          diam = std::max(diam, d[u]);
          q.push(u);
        }
    }
  }
  return diam;
}

std::vector<SubComplex> components(const DevelopedBall& B, const SubComplex& S) {
  const CubeComplex& C = B.complex();
  std::map<int, std::vector<int>> adj;
  for (int v : S.vertices) adj[v];
  for (int e : S.edges) {
    adj[C.endpoint(e, 0)].push_back(C.endpoint(e, 1));
    adj[C.endpoint(e, 1)].push_back(C.endpoint(e, 0));
  }
  std::map<int, int> comp;
  int n = 0;
  for (auto& [v, _] : adj) {
    if (comp.count(v)) continue;
    std::queue<int> q;
    comp[v] = n;
    q.push(v);
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      for (int u : adj[a])
        if (!comp.count(u)) {
          comp[u] = n;
          q.push(u);
        }
    }
    ++n;
  }
  std::vector<SubComplex> out(n);
  for (int v : S.vertices) out[comp[v]].vertices.push_back(v);
  for (int e : S.edges) out[comp[C.endpoint(e, 0)]].edges.push_back(e);
  for (auto [d, c] : S.cubes)
    out[comp[C.corner_vertex(d, c, 0)]].cubes.push_back({d, c});
  for (auto& s : out) {
    sort_unique(s.vertices);
    sort_unique(s.edges);
    std::sort(s.cubes.begin(), s.cubes.end());
  }
  return out;
}

namespace {

// subdivision cell: carrier cube plus one state per carrier axis
// (0 = midpoint, 1 = low half, 2 = high half); dimension = #half states
struct SubCell {
  int cdim = 0, cube = 0;
  std::vector<int> pattern;
  auto operator<=>(const SubCell&) const = default;
};

SubCell descend(const CubeComplex& X, SubCell cell, int axis, int side) {
  // freeze `axis` (a half state) at `side`: the outer side drops to the
  // carrier face, the inner side becomes the midpoint
  const int state = cell.pattern[axis];
  if ((state == 1 && side == 0) || (state == 2 && side == 1)) {
    SubCell down;
    down.cdim = cell.cdim - 1;
    down.cube = X.face(cell.cdim, cell.cube, axis, state == 1 ? 0 : 1);
    for (int a = 0; a < cell.cdim; ++a)
      if (a != axis) down.pattern.push_back(cell.pattern[a]);
    return down;
  }
  cell.pattern[axis] = 0;
  return cell;
}

}  // namespace

CubeComplex subdivide(const CubeComplex& X) {
  std::vector<std::map<SubCell, int>> ids;  // per dimension
  int maxdim = X.dim();
  ids.resize(maxdim + 1);
  for (int cd = 0; cd <= maxdim; ++cd) {
    for (std::size_t c = 0; c < X.size(cd); ++c) {
      std::vector<int> pattern(cd, 0);
      while (true) {
        int dim = 0;
        for (int s : pattern)
          if (s != 0) ++dim;
        SubCell cell{cd, static_cast<int>(c), pattern};
        ids[dim].emplace(cell, 0);
        int i = 0;
        for (; i < cd; ++i) {
          if (++pattern[i] < 3) break;
          pattern[i] = 0;
        }
        if (i == cd) break;
      }
    }
  }
  for (auto& layer : ids) {
    int n = 0;
    for (auto& [cell, id] : layer) id = n++;
  }
  RawComplex raw;
  raw.cubes.resize(maxdim + 1);
  for (int d = 0; d <= maxdim; ++d) {
    raw.cubes[d].resize(ids[d].size());
    for (auto& [cell, id] : ids[d]) {
      std::vector<int> faces;
      for (int a = 0; a < cell.cdim; ++a) {
        if (cell.pattern[a] == 0) continue;
        for (int side = 0; side < 2; ++side) {
          SubCell down = descend(X, cell, a, side);
          int ddim = 0;
          for (int s : down.pattern)
            if (s != 0) ++ddim;
          faces.push_back(ids[ddim].at(down));
        }
      }
      raw.cubes[d][id] = std::move(faces);
    }
  }
  auto r = validate_complex(raw);
  if (!ok(r)) throw std::logic_error("subdivision failed: " + error(r).detail);
  return value(r);
}

}  // namespace cubsc
