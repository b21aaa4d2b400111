#include "cubsc/rectify.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

namespace cubsc {

namespace {

bool face_is_square(const DiscDiagram& D, int f) {
  return f != D.outer_face() && D.cell(f).kind == "square";
}

bool face_is_cone(const DiscDiagram& D, int f) {
  return f != D.outer_face() && D.cell(f).kind == "cone";
}

int dart_pos(const DiscDiagram& D, int f, int d) {
  const auto& fd = D.face_darts(f);
  for (int i = 0; i < static_cast<int>(fd.size()); ++i)
    if (fd[i] == d) return i;
  throw std::logic_error("dart not on face");
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Boundary cycle of a union of squares with some internal edges deleted.
// Returns nothing when the walk does not close over every kept dart.
std::optional<std::vector<int>> merged_cycle(const DiscDiagram& D, const std::set<int>& members,
                                             const std::set<int>& removed) {
  std::vector<int> all;
  for (int f : members)
    for (int d : D.face_darts(f))
      if (!removed.count(d >> 1)) all.push_back(d);
  if (all.empty()) return std::nullopt;
  int d0 = *std::min_element(all.begin(), all.end());
  std::vector<int> cyc;
  int d = d0;
  do {
    cyc.push_back(d);
    if (cyc.size() > all.size()) return std::nullopt;
    int x = D.next(d);
    while (removed.count(x >> 1)) x = D.next(DiscDiagram::twin(x));
    d = x;
  } while (d != d0);
  if (cyc.size() != all.size()) return std::nullopt;
  return cyc;
}

struct ReCelled {
  std::vector<RectCell> cells;
  std::vector<bool> removed;
};

// Component-level re-celling. Dual-curve runs use slots 2*square+axis where
// axis is the dart position parity in the square's 4-cycle; each square is an
// edge of the run graph joining its two runs. Bipartite run graphs with no
// closed run split the component along one color class into rectangles; the
// rest fuse into shards when the component closure is a disc, else square by
// square.
ReCelled re_cell(const DiscDiagram& D) {
  const int nc = D.cell_count();
  ReCelled out;
  out.removed.assign(D.edge_count(), false);

  for (int f = 0; f < nc; ++f) {
    if (!face_is_cone(D, f)) continue;
    RectCell c;
    c.kind = "cone";
    c.image = D.cell(f).image;
    c.cell = f;
    c.darts = D.face_darts(f);
    out.cells.push_back(std::move(c));
  }

  UnionFind comp(nc);
  for (int e = 0; e < D.edge_count(); ++e) {
    int f0 = D.face_of(2 * e), f1 = D.face_of(2 * e + 1);
    if (face_is_square(D, f0) && face_is_square(D, f1)) comp.unite(f0, f1);
  }

  std::vector<int> run_of(2 * nc, -1);
  std::vector<std::vector<int>> run_squares;
  std::vector<char> run_closed;
  auto trace_dir = [&](int f0, int pos0, int id) -> bool {
    int f = f0, pos = pos0;
    while (true) {
      int d = D.face_darts(f)[pos % 4];
      int t = DiscDiagram::twin(d);
      int g = D.face_of(t);
      if (!face_is_square(D, g)) return false;
      int q = dart_pos(D, g, t);
      int slot = 2 * g + (q & 1);
      if (run_of[slot] == id) return true;
      run_of[slot] = id;
      run_squares[id].push_back(g);
      f = g;
      pos = q + 2;
    }
  };
  for (int f = 0; f < nc; ++f) {
    if (!face_is_square(D, f)) continue;
    for (int axis = 0; axis < 2; ++axis) {
      if (run_of[2 * f + axis] >= 0) continue;
      int id = static_cast<int>(run_squares.size());
      run_squares.emplace_back();
      run_closed.push_back(0);
      run_of[2 * f + axis] = id;
      run_squares[id].push_back(f);
      bool closed = trace_dir(f, axis, id);
      if (!closed) closed = trace_dir(f, axis + 2, id);
      run_closed[id] = closed;
    }
  }

  std::map<int, std::vector<int>> comps;
  for (int f = 0; f < nc; ++f)
    if (face_is_square(D, f)) comps[comp.find(f)].push_back(f);

  for (auto& [root, sq] : comps) {
    (void)root;
    std::vector<int> runs;
    for (int f : sq) {
      runs.push_back(run_of[2 * f]);
      runs.push_back(run_of[2 * f + 1]);
    }
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());

    bool striped = true;
    for (int r : runs)
      if (run_closed[r]) striped = false;
    for (int f : sq)
      if (run_of[2 * f] == run_of[2 * f + 1]) striped = false;

    std::map<int, int> color;
    if (striped) {
      std::map<int, std::vector<int>> adj;
      for (int f : sq) {
        adj[run_of[2 * f]].push_back(run_of[2 * f + 1]);
        adj[run_of[2 * f + 1]].push_back(run_of[2 * f]);
      }
      std::vector<int> queue{runs[0]};
      color[runs[0]] = 0;
      for (std::size_t qi = 0; qi < queue.size() && striped; ++qi) {
        int r = queue[qi];
        for (int s : adj[r]) {
          auto it = color.find(s);
          if (it == color.end()) {
            color[s] = color[r] ^ 1;
            queue.push_back(s);
          } else if (it->second == color[r]) {
            striped = false;
            break;
          }
        }
      }
      if (striped && color.size() != runs.size()) striped = false;
    }

    std::vector<RectCell> made;
    bool ok = true;
    if (striped) {
      int n0 = 0, n1 = 0;
      for (int r : runs) (color[r] == 0 ? n0 : n1)++;
      int pick = n0 != n1 ? (n0 < n1 ? 0 : 1) : color[run_of[2 * sq[0]]];
      for (int r : runs) {
        if (color[r] != pick) continue;
        RectCell c;
        c.kind = "rectangle";
        c.squares = run_squares[r];
        std::sort(c.squares.begin(), c.squares.end());
        std::set<int> members(c.squares.begin(), c.squares.end());
        std::set<int> rem;
        for (int f : run_squares[r]) {
          int axis = run_of[2 * f] == r ? 0 : 1;
          for (int pos : {axis, axis + 2}) {
            int e = D.face_darts(f)[pos] >> 1;
            if (members.count(D.face_of(2 * e)) && members.count(D.face_of(2 * e + 1)))
              rem.insert(e);
          }
        }
        auto cyc = merged_cycle(D, members, rem);
        if (!cyc) {
          ok = false;
          break;
        }
        c.removed_edges.assign(rem.begin(), rem.end());
        c.darts = std::move(*cyc);
        made.push_back(std::move(c));
      }
    } else {
      std::set<int> vs, es;
      for (int f : sq)
        for (int d : D.face_darts(f)) {
          vs.insert(D.origin(d));
          es.insert(d >> 1);
        }
      int chi = static_cast<int>(vs.size()) - static_cast<int>(es.size()) +
                static_cast<int>(sq.size());
      ok = false;
      if (chi == 1) {
        std::set<int> members(sq.begin(), sq.end());
        std::set<int> rem;
        for (int e : es)
          if (members.count(D.face_of(2 * e)) && members.count(D.face_of(2 * e + 1)))
            rem.insert(e);
        auto cyc = merged_cycle(D, members, rem);
        if (cyc) {
          RectCell c;
          c.kind = "shard";
          c.squares = sq;
          c.removed_edges.assign(rem.begin(), rem.end());
          c.darts = std::move(*cyc);
          made.push_back(std::move(c));
          ok = true;
        }
      }
    }
    if (!ok) {
      made.clear();
      for (int f : sq) {
        RectCell c;
        c.kind = "shard";
        c.squares = {f};
        c.darts = D.face_darts(f);
        made.push_back(std::move(c));
      }
    }
    for (auto& c : made) {
      for (int e : c.removed_edges) out.removed[e] = true;
      out.cells.push_back(std::move(c));
    }
  }
  return out;
}

// ---- dual curves ----

struct Curve {
  std::map<int, int> cross;  // square -> axis bitmask
  std::vector<int> edges;
  std::vector<int> ends;  // darts whose face is not a square
  bool closed = false;
};

Curve trace_curve(const DiscDiagram& D, int e) {
  Curve c;
  c.edges.push_back(e);
  for (int s = 0; s < 2 && !c.closed; ++s) {
    int d = 2 * e + s;
    while (true) {
      int f = D.face_of(d);
      if (!face_is_square(D, f)) {
        c.ends.push_back(d);
        break;
      }
      int p = dart_pos(D, f, d);
      c.cross[f] |= 1 << (p & 1);
      int x = D.face_darts(f)[(p + 2) % 4];
      c.edges.push_back(x >> 1);
      d = DiscDiagram::twin(x);
      if ((d >> 1) == e) {
        c.closed = true;
        c.edges.pop_back();
        break;
      }
    }
  }
  std::sort(c.edges.begin(), c.edges.end());
  c.edges.erase(std::unique(c.edges.begin(), c.edges.end()), c.edges.end());
  return c;
}

struct CurveTable {
  const DiscDiagram* D;
  std::vector<int> id;
  std::vector<Curve> curves;
  explicit CurveTable(const DiscDiagram& d) : D(&d), id(d.edge_count(), -1) {}
  int of(int e) {
    if (id[e] < 0) {
      Curve c = trace_curve(*D, e);
      int k = static_cast<int>(curves.size());
      for (int x : c.edges) id[x] = k;
      curves.push_back(std::move(c));
    }
    return id[e];
  }
};

bool curves_cross(const Curve& a, const Curve& b) {
  const Curve& s = a.cross.size() <= b.cross.size() ? a : b;
  const Curve& t = a.cross.size() <= b.cross.size() ? b : a;
  for (const auto& [f, m] : s.cross) {
    auto it = t.cross.find(f);
    if (it == t.cross.end()) continue;
    if (((m & 1) && (it->second & 2)) || ((m & 2) && (it->second & 1))) return true;
  }
  return false;
}

// ---- padded-ladder recognition ----

struct GapRange {
  int start = 0, len = 0;
};

struct ArcItem {
  int cone = -1;
  int astart = 0, alen = 0;
  GapRange gap;  // outer-only stretch following the arc
};

struct ConeBlocks {
  std::vector<int> mu, nu, alpha, gamma;  // subarcs of the cone cycle
};

struct Slot {
  int chain;
  bool aocc, gocc;
};

struct ChainCtx {
  const DiscDiagram* D = nullptr;
  CurveTable* ct = nullptr;
  const std::vector<int>* bd = nullptr;
  std::vector<int> bidx;
  std::vector<ArcItem> items;
  std::map<int, int> acount;
  std::vector<std::vector<int>> comp_sq;
  std::vector<std::vector<int>> comp_outer;  // boundary indices touched
  std::vector<std::vector<int>> comp_cones;  // cone cells touched
};

// Checks one pseudorectangle: dual curves from each side end on the opposite
// side, curves ending on the mu side are pairwise non-crossing, and (when the
// region carries squares and no stray outer-outer edges) its boundary reads
// nu rho mu varrho in one of the two cyclic orders.
bool verify_region(const DiscDiagram& D, CurveTable& ct, const std::vector<int>& bd,
                   const std::vector<int>& bidx, const std::vector<int>* comp,
                   const std::vector<int>& nu_cone, const std::vector<int>& nu_out,
                   const std::vector<int>& mu_cone, const std::vector<int>& mu_out,
                   const std::vector<int>& rho_out, const std::vector<int>& varrho_out) {
  const int OUT = D.outer_face();
  std::set<int> nuC(nu_cone.begin(), nu_cone.end()), muC(mu_cone.begin(), mu_cone.end());
  std::set<int> nuO(nu_out.begin(), nu_out.end()), muO(mu_out.begin(), mu_out.end());
  std::set<int> rhoO(rho_out.begin(), rho_out.end()), vrO(varrho_out.begin(), varrho_out.end());

  auto classify = [&](int dart) -> int {
    int f = D.face_of(dart);
    if (f == OUT) {
      int i = bidx[dart];
      if (i < 0) return -1;
      if (nuO.count(i)) return 0;
      if (rhoO.count(i)) return 1;
      if (muO.count(i)) return 2;
      if (vrO.count(i)) return 3;
      return -1;
    }
    if (nuC.count(dart)) return 0;
    if (muC.count(dart)) return 2;
    return -1;
  };

  auto pair_ok = [&](const std::vector<int>& side, bool outer_ids, int want) -> bool {
    for (int x : side) {
      int d = outer_ids ? bd[x] : x;
      int ci = ct.of(d >> 1);
      const Curve& cv = ct.curves[ci];
      if (cv.closed || cv.ends.size() != 2) return false;
      int other;
      if (cv.ends[0] == d)
        other = cv.ends[1];
      else if (cv.ends[1] == d)
        other = cv.ends[0];
      else
        return false;
      if (classify(other) != want) return false;
    }
    return true;
  };
  if (!pair_ok(nu_out, true, 2)) return false;
  if (!pair_ok(nu_cone, false, 2)) return false;
  if (!pair_ok(mu_out, true, 0)) return false;
  if (!pair_ok(mu_cone, false, 0)) return false;
  if (!pair_ok(rho_out, true, 3)) return false;
  if (!pair_ok(varrho_out, true, 1)) return false;

  std::vector<int> mu_ids;
  for (int x : mu_out) mu_ids.push_back(ct.of(bd[x] >> 1));
  for (int d : mu_cone) mu_ids.push_back(ct.of(d >> 1));
  std::sort(mu_ids.begin(), mu_ids.end());
  mu_ids.erase(std::unique(mu_ids.begin(), mu_ids.end()), mu_ids.end());
  for (std::size_t a = 0; a < mu_ids.size(); ++a)
    for (std::size_t b = a; b < mu_ids.size(); ++b)
      if (curves_cross(ct.curves[mu_ids[a]], ct.curves[mu_ids[b]])) return false;

  if (!comp) {
    for (const auto* side : {&nu_out, &mu_out, &rho_out, &varrho_out})
      for (int x : *side)
        if (face_is_square(D, D.face_of(DiscDiagram::twin(bd[x])))) return false;
    std::vector<int> t;
    for (int d : nu_cone) t.push_back(DiscDiagram::twin(d));
    std::reverse(t.begin(), t.end());
    return t == mu_cone;
  }

  auto has_bridge = [&](const std::vector<int>& idxs) {
    for (int x : idxs)
      if (D.face_of(DiscDiagram::twin(bd[x])) == OUT) return true;
    return false;
  };
  if (has_bridge(nu_out) || has_bridge(mu_out) || has_bridge(rho_out) || has_bridge(varrho_out))
    return true;  // trees hang off the region; shape pinned by the pair conditions

  std::set<int> members(comp->begin(), comp->end());
  std::vector<int> bdarts;
  for (int f : *comp)
    for (int d : D.face_darts(f))
      if (!members.count(D.face_of(DiscDiagram::twin(d)))) bdarts.push_back(d);
  if (bdarts.empty()) return false;
  int d0 = *std::min_element(bdarts.begin(), bdarts.end());
  std::vector<int> lab;
  int d = d0;
  do {
    int c = classify(DiscDiagram::twin(d));
    if (c < 0) return false;
    lab.push_back(c);
    if (lab.size() > bdarts.size()) return false;
    int x = D.next(d);
    while (members.count(D.face_of(DiscDiagram::twin(x)))) x = D.next(DiscDiagram::twin(x));
    d = x;
  } while (d != d0);
  if (lab.size() != bdarts.size()) return false;

  std::array<int, 4> cnt{0, 0, 0, 0};
  for (int c : lab) cnt[c]++;
  if (cnt[0] != static_cast<int>(nu_cone.size() + nu_out.size())) return false;
  if (cnt[2] != static_cast<int>(mu_cone.size() + mu_out.size())) return false;
  if (cnt[1] != static_cast<int>(rho_out.size())) return false;
  if (cnt[3] != static_cast<int>(varrho_out.size())) return false;

  const int M = static_cast<int>(lab.size());
  std::vector<int> seq;
  for (int i = 0; i < M; ++i)
    if (lab[i] != lab[(i + M - 1) % M]) seq.push_back(lab[i]);
  if (seq.empty()) seq.push_back(lab[0]);
  std::set<int> once;
  for (int c : seq)
    if (!once.insert(c).second) return false;
  if (seq.size() > 2) {
    const std::array<std::array<int, 4>, 2> bases{{{0, 1, 2, 3}, {0, 3, 2, 1}}};
    bool okc = false;
    for (const auto& base : bases) {
      std::vector<int> t;
      for (int x : base)
        if (std::find(seq.begin(), seq.end(), x) != seq.end()) t.push_back(x);
      if (t.size() != seq.size()) continue;
      const int S = static_cast<int>(seq.size());
      for (int r = 0; r < S && !okc; ++r) {
        bool eq = true;
        for (int k = 0; k < S && eq; ++k) eq = seq[(r + k) % S] == t[k];
        okc = eq;
      }
      if (okc) break;
    }
    if (!okc) return false;
  }
  return true;
}

std::optional<LadderDecomposition> try_arrangement(const ChainCtx& X, const std::vector<int>& sigma,
                                                   const std::vector<Slot>& slots, int rot) {
  const DiscDiagram& D = *X.D;
  const auto& bd = *X.bd;
  const int L = static_cast<int>(bd.size());
  const int n = static_cast<int>(sigma.size());
  const int K = static_cast<int>(X.items.size());

  std::vector<int> aitem(n, -1), gitem(n, -1);
  for (int q = 0; q < K; ++q) {
    const Slot& s = slots[q];
    int it = (rot + q) % K;
    if (s.aocc) aitem[s.chain] = it;
    if (s.gocc) gitem[s.chain] = it;
  }
  for (int i = 0; i < n; ++i)
    if (aitem[i] < 0 || gitem[i] < 0) return std::nullopt;

  std::vector<GapRange> rho(n + 1), varrho(n + 1);
  GapRange gnear{}, gfar{};
  for (int q = 0; q < K; ++q) {
    const Slot& s = slots[q];
    const GapRange& g = X.items[(rot + q) % K].gap;
    bool use_a = s.aocc, use_g = s.gocc;
    if (s.aocc && s.gocc) {
      if (n == 1 || s.chain == 0)
        use_g = false;
      else
        use_a = false;
    }
    if (use_a) {
      if (s.chain < n - 1)
        rho[s.chain + 1] = g;
      else
        gfar = g;
    } else if (use_g) {
      if (s.chain >= 1)
        varrho[s.chain] = g;
      else
        gnear = g;
    }
  }

  auto in_item = [&](int bi, int it) {
    const ArcItem& A = X.items[it];
    return ((bi - A.astart) % L + L) % L < A.alen;
  };

  std::vector<ConeBlocks> cb(n);
  for (int i = 0; i < n; ++i) {
    int c = sigma[i];
    const auto& fd = D.face_darts(c);
    const int m = static_cast<int>(fd.size());
    bool merged = aitem[i] == gitem[i];
    std::vector<int> lab(m, 2);
    for (int p = 0; p < m; ++p) {
      int t = DiscDiagram::twin(fd[p]);
      if (D.face_of(t) != D.outer_face()) continue;
      int bi = X.bidx[t];
      if (bi >= 0 && in_item(bi, aitem[i]))
        lab[p] = 0;
      else if (bi >= 0 && !merged && in_item(bi, gitem[i]))
        lab[p] = 1;
      else
        return std::nullopt;
    }
    auto runs_of = [&](int want) {
      std::vector<std::pair<int, int>> rs;
      int total = 0;
      for (int p = 0; p < m; ++p) total += lab[p] == want;
      if (total == 0) return rs;
      if (total == m) {
        rs.push_back({0, m});
        return rs;
      }
      for (int p = 0; p < m; ++p)
        if (lab[p] == want && lab[(p + m - 1) % m] != want) {
          int len = 0;
          while (lab[(p + len) % m] == want) ++len;
          rs.push_back({p, len});
        }
      return rs;
    };
    auto span = [&](int s, int len) {
      std::vector<int> r;
      for (int k = 0; k < len; ++k) r.push_back(fd[(s + k) % m]);
      return r;
    };
    if (!merged) {
      auto ra = runs_of(0), rg = runs_of(1);
      if (ra.size() != 1 || rg.size() != 1) return std::nullopt;
      auto [a0, al] = ra[0];
      auto [g0, gl] = rg[0];
      // cycle order: gamma, nu, alpha reversed, mu reversed
      int nu0 = (g0 + gl) % m;
      int nul = ((a0 - nu0) % m + m) % m;
      int mu0 = (a0 + al) % m;
      int mul = ((g0 - mu0) % m + m) % m;
      if (gl + nul + al + mul != m) return std::nullopt;
      for (int k = 0; k < nul; ++k)
        if (lab[(nu0 + k) % m] != 2) return std::nullopt;
      for (int k = 0; k < mul; ++k)
        if (lab[(mu0 + k) % m] != 2) return std::nullopt;
      cb[i].gamma = span(g0, gl);
      cb[i].nu = span(nu0, nul);
      cb[i].alpha = span(a0, al);
      cb[i].mu = span(mu0, mul);
    } else {
      auto ro = runs_of(0);
      auto rx = runs_of(2);
      if (ro.size() != 1 || rx.size() > 1) return std::nullopt;
      auto [o0, ol] = ro[0];
      if (rx.empty()) {
        const ArcItem& A = X.items[aitem[i]];
        int t = DiscDiagram::twin(bd[(A.astart + A.alen - 1) % L]);
        o0 = -1;
        for (int p = 0; p < m; ++p)
          if (fd[p] == t) {
            o0 = p;
            break;
          }
        if (o0 < 0) return std::nullopt;
        ol = m;
      }
      if (ol == 0) return std::nullopt;
      if (n == 1 || i == 0) {
        int alen = ol >= 2 ? ol / 2 : 1;
        cb[i].alpha = span(o0, alen);
        cb[i].gamma = span((o0 + alen) % m, ol - alen);
        if (!rx.empty()) cb[i].nu = span(rx[0].first, rx[0].second);
      } else {
        int glen = ol / 2;
        cb[i].gamma = span(o0, glen);
        cb[i].alpha = span((o0 + glen) % m, ol - glen);
        if (!rx.empty()) cb[i].mu = span(rx[0].first, rx[0].second);
      }
    }
  }

  auto in_gap = [&](int bi, const GapRange& g) {
    return g.len > 0 && ((bi - g.start) % L + L) % L < g.len;
  };
  const int n_comp = static_cast<int>(X.comp_sq.size());
  std::vector<int> region_comp(n + 1, -1);
  for (int k = 0; k < n_comp; ++k) {
    int chosen = -1;
    for (int g = 0; g <= n; ++g) {
      bool ok = true;
      for (int bi : X.comp_outer[k]) {
        bool inr;
        if (g == 0)
          inr = in_gap(bi, gnear);
        else if (g == n)
          inr = in_gap(bi, gfar);
        else
          inr = in_gap(bi, rho[g]) || in_gap(bi, varrho[g]);
        if (!inr) {
          ok = false;
          break;
        }
      }
      if (ok)
        for (int cc : X.comp_cones[k]) {
          bool flank = (g >= 1 && cc == sigma[g - 1]) || (g <= n - 1 && cc == sigma[g]);
          if (!flank) {
            ok = false;
            break;
          }
        }
      if (!ok) continue;
      if (chosen >= 0) return std::nullopt;
      chosen = g;
    }
    if (chosen < 0) return std::nullopt;
    if (region_comp[chosen] >= 0) return std::nullopt;
    region_comp[chosen] = k;
  }

  auto idxs_of = [&](const GapRange& g) {
    std::vector<int> v;
    for (int k = 0; k < g.len; ++k) v.push_back((g.start + k) % L);
    return v;
  };
  const std::vector<int> none;
  for (int g = 1; g <= n - 1; ++g) {
    auto ri = idxs_of(rho[g]), vi = idxs_of(varrho[g]);
    for (int bi : ri)
      if (D.face_of(DiscDiagram::twin(bd[bi])) == D.outer_face()) return std::nullopt;
    for (int bi : vi)
      if (D.face_of(DiscDiagram::twin(bd[bi])) == D.outer_face()) return std::nullopt;
    const std::vector<int>* comp = region_comp[g] >= 0 ? &X.comp_sq[region_comp[g]] : nullptr;
    if (!verify_region(D, *X.ct, bd, X.bidx, comp, cb[g - 1].nu, none, cb[g].mu, none, ri, vi))
      return std::nullopt;
  }

  const std::vector<int>* comp0 = region_comp[0] >= 0 ? &X.comp_sq[region_comp[0]] : nullptr;
  const std::vector<int>* compn = region_comp[n] >= 0 ? &X.comp_sq[region_comp[n]] : nullptr;
  auto gnearI = idxs_of(gnear);
  auto gfarI = idxs_of(gfar);

  // near stretch reads varrho0 reversed, nu0, rho0
  int nc1 = -1, nc2 = -1;
  const int NL = static_cast<int>(gnearI.size());
  for (int c1 = 0; c1 <= NL && nc1 < 0; ++c1)
    for (int c2 = c1; c2 <= NL; ++c2) {
      std::vector<int> vr0(gnearI.begin(), gnearI.begin() + c1);
      std::vector<int> nu0(gnearI.begin() + c1, gnearI.begin() + c2);
      std::vector<int> rh0(gnearI.begin() + c2, gnearI.end());
      if (verify_region(D, *X.ct, bd, X.bidx, comp0, none, nu0, cb[0].mu, none, rh0, vr0)) {
        nc1 = c1;
        nc2 = c2;
        break;
      }
    }
  if (nc1 < 0) return std::nullopt;

  // far stretch reads rho_n, mu_{n+1} reversed, varrho_n reversed
  int fc1 = -1, fc2 = -1;
  const int FL = static_cast<int>(gfarI.size());
  for (int c1 = 0; c1 <= FL && fc1 < 0; ++c1)
    for (int c2 = c1; c2 <= FL; ++c2) {
      std::vector<int> rhN(gfarI.begin(), gfarI.begin() + c1);
      std::vector<int> muN(gfarI.begin() + c1, gfarI.begin() + c2);
      std::vector<int> vrN(gfarI.begin() + c2, gfarI.end());
      if (verify_region(D, *X.ct, bd, X.bidx, compn, cb[n - 1].nu, none, none, muN, rhN, vrN)) {
        fc1 = c1;
        fc2 = c2;
        break;
      }
    }
  if (fc1 < 0) return std::nullopt;

  // every middle column must separate the columns on its two sides
  for (int j = 1; j + 1 < n; ++j) {
    int cj = sigma[j];
    std::set<int> vset, eset;
    for (int d : D.face_darts(cj)) {
      vset.insert(D.origin(d));
      eset.insert(d >> 1);
    }
    const int NC = D.cell_count(), NE = D.edge_count();
    UnionFind u2(NC + NE);
    for (int v = 0; v < D.vertex_count(); ++v) {
      if (vset.count(v)) continue;
      int prev = -1;
      for (int d : D.darts_at(v)) {
        int f = D.face_of(d);
        int node = -1;
        if (f != D.outer_face() && f != cj) {
          node = f;
        } else {
          int e = d >> 1;
          if (D.face_of(2 * e) == D.outer_face() && D.face_of(2 * e + 1) == D.outer_face())
            node = NC + e;
        }
        if (node < 0) continue;
        if (prev >= 0) u2.unite(prev, node);
        prev = node;
      }
    }
    for (int e = 0; e < NE; ++e) {
      if (eset.count(e)) continue;
      int f0 = D.face_of(2 * e), f1 = D.face_of(2 * e + 1);
      if (f0 == D.outer_face() || f1 == D.outer_face()) continue;
      if (f0 == cj || f1 == cj) continue;
      u2.unite(f0, f1);
    }
    for (int a = 0; a < j; ++a)
      for (int b = j + 1; b < n; ++b)
        if (u2.find(sigma[a]) == u2.find(sigma[b])) return std::nullopt;
  }

  LadderDecomposition out;
  for (int i = 0; i < n; ++i) {
    LadderColumn col;
    col.cell = sigma[i];
    col.mu = cb[i].mu;
    col.alpha = cb[i].alpha;
    col.nu = cb[i].nu;
    col.gamma = cb[i].gamma;
    out.columns.push_back(std::move(col));
  }
  auto darts_of = [&](std::vector<int>::const_iterator a, std::vector<int>::const_iterator b) {
    std::vector<int> v;
    for (auto it = a; it != b; ++it) v.push_back(bd[*it]);
    return v;
  };
  for (int g = 0; g <= n; ++g) {
    LadderRectangle R;
    if (g == 0) {
      R.varrho = darts_of(gnearI.begin(), gnearI.begin() + nc1);
      R.nu = darts_of(gnearI.begin() + nc1, gnearI.begin() + nc2);
      R.rho = darts_of(gnearI.begin() + nc2, gnearI.end());
      R.mu = cb[0].mu;
    } else if (g == n) {
      R.rho = darts_of(gfarI.begin(), gfarI.begin() + fc1);
      R.mu = darts_of(gfarI.begin() + fc1, gfarI.begin() + fc2);
      R.varrho = darts_of(gfarI.begin() + fc2, gfarI.end());
      R.nu = cb[n - 1].nu;
    } else {
      R.nu = cb[g - 1].nu;
      R.mu = cb[g].mu;
      auto ri = idxs_of(rho[g]), vi = idxs_of(varrho[g]);
      R.rho = darts_of(ri.begin(), ri.end());
      R.varrho = darts_of(vi.begin(), vi.end());
    }
    if (region_comp[g] >= 0) R.squares = X.comp_sq[region_comp[g]];
    R.horizontally_degenerate = R.nu.empty() && R.mu.empty();
    R.vertically_degenerate = R.rho.empty() && R.varrho.empty();
    out.rectangles.push_back(std::move(R));
  }
  out.is_ladder = out.rectangles.front().vertically_degenerate &&
                  out.rectangles.back().vertically_degenerate;
  return out;
}

std::optional<LadderDecomposition> try_chain(const ChainCtx& X, const std::vector<int>& sigma) {
  const int n = static_cast<int>(sigma.size());
  const int K = static_cast<int>(X.items.size());
  std::vector<int> cnt(n);
  for (int i = 0; i < n; ++i) cnt[i] = X.acount.at(sigma[i]);
  for (int i = 1; i + 1 < n; ++i)
    if (cnt[i] != 2) return std::nullopt;
  bool mfirst = cnt[0] == 1;
  bool mlast = cnt[n - 1] == 1;
  std::vector<Slot> slots;
  for (int i = 0; i < n; ++i) {
    Slot s{i, true, false};
    if (i == 0 && mfirst) s.gocc = true;
    if (i == n - 1 && mlast) s.gocc = true;
    slots.push_back(s);
  }
  for (int i = n - 1; i >= 0; --i) {
    if (i == n - 1 && mlast) continue;
    if (i == 0 && mfirst) continue;
    slots.push_back({i, false, true});
  }
  if (static_cast<int>(slots.size()) != K) return std::nullopt;
  for (int rot = 0; rot < K; ++rot) {
    bool ok = true;
    for (int q = 0; q < K && ok; ++q)
      ok = sigma[slots[q].chain] == X.items[(rot + q) % K].cone;
    if (!ok) continue;
    if (auto res = try_arrangement(X, sigma, slots, rot)) return res;
  }
  return std::nullopt;
}

std::optional<LadderDecomposition> pseudorectangle(const DiscDiagram& D, CurveTable& ct,
                                                   const std::vector<int>& bd,
                                                   const std::vector<int>& bidx) {
  const int L = static_cast<int>(bd.size());
  if (L == 0) {
    LadderDecomposition out;
    LadderRectangle R;
    R.horizontally_degenerate = true;
    R.vertically_degenerate = true;
    out.rectangles.push_back(std::move(R));
    out.is_ladder = true;
    return out;
  }
  if (L > 32) return std::nullopt;  // recognition budget
  std::vector<int> partner(L, -1), cid(L, -1);
  for (int i = 0; i < L; ++i) {
    cid[i] = ct.of(bd[i] >> 1);
    const Curve& cv = ct.curves[cid[i]];
    if (cv.closed || cv.ends.size() != 2) return std::nullopt;
    int other;
    if (cv.ends[0] == bd[i])
      other = cv.ends[1];
    else if (cv.ends[1] == bd[i])
      other = cv.ends[0];
    else
      return std::nullopt;
    partner[i] = bidx[other];
    if (partner[i] < 0) return std::nullopt;
  }
  for (int a = 0; a < L; ++a)
    for (int b = a; b <= a + L; ++b)
      for (int c = b; c <= a + L; ++c)
        for (int d = c; d <= a + L; ++d) {
          auto labf = [&](int i) {
            int p = a + (((i - a) % L + L) % L);
            if (p < b) return 0;
            if (p < c) return 1;
            if (p < d) return 2;
            return 3;
          };
          bool ok = true;
          for (int i = 0; i < L && ok; ++i) ok = labf(partner[i]) == (labf(i) ^ 2);
          if (!ok) continue;
          std::vector<int> mu_ids;
          for (int i = 0; i < L; ++i)
            if (labf(i) == 2) mu_ids.push_back(cid[i]);
          std::sort(mu_ids.begin(), mu_ids.end());
          mu_ids.erase(std::unique(mu_ids.begin(), mu_ids.end()), mu_ids.end());
          for (std::size_t x = 0; x < mu_ids.size() && ok; ++x)
            for (std::size_t y = x; y < mu_ids.size() && ok; ++y)
              ok = !curves_cross(ct.curves[mu_ids[x]], ct.curves[mu_ids[y]]);
          if (!ok) continue;
          LadderDecomposition out;
          LadderRectangle R;
          auto put = [&](std::vector<int>& dst, int lo, int hi) {
            for (int t = lo; t < hi; ++t) dst.push_back(bd[t % L]);
          };
          put(R.nu, a, b);
          put(R.rho, b, c);
          put(R.mu, c, d);
          put(R.varrho, d, a + L);
          for (int f = 0; f < D.cell_count(); ++f)
            if (face_is_square(D, f)) R.squares.push_back(f);
          R.horizontally_degenerate = R.nu.empty() && R.mu.empty();
          R.vertically_degenerate = R.rho.empty() && R.varrho.empty();
          out.rectangles.push_back(std::move(R));
          out.is_ladder = out.rectangles.front().vertically_degenerate;
          return out;
        }
  return std::nullopt;
}

}  // namespace

int RectifiedDiagram::corner_vertex(int f, int i) const { return D_->target(cells_[f].darts[i]); }

Frac RectifiedDiagram::face_curvature(int f) const {
  Frac k(2);
  for (const Frac& a : angles_[f]) k -= Frac(1) - a;
  return k;
}

Frac RectifiedDiagram::vertex_curvature(int v) const {
  if (!present_[v]) return Frac(0);
  Frac k(2);
  for (const auto& [f, i] : corners_at_[v]) k -= angles_[f][i];
  k -= Frac(kept_deg_[v] - static_cast<int>(corners_at_[v].size()));
  return k;
}

Frac RectifiedDiagram::total_curvature() const {
  Frac t(0);
  for (int f = 0; f < cell_count(); ++f) t += face_curvature(f);
  for (int v = 0; v < static_cast<int>(present_.size()); ++v) t += vertex_curvature(v);
  return t;
}

RectifiedDiagram rectify(const DiscDiagram& D) {
  RectifiedDiagram R;
  R.D_ = &D;
  ReCelled rc = re_cell(D);
  R.cells_ = std::move(rc.cells);
  R.removed_ = std::move(rc.removed);

  const int nv = D.vertex_count();
  R.present_.assign(nv, false);
  R.kept_deg_.assign(nv, 0);
  R.corners_at_.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    for (int d : D.darts_at(v))
      if (!R.removed_[d >> 1]) R.kept_deg_[v]++;
    R.present_[v] = R.kept_deg_[v] > 0 || D.edge_count() == 0;
  }

  std::vector<int> seen(D.dart_count(), 0);
  for (const auto& c : R.cells_)
    for (int d : c.darts) seen[d]++;
  for (int d : D.boundary_darts()) seen[d]++;
  for (int d = 0; d < D.dart_count(); ++d)
    if (seen[d] != (R.removed_[d >> 1] ? 0 : 1)) throw std::logic_error("re-celling lost a dart");
  int V = 0, E = 0;
  for (int v = 0; v < nv; ++v) V += R.present_[v];
  for (int e = 0; e < D.edge_count(); ++e) E += !R.removed_[e];
  if (V - E + static_cast<int>(R.cells_.size()) + 1 != 2)
    throw std::logic_error("re-celling broke the sphere");

  R.angles_.resize(R.cells_.size());
  for (int f = 0; f < static_cast<int>(R.cells_.size()); ++f) {
    const auto& darts = R.cells_[f].darts;
    R.angles_[f].assign(darts.size(), Frac(0));
    for (int i = 0; i < static_cast<int>(darts.size()); ++i)
      R.corners_at_[D.target(darts[i])].push_back({f, i});
  }

  for (int f = 0; f < static_cast<int>(R.cells_.size()); ++f) {
    const RectCell& c = R.cells_[f];
    const int k = static_cast<int>(c.darts.size());
    for (int i = 0; i < k; ++i) {
      int d = c.darts[i], dn = c.darts[(i + 1) % k];
      Frac a(1, 2);
      if (dn == DiscDiagram::twin(d)) {
        a = Frac(2);
      } else if (c.kind == "cone") {
        int fa = D.face_of(DiscDiagram::twin(d));
        int fb = D.face_of(DiscDiagram::twin(dn));
        bool both_boundary = fa == D.outer_face() && fb == D.outer_face();
        bool both_cone = face_is_cone(D, fa) && face_is_cone(D, fb);
        if (both_boundary || both_cone) a = Frac(1);
      } else {
        int v = D.target(d);
        for (int e : c.removed_edges)
          if (D.origin(2 * e) == v || D.origin(2 * e + 1) == v) {
            a = Frac(1);
            break;
          }
      }
      R.angles_[f][i] = a;
    }
  }

  // interior vertices must not fall short of a full turn: distribute the
  // deficit over their shard corners, or cone corners when no shard is there
  for (int v = 0; v < nv; ++v) {
    if (!R.present_[v] || D.boundary_passes(v) > 0) continue;
    Frac sum(0);
    for (const auto& [f, i] : R.corners_at_[v]) sum += R.angles_[f][i];
    if (!(sum < Frac(2))) continue;
    std::vector<std::pair<int, int>> at;
    for (const auto& [f, i] : R.corners_at_[v])
      if (R.cells_[f].kind == "shard") at.push_back({f, i});
    if (at.empty())
      for (const auto& [f, i] : R.corners_at_[v])
        if (R.cells_[f].kind == "cone") at.push_back({f, i});
    if (at.empty()) continue;
    Frac bump = (Frac(2) - sum) / Frac(static_cast<std::int64_t>(at.size()));
    for (const auto& [f, i] : at) R.angles_[f][i] += bump;
  }
  return R;
}

bool gauss_bonnet_check(const RectifiedDiagram& R) { return R.total_curvature() == Frac(2); }

std::vector<Feature> detect_features(const DiscDiagram& D) {
  std::vector<Feature> out;
  const auto& bd = D.boundary_darts();
  const int L = static_cast<int>(bd.size());

  for (int i = 0; i + 1 < L; ++i) {
    if (bd[i + 1] != DiscDiagram::twin(bd[i])) continue;
    Feature ft;
    ft.kind = "spur";
    ft.vertex = D.target(bd[i]);
    ft.outer_darts = {bd[i], bd[i + 1]};
    ft.outer_path = {D.letter(bd[i]), D.letter(bd[i + 1])};
    ft.curvature = Frac(1);
    out.push_back(std::move(ft));
  }

  RectifiedDiagram R = rectify(D);
  for (int f = 0; f < R.cell_count(); ++f) {
    const RectCell& c = R.cell(f);
    if (c.kind != "cone") continue;
    Frac kap = R.face_curvature(f);
    if (!kap.is_positive()) continue;
    const auto& cyc = c.darts;
    const int m = static_cast<int>(cyc.size());
    std::vector<char> onb(m, 0);
    int nb = 0;
    for (int i = 0; i < m; ++i) {
      onb[i] = D.face_of(DiscDiagram::twin(cyc[i])) == D.outer_face();
      nb += onb[i];
    }
    if (nb == 0) continue;
    int start = 0;
    if (nb < m) {
      int starts = 0;
      for (int i = 0; i < m; ++i)
        if (onb[i] && !onb[(i + m - 1) % m]) {
          start = i;
          ++starts;
        }
      if (starts != 1) continue;
    }
    Feature ft;
    ft.kind = "shell";
    ft.cell = c.cell;
    ft.curvature = kap;
    for (int i = nb - 1; i >= 0; --i)
      ft.outer_darts.push_back(DiscDiagram::twin(cyc[(start + i) % m]));
    for (int i = 0; i < m - nb; ++i) ft.inner_darts.push_back(cyc[(start + nb + i) % m]);
    for (int d : ft.outer_darts) ft.outer_path.push_back(D.letter(d));
    for (int d : ft.inner_darts) ft.inner_path.push_back(D.letter(d));
    out.push_back(std::move(ft));
  }

  CurveTable ct(D);
  for (int i = 0; i < L; ++i) {
    int d = bd[i], dn = bd[(i + 1) % L];
    if (dn == DiscDiagram::twin(d)) continue;
    int i1 = ct.of(d >> 1), i2 = ct.of(dn >> 1);
    const Curve& c1 = ct.curves[i1];
    const Curve& c2 = ct.curves[i2];
    if (!curves_cross(c1, c2)) continue;
    int best = -1;
    for (const auto& [f, m1] : c1.cross) {
      auto it = c2.cross.find(f);
      if (it == c2.cross.end()) continue;
      if (((m1 & 1) && (it->second & 2)) || ((m1 & 2) && (it->second & 1))) {
        best = f;
        break;
      }
    }
    Feature ft;
    ft.kind = "generalized-corner";
    ft.vertex = D.target(d);
    ft.cell = best;
    ft.outer_darts = {d, dn};
    ft.outer_path = {D.letter(d), D.letter(dn)};
    ft.curvature = Frac(1, 2);
    out.push_back(std::move(ft));
  }
  return out;
}

std::optional<LadderDecomposition> is_padded_ladder(const DiscDiagram& D) {
  const auto& bd = D.boundary_darts();
  const int L = static_cast<int>(bd.size());
  std::vector<int> cones;
  for (int f = 0; f < D.cell_count(); ++f)
    if (face_is_cone(D, f)) cones.push_back(f);
  const int n = static_cast<int>(cones.size());

  CurveTable ct(D);
  std::vector<int> bidx(D.dart_count(), -1);
  for (int i = 0; i < L; ++i) bidx[bd[i]] = i;

  if (n == 0) return pseudorectangle(D, ct, bd, bidx);
  if (n > 6 || L > 64) return std::nullopt;  // recognition budget

  std::vector<int> btag(L, -1);
  for (int i = 0; i < L; ++i) {
    int g = D.face_of(DiscDiagram::twin(bd[i]));
    if (face_is_cone(D, g)) btag[i] = g;
  }

  ChainCtx X;
  X.D = &D;
  X.ct = &ct;
  X.bd = &bd;
  X.bidx = std::move(bidx);
  {
    int start = -1;
    for (int i = 0; i < L; ++i)
      if (btag[i] != btag[(i + L - 1) % L]) {
        start = i;
        break;
      }
    if (start < 0) {
      if (btag[0] < 0) return std::nullopt;
      X.items.push_back({btag[0], 0, L, {0, 0}});
    } else {
      std::vector<std::array<int, 3>> runs;
      int i = start;
      while (i < start + L) {
        int t = btag[i % L];
        int j = i;
        while (j < start + L && btag[j % L] == t) ++j;
        runs.push_back({t, i % L, j - i});
        i = j;
      }
      int r0 = -1;
      for (int k = 0; k < static_cast<int>(runs.size()); ++k)
        if (runs[k][0] >= 0) {
          r0 = k;
          break;
        }
      if (r0 < 0) return std::nullopt;
      for (int k = 0; k < static_cast<int>(runs.size()); ++k) {
        const auto& r = runs[(r0 + k) % runs.size()];
        if (r[0] >= 0)
          X.items.push_back({r[0], r[1], r[2], {r[1], 0}});
        else
          X.items.back().gap = {r[1], r[2]};
      }
    }
  }
  for (const auto& it : X.items) X.acount[it.cone]++;
  for (int c : cones) {
    auto f = X.acount.find(c);
    if (f == X.acount.end() || f->second > 2) return std::nullopt;
  }

  UnionFind comp(D.cell_count());
  for (int e = 0; e < D.edge_count(); ++e) {
    int f0 = D.face_of(2 * e), f1 = D.face_of(2 * e + 1);
    if (face_is_square(D, f0) && face_is_square(D, f1)) comp.unite(f0, f1);
  }
  std::map<int, int> cidx;
  for (int f = 0; f < D.cell_count(); ++f) {
    if (!face_is_square(D, f)) continue;
    int r = comp.find(f);
    auto [it, fresh] = cidx.try_emplace(r, static_cast<int>(X.comp_sq.size()));
    if (fresh) {
      X.comp_sq.emplace_back();
      X.comp_outer.emplace_back();
      X.comp_cones.emplace_back();
    }
    X.comp_sq[it->second].push_back(f);
  }
  for (int k = 0; k < static_cast<int>(X.comp_sq.size()); ++k) {
    for (int f : X.comp_sq[k])
      for (int d : D.face_darts(f)) {
        int t = DiscDiagram::twin(d);
        int g = D.face_of(t);
        if (g == D.outer_face())
          X.comp_outer[k].push_back(X.bidx[t]);
        else if (face_is_cone(D, g))
          X.comp_cones[k].push_back(g);
      }
    auto& cc = X.comp_cones[k];
    std::sort(cc.begin(), cc.end());
    cc.erase(std::unique(cc.begin(), cc.end()), cc.end());
  }

  std::vector<int> sigma(cones);
  do {
    if (auto res = try_chain(X, sigma)) return res;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return std::nullopt;
}

}  // namespace cubsc
