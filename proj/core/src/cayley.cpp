#include "cubsc/cayley.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cubsc/ball.hpp"
#include "cubsc/json_io.hpp"

namespace cubsc {
namespace {

std::optional<int> step_in(const CubeComplex& X, int v, int letter) {
  if (letter == 0) return std::nullopt;
  int e = std::abs(letter) - 1;
  if (e >= static_cast<int>(X.edge_count())) return std::nullopt;
  if (X.endpoint(e, letter > 0 ? 0 : 1) != v) return std::nullopt;
  return X.endpoint(e, letter > 0 ? 1 : 0);
}

std::optional<int> walk(const CubeComplex& X, int base, const Word& w) {
  int v = base;
  for (int x : w) {
    auto nxt = step_in(X, v, x);
    if (!nxt) return std::nullopt;
    v = *nxt;
  }
  return v;
}

std::vector<int> vertex_trail(const CubeComplex& X, int base, const Word& w) {
  std::vector<int> xs{base};
  for (int x : w) xs.push_back(*step_in(X, xs.back(), x));
  return xs;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// ---------------------------------------------------------------- rewriting

struct ShellHit {
  int pos = 0;
  int len = 0;
  int relator = -1;
  Word S;
  Word cone;  // Q S^-1
};

/// Longest relator-cycle factor of w worth replacing: strictly more than half
/// the cycle. Exact scan over both orientations and every phase.
std::optional<ShellHit> scan_word_shell(const CubicalPresentation& P, const Word& w) {
  const int L = static_cast<int>(w.size());
  if (L == 0) return std::nullopt;
  int best_len = 0;
  ShellHit best;
  Word best_cycle;
  for (int ri = 0; ri < static_cast<int>(P.relator_count()); ++ri) {
    const Word& r = P.relator_word(ri);
    const int n = static_cast<int>(r.size());
    if (n == 0 || n >= 2 * L) continue;  // no factor of w can beat half of it
    for (int rev = 0; rev < 2; ++rev) {
      Word rc = rev ? inverse_word(r) : r;
      for (int p = 0; p < n; ++p) {
        for (int s = 0; s + best_len < L; ++s) {
          int l = 0;
          while (s + l < L && l < n && w[s + l] == periodic_letter(rc, p + l)) ++l;
          if (2 * l > n && l > best_len) {
            best_len = l;
            best = ShellHit{s, l, ri, {}, {}};
            best_cycle.clear();
            for (int t = 0; t < n; ++t) best_cycle.push_back(periodic_letter(rc, p + t));
          }
        }
      }
    }
  }
  if (best_len == 0) return std::nullopt;
  best.cone = best_cycle;
  best.S = inverse_word(Word(best_cycle.begin() + best_len, best_cycle.end()));
  return best;
}

/// Deterministic shortest edge path between two vertices of Y, as signed
/// Y-edge letters.
Word y_geodesic(const CubeComplex& Y, int y0, int y1) {
  if (y0 == y1) return {};
  std::vector<int> par(Y.vertex_count(), -1), par_letter(Y.vertex_count(), 0);
  std::deque<int> q{y0};
  par[y0] = y0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const Germ& g : Y.germs_at(v)) {
      int letter = g.end == 0 ? g.edge + 1 : -(g.edge + 1);
      int t = Y.endpoint(g.edge, 1 - g.end);
      if (par[t] >= 0) continue;
      par[t] = v;
      par_letter[t] = letter;
      if (t == y1) {
        Word path;
        for (int c = y1; c != y0; c = par[c]) path.push_back(par_letter[c]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push_back(t);
    }
  }
  throw std::logic_error("relator complex is not connected");
}

struct ElevationIndex {
  int relator = -1;
  std::unordered_map<int, int> v2y;
  std::unordered_map<int, int> e2y;
};

struct BallCtx {
  bool tried = false;
  bool complete = false;
  int base = -1;
  int radius = 0;
  std::optional<DevelopedBall> ball;
  std::vector<ElevationIndex> els;
};

void ensure_ctx(const CubicalPresentation& P, BallCtx& ctx, int base, int radius,
                const ReduceBudget& budget) {
  if (ctx.tried && ctx.base == base && ctx.radius >= radius) return;
  ctx = BallCtx{};
  ctx.tried = true;
  ctx.base = base;
  ctx.radius = radius;
  const CubeComplex& X = P.complex();
  // grow in steps so a blowup is caught before it eats the budget
  for (int r = 1; r <= radius; ++r) {
    auto res = develop_ball(X, base, r);
    if (!ok(res) || value(res).complex().vertex_count() > budget.max_ball_vertices) {
      ctx.ball.reset();
      return;
    }
    ctx.ball.emplace(std::move(value(res)));
  }
  if (!ctx.ball) {
    auto res = develop_ball(X, base, 0);
    if (!ok(res)) return;
    ctx.ball.emplace(std::move(value(res)));
  }
  for (int i = 0; i < static_cast<int>(P.relator_count()); ++i) {
    for (const Elevation& el : elevations(P.attaching(i), *ctx.ball, ctx.ball->radius())) {
      ElevationIndex idx;
      idx.relator = i;
      for (auto [y, bv] : el.vertices) idx.v2y.emplace(bv, y);
      for (auto [ye, be] : el.edges) idx.e2y.emplace(be, ye);
      ctx.els.push_back(std::move(idx));
    }
  }
  ctx.complete = true;
}

struct LiftedPath {
  bool ok = false;
  std::vector<int> verts;
  std::vector<int> edges;
};

LiftedPath lift_path(const DevelopedBall& B, const Word& w) {
  LiftedPath lp;
  lp.verts.push_back(0);
  for (int x : w) {
    Germ g{std::abs(x) - 1, x > 0 ? 0 : 1};
    auto bg = B.lift_germ(lp.verts.back(), g);
    if (!bg) return lp;
    lp.edges.push_back(bg->edge);
    lp.verts.push_back(B.across(lp.verts.back(), *bg));
  }
  lp.ok = true;
  return lp;
}

/// Longest subpath running inside some elevation whose endpoints admit a
/// strictly shorter connection within the relator.
std::optional<ShellHit> scan_ball_shell(const CubicalPresentation& P, BallCtx& ctx,
                                        const Word& w) {
  if (!ctx.complete || w.empty()) return std::nullopt;
  auto lp = lift_path(*ctx.ball, w);
  if (!lp.ok) return std::nullopt;
  const int L = static_cast<int>(w.size());
  for (int len = L; len >= 1; --len) {
    for (int s = 0; s + len <= L; ++s) {
      for (const ElevationIndex& el : ctx.els) {
        bool inside = true;
        for (int t = s; t < s + len && inside; ++t) inside = el.e2y.count(lp.edges[t]) > 0;
        if (!inside) continue;
        auto i0 = el.v2y.find(lp.verts[s]);
        auto i1 = el.v2y.find(lp.verts[s + len]);
        if (i0 == el.v2y.end() || i1 == el.v2y.end()) continue;
        Word sy = y_geodesic(P.relator(el.relator), i0->second, i1->second);
        if (static_cast<int>(sy.size()) >= len) continue;
        const CubicalMap& f = P.attaching(el.relator);
        Word sx;
        for (int yl : sy) {
          int img = f.edge_image(std::abs(yl) - 1) + 1;
          sx.push_back(yl > 0 ? img : -img);
        }
        ShellHit hit{s, len, el.relator, sx, Word(w.begin() + s, w.begin() + s + len)};
        for (auto it = sx.rbegin(); it != sx.rend(); ++it) hit.cone.push_back(-*it);
        return hit;
      }
    }
  }
  return std::nullopt;
}

/// Reroutes two consecutive letters across the square spanning their corner.
std::optional<ReduceStep> square_swap(const CubeComplex& X, const std::vector<int>& xs,
                                      const Word& w, int i) {
  int p = w[i], q = w[i + 1];
  Germ gp{std::abs(p) - 1, p > 0 ? 1 : 0};
  Germ gq{std::abs(q) - 1, q > 0 ? 0 : 1};
  if (gp == gq) return std::nullopt;
  auto corner = X.corner_spanning(xs[i + 1], {gp, gq});
  if (!corner || corner->dim != 2) return std::nullopt;
  int s = corner->cube;
  unsigned b = corner->bits;
  auto cg = X.corner_germs(2, s, b);
  int a, c;
  if (cg[0] == gp && cg[1] == gq) {
    a = 0;
    c = 1;
  } else if (cg[1] == gp && cg[0] == gq) {
    a = 1;
    c = 0;
  } else {
    return std::nullopt;
  }
  unsigned b0 = b ^ (1u << a), b1 = b0 ^ (1u << c);
  Germ g1 = X.corner_germs(2, s, b0)[c];
  int lq = g1.end == 0 ? g1.edge + 1 : -(g1.edge + 1);
  Germ g2 = X.corner_germs(2, s, b1)[a];
  int lp = g2.end == 0 ? g2.edge + 1 : -(g2.edge + 1);
  auto m = step_in(X, xs[i], lq);
  if (!m || *m != X.corner_vertex(2, s, b1)) return std::nullopt;
  auto e = step_in(X, *m, lp);
  if (!e || *e != xs[i + 2]) return std::nullopt;
  if (lq == p && lp == q) return std::nullopt;
  ReduceStep st;
  st.kind = "square";
  st.pos = i;
  st.removed = {p, q};
  st.inserted = {lq, lp};
  return st;
}

Word apply_step(const Word& w, const ReduceStep& s) {
  Word out = w;
  if (s.kind == "backtrack") {
    out.erase(out.begin() + s.pos, out.begin() + s.pos + 2);
  } else if (s.kind == "square") {
    out[s.pos] = s.inserted[0];
    out[s.pos + 1] = s.inserted[1];
  } else if (s.kind == "shell") {
    out.erase(out.begin() + s.pos, out.begin() + s.pos + s.removed.size());
    out.insert(out.begin() + s.pos, s.inserted.begin(), s.inserted.end());
  } else {
    out = rotate_word(out, s.pos);
  }
  return out;
}

std::optional<int> find_backtrack(const Word& w) {
  for (int i = 0; i + 1 < static_cast<int>(w.size()); ++i)
    if (w[i] == -w[i + 1]) return i;
  return std::nullopt;
}

ReduceStep backtrack_step(const Word& w, int i) {
  ReduceStep st;
  st.kind = "backtrack";
  st.pos = i;
  st.removed = {w[i], w[i + 1]};
  return st;
}

ReduceStep shell_step(const Word& w, const ShellHit& hit) {
  ReduceStep st;
  st.kind = "shell";
  st.pos = hit.pos;
  st.removed = Word(w.begin() + hit.pos, w.begin() + hit.pos + hit.len);
  st.inserted = hit.S;
  st.relator = hit.relator;
  st.cone_word = hit.cone;
  return st;
}

/// Breadth-first sweep of square-homotopic representatives of w, hunting one
/// that admits a backtrack or a shell. Returns the full rewrite chain.
std::optional<std::vector<ReduceStep>> expose(const CubicalPresentation& P, BallCtx& ctx,
                                              const Word& w0, int base,
                                              const ReduceBudget& budget, bool& complete) {
  const CubeComplex& X = P.complex();
  std::map<Word, std::pair<Word, ReduceStep>> parent;
  std::deque<Word> q{w0};
  std::set<Word> seen{w0};
  long long states = 0;
  auto unwind = [&](const Word& u) {
    std::vector<ReduceStep> chain;
    for (Word c = u; c != w0;) {
      auto& [pw, st] = parent.at(c);
      chain.push_back(st);
      c = pw;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
  };
  while (!q.empty()) {
    Word u = q.front();
    q.pop_front();
    if (++states > budget.max_steps) {
      complete = false;
      return std::nullopt;
    }
    auto xs = vertex_trail(X, base, u);
    for (int i = 0; i + 1 < static_cast<int>(u.size()); ++i) {
      auto sw = square_swap(X, xs, u, i);
      if (!sw) continue;
      Word nw = apply_step(u, *sw);
      if (!seen.insert(nw).second) continue;
      parent.emplace(nw, std::make_pair(u, *sw));
      auto chain = unwind(nw);
      if (auto bt = find_backtrack(nw)) {
        chain.push_back(backtrack_step(nw, *bt));
        return chain;
      }
      if (auto hit = scan_ball_shell(P, ctx, nw)) {
        chain.push_back(shell_step(nw, *hit));
        return chain;
      }
      q.push_back(std::move(nw));
    }
  }
  return std::nullopt;
}

struct RState {
  Word w;
  int base = 0;
  std::vector<ReduceStep> steps;
  bool budget_hit = false;
  bool exhausted = true;
};

RState reduce_impl(const CubicalPresentation& P, int base, const Word& w,
                   const ReduceBudget& budget, bool closed) {
  const CubeComplex& X = P.complex();
  const bool word_mode = X.dim() <= 1 && P.all_circles();
  RState st;
  st.w = w;
  st.base = base;
  BallCtx ctx;
  int used = 0;
  while (!st.w.empty()) {
    const int L = static_cast<int>(st.w.size());
    std::optional<std::vector<ReduceStep>> found;
    for (int s = 0; s < (closed ? L : 1) && !found; ++s) {
      Word ws = rotate_word(st.w, s);
      int bs = s == 0 ? st.base : *walk(X, st.base, Word(st.w.begin(), st.w.begin() + s));
      std::vector<ReduceStep> pre;
      if (s > 0) {
        ReduceStep rot;
        rot.kind = "rotate";
        rot.pos = s;
        pre.push_back(rot);
      }
      if (auto bt = find_backtrack(ws)) {
        pre.push_back(backtrack_step(ws, *bt));
        found = std::move(pre);
        break;
      }
      std::optional<ShellHit> hit;
      if (word_mode) {
        hit = scan_word_shell(P, ws);
      } else {
        ensure_ctx(P, ctx, bs, static_cast<int>(w.size()) + 2, budget);
        if (!ctx.complete) st.exhausted = false;
        hit = scan_ball_shell(P, ctx, ws);
      }
      if (hit) {
        pre.push_back(shell_step(ws, *hit));
        found = std::move(pre);
        break;
      }
      if (!word_mode && ctx.complete) {
        bool complete = true;
        if (auto chain = expose(P, ctx, ws, bs, budget, complete)) {
          for (auto& step : *chain) pre.push_back(std::move(step));
          found = std::move(pre);
          break;
        }
        if (!complete) st.exhausted = false;
      }
    }
    if (!found) break;
    if (used + static_cast<int>(found->size()) > budget.max_steps) {
      st.budget_hit = true;
      break;
    }
    for (const ReduceStep& step : *found) {
      if (step.kind == "rotate")
        st.base = *walk(X, st.base, Word(st.w.begin(), st.w.begin() + step.pos));
      st.w = apply_step(st.w, step);
      st.steps.push_back(step);
      ++used;
    }
  }
  return st;
}

// ------------------------------------------------------------- certificates

struct Replay {
  RawDiagram raw;
  std::vector<int> bound;  // signed diagram edge ids along the boundary
  std::vector<int> bvert;  // diagram vertex per boundary position, one extra
};

int replay_vertex(Replay& rp, int ximg) {
  rp.raw.vertex_image.push_back(ximg);
  return rp.raw.vertices++;
}

/// New diagram edge from `from` to `to`; returns the signed id whose
/// traversal runs that way reading the letter.
int replay_edge(Replay& rp, int from, int to, int letter) {
  if (letter > 0)
    rp.raw.edge_ends.emplace_back(from, to);
  else
    rp.raw.edge_ends.emplace_back(to, from);
  rp.raw.edge_image.push_back(std::abs(letter) - 1);
  int id = static_cast<int>(rp.raw.edge_ends.size());
  return letter > 0 ? id : -id;
}

void unapply(const CubeComplex& X, Replay& rp, const ReduceStep& st) {
  auto& bound = rp.bound;
  auto& bvert = rp.bvert;
  const int L = static_cast<int>(bound.size());
  if (st.kind == "rotate") {
    int k = st.pos;
    std::rotate(bound.begin(), bound.begin() + (L - k), bound.end());
    bvert.pop_back();
    std::rotate(bvert.begin(), bvert.begin() + (L - k), bvert.end());
    bvert.push_back(bvert.front());
  } else if (st.kind == "backtrack") {
    int p = st.pos, x = st.removed[0];
    int at = bvert[p];
    int m = replay_vertex(rp, *step_in(X, rp.raw.vertex_image[at], x));
    int s = replay_edge(rp, at, m, x);
    bound.insert(bound.begin() + p, {s, -s});
    bvert.insert(bvert.begin() + p + 1, {m, at});
  } else if (st.kind == "square") {
    int p = st.pos;
    int v0 = bvert[p], v2 = bvert[p + 2];
    int m = replay_vertex(rp, *step_in(X, rp.raw.vertex_image[v0], st.removed[0]));
    int ep = replay_edge(rp, v0, m, st.removed[0]);
    int eq = replay_edge(rp, m, v2, st.removed[1]);
    // the cell takes the retired boundary darts; their twins stay put
    RawDiagram::Cell cell;
    cell.kind = "square";
    cell.boundary = {bound[p], bound[p + 1], -eq, -ep};
    rp.raw.cells.push_back(std::move(cell));
    bound[p] = ep;
    bound[p + 1] = eq;
    bvert[p + 1] = m;
  } else {  // shell
    int p = st.pos;
    const Word& Q = st.removed;
    const int nq = static_cast<int>(Q.size());
    const int ls = static_cast<int>(st.inserted.size());
    int vstart = bvert[p], vend = bvert[p + ls];
    std::vector<int> qd, mids;
    int cur = vstart;
    for (int t = 0; t < nq; ++t) {
      int nxt = t + 1 == nq ? vend : replay_vertex(rp, *step_in(X, rp.raw.vertex_image[cur], Q[t]));
      qd.push_back(replay_edge(rp, cur, nxt, Q[t]));
      if (t + 1 != nq) mids.push_back(nxt);
      cur = nxt;
    }
    RawDiagram::Cell cell;
    cell.kind = "cone";
    cell.image = st.relator;
    for (int t = 0; t < ls; ++t) cell.boundary.push_back(bound[p + t]);
    for (int t = nq - 1; t >= 0; --t) cell.boundary.push_back(-qd[t]);
    rp.raw.cells.push_back(std::move(cell));
    bound.erase(bound.begin() + p, bound.begin() + p + ls);
    bound.insert(bound.begin() + p, qd.begin(), qd.end());
    bvert.erase(bvert.begin() + p, bvert.begin() + p + ls + 1);
    std::vector<int> seg{vstart};
    seg.insert(seg.end(), mids.begin(), mids.end());
    seg.push_back(vend);
    bvert.insert(bvert.begin() + p, seg.begin(), seg.end());
  }
}

/// Rebuilds the emptying trace backwards into a diagram with boundary w.
DiscDiagram build_certificate(const CubicalPresentation& P, int base, const Word& w,
                              const std::vector<ReduceStep>& steps) {
  const CubeComplex& X = P.complex();
  Replay rp;
  rp.raw.vertices = 1;
  rp.raw.vertex_image = {base};
  rp.bvert = {0};
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) unapply(X, rp, *it);
  rp.raw.outer = rp.bound;
  auto res = validate_diagram(std::move(rp.raw), X, &P);
  if (!ok(res))
    throw std::logic_error("reduction replay produced an invalid diagram: " +
                           error(res).kind + " " + error(res).detail);
  if (value(res).boundary_word() != w)
    throw std::logic_error("reduction replay lost the boundary word");
  return std::move(value(res));
}

/// nullopt when the development is out of budget.
std::optional<bool> develops_closed(const CubeComplex& X, int base, const Word& w,
                                    std::size_t max_vertices) {
  int radius = static_cast<int>(w.size()) / 2 + 2;
  std::optional<DevelopedBall> B;
  for (int r = 1; r <= radius; ++r) {
    auto res = develop_ball(X, base, r);
    if (!ok(res) || value(res).complex().vertex_count() > max_vertices) return std::nullopt;
    B.emplace(std::move(value(res)));
  }
  int v = 0;
  for (int x : w) {
    auto bg = B->lift_germ(v, Germ{std::abs(x) - 1, x > 0 ? 0 : 1});
    if (!bg) return false;
    v = B->across(v, *bg);
  }
  return v == 0;
}

nlohmann::json word_json(const Word& w) { return word_to_string(w); }

}  // namespace

Result<Reduction> dehn_reduce(const CubicalPresentation& P, int base, const Word& w,
                              const ReduceBudget& budget) {
  if (!walk(P.complex(), base, w))
    return Error{"NotInBase", "word is not an edge path from the base vertex"};
  RState st = reduce_impl(P, base, w, budget, false);
  if (st.budget_hit)
    return Error{"BudgetExceeded",
                 nlohmann::json{{"partial", word_to_string(st.w)}}.dump()};
  return Reduction{std::move(st.w), std::move(st.steps), st.exhausted};
}

Result<Reduction> dehn_reduce(const CubicalPresentation& P, const CayleyBall& B, int start,
                              const Word& w, const ReduceBudget& budget) {
  const CubeComplex& C = B.complex();
  Word base_word;
  int v = start;
  for (int x : w) {
    auto nxt = step_in(C, v, x);
    if (!nxt) return Error{"NotInBase", "word is not an edge path in the ball"};
    base_word.push_back(x > 0 ? B.image(1, x - 1) + 1 : -(B.image(1, -x - 1) + 1));
    v = *nxt;
  }
  return dehn_reduce(P, B.image(0, start), base_word, budget);
}

NullHomotopy is_null_homotopic(const CubicalPresentation& P, int base, const Word& w,
                               const ReduceBudget& budget) {
  const CubeComplex& X = P.complex();
  auto end = walk(X, base, w);
  if (!end || *end != base) return NullHomotopy{"no", std::nullopt, w};
  if (w.empty())
    return NullHomotopy{"yes", std::make_optional(build_certificate(P, base, w, {})), {}};
  RState st = reduce_impl(P, base, w, budget, true);
  if (st.w.empty())
    return NullHomotopy{"yes", std::make_optional(build_certificate(P, base, w, st.steps)), {}};
  if (st.budget_hit) return NullHomotopy{"unknown", std::nullopt, st.w};
  if (X.dim() <= 1) {
    // a reduced nonempty path in a graph never develops closed
    return NullHomotopy{st.exhausted ? "no" : "unknown", std::nullopt, st.w};
  }
  auto closed = develops_closed(X, st.base, st.w, budget.max_ball_vertices);
  if (!closed) return NullHomotopy{"unknown", std::nullopt, st.w};
  if (*closed) {
    // null in the base itself; the exposure search missed it, so fall back
    DiagramBudget gen;
    gen.max_squares = 64;
    gen.max_length = std::max(96, static_cast<int>(w.size()) + 4);
    gen.max_states = 2000000;
    auto d = find_diagram(P, base, w, gen);
    if (ok(d)) return NullHomotopy{"yes", std::make_optional(std::move(value(d))), {}};
    return NullHomotopy{"unknown", std::nullopt, st.w};
  }
  return NullHomotopy{st.exhausted ? "no" : "unknown", std::nullopt, st.w};
}

Result<CayleyBall> cayley_ball(const CubicalPresentation& P, int base, int R,
                               const ReduceBudget& budget) {
  const CubeComplex& X = P.complex();
  auto bres = develop_ball(X, base, R);
  if (!ok(bres)) return error(bres);
  const DevelopedBall& B = value(bres);
  const int V = static_cast<int>(B.complex().vertex_count());
  const int E = static_cast<int>(B.complex().edge_count());

  std::vector<std::pair<int, int>> cand;
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < v; ++u)
      if (B.image(0, u) == B.image(0, v)) cand.emplace_back(u, v);
  if (cand.size() > budget.max_pairs)
    return Error{"BudgetExceeded", nlohmann::json{{"pairs", cand.size()},
                                                  {"max_pairs", budget.max_pairs}}
                                       .dump()};

  UnionFind uf(V);
  std::vector<FoldRecord> folds;
  std::vector<std::pair<int, int>> unfolded;
  for (auto [u, v] : cand) {
    if (uf.find(u) == uf.find(v)) continue;
    Word conn = *word_from_string(B.vertex_name(v));
    Word back = inverse_word(*word_from_string(B.vertex_name(u)));
    conn.insert(conn.end(), back.begin(), back.end());
    NullHomotopy nh = is_null_homotopic(P, base, conn, budget);
    if (nh.verdict == "yes") {
      uf.unite(u, v);
      folds.push_back(FoldRecord{"reduction", u, v, std::move(conn)});
    } else if (nh.verdict == "unknown") {
      unfolded.emplace_back(u, v);
    }
  }
  if (!unfolded.empty()) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < unfolded.size() && i < 64; ++i)
      pairs.push_back({unfolded[i].first, unfolded[i].second});
    return Error{"BudgetExceeded",
                 nlohmann::json{{"unfolded", pairs}, {"count", unfolded.size()}}.dump()};
  }

  // fold edges sharing an image and an endpoint until nothing moves
  UnionFind ufe(E);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int end = 0; end < 2; ++end) {
      std::map<std::pair<int, int>, int> rep;
      for (int e = 0; e < E; ++e) {
        std::pair<int, int> key{B.image(1, e), uf.find(B.complex().endpoint(e, end))};
        auto [it, fresh] = rep.emplace(key, e);
        if (fresh) continue;
        if (!ufe.unite(it->second, e)) continue;
        changed = true;
        int a = B.complex().endpoint(it->second, 1 - end);
        int b = B.complex().endpoint(e, 1 - end);
        if (uf.unite(a, b)) folds.push_back(FoldRecord{"fold", std::min(a, b), std::max(a, b), {}});
      }
    }
  }

  // quotient cells, ordered by least member
  std::vector<int> vclass(V, -1), vrep;
  for (int v = 0; v < V; ++v)
    if (uf.find(v) == v) vrep.push_back(v);
  for (std::size_t i = 0; i < vrep.size(); ++i) vclass[vrep[i]] = static_cast<int>(i);
  for (int v = 0; v < V; ++v) vclass[v] = vclass[uf.find(v)];
  std::vector<int> eclass(E, -1), erep;
  for (int e = 0; e < E; ++e)
    if (ufe.find(e) == e) erep.push_back(e);
  for (std::size_t i = 0; i < erep.size(); ++i) eclass[erep[i]] = static_cast<int>(i);
  for (int e = 0; e < E; ++e) eclass[e] = eclass[ufe.find(e)];

  const int dim = B.complex().dim();
  RawComplex raw;
  raw.cubes.resize(dim + 1);
  raw.cubes[0].assign(vrep.size(), {});
  std::vector<std::vector<int>> covering(dim + 1);
  std::vector<std::string> names;  // least developed name survives the fold
  for (int v : vrep) {
    covering[0].push_back(B.image(0, v));
    names.push_back(B.complex().label(0, v));
  }
  raw.labels.push_back(std::move(names));
  if (dim >= 1) {
    for (int e : erep) {
      raw.cubes[1].push_back(
          {vclass[B.complex().endpoint(e, 0)], vclass[B.complex().endpoint(e, 1)]});
      covering[1].push_back(B.image(1, e));
    }
  }
  std::vector<std::vector<int>> cclass(dim + 1);
  cclass[1] = eclass;
  for (int d = 2; d <= dim; ++d) {
    cclass[d].assign(B.complex().size(d), -1);
    std::map<std::vector<int>, int> seen;  // sorted mapped faces -> quotient id
    for (int c = 0; c < static_cast<int>(B.complex().size(d)); ++c) {
      std::vector<int> mapped;
      for (int f : B.complex().faces(d, c)) mapped.push_back(cclass[d - 1][f]);
      std::vector<int> key = mapped;
      std::sort(key.begin(), key.end());
      auto [it, fresh] = seen.emplace(key, static_cast<int>(raw.cubes[d].size()));
      if (fresh) {
        raw.cubes[d].push_back(mapped);
        covering[d].push_back(B.image(d, c));
      }
      cclass[d][c] = it->second;
    }
  }
  auto qres = validate_complex(raw);
  if (!ok(qres))
    throw std::logic_error("folding broke the development: " + error(qres).kind + " " +
                           error(qres).detail);

  // complete relator copies, deduplicated after folding
  std::set<std::tuple<int, std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>>
      copy_keys;
  std::vector<RelatorCopy> copies;
  for (int i = 0; i < static_cast<int>(P.relator_count()); ++i) {
    const CubeComplex& Y = P.relator(i);
    for (const Elevation& el : elevations(P.attaching(i), B, R)) {
      std::set<int> yv, ye;
      for (auto [y, bv] : el.vertices) yv.insert(y);
      for (auto [y, be] : el.edges) ye.insert(y);
      if (yv.size() != Y.vertex_count() || ye.size() != Y.edge_count()) continue;
      std::set<std::pair<int, int>> vs, es;
      for (auto [y, bv] : el.vertices) vs.emplace(y, vclass[bv]);
      for (auto [y, be] : el.edges) es.emplace(y, eclass[be]);
      RelatorCopy copy;
      copy.relator = i;
      copy.vertices.assign(vs.begin(), vs.end());
      copy.edges.assign(es.begin(), es.end());
      if (copy_keys.emplace(i, copy.vertices, copy.edges).second)
        copies.push_back(std::move(copy));
    }
  }

  CayleyBall out;
  out.base_ = &X;
  out.radius_ = R;
  out.basepoint_ = base;
  out.complex_ = std::move(value(qres));
  out.covering_ = std::move(covering);
  out.dev_class_ = std::move(vclass);
  out.folds_ = std::move(folds);
  out.copies_ = std::move(copies);
  return out;
}

nlohmann::json cayley_ball_to_json(const CayleyBall& B) {
  nlohmann::json folds = nlohmann::json::array();
  for (const FoldRecord& f : B.folds())
    folds.push_back({{"kind", f.kind}, {"u", f.u}, {"v", f.v}, {"witness", word_json(f.witness)}});
  nlohmann::json copies = nlohmann::json::array();
  for (const RelatorCopy& c : B.relator_copies()) {
    nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array();
    for (auto [y, b] : c.vertices) vs.push_back({y, b});
    for (auto [y, b] : c.edges) es.push_back({y, b});
    copies.push_back({{"relator", c.relator}, {"vertices", vs}, {"edges", es}});
  }
  nlohmann::json covering = nlohmann::json::array();
  for (int d = 0; d <= B.complex().dim(); ++d) {
    nlohmann::json level = nlohmann::json::array();
    for (std::size_t c = 0; c < B.complex().size(d); ++c) level.push_back(B.image(d, c));
    covering.push_back(level);
  }
  return nlohmann::json{{"complex", complex_to_json(B.complex())},
                        {"radius", B.radius()},
                        {"basepoint", B.basepoint()},
                        {"covering", covering},
                        {"folds", folds},
                        {"relator_copies", copies}};
}

}  // namespace cubsc
