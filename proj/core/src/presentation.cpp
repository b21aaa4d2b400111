#include "cubsc/presentation.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <thread>

#include "cubsc/json_io.hpp"

namespace cubsc {

namespace {

bool is_connected(const CubeComplex& Y) {
  if (Y.vertex_count() == 0) return false;
  std::vector<char> seen(Y.vertex_count(), 0);
  std::queue<int> q;
  seen[0] = 1;
  q.push(0);
  std::size_t n = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (const Germ& g : Y.germs_at(v)) {
      int u = Y.endpoint(g.edge, 1 - g.end);
      if (!seen[u]) {
        seen[u] = 1;
        ++n;
        q.push(u);
      }
    }
  }
  return n == Y.vertex_count();
}

// boundary word of a circle relator; empty when Y is not a single circle
Word circle_word(const CubeComplex& Y, const CubicalMap& f) {
  if (Y.dim() != 1 || Y.vertex_count() == 0 || Y.vertex_count() != Y.edge_count()) return {};
  for (std::size_t v = 0; v < Y.vertex_count(); ++v)
    if (Y.germs_at(static_cast<int>(v)).size() != 2) return {};
  Word out;
  int v = 0;
  Germ g = Y.germs_at(0)[0];
  for (std::size_t step = 0; step < Y.edge_count(); ++step) {
    int base = f.edge_image(g.edge);
    out.push_back(g.end == 0 ? base + 1 : -(base + 1));
    v = Y.endpoint(g.edge, 1 - g.end);
    Germ back{g.edge, 1 - g.end};
    const auto& gs = Y.germs_at(v);
    g = gs[0] == back ? gs[1] : gs[0];
  }
  return v == 0 ? out : Word{};
}

int quick_systole(const CubicalPresentation& P, int i) {
  if (!P.relator_word(i).empty()) return static_cast<int>(P.relator_word(i).size());
  const CubeComplex& Y = P.relator(i);
  return systole(Y, 2 * static_cast<int>(Y.vertex_count()) + 1).value;
}

SubComplex trim_interior(const DevelopedBall& B, const SubComplex& S) {
  const CubeComplex& C = B.complex();
  SubComplex t;
  for (int v : S.vertices)
    if (B.interior(v)) t.vertices.push_back(v);
  for (int e : S.edges)
    if (B.interior(C.endpoint(e, 0)) && B.interior(C.endpoint(e, 1))) t.edges.push_back(e);
  for (auto [d, c] : S.cubes) {
    bool in = true;
    for (unsigned bits = 0; bits < (1u << d) && in; ++bits)
      in = B.interior(C.corner_vertex(d, c, bits));
    if (in) t.cubes.push_back({d, c});
  }
  return t;
}

std::vector<Piece> project_components(const DevelopedBall& B, const SubComplex& from,
                                      const SubComplex& onto, Piece prototype) {
  SubComplex pr = proj(B, trim_interior(B, from), trim_interior(B, onto));
  std::vector<Piece> out;
  for (SubComplex& comp : components(B, pr)) {
    Piece p = prototype;
    p.diameter = intrinsic_diameter(B, comp);
    p.witness += ":v" + std::to_string(comp.vertices.front());
    p.sub = std::move(comp);
    out.push_back(std::move(p));
  }
  return out;
}

std::string pair_name(const char* kind, int i, int a, int j, int b) {
  return std::string(kind) + " r" + std::to_string(i) + "e" + std::to_string(a) + ":r" +
         std::to_string(j) + "e" + std::to_string(b);
}

// better piece: larger diameter, ties to the lexicographically least witness
bool improves(const Piece& cand, const Piece* best) {
  if (!best) return true;
  if (cand.diameter != best->diameter) return cand.diameter > best->diameter;
  return cand.witness < best->witness;
}

}  // namespace

SystoleBound systole(const CubeComplex& Y, int maxlen) {
  int best = -1;
  for (std::size_t v = 0; v < Y.vertex_count(); ++v) {
    int horizon = best == -1 ? maxlen : std::min(maxlen, best - 1);
    if (horizon <= 0) break;
    // deepen the development geometrically so short loops stay cheap
    for (int cap = std::min(horizon, 2);; cap = std::min(horizon, cap * 2)) {
      auto b = develop_ball(Y, static_cast<int>(v), cap + 1);
      if (!ok(b)) throw std::invalid_argument("systole wants an NPC complex");
      const DevelopedBall& B = value(b);
      int found = -1;
      for (std::size_t w = 1; w < B.complex().vertex_count(); ++w) {
        if (B.image(0, static_cast<int>(w)) != static_cast<int>(v)) continue;
        if (B.dist(static_cast<int>(w)) > cap) continue;
        if (found == -1 || B.dist(static_cast<int>(w)) < found) found = B.dist(static_cast<int>(w));
      }
      if (found != -1) {
        best = best == -1 ? found : std::min(best, found);
        break;
      }
      if (cap >= horizon) break;
    }
    if (best == 1) break;
  }
  if (best != -1) return {best, true};
  return {maxlen, false};
}

bool CubicalPresentation::all_circles() const {
  for (const Rel& r : relators_)
    if (r.word.empty()) return false;
  return true;
}

Result<CubicalPresentation> assemble_presentation(RawComplex X, std::vector<RawComplex> Ys,
                                                  std::vector<std::vector<std::vector<int>>> images,
                                                  Frac alpha, bool normalized) {
  if (!alpha.is_positive() || !(alpha < Frac(1)))
    return Error{"BadAlpha", "alpha must lie strictly between 0 and 1"};
  if (Ys.size() != images.size())
    return Error{"DanglingReference", "one image table per relator required"};
  CubicalPresentation P;
  auto vx = validate_complex(X);
  if (!ok(vx)) return error(vx);
  P.X_ = std::make_unique<CubeComplex>(std::move(value(vx)));
  if (!is_connected(*P.X_)) return Error{"NotConnected", "base complex"};
  auto nx = check_npc(*P.X_);
  if (!nx.npc)
    return Error{"NotNpc", "base: " + nx.kind + " at vertex " + std::to_string(nx.vertex)};
  for (std::size_t k = 0; k < Ys.size(); ++k) {
    const std::string tag = "relator " + std::to_string(k);
    auto vy = validate_complex(Ys[k]);
    if (!ok(vy)) return Error{error(vy).kind, tag + ": " + error(vy).detail};
    auto Y = std::make_unique<CubeComplex>(std::move(value(vy)));
    if (!is_connected(*Y)) return Error{"NotConnected", tag};
    auto ny = check_npc(*Y);
    if (!ny.npc) return Error{"NotNpc", tag + ": " + ny.kind};
    auto vm = validate_map(*Y, *P.X_, images[k]);
    if (!ok(vm)) return Error{error(vm).kind, tag + ": " + error(vm).detail};
    CubicalMap f = value(vm);
    if (!check_local_isometry(f)) return Error{"NotLocalIsometry", tag};
    CubicalPresentation::Rel rel;
    rel.word = circle_word(*Y, f);
    rel.Y = std::move(Y);
    rel.f = f;
    rel.f.source = rel.Y.get();
    if (normalized) {
      bool essential = !rel.word.empty() ||
                       systole(*rel.Y, 2 * static_cast<int>(rel.Y->vertex_count()) + 1).exact;
      if (!essential) return Error{"NotNormalized", tag + " is contractible"};
    }
    P.relators_.push_back(std::move(rel));
  }
  P.alpha_ = alpha;
  P.normalized_ = normalized;
  return P;
}

std::vector<Elevation> elevations(const CubicalPresentation& P, int i, const DevelopedBall& B) {
  int core = B.radius() - quick_systole(P, i);
  if (core < 0) return {};
  auto els = elevations(P.attaching(i), B, core);
  for (Elevation& el : els) el.relator = i;
  return els;
}

std::vector<Piece> cone_pieces(const CubicalPresentation& P, const DevelopedBall& B, int i, int j,
                               const std::vector<Elevation>& host_els,
                               const std::vector<Elevation>& guest_els) {
  (void)P;
  std::vector<Piece> out;
  for (std::size_t a = 0; a < host_els.size(); ++a) {
    for (std::size_t b = 0; b < guest_els.size(); ++b) {
      if (i == j && host_els[a].image.vertices == guest_els[b].image.vertices &&
          host_els[a].image.edges == guest_els[b].image.edges)
        continue;
      Piece proto;
      proto.kind = "cone";
      proto.host = i;
      proto.guest = j;
      proto.host_seed = host_els[a].seed;
      proto.guest_seed = guest_els[b].seed;
      proto.witness = pair_name("cone", i, static_cast<int>(a), j, static_cast<int>(b));
      auto ps = project_components(B, guest_els[b].image, host_els[a].image, std::move(proto));
      out.insert(out.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
    }
  }
  return out;
}

std::vector<Piece> wall_pieces(const CubicalPresentation& P, const DevelopedBall& B, int i,
                               const std::vector<Elevation>& els,
                               const std::vector<Hyperplane>& hyperplanes) {
  (void)P;
  std::vector<Piece> out;
  for (std::size_t a = 0; a < els.size(); ++a) {
    std::set<int> crossing(els[a].image.edges.begin(), els[a].image.edges.end());
    for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
      bool disjoint = std::none_of(hyperplanes[h].dual_edges.begin(),
                                   hyperplanes[h].dual_edges.end(),
                                   [&](int e) { return crossing.count(e) > 0; });
      if (!disjoint) continue;
      Piece proto;
      proto.kind = "wall";
      proto.host = i;
      proto.host_seed = els[a].seed;
      proto.hyperplane = static_cast<int>(h);
      proto.witness = "wall r" + std::to_string(i) + "e" + std::to_string(a) + ":h" +
                      std::to_string(h);
      auto ps = project_components(B, hyperplanes[h].carrier, els[a].image, std::move(proto));
      out.insert(out.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
    }
  }
  return out;
}

namespace {

void sort_pieces(std::vector<Piece>& ps) {
  std::sort(ps.begin(), ps.end(),
            [](const Piece& x, const Piece& y) { return x.witness < y.witness; });
}

void finish_verdict(PieceReport& rep) {
  sort_pieces(rep.pieces);
  for (std::size_t idx = 0; idx < rep.pieces.size(); ++idx) {
    const Piece& p = rep.pieces[idx];
    // a cone piece is a piece of both relators it joins
    std::vector<int> hosts{p.host};
    if (p.kind == "cone" && p.guest >= 0 && p.guest != p.host) hosts.push_back(p.guest);
    for (int h : hosts) {
      const SystoleBound& s = rep.systoles[h];
      if (!s.exact) continue;
      if (Frac(p.diameter) >= rep.alpha * Frac(s.value)) {
        rep.verdict = "refuted";
        rep.refuting = static_cast<int>(idx);
        return;
      }
    }
  }
  for (const SystoleBound& s : rep.systoles) {
    if (!s.exact) {
      rep.verdict = "inconclusive";
      return;
    }
  }
  rep.verdict = "certified-at-radius";
}

Error budget_error(PieceReport partial, const std::string& what) {
  partial.verdict = "inconclusive";
  sort_pieces(partial.pieces);
  nlohmann::json doc = piece_report_to_json(partial);
  doc["exceeded"] = what;
  return Error{"BudgetExceeded", canonical_json(doc)};
}

}  // namespace

Result<PieceReport> certify(const CubicalPresentation& P, int R, const Budgets& budgets) {
  PieceReport rep;
  rep.radius = R;
  rep.alpha = P.alpha();
  rep.budgets = budgets;
  const std::size_t n = P.relator_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (!P.relator_word(static_cast<int>(i)).empty())
      rep.systoles.push_back({static_cast<int>(P.relator_word(static_cast<int>(i)).size()), true});
    else
      rep.systoles.push_back(systole(P.relator(static_cast<int>(i)), budgets.systole_maxlen));
  }

  if (P.complex().dim() == 1 && P.all_circles()) {
    // periodic-line engine: exact piece enumeration, no truncation
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        LineOverlap o = max_line_overlap(P.relator_word(static_cast<int>(i)),
                                         P.relator_word(static_cast<int>(j)), i == j);
        Piece p;
        p.kind = "cone";
        p.host = static_cast<int>(i);
        p.guest = static_cast<int>(j);
        p.diameter = static_cast<int>(o.length);
        p.line = true;
        p.reversed = o.reversed;
        p.host_pos = static_cast<long long>(o.pos_host);
        p.guest_pos = static_cast<long long>(o.pos_guest);
        p.witness = "cone r" + std::to_string(i) + ":r" + std::to_string(j) + ":rev" +
                    std::to_string(o.reversed ? 1 : 0) + ":p" + std::to_string(o.pos_host) +
                    ":q" + std::to_string(o.pos_guest);
        rep.pieces.push_back(std::move(p));
      }
      // carriers in a tree are single edges; disjoint ones project to vertices
      Piece w;
      w.kind = "wall";
      w.host = static_cast<int>(i);
      w.diameter = 0;
      w.line = true;
      w.witness = "wall r" + std::to_string(i);
      rep.pieces.push_back(std::move(w));
    }
    finish_verdict(rep);
    return rep;
  }

  auto ball = develop_ball(P.complex(), 0, R);
  if (!ok(ball)) return error(ball);
  const DevelopedBall& B = value(ball);
  if (B.complex().vertex_count() > budgets.max_ball_vertices)
    return budget_error(std::move(rep), "max_ball_vertices");

  std::vector<std::vector<Elevation>> els(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    els[i] = elevations(P, static_cast<int>(i), B);
    total += els[i].size();
  }
  if (total > budgets.max_elevations) return budget_error(std::move(rep), "max_elevations");

  struct Task {
    int i, j, a, b, hyp;  // hyp >= 0 marks a wall task (j, b unused)
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t a = 0; a < els[i].size(); ++a) {
        for (std::size_t b = 0; b < els[j].size(); ++b) {
          if (i == j && a == b) continue;
          tasks.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(a),
                           static_cast<int>(b), -1});
        }
      }
    }
    for (std::size_t a = 0; a < els[i].size(); ++a) {
      std::set<int> crossing(els[i][a].image.edges.begin(), els[i][a].image.edges.end());
      for (std::size_t h = 0; h < B.hyperplanes().size(); ++h) {
        bool disjoint = std::none_of(B.hyperplanes()[h].dual_edges.begin(),
                                     B.hyperplanes()[h].dual_edges.end(),
                                     [&](int e) { return crossing.count(e) > 0; });
        if (disjoint)
          tasks.push_back(
              {static_cast<int>(i), -1, static_cast<int>(a), -1, static_cast<int>(h)});
      }
    }
  }
  if (tasks.size() > budgets.max_pairs) return budget_error(std::move(rep), "max_pairs");

  std::vector<Piece> best_of_task(tasks.size());
  auto run_task = [&](std::size_t t) {
    const Task& task = tasks[t];
    std::vector<Piece> ps;
    if (task.hyp < 0) {
      Piece proto;
      proto.kind = "cone";
      proto.host = task.i;
      proto.guest = task.j;
      proto.host_seed = els[task.i][task.a].seed;
      proto.guest_seed = els[task.j][task.b].seed;
      proto.witness = pair_name("cone", task.i, task.a, task.j, task.b);
      ps = project_components(B, els[task.j][task.b].image, els[task.i][task.a].image,
                              std::move(proto));
    } else {
      Piece proto;
      proto.kind = "wall";
      proto.host = task.i;
      proto.host_seed = els[task.i][task.a].seed;
      proto.hyperplane = task.hyp;
      proto.witness = "wall r" + std::to_string(task.i) + "e" + std::to_string(task.a) + ":h" +
                      std::to_string(task.hyp);
      ps = project_components(B, B.hyperplanes()[task.hyp].carrier, els[task.i][task.a].image,
                              std::move(proto));
    }
    const Piece* best = nullptr;
    std::size_t best_at = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (improves(ps[k], best)) {
        best = &ps[k];
        best_at = k;
      }
    }
    if (best) best_of_task[t] = std::move(ps[best_at]);
  };
  const int threads = std::max(1, budgets.threads);
  if (threads == 1 || tasks.size() < 2) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = static_cast<std::size_t>(w); t < tasks.size();
             t += static_cast<std::size_t>(threads))
          run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  // keep one maximal piece per relator pair and per relator wall summary
  std::map<std::pair<int, int>, const Piece*> best_cone;
  std::map<int, const Piece*> best_wall;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Piece& p = best_of_task[t];
    if (p.host < 0) continue;
    if (p.kind == "cone") {
      auto key = std::minmax(p.host, p.guest);
      auto& slot = best_cone[{key.first, key.second}];
      if (improves(p, slot)) slot = &p;
    } else {
      auto& slot = best_wall[p.host];
      if (improves(p, slot)) slot = &p;
    }
  }
  for (auto& [key, p] : best_cone) rep.pieces.push_back(*p);
  for (auto& [key, p] : best_wall) rep.pieces.push_back(*p);
  finish_verdict(rep);
  return rep;
}

bool replay_piece(const CubicalPresentation& P, const Piece& p, const DevelopedBall* B) {
  if (p.line) {
    if (p.kind == "wall") return p.diameter == 0;
    const Word& wi = P.relator_word(p.host);
    const Word& wj = P.relator_word(p.guest);
    for (const LineOverlap& o : line_overlaps(wi, wj, p.host == p.guest, 1))
      if (o.reversed == p.reversed && static_cast<long long>(o.pos_host) == p.host_pos &&
          static_cast<long long>(o.pos_guest) == p.guest_pos)
        return static_cast<int>(o.length) == p.diameter;
    return static_cast<int>(max_line_overlap(wi, wj, p.host == p.guest).length) == p.diameter;
  }
  if (!B) return false;
  Elevation host = develop_elevation(P.attaching(p.host), *B, p.host_seed.first, p.host_seed.second);
  SubComplex from;
  if (p.kind == "cone") {
    Elevation guest =
        develop_elevation(P.attaching(p.guest), *B, p.guest_seed.first, p.guest_seed.second);
    from = guest.image;
  } else {
    if (p.hyperplane < 0 || p.hyperplane >= static_cast<int>(B->hyperplanes().size())) return false;
    from = B->hyperplanes()[p.hyperplane].carrier;
  }
  SubComplex pr = proj(*B, trim_interior(*B, from), trim_interior(*B, host.image));
  for (const SubComplex& comp : components(*B, pr))
    if (comp.vertices == p.sub.vertices)
      return intrinsic_diameter(*B, comp) == p.diameter && comp.edges == p.sub.edges;
  return false;
}

namespace {

nlohmann::json subcomplex_to_json(const SubComplex& s) {
  nlohmann::json cubes = nlohmann::json::array();
  for (auto [d, c] : s.cubes) cubes.push_back({d, c});
  return {{"vertices", s.vertices}, {"edges", s.edges}, {"cubes", cubes}};
}

}  // namespace

nlohmann::json piece_to_json(const Piece& p) {
  nlohmann::json doc{{"kind", p.kind},         {"host", p.host},
                     {"guest", p.guest},       {"diameter", p.diameter},
                     {"witness", p.witness},   {"line", p.line}};
  if (p.line) {
    doc["reversed"] = p.reversed;
    doc["host_pos"] = p.host_pos;
    doc["guest_pos"] = p.guest_pos;
  } else {
    doc["host_seed"] = {p.host_seed.first, p.host_seed.second};
    doc["guest_seed"] = {p.guest_seed.first, p.guest_seed.second};
    doc["hyperplane"] = p.hyperplane;
    doc["sub"] = subcomplex_to_json(p.sub);
  }
  return doc;
}

nlohmann::json piece_report_to_json(const PieceReport& r) {
  nlohmann::json systoles = nlohmann::json::array();
  for (std::size_t i = 0; i < r.systoles.size(); ++i)
    systoles.push_back(
        {{"relator", i}, {"value", r.systoles[i].value}, {"exact", r.systoles[i].exact}});
  nlohmann::json pieces = nlohmann::json::array();
  for (const Piece& p : r.pieces) pieces.push_back(piece_to_json(p));
  return {{"verdict", r.verdict},
          {"radius", r.radius},
          {"alpha", r.alpha.str()},
          {"systoles", systoles},
          {"pieces", pieces},
          {"refuting", r.refuting},
          {"budgets",
           {{"systole_maxlen", r.budgets.systole_maxlen},
            {"max_ball_vertices", r.budgets.max_ball_vertices},
            {"max_elevations", r.budgets.max_elevations},
            {"max_pairs", r.budgets.max_pairs},
            {"threads", r.budgets.threads}}}};
}

std::string piece_report_csv(const PieceReport& r) {
  std::string out = "relator,systole,max_piece,ratio\n";
  for (std::size_t i = 0; i < r.systoles.size(); ++i) {
    int maxp = 0;
    for (const Piece& p : r.pieces)
      if (p.host == static_cast<int>(i) || (p.kind == "cone" && p.guest == static_cast<int>(i)))
        maxp = std::max(maxp, p.diameter);
    const SystoleBound& s = r.systoles[i];
    out += std::to_string(i) + ",";
    out += (s.exact ? std::to_string(s.value) : ">" + std::to_string(s.value)) + ",";
    out += std::to_string(maxp) + ",";
    out += (s.exact && s.value > 0 ? Frac(maxp, s.value).str() : "?") + "\n";
  }
  return out;
}

}  // namespace cubsc
