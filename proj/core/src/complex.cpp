#include "cubsc/complex.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace cubsc {

std::size_t CubeComplex::size(int d) const {
  if (d < 0 || d >= static_cast<int>(cubes_.size())) return 0;
  return cubes_[d].size();
}

int CubeComplex::corner_vertex(int d, int c, unsigned bits) const {
  int cur = c;
  for (int k = d; k >= 1; --k) cur = cubes_[k][cur][2 * (k - 1) + ((bits >> (k - 1)) & 1u)];
  return cur;
}

std::vector<Germ> CubeComplex::corner_germs(int d, int c, unsigned bits) const {
  std::vector<Germ> out;
  out.reserve(d);
  for (int a = 0; a < d; ++a) {
    // Freeze every other axis, highest first; an axis keeps its own index
    // while only higher ones have been frozen.
    int cur = c, curdim = d;
    for (int b = d - 1; b >= 0; --b) {
      if (b == a) continue;
      cur = cubes_[curdim][cur][2 * b + ((bits >> b) & 1u)];
      --curdim;
    }
    out.push_back(Germ{cur, static_cast<int>((bits >> a) & 1u)});
  }
  return out;
}

std::optional<Corner> CubeComplex::corner_spanning(int v, std::vector<Germ> germs) const {
  std::sort(germs.begin(), germs.end());
  const auto& tbl = span_[v];
  auto it = std::lower_bound(tbl.begin(), tbl.end(), germs,
                             [](const auto& a, const auto& b) { return a.first < b; });
  if (it == tbl.end() || it->first != germs) return std::nullopt;
  return it->second;
}

std::size_t CubeComplex::corners_spanning(int v, std::vector<Germ> germs) const {
  std::sort(germs.begin(), germs.end());
  const auto& tbl = span_[v];
  auto lo = std::lower_bound(tbl.begin(), tbl.end(), germs,
                             [](const auto& a, const auto& b) { return a.first < b; });
  std::size_t n = 0;
  while (lo != tbl.end() && lo->first == germs) ++n, ++lo;
  return n;
}

const std::string& CubeComplex::label(int d, int c) const {
  static const std::string empty;
  if (d >= static_cast<int>(labels_.size())) return empty;
  if (c >= static_cast<int>(labels_[d].size())) return empty;
  return labels_[d][c];
}

Result<CubeComplex> validate_complex(const RawComplex& raw) {
  const auto& cubes = raw.cubes;
  for (std::size_t d = 0; d < cubes.size(); ++d) {
    for (std::size_t c = 0; c < cubes[d].size(); ++c) {
      if (cubes[d][c].size() != 2 * d)
        return Error{"InconsistentFaces",
                     "cube " + std::to_string(c) + " of dimension " + std::to_string(d) +
                         " has " + std::to_string(cubes[d][c].size()) + " faces, wants " +
                         std::to_string(2 * d)};
      for (int id : cubes[d][c])
        if (id < 0 || id >= static_cast<int>(cubes[d - 1].size()))
          return Error{"DanglingReference", "face " + std::to_string(id) + " of cube " +
                                                std::to_string(c) + " in dimension " +
                                                std::to_string(d)};
    }
  }
  // two routes to every codimension-2 face must agree
  for (std::size_t d = 2; d < cubes.size(); ++d) {
    for (std::size_t c = 0; c < cubes[d].size(); ++c) {
      for (int b = 1; b < static_cast<int>(d); ++b) {
        for (int a = 0; a < b; ++a) {
          for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
              int via_b = cubes[d - 1][cubes[d][c][2 * b + t]][2 * a + s];
              int via_a = cubes[d - 1][cubes[d][c][2 * a + s]][2 * (b - 1) + t];
              if (via_b != via_a)
                return Error{"InconsistentFaces",
                             "cube " + std::to_string(c) + " of dimension " + std::to_string(d) +
                                 ": routes through axes " + std::to_string(a) + "," +
                                 std::to_string(b) + " disagree"};
            }
          }
        }
      }
    }
  }
  // a cube of dimension >= 2 is determined by its faces; edges are not
  // (loops of a wedge share both endpoints)
  for (std::size_t d = 2; d < cubes.size(); ++d) {
    std::map<std::vector<int>, std::size_t> seen;
    for (std::size_t c = 0; c < cubes[d].size(); ++c) {
      auto key = cubes[d][c];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = seen.emplace(std::move(key), c);
      if (!fresh)
        return Error{"InconsistentFaces", "cubes " + std::to_string(it->second) + " and " +
                                              std::to_string(c) + " of dimension " +
                                              std::to_string(d) + " share all faces"};
    }
  }

  CubeComplex X;
  X.raw_ = raw;
  X.cubes_ = raw.cubes;
  X.labels_ = raw.labels;
  const std::size_t nv = X.size(0);
  X.germs_at_.resize(nv);
  X.corners_at_.resize(nv);
  X.span_.resize(nv);
  for (std::size_t e = 0; e < X.size(1); ++e)
    for (int end = 0; end < 2; ++end)
      X.germs_at_[X.endpoint(static_cast<int>(e), end)].push_back(
          Germ{static_cast<int>(e), end});
  for (auto& g : X.germs_at_) std::sort(g.begin(), g.end());
  for (int d = 1; d <= X.dim(); ++d) {
    for (std::size_t c = 0; c < X.size(d); ++c) {
      for (unsigned bits = 0; bits < (1u << d); ++bits) {
        Corner k{d, static_cast<int>(c), bits};
        int v = X.corner_vertex(d, static_cast<int>(c), bits);
        auto germs = X.corner_germs(d, static_cast<int>(c), bits);
        std::sort(germs.begin(), germs.end());
        X.corners_at_[v].push_back(k);
        X.span_[v].emplace_back(std::move(germs), k);
      }
    }
  }
  for (auto& tbl : X.span_) std::sort(tbl.begin(), tbl.end());
  return X;
}

RawComplex standard_cube(int d) {
  RawComplex raw;
  raw.cubes.resize(d + 1);
  // per dimension: masks of free axes in ascending numeric order, then the
  // fixed bits packed over the complement axes ascending
  std::vector<std::vector<unsigned>> masks(d + 1);
  std::vector<std::map<unsigned, int>> base(d + 1);
  for (unsigned m = 0; m < (1u << d); ++m) {
    int k = std::popcount(m);
    base[k][m] = 0;
    masks[k].push_back(m);
  }
  for (int k = 0; k <= d; ++k) {
    int at = 0;
    for (unsigned m : masks[k]) {
      base[k][m] = at;
      at += 1 << (d - k);
    }
  }
  auto pack = [&](unsigned m, const std::vector<int>& fixed) {
    unsigned b = 0;
    int pos = 0;
    for (int x = 0; x < d; ++x)
      if (!((m >> x) & 1u)) b |= static_cast<unsigned>(fixed[x]) << pos++;
    return b;
  };
  auto unpack = [&](unsigned m, unsigned b) {
    std::vector<int> fixed(d, 0);
    int pos = 0;
    for (int x = 0; x < d; ++x)
      if (!((m >> x) & 1u)) fixed[x] = (b >> pos++) & 1u;
    return fixed;
  };
  for (int k = 0; k <= d; ++k) {
    for (unsigned m : masks[k]) {
      for (unsigned b = 0; b < (1u << (d - k)); ++b) {
        std::vector<int> faces;
        auto fixed = unpack(m, b);
        for (int a = 0; a < d; ++a) {
          if (!((m >> a) & 1u)) continue;
          for (int s = 0; s < 2; ++s) {
            unsigned m2 = m & ~(1u << a);
            auto f2 = fixed;
            f2[a] = s;
            faces.push_back(base[k - 1][m2] + static_cast<int>(pack(m2, f2)));
          }
        }
        raw.cubes[k].push_back(std::move(faces));
      }
    }
  }
  return raw;
}

namespace {

bool has_adjacent_dup(const std::vector<Germ>& sorted) {
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] == sorted[i + 1]) return true;
  return false;
}

}  // namespace

NpcReport check_npc(const CubeComplex& X) {
  for (int v = 0; v < static_cast<int>(X.vertex_count()); ++v) {
    for (const Corner& k : X.corners_at(v)) {
      auto germs = X.corner_germs(k.dim, k.cube, k.bits);
      std::sort(germs.begin(), germs.end());
      if (has_adjacent_dup(germs)) return NpcReport{false, v, germs, "degenerate_corner"};
    }
    const auto& G = X.germs_at(v);
    std::map<Germ, int> index;
    for (int i = 0; i < static_cast<int>(G.size()); ++i) index[G[i]] = i;
    std::vector<std::vector<bool>> adj(G.size(), std::vector<bool>(G.size(), false));
    std::vector<std::vector<int>> cliques;
    for (const Corner& k : X.corners_at(v)) {
      auto germs = X.corner_germs(k.dim, k.cube, k.bits);
      std::sort(germs.begin(), germs.end());
      if (X.corners_spanning(v, germs) > 1) return NpcReport{false, v, germs, "repeated_simplex"};
      if (k.dim == 2) {
        int i = index[germs[0]], j = index[germs[1]];
        adj[i][j] = adj[j][i] = true;
        cliques.push_back({i, j});
      }
    }
    // flag: grow cliques one germ at a time; every clique must span a corner
    while (!cliques.empty()) {
      std::vector<std::vector<int>> next;
      for (const auto& c : cliques) {
        for (int g = c.back() + 1; g < static_cast<int>(G.size()); ++g) {
          if (!std::all_of(c.begin(), c.end(), [&](int i) { return adj[i][g]; })) continue;
          auto c2 = c;
          c2.push_back(g);
          std::vector<Germ> germs;
          for (int i : c2) germs.push_back(G[i]);
          if (X.corners_spanning(v, germs) == 0) return NpcReport{false, v, germs, "empty_simplex"};
          next.push_back(std::move(c2));
        }
      }
      cliques = std::move(next);
    }
  }
  return NpcReport{true, -1, {}, ""};
}

bool NpcReport::replay(const CubeComplex& X) const {
  if (npc || vertex < 0 || vertex >= static_cast<int>(X.vertex_count())) return false;
  if (kind == "degenerate_corner") {
    for (const Corner& k : X.corners_at(vertex)) {
      auto g = X.corner_germs(k.dim, k.cube, k.bits);
      std::sort(g.begin(), g.end());
      if (g == germs && has_adjacent_dup(g)) return true;
    }
    return false;
  }
  if (kind == "repeated_simplex") return X.corners_spanning(vertex, germs) > 1;
  if (kind == "empty_simplex") {
    if (germs.size() < 3) return false;
    for (std::size_t i = 0; i < germs.size(); ++i)
      for (std::size_t j = i + 1; j < germs.size(); ++j)
        if (!X.corner_spanning(vertex, {germs[i], germs[j]})) return false;
    return X.corners_spanning(vertex, germs) == 0;
  }
  return false;
}

Result<CubicalMap> validate_map(const CubeComplex& source, const CubeComplex& target,
                                std::vector<std::vector<int>> image) {
  if (image.size() != static_cast<std::size_t>(source.dim() + 1))
    return Error{"DanglingReference", "image has " + std::to_string(image.size()) +
                                          " dimensions, source has " +
                                          std::to_string(source.dim() + 1)};
  for (int d = 0; d <= source.dim(); ++d) {
    if (image[d].size() != source.size(d))
      return Error{"DanglingReference", "dimension " + std::to_string(d) + " image size mismatch"};
    for (int id : image[d])
      if (id < 0 || id >= static_cast<int>(target.size(d)))
        return Error{"DanglingReference",
                     "image id " + std::to_string(id) + " in dimension " + std::to_string(d)};
  }
  for (int d = 1; d <= source.dim(); ++d) {
    for (std::size_t c = 0; c < source.size(d); ++c) {
      for (int a = 0; a < d; ++a) {
        for (int s = 0; s < 2; ++s) {
          int want = image[d - 1][source.face(d, static_cast<int>(c), a, s)];
          int got = target.face(d, image[d][c], a, s);
          if (want != got)
            return Error{"InconsistentFaces", "cube " + std::to_string(c) + " of dimension " +
                                                  std::to_string(d) + " axis " + std::to_string(a) +
                                                  " side " + std::to_string(s)};
        }
      }
    }
  }
  CubicalMap f;
  f.source = &source;
  f.target = &target;
  f.image = std::move(image);
  return f;
}

bool check_local_isometry(const CubicalMap& f) {
  const CubeComplex& S = *f.source;
  const CubeComplex& T = *f.target;
  for (int v = 0; v < static_cast<int>(S.vertex_count()); ++v) {
    const int u = f.vertex_image(v);
    const auto& G = S.germs_at(v);
    auto img = [&](const Germ& g) { return Germ{f.edge_image(g.edge), g.end}; };
    std::vector<Germ> images;
    for (const Germ& g : G) images.push_back(img(g));
    std::sort(images.begin(), images.end());
    if (has_adjacent_dup(images)) return false;
    for (std::size_t i = 0; i < G.size(); ++i) {
      for (std::size_t j = i + 1; j < G.size(); ++j) {
        bool src = S.corner_spanning(v, {G[i], G[j]}).has_value();
        bool dst = T.corner_spanning(u, {img(G[i]), img(G[j])}).has_value();
        if (src != dst) return false;
      }
    }
  }
  return true;
}

}  // namespace cubsc
