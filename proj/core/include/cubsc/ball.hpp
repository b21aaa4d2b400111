#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cubsc/complex.hpp"
#include "cubsc/result.hpp"

namespace cubsc {

/// Subcomplex of a developed ball: sorted vertex and edge id lists plus
/// higher cells as (dimension, id) pairs, closed under faces by convention
/// of the producing operation.
struct SubComplex {
  std::vector<int> vertices;
  std::vector<int> edges;
  std::vector<std::pair<int, int>> cubes;
  bool has_vertex(int v) const;
  bool has_edge(int e) const;
};

/// Hyperplane of a developed ball: class of dual edges under the
/// square-opposite-edge relation; carrier is the union of closed cubes
/// containing a dual edge.
struct Hyperplane {
  std::vector<int> dual_edges;
  SubComplex carrier;
};

/// An elevation of a local isometry f: Y -> X into a developed ball of X:
/// the embedded development of Y's universal cover, recorded as matched
/// (Y cell, ball cell) pairs. `image` also carries the ball cubes covered by
/// Y cubes. Meaningful within the ball interior; cells near the frontier may
/// be truncated.
struct Elevation {
  int relator = -1;
  std::pair<int, int> seed;                    // (Y vertex, ball vertex)
  std::vector<std::pair<int, int>> vertices;   // (Y vertex, ball vertex)
  std::vector<std::pair<int, int>> edges;      // (Y edge, ball edge)
  SubComplex image;
};

/// Finite-radius development of the universal cover around a basepoint.
/// Vertices carry BFS distance from the lifted basepoint (vertex 0); the
/// exported complex holds every cell all of whose vertices lie within the
/// radius. Interior means distance <= R-1: there, graph distances agree with
/// the full cover (some geodesic between interior vertices stays interior, by
/// cutting through the median with the basepoint), so geometry queries are
/// answered exactly or refused, never silently truncated.
class DevelopedBall {
 public:
  const CubeComplex& complex() const { return complex_; }
  const CubeComplex& base() const { return *base_; }
  int radius() const { return radius_; }
  int basepoint() const { return basepoint_; }
  int lifted_basepoint() const { return 0; }

  int dist(int v) const { return dist_[v]; }
  bool interior(int v) const { return dist_[v] <= radius_ - 1; }
  /// Frontier marker: the cell has a vertex within distance 1 of the radius.
  bool frontier(int d, int c) const;
  /// Covering map to the base.
  int image(int d, int c) const { return covering_[d][c]; }
  /// Lex-least edge path from the basepoint, rendered as a word over base
  /// edge letters; the deterministic cell name.
  const std::string& vertex_name(int v) const { return names_[v]; }
  /// The ball germ over a base germ at v, if developed.
  std::optional<Germ> lift_germ(int v, Germ base_germ) const;
  /// Neighbor across an edge germ.
  int across(int v, const Germ& ball_germ) const;

  const std::vector<Hyperplane>& hyperplanes() const { return hyperplanes_; }
  int edge_hyperplane(int e) const { return edge_hyperplane_[e]; }
  /// Hyperplanes separating x and y: the classes dual to the edges of one
  /// geodesic (each crossed exactly once on any geodesic).
  Result<std::vector<int>> separating_hyperplanes(int x, int y) const;

  std::vector<int> bfs_dist(int from) const;
  int distance(int x, int y) const;

  /// Edge path from x to y as signed ball-edge letters, deterministic
  /// (lex-least descent). Errors: OutOfBall.
  Result<std::vector<int>> geodesic(int x, int y) const;
  /// Errors: OutOfBall (inputs or the answer would leave the interior).
  Result<int> median(int x, int y, int z) const;
  /// Interval-closure hull spanned as a full subcomplex.
  /// Errors: OutOfBall (inputs), HullTruncated (hull reaches the frontier).
  Result<SubComplex> convex_hull(std::vector<int> S) const;
  /// Nearest point of the convex set C. Errors: OutOfBall.
  Result<int> gate(const SubComplex& C, int x) const;

  /// Full subcomplex spanned by a vertex set.
  SubComplex span(std::vector<int> vertices) const;

 private:
  friend Result<DevelopedBall> develop_ball(const CubeComplex&, int, int);
  const CubeComplex* base_ = nullptr;
  int basepoint_ = 0;
  int radius_ = 0;
  CubeComplex complex_;
  std::vector<std::vector<int>> covering_;
  std::vector<int> dist_;
  std::vector<std::string> names_;
  std::vector<std::map<Germ, Germ>> germ_lift_;
  std::vector<Hyperplane> hyperplanes_;
  std::vector<int> edge_hyperplane_;
};

/// Develops the ball of the universal cover by breadth-first growth plus
/// square-corner completion and folding to a fixpoint. The ball keeps a
/// pointer to X, which must outlive it. Errors: NotNpc.
Result<DevelopedBall> develop_ball(const CubeComplex& X, int basepoint, int R);

/// Development of the cover of f's source through one (Y vertex, ball vertex)
/// seed; the image embeds, so ball cells index the development. Stops at the
/// ball frontier.
Elevation develop_elevation(const CubicalMap& f, const DevelopedBall& B, int y, int v);

/// All distinct elevations of f whose image meets the ball of radius
/// `core_radius`, deduplicated by image; see the callers for the radius
/// policy. Seeds are enumerated over every (Y vertex, ball vertex) fiber
/// pair, so translates on the same line collapse to one elevation.
std::vector<Elevation> elevations(const CubicalMap& f, const DevelopedBall& B, int core_radius);

/// Subcomplex of V spanned by all of V's vertices, the closed V-edges dual to
/// hyperplanes meeting U, and every cube of V whose 1-skeleton appears.
SubComplex proj(const DevelopedBall& B, const SubComplex& U, const SubComplex& V);

/// Intrinsic graph diameter of the subcomplex's 1-skeleton, per component
/// maximum; isolated vertices give 0.
int intrinsic_diameter(const DevelopedBall& B, const SubComplex& S);

/// Connected components of the subcomplex's 1-skeleton; cubes follow their
/// corners. Each component is sorted like its parent.
std::vector<SubComplex> components(const DevelopedBall& B, const SubComplex& S);

/// Cubical subdivision: every d-cube splits into 2^d; vertices of the result
/// are the original cells (barycenters joined along the face lattice).
CubeComplex subdivide(const CubeComplex& X);

}  // namespace cubsc
