#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubsc/result.hpp"

namespace cubsc {

/// A germ is an edge-end at a vertex: link vertices are germs, so a loop at a
/// vertex contributes two of them.
struct Germ {
  int edge = -1;
  int end = 0;
  auto operator<=>(const Germ&) const = default;
};

/// A corner of a d-cube (d >= 1) at one of its 2^d corner vertices; bit a of
/// `bits` is the side along axis a. Corners are the link simplices.
struct Corner {
  int dim = 0;
  int cube = -1;
  unsigned bits = 0;
  auto operator<=>(const Corner&) const = default;
};

/// Raw cube-complex description: cubes[d][c] lists the 2d codimension-1 faces
/// of d-cube c, indexed faces[2*axis+side]. Vertices have empty face lists.
/// An edge's face list is its two endpoints [side0, side1]; edges are oriented
/// from their side-0 vertex to their side-1 vertex.
struct RawComplex {
  std::vector<std::vector<std::vector<int>>> cubes;
  std::vector<std::vector<std::string>> labels;
};

/// Finite combinatorial cube complex with an explicit face lattice. Immutable
/// after validation; all queries are pure.
class CubeComplex {
 public:
  int dim() const { return static_cast<int>(cubes_.size()) - 1; }
  std::size_t size(int d) const;
  std::size_t vertex_count() const { return size(0); }
  std::size_t edge_count() const { return size(1); }

  const std::vector<int>& faces(int d, int c) const { return cubes_[d][c]; }
  /// The (d-1)-face of d-cube c with axis `axis` frozen at `side`.
  int face(int d, int c, int axis, int side) const { return cubes_[d][c][2 * axis + side]; }
  int endpoint(int e, int end) const { return cubes_[1][e][end]; }

  /// Corner vertex reached by freezing every axis, highest first.
  int corner_vertex(int d, int c, unsigned bits) const;
  /// Germ along each axis at the corner: the edge with all other axes frozen,
  /// met at end bits[axis]. Size d, may repeat for degenerate attachments.
  std::vector<Germ> corner_germs(int d, int c, unsigned bits) const;

  const std::vector<Germ>& germs_at(int v) const { return germs_at_[v]; }
  const std::vector<Corner>& corners_at(int v) const { return corners_at_[v]; }
  /// The corner at v whose germ set is exactly `germs` (sorted or not); unique
  /// when links are simplicial. Returns the first match.
  std::optional<Corner> corner_spanning(int v, std::vector<Germ> germs) const;
  /// Number of corners at v spanning exactly this germ set.
  std::size_t corners_spanning(int v, std::vector<Germ> germs) const;

  const std::string& label(int d, int c) const;
  const RawComplex& raw() const { return raw_; }

 private:
  friend Result<CubeComplex> validate_complex(const RawComplex&);
  RawComplex raw_;
  std::vector<std::vector<std::vector<int>>> cubes_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<std::vector<Germ>> germs_at_;
  std::vector<std::vector<Corner>> corners_at_;
  // per vertex, sorted by germ set; duplicates witness non-simplicial links
  std::vector<std::vector<std::pair<std::vector<Germ>, Corner>>> span_;
};

/// Checks face counts (2d per d-cube), reference validity, the face
/// commutation identity (both routes to every codimension-2 face agree), and
/// that no two distinct d-cubes share all 2d faces; builds link indices.
/// Errors: InconsistentFaces, DanglingReference.
Result<CubeComplex> validate_complex(const RawComplex& raw);

/// Face lattice of the solid d-cube: vertices are the 2^d bit patterns,
/// k-cubes are (free-axis set, fixed bits) pairs in a fixed enumeration order.
RawComplex standard_cube(int d);

struct NpcReport {
  bool npc = false;
  /// On failure: a vertex plus the link germ set witnessing the violation.
  /// kind is "degenerate_corner", "repeated_simplex", or "empty_simplex".
  int vertex = -1;
  std::vector<Germ> germs;
  std::string kind;
  /// Rechecks the stated certificate directly against X.
  bool replay(const CubeComplex& X) const;
};

/// Gromov criterion germ by germ: every vertex link must be a simplicial flag
/// complex. Total; failures carry a replayable certificate.
NpcReport check_npc(const CubeComplex& X);

/// Dimension-preserving map commuting strictly with face maps. Source
/// complexes are built so that oriented cells map forward; there is no
/// orientation-twist data. Does not own its endpoints.
struct CubicalMap {
  const CubeComplex* source = nullptr;
  const CubeComplex* target = nullptr;
  std::vector<std::vector<int>> image;
  int vertex_image(int v) const { return image[0][v]; }
  int edge_image(int e) const { return image[1][e]; }
  int cube_image(int d, int c) const { return image[d][c]; }
};

/// Errors: DanglingReference (image id out of range or missing dimension),
/// InconsistentFaces (face maps fail to commute).
Result<CubicalMap> validate_map(const CubeComplex& source, const CubeComplex& target,
                                std::vector<std::vector<int>> image);

/// True iff at every source vertex the induced link map is injective with
/// full image. Both complexes must pass check_npc; with flag simplicial
/// links, fullness at germ-pair level settles all higher simplices.
bool check_local_isometry(const CubicalMap& f);

}  // namespace cubsc
