#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubsc/diagram.hpp"
#include "cubsc/rational.hpp"

namespace cubsc {

/// One 2-cell of a rectified diagram. Rectangles and shards are fusions of
/// squares of the underlying diagram with some internal edges removed; cone
/// cells carry over unchanged. Boundary darts use the underlying diagram's
/// dart numbering.
struct RectCell {
  std::string kind;  // "cone" | "rectangle" | "shard"
  int image = -1;    // relator id for cone cells
  int cell = -1;     // originating cell id for cone cells
  std::vector<int> darts;
  std::vector<int> squares;        // constituent squares for rectangle/shard
  std::vector<int> removed_edges;  // edges deleted inside this cell
};

/// Re-celled diagram with an angle at every corner, stored as exact rational
/// multiples of pi. Corner i of cell f sits where boundary dart i ends and
/// dart i+1 begins. Vertices whose every edge was removed lie inside shards
/// and are absent from the rectified complex.
class RectifiedDiagram {
 public:
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const RectCell& cell(int f) const { return cells_[f]; }
  int corner_count(int f) const { return static_cast<int>(cells_[f].darts.size()); }
  int corner_vertex(int f, int i) const;

  Frac angle(int f, int i) const { return angles_[f][i]; }
  void set_angle(int f, int i, Frac a) { angles_[f][i] = a; }

  bool vertex_present(int v) const { return present_[v]; }
  bool edge_present(int e) const { return !removed_[e]; }

  /// Curvatures as exact multiples of pi: a value of 2 means 2*pi.
  Frac face_curvature(int f) const;
  Frac vertex_curvature(int v) const;
  Frac total_curvature() const;

  const DiscDiagram& base() const { return *D_; }

 private:
  friend RectifiedDiagram rectify(const DiscDiagram& D);
  const DiscDiagram* D_ = nullptr;
  std::vector<RectCell> cells_;
  std::vector<std::vector<Frac>> angles_;
  std::vector<bool> present_, removed_;
  std::vector<std::vector<std::pair<int, int>>> corners_at_;  // (cell, corner)
  std::vector<int> kept_deg_;
};

/// Re-cells a diagram and assigns the default angle table. Square components
/// whose dual-curve run graph is bipartite split into parallel rectangles;
/// the rest fuse into shards, swallowing their interior vertices. Corner
/// angles: pi/2 baseline, pi at seam corners and at cone corners flanked by
/// boundary or cone edges, 2*pi at slit tips; interior vertices short of
/// 2*pi are topped up equally across their shard corners, or their cone
/// corners when no shard touches them.
RectifiedDiagram rectify(const DiscDiagram& D);

/// Exact combinatorial Gauss-Bonnet identity: total curvature equals 2*pi.
bool gauss_bonnet_check(const RectifiedDiagram& R);

/// A positively-curved boundary feature: a spur vertex, a shell cone-cell
/// with its outer path Q on the diagram boundary and inner path S, or a
/// generalized corner where dual curves from two consecutive boundary edges
/// cross inside a square. Spurs are scanned along the based boundary path
/// (the base point breaks the cycle); corners are scanned cyclically.
struct Feature {
  std::string kind;  // "spur" | "shell" | "generalized-corner"
  int vertex = -1;   // spur vertex / corner vertex
  int cell = -1;     // shell cone cell / corner crossing square
  std::vector<int> outer_darts, inner_darts;
  Word outer_path, inner_path;
  Frac curvature;  // shells: kappa of the cone cell, multiple of pi
};

std::vector<Feature> detect_features(const DiscDiagram& D);

/// Column C_i of a padded ladder: a cone cell or a single vertex. The cell's
/// dart cycle reads gamma, nu, alpha reversed, mu reversed (the outer face
/// walks alpha and gamma the other way); the four fields hold those subarcs
/// as they appear in the cycle, any of which may be empty.
struct LadderColumn {
  bool is_vertex = false;
  int cell = -1;
  int vertex = -1;
  std::vector<int> mu, alpha, nu, gamma;
};

/// Pseudorectangle R_i with boundary nu_i rho_i mu_{i+1}^-1 varrho_i^-1.
/// nu/mu hold the flanking columns' interface darts (cone-side, as stored in
/// the columns); rho/varrho hold the outer-face darts of the two boundary
/// arcs in boundary-walk order.
struct LadderRectangle {
  std::vector<int> nu, rho, mu, varrho;
  std::vector<int> squares;
  bool horizontally_degenerate = false;
  bool vertically_degenerate = false;
};

struct LadderDecomposition {
  std::vector<LadderColumn> columns;
  std::vector<LadderRectangle> rectangles;  // size columns.size() + 1
  bool is_ladder = false;  // first and last rectangle vertically degenerate
};

/// Recognizes the padded-ladder structure: an alternating chain of cone
/// cells (or vertices) and square pseudorectangles whose dual curves run
/// side to side without crossings emanating from a shared column side.
/// Returns the decomposition with degeneracy flags, or nothing.
std::optional<LadderDecomposition> is_padded_ladder(const DiscDiagram& D);

}  // namespace cubsc
