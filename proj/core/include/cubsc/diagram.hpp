#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubsc/presentation.hpp"
#include "cubsc/result.hpp"

namespace cubsc {

/// Plane diagram as glued polygons. Edges are oriented tail -> head; a signed
/// id +e / -(e+1)-style encoding is avoided: boundaries list e+1 for forward
/// traversal and -(e+1) for reverse. `outer` is the boundary path of the
/// diagram read in order.
struct RawDiagram {
  struct Cell {
    std::string kind;            // "square" | "cone"
    int image = -1;              // square id in X, or relator index
    std::vector<int> boundary;   // signed edge ids, cyclic
  };
  int vertices = 0;
  std::vector<int> vertex_image;                 // X vertex per diagram vertex
  std::vector<std::pair<int, int>> edge_ends;    // tail, head
  std::vector<int> edge_image;                   // X edge per diagram edge
  std::vector<Cell> cells;
  std::vector<int> outer;                        // signed edge ids, cyclic
};

/// Validated diagram over a presentation: a combinatorial map whose faces are
/// the cells plus one outer face, with sphere Euler characteristic. Darts are
/// 2e (forward) and 2e+1 (reverse).
class DiscDiagram {
 public:
  int vertex_count() const { return raw_.vertices; }
  int edge_count() const { return static_cast<int>(raw_.edge_ends.size()); }
  int dart_count() const { return 2 * edge_count(); }
  int cell_count() const { return static_cast<int>(raw_.cells.size()); }

  static int twin(int d) { return d ^ 1; }
  int origin(int d) const {
    const auto& e = raw_.edge_ends[d >> 1];
    return (d & 1) == 0 ? e.first : e.second;
  }
  int target(int d) const { return origin(twin(d)); }
  /// signed X edge read along the dart
  int letter(int d) const {
    int base = raw_.edge_image[d >> 1] + 1;
    return (d & 1) == 0 ? base : -base;
  }
  int next(int d) const { return next_[d]; }
  int prev(int d) const { return prev_[d]; }
  /// face id of a dart; cell ids index cells, outer face id = cell_count()
  int face_of(int d) const { return face_of_[d]; }
  int outer_face() const { return cell_count(); }
  const RawDiagram::Cell& cell(int f) const { return raw_.cells[f]; }
  /// darts around a face in boundary order
  const std::vector<int>& face_darts(int f) const { return face_darts_[f]; }
  /// darts of the outer face in the order of `raw().outer` (the boundary path)
  const std::vector<int>& boundary_darts() const { return face_darts_[cell_count()]; }
  Word boundary_word() const;
  int vertex_image(int v) const { return raw_.vertex_image[v]; }
  /// (cone-cells, squares)
  std::pair<int, int> complexity() const;
  const RawDiagram& raw() const { return raw_; }
  const CubeComplex& base() const { return *X_; }
  /// presentation the diagram was validated against; null when cone-free
  const CubicalPresentation* presentation() const { return P_; }

  /// number of outer-face visits at v; 0 means interior
  int boundary_passes(int v) const { return passes_[v]; }
  /// darts with this origin, in rotation order (twin-of-previous-face order)
  const std::vector<int>& darts_at(int v) const { return darts_at_[v]; }

 private:
  friend Result<DiscDiagram> validate_diagram(RawDiagram raw, const CubeComplex& X,
                                              const CubicalPresentation* P);
  RawDiagram raw_;
  const CubeComplex* X_ = nullptr;
  const CubicalPresentation* P_ = nullptr;
  std::vector<int> next_, prev_, face_of_;
  std::vector<std::vector<int>> face_darts_;
  std::vector<std::vector<int>> darts_at_;
  std::vector<int> passes_;
};

/// Checks the combinatorial-map axioms (faces partition darts, endpoints
/// chain, sphere Euler formula, connectivity) and the labels over X: edge
/// letters match endpoints, squares match a square of X up to symmetry (image
/// inferred when -1), cone boundaries lift closed in their relator. P may be
/// null when no cone-cells occur. Errors: BadDiagram, NotInBase, BadCell.
Result<DiscDiagram> validate_diagram(RawDiagram raw, const CubeComplex& X,
                                     const CubicalPresentation* P);

/// Relabels by boundary-first BFS and serializes; equal diagrams up to
/// relabeling produce identical bytes.
nlohmann::json diagram_to_json(const DiscDiagram& D);

struct DiagramBudget {
  int max_cones = 4;
  int max_squares = 16;
  int max_length = 96;
  long long max_states = 500000;
};

/// Searches for a disc diagram with boundary path w starting at base, with
/// lexicographically minimal (cone-cells, squares) among those reachable in
/// the searched region. Cone-cells are attached for circle relators only.
/// Errors: NotClosed (w is not a closed path in X), BudgetExceeded (none
/// found; detail holds the searched bounds).
Result<DiscDiagram> find_diagram(const CubicalPresentation& P, int base, const Word& w,
                                 const DiagramBudget& budget);

/// Replaces three squares forming a corner of a 3-cube of X at `vertex` by
/// the complementary three faces. Complexity and boundary are unchanged.
/// Errors: NoSite (vertex is not such a corner), NoCube (X has no matching
/// 3-cube).
Result<DiscDiagram> hexagon_move(const DiscDiagram& D, int vertex);

/// Absorbs a square with two consecutive edges on the cone-cell's boundary
/// into the cone-cell, when the rerouted boundary still lifts closed in the
/// relator. Errors: NotAbsorbable.
Result<DiscDiagram> absorb_square(const DiscDiagram& D, int cone_cell, int square);

/// Cancels a pair of mirror squares sharing an edge, if any (one reduction
/// step). Returns nothing when no cancellable pair exists.
std::optional<DiscDiagram> cancel_square_pair(const DiscDiagram& D);

/// Applies square-pair cancellations and absorptions to a fixpoint, trying
/// hexagon moves (budgeted) to expose more. Lexicographic complexity never
/// increases. Errors: BudgetExceeded carries nothing; best effort is the
/// returned diagram.
DiscDiagram reduce(const DiscDiagram& D, const DiagramBudget& budget);

}  // namespace cubsc
