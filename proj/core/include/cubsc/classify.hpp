#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubsc/ball.hpp"
#include "cubsc/cayley.hpp"
#include "cubsc/diagram.hpp"
#include "cubsc/presentation.hpp"
#include "cubsc/result.hpp"
#include "cubsc/words.hpp"

namespace cubsc {

/// Feature at one triangle corner of the classified diagram: the cone cell
/// containing the corner, a spur, an exposed square, or nothing ("flat",
/// the boundary running straight through a degenerate corner).
struct CornerFeature {
  std::string kind;  // "cone" | "spur" | "square" | "flat"
  int cell = -1;     // diagram cell for cone/square corners
  int vertex = -1;   // diagram vertex at the corner
};

/// Chain of cone cells meeting exactly the two sides adjacent to one corner,
/// ordered from the corner inward.
struct TriangleLadder {
  int corner = -1;  // 0: first-second side, 1: second-third, 2: third-first
  std::vector<int> cells;
};

struct ClassifyBudget {
  DiagramBudget diagram;        // per candidate boundary search
  int max_side_candidates = 6;  // geodesics enumerated per side
  int max_triples = 24;         // boundary searches across side choices
  bool bigons = true;           // also search the side-vs-reference square bigons
};

/// Outcome of classifying a geodesic triangle: one of the nine structure
/// labels, the witnessing diagram, per-corner features, the cone-cell chains
/// along each pair of sides, the central cell (when one cone meets all three
/// sides) or the tripod point (ball vertex minimizing the distance sum), the
/// chosen sides as base words, and square bigons connecting each chosen side
/// to the reference geodesic when they differ.
struct TriangleClassification {
  std::string label;  // "3-shell generic" | "3-shell tripod" | "2-shell generic"
                      // | "2-shell tripod" | "1-shell generic" | "1-shell tripod"
                      // | "no-shell generic" | "no-shell tripod" | "degenerate"
  DiscDiagram diagram;
  std::array<CornerFeature, 3> corners;
  std::vector<TriangleLadder> ladders;
  int median_cell = -1;
  int tripod_point = -1;
  std::array<Word, 3> sides;
  std::array<std::optional<DiscDiagram>, 3> bigons;
};

/// Classifies the geodesic triangle on ball vertices x, y, z: enumerates
/// geodesic sides (always including the median-routed triple when its legs
/// are geodesic), searches a complexity-minimal diagram over the candidates,
/// reads the corner features and cone-cell incidences off the winner, and
/// returns the matching label. Degenerate means a trivial side or a diagram
/// that is a single vertex, a single cone cell, or a recognized ladder.
/// Errors: NotInBase (vertex ids out of range), BudgetExceeded (no candidate
/// boundary bounded a diagram within budget), StructureViolation (the minimal
/// diagram fits none of the structures; detail carries the serialized
/// diagram — surfaced, never repaired).
Result<TriangleClassification> classify_triangle(const CubicalPresentation& P,
                                                 const CayleyBall& B, int x, int y, int z,
                                                 const ClassifyBudget& budget = {});

/// Same classifier over a raw development, for bases where no vertex pair of
/// the development is identified in the quotient (the caller's obligation);
/// there the development is the ball.
Result<TriangleClassification> classify_triangle(const CubicalPresentation& P,
                                                 const DevelopedBall& B, int x, int y, int z,
                                                 const ClassifyBudget& budget = {});

nlohmann::json classification_to_json(const TriangleClassification& C);

}  // namespace cubsc
