#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubsc/ball.hpp"
#include "cubsc/complex.hpp"
#include "cubsc/rational.hpp"
#include "cubsc/result.hpp"
#include "cubsc/words.hpp"

namespace cubsc {

/// Least length of an essential closed path if exact, else every closed path
/// of length <= value develops closed.
struct SystoleBound {
  int value = 0;
  bool exact = false;
};

/// Exact systole when <= maxlen, else {maxlen, exact=false}. Y must be NPC
/// and connected.
SystoleBound systole(const CubeComplex& Y, int maxlen);

/// NPC base with relator local isometries Y_i -> X; owns stable storage for
/// every complex, so balls and maps can point into it.
class CubicalPresentation {
 public:
  const CubeComplex& complex() const { return *X_; }
  std::size_t relator_count() const { return relators_.size(); }
  const CubeComplex& relator(int i) const { return *relators_[i].Y; }
  const CubicalMap& attaching(int i) const { return relators_[i].f; }
  const Frac& alpha() const { return alpha_; }
  bool normalized() const { return normalized_; }
  /// Boundary word of a circle relator over signed base edges; empty when the
  /// relator is not a circle. When X has dimension 1 and every relator is a
  /// circle, pieces are computed exactly on periodic lines.
  const Word& relator_word(int i) const { return relators_[i].word; }
  bool all_circles() const;

 private:
  friend Result<CubicalPresentation> assemble_presentation(
      RawComplex, std::vector<RawComplex>, std::vector<std::vector<std::vector<int>>>, Frac, bool);
  struct Rel {
    std::unique_ptr<CubeComplex> Y;
    CubicalMap f;
    Word word;
  };
  std::unique_ptr<CubeComplex> X_;
  std::vector<Rel> relators_;
  Frac alpha_{1, 144};
  bool normalized_ = false;
};

/// Validates and assembles a presentation: X and each Y_i must validate and
/// pass check_npc, each map must be a local isometry, and when `normalized`
/// every Y_i must carry an essential loop (checked by development).
/// Errors: InconsistentFaces, DanglingReference, NotNpc, NotLocalIsometry,
/// NotNormalized.
Result<CubicalPresentation> assemble_presentation(RawComplex X, std::vector<RawComplex> Ys,
                                                  std::vector<std::vector<std::vector<int>>> images,
                                                  Frac alpha, bool normalized);

/// Elevations of relator i meeting the core of radius R - ||Y_i||, tagged
/// with the relator index.
std::vector<Elevation> elevations(const CubicalPresentation& P, int i, const DevelopedBall& B);

/// One piece: a component of a projection between distinct relator elevations
/// (cone) or from a disjoint hyperplane carrier into an elevation (wall).
/// Line pieces live on periodic relator lines and carry placement data
/// instead of ball cells; both kinds replay.
struct Piece {
  std::string kind;  // "cone" | "wall"
  int host = -1;     // relator receiving the projection
  int guest = -1;    // other relator (cone) or -1 (wall)
  int diameter = 0;
  std::string witness;  // deterministic name; reports sort by it
  // line replay data
  bool line = false;
  bool reversed = false;
  long long host_pos = 0;
  long long guest_pos = 0;
  // ball replay data
  std::pair<int, int> host_seed{-1, -1};
  std::pair<int, int> guest_seed{-1, -1};
  int hyperplane = -1;
  SubComplex sub;
};

/// Components of proj(guest elevation -> host elevation) for every ordered
/// pair of distinct elevations, as pieces hosted by relator i.
std::vector<Piece> cone_pieces(const CubicalPresentation& P, const DevelopedBall& B, int i, int j,
                               const std::vector<Elevation>& host_els,
                               const std::vector<Elevation>& guest_els);

/// Components of proj(carrier -> elevation) over hyperplanes of the ball that
/// do not cross the elevation.
std::vector<Piece> wall_pieces(const CubicalPresentation& P, const DevelopedBall& B, int i,
                               const std::vector<Elevation>& els,
                               const std::vector<Hyperplane>& hyperplanes);

struct Budgets {
  int systole_maxlen = 4096;
  std::size_t max_ball_vertices = 2000000;
  std::size_t max_elevations = 4096;
  std::size_t max_pairs = 1 << 20;
  int threads = 1;
};

struct PieceReport {
  std::string verdict;  // "certified-at-radius" | "refuted" | "inconclusive"
  int radius = 0;
  Frac alpha;
  std::vector<SystoleBound> systoles;  // one per relator
  std::vector<Piece> pieces;           // maximal pieces, sorted by witness
  int refuting = -1;                   // index into pieces when refuted
  Budgets budgets;
};

/// Enumerates pieces among elevations and hyperplane carriers meeting the
/// radius-R core and compares each against alpha * systole(host), strictly
/// and exactly; ties refute. On dimension-1 bases with circle relators the
/// line engine enumerates every piece; otherwise the ball engine inspects the
/// radius-R development and the verdict is radius-bounded. Errors:
/// NotNpc, BudgetExceeded (detail carries the partial report as JSON).
Result<PieceReport> certify(const CubicalPresentation& P, int R, const Budgets& budgets);

/// Re-derives the witness diameter from the piece's replay data. Ball pieces
/// need the ball they were found in.
bool replay_piece(const CubicalPresentation& P, const Piece& p, const DevelopedBall* B);

nlohmann::json piece_to_json(const Piece& p);
nlohmann::json piece_report_to_json(const PieceReport& r);
/// Rows "relator,systole,max_piece,ratio"; exact fraction ratios.
std::string piece_report_csv(const PieceReport& r);

}  // namespace cubsc
