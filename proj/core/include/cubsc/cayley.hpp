#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubsc/diagram.hpp"
#include "cubsc/presentation.hpp"
#include "cubsc/result.hpp"
#include "cubsc/words.hpp"

namespace cubsc {

/// Budget for Dehn-style reduction, the developments behind it, and ball
/// folding.
struct ReduceBudget {
  int max_steps = 4096;                    // committed rewrites; also caps each exposure search
  std::size_t max_ball_vertices = 200000;  // development guard
  std::size_t max_pairs = 1 << 20;         // identification candidates per ball
};

/// One committed rewrite. Positions index the word the step was applied to;
/// "rotate" moves the first `pos` letters to the end (closed paths only).
struct ReduceStep {
  std::string kind;  // "backtrack" | "square" | "shell" | "rotate"
  int pos = 0;
  Word removed;      // backtrack: the cancelled pair; square: old pair; shell: Q
  Word inserted;     // square: new pair; shell: S
  int relator = -1;  // shell
  Word cone_word;    // shell: Q S^-1, the attached cone boundary
};

/// Reduction outcome: the final path, the rewrite trace, and whether the
/// feature scan ran to quiescence. `exhausted` false means a budget cap cut
/// some scan (exposure width, development size), so shorter representatives
/// may exist beyond it; the output is still a sound reduction.
struct Reduction {
  Word output;
  std::vector<ReduceStep> steps;
  bool exhausted = false;
};

class CayleyBall;

/// Shortens the edge path w read from `base`: removes backtracks, homotopes
/// across squares to expose cancellations, and replaces subpaths by strictly
/// shorter paths across relator elevations. Every rewrite preserves the
/// endpoints in the quotient cover, and the length never increases. On
/// one-dimensional bases with circle relators the scan is exact word
/// combinatorics; otherwise it searches a development around the path.
/// Errors: NotInBase (w is not a path from base), BudgetExceeded (the step
/// budget ran out mid-rewrite; detail carries the partial reduction).
Result<Reduction> dehn_reduce(const CubicalPresentation& P, int base, const Word& w,
                              const ReduceBudget& budget);

/// Same reduction for a path given inside a computed ball, as signed
/// ball-edge ids from ball vertex `start`; reduces the image path in the
/// base and returns it over base letters.
Result<Reduction> dehn_reduce(const CubicalPresentation& P, const CayleyBall& B, int start,
                              const Word& w, const ReduceBudget& budget);

/// Decision record for a closed path. "yes" carries a diagram whose boundary
/// reads the input word; "no" carries the irreducible witness whose
/// development fails to close; "unknown" carries the best reduction found
/// before a budget cap.
struct NullHomotopy {
  std::string verdict;  // "yes" | "no" | "unknown"
  std::optional<DiscDiagram> certificate;
  Word witness;
};

/// Decides null-homotopy in the quotient by reducing the loop (rotations
/// allowed) and developing the residue. Never errors: budget exhaustion is
/// the "unknown" verdict.
NullHomotopy is_null_homotopic(const CubicalPresentation& P, int base, const Word& w,
                               const ReduceBudget& budget);

/// Identification made while folding a development into the quotient cover:
/// "reduction" records a connecting word decided null-homotopic, "fold" a
/// cascaded identification of edges sharing an image and an endpoint.
struct FoldRecord {
  std::string kind;  // "reduction" | "fold"
  int u = -1, v = -1;  // developed-ball vertex ids
  Word witness;        // reduction: the connecting word
};

/// Complete copy of relator Y_i inside the folded ball, as matched
/// (Y cell, ball cell) pairs covering every vertex and edge of Y_i.
struct RelatorCopy {
  int relator = -1;
  std::vector<std::pair<int, int>> vertices;
  std::vector<std::pair<int, int>> edges;
};

/// Finite ball of the quotient cover: the development of the base around a
/// basepoint, with vertex pairs identified whenever a connecting path of
/// length <= 2R dies in the quotient, then folded to a fixpoint. With no
/// relators no pair is identified and the ball equals the development. Keeps
/// a pointer to the base complex, which must outlive it.
class CayleyBall {
 public:
  const CubeComplex& complex() const { return complex_; }
  const CubeComplex& base() const { return *base_; }
  int radius() const { return radius_; }
  int basepoint() const { return basepoint_; }
  int lifted_basepoint() const { return 0; }
  /// Covering map to the base.
  int image(int d, int c) const { return covering_[d][c]; }
  /// Folded vertex of a developed-ball vertex.
  int developed_class(int v) const { return dev_class_[v]; }
  const std::vector<FoldRecord>& folds() const { return folds_; }
  const std::vector<RelatorCopy>& relator_copies() const { return copies_; }

 private:
  friend Result<CayleyBall> cayley_ball(const CubicalPresentation&, int, int,
                                        const ReduceBudget&);
  const CubeComplex* base_ = nullptr;
  int radius_ = 0;
  int basepoint_ = 0;
  CubeComplex complex_;
  std::vector<std::vector<int>> covering_;
  std::vector<int> dev_class_;
  std::vector<FoldRecord> folds_;
  std::vector<RelatorCopy> copies_;
};

/// Develops the radius-R ball of the base cover, decides every same-image
/// vertex pair with is_null_homotopic on the connecting word, folds the
/// decided identifications to a fixpoint, and attaches the complete relator
/// copies. Errors: BudgetExceeded (undecided pairs listed in the detail, or
/// too many candidates), plus development errors.
Result<CayleyBall> cayley_ball(const CubicalPresentation& P, int base, int R,
                               const ReduceBudget& budget);

/// Complex document of the ball plus covering map, folds log, and relator
/// copies.
nlohmann::json cayley_ball_to_json(const CayleyBall& B);

}  // namespace cubsc
