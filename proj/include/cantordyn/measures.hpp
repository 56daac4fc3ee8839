#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantordyn/action.hpp"
#include "cantordyn/rational.hpp"

namespace cantordyn {

// Finitely additive invariant content at finite resolution: one nonnegative
// rational per admissible depth-`depth` cylinder, in canonical word order.
struct InvariantContent {
  int depth = 0;
  std::vector<std::pair<Word, Rational>> values;
};

// μ(A), refining A to the content's depth. DepthExceeded when A has a
// cylinder deeper than the content.
Rational evaluate_content(const SftSpace& space, const InvariantContent& mu,
                          const ClopenSet& a);

// Identifier of one LP row. Kind Norm is the normalization row; kind
// Invariance is μ(h([c])) = μ([c]) for h = generator gen (inverse when
// inverse=true) and cylinder c.
struct LpRowId {
  bool is_norm = false;
  int gen = -1;
  bool inverse = false;
  Word cylinder;

  bool operator==(const LpRowId&) const = default;
};

/// Farkas-style infeasibility certificate: rational multipliers over the
// constraint rows; replay checks that the combination bounds every variable
// coefficient by 0 while combining the right-hand sides to 1.
struct InfeasibilityCertificate {
  int depth = 0;
  std::vector<std::pair<Word, Rational>> normalization;  // Σ coeff·μ([w]) = 1
  std::vector<std::pair<LpRowId, Rational>> multipliers;
};

struct LpOutcome {
  bool feasible = false;
  InvariantContent content;            // when feasible
  InfeasibilityCertificate certificate;  // when infeasible
};

// Normalization functional Σ coeff·μ([w]) = 1; words admissible, length <= depth.
using Normalization = std::vector<std::pair<Word, Rational>>;

// The invariance rows imposed at `depth`: every (generator or inverse,
// cylinder of length <= depth) pair whose exact image is expressible at
// `depth` (all image cylinders of length <= depth). Deterministic order.
std::vector<LpRowId> invariance_rows(const Action& action, int depth);

// Image clopen of one invariance row's left-hand side.
ClopenSet row_image(const Action& action, const LpRowId& row);

// Exact-rational feasibility of {μ >= 0, invariance rows, normalization = 1}.
// Deterministic: tries the scaled-uniform candidate first, then a Bland-rule
// simplex vertex; infeasibility yields a replayable certificate.
// DepthTooSmall when depth < 1, the normalization mentions words deeper than
// `depth`, or some generator contributes no expressible invariance row.
LpOutcome solve_invariant_lp(const Action& action, int depth,
                             const Normalization& normalization);

// Same LP plus objective: maximize Σ objective over the feasible region;
// returns a feasible optimum point (deterministic) or nothing if infeasible.
// `maximum` is the exact optimal value (feasible case); unbounded reported
// separately (cannot happen with the probability normalization but guarded).
struct LpOptimum {
  bool feasible = false;
  bool unbounded = false;
  Rational maximum;
  InvariantContent content;
};
LpOptimum maximize_over_invariant_lp(const Action& action, int depth,
                                     const Normalization& normalization,
                                     const Normalization& objective);

// Total-mass-1 invariant content at depth, or an infeasibility certificate.
LpOutcome invariant_probability_measure(const Action& action, int depth);

// μ(O) = 1 instead of total mass 1 (existence of a nontrivial invariant
// content normalized on O).
LpOutcome invariant_content_normalized(const Action& action, const ClopenSet& o,
                                       int depth);

// Exact replay used by certificate verification: content satisfies
// nonnegativity, all invariance rows at its depth, and the normalization.
bool verify_content(const Action& action, const InvariantContent& mu,
                    const Normalization& normalization, std::string* why = nullptr);

// Exact replay of an infeasibility certificate: the multiplier combination
// has every variable coefficient <= 0 and right-hand side 1.
bool verify_infeasibility(const Action& action, const InfeasibilityCertificate& cert,
                          std::string* why = nullptr);

// Depth at which a content refutation is sound against schemes within
// `bounds` touching sets of cylinder depth <= sets_depth: translates of any
// in-bounds scheme stay expressible at this depth. For length-preserving
// actions (defect 0) no word-length term is needed.
int sound_refutation_depth(const Action& action, int sets_depth, int bounds_depth,
                           int word_length);

// Guard on LP size for refutation attempts: number of depth-d cells.
bool refutation_lp_tractable(const Action& action, int depth);

// Refutation attempt gated by soundness and LP size: maximize the objective
// over invariant contents at the sound refutation depth. When that depth is
// intractable, fall back to a base-depth total-mass feasibility probe
// (monotone: infeasible at the base depth stays infeasible deeper, so no
// content-based refutation exists at all) and report not-attempted with the
// reason in `note`.
struct GatedOptimum {
  bool attempted = false;
  LpOptimum opt;
  std::string note;
};
GatedOptimum gated_refutation_maximum(const Action& action, int sets_depth,
                                      int bounds_depth, int word_length,
                                      const Normalization& objective);

// Same gate for existence of a content normalized on a set (μ(O) = 1).
struct GatedFeasibility {
  bool attempted = false;
  LpOutcome out;
  std::string note;
};
GatedFeasibility gated_refutation_normalized(const Action& action, const ClopenSet& o,
                                             int bounds_depth, int word_length);

}  // namespace cantordyn
