#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cantordyn/measures.hpp"

namespace cantordyn {

struct SearchBounds {
  int depth = 3;
  int word_length = 4;
  long node_budget = 1000000;
};

// Witness for source ≺ target: disjoint cylinder pieces covering source,
// each moved by a group word; images pairwise disjoint inside target.
struct SchemePiece {
  Word piece;
  GroupWord word;
};

struct SubequivalenceScheme {
  ClopenSet source;
  ClopenSet target;
  std::vector<SchemePiece> pieces;
};

struct VerifyReport {
  bool pass = false;
  std::string clause;  // first violated clause when !pass
};

// Exact verification: piece admissibility/disjointness, coverage of source,
// image disjointness, image containment in target. Never searches.
VerifyReport verify_scheme(const Action& action, const SubequivalenceScheme& s);

// A ≺ O1 and A ≺ O2 with O1, O2 disjoint subsets of A.
struct ParadoxicalWitness {
  ClopenSet a;
  ClopenSet o1, o2;
  SubequivalenceScheme s1, s2;
};

VerifyReport verify_paradoxical(const Action& action, const ParadoxicalWitness& w);

enum class SearchStatus { Found, NotFound, Refuted };

struct SubequivalenceOutcome {
  SearchStatus status = SearchStatus::NotFound;
  SubequivalenceScheme scheme;                  // Found
  std::optional<InvariantContent> refutation;   // Refuted: μ(F) > μ(O)
  std::string note;
};

// Bounded search for F ≺ O. Refuted carries an invariant content with
// μ(F) > μ(O) at a sound depth; NotFound is inconclusive.
SubequivalenceOutcome search_subequivalence(const Action& action, const ClopenSet& f,
                                            const ClopenSet& o, const SearchBounds& bounds);

// Transitive composition: s1: F ≺ N, s2: N ≺ B with s2.source ⊇ s1.target
// gives F ≺ B (pieces refined through the interface, words concatenated).
SubequivalenceScheme compose_schemes(const Action& action,
                                     const SubequivalenceScheme& s1,
                                     const SubequivalenceScheme& s2);

// Restriction of a verified scheme to a subset F' ⊆ source.
SubequivalenceScheme restrict_scheme(const Action& action,
                                     const SubequivalenceScheme& s,
                                     const ClopenSet& sub_source);

struct ParadoxicalOutcome {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<ParadoxicalWitness> witness;
  std::optional<InvariantContent> refutation;  // μ(A) = 1 invariant content
  std::string note;
};

ParadoxicalOutcome check_paradoxical(const Action& action, const ClopenSet& a,
                                     const SearchBounds& bounds);

// n pairwise disjoint targets inside O, each with a verifying scheme F ≺ O_i,
// built by iterated doubling. Throws NoParadoxicalWitness when a doubling
// node cannot be established within bounds.
struct MultiTarget {
  ClopenSet target;
  SubequivalenceScheme scheme;
};
std::vector<MultiTarget> multi_subequivalence(const Action& action, const ClopenSet& f,
                                              const ClopenSet& o, int n,
                                              const SearchBounds& bounds);

enum class WeakParadoxicalStatus { Found, NotFound, NotCovered };

struct WeakParadoxicalOutcome {
  WeakParadoxicalStatus status = WeakParadoxicalStatus::NotFound;
  std::optional<SubequivalenceScheme> scheme;  // Found
  std::vector<GroupWord> cover_words;          // Found: F ⊆ ⋃ w(O)
  ClopenSet saturation;                        // NotCovered: stable invariant set
  std::string note;
};

// F ≺ O from a finite translate cover of F by O (cover, then doubling, then
// composition). NotCovered is certified by a stable saturation of O that
// misses part of F.
WeakParadoxicalOutcome check_weak_paradoxical(const Action& action, const ClopenSet& f,
                                              const ClopenSet& o, const SearchBounds& bounds);

enum class CheckStatus { Pass, Fail, Inconclusive };

struct NFillingTupleEntry {
  std::vector<Word> tuple;
  CheckStatus status = CheckStatus::Inconclusive;
  std::vector<GroupWord> cover;                // Pass
  std::optional<InvariantContent> obstruction; // Fail via measure: Σ μ(U_i) < 1
  bool group_exhausted = false;                // Fail via finite-group exhaustion
};

struct NFillingReport {
  CheckStatus status = CheckStatus::Inconclusive;
  int n = 0;
  int depth = 0;
  std::vector<NFillingTupleEntry> entries;
  std::string note;
};

// n-filling at finite resolution: every n-tuple of depth-`depth` cylinders
// must admit words g_i with ⋃ g_i(U_i) = X.
NFillingReport check_n_filling(const Action& action, int n, int depth,
                               const SearchBounds& bounds);

struct StrongBoundaryPairEntry {
  ClopenSet f;
  ClopenSet o;
  CheckStatus status = CheckStatus::Inconclusive;
  GroupWord word;                               // Pass: g with g(F) ⊆ O
  std::optional<InvariantContent> obstruction;  // Fail: μ(F) > μ(O)
  bool group_exhausted = false;
};

struct StrongBoundaryReport {
  CheckStatus status = CheckStatus::Inconclusive;
  int depth = 0;
  std::vector<StrongBoundaryPairEntry> entries;  // maximal pairs only
  std::string note;
};

// For every proper union F and nonempty union O of depth-`depth` cylinders,
// some single word maps F into O. Equivalent reduction: only the maximal
// pairs (complement of one cylinder, single cylinder) are tested.
StrongBoundaryReport check_strong_boundary(const Action& action, int depth,
                                           const SearchBounds& bounds);

struct TowerOutcome {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<TowerWitness> witness;
  std::string note;
};

// Largest-first greedy open base W ⊆ U with {t(W)} pairwise disjoint.
TowerOutcome find_open_tower(const Action& action, const std::vector<GroupWord>& words,
                             const ClopenSet& u, const SearchBounds& bounds);

// Shared bounded packer: place unit atoms (cylinder, copy) via words so that
// translated images stack within an integer capacity function. Used by both
// subequivalence search and semigroup order search.
struct PackAtom {
  Word cylinder;
  int copy = 0;  // which multiplicity layer the atom came from
};

struct PackPlacement {
  PackAtom atom;
  GroupWord word;
};

struct PackOutcome {
  bool found = false;
  // only meaningful when !found: the whole bounded search space was covered
  // (no budget cut, no image dropped for depth), so the failure is a proof
  // that no placement exists within the word length.
  bool exhausted = false;
  std::vector<PackPlacement> placements;
  long nodes_used = 0;
};

PackOutcome pack_atoms(const Action& action, const std::vector<PackAtom>& atoms,
                       const std::vector<std::pair<Word, int>>& capacity,
                       int word_length, long node_budget);

}  // namespace cantordyn
