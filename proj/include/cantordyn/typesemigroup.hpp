#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantordyn/comparison.hpp"

namespace cantordyn {

// Element of the type semigroup fragment: f = Σ 1_{A_i} with descending
// level sets A_1 ⊇ A_2 ⊇ ... ⊇ A_n (A_i = {f >= i}); empty chain = 0.
struct TypeElement {
  uint64_t space_tag = 0;
  std::vector<ClopenSet> levels;

  bool operator==(const TypeElement&) const = default;
  bool is_zero() const { return levels.empty(); }
};

// Canonical level-set chain of Σ mult·1_{[w]}; representation-independent.
TypeElement canonical_type_element(const SftSpace& space,
                                   const std::vector<std::pair<Word, int>>& parts);

TypeElement type_zero(const SftSpace& space);
TypeElement type_indicator(const SftSpace& space, const ClopenSet& a);

TypeElement add(const SftSpace& space, const TypeElement& f, const TypeElement& g);
TypeElement scale(const SftSpace& space, const TypeElement& f, int n);

// Pointwise evaluation table at depth (values per admissible depth-d word).
std::vector<int> type_values_at_depth(const SftSpace& space, const TypeElement& f,
                                      int depth);
int max_cylinder_depth(const TypeElement& f);
bool pointwise_leq(const SftSpace& space, const TypeElement& f, const TypeElement& g);

// ∫ f dμ for a content at sufficient depth.
Rational integrate(const SftSpace& space, const InvariantContent& mu,
                   const TypeElement& f);

// Witness for [f] <= [g]: parts h_i (integer step summands) moved by words
// s_i with Σ h_i = f and Σ α_{s_i}(h_i) <= g pointwise.
struct OrderPart {
  std::vector<std::pair<Word, int>> h;
  GroupWord word;
};

struct OrderWitness {
  std::vector<OrderPart> parts;
};

VerifyReport verify_order_witness(const Action& action, const TypeElement& f,
                                  const TypeElement& g, const OrderWitness& w);

struct OrderOutcome {
  SearchStatus status = SearchStatus::NotFound;
  OrderWitness witness;
  std::optional<InvariantContent> refutation;  // ∫f > ∫g
  std::string note;
};

// Bounded witness search for [f] <= [g]: identity fast path, content
// refutation, then capacity packing of unit atoms.
OrderOutcome search_order(const Action& action, const TypeElement& f,
                          const TypeElement& g, const SearchBounds& bounds);

// Transitivity at witness level: from f <= g and g <= h, a verifying witness
// for f <= h (atom flattening through the interface).
OrderWitness compose_order_witnesses(const Action& action, const TypeElement& f,
                                     const TypeElement& g, const TypeElement& h,
                                     const OrderWitness& w1, const OrderWitness& w2);

// Additivity: from a <= b and c <= d, a witness (a+c) <= (b+d).
OrderWitness sum_order_witnesses(const OrderWitness& w1, const OrderWitness& w2);

// Doubling conversions between paradoxicality and 2[1_A] <= [1_A].
OrderWitness order_witness_from_paradoxical(const Action& action,
                                            const ParadoxicalWitness& w);
ParadoxicalWitness paradoxical_from_order_witness(const Action& action,
                                                  const ClopenSet& a,
                                                  const OrderWitness& w);

// m[f] <= [f] for m >= 2, by induction from a verified 2[f] <= [f] witness.
OrderWitness multiply_order_witness(const Action& action, const TypeElement& f,
                                    const OrderWitness& doubling, int m);

struct PurelyInfiniteEntry {
  TypeElement element;
  SearchStatus status = SearchStatus::NotFound;
  OrderWitness witness;
  std::optional<InvariantContent> refutation;
};

struct PurelyInfiniteReport {
  bool all_verified = false;
  bool any_refuted = false;
  bool any_inconclusive = false;
  std::vector<PurelyInfiniteEntry> entries;
};

// 2[f] <= [f] for every nonzero f over depth-`depth` cylinders with
// multiplicity <= 2.
PurelyInfiniteReport check_purely_infinite_fragment(const Action& action, int depth,
                                                    const SearchBounds& bounds);

struct UnperforationInstance {
  TypeElement f, g;
  int n = 1;
};

enum class UnperforationStatus {
  PremiseNotFound,   // vacuous: no (n+1)[f] <= n[g] witness within bounds
  PremiseRefuted,    // vacuous: content refutes the premise
  Completed,         // premise and conclusion witnesses both verified
  Inconclusive       // premise verified, conclusion not found within bounds
};

struct UnperforationEntry {
  UnperforationInstance instance;
  UnperforationStatus status = UnperforationStatus::PremiseNotFound;
  OrderWitness premise;
  OrderWitness conclusion;
};

struct UnperforationReport {
  bool any_inconclusive = false;
  std::vector<UnperforationEntry> entries;
};

// For each (f, g, n): if (n+1)[f] <= n[g] is witnessed, derive/search
// [f] <= [g] (direct search, then the chain f <= (n+1)f <= ng <= g through
// an n-fold witness from 2[g] <= [g]).
UnperforationReport check_almost_unperforation_instances(
    const Action& action, const std::vector<UnperforationInstance>& instances,
    const SearchBounds& bounds);

// Invariant content normalized so Σ_i μ(A_i) = 1 over y's level sets
// (the induced state sends [y] to 1).
LpOutcome state_on_type_element(const Action& action, const TypeElement& y,
                                int depth);

}  // namespace cantordyn
