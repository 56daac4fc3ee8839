#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cantordyn/sft.hpp"

namespace cantordyn {

// One prefix-exchange rule u -> v: the homeomorphism maps u·w to v·w.
struct ExchangeRule {
  Word from;
  Word to;

  bool operator==(const ExchangeRule&) const = default;
  auto operator<=>(const ExchangeRule&) const = default;
};

// A homeomorphism of X given by a complete system of prefix-exchange rules,
// stored in normal form (sorted domains, sibling rule families merged).
// Normal form is unique per homeomorphism, so == decides equality in
// Homeo(X) for represented maps.
struct PrefixExchange {
  SpacePtr space;
  std::vector<ExchangeRule> rules;

  bool is_identity() const {
    return rules.size() == 1 && rules[0].from.empty() && rules[0].to.empty();
  }
};

bool operator==(const PrefixExchange& a, const PrefixExchange& b);
bool exchange_less(const PrefixExchange& a, const PrefixExchange& b);

struct ExchangeLess {
  bool operator()(const PrefixExchange& a, const PrefixExchange& b) const {
    return exchange_less(a, b);
  }
};

// Checks completeness, pairwise prefix-incomparability, well-definedness of
// tails and bijectivity; returns the normal form.
PrefixExchange validate_exchange(SpacePtr space, std::vector<ExchangeRule> rules);

PrefixExchange identity_exchange(SpacePtr space);

// Exact image g(A), canonical.
ClopenSet apply(const PrefixExchange& g, const ClopenSet& a);
ClopenSet apply_cylinder(const PrefixExchange& g, const Word& w);

// Normal form of g∘h (h applied first).
PrefixExchange compose(const PrefixExchange& g, const PrefixExchange& h);

PrefixExchange invert(const PrefixExchange& g);

// Depth-`depth` cylinders on which g is pointwise the identity.
ClopenSet fixed_cylinders(const PrefixExchange& g, int depth);

// Group words over an action's generators. exp is +1 or -1. The word
// l1 l2 ... ln acts as l1∘l2∘...∘ln (rightmost letter applied first);
// the empty word is the identity.
struct GroupLetter {
  int gen;
  int exp;

  bool operator==(const GroupLetter&) const = default;
  auto operator<=>(const GroupLetter&) const = default;
};

using GroupWord = std::vector<GroupLetter>;

GroupWord invert_word(const GroupWord& w);
GroupWord concat_words(const GroupWord& first_applied_last, const GroupWord& applied_first);

struct Action {
  SpacePtr space;
  std::vector<std::string> names;
  std::vector<PrefixExchange> generators;
  std::vector<PrefixExchange> inverses;  // cached

  int gen_index(const std::string& name) const;
};

using ActionPtr = std::shared_ptr<const Action>;

ActionPtr make_action(SpacePtr space, std::vector<std::string> names,
                      std::vector<PrefixExchange> generators);

// Composed homeomorphism of a word, in normal form.
PrefixExchange evaluate_word(const Action& action, const GroupWord& w);

// Image of a set under a word without building the composite exchange
// (folds apply over the letters; exact).
ClopenSet apply_word(const Action& action, const GroupWord& w, const ClopenSet& a);

std::string word_to_display(const Action& action, const GroupWord& w);

// Built-in actions. Accepted names:
//   f2_boundary
//   free_boundary(n)                      1 <= n <= 8
//   bit_permutation(u>v,...)              complete prefix rewrite over {0,1}
//   product_with_trivial(<base>,full_shift(k))
ActionPtr builtin_action(const std::string& name);

// A ∪ ⋃_g g(A) ∪ g⁻¹(A) iterated; stable=true on a fixed point within
// max_rounds. A stable proper result is a G-invariant clopen set.
std::pair<ClopenSet, bool> invariant_clopen_saturation(const Action& action,
                                                       const ClopenSet& a,
                                                       int max_rounds);

struct TowerWitness {
  std::vector<GroupWord> words;
  ClopenSet base;
};

// Exact pairwise disjointness of the translates {t(W)}.
bool verify_tower(const Action& action, const TowerWitness& w);

// Canonical word enumeration: reduced words by length, then lexicographically
// by (generator index, exponent) with +1 before -1. Includes the identity.
std::vector<GroupWord> enumerate_words(const Action& action, int max_length);

// Largest per-rule length increase |to| - |from| over all generators and
// their inverses, clamped below at 0. Zero for length-preserving actions.
int max_positive_defect(const Action& action);

// Max rule-side length over all generators and inverses.
int max_rule_length(const Action& action);

}  // namespace cantordyn
