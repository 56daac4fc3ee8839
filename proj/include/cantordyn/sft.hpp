#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cantordyn/errors.hpp"

namespace cantordyn {

// A finite admissible word over the alphabet, as letter indices. The empty
// word denotes the whole space X. Canonical order on words is plain
// lexicographic vector order (a prefix sorts before its extensions).
using Word = std::vector<int>;

// One-step subshift of finite type: alphabet, transition matrix, initial
// letters. Immutable after validate_space; shared by pointer.
struct SftSpace {
  std::vector<std::string> letters;
  std::vector<std::vector<uint8_t>> transitions;  // [i][j]: j may follow i
  std::vector<uint8_t> initial;
  uint64_t tag = 0;  // content fingerprint; SpaceMismatch detection

  // caches, filled by validate_space
  std::vector<std::vector<int>> succ;  // successors per letter, ascending
  std::vector<int> initial_letters;    // ascending

  int k() const { return static_cast<int>(letters.size()); }
};

using SpacePtr = std::shared_ptr<const SftSpace>;

// Validates shape, nonemptiness and the no-dead-end condition; computes the
// caches and the fingerprint.
SpacePtr validate_space(const std::vector<std::string>& letters,
                        const std::vector<std::vector<uint8_t>>& transitions,
                        const std::vector<uint8_t>& initial);

// Full shift on k letters named "0".."k-1".
SpacePtr full_shift(int k);

bool is_admissible(const SftSpace& space, const Word& w);
void require_admissible(const SftSpace& space, const Word& w);

// Letters that may follow w: successors of its last letter, or the initial
// letters when w is empty.
const std::vector<int>& followers(const SftSpace& space, const Word& w);

// All admissible words of exactly the given length, in canonical order.
std::vector<Word> admissible_words(const SftSpace& space, int depth);

// Clopen subset of X in canonical form: the unique maximal-cylinder
// antichain (full sibling families merged into their parent), sorted.
// Empty set = no cylinders; X = the single empty cylinder.
struct ClopenSet {
  uint64_t space_tag = 0;
  std::vector<Word> cylinders;

  bool operator==(const ClopenSet&) const = default;
};

ClopenSet canonicalize(const SftSpace& space, const std::vector<Word>& cylinders);
ClopenSet clopen_empty(const SftSpace& space);
ClopenSet clopen_full(const SftSpace& space);
ClopenSet clopen_cylinder(const SftSpace& space, const Word& w);

bool is_empty_set(const ClopenSet& a);
bool is_full_set(const ClopenSet& a);

enum class ClopenOp { Union, Intersection, Complement, Difference };

// Four-in-one boolean algebra entry point; b must be present exactly for the
// binary ops. Convenience wrappers below.
ClopenSet clopen_algebra(const SftSpace& space, ClopenOp op, const ClopenSet& a,
                         const ClopenSet* b = nullptr);

ClopenSet clopen_union(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);
ClopenSet clopen_intersection(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);
ClopenSet clopen_complement(const SftSpace& space, const ClopenSet& a);
ClopenSet clopen_difference(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);

// b ⊆ a (non-strict), decided structurally on canonical forms.
bool clopen_contains(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);
bool clopen_disjoint(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);
// [w] ⊆ a
bool clopen_contains_cylinder(const SftSpace& space, const ClopenSet& a, const Word& w);

enum class ClopenRel { Equal, Subset, Superset, Disjoint, Overlapping };

// Exact relation of a against b; Subset/Superset are strict.
ClopenRel compare_clopen(const SftSpace& space, const ClopenSet& a, const ClopenSet& b);

// The admissible depth-`depth` cylinders partitioning a, in canonical order.
// DepthTooSmall unless depth >= every cylinder length in a.
std::vector<Word> refine(const SftSpace& space, const ClopenSet& a, int depth);

// Display/parse names: cylinder rendered as concatenated letter names.
std::string word_to_string(const SftSpace& space, const Word& w);
std::string clopen_to_string(const SftSpace& space, const ClopenSet& a);

void require_same_space(const SftSpace& space, const ClopenSet& a);

}  // namespace cantordyn
