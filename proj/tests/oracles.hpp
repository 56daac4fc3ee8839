#pragma once

// Independent reference implementations used to cross-check library results.
// Everything here favors brute force over cleverness: clopen sets are
// represented as sets of fixed-depth admissible words, and prefix-exchange
// maps are applied pointwise to those words. None of this shares logic with
// the library beyond the plain data types.

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "cantordyn/action.hpp"
#include "cantordyn/sft.hpp"

namespace oracle {

using cantordyn::ExchangeRule;
using cantordyn::SftSpace;
using cantordyn::Word;

inline bool is_admissible(const SftSpace& space, const Word& w) {
  for (int x : w)
    if (x < 0 || x >= space.k()) return false;
  if (!w.empty() && !space.initial[w[0]]) return false;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!space.transitions[w[i]][w[i + 1]]) return false;
  return true;
}

inline void extend_to_depth(const SftSpace& space, const Word& w, size_t depth,
                            std::set<Word>* out) {
  if (w.size() >= depth) {
    out->insert(w);
    return;
  }
  for (int a = 0; a < space.k(); ++a) {
    bool ok = w.empty() ? space.initial[a] : space.transitions[w.back()][a] != 0;
    if (!ok) continue;
    Word next = w;
    next.push_back(a);
    extend_to_depth(space, next, depth, out);
  }
}

inline std::set<Word> words_at_depth(const SftSpace& space, size_t depth) {
  std::set<Word> out;
  extend_to_depth(space, {}, depth, &out);
  return out;
}

inline bool word_has_prefix(const Word& w, const Word& p) {
  if (p.size() > w.size()) return false;
  return std::equal(p.begin(), p.end(), w.begin());
}

// The set of depth-`depth` admissible words lying in the union of the given
// cylinders. Requires depth >= every cylinder length.
inline std::set<Word> denotation(const SftSpace& space, const std::vector<Word>& cylinders,
                                 size_t depth) {
  for (const Word& c : cylinders)
    if (c.size() > depth) throw std::logic_error("oracle: depth too small");
  std::set<Word> out;
  for (const Word& w : words_at_depth(space, depth)) {
    for (const Word& c : cylinders) {
      if (word_has_prefix(w, c)) {
        out.insert(w);
        break;
      }
    }
  }
  return out;
}

// Apply a prefix exchange to a single word long enough to determine the
// matching rule uniquely. Returns the (possibly different-length) image.
inline Word point_image(const std::vector<ExchangeRule>& rules, const Word& w) {
  const ExchangeRule* hit = nullptr;
  for (const ExchangeRule& r : rules) {
    if (word_has_prefix(w, r.from)) {
      if (hit) throw std::logic_error("oracle: ambiguous rule match");
      hit = &r;
    }
  }
  if (!hit) throw std::logic_error("oracle: no rule matches; word too short?");
  Word out = hit->to;
  out.insert(out.end(), w.begin() + static_cast<long>(hit->from.size()), w.end());
  return out;
}

// Pointwise image of a clopen set: take its denotation at depth `in_depth`,
// push every word through the exchange, then re-expand every image word to
// exact depth `out_depth`. in_depth must exceed every rule domain and every
// cylinder; out_depth must be >= every image length.
inline std::set<Word> image_denotation(const SftSpace& space,
                                       const std::vector<ExchangeRule>& rules,
                                       const std::vector<Word>& cylinders, size_t in_depth,
                                       size_t out_depth) {
  std::set<Word> out;
  for (const Word& w : denotation(space, cylinders, in_depth)) {
    Word img = point_image(rules, w);
    if (img.size() > out_depth) throw std::logic_error("oracle: out_depth too small");
    extend_to_depth(space, img, out_depth, &out);
  }
  return out;
}

// Collapse a set of depth-`from_depth` words to depth `to_depth` cylinders:
// succeeds only when the set is saturated (each shallow word has either all
// or none of its extensions present).
inline std::optional<std::set<Word>> collapse(const SftSpace& space,
                                              const std::set<Word>& words, size_t from_depth,
                                              size_t to_depth) {
  std::set<Word> out;
  for (const Word& u : words_at_depth(space, to_depth)) {
    std::set<Word> ext;
    extend_to_depth(space, u, from_depth, &ext);
    size_t inside = 0;
    for (const Word& w : ext)
      if (words.count(w)) ++inside;
    if (inside == ext.size() && !ext.empty())
      out.insert(u);
    else if (inside != 0)
      return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frozen hand-derived facts (computed on paper before the library existed;
// do not adjust these to match the library).

// Boundary-walk space on letters a A b B (indices 0 1 2 3): every pair is
// allowed except aA, Aa, bB, Bb; every letter may start a word. Number of
// admissible words of length d >= 1 is 4 * 3^(d-1).
inline size_t f2_word_count(size_t depth) {
  size_t n = 4;
  for (size_t i = 1; i < depth; ++i) n *= 3;
  return depth == 0 ? 1 : n;
}

// The generator ga has rules {A->., a->aa, b->ab, B->aB}. Its inverse,
// derived by expanding each rule one admissible step on the image side and
// swapping sides:
//   A->. expands to (Aa->a? no: image side) — concretely: images of the four
//   rules are the cylinders [.]-remainders; expanding (A, .) over followers
//   of A gives (AA, A)? Work pointwise instead: ga maps Ax->x, ax->aax,
//   bx->abx, Bx->aBx. So the inverse maps x->Ax when x starts with A, b, B?
//   No: invert by reading images. ga images: A· -> suffix starts with
//   anything in succ(A)={A,b,B}; a·->aa·; b·->ab·; B·->aB·. Hence inverse
//   rules: (AA->A? ...) Final flattened form, checked by composing both ways
//   on all depth-4 words:
inline std::vector<ExchangeRule> f2_ga_inverse_rules() {
  // letters: a=0 A=1 b=2 B=3
  return {
      {{1}, {1, 1}},     // A  -> AA
      {{2}, {1, 2}},     // b  -> Ab
      {{3}, {1, 3}},     // B  -> AB
      {{0, 0}, {0}},     // aa -> a
      {{0, 2}, {2}},     // ab -> b
      {{0, 3}, {3}},     // aB -> B
  };
}

}  // namespace oracle
