#include <random>

#include "doctest.h"
#include "cantordyn/sft.hpp"
#include "oracles.hpp"

using namespace cantordyn;

namespace {

// Boundary-walk space on a A b B: all pairs allowed except aA/Aa/bB/Bb.
SpacePtr boundary_space() {
  std::vector<std::string> letters = {"a", "A", "b", "B"};
  std::vector<std::vector<uint8_t>> t(4, std::vector<uint8_t>(4, 1));
  t[0][1] = t[1][0] = 0;  // aA, Aa
  t[2][3] = t[3][2] = 0;  // bB, Bb
  return validate_space(letters, t, {1, 1, 1, 1});
}

// Golden-mean-like space: letter 1 may not follow itself.
SpacePtr golden_space() {
  return validate_space({"0", "1"}, {{1, 1}, {1, 0}}, {1, 1});
}

std::set<Word> denote(const SftSpace& s, const ClopenSet& a, size_t depth) {
  return oracle::denotation(s, a.cylinders, depth);
}

Word random_cylinder(const SftSpace& s, std::mt19937& rng, int max_depth) {
  std::uniform_int_distribution<int> dlen(0, max_depth);
  int len = dlen(rng);
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const auto& next = followers(s, w);
    std::uniform_int_distribution<size_t> pick(0, next.size() - 1);
    w.push_back(next[pick(rng)]);
  }
  return w;
}

ClopenSet random_clopen(const SftSpace& s, std::mt19937& rng, int max_depth,
                        int max_cylinders) {
  std::uniform_int_distribution<int> dn(0, max_cylinders);
  int n = dn(rng);
  std::vector<Word> cs;
  for (int i = 0; i < n; ++i) cs.push_back(random_cylinder(s, rng, max_depth));
  return canonicalize(s, cs);
}

// Canonical-form structural invariants: sorted antichain, no full sibling
// family left unmerged, every cylinder admissible.
void check_canonical_shape(const SftSpace& s, const ClopenSet& a) {
  for (size_t i = 0; i + 1 < a.cylinders.size(); ++i)
    CHECK(a.cylinders[i] < a.cylinders[i + 1]);
  for (const Word& w : a.cylinders) CHECK(is_admissible(s, w));
  for (size_t i = 0; i < a.cylinders.size(); ++i)
    for (size_t j = i + 1; j < a.cylinders.size(); ++j) {
      CHECK(!oracle::word_has_prefix(a.cylinders[i], a.cylinders[j]));
      CHECK(!oracle::word_has_prefix(a.cylinders[j], a.cylinders[i]));
    }
  // no word together with all of its siblings
  for (const Word& w : a.cylinders) {
    if (w.empty()) continue;
    Word parent(w.begin(), w.end() - 1);
    bool all = true;
    for (int c : followers(s, parent)) {
      Word sib = parent;
      sib.push_back(c);
      bool present = false;
      for (const Word& v : a.cylinders)
        if (v == sib) present = true;
      if (!present) {
        all = false;
        break;
      }
    }
    CHECK(!all);
  }
}

}  // namespace

TEST_SUITE_BEGIN("sft");

TEST_CASE("validate_space accepts the boundary walk and fills caches") {
  SpacePtr s = boundary_space();
  CHECK(s->k() == 4);
  CHECK(s->succ[0] == std::vector<int>{0, 2, 3});
  CHECK(s->succ[1] == std::vector<int>{1, 2, 3});
  CHECK(s->succ[2] == std::vector<int>{0, 1, 2});
  CHECK(s->succ[3] == std::vector<int>{0, 1, 3});
  CHECK(s->initial_letters == std::vector<int>{0, 1, 2, 3});
  CHECK(s->tag != 0);
  CHECK(s->tag == boundary_space()->tag);
  CHECK(s->tag != golden_space()->tag);
}

TEST_CASE("validate_space rejects malformed input") {
  CHECK_THROWS_AS(validate_space({}, {}, {}), EmptySpace);
  CHECK_THROWS_AS(validate_space({"a"}, {{1}}, {0}), EmptySpace);
  CHECK_THROWS_AS(validate_space({"a", "b"}, {{1, 1}}, {1, 1}), ShapeMismatch);
  CHECK_THROWS_AS(validate_space({"a", "b"}, {{1}, {1, 1}}, {1, 1}), ShapeMismatch);
  CHECK_THROWS_AS(validate_space({"a", "a"}, {{1, 1}, {1, 1}}, {1, 1}), ShapeMismatch);
  CHECK_THROWS_AS(validate_space({"a", ""}, {{1, 1}, {1, 1}}, {1, 1}), ShapeMismatch);
  // reachable letter with no successor
  CHECK_THROWS_AS(validate_space({"a", "b"}, {{0, 1}, {0, 0}}, {1, 0}), DeadEnd);
  // the dead letter is unreachable: fine
  CHECK_NOTHROW(validate_space({"a", "b"}, {{1, 0}, {0, 0}}, {1, 0}));
}

TEST_CASE("admissible word enumeration matches the brute-force oracle") {
  for (SpacePtr s : {boundary_space(), golden_space(), full_shift(3)}) {
    for (int d = 0; d <= 5; ++d) {
      auto got = admissible_words(*s, d);
      std::set<Word> set(got.begin(), got.end());
      CHECK(set.size() == got.size());
      CHECK(set == oracle::words_at_depth(*s, d));
      CHECK(std::is_sorted(got.begin(), got.end()));
    }
  }
  SpacePtr f2 = boundary_space();
  for (int d = 1; d <= 6; ++d)
    CHECK(admissible_words(*f2, d).size() == oracle::f2_word_count(d));
}

TEST_CASE("is_admissible agrees with the oracle") {
  SpacePtr s = boundary_space();
  CHECK(is_admissible(*s, {}));
  CHECK(is_admissible(*s, {0, 0, 2, 1}));
  CHECK(!is_admissible(*s, {0, 1}));
  CHECK(!is_admissible(*s, {2, 3}));
  CHECK(!is_admissible(*s, {4}));
  CHECK_THROWS_AS(require_admissible(*s, {0, 1}), InadmissibleWord);
}

TEST_CASE("canonicalize merges full sibling families") {
  SpacePtr b = full_shift(2);
  // [0] ∪ [1] = X
  ClopenSet x = canonicalize(*b, {{0}, {1}});
  CHECK(x == clopen_full(*b));
  CHECK(is_full_set(x));
  // [0] ∪ [01] = [0]
  CHECK(canonicalize(*b, {{0}, {0, 1}}) == clopen_cylinder(*b, {0}));

  SpacePtr f2 = boundary_space();
  // followers(a) = {a, b, B}: the three cylinders merge to [a]
  ClopenSet merged = canonicalize(*f2, {{0, 0}, {0, 2}, {0, 3}});
  CHECK(merged == clopen_cylinder(*f2, {0}));
  // dropping one sibling leaves the pair untouched
  ClopenSet pair = canonicalize(*f2, {{0, 0}, {0, 2}});
  CHECK(pair.cylinders == std::vector<Word>{{0, 0}, {0, 2}});
  // nested merging: expand [a] fully to depth 2 plus [b] → still not X
  ClopenSet deep = canonicalize(*f2, {{0, 0}, {0, 2}, {0, 3}, {2}});
  CHECK(deep.cylinders == std::vector<Word>{{0}, {2}});
}

TEST_CASE("canonicalize rejects inadmissible cylinders and preserves meaning") {
  SpacePtr f2 = boundary_space();
  CHECK_THROWS_AS(canonicalize(*f2, {{0, 1}}), InadmissibleWord);
  std::mt19937 rng(20260816);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Word> raw;
    std::uniform_int_distribution<int> dn(0, 5);
    int n = dn(rng);
    for (int i = 0; i < n; ++i) raw.push_back(random_cylinder(*f2, rng, 3));
    ClopenSet c = canonicalize(*f2, raw);
    check_canonical_shape(*f2, c);
    CHECK(denote(*f2, c, 4) == oracle::denotation(*f2, raw, 4));
    // idempotent
    CHECK(canonicalize(*f2, c.cylinders) == c);
  }
}

TEST_CASE("boolean operations match set operations on denotations") {
  std::mt19937 rng(7);
  for (SpacePtr s : {boundary_space(), golden_space()}) {
    for (int trial = 0; trial < 150; ++trial) {
      ClopenSet a = random_clopen(*s, rng, 3, 4);
      ClopenSet b = random_clopen(*s, rng, 3, 4);
      auto da = denote(*s, a, 4);
      auto db = denote(*s, b, 4);
      auto all = oracle::words_at_depth(*s, 4);

      std::set<Word> u, i, c, d;
      std::set_union(da.begin(), da.end(), db.begin(), db.end(),
                     std::inserter(u, u.end()));
      std::set_intersection(da.begin(), da.end(), db.begin(), db.end(),
                            std::inserter(i, i.end()));
      std::set_difference(all.begin(), all.end(), da.begin(), da.end(),
                          std::inserter(c, c.end()));
      std::set_difference(da.begin(), da.end(), db.begin(), db.end(),
                          std::inserter(d, d.end()));

      CHECK(denote(*s, clopen_union(*s, a, b), 4) == u);
      CHECK(denote(*s, clopen_intersection(*s, a, b), 4) == i);
      CHECK(denote(*s, clopen_complement(*s, a), 4) == c);
      CHECK(denote(*s, clopen_difference(*s, a, b), 4) == d);
      check_canonical_shape(*s, clopen_union(*s, a, b));
      check_canonical_shape(*s, clopen_complement(*s, a));
    }
  }
}

TEST_CASE("boolean algebra laws hold on canonical forms") {
  std::mt19937 rng(99);
  SpacePtr s = boundary_space();
  for (int trial = 0; trial < 100; ++trial) {
    ClopenSet a = random_clopen(*s, rng, 3, 4);
    ClopenSet b = random_clopen(*s, rng, 3, 4);
    ClopenSet c = random_clopen(*s, rng, 3, 4);
    CHECK(clopen_union(*s, a, b) == clopen_union(*s, b, a));
    CHECK(clopen_intersection(*s, a, b) == clopen_intersection(*s, b, a));
    CHECK(clopen_union(*s, a, clopen_union(*s, b, c)) ==
          clopen_union(*s, clopen_union(*s, a, b), c));
    CHECK(clopen_complement(*s, clopen_complement(*s, a)) == a);
    // De Morgan
    CHECK(clopen_complement(*s, clopen_union(*s, a, b)) ==
          clopen_intersection(*s, clopen_complement(*s, a), clopen_complement(*s, b)));
    // difference as intersection with complement
    CHECK(clopen_difference(*s, a, b) ==
          clopen_intersection(*s, a, clopen_complement(*s, b)));
    // absorption
    CHECK(clopen_union(*s, a, clopen_intersection(*s, a, b)) == a);
  }
}

TEST_CASE("clopen_algebra entry point and wrappers agree") {
  SpacePtr s = boundary_space();
  ClopenSet a = clopen_cylinder(*s, {0});
  ClopenSet b = canonicalize(*s, {{0, 0}, {2}});
  CHECK(clopen_algebra(*s, ClopenOp::Union, a, &b) == clopen_union(*s, a, b));
  CHECK(clopen_algebra(*s, ClopenOp::Intersection, a, &b) ==
        clopen_intersection(*s, a, b));
  CHECK(clopen_algebra(*s, ClopenOp::Complement, a) == clopen_complement(*s, a));
  CHECK(clopen_algebra(*s, ClopenOp::Difference, a, &b) == clopen_difference(*s, a, b));
  CHECK_THROWS_AS(clopen_algebra(*s, ClopenOp::Union, a, nullptr), ShapeMismatch);
}

TEST_CASE("containment and disjointness") {
  SpacePtr s = boundary_space();
  ClopenSet a = clopen_cylinder(*s, {0});          // [a]
  ClopenSet aa = clopen_cylinder(*s, {0, 0});      // [aa]
  ClopenSet b = clopen_cylinder(*s, {2});          // [b]
  ClopenSet mix = canonicalize(*s, {{0, 0}, {2}});
  CHECK(clopen_contains(*s, a, aa));
  CHECK(!clopen_contains(*s, aa, a));
  CHECK(clopen_contains(*s, a, a));
  CHECK(clopen_contains(*s, clopen_full(*s), mix));
  CHECK(clopen_contains(*s, a, clopen_empty(*s)));
  CHECK(clopen_disjoint(*s, a, b));
  CHECK(!clopen_disjoint(*s, a, mix));
  CHECK(clopen_disjoint(*s, clopen_empty(*s), clopen_empty(*s)));
  CHECK(clopen_contains_cylinder(*s, a, {0, 0}));
  CHECK(!clopen_contains_cylinder(*s, a, {2}));
}

TEST_CASE("compare_clopen classifies all five relations") {
  SpacePtr s = boundary_space();
  ClopenSet a = clopen_cylinder(*s, {0});
  ClopenSet aa = clopen_cylinder(*s, {0, 0});
  ClopenSet b = clopen_cylinder(*s, {2});
  ClopenSet aab = canonicalize(*s, {{0, 0}, {2}});
  CHECK(compare_clopen(*s, a, a) == ClopenRel::Equal);
  CHECK(compare_clopen(*s, aa, a) == ClopenRel::Subset);
  CHECK(compare_clopen(*s, a, aa) == ClopenRel::Superset);
  CHECK(compare_clopen(*s, a, b) == ClopenRel::Disjoint);
  CHECK(compare_clopen(*s, a, aab) == ClopenRel::Overlapping);
  CHECK(compare_clopen(*s, clopen_empty(*s), clopen_empty(*s)) == ClopenRel::Equal);
}

TEST_CASE("compare_clopen agrees with denotation comparison") {
  std::mt19937 rng(4242);
  SpacePtr s = golden_space();
  for (int trial = 0; trial < 200; ++trial) {
    ClopenSet a = random_clopen(*s, rng, 3, 3);
    ClopenSet b = random_clopen(*s, rng, 3, 3);
    auto da = denote(*s, a, 4);
    auto db = denote(*s, b, 4);
    ClopenRel want;
    if (da == db)
      want = ClopenRel::Equal;
    else if (std::includes(db.begin(), db.end(), da.begin(), da.end()))
      want = ClopenRel::Subset;
    else if (std::includes(da.begin(), da.end(), db.begin(), db.end()))
      want = ClopenRel::Superset;
    else {
      std::set<Word> i;
      std::set_intersection(da.begin(), da.end(), db.begin(), db.end(),
                            std::inserter(i, i.end()));
      want = i.empty() ? ClopenRel::Disjoint : ClopenRel::Overlapping;
    }
    CHECK(compare_clopen(*s, a, b) == want);
  }
}

TEST_CASE("refine splits into equal-depth cylinders") {
  SpacePtr s = boundary_space();
  ClopenSet a = clopen_cylinder(*s, {0});
  auto parts = refine(*s, a, 2);
  CHECK(parts == std::vector<Word>{{0, 0}, {0, 2}, {0, 3}});
  CHECK(refine(*s, a, 1) == std::vector<Word>{{0}});
  CHECK(refine(*s, clopen_full(*s), 1) == std::vector<Word>{{0}, {1}, {2}, {3}});
  CHECK(refine(*s, clopen_empty(*s), 3).empty());
  CHECK_THROWS_AS(refine(*s, clopen_cylinder(*s, {0, 0}), 1), DepthTooSmall);

  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    ClopenSet c = random_clopen(*s, rng, 3, 4);
    auto r = refine(*s, c, 4);
    std::set<Word> set(r.begin(), r.end());
    CHECK(set.size() == r.size());
    CHECK(set == denote(*s, c, 4));
  }
}

TEST_CASE("space tags guard cross-space operations") {
  SpacePtr s = boundary_space();
  SpacePtr g = golden_space();
  ClopenSet a = clopen_cylinder(*s, {0});
  ClopenSet b = clopen_cylinder(*g, {0});
  CHECK_THROWS_AS(clopen_union(*s, a, b), SpaceMismatch);
  CHECK_THROWS_AS(require_same_space(*g, a), SpaceMismatch);
}

TEST_CASE("string rendering") {
  SpacePtr s = boundary_space();
  CHECK(word_to_string(*s, {0, 1, 2}) == "aAb");  // inadmissible but renderable
  CHECK(word_to_string(*s, {}) == "");
  CHECK(clopen_to_string(*s, clopen_empty(*s)) == "{}");
  CHECK(clopen_to_string(*s, clopen_full(*s)) == "[]");
  CHECK(clopen_to_string(*s, canonicalize(*s, {{0, 0}, {0, 2}})) == "[aa]|[ab]");
}

TEST_SUITE_END();
