#include <random>

#include "doctest.h"
#include "cantordyn/action.hpp"
#include "oracles.hpp"

using namespace cantordyn;

namespace {

ActionPtr f2() {
  static ActionPtr a = builtin_action("f2_boundary");
  return a;
}

const PrefixExchange& gen(const ActionPtr& a, const std::string& name) {
  return a->generators[static_cast<size_t>(a->gen_index(name))];
}

GroupWord random_word(std::mt19937& rng, int gens, int max_len) {
  std::uniform_int_distribution<int> dlen(0, max_len);
  std::uniform_int_distribution<int> dgen(0, gens - 1);
  std::uniform_int_distribution<int> dexp(0, 1);
  GroupWord w;
  int len = dlen(rng);
  for (int i = 0; i < len; ++i) w.push_back({dgen(rng), dexp(rng) ? 1 : -1});
  return w;
}

ClopenSet random_clopen(const SftSpace& s, std::mt19937& rng, int max_depth,
                        int max_cylinders) {
  std::uniform_int_distribution<int> dn(0, max_cylinders);
  std::vector<Word> cs;
  for (int i = 0, n = dn(rng); i < n; ++i) {
    std::uniform_int_distribution<int> dlen(0, max_depth);
    Word w;
    for (int l = dlen(rng); static_cast<int>(w.size()) < l;) {
      const auto& nx = followers(s, w);
      std::uniform_int_distribution<size_t> pick(0, nx.size() - 1);
      w.push_back(nx[pick(rng)]);
    }
    cs.push_back(w);
  }
  return canonicalize(s, cs);
}

}  // namespace

TEST_SUITE_BEGIN("action");

TEST_CASE("f2 generators validate into the expected normal form") {
  ActionPtr a = f2();
  CHECK(a->names == std::vector<std::string>{"ga", "gb"});
  // letters: a=0 A=1 b=2 B=3
  CHECK(gen(a, "ga").rules ==
        std::vector<ExchangeRule>{{{0}, {0, 0}}, {{1}, {}}, {{2}, {0, 2}}, {{3}, {0, 3}}});
  CHECK(gen(a, "gb").rules ==
        std::vector<ExchangeRule>{{{0}, {2, 0}}, {{1}, {2, 1}}, {{2}, {2, 2}}, {{3}, {}}});
  CHECK(!gen(a, "ga").is_identity());
  CHECK_THROWS_AS(a->gen_index("gc"), UnknownGenerator);
}

TEST_CASE("validate_exchange rejects malformed rule systems") {
  SpacePtr s = f2()->space;
  // missing domain letter
  CHECK_THROWS_AS(validate_exchange(s, {{{0}, {0, 0}}, {{1}, {}}, {{2}, {0, 2}}}),
                  IncompleteDomain);
  // overlapping domains
  CHECK_THROWS_AS(
      validate_exchange(s, {{{0}, {0, 0}}, {{0, 0}, {0}}, {{1}, {}}, {{2}, {0, 2}}, {{3}, {0, 3}}}),
      OverlappingDomain);
  CHECK_THROWS_AS(validate_exchange(s, {}), IncompleteDomain);
  // inadmissible words
  CHECK_THROWS_AS(validate_exchange(s, {{{0, 1}, {0}}, {{1}, {}}}), InadmissibleWord);
  // tail mismatch: a -> A but b may follow a and not A
  CHECK_THROWS_AS(
      validate_exchange(s, {{{0}, {1}}, {{1}, {0}}, {{2}, {2}}, {{3}, {3}}}),
      TailMismatch);
  // not bijective: two pieces land on the same cylinders
  SpacePtr b2 = full_shift(2);
  CHECK_THROWS_AS(validate_exchange(b2, {{{0}, {1}}, {{1}, {1}}}), NotBijective);
}

TEST_CASE("normal form merges sibling families and is unique") {
  SpacePtr s = f2()->space;
  PrefixExchange id = validate_exchange(s, {{{0}, {0}}, {{1}, {1}}, {{2}, {2}}, {{3}, {3}}});
  CHECK(id.is_identity());
  CHECK(id == identity_exchange(s));

  // deep identity expansion still collapses
  std::vector<ExchangeRule> deep;
  for (const Word& w : admissible_words(*s, 2)) deep.push_back({w, w});
  CHECK(validate_exchange(s, deep).is_identity());

  // expanding ga one level normalizes back to ga
  std::vector<ExchangeRule> expanded;
  for (const ExchangeRule& r : gen(f2(), "ga").rules)
    for (int x : followers(*s, r.from)) {
      Word from = r.from, to = r.to;
      from.push_back(x);
      to.push_back(x);
      expanded.push_back({from, to});
    }
  CHECK(validate_exchange(s, expanded) == gen(f2(), "ga"));
}

TEST_CASE("apply matches hand values") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  // ga([A]) = [A]|[b]|[B]
  CHECK(apply_cylinder(gen(a, "ga"), {1}) == canonicalize(s, {{1}, {2}, {3}}));
  // gb([a]) = [ba], then ga([ba]) = [aba]
  CHECK(apply_cylinder(gen(a, "gb"), {0}) == clopen_cylinder(s, {2, 0}));
  CHECK(apply_cylinder(gen(a, "ga"), {2, 0}) == clopen_cylinder(s, {0, 2, 0}));
  // ga([a]) = [aa]
  CHECK(apply_cylinder(gen(a, "ga"), {0}) == clopen_cylinder(s, {0, 0}));
  // whole space maps to whole space
  CHECK(apply(gen(a, "ga"), clopen_full(s)) == clopen_full(s));
  CHECK(apply(gen(a, "ga"), clopen_empty(s)) == clopen_empty(s));
}

TEST_CASE("apply agrees with the pointwise oracle on random sets") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  std::mt19937 rng(31337);
  std::vector<PrefixExchange> maps = {gen(a, "ga"), gen(a, "gb"),
                                      invert(gen(a, "ga")), identity_exchange(a->space),
                                      evaluate_word(*a, {{0, 1}, {1, 1}})};
  for (const PrefixExchange& g : maps) {
    for (int trial = 0; trial < 40; ++trial) {
      ClopenSet c = random_clopen(s, rng, 3, 4);
      ClopenSet img = apply(g, c);
      size_t out_depth = 8;
      auto want = oracle::image_denotation(s, g.rules, c.cylinders, 4, out_depth);
      auto got = oracle::denotation(s, img.cylinders, out_depth);
      CHECK(got == want);
    }
  }
}

TEST_CASE("compose is pointwise composition and matches the worked value") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  PrefixExchange gagb = compose(gen(a, "ga"), gen(a, "gb"));
  // (ga∘gb)([a]) = [aba]
  CHECK(apply_cylinder(gagb, {0}) == clopen_cylinder(s, {0, 2, 0}));

  std::mt19937 rng(555);
  for (int trial = 0; trial < 25; ++trial) {
    PrefixExchange g = evaluate_word(*a, random_word(rng, 2, 2));
    PrefixExchange h = evaluate_word(*a, random_word(rng, 2, 2));
    PrefixExchange gh = compose(g, h);
    for (const Word& w : oracle::words_at_depth(s, 7)) {
      Word via_h = oracle::point_image(h.rules, w);
      Word two_step = oracle::point_image(g.rules, via_h);
      CHECK(oracle::point_image(gh.rules, w) == two_step);
    }
  }
}

TEST_CASE("invert matches the frozen hand derivation and cancels pointwise") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  PrefixExchange inv = invert(gen(a, "ga"));
  PrefixExchange frozen = validate_exchange(a->space, oracle::f2_ga_inverse_rules());
  CHECK(inv == frozen);

  CHECK(compose(gen(a, "ga"), inv).is_identity());
  CHECK(compose(inv, gen(a, "ga")).is_identity());

  for (const Word& w : oracle::words_at_depth(s, 5)) {
    CHECK(oracle::point_image(inv.rules, oracle::point_image(gen(a, "ga").rules, w)) == w);
    CHECK(oracle::point_image(gen(a, "ga").rules, oracle::point_image(inv.rules, w)) == w);
  }

  std::mt19937 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    PrefixExchange g = evaluate_word(*a, random_word(rng, 2, 3));
    CHECK(invert(invert(g)) == g);
    CHECK(compose(g, invert(g)).is_identity());
  }
}

TEST_CASE("group word helpers") {
  GroupWord w = {{0, 1}, {1, -1}, {0, 1}};
  CHECK(invert_word(w) == GroupWord{{0, -1}, {1, 1}, {0, -1}});
  CHECK(invert_word(GroupWord{}) == GroupWord{});
  // free reduction at the junction
  CHECK(concat_words({{0, 1}, {1, 1}}, {{1, -1}, {0, 1}}) == GroupWord{{0, 1}, {0, 1}});
  CHECK(concat_words({{0, 1}}, {{0, -1}}) == GroupWord{});
  CHECK(concat_words({}, w) == w);

  ActionPtr a = f2();
  CHECK(word_to_display(*a, {}) == "e");
  CHECK(word_to_display(*a, {{0, 1}}) == "ga");
  CHECK(word_to_display(*a, {{0, 1}, {1, -1}}) == "ga.gb'");
}

TEST_CASE("evaluate_word applies the rightmost letter first") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  // word ga·gb acts as ga∘gb
  PrefixExchange w = evaluate_word(*a, {{0, 1}, {1, 1}});
  CHECK(w == compose(gen(a, "ga"), gen(a, "gb")));
  CHECK(evaluate_word(*a, {}).is_identity());

  std::mt19937 rng(901);
  for (int trial = 0; trial < 30; ++trial) {
    GroupWord gw = random_word(rng, 2, 4);
    ClopenSet c = random_clopen(s, rng, 2, 3);
    CHECK(apply_word(*a, gw, c) == apply(evaluate_word(*a, gw), c));
    // concatenation law: (uv)(A) = u(v(A))
    GroupWord u = random_word(rng, 2, 2);
    CHECK(apply_word(*a, concat_words(u, gw), c) ==
          apply_word(*a, u, apply_word(*a, gw, c)));
  }
}

TEST_CASE("fixed_cylinders finds exactly the pointwise-fixed part") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  CHECK(fixed_cylinders(identity_exchange(a->space), 2) == clopen_full(s));
  for (int d = 0; d <= 3; ++d) {
    CHECK(fixed_cylinders(gen(a, "ga"), d) == clopen_empty(s));
    CHECK(fixed_cylinders(gen(a, "gb"), d) == clopen_empty(s));
  }
  CHECK(fixed_cylinders(compose(gen(a, "ga"), invert(gen(a, "ga"))), 3) == clopen_full(s));

  // partial bit permutation fixes [1] but not [0]
  ActionPtr p = builtin_action("bit_permutation(00>01,01>00,1>1)");
  const SftSpace& b = *p->space;
  CHECK(fixed_cylinders(p->generators[0], 1) == clopen_cylinder(b, {1}));
  CHECK(fixed_cylinders(p->generators[0], 2) == clopen_cylinder(b, {1}));
  ActionPtr swap = builtin_action("bit_permutation(0>1,1>0)");
  CHECK(fixed_cylinders(swap->generators[0], 2) == clopen_empty(*swap->space));

  // single-point space: any exchange is pointwise the identity
  SpacePtr one = full_shift(1);
  PrefixExchange stretch = validate_exchange(one, {{{0}, {0, 0}}});
  CHECK(fixed_cylinders(stretch, 1) == clopen_full(*one));
}

TEST_CASE("builtin free_boundary matches f2 and scales") {
  ActionPtr a = f2();
  ActionPtr b = builtin_action("free_boundary(2)");
  CHECK(a->space->tag == b->space->tag);
  CHECK(a->names == b->names);
  for (size_t i = 0; i < a->generators.size(); ++i)
    CHECK(a->generators[i] == b->generators[i]);

  ActionPtr c = builtin_action("free_boundary(3)");
  CHECK(c->space->k() == 6);
  CHECK(c->names == std::vector<std::string>{"ga", "gb", "gc"});
  // gc prepends c: gc([a]) = [ca]
  CHECK(apply_cylinder(c->generators[2], {0}) == clopen_cylinder(*c->space, {4, 0}));

  CHECK_THROWS_AS(builtin_action("free_boundary(0)"), BadParams);
  CHECK_THROWS_AS(builtin_action("free_boundary(9)"), BadParams);
  CHECK_THROWS_AS(builtin_action("free_boundary(x)"), BadParams);
  CHECK_THROWS_AS(builtin_action("no_such_action"), UnknownName);
}

TEST_CASE("builtin bit_permutation") {
  ActionPtr swap = builtin_action("bit_permutation(0>1,1>0)");
  CHECK(swap->space->k() == 2);
  CHECK(swap->names == std::vector<std::string>{"s"});
  const PrefixExchange& sg = swap->generators[0];
  CHECK(apply_cylinder(sg, {0}) == clopen_cylinder(*swap->space, {1}));
  CHECK(compose(sg, sg).is_identity());

  CHECK(builtin_action("bit_permutation(0>0,1>1)")->generators[0].is_identity());
  CHECK_THROWS_AS(builtin_action("bit_permutation(0>1)"), IncompleteDomain);
  CHECK_THROWS_AS(builtin_action("bit_permutation(0>1,1>1)"), NotBijective);
  CHECK_THROWS_AS(builtin_action("bit_permutation(0-1)"), BadParams);
  CHECK_THROWS_AS(builtin_action("bit_permutation(0>2,1>0)"), BadParams);
  CHECK_THROWS_AS(builtin_action("bit_permutation(0>00,1>1)"), BadParams);
  CHECK_THROWS_AS(builtin_action("bit_permutation(00>0,01>1,1>0)"), BadParams);
}

TEST_CASE("builtin product_with_trivial acts as the base on the first coordinate") {
  ActionPtr p = builtin_action("product_with_trivial(f2_boundary,full_shift(2))");
  ActionPtr base = f2();
  const SftSpace& s = *p->space;
  CHECK(s.k() == 8);
  CHECK(s.letters[0] == "a0");
  CHECK(s.letters[1] == "a1");
  CHECK(s.letters[2] == "A0");
  CHECK(p->names == base->names);

  // second coordinate is constant along admissible words
  for (const Word& w : admissible_words(s, 3))
    for (size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i] % 2 == w[i + 1] % 2);

  // lifted pointwise behavior: (base image) ⊗ digit
  auto lift = [](const Word& w, int j) {
    Word out;
    for (int x : w) out.push_back(2 * x + j);
    return out;
  };
  for (int gi = 0; gi < 2; ++gi)
    for (int j = 0; j < 2; ++j)
      for (const Word& w : oracle::words_at_depth(*base->space, 4)) {
        Word img = oracle::point_image(base->generators[gi].rules, w);
        CHECK(oracle::point_image(p->generators[gi].rules, lift(w, j)) == lift(img, j));
      }

  CHECK_THROWS_AS(builtin_action("product_with_trivial(f2_boundary)"), BadParams);
  CHECK_THROWS_AS(builtin_action("product_with_trivial(f2_boundary,f2_boundary)"),
                  BadParams);
}

TEST_CASE("invariant_clopen_saturation") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  auto [sat, stable] = invariant_clopen_saturation(*a, clopen_cylinder(s, {0}), 10);
  CHECK(stable);
  CHECK(sat == clopen_full(s));

  auto [part, unstable] = invariant_clopen_saturation(*a, clopen_cylinder(s, {0}), 1);
  CHECK(!unstable);
  CHECK(!is_full_set(part));

  // product: X × [0] is invariant and proper
  ActionPtr p = builtin_action("product_with_trivial(f2_boundary,full_shift(2))");
  std::vector<Word> evens;
  for (int i = 0; i < 4; ++i) evens.push_back({2 * i});
  ClopenSet x0 = canonicalize(*p->space, evens);
  auto [sat0, stable0] = invariant_clopen_saturation(*p, x0, 5);
  CHECK(stable0);
  CHECK(sat0 == x0);
  CHECK(!is_full_set(sat0));
}

TEST_CASE("verify_tower checks pairwise disjointness of translates") {
  ActionPtr a = f2();
  const SftSpace& s = *a->space;
  TowerWitness good{{GroupWord{}, GroupWord{{0, 1}}}, clopen_cylinder(s, {2})};
  CHECK(verify_tower(*a, good));  // [b] and ga([b]) = [ab]
  TowerWitness bad{{GroupWord{}, GroupWord{{1, 1}}}, clopen_cylinder(s, {2})};
  CHECK(!verify_tower(*a, bad));  // gb([b]) = [bb] ⊆ [b]
}

TEST_CASE("enumerate_words is the reduced-word list in canonical order") {
  ActionPtr a = f2();
  auto words = enumerate_words(*a, 2);
  CHECK(words.size() == 1 + 4 + 12);
  CHECK(words[0] == GroupWord{});
  CHECK(words[1] == GroupWord{{0, 1}});
  CHECK(words[2] == GroupWord{{0, -1}});
  CHECK(words[3] == GroupWord{{1, 1}});
  CHECK(words[4] == GroupWord{{1, -1}});
  CHECK(words[5] == GroupWord{{0, 1}, {0, 1}});
  CHECK(words[6] == GroupWord{{0, 1}, {1, 1}});
  for (const GroupWord& w : words)
    for (size_t i = 0; i + 1 < w.size(); ++i)
      CHECK(!(w[i].gen == w[i + 1].gen && w[i].exp == -w[i + 1].exp));
}

TEST_CASE("defect and rule length measurements") {
  ActionPtr a = f2();
  CHECK(max_positive_defect(*a) == 1);
  CHECK(max_rule_length(*a) == 2);
  ActionPtr swap = builtin_action("bit_permutation(0>1,1>0)");
  CHECK(max_positive_defect(*swap) == 0);
  CHECK(max_rule_length(*swap) == 1);
  ActionPtr two = builtin_action("bit_permutation(00>01,01>00,1>1)");
  CHECK(max_positive_defect(*two) == 0);
  CHECK(max_rule_length(*two) == 2);
}

TEST_SUITE_END();
