#include "doctest.h"

#include <string>
#include <vector>

#include "cantordyn/cli.hpp"
#include "cantordyn/errors.hpp"
#include "cantordyn/textio.hpp"

using namespace cantordyn;

namespace {

ActionPtr f2() { return builtin_action("f2_boundary"); }
ActionPtr swap_bits() { return builtin_action("bit_permutation(0>1,1>0)"); }
ActionPtr product() {
  return builtin_action("product_with_trivial(f2_boundary,full_shift(2))");
}

const char* kF2Text =
    "# rank-2 boundary, shuffled rule order and comments\n"
    "space letters a A b B\n"
    "space forbid aA Aa bB Bb\n"
    "space initial a A b B\n"
    "gen ga rule A -> .   # collapse\n"
    "gen ga rule a -> aa\n"
    "gen ga rule b -> ab\n"
    "gen ga rule B -> aB\n"
    "gen gb rule B -> .\n"
    "gen gb rule a -> ba\n"
    "gen gb rule A -> bA\n"
    "gen gb rule b -> bb\n";

RunResult run(const std::vector<std::string>& args) { return run_command(args); }

// Replaces the first occurrence; fails the test when absent.
std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  size_t pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("action text parses to the builtin it describes") {
  ActionPtr parsed = parse_action_text(kF2Text);
  ActionPtr builtin = f2();
  CHECK(serialize_action(*parsed) == serialize_action(*builtin));
  CHECK(action_hash_string(*parsed) == action_hash_string(*builtin));
  CHECK(action_hash_string(*parsed).rfind("fnv1a64:", 0) == 0);
  CHECK(action_hash_string(*parsed).size() == 8 + 16);

  // serialization is a fixed point of parse -> serialize
  std::string canon = serialize_action(*builtin);
  CHECK(serialize_action(*parse_action_text(canon)) == canon);

  // multi-char letter names serialize with spaces and survive the round trip
  std::string prod = serialize_action(*product());
  CHECK(prod.find("space letters a0 a1 A0 A1 b0 b1 B0 B1") == 0);
  CHECK(serialize_action(*parse_action_text(prod)) == prod);

  // builtin references resolve to the same action
  CHECK(serialize_action(*parse_action_text("builtin = f2_boundary\n")) ==
        serialize_action(*builtin));
}

TEST_CASE("action parse errors carry positions") {
  try {
    parse_action_text("");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.col == 1);
  }
  try {
    parse_action_text("space letters a b\nnonsense here\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 1);
  }
  CHECK_THROWS_AS(parse_action_text("space forbid ab\n"), SyntaxError);
  CHECK_THROWS_AS(
      parse_action_text("space letters a b\nspace letters a b\ngen g rule a -> a\n"),
      SyntaxError);
  CHECK_THROWS_AS(parse_action_text("space letters a b\ngen g rule a\n"), SyntaxError);
  CHECK_THROWS_AS(
      parse_action_text("builtin = f2_boundary\nspace letters a b\n"), SyntaxError);
  CHECK_THROWS_AS(parse_action_text("# only a comment\n"), SyntaxError);

  // semantic problems: unknown letters, duplicates, validation failures
  CHECK_THROWS_WITH_AS(
      parse_action_text("space letters a b\ngen g rule a -> zz\ngen g rule b -> b\n"),
      "SemanticError: line 2: unknown letter in 'zz'", SemanticError);
  CHECK_THROWS_AS(parse_action_text("space letters a a\n"), SemanticError);
  CHECK_THROWS_AS(parse_action_text("space letters a b\n"), SemanticError);
  CHECK_THROWS_AS(parse_action_text("builtin = no_such_action\n"), SemanticError);
  try {
    // images collide, so the exchange is not a bijection
    parse_action_text("space letters a b\ngen g rule a -> a\ngen g rule b -> a\n");
    FAIL("expected SemanticError");
  } catch (const SemanticError& e) {
    CHECK(std::string(e.what()).find("NotBijective") != std::string::npos);
  }
}

TEST_CASE("clopen literals round-trip") {
  ActionPtr a = f2();
  const SftSpace& space = *a->space;

  CHECK(clopen_literal(space, parse_clopen_literal(*a, "[]")) == "[]");
  CHECK(clopen_literal(space, parse_clopen_literal(*a, "{}")) == "{}");
  CHECK(clopen_literal(space, parse_clopen_literal(*a, "[a]")) == "[a]");
  CHECK(clopen_literal(space, parse_clopen_literal(*a, "[aa]|[ab]")) == "[aa]|[ab]");
  // full sibling family merges to the parent cylinder
  CHECK(clopen_literal(space, parse_clopen_literal(*a, "[aa]|[ab]|[aB]")) == "[a]");
  // surrounding whitespace is tolerated
  CHECK(clopen_literal(space, parse_clopen_literal(*a, " [b] | [B] ")) == "[b]|[B]");

  CHECK_THROWS_AS(parse_clopen_literal(*a, ""), SemanticError);
  CHECK_THROWS_AS(parse_clopen_literal(*a, "a"), SemanticError);
  CHECK_THROWS_AS(parse_clopen_literal(*a, "[zz]"), SemanticError);
  CHECK_THROWS_AS(parse_clopen_literal(*a, "[aA]"), InadmissibleWord);

  // multi-char letters need separators inside the brackets
  ActionPtr p = product();
  CHECK(clopen_literal(*p->space, parse_clopen_literal(*p, "[a0 a0]")) == "[a0 a0]");
  CHECK(clopen_literal(*p->space, parse_clopen_literal(*p, "[a0]|[a1]")) == "[a0]|[a1]");
}

TEST_CASE("word literals round-trip") {
  ActionPtr a = f2();
  for (const char* text : {"e", "ga", "ga'", "gb.ga'", "ga.ga.gb'"}) {
    GroupWord w = parse_word_literal(*a, text);
    CHECK(word_literal(*a, w) == text);
  }
  CHECK(parse_word_literal(*a, "e").empty());
  GroupWord w = parse_word_literal(*a, "ga.gb'");
  REQUIRE(w.size() == 2);
  CHECK(w[0].gen == 0);
  CHECK(w[0].exp == 1);
  CHECK(w[1].gen == 1);
  CHECK(w[1].exp == -1);

  CHECK_THROWS_AS(parse_word_literal(*a, ""), SemanticError);
  CHECK_THROWS_AS(parse_word_literal(*a, "gc"), SemanticError);
  CHECK_THROWS_AS(parse_word_literal(*a, "ga..gb"), SemanticError);
  CHECK_THROWS_AS(parse_word_literal(*a, "ga''"), SemanticError);
}

TEST_CASE("type literals round-trip") {
  ActionPtr a = f2();
  const SftSpace& space = *a->space;
  for (const char* text : {"0", "[a]", "2*[a]", "2*[aa]+[ab]", "3*[a]+2*[b]+[B]"}) {
    TypeElement f = parse_type_literal(*a, text);
    CHECK(type_literal(space, f) == text);
  }
  // canonicalization merges a full sibling family
  CHECK(type_literal(space, parse_type_literal(*a, "[aa]+[ab]+[aB]")) == "[a]");
  // repeated cylinders accumulate multiplicity
  CHECK(type_literal(space, parse_type_literal(*a, "[a]+[a]")) == "2*[a]");
  CHECK(parse_type_literal(*a, "0").is_zero());

  CHECK_THROWS_AS(parse_type_literal(*a, ""), SemanticError);
  CHECK_THROWS_AS(parse_type_literal(*a, "[a]+"), SemanticError);
  CHECK_THROWS_AS(parse_type_literal(*a, "x*[a]"), SemanticError);
  CHECK_THROWS_AS(parse_type_literal(*a, "-1*[a]"), SemanticError);
}

TEST_CASE("rational and term parsers are exact") {
  CHECK(parse_rational_literal("3/4") == Rational(3, 4));
  CHECK(parse_rational_literal("-2") == Rational(-2));
  CHECK(parse_rational_literal(" 5 ") == Rational(5));
  CHECK(parse_rational_literal("-7/3") == Rational(-7, 3));
  CHECK_THROWS_AS(parse_rational_literal("x"), SemanticError);
  CHECK_THROWS_AS(parse_rational_literal("1/0"), SemanticError);
  CHECK_THROWS_AS(parse_rational_literal("1/-2"), SemanticError);
  CHECK_THROWS_AS(parse_rational_literal(""), SemanticError);

  ActionPtr a = f2();
  Normalization n = parse_normalization_terms(*a, "1*[]");
  REQUIRE(n.size() == 1);
  CHECK(n[0].first.empty());
  CHECK(n[0].second == Rational(1));
  n = parse_normalization_terms(*a, "1/2*[a]+1/2*[b]");
  REQUIRE(n.size() == 2);
  CHECK(n[0].first == Word{0});
  CHECK(n[1].second == Rational(1, 2));
  CHECK(parse_normalization_terms(*a, "0").empty());
  CHECK_THROWS_AS(parse_normalization_terms(*a, "[a]"), SemanticError);

  auto terms = parse_integer_terms(*a, "2*[a]+1*[aa]");
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].second == 2);
  CHECK(terms[1].first == Word{0, 0});
  CHECK(parse_integer_terms(*a, "0").empty());

  Word cyl = parse_cylinder_word(*a, "[ab]");
  CHECK(cyl == Word{0, 2});
  CHECK(parse_cylinder_word(*a, "[]").empty());
  CHECK_THROWS_AS(parse_cylinder_word(*a, "ab"), SemanticError);
}

TEST_CASE("fnv1a64 matches the published vectors") {
  CHECK(fnv1a64_hash("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64_hash("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64_hash("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("certificates round-trip byte-identically") {
  ActionPtr a = f2();
  SearchBounds bounds;
  ParadoxicalOutcome out = check_paradoxical(*a, parse_clopen_literal(*a, "[a]"), bounds);
  REQUIRE(out.status == SearchStatus::Found);
  Certificate cert = certificate_for_paradoxical(*a, bounds, *out.witness);

  std::string text = write_certificate(cert);
  Certificate back = read_certificate(text);
  CHECK(write_certificate(back) == text);
  CHECK(back.kind == CertificateKind::Paradoxical);
  CHECK(back.action_text == cert.action_text);
  CHECK(back.action_hash == cert.action_hash);
  CHECK(back.bounds.depth == bounds.depth);
  CHECK(back.bounds.word_length == bounds.word_length);
  CHECK(back.bounds.node_budget == bounds.node_budget);
  CHECK(back.statement == cert.statement);
  CHECK(back.data == cert.data);

  CHECK_THROWS_AS(read_certificate("not a certificate\n"), SemanticError);
  CHECK_THROWS_AS(read_certificate(text.substr(0, text.size() / 2)), SemanticError);
  CHECK_THROWS_AS(read_certificate(text + "trailing garbage\n"), SemanticError);
  CHECK_THROWS_AS(
      read_certificate(replace_once(text, "kind paradoxical", "kind nonsense")),
      SemanticError);

  for (CertificateKind k :
       {CertificateKind::Subequivalence, CertificateKind::Paradoxical,
        CertificateKind::Tower, CertificateKind::Order, CertificateKind::Measure,
        CertificateKind::Infeasibility, CertificateKind::Scaling,
        CertificateKind::Isometry, CertificateKind::Cuntz}) {
    auto parsed = certificate_kind_from_name(certificate_kind_name(k));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == k);
  }
  CHECK(!certificate_kind_from_name("nonsense").has_value());
}

TEST_CASE("reports round-trip") {
  ActionPtr a = f2();
  SearchBounds bounds;
  SubequivalenceOutcome s =
      search_subequivalence(*a, parse_clopen_literal(*a, "[b]"),
                            parse_clopen_literal(*a, "[a]"), bounds);
  REQUIRE(s.status == SearchStatus::Found);

  Report rep;
  rep.title = "sample";
  rep.lines = {"first summary line", "second line"};
  rep.certificates.push_back(certificate_for_scheme(*a, bounds, s.scheme));
  rep.certificates.push_back(certificate_for_scheme(*a, bounds, s.scheme));

  std::string text = write_report(rep);
  CHECK(looks_like_report(text));
  CHECK(!looks_like_report(write_certificate(rep.certificates[0])));
  Report back = read_report(text);
  CHECK(write_report(back) == text);
  CHECK(back.title == "sample");
  CHECK(back.lines == rep.lines);
  REQUIRE(back.certificates.size() == 2);
  CHECK(write_certificate(back.certificates[0]) ==
        write_certificate(rep.certificates[0]));

  CHECK_THROWS_AS(read_report("cantordyn-report v1\n"), SemanticError);
  CHECK_THROWS_AS(read_report(text + "extra\n"), SemanticError);
}

TEST_CASE("scheme blocks round-trip through their cursor") {
  ActionPtr a = f2();
  SearchBounds bounds;
  SubequivalenceOutcome s =
      search_subequivalence(*a, parse_clopen_literal(*a, "[b]|[B]"),
                            parse_clopen_literal(*a, "[a]"), bounds);
  REQUIRE(s.status == SearchStatus::Found);

  std::vector<std::string> lines;
  append_scheme_block(*a, s.scheme, &lines);
  append_scheme_block(*a, s.scheme, &lines);
  size_t i = 0;
  SubequivalenceScheme s1 = parse_scheme_block(*a, lines, &i);
  SubequivalenceScheme s2 = parse_scheme_block(*a, lines, &i);
  CHECK(i == lines.size());
  CHECK(s1.source == s.scheme.source);
  CHECK(s1.target == s.scheme.target);
  REQUIRE(s1.pieces.size() == s.scheme.pieces.size());
  for (size_t n = 0; n < s1.pieces.size(); ++n) {
    CHECK(s1.pieces[n].piece == s.scheme.pieces[n].piece);
    CHECK(s1.pieces[n].word == s.scheme.pieces[n].word);
  }
  CHECK(s2.source == s.scheme.source);

  CHECK_THROWS_AS(parse_scheme_block(*a, {"scheme pieces 1"}, &(i = 0)),
                  SemanticError);
}

TEST_CASE("established commands emit certificates that verify") {
  const std::vector<std::vector<std::string>> invocations = {
      {"check-subequiv", "--builtin", "f2_boundary", "--from", "[b]", "--to", "[a]"},
      {"check-paradoxical", "--builtin", "f2_boundary", "--set", "[a]"},
      {"check-weak-paradoxical", "--builtin", "f2_boundary", "--from", "[b]", "--to",
       "[a]"},
      {"check-strong-boundary", "--builtin", "f2_boundary", "--depth", "1"},
      {"find-tower", "--builtin", "f2_boundary", "--set", "[a]"},
      {"find-invariant-measure", "--builtin", "bit_permutation(0>1,1>0)", "--depth",
       "2"},
      {"find-normalized-content", "--builtin", "bit_permutation(0>1,1>0)", "--set",
       "[0]", "--depth", "2"},
      {"semigroup-order", "--builtin", "f2_boundary", "--left", "2*[a]", "--right",
       "[a]", "--depth", "1"},
      {"semigroup-purely-infinite", "--builtin", "f2_boundary", "--depth", "1"},
      {"semigroup-unperforation", "--builtin", "f2_boundary", "--left", "[a]",
       "--right", "[b]", "--n", "2", "--depth", "1"},
      {"scaling-element", "--builtin", "f2_boundary", "--from", "[a]", "--to",
       "[aba]"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args[0]);
    RunResult r = run(args);
    CHECK(r.exit_code == kExitEstablished);
    CHECK(r.err.empty());
    CHECK(looks_like_report(r.out));
    RunResult v = verify_certificate_text(r.out);
    CHECK(v.exit_code == kExitEstablished);
  }
}

TEST_CASE("refuted commands emit counter-certificates that verify") {
  const std::vector<std::vector<std::string>> invocations = {
      {"check-subequiv", "--builtin", "bit_permutation(0>1,1>0)", "--from", "[]",
       "--to", "[0]"},
      {"check-paradoxical", "--builtin", "bit_permutation(0>1,1>0)", "--set", "[0]"},
      {"find-invariant-measure", "--builtin", "f2_boundary", "--depth", "2"},
      {"find-normalized-content", "--builtin", "f2_boundary", "--set", "[a]",
       "--depth", "2"},
      {"semigroup-order", "--builtin", "bit_permutation(0>1,1>0)", "--left", "[]",
       "--right", "[0]", "--depth", "1"},
      {"semigroup-purely-infinite", "--builtin", "bit_permutation(0>1,1>0)",
       "--depth", "1"},
      {"scaling-element", "--builtin", "bit_permutation(0>1,1>0)", "--from", "[]",
       "--to", "[0]"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args[0]);
    RunResult r = run(args);
    CHECK(r.exit_code == kExitRefuted);
    CHECK(looks_like_report(r.out));
    CHECK(!read_report(r.out).certificates.empty());
    RunResult v = verify_certificate_text(r.out);
    CHECK(v.exit_code == kExitEstablished);
  }
}

TEST_CASE("exit codes follow the contract") {
  // usage errors
  CHECK(run({"check-paradoxical", "--set", "[a]"}).exit_code == kExitUsage);
  CHECK(run({"check-paradoxical", "--builtin", "f2_boundary"}).exit_code == kExitUsage);
  CHECK(run({"check-paradoxical", "--builtin", "f2_boundary", "--action", "x",
             "--set", "[a]"})
            .exit_code == kExitUsage);
  CHECK(run({"find-invariant-measure", "--builtin", "f2_boundary", "--depth", "0"})
            .exit_code == kExitUsage);
  CHECK(run({"check-nfilling", "--builtin", "f2_boundary", "--n", "0"}).exit_code ==
        kExitUsage);
  CHECK(run({"scaling-element", "--builtin", "f2_boundary", "--from", "[a]", "--to",
             "[aba]", "--guard-f", "[aa]"})
            .exit_code == kExitUsage);
  CHECK(run({"no-such-command"}).exit_code == kExitUsage);
  CHECK(run({}).exit_code == kExitUsage);
  CHECK(run({"--help"}).exit_code == kExitEstablished);

  // input errors
  CHECK(run({"check-paradoxical", "--builtin", "no_such", "--set", "[a]"}).exit_code ==
        kExitInputError);
  CHECK(run({"check-paradoxical", "--action", "/no/such/file.act", "--set", "[a]"})
            .exit_code == kExitInputError);
  CHECK(run({"check-paradoxical", "--builtin", "f2_boundary", "--set", "[zz]"})
            .exit_code == kExitInputError);
  CHECK(run({"verify", "/no/such/file.cert"}).exit_code == kExitInputError);

  // inconclusive: budget too small to find, nothing refutable
  CHECK(run({"check-subequiv", "--builtin", "f2_boundary", "--from", "[b]", "--to",
             "[a]", "--node-budget", "1"})
            .exit_code == kExitInconclusive);
  CHECK(run({"find-tower", "--builtin", "f2_boundary", "--set", "{}"}).exit_code ==
        kExitInconclusive);
  CHECK(run({"semigroup-unperforation", "--builtin", "f2_boundary", "--left", "[a]",
             "--right", "[b]", "--n", "2", "--node-budget", "1", "--depth", "1"})
            .exit_code == kExitInconclusive);
}

TEST_CASE("verify rejects tampering and truncation") {
  RunResult par = run({"check-paradoxical", "--builtin", "f2_boundary", "--set", "[a]"});
  REQUIRE(par.exit_code == kExitEstablished);

  // piece cylinder tamper: witness no longer covers its source
  RunResult v = verify_certificate_text(
      replace_once(par.out, "piece [a] ga\n", "piece [b] ga\n"));
  CHECK(v.exit_code == kExitRefuted);

  // statement tamper: schemes no longer sit inside the claimed set
  v = verify_certificate_text(
      replace_once(par.out, "begin statement\nset [a]", "begin statement\nset [b]"));
  CHECK(v.exit_code == kExitRefuted);

  // action text tamper breaks the hash binding
  v = verify_certificate_text(
      replace_once(par.out, "gen ga rule a -> aa", "gen ga rule a -> ab"));
  CHECK(v.exit_code == kExitRefuted);
  CHECK(v.out.find("action hash mismatch") != std::string::npos);

  // wrong witness for a true statement still fails: the verifier never re-searches
  v = verify_certificate_text(replace_once(par.out, "piece [a] ga\n", "piece [a] gb\n"));
  CHECK(v.exit_code == kExitRefuted);

  // truncation is malformed input, not a refutation
  v = verify_certificate_text(par.out.substr(0, par.out.size() / 2));
  CHECK(v.exit_code == kExitInputError);

  // infeasibility multiplier tamper
  RunResult inf = run({"find-invariant-measure", "--builtin", "f2_boundary", "--depth",
                       "2"});
  REQUIRE(inf.exit_code == kExitRefuted);
  v = verify_certificate_text(replace_once(inf.out, "mult norm 1", "mult norm 2"));
  CHECK(v.exit_code == kExitRefuted);

  // separation-claim tamper on a measure counter-certificate
  RunResult sep = run({"check-subequiv", "--builtin", "bit_permutation(0>1,1>0)",
                       "--from", "[]", "--to", "[0]"});
  REQUIRE(sep.exit_code == kExitRefuted);
  v = verify_certificate_text(replace_once(sep.out, "left []", "left [1]"));
  CHECK(v.exit_code == kExitRefuted);
}

TEST_CASE("verify reports one line per certificate") {
  RunResult scal =
      run({"scaling-element", "--builtin", "f2_boundary", "--from", "[a]", "--to",
           "[aba]"});
  REQUIRE(scal.exit_code == kExitEstablished);
  RunResult v = verify_certificate_text(scal.out);
  CHECK(v.exit_code == kExitEstablished);
  CHECK(v.out == "verified scaling\nverified isometry\n");

  // a bare certificate (no report wrapper) also verifies
  Report rep = read_report(scal.out);
  REQUIRE(rep.certificates.size() == 2);
  RunResult single = verify_certificate_text(write_certificate(rep.certificates[0]));
  CHECK(single.exit_code == kExitEstablished);
  CHECK(single.out == "verified scaling\n");
}

TEST_CASE("command output is deterministic") {
  const std::vector<std::vector<std::string>> invocations = {
      {"check-paradoxical", "--builtin", "f2_boundary", "--set", "[a]"},
      {"find-invariant-measure", "--builtin", "f2_boundary", "--depth", "2"},
      {"semigroup-order", "--builtin", "f2_boundary", "--left", "2*[a]", "--right",
       "[a]", "--depth", "1"},
  };
  for (const auto& args : invocations) {
    RunResult r1 = run(args);
    RunResult r2 = run(args);
    CHECK(r1.exit_code == r2.exit_code);
    CHECK(r1.out == r2.out);
    CHECK(r1.err == r2.err);
  }
}
