#include "cantordyn/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "cantordyn/errors.hpp"

namespace cantordyn {

namespace {

const Normalization kMassOne = {{Word{}, Rational(1)}};

Normalization one_terms(const ClopenSet& a) {
  Normalization out;
  for (const Word& w : a.cylinders) out.emplace_back(w, Rational(1));
  return out;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long to_integer(const std::string& tok, const std::string& context) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw SemanticError("bad integer '" + tok + "' in " + context);
  }
  if (pos != tok.size())
    throw SemanticError("bad integer '" + tok + "' in " + context);
  return v;
}

// -- certificate replay -------------------------------------------------------
// Every replay path goes through the exact verifiers; nothing here searches.

struct Replay {
  bool pass = false;
  std::string why;
};

// lines[i] must start with `prefix`; returns the rest.
std::string field_after(const std::vector<std::string>& lines, size_t i,
                        const std::string& prefix) {
  if (i >= lines.size() || lines[i].rfind(prefix, 0) != 0)
    throw SemanticError("certificate: expected '" + prefix + "...' on line " +
                        std::to_string(i + 1) + " of its block");
  return lines[i].substr(prefix.size());
}

void expect_block_size(const std::vector<std::string>& lines, size_t n,
                       const char* which) {
  if (lines.size() != n)
    throw SemanticError(std::string("certificate: unexpected extra ") + which +
                        " lines");
}

Replay replay_subequivalence(const Action& action, const Certificate& cert) {
  ClopenSet from = parse_clopen_literal(action, field_after(cert.statement, 0, "from "));
  ClopenSet to = parse_clopen_literal(action, field_after(cert.statement, 1, "to "));
  expect_block_size(cert.statement, 2, "statement");
  size_t i = 0;
  SubequivalenceScheme s = parse_scheme_block(action, cert.data, &i);
  expect_block_size(cert.data, i, "data");
  if (!(s.source == from) || !(s.target == to))
    return {false, "scheme endpoints differ from the statement"};
  VerifyReport rep = verify_scheme(action, s);
  return {rep.pass, rep.clause};
}

Replay replay_paradoxical(const Action& action, const Certificate& cert) {
  ClopenSet set = parse_clopen_literal(action, field_after(cert.statement, 0, "set "));
  expect_block_size(cert.statement, 1, "statement");
  size_t i = 0;
  ParadoxicalWitness w;
  w.s1 = parse_scheme_block(action, cert.data, &i);
  w.s2 = parse_scheme_block(action, cert.data, &i);
  expect_block_size(cert.data, i, "data");
  w.a = set;
  w.o1 = w.s1.target;
  w.o2 = w.s2.target;
  VerifyReport rep = verify_paradoxical(action, w);
  return {rep.pass, rep.clause};
}

Replay replay_tower(const Action& action, const Certificate& cert) {
  size_t k = static_cast<size_t>(
      to_integer(field_after(cert.statement, 0, "tower candidates "), "tower statement"));
  std::vector<GroupWord> candidates;
  for (size_t n = 0; n < k; ++n)
    candidates.push_back(
        parse_word_literal(action, field_after(cert.statement, 1 + n, "candidate ")));
  expect_block_size(cert.statement, 1 + k, "statement");

  TowerWitness t;
  t.base = parse_clopen_literal(action, field_after(cert.data, 0, "base "));
  size_t m = static_cast<size_t>(
      to_integer(field_after(cert.data, 1, "words "), "tower data"));
  for (size_t n = 0; n < m; ++n)
    t.words.push_back(
        parse_word_literal(action, field_after(cert.data, 2 + n, "word ")));
  expect_block_size(cert.data, 2 + m, "data");

  if (is_empty_set(t.base)) return {false, "tower base is empty"};
  for (const GroupWord& w : t.words) {
    bool known = false;
    for (const GroupWord& c : candidates)
      if (w == c) {
        known = true;
        break;
      }
    if (!known) return {false, "tower word is not among the candidates"};
  }
  if (!verify_tower(action, t)) return {false, "tower translates overlap"};
  return {true, ""};
}

Replay replay_order(const Action& action, const Certificate& cert) {
  TypeElement f = parse_type_literal(action, field_after(cert.statement, 0, "left "));
  TypeElement g = parse_type_literal(action, field_after(cert.statement, 1, "right "));
  expect_block_size(cert.statement, 2, "statement");

  size_t k = static_cast<size_t>(
      to_integer(field_after(cert.data, 0, "parts "), "order data"));
  OrderWitness w;
  for (size_t n = 0; n < k; ++n) {
    std::string rest = field_after(cert.data, 1 + n, "part ");
    size_t space_pos = rest.find(' ');
    if (space_pos == std::string::npos)
      throw SemanticError("certificate: bad part line '" + cert.data[1 + n] + "'");
    OrderPart p;
    p.word = parse_word_literal(action, rest.substr(0, space_pos));
    p.h = parse_integer_terms(action, rest.substr(space_pos + 1));
    w.parts.push_back(std::move(p));
  }
  expect_block_size(cert.data, 1 + k, "data");

  VerifyReport rep = verify_order_witness(action, f, g, w);
  return {rep.pass, rep.clause};
}

// Parses "value [cyl] <rational>" / "set <clopen>" style bracket payloads.
std::pair<std::string, std::string> split_bracket_payload(const std::string& line) {
  size_t open = line.find('[');
  size_t close = line.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw SemanticError("certificate: bad bracketed line '" + line + "'");
  return {line.substr(open + 1, close - open - 1), trimmed(line.substr(close + 1))};
}

InvariantContent parse_content_data(const Action& action,
                                    const std::vector<std::string>& data, int depth) {
  size_t k = static_cast<size_t>(
      to_integer(field_after(data, 0, "values "), "measure data"));
  InvariantContent mu;
  mu.depth = depth;
  for (size_t n = 0; n < k; ++n) {
    std::string line = field_after(data, 1 + n, "value ");
    auto [cyl, rat] = split_bracket_payload(line);
    mu.values.emplace_back(parse_cylinder_word(action, "[" + cyl + "]"),
                           parse_rational_literal(rat));
  }
  expect_block_size(data, 1 + k, "data");
  return mu;
}

Replay replay_measure(const Action& action, const Certificate& cert) {
  const SftSpace& space = *action.space;
  int depth = static_cast<int>(
      to_integer(field_after(cert.statement, 0, "content depth "), "measure statement"));
  Normalization norm =
      parse_normalization_terms(action, field_after(cert.statement, 1, "normalization "));
  InvariantContent mu = parse_content_data(action, cert.data, depth);

  std::string why;
  if (!verify_content(action, mu, norm, &why)) return {false, why};

  if (cert.statement.size() == 2) return {true, ""};
  const std::string& claim = cert.statement[2];
  if (claim == "claim separates") {
    ClopenSet left = parse_clopen_literal(action, field_after(cert.statement, 3, "left "));
    ClopenSet right =
        parse_clopen_literal(action, field_after(cert.statement, 4, "right "));
    expect_block_size(cert.statement, 5, "statement");
    if (!(evaluate_content(space, mu, left) > evaluate_content(space, mu, right)))
      return {false, "claimed separation fails"};
    return {true, ""};
  }
  if (claim == "claim separates-order") {
    TypeElement left = parse_type_literal(action, field_after(cert.statement, 3, "left "));
    TypeElement right =
        parse_type_literal(action, field_after(cert.statement, 4, "right "));
    expect_block_size(cert.statement, 5, "statement");
    if (!(integrate(space, mu, left) > integrate(space, mu, right)))
      return {false, "claimed separation fails"};
    return {true, ""};
  }
  if (claim == "claim refutes-paradoxical") {
    ClopenSet set = parse_clopen_literal(action, field_after(cert.statement, 3, "set "));
    expect_block_size(cert.statement, 4, "statement");
    if (!(norm == one_terms(set)))
      return {false, "normalization does not match the refuted set"};
    return {true, ""};
  }
  if (claim == "claim cover-deficient") {
    if (!(norm == kMassOne))
      return {false, "cover-deficiency needs a probability content"};
    size_t k = static_cast<size_t>(
        to_integer(field_after(cert.statement, 3, "sets "), "cover claim"));
    Rational total = 0;
    for (size_t n = 0; n < k; ++n)
      total += evaluate_content(
          space, mu,
          parse_clopen_literal(action, field_after(cert.statement, 4 + n, "set ")));
    expect_block_size(cert.statement, 4 + k, "statement");
    if (!(total < 1)) return {false, "claimed deficiency fails"};
    return {true, ""};
  }
  return {false, "unknown claim '" + claim + "'"};
}

Replay replay_infeasibility(const Action& action, const Certificate& cert) {
  InfeasibilityCertificate c;
  c.depth = static_cast<int>(to_integer(
      field_after(cert.statement, 0, "infeasible depth "), "infeasibility statement"));
  c.normalization =
      parse_normalization_terms(action, field_after(cert.statement, 1, "normalization "));
  expect_block_size(cert.statement, 2, "statement");

  size_t k = static_cast<size_t>(
      to_integer(field_after(cert.data, 0, "multipliers "), "infeasibility data"));
  for (size_t n = 0; n < k; ++n) {
    const std::string& line = cert.data[1 + n];
    std::string rest = field_after(cert.data, 1 + n, "mult ");
    LpRowId row;
    std::string rat_text;
    if (rest.rfind("norm ", 0) == 0) {
      row.is_norm = true;
      rat_text = rest.substr(5);
    } else if (rest.rfind("gen ", 0) == 0) {
      rest = rest.substr(4);
      size_t sp1 = rest.find(' ');
      if (sp1 == std::string::npos)
        throw SemanticError("certificate: bad multiplier line '" + line + "'");
      std::string name = rest.substr(0, sp1);
      std::string dir_and_more = rest.substr(sp1 + 1);
      std::string dir = dir_and_more.substr(0, 3);
      if (dir != "fwd" && dir != "inv")
        throw SemanticError("certificate: bad multiplier direction in '" + line + "'");
      try {
        row.gen = action.gen_index(name);
      } catch (const Error&) {
        throw SemanticError("certificate: unknown generator '" + name + "'");
      }
      row.inverse = (dir == "inv");
      auto [cyl, rat] = split_bracket_payload(dir_and_more);
      row.cylinder = parse_cylinder_word(action, "[" + cyl + "]");
      rat_text = rat;
    } else {
      throw SemanticError("certificate: bad multiplier line '" + line + "'");
    }
    c.multipliers.emplace_back(row, parse_rational_literal(rat_text));
  }
  expect_block_size(cert.data, 1 + k, "data");

  std::string why;
  if (!verify_infeasibility(action, c, &why)) return {false, why};
  return {true, ""};
}

// Shared by scaling and isometry replays.
std::pair<SubequivalenceScheme, ScalingGuards> parse_scaling_payload(
    const Action& action, const Certificate& cert) {
  ScalingGuards guards;
  guards.f = parse_clopen_literal(action, field_after(cert.statement, 0, "guard-f "));
  guards.u = parse_clopen_literal(action, field_after(cert.statement, 1, "guard-u "));
  expect_block_size(cert.statement, 2, "statement");
  size_t i = 0;
  SubequivalenceScheme s = parse_scheme_block(action, cert.data, &i);
  expect_block_size(cert.data, i, "data");
  return {s, guards};
}

Replay replay_scaling(const Action& action, const Certificate& cert) {
  auto [s, guards] = parse_scaling_payload(action, cert);
  scaling_element_from_scheme(action, s, guards);  // throws when any clause fails
  return {true, ""};
}

Replay replay_isometry(const Action& action, const Certificate& cert) {
  auto [s, guards] = parse_scaling_payload(action, cert);
  ScalingDiagnostics diag = scaling_element_from_scheme(action, s, guards);
  isometry_from_scaling(*action.space, diag.x);  // throws when v*v != 1 etc.
  return {true, ""};
}

Replay replay_cuntz(const Action& action, const Certificate& cert) {
  ClopenSet from = parse_clopen_literal(action, field_after(cert.statement, 0, "from "));
  ClopenSet to = parse_clopen_literal(action, field_after(cert.statement, 1, "to "));
  expect_block_size(cert.statement, 2, "statement");
  size_t i = 0;
  SubequivalenceScheme s = parse_scheme_block(action, cert.data, &i);
  expect_block_size(cert.data, i, "data");
  if (!(s.source == from) || !(s.target == to))
    return {false, "scheme endpoints differ from the statement"};
  CuntzDiagnostics d = cuntz_witness_from_scheme(action, s);
  if (!d.identity_holds) return {false, "sandwich identity fails"};
  return {true, ""};
}

Replay replay_certificate(const Certificate& cert) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64_hash(cert.action_text)));
  if (cert.action_hash != std::string("fnv1a64:") + buf)
    return {false, "action hash mismatch"};

  ActionPtr action;
  try {
    action = parse_action_text(cert.action_text);
  } catch (const Error& e) {
    return {false, e.what()};
  }

  try {
    switch (cert.kind) {
      case CertificateKind::Subequivalence: return replay_subequivalence(*action, cert);
      case CertificateKind::Paradoxical: return replay_paradoxical(*action, cert);
      case CertificateKind::Tower: return replay_tower(*action, cert);
      case CertificateKind::Order: return replay_order(*action, cert);
      case CertificateKind::Measure: return replay_measure(*action, cert);
      case CertificateKind::Infeasibility: return replay_infeasibility(*action, cert);
      case CertificateKind::Scaling: return replay_scaling(*action, cert);
      case CertificateKind::Isometry: return replay_isometry(*action, cert);
      case CertificateKind::Cuntz: return replay_cuntz(*action, cert);
    }
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {false, "unknown certificate kind"};
}

// -- command bodies ----------------------------------------------------------

struct CmdOut {
  int code = kExitInconclusive;
  Report report;
};

Certificate separation_certificate(const Action& action, const SearchBounds& bounds,
                                   const InvariantContent& mu, const ClopenSet& left,
                                   const ClopenSet& right) {
  const SftSpace& space = *action.space;
  Certificate c = certificate_for_measure(action, bounds, mu, kMassOne);
  c.statement.push_back("claim separates");
  c.statement.push_back("left " + clopen_literal(space, left));
  c.statement.push_back("right " + clopen_literal(space, right));
  return c;
}

Certificate order_separation_certificate(const Action& action,
                                         const SearchBounds& bounds,
                                         const InvariantContent& mu,
                                         const TypeElement& left,
                                         const TypeElement& right) {
  const SftSpace& space = *action.space;
  Certificate c = certificate_for_measure(action, bounds, mu, kMassOne);
  c.statement.push_back("claim separates-order");
  c.statement.push_back("left " + type_literal(space, left));
  c.statement.push_back("right " + type_literal(space, right));
  return c;
}

CmdOut cmd_check_subequiv(const Action& action, const ClopenSet& from,
                          const ClopenSet& to, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "check-subequiv";
  o.report.lines.push_back("from " + clopen_literal(space, from));
  o.report.lines.push_back("to " + clopen_literal(space, to));
  SubequivalenceOutcome out = search_subequivalence(action, from, to, bounds);
  switch (out.status) {
    case SearchStatus::Found:
      o.report.lines.push_back("status established");
      o.report.lines.push_back("pieces " + std::to_string(out.scheme.pieces.size()));
      o.report.certificates.push_back(certificate_for_scheme(action, bounds, out.scheme));
      o.code = kExitEstablished;
      break;
    case SearchStatus::Refuted:
      o.report.lines.push_back("status refuted");
      o.report.lines.push_back("note " + out.note);
      o.report.certificates.push_back(
          separation_certificate(action, bounds, *out.refutation, from, to));
      o.code = kExitRefuted;
      break;
    case SearchStatus::NotFound:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back("note " + out.note);
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_check_paradoxical(const Action& action, const ClopenSet& set,
                             const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "check-paradoxical";
  o.report.lines.push_back("set " + clopen_literal(space, set));
  ParadoxicalOutcome out = check_paradoxical(action, set, bounds);
  switch (out.status) {
    case SearchStatus::Found:
      o.report.lines.push_back("status established");
      o.report.certificates.push_back(
          certificate_for_paradoxical(action, bounds, *out.witness));
      o.code = kExitEstablished;
      break;
    case SearchStatus::Refuted: {
      o.report.lines.push_back("status refuted");
      o.report.lines.push_back("note " + out.note);
      Certificate c =
          certificate_for_measure(action, bounds, *out.refutation, one_terms(set));
      c.statement.push_back("claim refutes-paradoxical");
      c.statement.push_back("set " + clopen_literal(space, set));
      o.report.certificates.push_back(std::move(c));
      o.code = kExitRefuted;
      break;
    }
    case SearchStatus::NotFound:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back("note " + out.note);
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_check_weak_paradoxical(const Action& action, const ClopenSet& from,
                                  const ClopenSet& to, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "check-weak-paradoxical";
  o.report.lines.push_back("from " + clopen_literal(space, from));
  o.report.lines.push_back("to " + clopen_literal(space, to));
  WeakParadoxicalOutcome out = check_weak_paradoxical(action, from, to, bounds);
  switch (out.status) {
    case WeakParadoxicalStatus::Found:
      o.report.lines.push_back("status established");
      for (const GroupWord& w : out.cover_words)
        o.report.lines.push_back("cover " + word_literal(action, w));
      o.report.certificates.push_back(certificate_for_scheme(action, bounds, *out.scheme));
      o.code = kExitEstablished;
      break;
    case WeakParadoxicalStatus::NotCovered:
      o.report.lines.push_back("status refuted");
      o.report.lines.push_back("note " + out.note);
      o.report.lines.push_back("saturation " + clopen_literal(space, out.saturation));
      o.code = kExitRefuted;
      break;
    case WeakParadoxicalStatus::NotFound:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back("note " + out.note);
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_check_nfilling(const Action& action, int n, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (n < 1) throw BadParams("n-filling needs n >= 1");
  CmdOut o;
  o.report.title = "check-nfilling";
  NFillingReport rep = check_n_filling(action, n, bounds.depth, bounds);
  size_t pass = 0, fail = 0, open = 0;
  for (const auto& e : rep.entries) {
    if (e.status == CheckStatus::Pass) ++pass;
    else if (e.status == CheckStatus::Fail) ++fail;
    else ++open;
  }
  o.report.lines.push_back("n " + std::to_string(rep.n));
  o.report.lines.push_back("depth " + std::to_string(rep.depth));
  o.report.lines.push_back("tuples " + std::to_string(rep.entries.size()) + " pass " +
                           std::to_string(pass) + " fail " + std::to_string(fail) +
                           " inconclusive " + std::to_string(open));
  if (!rep.note.empty()) o.report.lines.push_back("note " + rep.note);
  for (const auto& e : rep.entries) {
    if (e.status == CheckStatus::Pass) continue;
    std::string cyls;
    for (const Word& w : e.tuple) {
      if (!cyls.empty()) cyls += ';';
      cyls += "[" + word_to_string(space, w) + "]";
    }
    o.report.lines.push_back(
        "tuple " + cyls +
        (e.status == CheckStatus::Fail ? " fail" : " inconclusive"));
    if (e.obstruction) {
      Certificate c = certificate_for_measure(action, bounds, *e.obstruction, kMassOne);
      c.statement.push_back("claim cover-deficient");
      c.statement.push_back("sets " + std::to_string(e.tuple.size()));
      for (const Word& w : e.tuple)
        c.statement.push_back(
            "set " + clopen_literal(space, clopen_cylinder(space, w)));
      o.report.certificates.push_back(std::move(c));
    }
  }
  switch (rep.status) {
    case CheckStatus::Pass:
      o.report.lines.push_back("status established");
      o.code = kExitEstablished;
      break;
    case CheckStatus::Fail:
      o.report.lines.push_back("status refuted");
      o.code = kExitRefuted;
      break;
    case CheckStatus::Inconclusive:
      o.report.lines.push_back("status inconclusive");
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_check_strong_boundary(const Action& action, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "check-strong-boundary";
  StrongBoundaryReport rep = check_strong_boundary(action, bounds.depth, bounds);
  o.report.lines.push_back("depth " + std::to_string(rep.depth));
  o.report.lines.push_back("pairs " + std::to_string(rep.entries.size()));
  if (!rep.note.empty()) o.report.lines.push_back("note " + rep.note);
  for (const auto& e : rep.entries) {
    switch (e.status) {
      case CheckStatus::Pass: {
        o.report.lines.push_back("pair " + clopen_literal(space, e.f) + " into " +
                                 clopen_literal(space, e.o) + " word " +
                                 word_literal(action, e.word));
        SubequivalenceScheme s;
        s.source = e.f;
        s.target = e.o;
        for (const Word& c : e.f.cylinders) s.pieces.push_back({c, e.word});
        o.report.certificates.push_back(certificate_for_scheme(action, bounds, s));
        break;
      }
      case CheckStatus::Fail:
        o.report.lines.push_back("pair " + clopen_literal(space, e.f) + " into " +
                                 clopen_literal(space, e.o) + " fail");
        if (e.obstruction)
          o.report.certificates.push_back(
              separation_certificate(action, bounds, *e.obstruction, e.f, e.o));
        break;
      case CheckStatus::Inconclusive:
        o.report.lines.push_back("pair " + clopen_literal(space, e.f) + " into " +
                                 clopen_literal(space, e.o) + " inconclusive");
        break;
    }
  }
  switch (rep.status) {
    case CheckStatus::Pass:
      o.report.lines.push_back("status established");
      o.code = kExitEstablished;
      break;
    case CheckStatus::Fail:
      o.report.lines.push_back("status refuted");
      o.code = kExitRefuted;
      break;
    case CheckStatus::Inconclusive:
      o.report.lines.push_back("status inconclusive");
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_find_tower(const Action& action, const ClopenSet& set,
                      const std::vector<GroupWord>& words, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "find-tower";
  o.report.lines.push_back("set " + clopen_literal(space, set));
  o.report.lines.push_back("candidates " + std::to_string(words.size()));
  TowerOutcome out = find_open_tower(action, words, set, bounds);
  if (out.status == SearchStatus::Found) {
    o.report.lines.push_back("status established");
    o.report.lines.push_back("words " + std::to_string(out.witness->words.size()));
    o.report.lines.push_back("base " + clopen_literal(space, out.witness->base));
    o.report.certificates.push_back(
        certificate_for_tower(action, bounds, words, *out.witness));
    o.code = kExitEstablished;
  } else {
    o.report.lines.push_back("status inconclusive");
    o.report.lines.push_back("note " + out.note);
    o.code = kExitInconclusive;
  }
  return o;
}

CmdOut cmd_find_invariant_measure(const Action& action, const SearchBounds& bounds) {
  CmdOut o;
  o.report.title = "find-invariant-measure";
  o.report.lines.push_back("depth " + std::to_string(bounds.depth));
  LpOutcome out = invariant_probability_measure(action, bounds.depth);
  if (out.feasible) {
    o.report.lines.push_back("status established");
    o.report.certificates.push_back(
        certificate_for_measure(action, bounds, out.content, kMassOne));
    o.code = kExitEstablished;
  } else {
    o.report.lines.push_back("status refuted");
    o.report.certificates.push_back(
        certificate_for_infeasibility(action, bounds, out.certificate, kMassOne));
    o.code = kExitRefuted;
  }
  return o;
}

CmdOut cmd_find_normalized_content(const Action& action, const ClopenSet& set,
                                   const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "find-normalized-content";
  o.report.lines.push_back("set " + clopen_literal(space, set));
  o.report.lines.push_back("depth " + std::to_string(bounds.depth));
  LpOutcome out = invariant_content_normalized(action, set, bounds.depth);
  Normalization norm = one_terms(set);
  if (out.feasible) {
    o.report.lines.push_back("status established");
    o.report.certificates.push_back(
        certificate_for_measure(action, bounds, out.content, norm));
    o.code = kExitEstablished;
  } else {
    o.report.lines.push_back("status refuted");
    o.report.certificates.push_back(
        certificate_for_infeasibility(action, bounds, out.certificate, norm));
    o.code = kExitRefuted;
  }
  return o;
}

CmdOut cmd_semigroup_order(const Action& action, const TypeElement& f,
                           const TypeElement& g, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "semigroup-order";
  o.report.lines.push_back("left " + type_literal(space, f));
  o.report.lines.push_back("right " + type_literal(space, g));
  OrderOutcome out = search_order(action, f, g, bounds);
  switch (out.status) {
    case SearchStatus::Found:
      o.report.lines.push_back("status established");
      o.report.lines.push_back("parts " + std::to_string(out.witness.parts.size()));
      o.report.certificates.push_back(
          certificate_for_order(action, bounds, f, g, out.witness));
      o.code = kExitEstablished;
      break;
    case SearchStatus::Refuted:
      o.report.lines.push_back("status refuted");
      o.report.lines.push_back("note " + out.note);
      o.report.certificates.push_back(
          order_separation_certificate(action, bounds, *out.refutation, f, g));
      o.code = kExitRefuted;
      break;
    case SearchStatus::NotFound:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back("note " + out.note);
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_semigroup_purely_infinite(const Action& action, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  CmdOut o;
  o.report.title = "semigroup-purely-infinite";
  PurelyInfiniteReport rep = check_purely_infinite_fragment(action, bounds.depth, bounds);
  o.report.lines.push_back("depth " + std::to_string(bounds.depth));
  o.report.lines.push_back("elements " + std::to_string(rep.entries.size()));
  for (const auto& e : rep.entries) {
    TypeElement doubled = scale(space, e.element, 2);
    switch (e.status) {
      case SearchStatus::Found:
        o.report.lines.push_back("element " + type_literal(space, e.element) +
                                 " established");
        o.report.certificates.push_back(
            certificate_for_order(action, bounds, doubled, e.element, e.witness));
        break;
      case SearchStatus::Refuted:
        o.report.lines.push_back("element " + type_literal(space, e.element) +
                                 " refuted");
        if (e.refutation)
          o.report.certificates.push_back(order_separation_certificate(
              action, bounds, *e.refutation, doubled, e.element));
        break;
      case SearchStatus::NotFound:
        o.report.lines.push_back("element " + type_literal(space, e.element) +
                                 " inconclusive");
        break;
    }
  }
  if (rep.all_verified) {
    o.report.lines.push_back("status established");
    o.code = kExitEstablished;
  } else if (rep.any_refuted) {
    o.report.lines.push_back("status refuted");
    o.code = kExitRefuted;
  } else {
    o.report.lines.push_back("status inconclusive");
    o.code = kExitInconclusive;
  }
  return o;
}

CmdOut cmd_semigroup_unperforation(const Action& action, const TypeElement& f,
                                   const TypeElement& g, int n,
                                   const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (n < 1) throw BadParams("unperforation needs n >= 1");
  CmdOut o;
  o.report.title = "semigroup-unperforation";
  o.report.lines.push_back("left " + type_literal(space, f));
  o.report.lines.push_back("right " + type_literal(space, g));
  o.report.lines.push_back("n " + std::to_string(n));
  UnperforationReport rep =
      check_almost_unperforation_instances(action, {{f, g, n}}, bounds);
  const UnperforationEntry& e = rep.entries.at(0);
  TypeElement premise_left = scale(space, f, n + 1);
  TypeElement premise_right = scale(space, g, n);
  switch (e.status) {
    case UnperforationStatus::Completed:
      o.report.lines.push_back("status established");
      o.report.certificates.push_back(certificate_for_order(
          action, bounds, premise_left, premise_right, e.premise));
      o.report.certificates.push_back(
          certificate_for_order(action, bounds, f, g, e.conclusion));
      o.code = kExitEstablished;
      break;
    case UnperforationStatus::PremiseRefuted: {
      o.report.lines.push_back("status established");
      o.report.lines.push_back("note vacuous: an invariant content refutes the premise");
      OrderOutcome premise =
          search_order(action, premise_left, premise_right, bounds);
      if (premise.status == SearchStatus::Refuted && premise.refutation)
        o.report.certificates.push_back(order_separation_certificate(
            action, bounds, *premise.refutation, premise_left, premise_right));
      o.code = kExitEstablished;
      break;
    }
    case UnperforationStatus::PremiseNotFound:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back("note premise not established within bounds");
      o.code = kExitInconclusive;
      break;
    case UnperforationStatus::Inconclusive:
      o.report.lines.push_back("status inconclusive");
      o.report.lines.push_back(
          "note premise holds; conclusion not found within bounds");
      o.code = kExitInconclusive;
      break;
  }
  return o;
}

CmdOut cmd_scaling_element(const Action& action, const ClopenSet& from,
                           const ClopenSet& to, const std::string& guard_f_text,
                           const std::string& guard_u_text, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (guard_f_text.empty() != guard_u_text.empty())
    throw BadParams("either give both --guard-f and --guard-u or neither");
  CmdOut o;
  o.report.title = "scaling-element";
  o.report.lines.push_back("from " + clopen_literal(space, from));
  o.report.lines.push_back("to " + clopen_literal(space, to));
  SubequivalenceOutcome out = search_subequivalence(action, from, to, bounds);
  if (out.status == SearchStatus::Refuted) {
    o.report.lines.push_back("status refuted");
    o.report.lines.push_back("note " + out.note);
    o.report.certificates.push_back(
        separation_certificate(action, bounds, *out.refutation, from, to));
    o.code = kExitRefuted;
    return o;
  }
  if (out.status == SearchStatus::NotFound) {
    o.report.lines.push_back("status inconclusive");
    o.report.lines.push_back("note " + out.note);
    o.code = kExitInconclusive;
    return o;
  }

  ScalingGuards guards;
  if (!guard_f_text.empty()) {
    guards.f = parse_clopen_literal(action, guard_f_text);
    guards.u = parse_clopen_literal(action, guard_u_text);
  } else {
    ClopenSet image_union = clopen_empty(space);
    for (const SchemePiece& p : out.scheme.pieces)
      image_union = clopen_union(
          space, image_union,
          apply_word(action, p.word, clopen_cylinder(space, p.piece)));
    guards.u = image_union;
    guards.f = clopen_difference(space, out.scheme.source, image_union);
  }
  o.report.lines.push_back("guard-f " + clopen_literal(space, guards.f));
  o.report.lines.push_back("guard-u " + clopen_literal(space, guards.u));

  try {
    scaling_element_from_scheme(action, out.scheme, guards);
  } catch (const Error& e) {
    o.report.lines.push_back("status inconclusive");
    o.report.lines.push_back(std::string("note ") + e.what());
    o.code = kExitInconclusive;
    return o;
  }
  o.report.lines.push_back("status established");
  o.report.certificates.push_back(
      certificate_for_scaling(action, bounds, out.scheme, guards));
  o.report.certificates.push_back(
      certificate_for_isometry(action, bounds, out.scheme, guards));
  o.code = kExitEstablished;
  return o;
}

}  // namespace

ActionPtr resolve_action(const std::string& builtin, const std::string& action_file) {
  if (builtin.empty() == action_file.empty())
    throw BadParams("exactly one of --builtin or --action is required");
  if (!builtin.empty()) return builtin_action(builtin);
  return parse_action_file(action_file);
}

RunResult verify_certificate_text(const std::string& text) {
  RunResult r;
  std::vector<Certificate> certs;
  try {
    if (looks_like_report(text)) {
      certs = read_report(text).certificates;
    } else {
      certs.push_back(read_certificate(text));
    }
  } catch (const Error& e) {
    r.exit_code = kExitInputError;
    r.err = std::string(e.what()) + "\n";
    return r;
  }
  bool all = true;
  std::string out;
  for (const Certificate& cert : certs) {
    Replay rep = replay_certificate(cert);
    out += (rep.pass ? "verified " : "FAILED ") + certificate_kind_name(cert.kind);
    if (!rep.pass) out += ": " + rep.why;
    out += "\n";
    all = all && rep.pass;
  }
  if (certs.empty()) out += "no certificates\n";
  r.exit_code = all ? kExitEstablished : kExitRefuted;
  r.out = out;
  return r;
}

RunResult run_command(const std::vector<std::string>& args) {
  RunResult r;

  CLI::App app{"verification and witness search for group actions on Cantor-type shift spaces"};
  app.name("cantordyn");
  app.require_subcommand(1);

  std::string builtin, action_file;
  SearchBounds bounds;
  std::string set_text = "[]", from_text, to_text, left_text, right_text;
  std::string guard_f_text, guard_u_text, file_path;
  std::vector<std::string> word_texts;
  int n_filling = 2, n_perforation = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--builtin", builtin, "builtin action name");
    sub->add_option("--action", action_file, "action definition file");
    sub->add_option("--depth", bounds.depth, "cylinder depth bound");
    sub->add_option("--word-length", bounds.word_length, "group word length bound");
    sub->add_option("--node-budget", bounds.node_budget, "search node budget");
    return sub;
  };

  auto* c_sub = add_common(app.add_subcommand(
      "check-subequiv", "search or refute a subequivalence between clopen sets"));
  c_sub->add_option("--from", from_text, "source clopen literal")->required();
  c_sub->add_option("--to", to_text, "target clopen literal")->required();

  auto* c_par = add_common(app.add_subcommand(
      "check-paradoxical", "search or refute a paradoxical decomposition"));
  c_par->add_option("--set", set_text, "clopen literal")->required();

  auto* c_weak = add_common(app.add_subcommand(
      "check-weak-paradoxical", "subequivalence through a translate cover"));
  c_weak->add_option("--from", from_text, "source clopen literal")->required();
  c_weak->add_option("--to", to_text, "target clopen literal")->required();

  auto* c_nfill = add_common(app.add_subcommand(
      "check-nfilling", "n-filling over depth-bounded cylinder tuples"));
  c_nfill->add_option("--n", n_filling, "tuple size")->required();

  add_common(app.add_subcommand(
      "check-strong-boundary", "single-word compression for all maximal pairs"));

  auto* c_tower = add_common(app.add_subcommand(
      "find-tower", "open tower with pairwise disjoint translates"));
  c_tower->add_option("--set", set_text, "clopen literal to seed the base");
  c_tower->add_option("--word", word_texts, "candidate group word (repeatable)");

  add_common(app.add_subcommand("find-invariant-measure",
                                "invariant probability content at fixed depth"));

  auto* c_norm = add_common(app.add_subcommand(
      "find-normalized-content", "invariant content normalized on a clopen set"));
  c_norm->add_option("--set", set_text, "clopen literal")->required();

  auto* c_order = add_common(app.add_subcommand(
      "semigroup-order", "type-semigroup order witness between two elements"));
  c_order->add_option("--left", left_text, "type literal")->required();
  c_order->add_option("--right", right_text, "type literal")->required();

  add_common(app.add_subcommand(
      "semigroup-purely-infinite", "2[f] <= [f] over a depth fragment"));

  auto* c_unperf = add_common(app.add_subcommand(
      "semigroup-unperforation", "(n+1)[f] <= n[g] implies [f] <= [g]"));
  c_unperf->add_option("--left", left_text, "type literal")->required();
  c_unperf->add_option("--right", right_text, "type literal")->required();
  c_unperf->add_option("--n", n_perforation, "perforation degree");

  auto* c_scaling = add_common(app.add_subcommand(
      "scaling-element", "scaling element and isometry from a found scheme"));
  c_scaling->add_option("--from", from_text, "source clopen literal")->required();
  c_scaling->add_option("--to", to_text, "target clopen literal")->required();
  c_scaling->add_option("--guard-f", guard_f_text, "guard region clopen literal");
  c_scaling->add_option("--guard-u", guard_u_text, "guard neighborhood clopen literal");

  auto* c_verify = app.add_subcommand(
      "verify", "replay a certificate or report through the exact verifiers");
  c_verify->add_option("file", file_path, "certificate or report file")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    r.exit_code = kExitEstablished;
    r.out = app.help();
    return r;
  } catch (const CLI::ParseError& e) {
    r.exit_code = kExitUsage;
    r.err = std::string(e.what()) + "\n";
    return r;
  }

  CLI::App* sub = app.get_subcommands().at(0);
  const std::string cmd = sub->get_name();

  try {
    if (cmd == "verify") {
      std::ifstream in(file_path, std::ios::binary);
      if (!in) {
        r.exit_code = kExitInputError;
        r.err = "cannot read file '" + file_path + "'\n";
        return r;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      return verify_certificate_text(buf.str());
    }

    ActionPtr action = resolve_action(builtin, action_file);
    CmdOut o;
    if (cmd == "check-subequiv") {
      o = cmd_check_subequiv(*action, parse_clopen_literal(*action, from_text),
                             parse_clopen_literal(*action, to_text), bounds);
    } else if (cmd == "check-paradoxical") {
      o = cmd_check_paradoxical(*action, parse_clopen_literal(*action, set_text),
                                bounds);
    } else if (cmd == "check-weak-paradoxical") {
      o = cmd_check_weak_paradoxical(*action, parse_clopen_literal(*action, from_text),
                                     parse_clopen_literal(*action, to_text), bounds);
    } else if (cmd == "check-nfilling") {
      o = cmd_check_nfilling(*action, n_filling, bounds);
    } else if (cmd == "check-strong-boundary") {
      o = cmd_check_strong_boundary(*action, bounds);
    } else if (cmd == "find-tower") {
      std::vector<GroupWord> words;
      if (word_texts.empty()) {
        for (int g = 0; g < static_cast<int>(action->generators.size()); ++g)
          words.push_back({{g, 1}});
      } else {
        for (const std::string& t : word_texts)
          words.push_back(parse_word_literal(*action, t));
      }
      o = cmd_find_tower(*action, parse_clopen_literal(*action, set_text), words,
                         bounds);
    } else if (cmd == "find-invariant-measure") {
      o = cmd_find_invariant_measure(*action, bounds);
    } else if (cmd == "find-normalized-content") {
      o = cmd_find_normalized_content(*action, parse_clopen_literal(*action, set_text),
                                      bounds);
    } else if (cmd == "semigroup-order") {
      o = cmd_semigroup_order(*action, parse_type_literal(*action, left_text),
                              parse_type_literal(*action, right_text), bounds);
    } else if (cmd == "semigroup-purely-infinite") {
      o = cmd_semigroup_purely_infinite(*action, bounds);
    } else if (cmd == "semigroup-unperforation") {
      o = cmd_semigroup_unperforation(*action, parse_type_literal(*action, left_text),
                                      parse_type_literal(*action, right_text),
                                      n_perforation, bounds);
    } else if (cmd == "scaling-element") {
      o = cmd_scaling_element(*action, parse_clopen_literal(*action, from_text),
                              parse_clopen_literal(*action, to_text), guard_f_text,
                              guard_u_text, bounds);
    } else {
      r.exit_code = kExitUsage;
      r.err = "unknown command '" + cmd + "'\n";
      return r;
    }
    r.exit_code = o.code;
    r.out = write_report(o.report);
    return r;
  } catch (const BadParams& e) {
    r.exit_code = kExitUsage;
    r.err = std::string(e.what()) + "\n";
    return r;
  } catch (const DepthTooSmall& e) {
    r.exit_code = kExitUsage;
    r.err = std::string(e.what()) + "\n";
    return r;
  } catch (const Error& e) {
    r.exit_code = kExitInputError;
    r.err = std::string(e.what()) + "\n";
    return r;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  RunResult r = run_command(args);
  if (!r.out.empty()) std::fwrite(r.out.data(), 1, r.out.size(), stdout);
  if (!r.err.empty()) std::fwrite(r.err.data(), 1, r.err.size(), stderr);
  return r.exit_code;
}

}  // namespace cantordyn
