#include "cantordyn/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "cantordyn/errors.hpp"

namespace cantordyn {

namespace {

using Int = boost::multiprecision::mpz_int;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// One token with its 1-based starting column.
struct Tok {
  std::string text;
  int col = 1;
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

bool all_single_char(const std::vector<std::string>& names) {
  for (const auto& n : names)
    if (n.size() != 1) return false;
  return true;
}

int exact_letter(const std::vector<std::string>& letters, const std::string& name) {
  for (size_t i = 0; i < letters.size(); ++i)
    if (letters[i] == name) return static_cast<int>(i);
  return -1;
}

// Greedy longest-match decomposition of a token into letter indices.
std::optional<Word> decode_letter_run(const std::vector<std::string>& letters,
                                      const std::string& tok) {
  Word out;
  size_t pos = 0;
  while (pos < tok.size()) {
    int best = -1;
    size_t best_len = 0;
    for (size_t i = 0; i < letters.size(); ++i) {
      const std::string& n = letters[i];
      if (n.size() > best_len && tok.compare(pos, n.size(), n) == 0) {
        best = static_cast<int>(i);
        best_len = n.size();
      }
    }
    if (best < 0) return std::nullopt;
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

// A word spelled as one or more whitespace-separated tokens ("." = empty).
Word decode_word_tokens(const std::vector<std::string>& letters,
                        const std::vector<Tok>& toks, size_t begin, size_t end,
                        int line_no) {
  if (begin < end && toks[begin].text == "." && end - begin == 1) return {};
  Word out;
  for (size_t i = begin; i < end; ++i) {
    auto run = decode_letter_run(letters, toks[i].text);
    if (!run)
      throw SemanticError("line " + std::to_string(line_no) + ": unknown letter in '" +
                          toks[i].text + "'");
    out.insert(out.end(), run->begin(), run->end());
  }
  return out;
}

std::string render_word(const std::vector<std::string>& letters, const Word& w) {
  if (w.empty()) return ".";
  std::string out;
  bool single = all_single_char(letters);
  for (size_t i = 0; i < w.size(); ++i) {
    if (i > 0 && !single) out += ' ';
    out += letters[w[i]];
  }
  return out;
}

// Cylinder rendering inside brackets: same as render_word but empty stays "".
std::string render_cylinder(const std::vector<std::string>& letters, const Word& w) {
  if (w.empty()) return "";
  return render_word(letters, w);
}

Word parse_cylinder_text(const std::vector<std::string>& letters,
                         const std::string& inside, const std::string& context) {
  std::string body = trim(inside);
  if (body.empty()) return {};
  Word out;
  for (const Tok& t : tokenize(body)) {
    auto run = decode_letter_run(letters, t.text);
    if (!run)
      throw SemanticError("unknown letter in '" + t.text + "' (" + context + ")");
    out.insert(out.end(), run->begin(), run->end());
  }
  return out;
}

// "[...]": returns the inside text. Throws when the brackets are malformed.
std::string strip_brackets(const std::string& text, const std::string& context) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw SemanticError("expected a bracketed cylinder in " + context + ", got '" +
                        text + "'");
  return s.substr(1, s.size() - 2);
}

long long parse_integer(const std::string& tok, const std::string& context) {
  if (tok.empty()) throw SemanticError("missing integer in " + context);
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

Rational parse_rational(const std::string& tok, const std::string& context) {
  // "p" or "p/q", q > 0.
  if (tok.empty()) throw SemanticError("missing rational in " + context);
  size_t slash = tok.find('/');
  try {
    if (slash == std::string::npos) return Rational(Int(tok));
    Int num(tok.substr(0, slash));
    Int den(tok.substr(slash + 1));
    if (den <= 0) throw SemanticError("nonpositive denominator in " + context);
    return Rational(num, den);
  } catch (const SemanticError&) {
    throw;
  } catch (const std::exception&) {
    throw SemanticError("bad rational '" + tok + "' in " + context);
  }
}

std::string rational_str(const Rational& q) { return q.str(); }

// -- action-format parsing ----------------------------------------------------

struct SourceLine {
  int number = 1;
  std::vector<Tok> toks;
};

std::vector<SourceLine> lex_action(const std::string& text) {
  std::vector<SourceLine> out;
  int n = 0;
  for (const std::string& raw : split_lines(text)) {
    ++n;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = tokenize(line);
    if (!toks.empty()) out.push_back({n, std::move(toks)});
  }
  return out;
}

}  // namespace

ActionPtr parse_action_text(const std::string& text) {
  auto lines = lex_action(text);
  if (lines.empty()) throw SyntaxError(1, 1, "empty action description");

  std::vector<std::string> letters;
  bool have_letters = false;
  std::vector<std::pair<int, int>> forbids;
  std::optional<std::vector<uint8_t>> initial;
  std::vector<std::string> gen_names;
  std::vector<std::vector<ExchangeRule>> gen_rules;
  std::string builtin_name;
  int builtin_line = 0;
  int other_line = 0;

  auto gen_slot = [&](const std::string& name) -> std::vector<ExchangeRule>& {
    for (size_t i = 0; i < gen_names.size(); ++i)
      if (gen_names[i] == name) return gen_rules[i];
    gen_names.push_back(name);
    gen_rules.emplace_back();
    return gen_rules.back();
  };

  for (const SourceLine& ln : lines) {
    const auto& t = ln.toks;
    const std::string& head = t[0].text;
    if (head == "builtin") {
      if (t.size() != 3 || t[1].text != "=")
        throw SyntaxError(ln.number, t[0].col, "expected 'builtin = <name>'");
      if (!builtin_name.empty())
        throw SyntaxError(ln.number, t[0].col, "duplicate builtin directive");
      builtin_name = t[2].text;
      builtin_line = ln.number;
    } else if (head == "space") {
      other_line = other_line ? other_line : ln.number;
      if (t.size() < 2)
        throw SyntaxError(ln.number, t[0].col, "expected 'space letters|forbid|initial'");
      const std::string& what = t[1].text;
      if (what == "letters") {
        if (have_letters)
          throw SyntaxError(ln.number, t[1].col, "duplicate letters directive");
        if (t.size() < 3)
          throw SyntaxError(ln.number, t[1].col, "letters directive names no letters");
        for (size_t i = 2; i < t.size(); ++i) {
          if (exact_letter(letters, t[i].text) >= 0)
            throw SemanticError("line " + std::to_string(ln.number) +
                                ": duplicate letter name '" + t[i].text + "'");
          letters.push_back(t[i].text);
        }
        have_letters = true;
      } else if (what == "forbid") {
        if (!have_letters)
          throw SyntaxError(ln.number, t[0].col, "letters must be declared before forbid");
        if (t.size() < 3)
          throw SyntaxError(ln.number, t[1].col, "forbid directive names no pairs");
        // Two tokens that are both exact letter names form one pair; otherwise
        // each token must decompose into exactly two letters.
        if (t.size() == 4 && exact_letter(letters, t[2].text) >= 0 &&
            exact_letter(letters, t[3].text) >= 0) {
          forbids.emplace_back(exact_letter(letters, t[2].text),
                               exact_letter(letters, t[3].text));
        } else {
          for (size_t i = 2; i < t.size(); ++i) {
            auto run = decode_letter_run(letters, t[i].text);
            if (!run)
              throw SemanticError("line " + std::to_string(ln.number) +
                                  ": unknown letter in '" + t[i].text + "'");
            if (run->size() != 2)
              throw SemanticError("line " + std::to_string(ln.number) +
                                  ": forbidden pair '" + t[i].text +
                                  "' must have exactly two letters");
            forbids.emplace_back((*run)[0], (*run)[1]);
          }
        }
      } else if (what == "initial") {
        if (!have_letters)
          throw SyntaxError(ln.number, t[0].col, "letters must be declared before initial");
        if (initial)
          throw SyntaxError(ln.number, t[1].col, "duplicate initial directive");
        if (t.size() < 3)
          throw SyntaxError(ln.number, t[1].col, "initial directive names no letters");
        std::vector<uint8_t> init(letters.size(), 0);
        for (size_t i = 2; i < t.size(); ++i) {
          int idx = exact_letter(letters, t[i].text);
          if (idx < 0)
            throw SemanticError("line " + std::to_string(ln.number) +
                                ": unknown letter '" + t[i].text + "'");
          init[idx] = 1;
        }
        initial = std::move(init);
      } else {
        throw SyntaxError(ln.number, t[1].col, "unknown space directive '" + what + "'");
      }
    } else if (head == "gen") {
      other_line = other_line ? other_line : ln.number;
      if (!have_letters)
        throw SyntaxError(ln.number, t[0].col, "letters must be declared before gen");
      if (t.size() < 4 || t[2].text != "rule")
        throw SyntaxError(ln.number, t[0].col,
                          "expected 'gen <name> rule <from> -> <to>'");
      size_t arrow = 0;
      for (size_t i = 3; i < t.size(); ++i)
        if (t[i].text == "->") {
          arrow = i;
          break;
        }
      if (arrow == 0 || arrow == 3 || arrow + 1 >= t.size())
        throw SyntaxError(ln.number, t[0].col,
                          "expected 'gen <name> rule <from> -> <to>'");
      Word from = decode_word_tokens(letters, t, 3, arrow, ln.number);
      Word to = decode_word_tokens(letters, t, arrow + 1, t.size(), ln.number);
      gen_slot(t[1].text).push_back({std::move(from), std::move(to)});
    } else {
      throw SyntaxError(ln.number, t[0].col, "unknown directive '" + head + "'");
    }
  }

  if (!builtin_name.empty()) {
    if (other_line)
      throw SyntaxError(builtin_line, 1,
                        "builtin actions take no further directives");
    try {
      return builtin_action(builtin_name);
    } catch (const Error& e) {
      throw SemanticError(e.what());
    }
  }
  if (!have_letters) throw SyntaxError(1, 1, "missing space letters directive");
  if (gen_names.empty()) throw SemanticError("action declares no generators");

  size_t k = letters.size();
  std::vector<std::vector<uint8_t>> transitions(k, std::vector<uint8_t>(k, 1));
  for (auto [i, j] : forbids) transitions[i][j] = 0;
  std::vector<uint8_t> init = initial ? *initial : std::vector<uint8_t>(k, 1);

  try {
    SpacePtr space = validate_space(letters, transitions, init);
    std::vector<PrefixExchange> gens;
    gens.reserve(gen_rules.size());
    for (auto& rules : gen_rules) gens.push_back(validate_exchange(space, rules));
    return make_action(space, gen_names, std::move(gens));
  } catch (const SemanticError&) {
    throw;
  } catch (const Error& e) {
    throw SemanticError(e.what());
  }
}

ActionPtr parse_action_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read action file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_action_text(buf.str());
}

std::string serialize_action(const Action& action) {
  const SftSpace& space = *action.space;
  const auto& letters = space.letters;
  bool single = all_single_char(letters);
  std::string out = "space letters";
  for (const auto& n : letters) out += " " + n;
  out += "\n";

  std::vector<std::pair<int, int>> forbids;
  for (int i = 0; i < space.k(); ++i)
    for (int j = 0; j < space.k(); ++j)
      if (!space.transitions[i][j]) forbids.emplace_back(i, j);
  if (!forbids.empty()) {
    if (single) {
      out += "space forbid";
      for (auto [i, j] : forbids) out += " " + letters[i] + letters[j];
      out += "\n";
    } else {
      for (auto [i, j] : forbids)
        out += "space forbid " + letters[i] + " " + letters[j] + "\n";
    }
  }

  out += "space initial";
  for (int i : space.initial_letters) out += " " + letters[i];
  out += "\n";

  for (size_t g = 0; g < action.names.size(); ++g)
    for (const ExchangeRule& r : action.generators[g].rules)
      out += "gen " + action.names[g] + " rule " + render_word(letters, r.from) +
             " -> " + render_word(letters, r.to) + "\n";
  return out;
}

uint64_t fnv1a64_hash(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string action_hash_string(const Action& action) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64_hash(serialize_action(action))));
  return std::string("fnv1a64:") + buf;
}

ClopenSet parse_clopen_literal(const Action& action, const std::string& text) {
  const SftSpace& space = *action.space;
  std::string s = trim(text);
  if (s.empty()) throw SemanticError("empty clopen literal");
  if (s == "{}") return clopen_empty(space);
  std::vector<Word> words;
  for (const std::string& part : split_on(s, '|')) {
    std::string inside = strip_brackets(part, "clopen literal '" + text + "'");
    words.push_back(parse_cylinder_text(space.letters, inside,
                                        "clopen literal '" + text + "'"));
  }
  return canonicalize(space, words);
}

std::string clopen_literal(const SftSpace& space, const ClopenSet& a) {
  if (a.cylinders.empty()) return "{}";
  std::string out;
  for (size_t i = 0; i < a.cylinders.size(); ++i) {
    if (i > 0) out += '|';
    out += "[" + render_cylinder(space.letters, a.cylinders[i]) + "]";
  }
  return out;
}

std::string word_literal(const Action& action, const GroupWord& w) {
  if (w.empty()) return "e";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out += '.';
    out += action.names[w[i].gen];
    if (w[i].exp < 0) out += '\'';
  }
  return out;
}

GroupWord parse_word_literal(const Action& action, const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) throw SemanticError("empty group-word literal");
  if (s == "e") return {};
  GroupWord out;
  for (const std::string& part : split_on(s, '.')) {
    if (part.empty())
      throw SemanticError("empty factor in group-word literal '" + text + "'");
    std::string name = part;
    int exp = 1;
    if (name.back() == '\'') {
      exp = -1;
      name.pop_back();
    }
    if (name.empty() || name.back() == '\'')
      throw SemanticError("bad factor '" + part + "' in group-word literal '" + text +
                          "'");
    try {
      out.push_back({action.gen_index(name), exp});
    } catch (const Error&) {
      throw SemanticError("unknown generator '" + name + "' in group-word literal '" +
                          text + "'");
    }
  }
  return out;
}

TypeElement parse_type_literal(const Action& action, const std::string& text) {
  const SftSpace& space = *action.space;
  std::string s = trim(text);
  if (s.empty()) throw SemanticError("empty type literal");
  if (s == "0") return type_zero(space);
  std::vector<std::pair<Word, int>> parts;
  for (const std::string& term : split_on(s, '+')) {
    std::string body = trim(term);
    if (body.empty()) throw SemanticError("empty term in type literal '" + text + "'");
    long long mult = 1;
    size_t star = body.find('*');
    if (star != std::string::npos) {
      mult = parse_integer(trim(body.substr(0, star)), "type literal '" + text + "'");
      body = trim(body.substr(star + 1));
    }
    std::string inside = strip_brackets(body, "type literal '" + text + "'");
    Word w =
        parse_cylinder_text(space.letters, inside, "type literal '" + text + "'");
    parts.emplace_back(std::move(w), static_cast<int>(mult));
  }
  try {
    return canonical_type_element(space, parts);
  } catch (const Error& e) {
    throw SemanticError(e.what());
  }
}

std::string type_literal(const SftSpace& space, const TypeElement& f) {
  if (f.is_zero()) return "0";
  std::string out;
  // Disjoint regions of constant value, highest value first.
  int n = static_cast<int>(f.levels.size());
  for (int v = n; v >= 1; --v) {
    ClopenSet region = (v == n)
                           ? f.levels[v - 1]
                           : clopen_difference(space, f.levels[v - 1], f.levels[v]);
    for (const Word& w : region.cylinders) {
      if (!out.empty()) out += '+';
      if (v > 1) out += std::to_string(v) + "*";
      out += "[" + render_cylinder(space.letters, w) + "]";
    }
  }
  return out;
}

std::string certificate_kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::Subequivalence: return "subequivalence";
    case CertificateKind::Paradoxical: return "paradoxical";
    case CertificateKind::Tower: return "tower";
    case CertificateKind::Order: return "order";
    case CertificateKind::Measure: return "measure";
    case CertificateKind::Infeasibility: return "infeasibility";
    case CertificateKind::Scaling: return "scaling";
    case CertificateKind::Isometry: return "isometry";
    case CertificateKind::Cuntz: return "cuntz";
  }
  return "unknown";
}

std::optional<CertificateKind> certificate_kind_from_name(const std::string& name) {
  static const std::pair<const char*, CertificateKind> table[] = {
      {"subequivalence", CertificateKind::Subequivalence},
      {"paradoxical", CertificateKind::Paradoxical},
      {"tower", CertificateKind::Tower},
      {"order", CertificateKind::Order},
      {"measure", CertificateKind::Measure},
      {"infeasibility", CertificateKind::Infeasibility},
      {"scaling", CertificateKind::Scaling},
      {"isometry", CertificateKind::Isometry},
      {"cuntz", CertificateKind::Cuntz},
  };
  for (const auto& [n, k] : table)
    if (name == n) return k;
  return std::nullopt;
}

namespace {

constexpr const char* kCertHeader = "cantordyn-certificate v1";
constexpr const char* kReportHeader = "cantordyn-report v1";

std::string bounds_line(const SearchBounds& b) {
  return "bounds depth " + std::to_string(b.depth) + " word-length " +
         std::to_string(b.word_length) + " node-budget " +
         std::to_string(b.node_budget);
}

SearchBounds parse_bounds_line(const std::string& line) {
  auto toks = tokenize(line);
  if (toks.size() != 7 || toks[0].text != "bounds" || toks[1].text != "depth" ||
      toks[3].text != "word-length" || toks[5].text != "node-budget")
    throw SemanticError("certificate: bad bounds line '" + line + "'");
  SearchBounds b;
  b.depth = static_cast<int>(parse_integer(toks[2].text, "bounds line"));
  b.word_length = static_cast<int>(parse_integer(toks[4].text, "bounds line"));
  b.node_budget = parse_integer(toks[6].text, "bounds line");
  return b;
}

// Reads lines[*i] which must equal `expect`; advances.
void expect_line(const std::vector<std::string>& lines, size_t* i,
                 const std::string& expect) {
  if (*i >= lines.size() || lines[*i] != expect)
    throw SemanticError("certificate: expected '" + expect + "' at line " +
                        std::to_string(*i + 1));
  ++*i;
}

std::vector<std::string> read_block(const std::vector<std::string>& lines, size_t* i,
                                    const std::string& name) {
  expect_line(lines, i, "begin " + name);
  std::vector<std::string> out;
  while (*i < lines.size() && lines[*i] != "end " + name) {
    out.push_back(lines[*i]);
    ++*i;
  }
  expect_line(lines, i, "end " + name);
  return out;
}

}  // namespace

std::string write_certificate(const Certificate& cert) {
  std::string out;
  out += kCertHeader;
  out += "\nkind " + certificate_kind_name(cert.kind);
  out += "\naction-hash " + cert.action_hash;
  out += "\n" + bounds_line(cert.bounds);
  out += "\nbegin action\n";
  out += cert.action_text;  // canonical text, '\n'-terminated
  out += "end action\nbegin statement\n";
  for (const auto& l : cert.statement) out += l + "\n";
  out += "end statement\nbegin data\n";
  for (const auto& l : cert.data) out += l + "\n";
  out += "end data\n";
  return out;
}

Certificate read_certificate(const std::string& text) {
  auto lines = split_lines(text);
  size_t i = 0;
  expect_line(lines, &i, kCertHeader);
  Certificate cert;

  if (i >= lines.size() || lines[i].rfind("kind ", 0) != 0)
    throw SemanticError("certificate: missing kind line");
  auto kind = certificate_kind_from_name(lines[i].substr(5));
  if (!kind)
    throw SemanticError("certificate: unknown kind '" + lines[i].substr(5) + "'");
  cert.kind = *kind;
  ++i;

  if (i >= lines.size() || lines[i].rfind("action-hash ", 0) != 0)
    throw SemanticError("certificate: missing action-hash line");
  cert.action_hash = lines[i].substr(12);
  ++i;

  if (i >= lines.size())
    throw SemanticError("certificate: missing bounds line");
  cert.bounds = parse_bounds_line(lines[i]);
  ++i;

  for (const std::string& l : read_block(lines, &i, "action"))
    cert.action_text += l + "\n";
  cert.statement = read_block(lines, &i, "statement");
  cert.data = read_block(lines, &i, "data");
  while (i < lines.size()) {
    if (!trim(lines[i]).empty())
      throw SemanticError("certificate: trailing content at line " +
                          std::to_string(i + 1));
    ++i;
  }
  return cert;
}

std::string write_report(const Report& report) {
  std::string out;
  out += kReportHeader;
  out += "\ntitle " + report.title;
  out += "\nlines " + std::to_string(report.lines.size()) + "\n";
  for (const auto& l : report.lines) out += l + "\n";
  out += "certificates " + std::to_string(report.certificates.size()) + "\n";
  for (const auto& c : report.certificates) {
    out += "begin certificate\n";
    out += write_certificate(c);
    out += "end certificate\n";
  }
  return out;
}

Report read_report(const std::string& text) {
  auto lines = split_lines(text);
  size_t i = 0;
  expect_line(lines, &i, kReportHeader);
  Report report;

  if (i >= lines.size() || lines[i].rfind("title ", 0) != 0)
    throw SemanticError("report: missing title line");
  report.title = lines[i].substr(6);
  ++i;

  if (i >= lines.size() || lines[i].rfind("lines ", 0) != 0)
    throw SemanticError("report: missing lines count");
  long long k = parse_integer(lines[i].substr(6), "report lines count");
  ++i;
  for (long long n = 0; n < k; ++n) {
    if (i >= lines.size()) throw SemanticError("report: truncated summary lines");
    report.lines.push_back(lines[i]);
    ++i;
  }

  if (i >= lines.size() || lines[i].rfind("certificates ", 0) != 0)
    throw SemanticError("report: missing certificates count");
  long long m = parse_integer(lines[i].substr(13), "report certificates count");
  ++i;
  for (long long n = 0; n < m; ++n) {
    expect_line(lines, &i, "begin certificate");
    std::string body;
    while (i < lines.size() && lines[i] != "end certificate") {
      body += lines[i] + "\n";
      ++i;
    }
    expect_line(lines, &i, "end certificate");
    report.certificates.push_back(read_certificate(body));
  }
  while (i < lines.size()) {
    if (!trim(lines[i]).empty())
      throw SemanticError("report: trailing content at line " + std::to_string(i + 1));
    ++i;
  }
  return report;
}

bool looks_like_report(const std::string& text) {
  return text.rfind(kReportHeader, 0) == 0;
}

// -- builders -----------------------------------------------------------------

namespace {

Certificate base_certificate(const Action& action, const SearchBounds& bounds,
                             CertificateKind kind) {
  Certificate cert;
  cert.kind = kind;
  cert.action_text = serialize_action(action);
  cert.action_hash = action_hash_string(action);
  cert.bounds = bounds;
  return cert;
}

// Rational-coefficient term sum "c*[w]+..." used by normalizations.
std::string normalization_terms(const SftSpace& space, const Normalization& terms) {
  if (terms.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += '+';
    out += rational_str(terms[i].second) + "*[" +
           render_cylinder(space.letters, terms[i].first) + "]";
  }
  return out;
}

// Integer-coefficient term sum "m*[w]+..." used by order-witness parts.
std::string integer_terms(const SftSpace& space,
                          const std::vector<std::pair<Word, int>>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += '+';
    out += std::to_string(terms[i].second) + "*[" +
           render_cylinder(space.letters, terms[i].first) + "]";
  }
  return out;
}

}  // namespace

Rational parse_rational_literal(const std::string& text) {
  return parse_rational(trim(text), "rational literal");
}

Word parse_cylinder_word(const Action& action, const std::string& text) {
  std::string inside = strip_brackets(text, "cylinder literal '" + text + "'");
  return parse_cylinder_text(action.space->letters, inside,
                             "cylinder literal '" + text + "'");
}

Normalization parse_normalization_terms(const Action& action, const std::string& text) {
  const SftSpace& space = *action.space;
  std::string s = trim(text);
  if (s == "0") return {};
  Normalization out;
  for (const std::string& term : split_on(s, '+')) {
    std::string body = trim(term);
    size_t star = body.find('*');
    if (star == std::string::npos)
      throw SemanticError("bad normalization term '" + term + "'");
    Rational coeff = parse_rational(trim(body.substr(0, star)), "normalization");
    std::string inside = strip_brackets(trim(body.substr(star + 1)), "normalization");
    out.emplace_back(parse_cylinder_text(space.letters, inside, "normalization"),
                     coeff);
  }
  return out;
}

std::vector<std::pair<Word, int>> parse_integer_terms(const Action& action,
                                                      const std::string& text) {
  const SftSpace& space = *action.space;
  std::string s = trim(text);
  if (s == "0") return {};
  std::vector<std::pair<Word, int>> out;
  for (const std::string& term : split_on(s, '+')) {
    std::string body = trim(term);
    size_t star = body.find('*');
    if (star == std::string::npos)
      throw SemanticError("bad integer term '" + term + "'");
    long long mult = parse_integer(trim(body.substr(0, star)), "integer term");
    std::string inside = strip_brackets(trim(body.substr(star + 1)), "integer term");
    out.emplace_back(parse_cylinder_text(space.letters, inside, "integer term"),
                     static_cast<int>(mult));
  }
  return out;
}

Certificate certificate_for_scheme(const Action& action, const SearchBounds& bounds,
                                   const SubequivalenceScheme& s) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Subequivalence);
  const SftSpace& space = *action.space;
  cert.statement = {"from " + clopen_literal(space, s.source),
                    "to " + clopen_literal(space, s.target)};
  append_scheme_block(action, s, &cert.data);
  return cert;
}

Certificate certificate_for_paradoxical(const Action& action, const SearchBounds& bounds,
                                        const ParadoxicalWitness& w) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Paradoxical);
  cert.statement = {"set " + clopen_literal(*action.space, w.a)};
  append_scheme_block(action, w.s1, &cert.data);
  append_scheme_block(action, w.s2, &cert.data);
  return cert;
}

Certificate certificate_for_tower(const Action& action, const SearchBounds& bounds,
                                  const std::vector<GroupWord>& tower_words,
                                  const TowerWitness& t) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Tower);
  cert.statement.push_back("tower candidates " + std::to_string(tower_words.size()));
  for (const GroupWord& w : tower_words)
    cert.statement.push_back("candidate " + word_literal(action, w));
  cert.data.push_back("base " + clopen_literal(*action.space, t.base));
  cert.data.push_back("words " + std::to_string(t.words.size()));
  for (const GroupWord& w : t.words)
    cert.data.push_back("word " + word_literal(action, w));
  return cert;
}

Certificate certificate_for_order(const Action& action, const SearchBounds& bounds,
                                  const TypeElement& f, const TypeElement& g,
                                  const OrderWitness& w) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Order);
  const SftSpace& space = *action.space;
  cert.statement = {"left " + type_literal(space, f),
                    "right " + type_literal(space, g)};
  cert.data.push_back("parts " + std::to_string(w.parts.size()));
  for (const OrderPart& p : w.parts)
    cert.data.push_back("part " + word_literal(action, p.word) + " " +
                        integer_terms(space, p.h));
  return cert;
}

Certificate certificate_for_measure(const Action& action, const SearchBounds& bounds,
                                    const InvariantContent& mu,
                                    const Normalization& normalization) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Measure);
  const SftSpace& space = *action.space;
  cert.statement = {"content depth " + std::to_string(mu.depth),
                    "normalization " + normalization_terms(space, normalization)};
  cert.data.push_back("values " + std::to_string(mu.values.size()));
  for (const auto& [w, v] : mu.values)
    cert.data.push_back("value [" + render_cylinder(space.letters, w) + "] " +
                        rational_str(v));
  return cert;
}

Certificate certificate_for_infeasibility(const Action& action, const SearchBounds& bounds,
                                          const InfeasibilityCertificate& cert_in,
                                          const Normalization& normalization) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Infeasibility);
  const SftSpace& space = *action.space;
  cert.statement = {"infeasible depth " + std::to_string(cert_in.depth),
                    "normalization " + normalization_terms(space, normalization)};
  cert.data.push_back("multipliers " + std::to_string(cert_in.multipliers.size()));
  for (const auto& [row, mult] : cert_in.multipliers) {
    if (row.is_norm) {
      cert.data.push_back("mult norm " + rational_str(mult));
    } else {
      cert.data.push_back("mult gen " + action.names[row.gen] +
                          (row.inverse ? " inv [" : " fwd [") +
                          render_cylinder(space.letters, row.cylinder) + "] " +
                          rational_str(mult));
    }
  }
  return cert;
}

Certificate certificate_for_scaling(const Action& action, const SearchBounds& bounds,
                                    const SubequivalenceScheme& s,
                                    const ScalingGuards& guards) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Scaling);
  const SftSpace& space = *action.space;
  cert.statement = {"guard-f " + clopen_literal(space, guards.f),
                    "guard-u " + clopen_literal(space, guards.u)};
  append_scheme_block(action, s, &cert.data);
  return cert;
}

Certificate certificate_for_isometry(const Action& action, const SearchBounds& bounds,
                                     const SubequivalenceScheme& s,
                                     const ScalingGuards& guards) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Isometry);
  const SftSpace& space = *action.space;
  cert.statement = {"guard-f " + clopen_literal(space, guards.f),
                    "guard-u " + clopen_literal(space, guards.u)};
  append_scheme_block(action, s, &cert.data);
  return cert;
}

Certificate certificate_for_cuntz(const Action& action, const SearchBounds& bounds,
                                  const SubequivalenceScheme& s) {
  Certificate cert = base_certificate(action, bounds, CertificateKind::Cuntz);
  const SftSpace& space = *action.space;
  cert.statement = {"from " + clopen_literal(space, s.source),
                    "to " + clopen_literal(space, s.target)};
  append_scheme_block(action, s, &cert.data);
  return cert;
}

SubequivalenceScheme parse_scheme_block(const Action& action,
                                        const std::vector<std::string>& lines,
                                        size_t* index) {
  const SftSpace& space = *action.space;
  size_t i = *index;
  auto need = [&](const char* what) -> const std::string& {
    if (i >= lines.size())
      throw SemanticError(std::string("scheme block: missing ") + what);
    return lines[i];
  };

  auto toks = tokenize(need("header"));
  if (toks.size() != 3 || toks[0].text != "scheme" || toks[1].text != "pieces")
    throw SemanticError("scheme block: expected 'scheme pieces <k>', got '" +
                        lines[i] + "'");
  long long k = parse_integer(toks[2].text, "scheme pieces count");
  ++i;

  const std::string& src = need("source line");
  if (src.rfind("source ", 0) != 0)
    throw SemanticError("scheme block: expected 'source <clopen>'");
  SubequivalenceScheme s;
  s.source = parse_clopen_literal(action, src.substr(7));
  ++i;

  const std::string& tgt = need("target line");
  if (tgt.rfind("target ", 0) != 0)
    throw SemanticError("scheme block: expected 'target <clopen>'");
  s.target = parse_clopen_literal(action, tgt.substr(7));
  ++i;

  for (long long n = 0; n < k; ++n) {
    const std::string& line = need("piece line");
    if (line.rfind("piece ", 0) != 0)
      throw SemanticError("scheme block: expected 'piece [<cyl>] <word>'");
    size_t open = line.find('[');
    size_t close = line.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw SemanticError("scheme block: bad piece line '" + line + "'");
    SchemePiece p;
    p.piece = parse_cylinder_text(space.letters,
                                  line.substr(open + 1, close - open - 1),
                                  "piece line '" + line + "'");
    p.word = parse_word_literal(action, trim(line.substr(close + 1)));
    s.pieces.push_back(std::move(p));
    ++i;
  }
  *index = i;
  return s;
}

void append_scheme_block(const Action& action, const SubequivalenceScheme& s,
                         std::vector<std::string>* lines) {
  const SftSpace& space = *action.space;
  lines->push_back("scheme pieces " + std::to_string(s.pieces.size()));
  lines->push_back("source " + clopen_literal(space, s.source));
  lines->push_back("target " + clopen_literal(space, s.target));
  for (const SchemePiece& p : s.pieces)
    lines->push_back("piece [" + render_cylinder(space.letters, p.piece) + "] " +
                     word_literal(action, p.word));
}

}  // namespace cantordyn
