#include "cantordyn/action.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace cantordyn {

namespace {

bool is_prefix(const Word& p, const Word& w) {
  if (p.size() > w.size()) return false;
  return std::equal(p.begin(), p.end(), w.begin());
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word tail_after(const Word& w, size_t prefix_len) {
  return Word(w.begin() + static_cast<long>(prefix_len), w.end());
}

// letters reachable by the unique admissible continuation from `from`, or
// nullopt if any step has more than one successor.
std::optional<Word> forced_walk(const SftSpace& space, int from, size_t steps) {
  Word out;
  int cur = from;
  for (size_t i = 0; i < steps; ++i) {
    if (space.succ[cur].size() != 1) return std::nullopt;
    cur = space.succ[cur][0];
    out.push_back(cur);
  }
  return out;
}

// Does s1·t == m·t hold for every admissible tail t after m? (Infinite-string
// equality; both s1 and m are admissible and t ranges over continuations
// of m.)
bool identity_equation_holds(const SftSpace& space, const Word& s1, const Word& m) {
  if (s1 == m) return true;
  const Word* shorter = &s1;
  const Word* longer = &m;
  if (shorter->size() > longer->size()) std::swap(shorter, longer);
  if (!is_prefix(*shorter, *longer)) return false;
  Word d = tail_after(*longer, shorter->size());
  // equation reduces to t == d·t for all tails t, i.e. the continuation
  // after m is unique and equals d repeated forever
  if (m.empty()) return false;  // several initial letters would each need t = d^inf
  size_t probe = static_cast<size_t>(space.k()) * (d.size() + 1) + d.size() + 1;
  auto walk = forced_walk(space, m.back(), probe);
  if (!walk) return false;
  for (size_t i = 0; i < walk->size(); ++i)
    if ((*walk)[i] != d[i % d.size()]) return false;
  return true;
}

}  // namespace

bool operator==(const PrefixExchange& a, const PrefixExchange& b) {
  return a.space->tag == b.space->tag && a.rules == b.rules;
}

bool exchange_less(const PrefixExchange& a, const PrefixExchange& b) {
  if (a.space->tag != b.space->tag) return a.space->tag < b.space->tag;
  return a.rules < b.rules;
}

PrefixExchange validate_exchange(SpacePtr space, std::vector<ExchangeRule> rules) {
  if (!space) throw ShapeMismatch("exchange needs a space");
  if (rules.empty()) throw IncompleteDomain("no rules");
  for (const ExchangeRule& r : rules) {
    require_admissible(*space, r.from);
    require_admissible(*space, r.to);
  }
  std::sort(rules.begin(), rules.end(),
            [](const ExchangeRule& x, const ExchangeRule& y) { return x.from < y.from; });
  for (size_t i = 0; i + 1 < rules.size(); ++i)
    if (is_prefix(rules[i].from, rules[i + 1].from))
      throw OverlappingDomain("domains '" + word_to_string(*space, rules[i].from) +
                              "' and '" + word_to_string(*space, rules[i + 1].from) + "'");
  {
    std::vector<Word> domains;
    for (const ExchangeRule& r : rules) domains.push_back(r.from);
    if (!is_full_set(canonicalize(*space, domains)))
      throw IncompleteDomain("rule domains do not cover the space");
  }
  for (const ExchangeRule& r : rules) {
    for (int a : followers(*space, r.from)) {
      bool ok = r.to.empty() ? space->initial[a] != 0
                             : space->transitions[r.to.back()][a] != 0;
      if (!ok)
        throw TailMismatch("tail '" + space->letters[a] + "' admissible after '" +
                           word_to_string(*space, r.from) + "' but not after '" +
                           word_to_string(*space, r.to) + "'");
    }
  }
  {
    // one-step expansion of each image: the map is bijective iff these
    // cylinders tile the space
    std::vector<Word> images;
    for (const ExchangeRule& r : rules)
      for (int a : followers(*space, r.from)) {
        Word img = r.to;
        img.push_back(a);
        images.push_back(img);
      }
    std::sort(images.begin(), images.end());
    for (size_t i = 0; i + 1 < images.size(); ++i)
      if (is_prefix(images[i], images[i + 1]))
        throw NotBijective("images '" + word_to_string(*space, images[i]) + "' and '" +
                           word_to_string(*space, images[i + 1]) + "' overlap");
    if (!is_full_set(canonicalize(*space, images)))
      throw NotBijective("images do not cover the space");
  }

  // normal form: merge complete sibling rule families bottom-up
  std::map<Word, Word> m;
  for (const ExchangeRule& r : rules) m[r.from] = r.to;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [from, to] : m) {
      if (from.empty()) continue;
      Word parent(from.begin(), from.end() - 1);
      const auto& sibs = followers(*space, parent);
      bool mergeable = true;
      Word q;
      bool first = true;
      for (int a : sibs) {
        Word key = parent;
        key.push_back(a);
        auto it = m.find(key);
        if (it == m.end() || it->second.empty() || it->second.back() != a) {
          mergeable = false;
          break;
        }
        Word head(it->second.begin(), it->second.end() - 1);
        if (first) {
          q = head;
          first = false;
        } else if (head != q) {
          mergeable = false;
          break;
        }
      }
      if (!mergeable || first) continue;
      for (int a : sibs) {
        Word key = parent;
        key.push_back(a);
        m.erase(key);
      }
      m[parent] = q;
      changed = true;
      break;
    }
  }

  PrefixExchange out;
  out.space = std::move(space);
  for (const auto& [from, to] : m) out.rules.push_back({from, to});
  return out;
}

PrefixExchange identity_exchange(SpacePtr space) {
  PrefixExchange out;
  out.space = std::move(space);
  out.rules = {{{}, {}}};
  return out;
}

namespace {

// image cylinders of g restricted to one cylinder [c], appended to out
void apply_one(const PrefixExchange& g, const Word& c, std::vector<Word>* out) {
  const SftSpace& space = *g.space;
  for (const ExchangeRule& r : g.rules) {
    if (is_prefix(r.from, c)) {
      Word rem = tail_after(c, r.from.size());
      if (!rem.empty()) {
        out->push_back(concat(r.to, rem));
      } else {
        for (int a : followers(space, r.from)) {
          Word img = r.to;
          img.push_back(a);
          out->push_back(img);
        }
      }
      // domains are an antichain: no other rule meets [c] once r.from ⊑ c
      if (r.from.size() < c.size()) return;
      continue;
    }
    if (is_prefix(c, r.from)) {
      for (int a : followers(space, r.from)) {
        Word img = r.to;
        img.push_back(a);
        out->push_back(img);
      }
    }
  }
}

}  // namespace

ClopenSet apply(const PrefixExchange& g, const ClopenSet& a) {
  require_same_space(*g.space, a);
  std::vector<Word> images;
  for (const Word& c : a.cylinders) apply_one(g, c, &images);
  return canonicalize(*g.space, images);
}

ClopenSet apply_cylinder(const PrefixExchange& g, const Word& w) {
  require_admissible(*g.space, w);
  std::vector<Word> images;
  apply_one(g, w, &images);
  return canonicalize(*g.space, images);
}

PrefixExchange compose(const PrefixExchange& g, const PrefixExchange& h) {
  if (g.space->tag != h.space->tag)
    throw SpaceMismatch("composing exchanges over different spaces");
  std::vector<ExchangeRule> rules;
  for (const ExchangeRule& hr : h.rules) {
    const ExchangeRule* inside = nullptr;
    for (const ExchangeRule& gr : g.rules)
      if (is_prefix(gr.from, hr.to)) {
        inside = &gr;
        break;
      }
    if (inside) {
      rules.push_back({hr.from, concat(inside->to, tail_after(hr.to, inside->from.size()))});
      continue;
    }
    for (const ExchangeRule& gr : g.rules) {
      if (!is_prefix(hr.to, gr.from) || hr.to == gr.from) continue;
      Word w = tail_after(gr.from, hr.to.size());
      Word dom = concat(hr.from, w);
      if (!is_admissible(*g.space, dom)) continue;
      rules.push_back({dom, gr.to});
    }
  }
  return validate_exchange(g.space, rules);
}

PrefixExchange invert(const PrefixExchange& g) {
  std::vector<ExchangeRule> rules;
  for (const ExchangeRule& r : g.rules)
    for (int a : followers(*g.space, r.from)) {
      Word from = r.to;
      from.push_back(a);
      Word to = r.from;
      to.push_back(a);
      rules.push_back({from, to});
    }
  return validate_exchange(g.space, rules);
}

ClopenSet fixed_cylinders(const PrefixExchange& g, int depth) {
  const SftSpace& space = *g.space;
  if (depth < 0) throw DepthTooSmall("negative depth");
  std::vector<Word> fixed;
  for (const Word& w : admissible_words(space, depth)) {
    bool ok = true;
    for (const ExchangeRule& r : g.rules) {
      if (is_prefix(r.from, w)) {
        Word s1 = concat(r.to, tail_after(w, r.from.size()));
        if (!identity_equation_holds(space, s1, w)) ok = false;
      } else if (is_prefix(w, r.from)) {
        if (!identity_equation_holds(space, r.to, r.from)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) fixed.push_back(w);
  }
  return canonicalize(space, fixed);
}

GroupWord invert_word(const GroupWord& w) {
  GroupWord out(w.rbegin(), w.rend());
  for (GroupLetter& l : out) l.exp = -l.exp;
  return out;
}

GroupWord concat_words(const GroupWord& first_applied_last, const GroupWord& applied_first) {
  GroupWord out;
  auto push = [&out](const GroupLetter& l) {
    if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp)
      out.pop_back();
    else
      out.push_back(l);
  };
  for (const GroupLetter& l : first_applied_last) push(l);
  for (const GroupLetter& l : applied_first) push(l);
  return out;
}

int Action::gen_index(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw UnknownGenerator("'" + name + "'");
}

ActionPtr make_action(SpacePtr space, std::vector<std::string> names,
                      std::vector<PrefixExchange> generators) {
  if (!space) throw ShapeMismatch("action needs a space");
  if (names.size() != generators.size())
    throw ShapeMismatch("one name per generator required");
  if (names.empty()) throw ShapeMismatch("action needs at least one generator");
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw ShapeMismatch("empty generator name");
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j])
        throw ShapeMismatch("duplicate generator name '" + names[i] + "'");
  }
  auto action = std::make_shared<Action>();
  action->space = space;
  action->names = std::move(names);
  for (PrefixExchange& g : generators) {
    if (g.space->tag != space->tag)
      throw SpaceMismatch("generator lives on a different space");
    action->inverses.push_back(invert(g));
    action->generators.push_back(std::move(g));
  }
  return action;
}

namespace {

const PrefixExchange& letter_exchange(const Action& action, const GroupLetter& l) {
  if (l.gen < 0 || l.gen >= static_cast<int>(action.generators.size()))
    throw UnknownGenerator("generator index " + std::to_string(l.gen));
  if (l.exp != 1 && l.exp != -1)
    throw ShapeMismatch("group letter exponent must be +1 or -1");
  return l.exp == 1 ? action.generators[l.gen] : action.inverses[l.gen];
}

}  // namespace

PrefixExchange evaluate_word(const Action& action, const GroupWord& w) {
  PrefixExchange acc = identity_exchange(action.space);
  for (const GroupLetter& l : w) acc = compose(acc, letter_exchange(action, l));
  return acc;
}

ClopenSet apply_word(const Action& action, const GroupWord& w, const ClopenSet& a) {
  ClopenSet cur = a;
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    cur = apply(letter_exchange(action, *it), cur);
  return cur;
}

std::string word_to_display(const Action& action, const GroupWord& w) {
  if (w.empty()) return "e";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ".";
    if (w[i].gen < 0 || w[i].gen >= static_cast<int>(action.names.size()))
      throw UnknownGenerator("generator index " + std::to_string(w[i].gen));
    out += action.names[w[i].gen];
    if (w[i].exp == -1) out += "'";
  }
  return out;
}

namespace {

ActionPtr make_free_boundary(int n) {
  if (n < 1 || n > 8) throw BadParams("free_boundary rank must be in 1..8");
  std::vector<std::string> letters;
  for (int i = 0; i < n; ++i) {
    letters.push_back(std::string(1, static_cast<char>('a' + i)));
    letters.push_back(std::string(1, static_cast<char>('A' + i)));
  }
  int k = 2 * n;
  std::vector<std::vector<uint8_t>> t(k, std::vector<uint8_t>(k, 1));
  for (int i = 0; i < n; ++i) {
    t[2 * i][2 * i + 1] = 0;  // x X
    t[2 * i + 1][2 * i] = 0;  // X x
  }
  SpacePtr space = validate_space(letters, t, std::vector<uint8_t>(k, 1));
  std::vector<std::string> names;
  std::vector<PrefixExchange> gens;
  for (int i = 0; i < n; ++i) {
    names.push_back("g" + std::string(1, static_cast<char>('a' + i)));
    std::vector<ExchangeRule> rules;
    rules.push_back({{2 * i + 1}, {}});  // X_i -> .
    for (int y = 0; y < k; ++y) {
      if (y == 2 * i + 1) continue;
      rules.push_back({{y}, {2 * i, y}});  // y -> x_i y
    }
    gens.push_back(validate_exchange(space, rules));
  }
  return make_action(space, names, gens);
}

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

ActionPtr make_bit_permutation(const std::string& params) {
  SpacePtr space = full_shift(2);
  std::vector<ExchangeRule> rules;
  for (const std::string& raw : split_top_level(params)) {
    std::string p = strip(raw);
    size_t gt = p.find('>');
    if (gt == std::string::npos)
      throw BadParams("bit_permutation entries look like 01>10");
    auto to_word = [](const std::string& bits) {
      Word w;
      for (char c : bits) {
        if (c != '0' && c != '1') throw BadParams("bit words use only 0 and 1");
        w.push_back(c - '0');
      }
      return w;
    };
    Word from = to_word(strip(p.substr(0, gt)));
    Word to = to_word(strip(p.substr(gt + 1)));
    if (from.size() != to.size())
      throw BadParams("bit_permutation rules must preserve word length");
    rules.push_back({std::move(from), std::move(to)});
  }
  return make_action(space, {"s"}, {validate_exchange(space, rules)});
}

ActionPtr make_product_with_trivial(const std::string& params) {
  auto args = split_top_level(params);
  if (args.size() != 2) throw BadParams("product_with_trivial takes two arguments");
  ActionPtr base = builtin_action(strip(args[0]));
  std::string second = strip(args[1]);
  if (second.rfind("full_shift(", 0) != 0 || second.back() != ')')
    throw BadParams("second factor must be full_shift(k)");
  int k = 0;
  try {
    k = std::stoi(second.substr(11, second.size() - 12));
  } catch (const std::exception&) {
    throw BadParams("full_shift needs an integer");
  }
  if (k < 1 || k > 9) throw BadParams("full_shift factor must be in 1..9");

  const SftSpace& b = *base->space;
  int kb = b.k();
  std::vector<std::string> letters;
  std::vector<std::vector<uint8_t>> t(kb * k, std::vector<uint8_t>(kb * k, 0));
  std::vector<uint8_t> initial(kb * k, 0);
  for (int i = 0; i < kb; ++i)
    for (int j = 0; j < k; ++j) {
      letters.push_back(b.letters[i] + std::to_string(j));
      initial[i * k + j] = b.initial[i];
      for (int i2 = 0; i2 < kb; ++i2)
        t[i * k + j][i2 * k + j] = b.transitions[i][i2];
    }
  SpacePtr space = validate_space(letters, t, initial);

  auto lift_word = [k](const Word& w, int j) {
    Word out;
    for (int x : w) out.push_back(x * k + j);
    return out;
  };
  std::vector<PrefixExchange> gens;
  for (const PrefixExchange& g : base->generators) {
    if (g.is_identity()) {
      gens.push_back(identity_exchange(space));
      continue;
    }
    std::vector<ExchangeRule> rules;
    for (const ExchangeRule& r : g.rules)
      for (int j = 0; j < k; ++j)
        rules.push_back({lift_word(r.from, j), lift_word(r.to, j)});
    gens.push_back(validate_exchange(space, rules));
  }
  return make_action(space, base->names, gens);
}

}  // namespace

ActionPtr builtin_action(const std::string& name) {
  if (name == "f2_boundary") return make_free_boundary(2);
  if (name.rfind("free_boundary(", 0) == 0 && name.back() == ')') {
    int n = 0;
    try {
      n = std::stoi(name.substr(14, name.size() - 15));
    } catch (const std::exception&) {
      throw BadParams("free_boundary needs an integer rank");
    }
    return make_free_boundary(n);
  }
  if (name.rfind("bit_permutation(", 0) == 0 && name.back() == ')')
    return make_bit_permutation(name.substr(16, name.size() - 17));
  if (name.rfind("product_with_trivial(", 0) == 0 && name.back() == ')')
    return make_product_with_trivial(name.substr(21, name.size() - 22));
  throw UnknownName("no builtin action named '" + name + "'");
}

std::pair<ClopenSet, bool> invariant_clopen_saturation(const Action& action,
                                                       const ClopenSet& a, int max_rounds) {
  require_same_space(*action.space, a);
  ClopenSet cur = a;
  for (int round = 0; round < max_rounds; ++round) {
    ClopenSet next = cur;
    for (size_t i = 0; i < action.generators.size(); ++i) {
      next = clopen_union(*action.space, next, apply(action.generators[i], cur));
      next = clopen_union(*action.space, next, apply(action.inverses[i], cur));
    }
    if (next == cur) return {cur, true};
    cur = next;
  }
  return {cur, false};
}

bool verify_tower(const Action& action, const TowerWitness& w) {
  require_same_space(*action.space, w.base);
  std::vector<ClopenSet> images;
  for (const GroupWord& t : w.words) images.push_back(apply_word(action, t, w.base));
  for (size_t i = 0; i < images.size(); ++i)
    for (size_t j = i + 1; j < images.size(); ++j)
      if (!clopen_disjoint(*action.space, images[i], images[j])) return false;
  return true;
}

std::vector<GroupWord> enumerate_words(const Action& action, int max_length) {
  std::vector<GroupWord> out = {{}};
  size_t level_begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    size_t level_end = out.size();
    for (size_t i = level_begin; i < level_end; ++i) {
      for (int gen = 0; gen < static_cast<int>(action.generators.size()); ++gen)
        for (int exp : {1, -1}) {
          const GroupWord& w = out[i];
          if (!w.empty() && w.back().gen == gen && w.back().exp == -exp) continue;
          GroupWord next = w;
          next.push_back({gen, exp});
          out.push_back(std::move(next));
        }
    }
    level_begin = level_end;
  }
  return out;
}

int max_positive_defect(const Action& action) {
  int defect = 0;
  auto scan = [&defect](const PrefixExchange& g) {
    for (const ExchangeRule& r : g.rules)
      defect = std::max(defect,
                        static_cast<int>(r.to.size()) - static_cast<int>(r.from.size()));
  };
  for (const PrefixExchange& g : action.generators) scan(g);
  for (const PrefixExchange& g : action.inverses) scan(g);
  return defect;
}

int max_rule_length(const Action& action) {
  size_t len = 0;
  auto scan = [&len](const PrefixExchange& g) {
    for (const ExchangeRule& r : g.rules)
      len = std::max({len, r.from.size(), r.to.size()});
  };
  for (const PrefixExchange& g : action.generators) scan(g);
  for (const PrefixExchange& g : action.inverses) scan(g);
  return static_cast<int>(len);
}

}  // namespace cantordyn
