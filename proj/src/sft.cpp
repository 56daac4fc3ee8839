#include "cantordyn/sft.hpp"

#include <algorithm>
#include <map>

namespace cantordyn {

namespace {

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string space_fingerprint_text(const SftSpace& s) {
  std::string out;
  for (const auto& l : s.letters) {
    out += l;
    out += '\x1f';
  }
  out += '\x1e';
  for (const auto& row : s.transitions)
    for (uint8_t v : row) out += v ? '1' : '0';
  out += '\x1e';
  for (uint8_t v : s.initial) out += v ? '1' : '0';
  return out;
}

// Trie over admissible words, used for canonicalization and complements.
struct Trie {
  struct Node {
    bool covered = false;
    std::map<int, Node> kids;
  };
  Node root;

  void insert(const Word& w) {
    Node* n = &root;
    for (int a : w) n = &n->kids[a];
    n->covered = true;
  }
};

void merge_covered(const SftSpace& space, Trie::Node& node, const Word& prefix) {
  if (node.covered) {
    node.kids.clear();
    return;
  }
  Word child = prefix;
  for (auto& [a, kid] : node.kids) {
    child.push_back(a);
    merge_covered(space, kid, child);
    child.pop_back();
  }
  const std::vector<int>& succ =
      prefix.empty() ? space.initial_letters : space.succ[prefix.back()];
  if (succ.empty()) return;
  for (int a : succ) {
    auto it = node.kids.find(a);
    if (it == node.kids.end() || !it->second.covered) return;
  }
  node.covered = true;
  node.kids.clear();
}

void emit_covered(const Trie::Node& node, Word& prefix, std::vector<Word>& out) {
  if (node.covered) {
    out.push_back(prefix);
    return;
  }
  for (const auto& [a, kid] : node.kids) {
    prefix.push_back(a);
    emit_covered(kid, prefix, out);
    prefix.pop_back();
  }
}

void emit_complement(const SftSpace& space, const Trie::Node& node, Word& prefix,
                     std::vector<Word>& out) {
  if (node.covered) return;
  const std::vector<int>& succ =
      prefix.empty() ? space.initial_letters : space.succ[prefix.back()];
  for (int a : succ) {
    auto it = node.kids.find(a);
    prefix.push_back(a);
    if (it == node.kids.end())
      out.push_back(prefix);
    else
      emit_complement(space, it->second, prefix, out);
    prefix.pop_back();
  }
}

bool is_prefix(const Word& p, const Word& w) {
  if (p.size() > w.size()) return false;
  return std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

SpacePtr validate_space(const std::vector<std::string>& letters,
                        const std::vector<std::vector<uint8_t>>& transitions,
                        const std::vector<uint8_t>& initial) {
  auto s = std::make_shared<SftSpace>();
  s->letters = letters;
  s->transitions = transitions;
  s->initial = initial;
  const size_t k = letters.size();
  if (k == 0) throw EmptySpace("alphabet is empty");
  if (transitions.size() != k || initial.size() != k)
    throw ShapeMismatch("transition matrix/initial vector must be " +
                        std::to_string(k) + "-sized");
  for (const auto& row : transitions)
    if (row.size() != k)
      throw ShapeMismatch("transition matrix row has wrong length");
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      if (letters[i] == letters[j])
        throw ShapeMismatch("duplicate letter name '" + letters[i] + "'");
  for (const auto& l : letters)
    if (l.empty()) throw ShapeMismatch("empty letter name");

  s->succ.resize(k);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      if (transitions[i][j]) s->succ[i].push_back(static_cast<int>(j));
  for (size_t i = 0; i < k; ++i)
    if (initial[i]) s->initial_letters.push_back(static_cast<int>(i));

  if (s->initial_letters.empty()) throw EmptySpace("no initial letter allowed");
  // no dead ends among letters reachable from the initial set
  std::vector<uint8_t> reach(k, 0);
  std::vector<int> stack = s->initial_letters;
  for (int a : stack) reach[a] = 1;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int b : s->succ[a])
      if (!reach[b]) {
        reach[b] = 1;
        stack.push_back(b);
      }
  }
  for (size_t i = 0; i < k; ++i)
    if (reach[i] && s->succ[i].empty())
      throw DeadEnd("letter '" + letters[i] + "' has no successor");

  s->tag = fnv1a64(space_fingerprint_text(*s));
  return s;
}

SpacePtr full_shift(int k) {
  if (k < 1) throw ShapeMismatch("full shift needs at least one letter");
  std::vector<std::string> letters;
  for (int i = 0; i < k; ++i) letters.push_back(std::to_string(i));
  std::vector<std::vector<uint8_t>> transitions(k, std::vector<uint8_t>(k, 1));
  std::vector<uint8_t> initial(k, 1);
  return validate_space(letters, transitions, initial);
}

bool is_admissible(const SftSpace& space, const Word& w) {
  for (int a : w)
    if (a < 0 || a >= space.k()) return false;
  if (w.empty()) return true;
  if (!space.initial[w[0]]) return false;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!space.transitions[w[i]][w[i + 1]]) return false;
  return true;
}

void require_admissible(const SftSpace& space, const Word& w) {
  if (!is_admissible(space, w))
    throw InadmissibleWord("'" + word_to_string(space, w) + "'");
}

const std::vector<int>& followers(const SftSpace& space, const Word& w) {
  return w.empty() ? space.initial_letters : space.succ[w.back()];
}

std::vector<Word> admissible_words(const SftSpace& space, int depth) {
  std::vector<Word> out;
  Word cur;
  // iterative DFS in lexicographic order
  struct Frame {
    const std::vector<int>* succ;
    size_t idx;
  };
  if (depth == 0) {
    out.push_back({});
    return out;
  }
  std::vector<Frame> stack{{&space.initial_letters, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.idx >= f.succ->size()) {
      stack.pop_back();
      if (!cur.empty()) cur.pop_back();
      continue;
    }
    int a = (*f.succ)[f.idx++];
    cur.push_back(a);
    if (static_cast<int>(cur.size()) == depth) {
      out.push_back(cur);
      cur.pop_back();
    } else {
      stack.push_back({&space.succ[a], 0});
    }
  }
  return out;
}

ClopenSet canonicalize(const SftSpace& space, const std::vector<Word>& cylinders) {
  Trie trie;
  for (const Word& w : cylinders) {
    require_admissible(space, w);
    trie.insert(w);
  }
  Word prefix;
  merge_covered(space, trie.root, prefix);
  ClopenSet out;
  out.space_tag = space.tag;
  emit_covered(trie.root, prefix, out.cylinders);
  std::sort(out.cylinders.begin(), out.cylinders.end());
  return out;
}

ClopenSet clopen_empty(const SftSpace& space) {
  ClopenSet out;
  out.space_tag = space.tag;
  return out;
}

ClopenSet clopen_full(const SftSpace& space) {
  ClopenSet out;
  out.space_tag = space.tag;
  out.cylinders.push_back({});
  return out;
}

ClopenSet clopen_cylinder(const SftSpace& space, const Word& w) {
  require_admissible(space, w);
  ClopenSet out;
  out.space_tag = space.tag;
  out.cylinders.push_back(w);
  return out;
}

bool is_empty_set(const ClopenSet& a) { return a.cylinders.empty(); }

bool is_full_set(const ClopenSet& a) {
  return a.cylinders.size() == 1 && a.cylinders[0].empty();
}

void require_same_space(const SftSpace& space, const ClopenSet& a) {
  if (a.space_tag != space.tag)
    throw SpaceMismatch("clopen set belongs to a different space");
}

ClopenSet clopen_union(const SftSpace& space, const ClopenSet& a, const ClopenSet& b) {
  require_same_space(space, a);
  require_same_space(space, b);
  std::vector<Word> all = a.cylinders;
  all.insert(all.end(), b.cylinders.begin(), b.cylinders.end());
  return canonicalize(space, all);
}

ClopenSet clopen_intersection(const SftSpace& space, const ClopenSet& a,
                              const ClopenSet& b) {
  require_same_space(space, a);
  require_same_space(space, b);
  std::vector<Word> out;
  for (const Word& u : a.cylinders)
    for (const Word& v : b.cylinders) {
      if (is_prefix(u, v))
        out.push_back(v);
      else if (is_prefix(v, u))
        out.push_back(u);
    }
  return canonicalize(space, out);
}

ClopenSet clopen_complement(const SftSpace& space, const ClopenSet& a) {
  require_same_space(space, a);
  if (is_empty_set(a)) return clopen_full(space);
  Trie trie;
  for (const Word& w : a.cylinders) trie.insert(w);
  Word prefix;
  std::vector<Word> out;
  emit_complement(space, trie.root, prefix, out);
  return canonicalize(space, out);
}

ClopenSet clopen_difference(const SftSpace& space, const ClopenSet& a,
                            const ClopenSet& b) {
  return clopen_intersection(space, a, clopen_complement(space, b));
}

ClopenSet clopen_algebra(const SftSpace& space, ClopenOp op, const ClopenSet& a,
                         const ClopenSet* b) {
  const bool binary = (op != ClopenOp::Complement);
  if (binary && b == nullptr)
    throw ShapeMismatch("binary clopen operation needs two operands");
  switch (op) {
    case ClopenOp::Union:
      return clopen_union(space, a, *b);
    case ClopenOp::Intersection:
      return clopen_intersection(space, a, *b);
    case ClopenOp::Complement:
      return clopen_complement(space, a);
    case ClopenOp::Difference:
      return clopen_difference(space, a, *b);
  }
  throw ShapeMismatch("unknown clopen operation");
}

bool clopen_contains_cylinder(const SftSpace& space, const ClopenSet& a,
                              const Word& w) {
  require_same_space(space, a);
  // canonical a: [w] ⊆ a iff some cylinder of a is a prefix of w
  for (const Word& u : a.cylinders)
    if (is_prefix(u, w)) return true;
  return false;
}

bool clopen_contains(const SftSpace& space, const ClopenSet& a, const ClopenSet& b) {
  require_same_space(space, a);
  require_same_space(space, b);
  for (const Word& w : b.cylinders)
    if (!clopen_contains_cylinder(space, a, w)) return false;
  return true;
}

bool clopen_disjoint(const SftSpace& space, const ClopenSet& a, const ClopenSet& b) {
  require_same_space(space, a);
  require_same_space(space, b);
  for (const Word& u : a.cylinders)
    for (const Word& v : b.cylinders)
      if (is_prefix(u, v) || is_prefix(v, u)) return false;
  return true;
}

ClopenRel compare_clopen(const SftSpace& space, const ClopenSet& a, const ClopenSet& b) {
  if (a.cylinders == b.cylinders) {
    require_same_space(space, a);
    require_same_space(space, b);
    return ClopenRel::Equal;
  }
  const bool ab = clopen_contains(space, b, a);
  const bool ba = clopen_contains(space, a, b);
  if (ab) return ClopenRel::Subset;
  if (ba) return ClopenRel::Superset;
  if (clopen_disjoint(space, a, b)) return ClopenRel::Disjoint;
  return ClopenRel::Overlapping;
}

std::vector<Word> refine(const SftSpace& space, const ClopenSet& a, int depth) {
  require_same_space(space, a);
  if (depth < 0) throw DepthTooSmall("negative depth");
  std::vector<Word> out;
  for (const Word& w : a.cylinders) {
    if (static_cast<int>(w.size()) > depth)
      throw DepthTooSmall("cylinder '" + word_to_string(space, w) +
                          "' is deeper than " + std::to_string(depth));
    // extend w to full depth in lexicographic order
    std::vector<Word> frontier{w};
    for (int d = static_cast<int>(w.size()); d < depth; ++d) {
      std::vector<Word> next;
      for (const Word& u : frontier)
        for (int x : followers(space, u)) {
          Word e = u;
          e.push_back(x);
          next.push_back(std::move(e));
        }
      frontier = std::move(next);
    }
    out.insert(out.end(), frontier.begin(), frontier.end());
  }
  return out;  // cylinders sorted + antichain => extensions already sorted
}

std::string word_to_string(const SftSpace& space, const Word& w) {
  std::string out;
  for (int a : w) {
    if (a < 0 || a >= space.k()) {
      out += "?";
      continue;
    }
    out += space.letters[a];
  }
  return out;
}

std::string clopen_to_string(const SftSpace& space, const ClopenSet& a) {
  if (a.cylinders.empty()) return "{}";
  std::string out;
  for (size_t i = 0; i < a.cylinders.size(); ++i) {
    if (i) out += "|";
    out += "[" + word_to_string(space, a.cylinders[i]) + "]";
  }
  return out;
}

}  // namespace cantordyn
