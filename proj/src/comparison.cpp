#include "cantordyn/comparison.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "cantordyn/errors.hpp"

namespace cantordyn {

namespace {

int clopen_depth(const ClopenSet& a) {
  size_t d = 0;
  for (const Word& w : a.cylinders) d = std::max(d, w.size());
  return static_cast<int>(d);
}

bool word_less(const Word& a, const Word& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

SubequivalenceScheme sort_pieces(SubequivalenceScheme s) {
  std::sort(s.pieces.begin(), s.pieces.end(),
            [](const SchemePiece& a, const SchemePiece& b) {
              if (a.piece != b.piece) return word_less(a.piece, b.piece);
              return a.word < b.word;
            });
  return s;
}

SubequivalenceScheme identity_scheme(const SftSpace& space, const ClopenSet& f,
                                     const ClopenSet& target) {
  SubequivalenceScheme s;
  s.source = canonicalize(space, f.cylinders);
  s.target = canonicalize(space, target.cylinders);
  for (const Word& c : s.source.cylinders) s.pieces.push_back({c, GroupWord{}});
  return s;
}

ClopenSet image_union(const Action& action, const SubequivalenceScheme& s) {
  ClopenSet out = clopen_empty(*action.space);
  for (const SchemePiece& p : s.pieces)
    out = clopen_union(*action.space, out,
                       apply_word(action, p.word, clopen_cylinder(*action.space, p.piece)));
  return out;
}

void require_internal(bool ok, const std::string& what) {
  if (!ok) throw Error("internal: " + what);
}

// number of depth-d cells, saturating at `cap` + 1
size_t cell_count(const SftSpace& space, int depth, size_t cap) {
  if (depth <= 0) return 1;
  std::vector<size_t> per(space.letters.size(), 0);
  for (int a : space.initial_letters) per[static_cast<size_t>(a)] = 1;
  size_t count = space.initial_letters.size();
  for (int p = 1; p < depth; ++p) {
    std::vector<size_t> next(space.letters.size(), 0);
    count = 0;
    for (size_t a = 0; a < per.size(); ++a)
      for (int b : space.succ[a]) {
        next[static_cast<size_t>(b)] += per[a];
        count += per[a];
        if (count > cap) return cap + 1;
      }
    per = std::move(next);
  }
  return count;
}

Normalization signed_objective(const ClopenSet& plus, const ClopenSet& minus) {
  Normalization obj;
  for (const Word& c : plus.cylinders) obj.push_back({c, Rational(1)});
  for (const Word& c : minus.cylinders) obj.push_back({c, Rational(-1)});
  return obj;
}

// ---------------------------------------------------------------------------
// leveled packing front end shared by the searches

std::optional<SubequivalenceScheme> packed_subequivalence(const Action& action,
                                                          const ClopenSet& f,
                                                          const ClopenSet& o,
                                                          const SearchBounds& bounds,
                                                          long* budget) {
  const SftSpace& space = *action.space;
  if (is_empty_set(f)) {
    SubequivalenceScheme s;
    s.source = f;
    s.target = o;
    return s;
  }
  std::vector<std::pair<Word, int>> capacity;
  for (const Word& c : o.cylinders) capacity.push_back({c, 1});
  int coarse = std::max(1, clopen_depth(f));
  for (int level = coarse; level <= std::max(coarse, bounds.depth); ++level) {
    std::vector<PackAtom> atoms;
    for (const Word& c : f.cylinders) {
      if (static_cast<int>(c.size()) >= level) {
        atoms.push_back({c, 0});
      } else {
        for (const Word& w : refine(space, clopen_cylinder(space, c), level))
          atoms.push_back({w, 0});
      }
    }
    PackOutcome packed =
        pack_atoms(action, atoms, capacity, bounds.word_length, *budget);
    *budget -= packed.nodes_used;
    if (packed.found) {
      SubequivalenceScheme s;
      s.source = f;
      s.target = o;
      for (const PackPlacement& p : packed.placements)
        s.pieces.push_back({p.atom.cylinder, p.word});
      s = sort_pieces(std::move(s));
      VerifyReport rep = verify_scheme(action, s);
      require_internal(rep.pass, "packed scheme failed verification: " + rep.clause);
      return s;
    }
    if (*budget <= 0) break;
  }
  return std::nullopt;
}

// normal forms of all words within length; closed == the whole group was seen
struct GroupEnumeration {
  std::vector<GroupWord> words;
  bool closed = false;
};

GroupEnumeration enumerate_group(const Action& action, int word_length) {
  GroupEnumeration g;
  g.words = enumerate_words(action, word_length);
  std::set<PrefixExchange, ExchangeLess> seen;
  for (const GroupWord& w : g.words) seen.insert(evaluate_word(action, w));
  g.closed = true;
  for (const PrefixExchange& e : seen) {
    for (size_t i = 0; i < action.generators.size() && g.closed; ++i) {
      if (!seen.count(compose(action.generators[i], e))) g.closed = false;
      if (!seen.count(compose(action.inverses[i], e))) g.closed = false;
    }
    if (!g.closed) break;
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

VerifyReport verify_scheme(const Action& action, const SubequivalenceScheme& s) {
  const SftSpace& space = *action.space;
  require_same_space(space, s.source);
  require_same_space(space, s.target);
  VerifyReport rep;
  for (const SchemePiece& p : s.pieces)
    if (!is_admissible(space, p.piece)) {
      rep.clause = "piece cylinder inadmissible: '" + word_to_string(space, p.piece) + "'";
      return rep;
    }
  for (size_t i = 0; i < s.pieces.size(); ++i)
    for (size_t j = i + 1; j < s.pieces.size(); ++j) {
      const Word& a = s.pieces[i].piece;
      const Word& b = s.pieces[j].piece;
      const Word& shorter = a.size() <= b.size() ? a : b;
      const Word& longer = a.size() <= b.size() ? b : a;
      if (std::equal(shorter.begin(), shorter.end(), longer.begin())) {
        rep.clause = "pieces overlap: '" + word_to_string(space, a) + "' and '" +
                     word_to_string(space, b) + "'";
        return rep;
      }
    }
  ClopenSet pieces_union = clopen_empty(space);
  for (const SchemePiece& p : s.pieces)
    pieces_union = clopen_union(space, pieces_union, clopen_cylinder(space, p.piece));
  if (!(pieces_union == s.source)) {
    rep.clause = "pieces do not cover the source";
    return rep;
  }
  std::vector<ClopenSet> images;
  for (const SchemePiece& p : s.pieces)
    images.push_back(apply_word(action, p.word, clopen_cylinder(space, p.piece)));
  for (size_t i = 0; i < images.size(); ++i)
    for (size_t j = i + 1; j < images.size(); ++j)
      if (!clopen_disjoint(space, images[i], images[j])) {
        rep.clause = "images overlap: pieces '" +
                     word_to_string(space, s.pieces[i].piece) + "' and '" +
                     word_to_string(space, s.pieces[j].piece) + "'";
        return rep;
      }
  for (size_t i = 0; i < images.size(); ++i)
    if (!clopen_contains(space, s.target, images[i])) {
      rep.clause = "image not inside the target: piece '" +
                   word_to_string(space, s.pieces[i].piece) + "'";
      return rep;
    }
  rep.pass = true;
  return rep;
}

VerifyReport verify_paradoxical(const Action& action, const ParadoxicalWitness& w) {
  const SftSpace& space = *action.space;
  VerifyReport rep;
  if (!clopen_disjoint(space, w.o1, w.o2)) {
    rep.clause = "targets overlap";
    return rep;
  }
  if (!clopen_contains(space, w.a, w.o1) || !clopen_contains(space, w.a, w.o2)) {
    rep.clause = "targets not inside the set";
    return rep;
  }
  if (!(w.s1.source == w.a) || !(w.s1.target == w.o1)) {
    rep.clause = "first scheme endpoints mismatch";
    return rep;
  }
  if (!(w.s2.source == w.a) || !(w.s2.target == w.o2)) {
    rep.clause = "second scheme endpoints mismatch";
    return rep;
  }
  VerifyReport sub = verify_scheme(action, w.s1);
  if (!sub.pass) {
    rep.clause = "first scheme: " + sub.clause;
    return rep;
  }
  sub = verify_scheme(action, w.s2);
  if (!sub.pass) {
    rep.clause = "second scheme: " + sub.clause;
    return rep;
  }
  rep.pass = true;
  return rep;
}

// ---------------------------------------------------------------------------

PackOutcome pack_atoms(const Action& action, const std::vector<PackAtom>& atoms,
                       const std::vector<std::pair<Word, int>>& capacity,
                       int word_length, long node_budget) {
  const SftSpace& space = *action.space;
  PackOutcome out;
  if (atoms.empty()) {
    out.found = true;
    out.exhausted = true;
    return out;
  }
  if (node_budget <= 0) return out;

  std::vector<GroupWord> words = enumerate_words(action, word_length);

  // choose the deepest working depth whose cell count stays small
  const size_t cell_cap = 20000;
  int cap_depth = 0;
  for (const auto& [c, k] : capacity) cap_depth = std::max<int>(cap_depth, c.size());
  for (const PackAtom& a : atoms) cap_depth = std::max<int>(cap_depth, a.cylinder.size());
  int max_depth = cap_depth;
  while (cell_count(space, max_depth + 1, cell_cap) <= cell_cap &&
         max_depth < cap_depth + 64)
    ++max_depth;

  // raw images per (atom, word); words producing cells beyond max_depth are
  // dropped for that atom (the search is then not exhaustive)
  bool dropped = false;
  std::vector<ClopenSet> atom_cyl;
  for (const PackAtom& a : atoms) atom_cyl.push_back(clopen_cylinder(space, a.cylinder));

  int work_depth = std::max(1, cap_depth);
  std::vector<std::vector<std::pair<size_t, ClopenSet>>> raw(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i)
    for (size_t wi = 0; wi < words.size(); ++wi) {
      ClopenSet img = apply_word(action, words[wi], atom_cyl[i]);
      int d = clopen_depth(img);
      if (d > max_depth) {
        dropped = true;
        continue;
      }
      work_depth = std::max(work_depth, d);
      raw[i].push_back({wi, std::move(img)});
    }

  std::vector<Word> cells = admissible_words(space, work_depth);
  std::map<Word, size_t> cell_index;
  for (size_t i = 0; i < cells.size(); ++i) cell_index[cells[i]] = i;
  auto cells_of = [&](const ClopenSet& a) {
    std::vector<size_t> out_cells;
    for (const Word& c : a.cylinders) {
      auto it = cell_index.lower_bound(c);
      for (; it != cell_index.end(); ++it) {
        const Word& w = it->first;
        if (w.size() < c.size() || !std::equal(c.begin(), c.end(), w.begin())) break;
        out_cells.push_back(it->second);
      }
    }
    std::sort(out_cells.begin(), out_cells.end());
    return out_cells;
  };

  std::vector<int> cap(cells.size(), 0);
  for (const auto& [c, k] : capacity)
    for (size_t j : cells_of(clopen_cylinder(space, c))) cap[j] += k;

  // static candidate lists: placements whose image stays inside positive capacity
  struct Candidate {
    size_t word;
    std::vector<size_t> cells;
  };
  std::vector<std::vector<Candidate>> cands(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i)
    for (auto& [wi, img] : raw[i]) {
      std::vector<size_t> cs = cells_of(img);
      bool ok = !cs.empty();
      for (size_t j : cs)
        if (cap[j] <= 0) ok = false;
      if (ok) cands[i].push_back({wi, std::move(cs)});
    }

  // most-constrained atom first (static, stable)
  std::vector<size_t> order(atoms.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return cands[a].size() < cands[b].size();
  });

  long nodes = 0;
  bool cut = false;
  std::vector<size_t> chosen(atoms.size(), 0);
  std::vector<int> remaining = cap;

  auto dfs = [&](auto&& self, size_t k) -> bool {
    if (k == atoms.size()) return true;
    size_t atom = order[k];
    for (size_t ci = 0; ci < cands[atom].size(); ++ci) {
      if (nodes >= node_budget) {
        cut = true;
        return false;
      }
      ++nodes;
      const Candidate& cand = cands[atom][ci];
      bool fits = true;
      for (size_t j : cand.cells)
        if (remaining[j] < 1) {
          fits = false;
          break;
        }
      if (!fits) continue;
      for (size_t j : cand.cells) --remaining[j];
      chosen[atom] = ci;
      if (self(self, k + 1)) return true;
      for (size_t j : cand.cells) ++remaining[j];
      if (cut) return false;
    }
    return false;
  };

  bool found = dfs(dfs, 0);
  out.nodes_used = nodes;
  if (found) {
    out.found = true;
    for (size_t i = 0; i < atoms.size(); ++i)
      out.placements.push_back({atoms[i], words[cands[i][chosen[i]].word]});
    return out;
  }
  out.exhausted = !cut && !dropped;
  return out;
}

// ---------------------------------------------------------------------------

SubequivalenceOutcome search_subequivalence(const Action& action, const ClopenSet& f,
                                            const ClopenSet& o,
                                            const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_same_space(space, f);
  require_same_space(space, o);
  SubequivalenceOutcome out;
  if (is_empty_set(f)) {
    out.status = SearchStatus::Found;
    out.scheme.source = f;
    out.scheme.target = o;
    out.note = "empty source";
    return out;
  }
  if (clopen_contains(space, o, f)) {
    out.status = SearchStatus::Found;
    out.scheme = identity_scheme(space, f, o);
    out.note = "identity embedding";
    return out;
  }

  int sets_depth = std::max(clopen_depth(f), clopen_depth(o));
  GatedOptimum ref = gated_refutation_maximum(action, sets_depth, bounds.depth,
                                              bounds.word_length, signed_objective(f, o));
  if (ref.attempted && ref.opt.feasible && !ref.opt.unbounded &&
      ref.opt.maximum > 0) {
    require_internal(
        evaluate_content(space, ref.opt.content, f) >
            evaluate_content(space, ref.opt.content, o),
        "refutation content does not separate the sets");
    out.status = SearchStatus::Refuted;
    out.refutation = ref.opt.content;
    out.note = "an invariant content gives the source more mass than the target (" +
               ref.note + ")";
    return out;
  }

  long budget = bounds.node_budget;
  if (auto s = packed_subequivalence(action, f, o, bounds, &budget)) {
    out.status = SearchStatus::Found;
    out.scheme = *s;
    return out;
  }
  out.status = SearchStatus::NotFound;
  out.note = budget <= 0 ? "node budget exhausted" : "no packing within bounds";
  return out;
}

SubequivalenceScheme compose_schemes(const Action& action,
                                     const SubequivalenceScheme& s1,
                                     const SubequivalenceScheme& s2) {
  const SftSpace& space = *action.space;
  VerifyReport r1 = verify_scheme(action, s1);
  if (!r1.pass) throw SchemeInvalid("first scheme: " + r1.clause);
  VerifyReport r2 = verify_scheme(action, s2);
  if (!r2.pass) throw SchemeInvalid("second scheme: " + r2.clause);
  if (!clopen_contains(space, s2.source, s1.target))
    throw HypothesisMismatch("second scheme's source does not contain the first's target");

  SubequivalenceScheme out;
  out.source = s1.source;
  out.target = s2.target;
  for (const SchemePiece& p : s1.pieces) {
    ClopenSet img = apply_word(action, p.word, clopen_cylinder(space, p.piece));
    GroupWord winv = invert_word(p.word);
    for (const SchemePiece& q : s2.pieces) {
      ClopenSet overlap =
          clopen_intersection(space, img, clopen_cylinder(space, q.piece));
      if (is_empty_set(overlap)) continue;
      ClopenSet pre = apply_word(action, winv, overlap);
      GroupWord both = concat_words(q.word, p.word);
      for (const Word& c : pre.cylinders) out.pieces.push_back({c, both});
    }
  }
  out = sort_pieces(std::move(out));
  VerifyReport rep = verify_scheme(action, out);
  require_internal(rep.pass, "composed scheme failed verification: " + rep.clause);
  return out;
}

SubequivalenceScheme restrict_scheme(const Action& action,
                                     const SubequivalenceScheme& s,
                                     const ClopenSet& sub_source) {
  const SftSpace& space = *action.space;
  VerifyReport r = verify_scheme(action, s);
  if (!r.pass) throw SchemeInvalid(r.clause);
  if (!clopen_contains(space, s.source, sub_source))
    throw HypothesisMismatch("restriction set is not inside the scheme source");
  SubequivalenceScheme out;
  out.source = canonicalize(space, sub_source.cylinders);
  out.target = s.target;
  for (const SchemePiece& p : s.pieces) {
    ClopenSet overlap =
        clopen_intersection(space, clopen_cylinder(space, p.piece), out.source);
    for (const Word& c : overlap.cylinders) out.pieces.push_back({c, p.word});
  }
  out = sort_pieces(std::move(out));
  VerifyReport rep = verify_scheme(action, out);
  require_internal(rep.pass, "restricted scheme failed verification: " + rep.clause);
  return out;
}

// ---------------------------------------------------------------------------

ParadoxicalOutcome check_paradoxical(const Action& action, const ClopenSet& a,
                                     const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_same_space(space, a);
  ParadoxicalOutcome out;

  if (is_empty_set(a)) {
    ParadoxicalWitness w;
    w.a = a;
    w.o1 = clopen_empty(space);
    w.o2 = clopen_empty(space);
    w.s1.source = a;
    w.s1.target = w.o1;
    w.s2.source = a;
    w.s2.target = w.o2;
    out.status = SearchStatus::Found;
    out.witness = w;
    out.note = "degenerate: empty set";
    return out;
  }

  // refutation: a normalized invariant content excludes any in-bounds witness
  GatedFeasibility ref = gated_refutation_normalized(action, a, bounds.depth,
                                                     bounds.word_length);
  if (ref.attempted && ref.out.feasible) {
    out.status = SearchStatus::Refuted;
    out.refutation = ref.out.content;
    out.note = "an invariant content normalizes the set (" + ref.note + ")";
    return out;
  }

  long budget = bounds.node_budget;
  std::vector<GroupWord> words = enumerate_words(action, bounds.word_length);
  std::vector<ClopenSet> images;
  images.reserve(words.size());
  for (const GroupWord& w : words) images.push_back(apply_word(action, w, a));

  // single-word doubling: two words shrink the set into disjoint copies
  for (size_t i = 0; i < words.size(); ++i) {
    if (!clopen_contains(space, a, images[i])) continue;
    for (size_t j = 0; j < words.size(); ++j) {
      if (j == i) continue;
      if (--budget <= 0) break;
      if (!clopen_contains(space, a, images[j])) continue;
      if (!clopen_disjoint(space, images[i], images[j])) continue;
      ParadoxicalWitness w;
      w.a = a;
      w.o1 = images[i];
      w.o2 = images[j];
      w.s1.source = a;
      w.s1.target = w.o1;
      w.s2.source = a;
      w.s2.target = w.o2;
      for (const Word& c : a.cylinders) {
        w.s1.pieces.push_back({c, words[i]});
        w.s2.pieces.push_back({c, words[j]});
      }
      VerifyReport rep = verify_paradoxical(action, w);
      require_internal(rep.pass, "single-word witness failed verification: " + rep.clause);
      out.status = SearchStatus::Found;
      out.witness = w;
      out.note = "single-word doubling";
      return out;
    }
    if (budget <= 0) break;
  }

  // fallback: pick two disjoint target cylinders inside the set and pack both
  std::vector<Word> candidates;
  for (const Word& c : a.cylinders)
    for (int d = static_cast<int>(c.size());
         d <= static_cast<int>(c.size()) + bounds.depth; ++d)
      for (const Word& w : refine(space, clopen_cylinder(space, c), d))
        candidates.push_back(w);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Word& x, const Word& y) {
                     if (x.size() != y.size()) return x.size() < y.size();
                     return word_less(x, y);
                   });
  for (size_t i = 0; i < candidates.size() && budget > 0; ++i)
    for (size_t j = i + 1; j < candidates.size() && budget > 0; ++j) {
      ClopenSet o1 = clopen_cylinder(space, candidates[i]);
      ClopenSet o2 = clopen_cylinder(space, candidates[j]);
      if (!clopen_disjoint(space, o1, o2)) continue;
      auto s1 = packed_subequivalence(action, a, o1, bounds, &budget);
      if (!s1) continue;
      auto s2 = packed_subequivalence(action, a, o2, bounds, &budget);
      if (!s2) continue;
      ParadoxicalWitness w;
      w.a = a;
      w.o1 = o1;
      w.o2 = o2;
      w.s1 = *s1;
      w.s2 = *s2;
      VerifyReport rep = verify_paradoxical(action, w);
      require_internal(rep.pass, "packed witness failed verification: " + rep.clause);
      out.status = SearchStatus::Found;
      out.witness = w;
      out.note = "packed doubling";
      return out;
    }

  out.status = SearchStatus::NotFound;
  out.note = budget <= 0 ? "node budget exhausted" : "no witness within bounds";
  if (!ref.note.empty()) out.note += "; refutation: " + ref.note;
  return out;
}

std::vector<MultiTarget> multi_subequivalence(const Action& action, const ClopenSet& f,
                                              const ClopenSet& o, int n,
                                              const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_same_space(space, f);
  require_same_space(space, o);
  if (n < 1) throw BadParams("the number of targets must be at least 1");

  std::vector<SubequivalenceScheme> schemes;

  if (is_empty_set(f)) {
    for (int i = 0; i < n; ++i) {
      SubequivalenceScheme s;
      s.source = f;
      s.target = clopen_empty(space);
      schemes.push_back(s);
    }
  } else {
    // direct phase: greedily pack single-word images of the source into the
    // region; an image consuming all remaining room is skipped while at least
    // two more targets are needed (it would block them).
    ClopenSet room = o;
    for (const GroupWord& w : enumerate_words(action, bounds.word_length)) {
      if (schemes.size() >= static_cast<size_t>(n)) break;
      ClopenSet img = apply_word(action, w, f);
      if (!clopen_contains(space, room, img)) continue;
      if (static_cast<size_t>(n) - schemes.size() >= 2 && img == room) continue;
      SubequivalenceScheme s;
      s.source = f;
      s.target = img;
      for (const Word& c : f.cylinders) s.pieces.push_back({c, w});
      s = sort_pieces(std::move(s));
      VerifyReport rep = verify_scheme(action, s);
      require_internal(rep.pass,
                       "direct multi-target scheme failed verification: " + rep.clause);
      room = clopen_difference(space, room, img);
      schemes.push_back(std::move(s));
    }
  }

  if (schemes.empty()) {
    SubequivalenceOutcome first = search_subequivalence(action, f, o, bounds);
    if (first.status != SearchStatus::Found)
      throw NoParadoxicalWitness("no embedding of the source into the region");
    SubequivalenceScheme start = first.scheme;
    start.target = image_union(action, start);
    schemes.push_back(std::move(start));
  }

  // splitting phase: double the front target until there are enough
  while (schemes.size() < static_cast<size_t>(n)) {
    SubequivalenceScheme cur = schemes.front();
    ParadoxicalOutcome twice = check_paradoxical(action, cur.target, bounds);
    if (twice.status != SearchStatus::Found || !twice.witness)
      throw NoParadoxicalWitness("a doubling node could not be established: " +
                                 twice.note);
    SubequivalenceScheme left = compose_schemes(action, cur, twice.witness->s1);
    SubequivalenceScheme right = compose_schemes(action, cur, twice.witness->s2);
    left.target = image_union(action, left);
    right.target = image_union(action, right);
    schemes.erase(schemes.begin());
    schemes.push_back(std::move(left));
    schemes.push_back(std::move(right));
  }
  schemes.resize(static_cast<size_t>(n));

  std::vector<MultiTarget> out;
  for (const SubequivalenceScheme& s : schemes) {
    VerifyReport rep = verify_scheme(action, s);
    require_internal(rep.pass, "multi-target scheme failed verification: " + rep.clause);
    require_internal(clopen_contains(space, o, s.target),
                     "multi-target escapes the region");
    out.push_back({s.target, s});
  }
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = i + 1; j < out.size(); ++j)
      require_internal(clopen_disjoint(space, out[i].target, out[j].target),
                       "multi-targets overlap");
  return out;
}

WeakParadoxicalOutcome check_weak_paradoxical(const Action& action, const ClopenSet& f,
                                              const ClopenSet& o,
                                              const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_same_space(space, f);
  require_same_space(space, o);
  WeakParadoxicalOutcome out;

  if (is_empty_set(f)) {
    out.status = WeakParadoxicalStatus::Found;
    SubequivalenceScheme s;
    s.source = f;
    s.target = o;
    out.scheme = s;
    out.note = "empty source";
    return out;
  }

  // greedy translate cover of F by O
  std::vector<GroupWord> words = enumerate_words(action, bounds.word_length);
  std::vector<GroupWord> cover;
  std::vector<ClopenSet> cover_images;
  ClopenSet remaining = f;
  for (const GroupWord& w : words) {
    if (is_empty_set(remaining)) break;
    ClopenSet img = apply_word(action, w, o);
    if (clopen_disjoint(space, img, remaining)) continue;
    cover.push_back(w);
    cover_images.push_back(img);
    remaining = clopen_difference(space, remaining, img);
  }
  if (!is_empty_set(remaining)) {
    auto [sat, stable] = invariant_clopen_saturation(action, o, bounds.word_length + 1);
    if (stable && !clopen_contains(space, sat, f)) {
      out.status = WeakParadoxicalStatus::NotCovered;
      out.saturation = sat;
      out.note = "the stable saturation of the target misses part of the source";
      return out;
    }
    out.status = WeakParadoxicalStatus::NotFound;
    out.note = "no translate cover within the word bound";
    return out;
  }

  std::vector<MultiTarget> targets;
  try {
    targets = multi_subequivalence(action, o, o, static_cast<int>(cover.size()), bounds);
  } catch (const NoParadoxicalWitness& e) {
    out.status = WeakParadoxicalStatus::NotFound;
    out.note = std::string("cover found, but the target does not multiply: ") + e.what();
    return out;
  }

  SubequivalenceScheme total;
  total.source = f;
  total.target = o;
  ClopenSet left = f;
  for (size_t i = 0; i < cover.size(); ++i) {
    ClopenSet part = clopen_intersection(space, left, cover_images[i]);
    left = clopen_difference(space, left, cover_images[i]);
    if (is_empty_set(part)) continue;
    SubequivalenceScheme into_o;
    into_o.source = part;
    into_o.target = o;
    GroupWord back = invert_word(cover[i]);
    for (const Word& c : part.cylinders) into_o.pieces.push_back({c, back});
    into_o = sort_pieces(std::move(into_o));
    VerifyReport rep = verify_scheme(action, into_o);
    require_internal(rep.pass, "cover pull-back failed verification: " + rep.clause);
    SubequivalenceScheme chained = compose_schemes(action, into_o, targets[i].scheme);
    for (const SchemePiece& p : chained.pieces) total.pieces.push_back(p);
  }
  total = sort_pieces(std::move(total));
  VerifyReport rep = verify_scheme(action, total);
  require_internal(rep.pass, "weak-paradoxical scheme failed verification: " + rep.clause);
  out.status = WeakParadoxicalStatus::Found;
  out.scheme = total;
  out.cover_words = cover;
  out.note = "translate cover with " + std::to_string(cover.size()) + " words";
  return out;
}

// ---------------------------------------------------------------------------

NFillingReport check_n_filling(const Action& action, int n, int depth,
                               const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (n < 2) throw BadParams("filling degree must be at least 2");
  if (depth < 1) throw DepthTooSmall("filling depth must be at least 1");
  NFillingReport report;
  report.n = n;
  report.depth = depth;

  std::vector<Word> cells = admissible_words(space, depth);
  GroupEnumeration group = enumerate_group(action, bounds.word_length);
  // images of every cell under every word, shared across tuples
  std::vector<std::vector<ClopenSet>> images(cells.size());
  std::vector<ClopenSet> reach(cells.size(), clopen_empty(space));
  for (size_t c = 0; c < cells.size(); ++c) {
    images[c].reserve(group.words.size());
    for (const GroupWord& w : group.words) {
      images[c].push_back(apply_word(action, w, clopen_cylinder(space, cells[c])));
      reach[c] = clopen_union(space, reach[c], images[c].back());
    }
  }

  long budget = bounds.node_budget;
  std::vector<size_t> tuple(static_cast<size_t>(n), 0);
  bool all_pass = true, any_fail = false;

  auto run_tuple = [&](const std::vector<size_t>& pick) {
    NFillingTupleEntry entry;
    for (size_t c : pick) entry.tuple.push_back(cells[c]);

    // suffix reach for pruning
    std::vector<ClopenSet> suffix(pick.size() + 1, clopen_empty(space));
    for (size_t i = pick.size(); i-- > 0;)
      suffix[i] = clopen_union(space, suffix[i + 1], reach[pick[i]]);

    std::vector<size_t> chosen(pick.size(), 0);
    bool cut = false;
    auto dfs = [&](auto&& self, size_t slot, const ClopenSet& uncovered) -> bool {
      if (is_empty_set(uncovered)) {
        for (size_t r = slot; r < pick.size(); ++r) chosen[r] = 0;
        return true;
      }
      if (slot == pick.size()) return false;
      if (!clopen_contains(space, suffix[slot], uncovered)) return false;
      for (size_t wi = 0; wi < group.words.size(); ++wi) {
        if (--budget <= 0) {
          cut = true;
          return false;
        }
        ClopenSet next = clopen_difference(space, uncovered, images[pick[slot]][wi]);
        chosen[slot] = wi;
        if (self(self, slot + 1, next)) return true;
        if (cut) return false;
      }
      return false;
    };
    bool covered = dfs(dfs, 0, clopen_full(space));
    if (covered) {
      entry.status = CheckStatus::Pass;
      for (size_t i = 0; i < pick.size(); ++i) entry.cover.push_back(group.words[chosen[i]]);
      ClopenSet check = clopen_empty(space);
      for (size_t i = 0; i < pick.size(); ++i)
        check = clopen_union(space, check,
                             apply_word(action, entry.cover[i],
                                        clopen_cylinder(space, entry.tuple[i])));
      require_internal(is_full_set(check), "filling cover does not cover");
      return entry;
    }
    if (!cut && group.closed) {
      entry.status = CheckStatus::Fail;
      entry.group_exhausted = true;
    }
    // measure obstruction: some invariant content gives the tuple total mass < 1
    Normalization obj;
    for (size_t c : pick) obj.push_back({cells[c], Rational(-1)});
    GatedOptimum ref =
        gated_refutation_maximum(action, depth, bounds.depth, bounds.word_length, obj);
    if (ref.attempted && ref.opt.feasible && !ref.opt.unbounded &&
        -ref.opt.maximum < 1) {
      Rational total = 0;
      for (size_t c : pick)
        total += evaluate_content(space, ref.opt.content,
                                  clopen_cylinder(space, cells[c]));
      require_internal(total < 1, "obstruction content does not obstruct");
      entry.status = CheckStatus::Fail;
      entry.obstruction = ref.opt.content;
    }
    return entry;
  };

  // non-decreasing index tuples = unordered tuples with repetition
  auto next_tuple = [&](std::vector<size_t>& t) {
    size_t i = t.size();
    while (i-- > 0) {
      if (t[i] + 1 < cells.size()) {
        ++t[i];
        for (size_t j = i + 1; j < t.size(); ++j) t[j] = t[i];
        return true;
      }
    }
    return false;
  };
  do {
    NFillingTupleEntry entry = run_tuple(tuple);
    if (entry.status != CheckStatus::Pass) all_pass = false;
    if (entry.status == CheckStatus::Fail) any_fail = true;
    report.entries.push_back(std::move(entry));
    if (budget <= 0) {
      all_pass = false;
      report.note = "node budget exhausted";
      break;
    }
  } while (next_tuple(tuple));

  report.status = any_fail ? CheckStatus::Fail
                           : (all_pass ? CheckStatus::Pass : CheckStatus::Inconclusive);
  if (group.closed && report.note.empty())
    report.note = "word enumeration closed: the acting group is finite";
  return report;
}

StrongBoundaryReport check_strong_boundary(const Action& action, int depth,
                                           const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (depth < 1) throw DepthTooSmall("boundary depth must be at least 1");
  StrongBoundaryReport report;
  report.depth = depth;

  std::vector<Word> cells = admissible_words(space, depth);
  GroupEnumeration group = enumerate_group(action, bounds.word_length);
  long budget = bounds.node_budget;
  bool all_pass = true, any_fail = false;

  for (const Word& fc : cells) {
    if (budget <= 0) break;
    for (const Word& oc : cells) {
      StrongBoundaryPairEntry entry;
      entry.f = clopen_complement(space, clopen_cylinder(space, fc));
      entry.o = clopen_cylinder(space, oc);
      if (is_empty_set(entry.f)) {
        entry.status = CheckStatus::Pass;  // single-cell space: nothing to move
        report.entries.push_back(std::move(entry));
        continue;
      }
      bool scan_complete = true;
      for (const GroupWord& w : group.words) {
        if (--budget <= 0) {
          scan_complete = false;
          break;
        }
        if (clopen_contains(space, entry.o, apply_word(action, w, entry.f))) {
          entry.status = CheckStatus::Pass;
          entry.word = w;
          break;
        }
      }
      if (entry.status != CheckStatus::Pass) {
        if (scan_complete && group.closed) {
          entry.status = CheckStatus::Fail;
          entry.group_exhausted = true;
        }
        GatedOptimum ref = gated_refutation_maximum(
            action, depth, bounds.depth, bounds.word_length,
            signed_objective(entry.f, entry.o));
        if (ref.attempted && ref.opt.feasible && !ref.opt.unbounded &&
            ref.opt.maximum > 0) {
          entry.status = CheckStatus::Fail;
          entry.obstruction = ref.opt.content;
        }
      }
      if (entry.status != CheckStatus::Pass) all_pass = false;
      if (entry.status == CheckStatus::Fail) any_fail = true;
      report.entries.push_back(std::move(entry));
      if (budget <= 0) {
        all_pass = false;
        report.note = "node budget exhausted";
        break;
      }
    }
  }

  report.status = any_fail ? CheckStatus::Fail
                           : (all_pass ? CheckStatus::Pass : CheckStatus::Inconclusive);
  if (report.note.empty())
    report.note = "maximal pairs only: complement of one cell against one cell";
  return report;
}

TowerOutcome find_open_tower(const Action& action, const std::vector<GroupWord>& words,
                             const ClopenSet& u, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_same_space(space, u);
  TowerOutcome out;
  if (is_empty_set(u)) {
    out.note = "empty base region";
    return out;
  }
  int coarse = clopen_depth(u);
  for (int level = coarse; level <= std::max(coarse, bounds.depth); ++level) {
    std::vector<Word> atoms;
    for (const Word& c : u.cylinders) {
      if (static_cast<int>(c.size()) >= level) {
        atoms.push_back(c);
      } else {
        for (const Word& w : refine(space, clopen_cylinder(space, c), level))
          atoms.push_back(w);
      }
    }
    ClopenSet base = clopen_empty(space);
    std::vector<ClopenSet> translated(words.size(), clopen_empty(space));
    for (const Word& cell : atoms) {
      ClopenSet cand = clopen_cylinder(space, cell);
      std::vector<ClopenSet> cand_images;
      bool ok = true;
      for (size_t i = 0; i < words.size() && ok; ++i)
        cand_images.push_back(apply_word(action, words[i], cand));
      for (size_t i = 0; i < words.size() && ok; ++i)
        for (size_t j = 0; j < words.size() && ok; ++j) {
          if (i == j) continue;
          // new piece of image i against both the standing and the new image j
          if (!clopen_disjoint(space, cand_images[i], translated[j])) ok = false;
          if (i < j && !clopen_disjoint(space, cand_images[i], cand_images[j])) ok = false;
        }
      if (!ok) continue;
      base = clopen_union(space, base, cand);
      for (size_t i = 0; i < words.size(); ++i)
        translated[i] = clopen_union(space, translated[i], cand_images[i]);
    }
    if (!is_empty_set(base)) {
      TowerWitness w;
      w.words = words;
      w.base = base;
      require_internal(verify_tower(action, w), "greedy tower failed verification");
      out.status = SearchStatus::Found;
      out.witness = w;
      out.note = "greedy base at depth " + std::to_string(level);
      return out;
    }
  }
  out.status = SearchStatus::NotFound;
  out.note = "no nonempty base within the depth bound";
  return out;
}

}  // namespace cantordyn
