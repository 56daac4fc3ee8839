#include "cantordyn/typesemigroup.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cantordyn {

namespace {

int clopen_depth(const ClopenSet& a) {
  int d = 0;
  for (const Word& w : a.cylinders) d = std::max<int>(d, static_cast<int>(w.size()));
  return d;
}

void require_internal(bool ok, const std::string& what) {
  if (!ok) throw Error("internal: " + what);
}

// well-formedness of a level chain: nonempty levels, descending
void require_type(const SftSpace& space, const TypeElement& f) {
  if (f.space_tag != space.tag)
    throw SpaceMismatch("type element belongs to a different space");
  for (size_t i = 0; i < f.levels.size(); ++i) {
    require_same_space(space, f.levels[i]);
    if (is_empty_set(f.levels[i]))
      throw BadParams("type element has an empty level");
    if (i > 0 && !clopen_contains(space, f.levels[i - 1], f.levels[i]))
      throw BadParams("type element levels are not a descending chain");
  }
}

// {f >= i} with the conventions level 0 = X, level > n = empty
ClopenSet level_at(const SftSpace& space, const TypeElement& f, int i) {
  if (i <= 0) return clopen_full(space);
  if (i > static_cast<int>(f.levels.size())) return clopen_empty(space);
  return f.levels[static_cast<size_t>(i) - 1];
}

// one unit part (cylinder, 1) per level cylinder, moved by the identity;
// verifies f <= g whenever f <= g pointwise
OrderWitness identity_order_witness(const TypeElement& f) {
  OrderWitness w;
  for (const ClopenSet& lv : f.levels)
    for (const Word& c : lv.cylinders) w.parts.push_back({{{c, 1}}, GroupWord{}});
  return w;
}

// +1 per left level cylinder, -1 per right level cylinder: the LP objective
// evaluates to integral(f) - integral(g)
Normalization signed_level_objective(const TypeElement& f, const TypeElement& g) {
  Normalization obj;
  for (const ClopenSet& lv : f.levels)
    for (const Word& c : lv.cylinders) obj.push_back({c, Rational(1)});
  for (const ClopenSet& lv : g.levels)
    for (const Word& c : lv.cylinders) obj.push_back({c, Rational(-1)});
  return obj;
}

// leveled packing front end: unit atoms from f's levels against the stacked
// capacity of g's levels (overlapping level cylinders accumulate per cell)
std::optional<OrderWitness> packed_order(const Action& action, const TypeElement& f,
                                         const TypeElement& g,
                                         const SearchBounds& bounds, long* budget) {
  const SftSpace& space = *action.space;
  std::vector<std::pair<Word, int>> capacity;
  for (const ClopenSet& lv : g.levels)
    for (const Word& c : lv.cylinders) capacity.push_back({c, 1});
  int coarse = std::max(1, max_cylinder_depth(f));
  for (int level = coarse; level <= std::max(coarse, bounds.depth); ++level) {
    std::vector<PackAtom> atoms;
    for (size_t li = 0; li < f.levels.size(); ++li)
      for (const Word& c : f.levels[li].cylinders) {
        if (static_cast<int>(c.size()) >= level) {
          atoms.push_back({c, static_cast<int>(li)});
        } else {
          for (const Word& w : refine(space, clopen_cylinder(space, c), level))
            atoms.push_back({w, static_cast<int>(li)});
        }
      }
    PackOutcome packed = pack_atoms(action, atoms, capacity, bounds.word_length, *budget);
    *budget -= packed.nodes_used;
    if (packed.found) {
      OrderWitness w;
      for (const PackPlacement& p : packed.placements)
        w.parts.push_back({{{p.atom.cylinder, 1}}, p.word});
      VerifyReport rep = verify_order_witness(action, f, g, w);
      require_internal(rep.pass, "packed order witness failed verification: " + rep.clause);
      return w;
    }
    if (*budget <= 0) break;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

TypeElement canonical_type_element(const SftSpace& space,
                                   const std::vector<std::pair<Word, int>>& parts) {
  int depth = 0;
  for (const auto& [w, m] : parts) {
    require_admissible(space, w);
    if (m < 0) throw BadParams("negative multiplicity in a type element part");
    depth = std::max<int>(depth, static_cast<int>(w.size()));
  }
  TypeElement f;
  f.space_tag = space.tag;
  std::vector<Word> cells = admissible_words(space, depth);
  std::vector<int> vals(cells.size(), 0);
  int top = 0;
  for (size_t c = 0; c < cells.size(); ++c) {
    for (const auto& [w, m] : parts)
      if (std::equal(w.begin(), w.end(), cells[c].begin())) vals[c] += m;
    top = std::max(top, vals[c]);
  }
  for (int i = 1; i <= top; ++i) {
    std::vector<Word> level;
    for (size_t c = 0; c < cells.size(); ++c)
      if (vals[c] >= i) level.push_back(cells[c]);
    f.levels.push_back(canonicalize(space, level));
  }
  return f;
}

TypeElement type_zero(const SftSpace& space) {
  TypeElement f;
  f.space_tag = space.tag;
  return f;
}

TypeElement type_indicator(const SftSpace& space, const ClopenSet& a) {
  require_same_space(space, a);
  TypeElement f;
  f.space_tag = space.tag;
  if (!is_empty_set(a)) f.levels.push_back(a);
  return f;
}

TypeElement add(const SftSpace& space, const TypeElement& f, const TypeElement& g) {
  require_type(space, f);
  require_type(space, g);
  TypeElement r;
  r.space_tag = space.tag;
  int nf = static_cast<int>(f.levels.size());
  int ng = static_cast<int>(g.levels.size());
  for (int i = 1; i <= nf + ng; ++i) {
    // {f+g >= i} = union over j of {f >= j} meet {g >= i-j}
    ClopenSet u = clopen_empty(space);
    for (int j = std::max(0, i - ng); j <= std::min(i, nf); ++j)
      u = clopen_union(space, u,
                       clopen_intersection(space, level_at(space, f, j),
                                           level_at(space, g, i - j)));
    if (is_empty_set(u)) break;
    r.levels.push_back(u);
  }
  return r;
}

TypeElement scale(const SftSpace& space, const TypeElement& f, int n) {
  require_type(space, f);
  if (n < 0) throw BadParams("negative scalar for a type element");
  TypeElement r;
  r.space_tag = space.tag;
  if (n == 0) return r;
  int nf = static_cast<int>(f.levels.size());
  for (int i = 1; i <= n * nf; ++i)
    r.levels.push_back(f.levels[static_cast<size_t>((i + n - 1) / n) - 1]);
  return r;
}

std::vector<int> type_values_at_depth(const SftSpace& space, const TypeElement& f,
                                      int depth) {
  require_type(space, f);
  if (depth < 0) throw BadParams("negative depth");
  if (depth < max_cylinder_depth(f))
    throw DepthExceeded("type element has cylinders deeper than the table depth");
  std::vector<Word> cells = admissible_words(space, depth);
  std::vector<int> vals(cells.size(), 0);
  for (size_t c = 0; c < cells.size(); ++c)
    for (const ClopenSet& lv : f.levels)
      if (clopen_contains_cylinder(space, lv, cells[c])) ++vals[c];
  return vals;
}

int max_cylinder_depth(const TypeElement& f) {
  int d = 0;
  for (const ClopenSet& lv : f.levels) d = std::max(d, clopen_depth(lv));
  return d;
}

bool pointwise_leq(const SftSpace& space, const TypeElement& f, const TypeElement& g) {
  require_type(space, f);
  require_type(space, g);
  if (f.levels.size() > g.levels.size()) return false;
  for (size_t i = 0; i < f.levels.size(); ++i)
    if (!clopen_contains(space, g.levels[i], f.levels[i])) return false;
  return true;
}

Rational integrate(const SftSpace& space, const InvariantContent& mu,
                   const TypeElement& f) {
  require_type(space, f);
  Rational total = 0;
  for (const ClopenSet& lv : f.levels) total += evaluate_content(space, mu, lv);
  return total;
}

// ---------------------------------------------------------------------------

VerifyReport verify_order_witness(const Action& action, const TypeElement& f,
                                  const TypeElement& g, const OrderWitness& w) {
  const SftSpace& space = *action.space;
  require_type(space, f);
  require_type(space, g);
  VerifyReport rep;
  for (const OrderPart& part : w.parts)
    for (const auto& [c, m] : part.h) {
      if (!is_admissible(space, c)) {
        rep.clause = "part cylinder inadmissible: '" + word_to_string(space, c) + "'";
        return rep;
      }
      if (m < 0) {
        rep.clause = "part has a negative multiplicity";
        return rep;
      }
    }
  std::vector<std::pair<Word, int>> all;
  for (const OrderPart& part : w.parts)
    for (const auto& e : part.h) all.push_back(e);
  if (!(canonical_type_element(space, all) == f)) {
    rep.clause = "parts do not sum to the left element";
    return rep;
  }
  std::vector<std::pair<Word, int>> moved;
  for (const OrderPart& part : w.parts)
    for (const auto& [c, m] : part.h) {
      if (m == 0) continue;
      ClopenSet img = apply_word(action, part.word, clopen_cylinder(space, c));
      for (const Word& ic : img.cylinders) moved.push_back({ic, m});
    }
  if (!pointwise_leq(space, canonical_type_element(space, moved), g)) {
    rep.clause = "translated parts exceed the right element";
    return rep;
  }
  rep.pass = true;
  return rep;
}

OrderOutcome search_order(const Action& action, const TypeElement& f,
                          const TypeElement& g, const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  require_type(space, f);
  require_type(space, g);
  OrderOutcome out;
  if (f.is_zero()) {
    out.status = SearchStatus::Found;
    out.note = "zero element";
    return out;
  }
  if (pointwise_leq(space, f, g)) {
    out.status = SearchStatus::Found;
    out.witness = identity_order_witness(f);
    require_internal(verify_order_witness(action, f, g, out.witness).pass,
                     "identity order witness failed verification");
    out.note = "identity embedding";
    return out;
  }

  int sets_depth = std::max(max_cylinder_depth(f), max_cylinder_depth(g));
  GatedOptimum ref = gated_refutation_maximum(action, sets_depth, bounds.depth,
                                              bounds.word_length,
                                              signed_level_objective(f, g));
  if (ref.attempted && ref.opt.feasible && !ref.opt.unbounded && ref.opt.maximum > 0) {
    require_internal(integrate(space, ref.opt.content, f) >
                         integrate(space, ref.opt.content, g),
                     "refutation content does not separate the elements");
    out.status = SearchStatus::Refuted;
    out.refutation = ref.opt.content;
    out.note = "an invariant content gives the left element more mass than the right (" +
               ref.note + ")";
    return out;
  }

  long budget = bounds.node_budget;
  if (auto w = packed_order(action, f, g, bounds, &budget)) {
    out.status = SearchStatus::Found;
    out.witness = *w;
    out.note = "packed atoms";
    return out;
  }
  out.status = SearchStatus::NotFound;
  out.note = budget <= 0 ? "node budget exhausted" : "no packing within bounds";
  return out;
}

OrderWitness compose_order_witnesses(const Action& action, const TypeElement& f,
                                     const TypeElement& g, const TypeElement& h,
                                     const OrderWitness& w1, const OrderWitness& w2) {
  const SftSpace& space = *action.space;
  VerifyReport r1 = verify_order_witness(action, f, g, w1);
  if (!r1.pass) throw SchemeInvalid("first witness: " + r1.clause);
  VerifyReport r2 = verify_order_witness(action, g, h, w2);
  if (!r2.pass) throw SchemeInvalid("second witness: " + r2.clause);

  // unit blocks of both witnesses, in deterministic order
  struct InUnit {
    ClopenSet image;
    GroupWord word;
    GroupWord inverse;
  };
  std::vector<InUnit> in_units;
  for (const OrderPart& part : w1.parts)
    for (const auto& [c, m] : part.h)
      for (int t = 0; t < m; ++t)
        in_units.push_back({apply_word(action, part.word, clopen_cylinder(space, c)),
                            part.word, invert_word(part.word)});
  std::vector<std::pair<Word, const OrderPart*>> g_units;
  for (const OrderPart& part : w2.parts)
    for (const auto& [c, m] : part.h)
      for (int t = 0; t < m; ++t) g_units.push_back({c, &part});

  int depth = 0;
  for (const InUnit& u : in_units) depth = std::max(depth, clopen_depth(u.image));
  for (const auto& [c, part] : g_units)
    depth = std::max(depth, static_cast<int>(c.size()));

  // per cell: the ordered stack of interface units covering it
  std::map<Word, std::vector<size_t>> g_stack;
  for (size_t u = 0; u < g_units.size(); ++u)
    for (const Word& cell :
         refine(space, clopen_cylinder(space, g_units[u].first), depth))
      g_stack[cell].push_back(u);

  // route each incoming unit layer through the interface unit at its layer;
  // pieces routed to one interface unit are pulled back together
  std::map<Word, int> in_layer;
  OrderWitness out;
  for (const InUnit& unit : in_units) {
    std::map<size_t, std::vector<Word>> routed;
    for (const Word& cell : refine(space, unit.image, depth)) {
      int layer = in_layer[cell]++;
      auto it = g_stack.find(cell);
      require_internal(it != g_stack.end() &&
                           layer < static_cast<int>(it->second.size()),
                       "translated mass exceeds the interface element");
      routed[it->second[layer]].push_back(cell);
    }
    for (auto& [gu, cells] : routed) {
      const OrderPart& p2 = *g_units[gu].second;
      ClopenSet pre = apply_word(action, unit.inverse, canonicalize(space, cells));
      OrderPart np;
      np.word = concat_words(p2.word, unit.word);
      for (const Word& c : pre.cylinders) np.h.push_back({c, 1});
      out.parts.push_back(std::move(np));
    }
  }
  VerifyReport rc = verify_order_witness(action, f, h, out);
  require_internal(rc.pass, "composed order witness failed verification: " + rc.clause);
  return out;
}

OrderWitness sum_order_witnesses(const OrderWitness& w1, const OrderWitness& w2) {
  OrderWitness r = w1;
  r.parts.insert(r.parts.end(), w2.parts.begin(), w2.parts.end());
  return r;
}

OrderWitness order_witness_from_paradoxical(const Action& action,
                                            const ParadoxicalWitness& w) {
  const SftSpace& space = *action.space;
  VerifyReport r = verify_paradoxical(action, w);
  if (!r.pass) throw SchemeInvalid(r.clause);
  OrderWitness out;
  for (const SchemePiece& p : w.s1.pieces) out.parts.push_back({{{p.piece, 1}}, p.word});
  for (const SchemePiece& p : w.s2.pieces) out.parts.push_back({{{p.piece, 1}}, p.word});
  TypeElement one = type_indicator(space, w.a);
  VerifyReport rc = verify_order_witness(action, scale(space, one, 2), one, out);
  require_internal(rc.pass, "doubling witness failed verification: " + rc.clause);
  return out;
}

ParadoxicalWitness paradoxical_from_order_witness(const Action& action,
                                                  const ClopenSet& a,
                                                  const OrderWitness& w) {
  const SftSpace& space = *action.space;
  require_same_space(space, a);
  TypeElement one = type_indicator(space, a);
  VerifyReport r = verify_order_witness(action, scale(space, one, 2), one, w);
  if (!r.pass) throw SchemeInvalid(r.clause);

  // a verified witness for 2*1_A <= 1_A stacks unit masses exactly twice on
  // A; the cell's first layer goes to the first scheme, the second to the
  // second scheme
  int depth = clopen_depth(a);
  for (const OrderPart& part : w.parts)
    for (const auto& [c, m] : part.h)
      depth = std::max<int>(depth, static_cast<int>(c.size()));
  std::map<Word, int> seen;
  SubequivalenceScheme s1, s2;
  for (const OrderPart& part : w.parts)
    for (const auto& [c, m] : part.h) {
      if (m == 0) continue;
      for (const Word& cell : refine(space, clopen_cylinder(space, c), depth)) {
        int start = seen[cell]++;
        require_internal(start < 2, "doubling witness stacks a cell more than twice");
        (start == 0 ? s1 : s2).pieces.push_back({cell, part.word});
      }
    }

  auto finish = [&](SubequivalenceScheme& s) {
    s.source = a;
    ClopenSet img = clopen_empty(space);
    for (const SchemePiece& p : s.pieces)
      img = clopen_union(space, img,
                         apply_word(action, p.word, clopen_cylinder(space, p.piece)));
    s.target = img;
    std::sort(s.pieces.begin(), s.pieces.end(),
              [](const SchemePiece& x, const SchemePiece& y) { return x.piece < y.piece; });
  };
  finish(s1);
  finish(s2);
  ParadoxicalWitness out{a, s1.target, s2.target, s1, s2};
  VerifyReport rc = verify_paradoxical(action, out);
  require_internal(rc.pass, "derived paradoxical witness failed verification: " + rc.clause);
  return out;
}

OrderWitness multiply_order_witness(const Action& action, const TypeElement& f,
                                    const OrderWitness& doubling, int m) {
  const SftSpace& space = *action.space;
  require_type(space, f);
  if (m < 2) throw BadParams("multiplier must be at least 2");
  TypeElement two = scale(space, f, 2);
  VerifyReport r = verify_order_witness(action, two, f, doubling);
  if (!r.pass) throw SchemeInvalid("doubling witness: " + r.clause);

  // balanced halving keeps composed words short: kf = af + bf <= 2f <= f
  std::map<int, OrderWitness> memo;
  auto build = [&](auto&& self, int k) -> const OrderWitness& {
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    OrderWitness w;
    if (k == 1) {
      w = identity_order_witness(f);
    } else if (k == 2) {
      w = doubling;
    } else {
      int a = (k + 1) / 2;
      OrderWitness wide = sum_order_witnesses(self(self, a), self(self, k - a));
      w = compose_order_witnesses(action, scale(space, f, k), two, f, wide, doubling);
    }
    return memo.emplace(k, std::move(w)).first->second;
  };
  const OrderWitness& out = build(build, m);
  require_internal(verify_order_witness(action, scale(space, f, m), f, out).pass,
                   "multiplied order witness failed verification");
  return out;
}

// ---------------------------------------------------------------------------

PurelyInfiniteReport check_purely_infinite_fragment(const Action& action, int depth,
                                                    const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  if (depth < 1) throw BadParams("fragment depth must be at least 1");
  std::vector<Word> cells = admissible_words(space, depth);
  PurelyInfiniteReport rep;
  rep.all_verified = true;
  std::vector<int> mult(cells.size(), 0);
  for (;;) {
    // next multiplicity vector in counting order, last cell fastest
    int i = static_cast<int>(cells.size()) - 1;
    while (i >= 0 && mult[static_cast<size_t>(i)] == 2) mult[static_cast<size_t>(i--)] = 0;
    if (i < 0) break;
    ++mult[static_cast<size_t>(i)];

    std::vector<std::pair<Word, int>> parts;
    for (size_t c = 0; c < cells.size(); ++c)
      if (mult[c] > 0) parts.push_back({cells[c], mult[c]});
    PurelyInfiniteEntry entry;
    entry.element = canonical_type_element(space, parts);
    OrderOutcome o =
        search_order(action, scale(space, entry.element, 2), entry.element, bounds);
    entry.status = o.status;
    entry.witness = o.witness;
    entry.refutation = o.refutation;
    if (o.status != SearchStatus::Found) rep.all_verified = false;
    if (o.status == SearchStatus::Refuted) rep.any_refuted = true;
    if (o.status == SearchStatus::NotFound) rep.any_inconclusive = true;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

UnperforationReport check_almost_unperforation_instances(
    const Action& action, const std::vector<UnperforationInstance>& instances,
    const SearchBounds& bounds) {
  const SftSpace& space = *action.space;
  UnperforationReport rep;
  for (const UnperforationInstance& inst : instances) {
    if (inst.n < 1) throw BadParams("unperforation index must be at least 1");
    require_type(space, inst.f);
    require_type(space, inst.g);
    UnperforationEntry entry;
    entry.instance = inst;
    OrderOutcome prem = search_order(action, scale(space, inst.f, inst.n + 1),
                                     scale(space, inst.g, inst.n), bounds);
    if (prem.status == SearchStatus::NotFound) {
      entry.status = UnperforationStatus::PremiseNotFound;
    } else if (prem.status == SearchStatus::Refuted) {
      entry.status = UnperforationStatus::PremiseRefuted;
    } else {
      entry.premise = prem.witness;
      entry.status = UnperforationStatus::Inconclusive;
      OrderOutcome direct = search_order(action, inst.f, inst.g, bounds);
      if (direct.status == SearchStatus::Found) {
        entry.conclusion = direct.witness;
        entry.status = UnperforationStatus::Completed;
      } else {
        // chain f <= (n+1)f <= ng <= g, closing with an n-fold collapse of g
        OrderOutcome dbl =
            inst.n >= 2 ? search_order(action, scale(space, inst.g, 2), inst.g, bounds)
                        : OrderOutcome{};
        if (inst.n == 1 || dbl.status == SearchStatus::Found) {
          TypeElement nf1 = scale(space, inst.f, inst.n + 1);
          TypeElement ng = scale(space, inst.g, inst.n);
          OrderWitness up = compose_order_witnesses(
              action, inst.f, nf1, ng, identity_order_witness(inst.f), prem.witness);
          if (inst.n == 1) {
            entry.conclusion = up;
          } else {
            OrderWitness down = multiply_order_witness(action, inst.g, dbl.witness, inst.n);
            entry.conclusion =
                compose_order_witnesses(action, inst.f, ng, inst.g, up, down);
          }
          entry.status = UnperforationStatus::Completed;
        }
      }
    }
    if (entry.status == UnperforationStatus::Inconclusive) rep.any_inconclusive = true;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

LpOutcome state_on_type_element(const Action& action, const TypeElement& y, int depth) {
  require_type(*action.space, y);
  if (y.is_zero()) throw BadParams("the zero element admits no normalized state");
  Normalization norm;
  for (const ClopenSet& lv : y.levels)
    for (const Word& c : lv.cylinders) norm.push_back({c, Rational(1)});
  return solve_invariant_lp(action, depth, norm);
}

}  // namespace cantordyn
