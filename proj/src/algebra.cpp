#include "cantordyn/algebra.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cantordyn {

namespace {

void require_internal(bool ok, const std::string& what) {
  if (!ok) throw Error("internal: " + what);
}

void require_step_space(const SftSpace& space, const StepFunction& f) {
  if (f.space_tag != space.tag)
    throw SpaceMismatch("step function belongs to a different space");
}

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

int step_depth(const StepFunction& f) {
  size_t d = 0;
  for (const auto& [w, v] : f.terms) d = std::max(d, w.size());
  return static_cast<int>(d);
}

// Canonical form from a value table over disjoint contributions: evaluate on
// the depth-d cell partition, keep nonzero cells, then merge full sibling
// families with equal values bottom-up. Value-aware twin of canonicalize; the
// result is the unique maximal antichain representing the function.
StepFunction canon_from_raw(const SftSpace& space,
                            const std::vector<std::pair<Word, Rational>>& raw) {
  int depth = 0;
  for (const auto& [w, v] : raw) depth = std::max(depth, static_cast<int>(w.size()));
  std::map<Word, Rational> cur;
  for (const Word& cell : admissible_words(space, depth)) {
    Rational v(0);
    for (const auto& [w, c] : raw)
      if (is_prefix(w, cell)) v += c;
    if (v != 0) cur.emplace(cell, v);
  }
  for (int len = depth; len >= 1; --len) {
    struct Fam {
      int count = 0;
      Rational value;
      bool uniform = true;
    };
    std::map<Word, Fam> fams;
    for (const auto& [w, v] : cur) {
      if (static_cast<int>(w.size()) != len) continue;
      Word parent(w.begin(), w.end() - 1);
      Fam& fam = fams[parent];
      if (fam.count == 0)
        fam.value = v;
      else if (fam.value != v)
        fam.uniform = false;
      ++fam.count;
    }
    for (const auto& [parent, fam] : fams) {
      if (!fam.uniform ||
          fam.count != static_cast<int>(followers(space, parent).size()))
        continue;
      for (int s : followers(space, parent)) {
        Word child = parent;
        child.push_back(s);
        cur.erase(child);
      }
      cur.emplace(parent, fam.value);
    }
  }
  StepFunction out;
  out.space_tag = space.tag;
  out.terms.assign(cur.begin(), cur.end());
  return out;
}

// Pointwise combination of two step functions on their common refinement.
template <typename Op>
StepFunction step_combine(const SftSpace& space, const StepFunction& f,
                          const StepFunction& g, Op op) {
  require_step_space(space, f);
  require_step_space(space, g);
  int depth = std::max(step_depth(f), step_depth(g));
  std::vector<std::pair<Word, Rational>> raw;
  for (const Word& cell : admissible_words(space, depth)) {
    Rational vf(0), vg(0);
    for (const auto& [w, v] : f.terms)
      if (is_prefix(w, cell)) vf = v;
    for (const auto& [w, v] : g.terms)
      if (is_prefix(w, cell)) vg = v;
    Rational v = op(vf, vg);
    if (v != 0) raw.emplace_back(cell, v);
  }
  return canon_from_raw(space, raw);
}

const SftSpace& term_space(const AlgebraElement& a) {
  return *a.terms.begin()->first.space;
}

void require_same_action(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.space_tag != b.space_tag)
    throw ActionMismatch("elements live over different spaces");
}

void insert_term(AlgebraElement& out, const SftSpace& space,
                 const PrefixExchange& t, const StepFunction& f) {
  if (f.is_zero()) return;
  auto it = out.terms.find(t);
  if (it == out.terms.end()) {
    out.terms.emplace(t, f);
    return;
  }
  it->second = step_add(space, it->second, f);
  if (it->second.is_zero()) out.terms.erase(it);
}

}  // namespace

StepFunction step_zero(const SftSpace& space) {
  StepFunction f;
  f.space_tag = space.tag;
  return f;
}

StepFunction step_indicator(const SftSpace& space, const ClopenSet& a) {
  require_same_space(space, a);
  StepFunction f;
  f.space_tag = space.tag;
  for (const Word& w : a.cylinders) f.terms.emplace_back(w, Rational(1));
  return f;
}

StepFunction step_from_terms(
    const SftSpace& space,
    const std::vector<std::pair<Word, Rational>>& disjoint_terms) {
  for (const auto& [w, v] : disjoint_terms) require_admissible(space, w);
  for (size_t i = 0; i < disjoint_terms.size(); ++i)
    for (size_t j = i + 1; j < disjoint_terms.size(); ++j) {
      const Word& a = disjoint_terms[i].first;
      const Word& b = disjoint_terms[j].first;
      if (is_prefix(a, b) || is_prefix(b, a))
        throw BadParams("step terms overlap: '" + word_to_string(space, a) +
                        "' and '" + word_to_string(space, b) + "'");
    }
  return canon_from_raw(space, disjoint_terms);
}

StepFunction step_add(const SftSpace& space, const StepFunction& f,
                      const StepFunction& g) {
  require_step_space(space, f);
  require_step_space(space, g);
  if (f.is_zero()) return g;
  if (g.is_zero()) return f;
  return step_combine(space, f, g,
                      [](const Rational& a, const Rational& b) { return a + b; });
}

StepFunction step_scale(const SftSpace& space, const StepFunction& f,
                        const Rational& c) {
  require_step_space(space, f);
  if (c == 0) return step_zero(space);
  StepFunction out;
  out.space_tag = f.space_tag;
  out.terms.reserve(f.terms.size());
  for (const auto& [w, v] : f.terms) out.terms.emplace_back(w, v * c);
  return out;
}

StepFunction step_multiply(const SftSpace& space, const StepFunction& f,
                           const StepFunction& g) {
  return step_combine(space, f, g,
                      [](const Rational& a, const Rational& b) { return a * b; });
}

StepFunction step_translate(const PrefixExchange& g, const StepFunction& f) {
  require_step_space(*g.space, f);
  std::vector<std::pair<Word, Rational>> raw;
  for (const auto& [w, v] : f.terms)
    for (const Word& img : apply_cylinder(g, w).cylinders) raw.emplace_back(img, v);
  return canon_from_raw(*g.space, raw);
}

StepFunction step_cutdown(const SftSpace& space, const StepFunction& f,
                          const Rational& eps) {
  require_step_space(space, f);
  if (eps < 0) throw BadParams("negative epsilon in a cutdown");
  std::vector<std::pair<Word, Rational>> raw;
  for (const auto& [w, v] : f.terms)
    if (v > eps) raw.emplace_back(w, v - eps);
  return canon_from_raw(space, raw);
}

bool step_nonnegative(const StepFunction& f) {
  for (const auto& [w, v] : f.terms)
    if (v < 0) return false;
  return true;
}

bool step_is_indicator(const StepFunction& f) {
  for (const auto& [w, v] : f.terms)
    if (v != 1) return false;
  return true;
}

ClopenSet step_support(const SftSpace& space, const StepFunction& f) {
  require_step_space(space, f);
  std::vector<Word> words;
  words.reserve(f.terms.size());
  for (const auto& [w, v] : f.terms) words.push_back(w);
  return canonicalize(space, words);
}

AlgebraElement algebra_zero(const SftSpace& space) {
  AlgebraElement a;
  a.space_tag = space.tag;
  return a;
}

AlgebraElement algebra_one(SpacePtr space) {
  return algebra_term(step_indicator(*space, clopen_full(*space)),
                      identity_exchange(space));
}

AlgebraElement algebra_indicator(SpacePtr space, const ClopenSet& a) {
  return algebra_term(step_indicator(*space, a), identity_exchange(space));
}

AlgebraElement algebra_unitary(SpacePtr space, const PrefixExchange& t) {
  if (t.space->tag != space->tag)
    throw SpaceMismatch("unitary exchange belongs to a different space");
  return algebra_term(step_indicator(*space, clopen_full(*space)), t);
}

AlgebraElement algebra_term(const StepFunction& f, const PrefixExchange& t) {
  if (f.space_tag != t.space->tag)
    throw SpaceMismatch("coefficient and exchange live on different spaces");
  AlgebraElement a;
  a.space_tag = f.space_tag;
  if (!f.is_zero()) a.terms.emplace(t, f);
  return a;
}

AlgebraElement algebra_add(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_action(a, b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const SftSpace& space = term_space(a);
  AlgebraElement out = a;
  for (const auto& [t, f] : b.terms) insert_term(out, space, t, f);
  return out;
}

AlgebraElement algebra_sub(const AlgebraElement& a, const AlgebraElement& b) {
  return algebra_add(a, algebra_scale(b, Rational(-1)));
}

AlgebraElement algebra_scale(const AlgebraElement& a, const Rational& c) {
  if (a.is_zero() || c == 0) {
    AlgebraElement out;
    out.space_tag = a.space_tag;
    return out;
  }
  const SftSpace& space = term_space(a);
  AlgebraElement out;
  out.space_tag = a.space_tag;
  for (const auto& [t, f] : a.terms) out.terms.emplace(t, step_scale(space, f, c));
  return out;
}

AlgebraElement algebra_multiply(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_action(a, b);
  AlgebraElement out;
  out.space_tag = a.space_tag;
  if (a.is_zero() || b.is_zero()) return out;
  const SftSpace& space = term_space(a);
  for (const auto& [s, f] : a.terms)
    for (const auto& [t, h] : b.terms) {
      StepFunction coeff = step_multiply(space, f, step_translate(s, h));
      if (coeff.is_zero()) continue;
      insert_term(out, space, compose(s, t), coeff);
    }
  return out;
}

AlgebraElement algebra_star(const AlgebraElement& a) {
  AlgebraElement out;
  out.space_tag = a.space_tag;
  for (const auto& [t, f] : a.terms) {
    PrefixExchange inv = invert(t);
    out.terms.emplace(inv, step_translate(inv, f));
  }
  return out;
}

StepFunction expectation(const AlgebraElement& a) {
  for (const auto& [t, f] : a.terms)
    if (t.is_identity()) return f;
  StepFunction zero;
  zero.space_tag = a.space_tag;
  return zero;
}

bool is_projection(const SftSpace& space, const AlgebraElement& a) {
  if (a.space_tag != space.tag)
    throw SpaceMismatch("element belongs to a different space");
  return a == algebra_star(a) && a == algebra_multiply(a, a);
}

ScalingDiagnostics scaling_diagnostics(const Action& action,
                                       const SubequivalenceScheme& s) {
  VerifyReport rep = verify_scheme(action, s);
  if (!rep.pass) throw SchemeInvalid(rep.clause);
  const SftSpace& space = *action.space;
  ScalingDiagnostics d;
  d.source = s.source;
  d.image_union = clopen_empty(space);
  AlgebraElement x = algebra_zero(space);
  for (const SchemePiece& p : s.pieces) {
    ClopenSet piece = clopen_cylinder(space, p.piece);
    x = algebra_add(
        x, algebra_multiply(algebra_unitary(action.space, evaluate_word(action, p.word)),
                            algebra_indicator(action.space, piece)));
    d.image_union =
        clopen_union(space, d.image_union, apply_word(action, p.word, piece));
  }
  d.x = x;
  d.xstar_x = algebra_multiply(algebra_star(x), x);
  d.x_xstar = algebra_multiply(x, algebra_star(x));
  require_internal(d.xstar_x == algebra_indicator(action.space, s.source),
                   "x*x differs from the source indicator");
  require_internal(d.x_xstar == algebra_indicator(action.space, d.image_union),
                   "xx* differs from the image indicator");
  d.absorbing = algebra_multiply(d.xstar_x, d.x_xstar) == d.x_xstar;
  d.proper = !(d.xstar_x == d.x_xstar);
  return d;
}

ScalingDiagnostics scaling_element_from_scheme(const Action& action,
                                               const SubequivalenceScheme& s,
                                               const ScalingGuards& guards) {
  const SftSpace& space = *action.space;
  require_same_space(space, guards.f);
  require_same_space(space, guards.u);
  ScalingDiagnostics d = scaling_diagnostics(action, s);
  if (!clopen_contains(space, s.source, guards.f))
    throw GeometryViolated("guard region is not inside the source");
  if (!clopen_contains(space, s.source, guards.u))
    throw GeometryViolated("guard neighborhood is not inside the source");
  if (!clopen_disjoint(space, guards.f, guards.u))
    throw GeometryViolated("guard region meets the guard neighborhood");
  if (!clopen_contains(space, guards.u, d.image_union))
    throw GeometryViolated("piece images are not inside the guard neighborhood");
  if (!d.absorbing)
    throw GeometryViolated("x*x does not absorb xx*");
  if (!d.proper)
    throw GeometryViolated("x*x equals xx*, so the element does not scale");
  return d;
}

IsometryResult isometry_from_scaling(const SftSpace& space, const AlgebraElement& x) {
  if (x.space_tag != space.tag)
    throw SpaceMismatch("element belongs to a different space");
  AlgebraElement xsx = algebra_multiply(algebra_star(x), x);
  for (const auto& [t, f] : xsx.terms)
    if (!t.is_identity())
      throw NotIndicator("x*x has a term away from the identity");
  if (!step_is_indicator(expectation(xsx)))
    throw NotIndicator("x*x is not an indicator step function");
  AlgebraElement xxs = algebra_multiply(x, algebra_star(x));
  if (!(algebra_multiply(xsx, xxs) == xxs))
    throw NotScaling("x*x does not absorb xx*");
  if (xsx == xxs)
    throw NotScaling("x*x equals xx*, so the element does not scale");
  SpacePtr sp = x.terms.begin()->first.space;
  AlgebraElement one = algebra_one(sp);
  IsometryResult r;
  r.v = algebra_add(x, algebra_sub(one, xsx));
  r.vstar_v = algebra_multiply(algebra_star(r.v), r.v);
  require_internal(r.vstar_v == one, "v*v differs from the unit");
  r.v_vstar = algebra_multiply(r.v, algebra_star(r.v));
  require_internal(is_projection(space, r.v_vstar), "vv* is not a projection");
  return r;
}

CuntzDiagnostics cuntz_witness_from_scheme(const Action& action,
                                           const SubequivalenceScheme& s) {
  VerifyReport rep = verify_scheme(action, s);
  if (!rep.pass) throw SchemeInvalid(rep.clause);
  const SftSpace& space = *action.space;
  CuntzDiagnostics d;
  d.r = algebra_zero(space);
  for (const SchemePiece& p : s.pieces)
    d.r = algebra_add(
        d.r,
        algebra_multiply(algebra_unitary(action.space, evaluate_word(action, p.word)),
                         algebra_indicator(action.space, clopen_cylinder(space, p.piece))));
  AlgebraElement mid = algebra_multiply(
      algebra_multiply(algebra_star(d.r), algebra_indicator(action.space, s.target)),
      d.r);
  d.identity_holds = mid == algebra_indicator(action.space, s.source);
  return d;
}

}  // namespace cantordyn
