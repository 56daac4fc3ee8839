#pragma once

#include <map>
#include <string>
#include <vector>

#include "cantordyn/comparison.hpp"
#include "cantordyn/rational.hpp"

namespace cantordyn {

// Locally constant rational function on X: canonical antichain of
// (cylinder, value) terms, nonzero values, equal-valued full sibling
// families merged; uncovered region is 0.
struct StepFunction {
  uint64_t space_tag = 0;
  std::vector<std::pair<Word, Rational>> terms;

  bool operator==(const StepFunction&) const = default;
  bool is_zero() const { return terms.empty(); }
};

StepFunction step_zero(const SftSpace& space);
StepFunction step_indicator(const SftSpace& space, const ClopenSet& a);
StepFunction step_from_terms(const SftSpace& space,
                             const std::vector<std::pair<Word, Rational>>& disjoint_terms);

StepFunction step_add(const SftSpace& space, const StepFunction& f, const StepFunction& g);
StepFunction step_scale(const SftSpace& space, const StepFunction& f, const Rational& c);
StepFunction step_multiply(const SftSpace& space, const StepFunction& f,
                           const StepFunction& g);
// (g ▷ f) = f ∘ g⁻¹ (pushforward of the coefficient along g).
StepFunction step_translate(const PrefixExchange& g, const StepFunction& f);
// pointwise max(f - eps, 0)
StepFunction step_cutdown(const SftSpace& space, const StepFunction& f, const Rational& eps);

bool step_nonnegative(const StepFunction& f);
bool step_is_indicator(const StepFunction& f);
ClopenSet step_support(const SftSpace& space, const StepFunction& f);

// Element of the symbolic crossed product: finite sum Σ_t f_t·u_t keyed by
// the normal form of t; zero coefficients dropped.
struct AlgebraElement {
  uint64_t space_tag = 0;
  std::map<PrefixExchange, StepFunction, ExchangeLess> terms;

  bool operator==(const AlgebraElement& other) const {
    if (space_tag != other.space_tag) return false;
    if (terms.size() != other.terms.size()) return false;
    auto it = terms.begin();
    auto jt = other.terms.begin();
    for (; it != terms.end(); ++it, ++jt) {
      if (!(it->first == jt->first)) return false;
      if (!(it->second == jt->second)) return false;
    }
    return true;
  }
  bool is_zero() const { return terms.empty(); }
};

AlgebraElement algebra_zero(const SftSpace& space);
AlgebraElement algebra_one(SpacePtr space);
AlgebraElement algebra_indicator(SpacePtr space, const ClopenSet& a);
AlgebraElement algebra_unitary(SpacePtr space, const PrefixExchange& t);
// f·u_t
AlgebraElement algebra_term(const StepFunction& f, const PrefixExchange& t);

AlgebraElement algebra_add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement algebra_sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement algebra_scale(const AlgebraElement& a, const Rational& c);
// (f·u_s)(h·u_t) = f·(s▷h)·u_{st}, bilinear. ActionMismatch across spaces.
AlgebraElement algebra_multiply(const AlgebraElement& a, const AlgebraElement& b);
// (f·u_t)* = (t⁻¹▷f)·u_{t⁻¹}
AlgebraElement algebra_star(const AlgebraElement& a);
// coefficient at the identity
StepFunction expectation(const AlgebraElement& a);

bool is_projection(const SftSpace& space, const AlgebraElement& a);

// x = Σ u_{t_i}·1_{piece_i} for a verified scheme, with its exact symbolic
// diagnostics. x*x = 1_source and xx* = 1_{image union} always hold; the
// scaling identities ((x*x)(xx*) = xx* with x*x ≠ xx*) hold iff the image
// union is a proper subset of the source.
struct ScalingDiagnostics {
  AlgebraElement x;
  AlgebraElement xstar_x;
  AlgebraElement x_xstar;
  ClopenSet source;
  ClopenSet image_union;
  bool absorbing = false;  // (x*x)(xx*) = xx*
  bool proper = false;     // x*x != xx*
};

ScalingDiagnostics scaling_diagnostics(const Action& action,
                                       const SubequivalenceScheme& s);

// Guard geometry for a scaling element: F inside source away from U, images
// inside U, U inside source.
struct ScalingGuards {
  ClopenSet f;
  ClopenSet u;
};

// Enforces the guard geometry and the scaling identities; throws
// SchemeInvalid / GeometryViolated otherwise.
ScalingDiagnostics scaling_element_from_scheme(const Action& action,
                                               const SubequivalenceScheme& s,
                                               const ScalingGuards& guards);

struct IsometryResult {
  AlgebraElement v;
  AlgebraElement vstar_v;  // the unit, asserted
  AlgebraElement v_vstar;  // exact projection
};

// v = x + (1 - x*x); requires x*x an indicator projection and x scaling.
IsometryResult isometry_from_scaling(const SftSpace& space, const AlgebraElement& x);

struct CuntzDiagnostics {
  AlgebraElement r;
  bool identity_holds = false;  // r*·1_target·r = 1_source exactly
};

// One-step exact Cuntz witness for 1_source ≾ 1_target from a verified
// scheme: r with r*·1_target·r = 1_source.
CuntzDiagnostics cuntz_witness_from_scheme(const Action& action,
                                           const SubequivalenceScheme& s);

}  // namespace cantordyn
