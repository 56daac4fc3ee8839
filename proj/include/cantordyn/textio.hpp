#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantordyn/action.hpp"
#include "cantordyn/algebra.hpp"
#include "cantordyn/comparison.hpp"
#include "cantordyn/measures.hpp"
#include "cantordyn/typesemigroup.hpp"

namespace cantordyn {

// Action description text format
// ------------------------------
//   space letters a A b B
//   space forbid aA Aa bB Bb
//   space initial a A b B        # optional; defaults to all letters
//   gen ga rule A -> .
//   gen ga rule a -> aa
//   ...
// '.' denotes the empty word; '#' starts a comment; letters in a word are
// separated by spaces when any letter name has length > 1, otherwise may be
// juxtaposed.
ActionPtr parse_action_text(const std::string& text);
ActionPtr parse_action_file(const std::string& path);

// Canonical serialization: stable ordering, single spaces, '\n' endings.
std::string serialize_action(const Action& action);

uint64_t fnv1a64_hash(const std::string& bytes);
std::string action_hash_string(const Action& action);  // "fnv1a64:<16 hex>"

// Clopen literal: "[aa]|[ab]", "[]" for the whole space, "{}" for empty.
ClopenSet parse_clopen_literal(const Action& action, const std::string& text);
std::string clopen_literal(const SftSpace& space, const ClopenSet& a);

// Group word display/parse: generator names, "'" suffix for inverse, "."
// separators, "e" for the identity. Leftmost letter applied last.
std::string word_literal(const Action& action, const GroupWord& w);
GroupWord parse_word_literal(const Action& action, const std::string& text);

// Type-semigroup element literal: "2*[a]+[aa]", "0" for zero.
TypeElement parse_type_literal(const Action& action, const std::string& text);
std::string type_literal(const SftSpace& space, const TypeElement& f);

enum class CertificateKind {
  Subequivalence,
  Paradoxical,
  Tower,
  Order,
  Measure,
  Infeasibility,
  Scaling,
  Isometry,
  Cuntz,
};

std::string certificate_kind_name(CertificateKind k);
std::optional<CertificateKind> certificate_kind_from_name(const std::string& name);

// A self-contained certificate: embeds the canonical action text and its
// hash, the bounds used, the statement proved, and the witness data. The
// serialization is byte-deterministic.
struct Certificate {
  CertificateKind kind = CertificateKind::Subequivalence;
  std::string action_text;  // canonical serialization
  std::string action_hash;  // "fnv1a64:<hex>"
  SearchBounds bounds;
  std::vector<std::string> statement;  // statement-block lines
  std::vector<std::string> data;       // data-block lines
};

std::string write_certificate(const Certificate& cert);
Certificate read_certificate(const std::string& text);

// A report wraps zero or more certificates with per-item summary lines.
struct Report {
  std::string title;
  std::vector<std::string> lines;         // summary lines
  std::vector<Certificate> certificates;  // embedded full certificate blocks
};

std::string write_report(const Report& report);
Report read_report(const std::string& text);
bool looks_like_report(const std::string& text);

// -- Builders ---------------------------------------------------------------

Certificate certificate_for_scheme(const Action& action, const SearchBounds& bounds,
                                   const SubequivalenceScheme& s);
Certificate certificate_for_paradoxical(const Action& action, const SearchBounds& bounds,
                                        const ParadoxicalWitness& w);
Certificate certificate_for_tower(const Action& action, const SearchBounds& bounds,
                                  const std::vector<GroupWord>& tower_words,
                                  const TowerWitness& t);
Certificate certificate_for_order(const Action& action, const SearchBounds& bounds,
                                  const TypeElement& f, const TypeElement& g,
                                  const OrderWitness& w);
Certificate certificate_for_measure(const Action& action, const SearchBounds& bounds,
                                    const InvariantContent& mu,
                                    const Normalization& normalization);
Certificate certificate_for_infeasibility(const Action& action, const SearchBounds& bounds,
                                          const InfeasibilityCertificate& cert,
                                          const Normalization& normalization);
Certificate certificate_for_scaling(const Action& action, const SearchBounds& bounds,
                                    const SubequivalenceScheme& s,
                                    const ScalingGuards& guards);
Certificate certificate_for_isometry(const Action& action, const SearchBounds& bounds,
                                     const SubequivalenceScheme& s,
                                     const ScalingGuards& guards);
Certificate certificate_for_cuntz(const Action& action, const SearchBounds& bounds,
                                  const SubequivalenceScheme& s);

// -- Witness (de)serialization helpers used by both builders and verifier ---

// Exact rational "p" or "p/q" (q > 0).
Rational parse_rational_literal(const std::string& text);

// Single bracketed cylinder "[ab]" decoded as the raw word, without the set
// canonicalization a clopen literal performs.
Word parse_cylinder_word(const Action& action, const std::string& text);

// Rational term sum "c*[w]+..." ("0" for the empty sum), as written in
// measure and infeasibility statements.
Normalization parse_normalization_terms(const Action& action, const std::string& text);

// Integer term sum "m*[w]+..." ("0" for the empty sum), as written in
// order-witness part lines.
std::vector<std::pair<Word, int>> parse_integer_terms(const Action& action,
                                                      const std::string& text);

SubequivalenceScheme parse_scheme_block(const Action& action,
                                        const std::vector<std::string>& lines,
                                        size_t* index);
void append_scheme_block(const Action& action, const SubequivalenceScheme& s,
                         std::vector<std::string>* lines);

}  // namespace cantordyn
