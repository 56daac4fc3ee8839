#pragma once

#include <stdexcept>
#include <string>

namespace cantordyn {

// Base for every toolkit error. Subclasses prefix their own name so a caught
// Error is self-describing even when rethrown as the base type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CANTORDYN_DEFINE_ERROR(NAME)                                     \
  struct NAME : Error {                                                  \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {}   \
  }

// shift spaces / clopen sets
CANTORDYN_DEFINE_ERROR(EmptySpace);
CANTORDYN_DEFINE_ERROR(DeadEnd);
CANTORDYN_DEFINE_ERROR(ShapeMismatch);
CANTORDYN_DEFINE_ERROR(InadmissibleWord);
CANTORDYN_DEFINE_ERROR(SpaceMismatch);
CANTORDYN_DEFINE_ERROR(DepthTooSmall);

// prefix exchanges / actions
CANTORDYN_DEFINE_ERROR(IncompleteDomain);
CANTORDYN_DEFINE_ERROR(OverlappingDomain);
CANTORDYN_DEFINE_ERROR(TailMismatch);
CANTORDYN_DEFINE_ERROR(NotBijective);
CANTORDYN_DEFINE_ERROR(UnknownGenerator);
CANTORDYN_DEFINE_ERROR(UnknownName);
CANTORDYN_DEFINE_ERROR(BadParams);

// comparison
CANTORDYN_DEFINE_ERROR(HypothesisMismatch);
CANTORDYN_DEFINE_ERROR(NoParadoxicalWitness);

// measures
CANTORDYN_DEFINE_ERROR(DepthExceeded);

// crossed algebra
CANTORDYN_DEFINE_ERROR(ActionMismatch);
CANTORDYN_DEFINE_ERROR(SchemeInvalid);
CANTORDYN_DEFINE_ERROR(GeometryViolated);
CANTORDYN_DEFINE_ERROR(NotIndicator);
CANTORDYN_DEFINE_ERROR(NotScaling);

// text formats
CANTORDYN_DEFINE_ERROR(SemanticError);

struct SyntaxError : Error {
  int line;
  int col;
  SyntaxError(int line_, int col_, const std::string& msg)
      : Error("SyntaxError at " + std::to_string(line_) + ":" +
              std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

#undef CANTORDYN_DEFINE_ERROR

}  // namespace cantordyn
