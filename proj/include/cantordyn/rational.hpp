#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <string>

namespace cantordyn {

// Exact arbitrary-precision rational; every numeric result in the toolkit is
// one of these. GMP-backed.
using Rational = boost::multiprecision::mpq_rational;

inline std::string rational_to_string(const Rational& q) {
  return q.str();
}

}  // namespace cantordyn
