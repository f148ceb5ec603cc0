#ifndef ODYN_RATIONAL_HPP
#define ODYN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "odyn/errors.hpp"

namespace odyn {

// Exact rational arithmetic for branch pullbacks and survivor refinements.
// Every finite double is a dyadic rational, so conversion from double is exact.
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("rational from non-finite double");
  return Rat(x);
}

inline double rat_to_double(const Rat& r) { return static_cast<double>(r); }

// Parses "p/q" or a decimal literal.  Fractions stay exact; decimals are
// converted through their shortest double representation.
inline Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    using boost::multiprecision::cpp_int;
    cpp_int num(s.substr(0, slash));
    cpp_int den(s.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
    return Rat(num, den);
  }
  size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw ConfigError("bad numeric literal '" + s + "'");
  return rat_from_double(v);
}

}  // namespace odyn

#endif
