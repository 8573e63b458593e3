#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace agentdisc {

// Exact rational numbers. Small values stay on the stack.
using Rational = boost::multiprecision::cpp_rational;

// Parses "3/4", "-2", "0.75", ".5" or "1e-3" exactly.
// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

// Canonical text form: "3/4", "-1", "0".
std::string to_string(const Rational& value);

}  // namespace agentdisc
