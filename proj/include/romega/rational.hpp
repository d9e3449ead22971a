#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace romega {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact conversion; every finite double is a binary rational. Throws
// DomainError on NaN or infinity.
Rat exact_rational(double x);

double to_double(const Rat& r);

Int rat_floor(const Rat& x);

// x reduced into [0, 1).
Rat rat_fract(const Rat& x);

// Nearest integer, ties to even. *tie is set when the fractional part is
// exactly 1/2.
Int round_half_even(const Rat& x, bool* tie = nullptr);

// Canonical "num/den" (den omitted when 1).
std::string rat_to_string(const Rat& r);

// Accepts "num", "num/den", or a plain decimal like "-0.25".
Rat rat_from_string(const std::string& s);

}  // namespace romega
