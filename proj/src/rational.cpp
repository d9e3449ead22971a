#include "romega/rational.hpp"

#include <cmath>
#include <cstdlib>

#include "romega/errors.hpp"

namespace romega {

Rat exact_rational(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("cannot convert non-finite double to rational");
  }
  // cpp_rational's converting constructor decomposes the mantissa exactly.
  return Rat(x);
}

double to_double(const Rat& r) { return r.convert_to<double>(); }

Int rat_floor(const Rat& x) {
  Int q = numerator(x) / denominator(x);  // truncates toward zero
  if (x < 0 && q * denominator(x) != numerator(x)) --q;
  return q;
}

Rat rat_fract(const Rat& x) { return x - Rat(rat_floor(x)); }

Int round_half_even(const Rat& x, bool* tie) {
  Int fl = rat_floor(x);
  Rat frac = x - Rat(fl);
  if (tie) *tie = false;
  if (frac < Rat(1, 2)) return fl;
  if (frac > Rat(1, 2)) return fl + 1;
  if (tie) *tie = true;
  return (fl % 2 == 0) ? fl : fl + 1;
}

std::string rat_to_string(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw DomainError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    return Rat(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(Int(s));
  bool neg = s[0] == '-';
  std::string digits = s.substr(neg ? 1 : 0);
  dot = digits.find('.');
  std::string ipart = digits.substr(0, dot);
  std::string fpart = digits.substr(dot + 1);
  if (ipart.empty()) ipart = "0";
  Int den = 1;
  for (size_t i = 0; i < fpart.size(); ++i) den *= 10;
  Int num = Int(ipart) * den + (fpart.empty() ? Int(0) : Int(fpart));
  Rat r(num, den);
  return neg ? -r : r;
}

}  // namespace romega
