#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tsnnc {

// Exact arbitrary-precision rational. All times are seconds, all data
// quantities bits, all rates bits/second.
using Rational = mpq_class;

inline Rational rat(std::int64_t num, std::int64_t den = 1)
{
    Rational r(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    r.canonicalize();
    return r;
}

// Parses "12", "-3.25", "1e-6", "25/2". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Exact rational of the shortest decimal that round-trips the double.
Rational from_double(double value);

Rational floor_of(const Rational& x);
Rational ceil_of(const Rational& x);

// Smallest positive rational that is an integer multiple of both a and b.
Rational lcm_of(const Rational& a, const Rational& b);

double to_double(const Rational& x);
std::string to_string(const Rational& x);

inline Rational micros(const Rational& seconds) { return seconds * 1000000; }
inline Rational from_micros(const Rational& us) { return us / 1000000; }

}  // namespace tsnnc
