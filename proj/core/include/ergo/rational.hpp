#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ergo {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses `p/q` or `p` (q > 0). Throws ergo::Error on malformed input.
Rational parseRational(std::string_view text);

/// Always emits `num/den`, including `0/1` and `3/1`.
std::string formatRational(const Rational& q);

Rational makeRational(long long num, long long den = 1);

// gmpxx has no long long overloads; these route through long.
inline Integer toInteger(long long v) { return Integer(static_cast<long>(v)); }
inline Rational fromInt(long long v) { return Rational(static_cast<long>(v)); }

/// floor(q) as a signed 64-bit value; q must fit.
long long floorToInt(const Rational& q);

double toDouble(const Rational& q);

}  // namespace ergo
