#pragma once

// Brute-force model on the grid {k/D}: a set is a cell mask and a map is the
// permutation obtained by evaluating it pointwise at left endpoints. Valid
// when every endpoint and offset is a multiple of 1/D.

#include <numeric>
#include <ostream>
#include <vector>

#include "ergo/interval_set.hpp"
#include "ergo/piecewise.hpp"
#include "ergo/rational.hpp"

namespace ergo {
inline void PrintTo(const IntervalSet& s, std::ostream* os) { *os << describe(s); }
}  // namespace ergo

namespace oracle {

using ergo::Rational;

inline long long lcmDen(long long acc, const Rational& q) {
  const long long d = q.get_den().get_si();
  return std::lcm(acc, d);
}

inline long long gridFor(const ergo::PiecewiseTranslation& t, long long D = 1) {
  for (const auto& p : t.pieces()) D = lcmDen(lcmDen(lcmDen(D, p.source.lo), p.source.hi), p.offset);
  return D;
}

inline long long gridFor(const ergo::IntervalSet& s, long long D = 1) {
  for (const auto& iv : s.pieces()) D = lcmDen(lcmDen(D, iv.lo), iv.hi);
  return D;
}

inline std::vector<char> cells(const ergo::IntervalSet& s, long long D) {
  std::vector<char> c(static_cast<std::size_t>(D), 0);
  for (long long k = 0; k < D; ++k) c[static_cast<std::size_t>(k)] = s.contains(ergo::makeRational(k, D) + ergo::makeRational(1, 2 * D));
  return c;
}

inline std::vector<long long> cellMap(const ergo::PiecewiseTranslation& t, long long D) {
  std::vector<long long> m(static_cast<std::size_t>(D), -1);
  for (long long k = 0; k < D; ++k) {
    const auto y = t.apply(ergo::makeRational(k, D));
    if (y) m[static_cast<std::size_t>(k)] = ergo::Rational(*y * ergo::fromInt(D)).get_num().get_si();
  }
  return m;
}

inline Rational measure(const std::vector<char>& c, long long D) {
  return ergo::makeRational(std::accumulate(c.begin(), c.end(), 0LL), D);
}

struct Bounds {
  Rational lower, blocked;
};

// μ(TⁿA ∩ B) for n ≥ 0 by following every cell of A.
inline Bounds correlation(const std::vector<long long>& m, const std::vector<char>& A, const std::vector<char>& B,
                          long long n, long long D) {
  long long hit = 0, lost = 0;
  for (long long k = 0; k < D; ++k) {
    if (!A[static_cast<std::size_t>(k)]) continue;
    long long x = k;
    for (long long i = 0; i < n && x >= 0; ++i) x = m[static_cast<std::size_t>(x)];
    if (x < 0) ++lost;
    else if (B[static_cast<std::size_t>(x)]) ++hit;
  }
  return {ergo::makeRational(hit, D), ergo::makeRational(lost, D)};
}

}  // namespace oracle
