#include "ergo/rational.hpp"

#include <cctype>
#include <limits>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

bool isInteger(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parseRational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (num.size() > 0 && num[0] == '+') num.remove_prefix(1);
  if (!isInteger(num) || !isInteger(den) || den[0] == '-' || den[0] == '+')
    fail(ErrorKind::Precondition, "BadRational", "cannot parse rational '" + std::string(text) + "'");
  Integer p(std::string(num), 10);
  Integer q(std::string(den), 10);
  if (q == 0) fail(ErrorKind::Precondition, "BadRational", "zero denominator in '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string formatRational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational makeRational(long long num, long long den) {
  Rational r(Integer(std::to_string(num)), Integer(std::to_string(den)));
  r.canonicalize();
  return r;
}

long long floorToInt(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!f.fits_slong_p()) fail(ErrorKind::Precondition, "Overflow", "integer part does not fit");
  return f.get_si();
}

double toDouble(const Rational& q) { return q.get_d(); }

}  // namespace ergo
