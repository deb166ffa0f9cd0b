#include "clchain/numeric.hpp"

#include <stdexcept>

namespace clchain {

Integer ipow(long p, unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), e);
  return r;
}

Rational ratio(const Integer& n, const Integer& d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

Rational inv_pow(long p, unsigned long e) {
  Rational q(Integer(1), ipow(p, e));
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational parse_rational(std::string_view s) {
  std::string str(s);
  Rational q;
  if (q.set_str(str, 10) != 0 || q.get_den() == 0) {
    throw std::invalid_argument("malformed rational: '" + str + "'");
  }
  q.canonicalize();
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

int max_word_precision(long p) {
  int n = 0;
  unsigned __int128 q = 1;
  const unsigned __int128 limit = static_cast<unsigned __int128>(1) << 62;
  while (q * static_cast<unsigned __int128>(p) < limit) {
    q *= static_cast<unsigned __int128>(p);
    ++n;
  }
  return n;
}

}  // namespace clchain
