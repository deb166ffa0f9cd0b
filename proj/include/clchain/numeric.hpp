#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace clchain {

using Integer = mpz_class;
using Rational = mpq_class;

/// p^e as an exact integer.
Integer ipow(long p, unsigned long e);

/// n/d in lowest terms.
Rational ratio(const Integer& n, const Integer& d);

/// p^{-e} as an exact rational.
Rational inv_pow(long p, unsigned long e);

/// Rationals are serialized as "num/den" (denominator always written).
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Accepts "num/den" or a bare integer.
Rational parse_rational(std::string_view s);

double to_double(const Rational& q);

bool is_prime(long n);

/// Largest N with p^N < 2^62, the working range of the word-sized modular SNF.
int max_word_precision(long p);

}  // namespace clchain
