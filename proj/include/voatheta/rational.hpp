#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace voatheta {

using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

// Strict "p/q" or "p" parser; rejects decimals, whitespace and zero denominators.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational &r);

Integer floor(const Rational &r);
Integer ceil(const Rational &r);
// Fractional part in [0, 1).
Rational frac(const Rational &r);
Integer lcm(const Integer &a, const Integer &b);
Integer gcd(const Integer &a, const Integer &b);
double to_double(const Rational &r);
std::int64_t to_int64(const Integer &z);

// Binomial coefficient C(x, k) for rational x and k >= 0.
Rational binomial(const Rational &x, long k);
Integer factorial(long n);

// Bilinear form x^T G y.
Rational pairing(const RationalMatrix &gram, const RationalVector &x, const RationalVector &y);
RationalVector add(const RationalVector &a, const RationalVector &b);
RationalVector sub(const RationalVector &a, const RationalVector &b);
RationalVector scale(const Rational &s, const RationalVector &a);
RationalVector mat_vec(const RationalMatrix &m, const RationalVector &v);
RationalMatrix transpose(const RationalMatrix &m);
RationalMatrix mat_mul(const RationalMatrix &a, const RationalMatrix &b);
// Exact inverse by Gauss-Jordan; throws Error if singular.
RationalMatrix inverse(const RationalMatrix &m);
Rational determinant(const RationalMatrix &m);
bool is_integral(const RationalVector &v);
bool is_zero(const RationalVector &v);
std::string to_string(const RationalVector &v);

} // namespace voatheta
