#include "voatheta/rational.hpp"

#include "voatheta/errors.hpp"

#include <cctype>
#include <limits>

namespace voatheta {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty())
    return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size())
    return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      return false;
  return true;
}

} // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  if (!is_integer_literal(num))
    throw ParseError("malformed rational '" + std::string(text) + "'");
  Rational r;
  std::string n(num[0] == '+' ? num.substr(1) : num);
  if (slash == std::string_view::npos) {
    r = Rational(Integer(n), 1);
    return r;
  }
  const auto den = text.substr(slash + 1);
  if (!is_integer_literal(den) || den[0] == '-' || den[0] == '+')
    throw ParseError("malformed rational '" + std::string(text) + "'");
  Integer d(std::string{den});
  if (d == 0)
    throw ParseError("zero denominator in '" + std::string(text) + "'");
  r = Rational(Integer(n), d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational &r) { return r.get_str(); }

Integer floor(const Rational &r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational &r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rational frac(const Rational &r) { return r - Rational(floor(r)); }

Integer lcm(const Integer &a, const Integer &b) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Integer gcd(const Integer &a, const Integer &b) {
  Integer out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

double to_double(const Rational &r) { return r.get_d(); }

std::int64_t to_int64(const Integer &z) {
  if (!mpz_fits_slong_p(z.get_mpz_t()))
    throw Error("integer out of 64-bit range: " + z.get_str());
  return z.get_si();
}

Rational binomial(const Rational &x, long k) {
  if (k < 0)
    return 0;
  Rational out = 1;
  for (long i = 0; i < k; ++i)
    out *= (x - i) / Rational(i + 1);
  return out;
}

Integer factorial(long n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return out;
}

Rational pairing(const RationalMatrix &gram, const RationalVector &x, const RationalVector &y) {
  Rational s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0)
      continue;
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[j] != 0)
        s += x[i] * gram[i][j] * y[j];
  }
  return s;
}

RationalVector add(const RationalVector &a, const RationalVector &b) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = a[i] + b[i];
  return out;
}

RationalVector sub(const RationalVector &a, const RationalVector &b) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = a[i] - b[i];
  return out;
}

RationalVector scale(const Rational &s, const RationalVector &a) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = s * a[i];
  return out;
}

RationalVector mat_vec(const RationalMatrix &m, const RationalVector &v) {
  RationalVector out(m.size(), Rational(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      out[i] += m[i][j] * v[j];
  return out;
}

RationalMatrix transpose(const RationalMatrix &m) {
  if (m.empty())
    return {};
  RationalMatrix out(m[0].size(), RationalVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j)
      out[j][i] = m[i][j];
  return out;
}

RationalMatrix mat_mul(const RationalMatrix &a, const RationalMatrix &b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  RationalMatrix out(n, RationalVector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j)
        out[i][j] += a[i][l] * b[l][j];
  return out;
}

RationalMatrix inverse(const RationalMatrix &m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  RationalMatrix inv(n, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0)
      ++piv;
    if (piv == n)
      throw Error("singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0)
        continue;
      const Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Rational determinant(const RationalMatrix &m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0)
      ++piv;
    if (piv == n)
      return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0)
        continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j)
        a[r][j] -= f * a[col][j];
    }
  }
  return det;
}

bool is_integral(const RationalVector &v) {
  for (const auto &x : v)
    if (x.get_den() != 1)
      return false;
  return true;
}

bool is_zero(const RationalVector &v) {
  for (const auto &x : v)
    if (x != 0)
      return false;
  return true;
}

std::string to_string(const RationalVector &v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ",";
    s += v[i].get_str();
  }
  return s + ")";
}

} // namespace voatheta
