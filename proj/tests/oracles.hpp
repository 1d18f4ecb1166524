#pragma once
// Independent reference computations. Nothing here calls the library's
// series constructors; they only share the Rational/Cyclotomic value types.

#include "voatheta/cyclotomic.hpp"
#include "voatheta/fock.hpp"
#include "voatheta/lattice.hpp"
#include "voatheta/qseries.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using voatheta::Cyclotomic;
using voatheta::Rational;
using voatheta::RationalMatrix;
using voatheta::RationalVector;

/// prod_{n>=1}(1 - q^n) below q^N from the pentagonal number theorem.
inline std::vector<long> euler_product(long N) {
  std::vector<long> c(static_cast<std::size_t>(N), 0);
  for (long k = -N; k <= N; ++k) {
    const long e = k * (3 * k - 1) / 2;
    if (e >= 0 && e < N)
      c[static_cast<std::size_t>(e)] += (k % 2 == 0) ? 1 : -1;
  }
  return c;
}

/// Partition numbers p(0..N-1) by counting partitions with bounded parts.
inline std::vector<long> partitions(long N) {
  std::map<std::pair<long, long>, long> memo;
  std::function<long(long, long)> count = [&](long n, long max_part) -> long {
    if (n == 0)
      return 1;
    if (max_part == 0)
      return 0;
    const auto key = std::make_pair(n, max_part);
    if (auto it = memo.find(key); it != memo.end())
      return it->second;
    long total = 0;
    for (long part = std::min(n, max_part); part >= 1; --part)
      total += count(n - part, part);
    return memo[key] = total;
  };
  std::vector<long> out;
  for (long n = 0; n < N; ++n)
    out.push_back(count(n, n));
  return out;
}

inline long sigma(long k, long n) {
  long s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      long p = 1;
      for (long i = 0; i < k; ++i)
        p *= d;
      s += p;
    }
  return s;
}

/// sum over x in (Z^d + shift) of P(x + s) zeta(<w, x>) q^{<x+s, x+s>/2} for
/// exponents below `bound`, by scanning a coordinate box. P = 1 or <h, .>.
inline std::map<Rational, Cyclotomic> box_theta(const RationalMatrix &gram, const RationalVector &shift,
                                                const RationalVector &s, const RationalVector &w,
                                                const RationalVector *h, const Rational &bound, long box) {
  const std::size_t d = gram.size();
  std::map<Rational, Cyclotomic> out;
  std::vector<long> idx(d, -box);
  auto pair = [&](const RationalVector &a, const RationalVector &b) {
    Rational r = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        r += a[i] * gram[i][j] * b[j];
    return r;
  };
  while (true) {
    RationalVector x(d), xs(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = Rational(idx[i]) + shift[i];
      xs[i] = x[i] + s[i];
    }
    const Rational e = pair(xs, xs) / 2;
    if (e < bound) {
      Cyclotomic c = Cyclotomic::unit(pair(w, x));
      if (h)
        c *= pair(*h, xs);
      out[e] += c;
    }
    std::size_t k = 0;
    while (k < d && idx[k] == box)
      idx[k++] = -box;
    if (k == d)
      break;
    ++idx[k];
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

/// Multiply a sparse exponent map by prod(1-q^n)^{-d} (partition counts) below `bound`.
inline std::map<Rational, Cyclotomic> times_partitions(const std::map<Rational, Cyclotomic> &a, unsigned d,
                                                       const Rational &bound) {
  const long N = static_cast<long>(std::ceil(bound.get_d())) + 2;
  std::vector<long> p(static_cast<std::size_t>(N), 0);
  p[0] = 1;
  // d-fold convolution of partition numbers
  const auto one = partitions(N);
  for (unsigned rep = 0; rep < d; ++rep) {
    std::vector<long> next(static_cast<std::size_t>(N), 0);
    for (long i = 0; i < N; ++i)
      for (long j = 0; i + j < N; ++j)
        next[static_cast<std::size_t>(i + j)] += p[static_cast<std::size_t>(i)] * one[static_cast<std::size_t>(j)];
    p = next;
  }
  std::map<Rational, Cyclotomic> out;
  for (const auto &[e, c] : a)
    for (long n = 0; n < N; ++n)
      if (e + n < bound)
        out[e + n] += c * Rational(p[static_cast<std::size_t>(n)]);
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

/// Sparse map of a series' known terms, for comparison with the oracles.
inline std::map<Rational, Cyclotomic> terms_of(const voatheta::QSeries &s) {
  std::map<Rational, Cyclotomic> out;
  for (const auto &[e, c] : s.terms())
    out[e] = c;
  return out;
}

inline std::map<Rational, Cyclotomic> shifted(const std::map<Rational, Cyclotomic> &a, const Rational &by) {
  std::map<Rational, Cyclotomic> out;
  for (const auto &[e, c] : a)
    out[e + by] = c;
  return out;
}

/// Schur polynomials from exp(-sum_n x_n/n (-z)^{-n}) by truncated exponential.
/// A polynomial maps exponent vectors (powers of x_1..x_S) to coefficients.
using Poly = std::map<std::vector<int>, Rational>;

inline std::vector<Poly> schur_polynomials(int S) {
  // Power series in w = z^{-1} with polynomial coefficients.
  using Series = std::vector<Poly>;
  auto mul = [&](const Series &a, const Series &b) {
    Series out(static_cast<std::size_t>(S + 1));
    for (int i = 0; i <= S; ++i)
      for (int j = 0; i + j <= S; ++j)
        for (const auto &[ea, ca] : a[static_cast<std::size_t>(i)])
          for (const auto &[eb, cb] : b[static_cast<std::size_t>(j)]) {
            std::vector<int> e(static_cast<std::size_t>(S), 0);
            for (int k = 0; k < S; ++k)
              e[static_cast<std::size_t>(k)] = ea[static_cast<std::size_t>(k)] + eb[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(i + j)][e] += ca * cb;
          }
    return out;
  };
  Series arg(static_cast<std::size_t>(S + 1));
  for (int n = 1; n <= S; ++n) {
    std::vector<int> e(static_cast<std::size_t>(S), 0);
    e[static_cast<std::size_t>(n - 1)] = 1;
    // -x_n/n (-1)^{-n} w^n
    arg[static_cast<std::size_t>(n)][e] = Rational(n % 2 == 0 ? -1 : 1, n);
  }
  Series result(static_cast<std::size_t>(S + 1)), power(static_cast<std::size_t>(S + 1));
  result[0][std::vector<int>(static_cast<std::size_t>(S), 0)] = 1;
  power = result;
  Rational fact = 1;
  for (int k = 1; k <= S; ++k) {
    power = mul(power, arg);
    fact *= k;
    for (int i = 0; i <= S; ++i)
      for (const auto &[e, c] : power[static_cast<std::size_t>(i)])
        result[static_cast<std::size_t>(i)][e] += c / fact;
  }
  for (auto &p : result)
    for (auto it = p.begin(); it != p.end();)
      it = it->second == 0 ? p.erase(it) : std::next(it);
  return result;
}

/// Weierstrass wp(z; 1, tau) from the q-product formula
/// (2 pi i)^2 [ sum_n q^n x/(1 - q^n x)^2 + 1/12 - 2 sum_n sigma_1(n) q^n ], x = e^{2 pi i z}.
inline std::complex<double> wp_product(std::complex<double> z, std::complex<double> tau, int terms = 80) {
  const std::complex<double> I(0, 1);
  const double pi = std::acos(-1.0);
  const auto twopii = 2.0 * pi * I;
  const auto q = std::exp(twopii * tau);
  const auto x = std::exp(twopii * z);
  std::complex<double> s = 1.0 / 12.0;
  auto term = [](std::complex<double> t) { return t / ((1.0 - t) * (1.0 - t)); };
  s += term(x);
  // n < 0 rewritten as q^{|n|} x^{-1} terms to avoid overflow.
  for (int n = 1; n <= terms; ++n) {
    const auto qn = std::pow(q, n);
    s += term(qn * x) + term(qn / x);
  }
  for (int n = 1; n <= terms; ++n)
    s -= 2.0 * static_cast<double>(sigma(1, n)) * std::pow(q, n);
  return twopii * twopii * s;
}

} // namespace oracle
