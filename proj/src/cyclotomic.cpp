#include "voatheta/cyclotomic.hpp"

#include "voatheta/errors.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <numbers>

namespace voatheta {

namespace {

// Exact division of integer polynomials (lowest degree first), divisor monic.
std::vector<Integer> poly_divide_exact(std::vector<Integer> num, const std::vector<Integer> &den) {
  const std::size_t dn = den.size() - 1;
  if (num.size() <= dn)
    return {Integer(0)};
  std::vector<Integer> quot(num.size() - dn, Integer(0));
  for (std::size_t k = num.size(); k-- > dn;) {
    const Integer c = num[k];
    quot[k - dn] = c;
    if (c != 0)
      for (std::size_t j = 0; j <= dn; ++j)
        num[k - dn + j] -= c * den[j];
  }
  return quot;
}

} // namespace

const std::vector<Integer> &cyclotomic_polynomial(unsigned long n) {
  static std::mutex mutex;
  static std::map<unsigned long, std::vector<Integer>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end())
    return it->second;
  // x^n - 1 divided by Phi_d for every proper divisor d.
  std::vector<Integer> p(n + 1, Integer(0));
  p[0] = -1;
  p[n] = 1;
  for (unsigned long d = 1; d < n; ++d) {
    if (n % d != 0)
      continue;
    auto it = cache.find(d);
    if (it == cache.end()) {
      // Divisors are visited in increasing order, so every divisor of d is
      // already cached here.
      std::vector<Integer> q(d + 1, Integer(0));
      q[0] = -1;
      q[d] = 1;
      for (unsigned long e = 1; e < d; ++e)
        if (d % e == 0)
          q = poly_divide_exact(q, cache.at(e));
      it = cache.emplace(d, std::move(q)).first;
    }
    p = poly_divide_exact(p, it->second);
  }
  return cache.emplace(n, std::move(p)).first->second;
}

Cyclotomic::Cyclotomic(const Rational &c) {
  if (c != 0)
    terms_.emplace(Rational(0), c);
}

Cyclotomic Cyclotomic::unit(const Rational &angle, const Rational &c) {
  Cyclotomic out;
  if (c != 0)
    out.terms_.emplace(frac(angle), c);
  out.reduce();
  return out;
}

bool Cyclotomic::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

Rational Cyclotomic::rational_value() const {
  if (!is_rational())
    throw Error("cyclotomic value is not rational: " + to_string());
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

Cyclotomic Cyclotomic::inverse() const {
  if (is_zero())
    throw NonInvertibleLeadingTerm("cannot invert zero");
  if (terms_.size() == 1) {
    const auto &[angle, c] = *terms_.begin();
    return unit(-angle, 1 / c);
  }
  // x^{-1} = (prod of the other Galois conjugates) / norm(x).
  Integer n = 1;
  for (const auto &[a, c] : terms_)
    n = lcm(n, Rational(a).get_den());
  const long N = n.get_si();
  Cyclotomic others(1);
  for (long k = 2; k < N; ++k) {
    if (std::gcd(k, N) != 1)
      continue;
    Cyclotomic conjugate;
    for (const auto &[a, c] : terms_)
      conjugate += unit(frac(a * k), c);
    others *= conjugate;
  }
  const Cyclotomic norm = *this * others;
  if (!norm.is_rational())
    throw Error("cyclotomic norm is not rational: " + norm.to_string());
  return others * (1 / norm.rational_value());
}

Cyclotomic Cyclotomic::conj() const {
  Cyclotomic out;
  for (const auto &[a, c] : terms_)
    out.terms_[frac(-a)] += c;
  out.reduce();
  return out;
}

std::complex<double> Cyclotomic::to_complex() const {
  std::complex<double> s = 0;
  for (const auto &[a, c] : terms_) {
    const double th = 2 * std::numbers::pi * a.get_d();
    s += c.get_d() * std::complex<double>(std::cos(th), std::sin(th));
  }
  return s;
}

double Cyclotomic::abs_bound() const {
  double s = 0;
  for (const auto &[a, c] : terms_)
    s += std::abs(c.get_d());
  return s;
}

std::string Cyclotomic::to_string() const {
  if (terms_.empty())
    return "0";
  std::string s;
  bool first = true;
  for (const auto &[a, c] : terms_) {
    if (!first)
      s += " + ";
    first = false;
    if (a == 0)
      s += c.get_str();
    else
      s += c.get_str() + "*z(" + a.get_str() + ")";
  }
  return s;
}

Cyclotomic &Cyclotomic::operator+=(const Cyclotomic &o) {
  for (const auto &[a, c] : o.terms_)
    terms_[a] += c;
  reduce();
  return *this;
}

Cyclotomic &Cyclotomic::operator-=(const Cyclotomic &o) {
  for (const auto &[a, c] : o.terms_)
    terms_[a] -= c;
  reduce();
  return *this;
}

Cyclotomic &Cyclotomic::operator*=(const Cyclotomic &o) {
  if (o.is_rational()) {
    if (o.terms_.empty())
      terms_.clear();
    else
      *this *= o.terms_.begin()->second;
    return *this;
  }
  std::map<Rational, Rational> out;
  for (const auto &[a, c] : terms_)
    for (const auto &[b, d] : o.terms_)
      out[frac(a + b)] += c * d;
  terms_ = std::move(out);
  reduce();
  return *this;
}

Cyclotomic &Cyclotomic::operator*=(const Rational &s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto &[a, c] : terms_)
    c *= s;
  return *this;
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic out = *this;
  for (auto &[a, c] : out.terms_)
    c = -c;
  return out;
}

bool operator==(const Cyclotomic &a, const Cyclotomic &b) { return (a - b).is_zero(); }

void Cyclotomic::reduce() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (it->second == 0) ? terms_.erase(it) : std::next(it);
  if (is_rational())
    return;
  Integer n = 1;
  for (const auto &[a, c] : terms_)
    n = lcm(n, a.get_den());
  const unsigned long nn = n.get_ui();
  const auto &phi = cyclotomic_polynomial(nn);
  const std::size_t deg = phi.size() - 1;
  // Power-basis coefficients in zeta_N, then reduce modulo Phi_N (monic).
  std::vector<Rational> poly(nn, Rational(0));
  for (const auto &[a, c] : terms_)
    poly[Rational(a * nn).get_num().get_ui()] += c;
  for (std::size_t k = nn; k-- > deg;) {
    if (poly[k] == 0)
      continue;
    const Rational lead = poly[k];
    for (std::size_t j = 0; j <= deg; ++j)
      poly[k - deg + j] -= lead * Rational(phi[j]);
  }
  terms_.clear();
  for (std::size_t k = 0; k < deg && k < nn; ++k)
    if (poly[k] != 0) {
      Rational angle(static_cast<long>(k), static_cast<long>(nn));
      angle.canonicalize();
      terms_.emplace(angle, poly[k]);
    }
  // A smaller denominator may have appeared; the form stays canonical for it
  // only after another pass.
  Integer m = 1;
  for (const auto &[a, c] : terms_)
    m = lcm(m, a.get_den());
  if (m != n && !is_rational())
    reduce();
}

} // namespace voatheta
