#pragma once

#include "voatheta/rational.hpp"

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace voatheta {

/// Exact element of the group ring Q[Q/Z]: a finite sum of c_j * zeta(r_j),
/// where zeta(r) = exp(2 pi i r) and r_j in [0, 1).
///
/// Values are kept reduced modulo the cyclotomic polynomial of the common
/// angle denominator, so the stored form has at most phi(N) terms. Two values
/// compare equal iff they are equal as complex numbers.
class Cyclotomic {
public:
  Cyclotomic() = default;
  Cyclotomic(const Rational &c); // NOLINT: implicit from rationals is intended
  Cyclotomic(long c) : Cyclotomic(Rational(c)) {}

  /// c * zeta(angle).
  static Cyclotomic unit(const Rational &angle, const Rational &c = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  /// Single term c * zeta(r).
  bool is_monomial() const { return terms_.size() == 1; }
  Rational rational_value() const; // requires is_rational()

  Cyclotomic inverse() const;
  Cyclotomic conj() const;

  std::complex<double> to_complex() const;
  /// Upper bound on |value|: sum of |c_j|.
  double abs_bound() const;

  const std::map<Rational, Rational> &terms() const { return terms_; }
  std::string to_string() const;

  Cyclotomic &operator+=(const Cyclotomic &o);
  Cyclotomic &operator-=(const Cyclotomic &o);
  Cyclotomic &operator*=(const Cyclotomic &o);
  Cyclotomic &operator*=(const Rational &s);

  friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic &b) { return a += b; }
  friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic &b) { return a -= b; }
  friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic &b) { return a *= b; }
  friend Cyclotomic operator*(Cyclotomic a, const Rational &s) { return a *= s; }
  friend Cyclotomic operator*(const Rational &s, Cyclotomic a) { return a *= s; }
  Cyclotomic operator-() const;

  friend bool operator==(const Cyclotomic &a, const Cyclotomic &b);
  friend bool operator!=(const Cyclotomic &a, const Cyclotomic &b) { return !(a == b); }

private:
  void reduce();
  std::map<Rational, Rational> terms_;
};

/// Integer coefficients of the N-th cyclotomic polynomial, lowest degree first.
const std::vector<Integer> &cyclotomic_polynomial(unsigned long n);

} // namespace voatheta
