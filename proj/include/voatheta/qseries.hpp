#pragma once

#include "voatheta/cyclotomic.hpp"
#include "voatheta/rational.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace voatheta {

/// Cap on exponent denominators. Defaults to 10^6, or VOATHETA_MAX_DEN if set.
std::int64_t max_denominator();
void set_max_denominator(std::int64_t cap);

/// Truncated formal series sum_e c_e q^e, e in offset + (1/den) Z.
///
/// `trunc` is the first unknown exponent; an empty `trunc` marks an exact
/// finite polynomial. The stored form is canonical (leading coefficient
/// nonzero, minimal denominator), so `==` compares mathematical content.
class QSeries {
public:
  QSeries() = default; // exact zero

  static QSeries constant(const Cyclotomic &c, std::optional<Rational> trunc = std::nullopt);
  static QSeries monomial(const Cyclotomic &c, const Rational &exponent,
                          std::optional<Rational> trunc = std::nullopt);
  static QSeries zero(std::optional<Rational> trunc = std::nullopt);
  /// Build from (exponent, coefficient) terms; repeated exponents are summed and
  /// terms at or beyond `trunc` are dropped.
  static QSeries from_terms(const std::vector<std::pair<Rational, Cyclotomic>> &terms,
                            std::optional<Rational> trunc);
  /// Raw constructor used by deserialization; validates the invariants.
  static QSeries from_dense(std::int64_t den, const Rational &offset, std::optional<Rational> trunc,
                            std::vector<Cyclotomic> coeffs);

  std::int64_t den() const { return den_; }
  const Rational &offset() const { return offset_; }
  const std::optional<Rational> &trunc() const { return trunc_; }
  bool is_exact() const { return !trunc_; }
  const std::vector<Cyclotomic> &coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of q^e. Throws if e is at or beyond the truncation order.
  Cyclotomic coefficient(const Rational &e) const;
  /// Nonzero terms in increasing exponent order.
  std::vector<std::pair<Rational, Cyclotomic>> terms() const;
  Cyclotomic leading_coefficient() const;

  std::string to_string() const;

  friend bool operator==(const QSeries &a, const QSeries &b);
  friend bool operator!=(const QSeries &a, const QSeries &b) { return !(a == b); }

private:
  void normalize();
  std::int64_t den_ = 1;
  Rational offset_ = 0;
  std::optional<Rational> trunc_;
  std::vector<Cyclotomic> coeffs_;
};

QSeries operator+(const QSeries &a, const QSeries &b);
QSeries operator-(const QSeries &a, const QSeries &b);
QSeries operator-(const QSeries &a);
QSeries operator*(const QSeries &a, const QSeries &b);
QSeries operator*(const Cyclotomic &c, const QSeries &a);

/// Drop everything at or beyond `order` (never raises precision).
QSeries truncate(const QSeries &a, const Rational &order);
/// Multiplicative inverse. For an exact non-monomial input the result is
/// infinite, so `order` (absolute truncation of the result) is required.
QSeries invert(const QSeries &a, std::optional<Rational> order = std::nullopt);
QSeries pow_int(const QSeries &a, long k, std::optional<Rational> order = std::nullopt);
/// q d/dq: c q^e -> c e q^e.
QSeries q_derivative(const QSeries &a);
/// Multiply by q^r.
QSeries shift(const QSeries &a, const Rational &r);
/// Substitute tau -> tau + 1, i.e. c q^e -> c zeta(e) q^e.
QSeries t_shift(const QSeries &a);

/// Growth budget for the unknown tail: for every integer k >= 0 the total
/// |coefficient| mass on exponents e with e + shift in [k, k+1) is asserted to
/// be at most C (1+k)^p rho^k, and no exponent lies below -shift.
struct GrowthBudget {
  double C = 1;
  double p = 0;
  double rho = 1;
  double shift = 0;
};

/// Budget for a product of two series with the given budgets.
GrowthBudget combine(const GrowthBudget &a, const GrowthBudget &b);

struct Evaluation {
  std::complex<double> value;
  double tail_bound = 0;
};

/// Sum of the stored terms at q = exp(2 pi i tau), with a rigorous bound on
/// the truncated tail from `budget`. Throws NotInUpperHalfPlane or
/// TailBoundExceeded (tail bound above `tail_tolerance`).
Evaluation evaluate(const QSeries &a, std::complex<double> tau, const GrowthBudget &budget,
                    double tail_tolerance = 1e-6);
/// Tail bound alone; +inf when the budget diverges at this tau.
double tail_bound(const QSeries &a, std::complex<double> tau, const GrowthBudget &budget);

/// exp(2 pi i tau e) for rational e.
std::complex<double> q_power(std::complex<double> tau, const Rational &e);

} // namespace voatheta
