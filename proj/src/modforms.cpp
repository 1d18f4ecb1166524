#include "voatheta/modforms.hpp"

#include "voatheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace voatheta {

namespace {

using namespace std::complex_literals;
constexpr double kPi = std::numbers::pi;

// Dense integer coefficients at exponents 0..len-1 as an exact series shifted by `offset`.
QSeries from_integers(const std::vector<Integer> &c, const Rational &offset, const Rational &order) {
  std::vector<std::pair<Rational, Cyclotomic>> terms;
  for (std::size_t n = 0; n < c.size(); ++n)
    if (c[n] != 0)
      terms.emplace_back(offset + Rational(static_cast<long>(n)), Cyclotomic(Rational(c[n])));
  return QSeries::from_terms(terms, order);
}

// Number of integer exponents n >= 0 with offset + n < order.
std::size_t count_below(const Rational &offset, const Rational &order) {
  if (order <= offset)
    return 0;
  return ceil(order - offset).get_ui();
}

std::complex<double> two_pi_i_pow(long p) { return std::pow(2.0 * kPi * 1i, static_cast<double>(p)); }

} // namespace

Rational bernoulli(unsigned n) {
  static std::mutex mutex;
  static std::vector<Rational> table{Rational(1)};
  std::lock_guard<std::mutex> lock(mutex);
  while (table.size() <= n) {
    const unsigned m = static_cast<unsigned>(table.size());
    Rational s = 0;
    for (unsigned j = 0; j < m; ++j)
      s += Rational(binomial(Rational(m + 1), j)) * table[j];
    table.push_back(-s / Rational(m + 1));
  }
  return table[n];
}

QSeries dedekind_eta(const Rational &order) {
  const Rational offset(1, 24);
  if (order <= offset)
    throw Error("eta needs order > 1/24");
  const std::size_t len = count_below(offset, order);
  std::vector<Integer> c(len, Integer(0));
  c[0] = 1;
  for (std::size_t n = 1; n < len; ++n)
    for (std::size_t k = len; k-- > n;)
      c[k] -= c[k - n];
  return from_integers(c, offset, order);
}

QSeries eta_power_inverse(unsigned d, const Rational &order) {
  const Rational offset = Rational(-static_cast<long>(d)) / 24;
  const std::size_t len = count_below(offset, order);
  std::vector<Integer> c(len, Integer(0));
  if (len > 0)
    c[0] = 1;
  for (unsigned rep = 0; rep < d; ++rep)
    for (std::size_t n = 1; n < len; ++n)
      for (std::size_t k = n; k < len; ++k)
        c[k] += c[k - n];
  return from_integers(c, offset, order);
}

QSeries eisenstein_E(long k2, const Rational &order) {
  if (k2 < 4 || k2 % 2 != 0)
    throw OddOrSmallWeight("Eisenstein weight must be even and at least 4, got " + std::to_string(k2));
  const std::size_t len = count_below(0, order);
  std::vector<std::pair<Rational, Cyclotomic>> terms;
  terms.emplace_back(0, Cyclotomic(-bernoulli(static_cast<unsigned>(k2)) / Rational(factorial(k2))));
  const Rational scale = Rational(2) / Rational(factorial(k2 - 1));
  for (std::size_t n = 1; n < len; ++n) {
    Integer sigma = 0;
    for (std::size_t dv = 1; dv * dv <= n; ++dv) {
      if (n % dv != 0)
        continue;
      Integer t;
      mpz_ui_pow_ui(t.get_mpz_t(), dv, static_cast<unsigned long>(k2 - 1));
      sigma += t;
      if (dv * dv != n) {
        mpz_ui_pow_ui(t.get_mpz_t(), n / dv, static_cast<unsigned long>(k2 - 1));
        sigma += t;
      }
    }
    terms.emplace_back(Rational(static_cast<long>(n)), Cyclotomic(scale * Rational(sigma)));
  }
  return QSeries::from_terms(terms, order);
}

GrowthBudget eta_budget() { return {1.0, 0.0, 1.0, -1.0 / 24}; }

GrowthBudget eta_inverse_budget(unsigned d) {
  const double t = 0.25;
  return {std::exp(d * kPi * kPi / (6 * t)), 0.0, std::exp(t), d / 24.0};
}

GrowthBudget eisenstein_budget(long k2) {
  // sigma_{k-1}(n) <= zeta(k-1) n^{k-1} and 2 zeta(3) < 2.5.
  return {2.5 / factorial(k2 - 1).get_d(), static_cast<double>(k2 - 1), 1.0, 0.0};
}

std::pair<long, QSeries> WpExpansion::coefficient(long j) const {
  for (const auto &t : terms)
    if (t.z_power == j)
      return {t.token, t.series};
  return {0, QSeries::zero()};
}

WpExpansion weierstrass_p(long k, long z_order, const Rational &q_order) {
  if (k < 1)
    throw Error("wp_k needs k >= 1");
  if (z_order < -k)
    throw Error("z_order must be at least -k");
  WpExpansion out;
  out.k = k;
  out.terms.push_back({-k, 0, QSeries::constant(1)});
  const Rational sign = (k % 2 == 0) ? 1 : -1;
  for (long n = 1; 2 * n + 2 - k <= z_order; ++n) {
    out.n_max = n;
    const Rational c = sign * binomial(Rational(2 * n + 1), k - 1);
    if (c == 0)
      continue;
    out.terms.push_back({2 * n + 2 - k, 2 * n + 2, Cyclotomic(c) * eisenstein_E(2 * n + 2, q_order)});
  }
  return out;
}

LatticeSums period_lattice_sums(std::complex<double> tau) {
  if (!(tau.imag() > 0))
    throw NotInUpperHalfPlane("tau must have positive imaginary part");
  const double diam = 1 + std::abs(tau);
  const double radius = std::max(30.0, 4 * diam);
  const long m_max = static_cast<long>(std::ceil(radius / tau.imag())) + 1;
  double r_min = std::numeric_limits<double>::infinity();
  double box = 0;
  for (long m = -m_max; m <= m_max; ++m) {
    const double x = m * tau.real();
    const long n_lo = static_cast<long>(std::floor(-radius - x)) - 1;
    const long n_hi = static_cast<long>(std::ceil(radius - x)) + 1;
    for (long n = n_lo; n <= n_hi; ++n) {
      if (m == 0 && n == 0)
        continue;
      const double r = std::abs(static_cast<double>(m) * tau + static_cast<double>(n));
      r_min = std::min(r_min, r);
      if (r < radius)
        box += std::pow(r, -4);
    }
  }
  // Points beyond the radius: compare each with the integral of (|w|-D)^{-4}
  // over its own period cell of area Im(tau) and diameter D.
  const double s = radius - 2 * diam;
  const double tail = 2 * kPi * (0.5 / (s * s) + diam / (3 * s * s * s)) / tau.imag();
  return {r_min, box + tail};
}

namespace {

// Bound on sum_{n > n_max} |C(2n+1, k-1)| |G_{2n+2}| |z|^{2n+2-k}.
double wp_z_tail(long k, long n_max, double az, const LatticeSums &ls) {
  if (az >= ls.r_min)
    return std::numeric_limits<double>::infinity();
  const double x = az / ls.r_min;
  double total = 0;
  for (long n = n_max + 1; n < n_max + 100000; ++n) {
    const double c = binomial(Rational(2 * n + 1), k - 1).get_d();
    // |G_{2n+2}| <= r_min^{-(2n-2)} B4.
    const double t = c * ls.b4 * std::pow(ls.r_min, -(2.0 * n - 2)) * std::pow(az, 2.0 * n + 2 - k);
    total += t;
    const double c_next = binomial(Rational(2 * n + 3), k - 1).get_d();
    const double r = (c > 0 ? c_next / c : 1.0) * x * x;
    if (c > 0 && r < 1 && (r < 0.5 || t * r / (1 - r) < 1e-6 * total))
      return total + t * r / (1 - r);
  }
  return std::numeric_limits<double>::infinity();
}

} // namespace

Evaluation evaluate_wp(const WpExpansion &wp, std::complex<double> z, std::complex<double> tau,
                       double tail_tolerance) {
  if (!(tau.imag() > 0))
    throw NotInUpperHalfPlane("tau must have positive imaginary part");
  if (z == 0.0)
    throw Error("wp_k has a pole at z = 0");
  Evaluation ev;
  const double az = std::abs(z);
  for (const auto &t : wp.terms) {
    const std::complex<double> scale = two_pi_i_pow(t.token) * std::pow(z, static_cast<double>(t.z_power));
    GrowthBudget budget = eisenstein_budget(std::max<long>(t.token, 4));
    // The stored series is a rational multiple of E_{token}.
    if (!t.series.is_zero() && t.token >= 4)
      budget.C *= std::abs(t.series.leading_coefficient().to_complex() /
                           eisenstein_E(t.token, 1).leading_coefficient().to_complex());
    const Evaluation e = evaluate(t.series, tau, budget, std::numeric_limits<double>::infinity());
    ev.value += scale * e.value;
    ev.tail_bound += std::abs(scale) * e.tail_bound;
  }
  ev.tail_bound += wp_z_tail(wp.k, wp.n_max, az, period_lattice_sums(tau));
  if (!(ev.tail_bound <= tail_tolerance))
    throw TailBoundExceeded("wp tail bound " + format_double(ev.tail_bound) + " exceeds tolerance");
  return ev;
}

namespace {

TransformReport make_report(std::string law, const SL2 &rho, std::complex<double> tau, const Evaluation &lhs,
                            std::complex<double> factor, const Evaluation &rhs, double tol) {
  TransformReport r;
  r.law = std::move(law);
  r.rho = rho;
  r.tau = tau;
  r.lhs = lhs.value;
  r.rhs = factor * rhs.value;
  r.residual = std::abs(r.lhs - r.rhs);
  r.tail_budget = lhs.tail_bound + std::abs(factor) * rhs.tail_bound;
  r.tolerance = tol;
  return r;
}

// Series at rho*tau. For translations the substitution is done exactly on the
// coefficients so that invariance shows up as an identical sum.
Evaluation evaluate_at_image(const QSeries &s, const SL2 &rho, std::complex<double> tau, const GrowthBudget &budget) {
  const double inf = std::numeric_limits<double>::infinity();
  if (rho.c == 0 && rho.a == 1 && rho.d == 1 && rho.b >= 0) {
    QSeries t = s;
    for (long i = 0; i < rho.b; ++i)
      t = t_shift(t);
    return evaluate(t, tau, budget, inf);
  }
  return evaluate(s, rho.apply(tau), budget, inf);
}

void check_tails(const TransformReport &r) {
  if (!std::isfinite(r.tail_budget) || r.tail_budget > r.tolerance)
    throw TailBoundExceeded(r.law + ": tail budget " + format_double(r.tail_budget) + " exceeds tolerance " +
                            format_double(r.tolerance));
}

} // namespace

TransformReport verify_eisenstein_modularity(long k2, const SL2 &rho, std::complex<double> tau, double tol,
                                             const Rational &order) {
  const QSeries e = eisenstein_E(k2, order);
  const GrowthBudget b = eisenstein_budget(k2);
  const Evaluation lhs = evaluate_at_image(e, rho, tau, b);
  const Evaluation rhs = evaluate(e, tau, b, std::numeric_limits<double>::infinity());
  auto r = make_report("eisenstein", rho, tau, lhs, std::pow(rho.automorphy(tau), static_cast<double>(k2)), rhs, tol);
  check_tails(r);
  return r;
}

TransformReport verify_wp_modularity(long k, const SL2 &rho, std::complex<double> z, std::complex<double> tau,
                                     double tol, const Rational &order) {
  const std::complex<double> j = rho.automorphy(tau);
  const std::complex<double> tau2 = rho.apply(tau);
  const std::complex<double> z2 = z / j;
  const LatticeSums l1 = period_lattice_sums(tau), l2 = period_lattice_sums(tau2);
  // Smallest expansion whose z-tail is negligible at both points.
  long n_max = 1;
  while (n_max < 60 && (wp_z_tail(k, n_max, std::abs(z), l1) > 1e-3 * tol ||
                        wp_z_tail(k, n_max, std::abs(z2), l2) > 1e-3 * tol))
    ++n_max;
  const WpExpansion wp = weierstrass_p(k, 2 * n_max + 2 - k, order);
  const double inf = std::numeric_limits<double>::infinity();
  const Evaluation lhs = evaluate_wp(wp, z2, tau2, inf);
  const Evaluation rhs = evaluate_wp(wp, z, tau, inf);
  auto r = make_report("wp", rho, tau, lhs, std::pow(j, static_cast<double>(k)), rhs, tol);
  check_tails(r);
  return r;
}

std::vector<TransformReport> verify_eta_laws(std::complex<double> tau, double tol, const Rational &order) {
  const QSeries eta = dedekind_eta(order);
  const GrowthBudget b = eta_budget();
  const double inf = std::numeric_limits<double>::infinity();
  const Evaluation at_tau = evaluate(eta, tau, b, inf);
  std::vector<TransformReport> out;
  out.push_back(make_report("eta-T", SL2::T(), tau, evaluate_at_image(eta, SL2::T(), tau, b),
                            std::exp(kPi * 1i / 12.0), at_tau, tol));
  // Principal branch of (-i tau)^{1/2}.
  out.push_back(make_report("eta-S", SL2::S(), tau, evaluate(eta, SL2::S().apply(tau), b, inf),
                            std::sqrt(-1i * tau), at_tau, tol));
  for (const auto &r : out)
    check_tails(r);
  return out;
}

} // namespace voatheta
