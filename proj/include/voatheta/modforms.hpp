#pragma once

#include "voatheta/qseries.hpp"
#include "voatheta/report.hpp"

#include <complex>
#include <vector>

namespace voatheta {

/// Bernoulli number B_n (B_1 = -1/2).
Rational bernoulli(unsigned n);

/// eta = q^{1/24} prod (1 - q^n), exact below `order`.
QSeries dedekind_eta(const Rational &order);
/// eta^{-d}, exact below `order`.
QSeries eta_power_inverse(unsigned d, const Rational &order);

/// E_{k2} = G_{k2} / (2 pi i)^{k2} = -B_{k2}/k2! + (2/(k2-1)!) sum sigma_{k2-1}(n) q^n.
QSeries eisenstein_E(long k2, const Rational &order);

GrowthBudget eta_budget();
/// Budget for eta^{-d}: d-coloured partitions satisfy p_d(n) <= exp(n t + d pi^2 / (6 t)).
GrowthBudget eta_inverse_budget(unsigned d);
GrowthBudget eisenstein_budget(long k2);

/// One term (2 pi i)^token * series * z^z_power of a Weierstrass function.
struct WpTerm {
  long z_power;
  long token;
  QSeries series;
};

/// Laurent expansion of wp_k in z; coefficients are E-normalized q-series.
struct WpExpansion {
  long k = 0;
  long n_max = 0; // highest n of the defining sum that is included
  std::vector<WpTerm> terms;

  /// Coefficient of z^j as (token, series); the series is zero if absent.
  std::pair<long, QSeries> coefficient(long j) const;
};

/// wp_k(z, tau) = z^{-k} + (-1)^k sum_{n>=1} C(2n+1, k-1) G_{2n+2}(tau) z^{2n+2-k},
/// keeping all powers of z up to and including z_order.
WpExpansion weierstrass_p(long k, long z_order, const Rational &q_order);

/// Shortest nonzero |m tau + n| and a rigorous upper bound on sum' |m tau + n|^{-4}.
struct LatticeSums {
  double r_min;
  double b4;
};
LatticeSums period_lattice_sums(std::complex<double> tau);

/// Value of the expansion at (z, tau), with the q-tails of every coefficient
/// and the omitted z-tail folded into the bound.
Evaluation evaluate_wp(const WpExpansion &wp, std::complex<double> z, std::complex<double> tau,
                       double tail_tolerance = 1e-6);

TransformReport verify_eisenstein_modularity(long k2, const SL2 &rho, std::complex<double> tau, double tol,
                                             const Rational &order = 200);
TransformReport verify_wp_modularity(long k, const SL2 &rho, std::complex<double> z, std::complex<double> tau,
                                     double tol, const Rational &order = 200);
/// {T-law, S-law} for eta.
std::vector<TransformReport> verify_eta_laws(std::complex<double> tau, double tol, const Rational &order = 200);

} // namespace voatheta
