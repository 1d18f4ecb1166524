#pragma once

#include "voatheta/conformal_block.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace voatheta {

/// Ambient lattice L with an even sublattice K of full rank and module shifts
/// lambda_i (L coordinates) with L + lambda_i inside K°.
struct CosetFrame {
  RationalLattice L;
  RationalLattice K;
  RationalMatrix embedding; // column j = j-th basis vector of K in L coordinates
  std::vector<RationalVector> shifts;

  /// Throws NotEvenIntegral / IncompatibleSector / ParseError if the data is inconsistent.
  void validate() const;
  ModuleSpec module(std::size_t i) const;
  /// L-coordinates to K-coordinates.
  RationalVector to_k(const RationalVector &x) const;

  /// L = K, shifts = representatives of K°/K.
  static CosetFrame trivial(const RationalLattice &k);
  /// L = K° (dual basis), single shift 0.
  static CosetFrame dual(const RationalLattice &k);
};

/// X := eta^d * z_theta, i.e. the theta numerator without the eta denominator.
QSeries x_trace(const ThetaTask &t);
GrowthBudget x_trace_budget(const ThetaTask &t);

struct ThetaClass {
  RationalVector mu; // K coordinates, reduced into [0,1)
  QSeries class_sum; // sum over (L+lambda) ∩ (K+mu) of q^{<b,b>/2}
  QSeries theta;     // theta_{K+mu}
  QSeries ch;        // class_sum / theta
};

/// Split X(1;(0,0)) of module i into K-classes; checks theta * ch == class_sum.
std::vector<ThetaClass> theta_decompose(const CosetFrame &f, std::size_t i, const Rational &order);
/// sum_mu theta_{K+mu} * ch_mu.
QSeries reassemble(const std::vector<ThetaClass> &classes);

/// T-law X_i(tau+1) = e^{pi i d/12} sum_j T_ij X_j(u,u+v;tau) or S-law
/// X_i(-1/tau) = (-i tau)^{d/2} sum_j S_ij X_j(v,-u;tau), vacuum insertion,
/// with S and T taken from s_t_matrices of the (even) ambient lattice.
TransformReport verify_final_theorem(const CosetFrame &f, std::size_t i, char which, const CartanVector &u,
                                     const CartanVector &v, std::complex<double> tau, double tol,
                                     const Rational &order = 150);
/// The T-law as an exact series identity: t_shift(X_i(u,v)) = zeta(<mu,mu>/2) X_i(u,u+v).
bool final_t_law_exact(const CosetFrame &f, std::size_t i, const CartanVector &u, const CartanVector &v,
                       const Rational &order);

struct VanishingReport {
  bool vanished = false;
  QSeries trace;
};

/// Trace of a charge-alpha insertion over module i's basis below energy_cap.
/// alpha != 0 moves every sector, so the diagonal (and the trace) is empty;
/// alpha = 0 reduces to the vacuum z_theta.
VanishingReport vanishing_check(const CosetFrame &f, std::size_t i, const CartanVector &alpha,
                                const CartanVector &u, const CartanVector &v, const Rational &energy_cap = 4);

struct ClosureProbe {
  Eigen::MatrixXcd matrix; // least-squares fit of ch_k(-1/tau) on ch_j(tau)
  double residual = 0;
  double condition = 0; // +inf when the ch_j are linearly dependent
  double tail = 0;
  std::size_t classes = 0;
};

/// Exploratory: does span{ch_mu} look closed under S? Reports only.
ClosureProbe s_closure_probe(const CosetFrame &f, const Rational &order,
                             const std::vector<std::complex<double>> &taus);

} // namespace voatheta
