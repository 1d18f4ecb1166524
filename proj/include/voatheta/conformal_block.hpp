#pragma once

#include "voatheta/fock.hpp"
#include "voatheta/lattice.hpp"
#include "voatheta/modforms.hpp"
#include "voatheta/qseries.hpp"
#include "voatheta/report.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace voatheta {

/// V_{L+shift}, transported by Delta(u0) (zero modes shifted by u0) and with
/// stabilizer phi = exp(-2 pi i v0(0)), so phi^{-1} has eigenvalue
/// exp(2 pi i <v0, alpha+u0>) on momentum alpha.
struct ModuleSpec {
  RationalLattice lattice;
  RationalVector shift;
  CartanVector u0;
  CartanVector v0;

  static ModuleSpec untwisted(const RationalLattice &l, const RationalVector &shift = {});
  LatticeCoset coset() const { return LatticeCoset(lattice, shift); }
  Sector sector() const { return Sector::shifted(u0); }
};

struct ThetaTask {
  ModuleSpec module;
  Insertion insertion;
  CartanVector u;
  CartanVector v;
  Rational order = 100;
};

/// Fill empty u, v, u0, v0 with zeros and check dimensions.
ThetaTask normalized(ThetaTask t);

/// Generalized theta function in closed form:
/// e^{pi i <u,v>} eta^{-d} sum_alpha P_a(x) e^{2 pi i <v0+v, alpha+u0>} q^{<x,x>/2},
/// x = alpha + u0 + u, with P_vac = 1, P_h = <h,x>, and omega via (q d/dq + d/24).
QSeries z_theta(const ThetaTask &t);
/// The q-trace of the insertion's zero mode: z_theta at u = v = 0.
QSeries trace_function(const ModuleSpec &m, const Insertion &a, const Rational &order);
/// Literal trace over an enumerated Fock basis with Schur/Delta expansion and
/// explicit mode actions; exact below energy_cap - d/24.
QSeries z_theta_bruteforce(const ThetaTask &t, const Rational &energy_cap);
/// Tail budget for evaluating z_theta.
GrowthBudget z_theta_budget(const ThetaTask &t);

/// Kets of a module with L(0) + u(0) + <u,u>/2 below the cap.
struct BasisKet {
  Ket ket;
  Rational energy;
};
std::vector<BasisKet> fock_basis(const ModuleSpec &m, const CartanVector &u, const Rational &energy_cap,
                                 std::size_t max_size = 1000000);

/// sum over basis kets of <k|op|k> e^{2 pi i <w, alpha+u0>} q^{energy - d/24}.
QSeries brute_trace(const ModuleSpec &m, const CartanVector &u, const CartanVector &w, const Rational &energy_cap,
                    const std::function<FockState(const FockState &)> &op);

/// Modules V_{L+mu}, mu in L°/L, in canonical order.
std::vector<ModuleSpec> discriminant_modules(const RationalLattice &l);

/// Deterministic sample points in the upper half plane.
std::vector<std::complex<double>> sample_taus(std::size_t count);

struct FitResult {
  Eigen::MatrixXcd matrix;
  double residual = 0;  // max |basis * row - lhs| over samples
  double condition = 0; // of the sample matrix
};

/// Least-squares A with lhs(k, i) = sum_j A_ij basis(k, j) over sample rows k.
/// Throws IllConditionedFit if the residual exceeds tol or the system is singular.
FitResult fit_matrix(const Eigen::MatrixXcd &lhs, const Eigen::MatrixXcd &basis, double tol);

/// Sample rows for one family: lhs(k, i) = (gamma tau_k + delta)^{-wt} Z_i(a;(u,v);rho tau_k),
/// basis(k, j) = Z_j(a;(u',v');tau_k) with (u',v') the transformed characteristics.
/// Returns the largest tail bound seen.
double append_family(Eigen::MatrixXcd &lhs, Eigen::MatrixXcd &basis, const std::vector<ModuleSpec> &modules,
                     const Insertion &a, const CartanVector &u, const CartanVector &v, const SL2 &rho,
                     const Rational &order, const std::vector<std::complex<double>> &taus);

struct STMatrices {
  std::vector<RationalVector> reps;
  std::vector<Cyclotomic> t_exact; // e^{2 pi i (<mu,mu>/2 - d/24)}
  Eigen::MatrixXcd S, T;           // fitted
  Eigen::MatrixXcd S_candidate, T_candidate;
  double fit_residual = 0;
  double candidate_gap = 0; // max entry difference fit vs candidate
};

/// Fit S and T on the vacuum characters of L°/L and validate them against the
/// Gauss-sum candidates. Requires an even lattice.
STMatrices s_t_matrices(const RationalLattice &l, const Rational &order = 100, double tol = 1e-6);

/// Candidate A(rho) built from the S/T candidates through a word for rho.
Eigen::MatrixXcd candidate_matrix(const STMatrices &st, const SL2 &rho);
/// Word in S and T (with powers) equal to rho, e.g. {('T',2),('S',1)}; -I appears as ('S',2).
std::vector<std::pair<char, long>> sl2_word(const SL2 &rho);

/// A(rho) fitted from the plain vacuum traces and checked against the candidate.
Eigen::MatrixXcd fitted_matrix(const RationalLattice &l, const SL2 &rho, const Rational &order = 100,
                               double tol = 1e-6);

/// L[0]-weight of a catalog insertion (omega is not an L[0] eigenvector).
Rational square_bracket_weight(const RationalLattice &l, const Insertion &a);

/// (alpha u + gamma v, beta u + delta v).
std::pair<CartanVector, CartanVector> transform_characteristics(const SL2 &rho, const CartanVector &u,
                                                                const CartanVector &v);

/// Check (gamma tau+delta)^{-wt[a]} Z_i(a;(u,v);rho tau) = sum_j A_ij Z_j(a;(u',v');tau)
/// for the task's module i among the untwisted modules of its (even) lattice.
TransformReport verify_main_theorem(const ThetaTask &t, const SL2 &rho, std::complex<double> tau, double tol);
/// Same with an explicit characteristic pair on the right and an explicit A.
TransformReport main_theorem_residual(const ThetaTask &t, const SL2 &rho, std::complex<double> tau,
                                      const Eigen::MatrixXcd &A, const CartanVector &u2, const CartanVector &v2,
                                      double tol);

/// Fit A from the (u,v) family (vacuum and Cartan insertions) and from plain
/// traces; residual is the max entry gap.
TransformReport verify_corollary(const RationalLattice &l, const CartanVector &u, const CartanVector &v,
                                 const SL2 &rho, double tol, const Rational &order = 100);

/// Series in Y = 2 pi i (x - z): coefficient of Y^j, j from -2 upward.
struct ZhuReport {
  std::map<long, QSeries> lhs, rhs;
  bool equal() const;
  /// Leading pole Y^{-2} of both sides (b_[1] a times the 1-point function).
  std::pair<QSeries, QSeries> pole() const;
};

/// Two-point recurrence check for Cartan insertions b, a1 on module m, through
/// Y^{y_order} and energy below q_order + 1.
ZhuReport zhu_recurrence_check(const ModuleSpec &m, const CartanVector &b, const CartanVector &a1, long y_order = 2,
                               long q_order = 3);

} // namespace voatheta
