#pragma once

#include "voatheta/qseries.hpp"
#include "voatheta/rational.hpp"

#include <optional>
#include <vector>

namespace voatheta {

/// Positive-definite lattice given by a rational Gram matrix; vectors are
/// written in coordinates of the lattice basis and <x,y> = x^T G y.
class RationalLattice {
public:
  RationalLattice() = default;
  /// Throws NotPositiveDefinite unless `gram` is square, symmetric and positive definite.
  explicit RationalLattice(RationalMatrix gram);

  std::size_t rank() const { return gram_.size(); }
  const RationalMatrix &gram() const { return gram_; }
  Rational pair(const RationalVector &x, const RationalVector &y) const { return pairing(gram_, x, y); }
  Rational norm2(const RationalVector &x) const { return pair(x, x) / 2; }
  /// G^{-1}; the diagonal bounds coordinates by norm.
  const RationalMatrix &inverse_gram() const { return inverse_; }

  bool is_integral() const;
  bool is_even() const; // integral with even diagonal

  bool operator==(const RationalLattice &o) const { return gram_ == o.gram_; }

private:
  RationalMatrix gram_;
  RationalMatrix inverse_;
};

using CartanVector = RationalVector;

/// L + shift, with the shift reduced into [0,1)^d.
struct LatticeCoset {
  RationalLattice lattice;
  RationalVector shift;

  LatticeCoset() = default;
  LatticeCoset(RationalLattice l, RationalVector s);
};

/// Reduce every coordinate into [0,1).
RationalVector reduce_mod_lattice(const RationalVector &x);

struct LatticePoint {
  RationalVector coords; // alpha, including the coset shift
  Rational norm;         // <alpha+u, alpha+u>/2
};

/// All alpha in L + shift with <alpha+u, alpha+u>/2 < bound, lexicographic by coordinates.
std::vector<LatticePoint> enumerate_by_norm(const LatticeCoset &c, const CartanVector &u, const Rational &bound);

/// sum_{alpha in L+shift} P(alpha+s) zeta(<w, alpha>) q^{<alpha+s, alpha+s>/2}
/// with P = 1, or P(x) = <h, x> when `linear` is given.
QSeries theta_sum(const LatticeCoset &c, const CartanVector &s, const CartanVector &w,
                  const std::optional<CartanVector> &linear, const Rational &order);

/// e^{pi i <u,v>} sum_{alpha in L+shift} e^{2 pi i <v,alpha>} q^{<alpha+u, alpha+u>/2}.
QSeries theta_with_characteristics(const LatticeCoset &c, const CartanVector &u, const CartanVector &v,
                                   const Rational &order);

/// Budget for theta_sum: the number of points with norm below k+1 is at most
/// prod_i (2 sqrt(2(k+1) G^{-1}_ii) + 1), and |<h,x>| <= |h| sqrt(2(k+1)).
GrowthBudget theta_budget(const RationalLattice &l, const std::optional<CartanVector> &linear);

struct DiscriminantData {
  RationalMatrix dual_gram;                  // G^{-1}
  std::vector<RationalVector> representatives; // of K°/K in [0,1)^d, lattice coordinates
};

/// Requires an even lattice (NotEvenIntegral otherwise).
DiscriminantData discriminant_data(const RationalLattice &k);

/// Diagonal form D = U G V over the integers; returns (diag(D), V).
std::pair<std::vector<Integer>, std::vector<std::vector<Integer>>> integer_diagonal_form(const RationalMatrix &g);

} // namespace voatheta
