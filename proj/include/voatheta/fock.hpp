#pragma once

#include "voatheta/lattice.hpp"
#include "voatheta/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace voatheta {

/// Where a Fock state lives. `u0` shifts zero-mode eigenvalues (a Delta-transported
/// module); `twist[i]` in {0, 1/2} makes the modes of basis direction i run over
/// twist[i] + Z (a -1-twisted direction, which has no zero mode).
struct Sector {
  CartanVector u0;
  RationalVector twist;

  static Sector untwisted(std::size_t rank);
  static Sector shifted(const CartanVector &u0);
  /// Twists read off from <shift, e_i> mod 1; each must be 0 or 1/2.
  static Sector twisted(const RationalLattice &l, const CartanVector &shift);

  bool operator==(const Sector &o) const { return u0 == o.u0 && twist == o.twist; }
};

/// |alpha; e_{i1}(-n1) ... e_{ik}(-nk)> with (i, n) pairs sorted, n > 0.
struct Ket {
  RationalVector momentum;
  std::vector<std::pair<int, Rational>> modes;

  bool operator<(const Ket &o) const {
    return momentum != o.momentum ? momentum < o.momentum : modes < o.modes;
  }
  bool operator==(const Ket &o) const { return momentum == o.momentum && modes == o.modes; }
};

class FockState {
public:
  FockState() = default;
  explicit FockState(Sector sector) : sector_(std::move(sector)) {}
  static FockState ket(Sector sector, Ket k, const Rational &c = 1);
  /// Vacuum |0> of the untwisted rank-d sector.
  static FockState vacuum(std::size_t rank);

  const Sector &sector() const { return sector_; }
  const std::map<Ket, Rational> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Ket &k, const Rational &c);
  FockState &operator+=(const FockState &o);
  FockState &operator-=(const FockState &o);
  FockState &operator*=(const Rational &c);
  friend FockState operator+(FockState a, const FockState &b) { return a += b; }
  friend FockState operator-(FockState a, const FockState &b) { return a -= b; }
  friend FockState operator*(const Rational &c, FockState a) { return a *= c; }
  friend bool operator==(const FockState &a, const FockState &b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const FockState &a, const FockState &b) { return !(a == b); }

  /// Canonical text form such as "2*e1(-1)^2 |(0)>".
  std::string to_string() const;

private:
  Sector sector_;
  std::map<Ket, Rational> terms_;
};

/// Energy of a ket: sum of oscillator levels plus <alpha+u0, alpha+u0>/2.
Rational energy(const RationalLattice &l, const Sector &s, const Ket &k);
/// Largest oscillator level sum over the kets of a state.
Rational max_level(const FockState &s);

/// Common mode twist of the basis directions in the support of h.
Rational mode_twist(const Sector &s, const CartanVector &h);

/// h(n) on s, with [h(m), k(n)] = m <h,k> delta_{m+n,0} and h(0) = <h, alpha+u0>.
FockState apply_mode(const RationalLattice &l, const CartanVector &h, const Rational &n, const FockState &s);

/// p_s(u(1), u(2), ...) a, where exp(-sum_n x_n/n (-z)^{-n}) = sum_s p_s z^{-s}.
FockState schur_apply(const RationalLattice &l, long s_index, const CartanVector &u, const FockState &a);

/// Delta(u,z) a = sum_s z^{lambda - s} p_s a, keyed by the exponent of z.
/// Components of different u(0)-eigenvalue lambda are handled separately.
std::map<Rational, FockState> delta_apply(const RationalLattice &l, const CartanVector &u, const FockState &a);

/// Apply Delta(u, z) termwise to a z-expansion, multiplying powers of z.
std::map<Rational, FockState> delta_apply(const RationalLattice &l, const CartanVector &u,
                                          const std::map<Rational, FockState> &expansion);

/// Insertions supported by the trace machinery.
struct Insertion {
  enum class Kind { Vacuum, Cartan, Omega, Charge };
  Kind kind = Kind::Vacuum;
  CartanVector h; // Cartan direction, or lattice charge for Kind::Charge

  static Insertion vacuum() { return {}; }
  static Insertion cartan(CartanVector h) { return {Kind::Cartan, std::move(h)}; }
  static Insertion omega() { return {Kind::Omega, {}}; }
  static Insertion charge(CartanVector alpha) { return {Kind::Charge, std::move(alpha)}; }
  /// "vacuum", "omega", "h:<c1,c2,...>" or "charge:<...>".
  static Insertion parse(const std::string &text, std::size_t rank);
  std::string to_string() const;
};

/// The insertion as a state of the vacuum module; UnsupportedInsertion for charges.
FockState catalog_state(const RationalLattice &l, const Insertion &a);
/// omega = 1/2 sum_ij (G^{-1})_ij e_i(-1) e_j(-1) |0>.
FockState conformal_vector(const RationalLattice &l);
/// L(0)-weight of a homogeneous vacuum-module state.
Rational weight(const FockState &a);

/// a_(m) b for a in the vacuum module (momentum 0, untwisted), via normal-ordered
/// products of derivative fields.
FockState vertex_mode(const RationalLattice &l, const FockState &a, const Rational &m, const FockState &b);
/// a_[m] b = Res_w log(1+w)^m (1+w)^{wt a - 1} Y(a, w) b.
FockState bracket_mode(const RationalLattice &l, const FockState &a, long m, const FockState &b);

struct IterateReport {
  FockState lhs, rhs;
  bool equal() const { return lhs == rhs; }
};

/// Both sides of the twisted iterate formula for (a_(m) b) at total mode n + r + s
/// on the state w, where r, s are the mode twists of a and b in w's sector.
/// The left side comes from the free-field contraction, independently of the
/// formula. N truncates the i-sum; N < 0 sums every term that can act on w.
/// (In a half-twisted sector binom(-1/2, i) never vanishes and the sum only
/// stabilizes once N >= 1 - m, so the locality order 2 is not enough for m <= -2.)
IterateReport iterate_check(const RationalLattice &l, const CartanVector &a, const CartanVector &b, long m,
                            const Rational &n, const FockState &w, long N = -1);

} // namespace voatheta
