#include "oracles.hpp"

#include "voatheta/errors.hpp"
#include "voatheta/lattice.hpp"

#include <doctest.h>

#include <set>

using namespace voatheta;

namespace {

RationalMatrix a2() { return {{2, -1}, {-1, 2}}; }

} // namespace

TEST_SUITE("lattice") {

TEST_CASE("Gram validation") {
  CHECK_THROWS_AS(RationalLattice(RationalMatrix{{1, 2}, {2, 1}}), NotPositiveDefinite);
  CHECK_THROWS_AS(RationalLattice(RationalMatrix{{1, 0}, {1, 1}}), NotPositiveDefinite);
  CHECK_THROWS_AS(RationalLattice(RationalMatrix{{0}}), NotPositiveDefinite);
  CHECK_THROWS_AS(RationalLattice(RationalMatrix{{1, 0}}), NotPositiveDefinite);
  CHECK(RationalLattice(a2()).is_even());
  CHECK(!RationalLattice(RationalMatrix{{1}}).is_even());
  CHECK(RationalLattice(RationalMatrix{{1}}).is_integral());
  CHECK(!RationalLattice(RationalMatrix{{Rational(1, 2)}}).is_integral());
}

TEST_CASE("enumeration agrees with a box scan") {
  for (const RationalMatrix &g : {RationalMatrix{{2}}, a2(), RationalMatrix{{2, 0}, {0, 2}},
                                  RationalMatrix{{4, 2}, {2, 6}}}) {
    const RationalLattice l(g);
    const std::size_t d = l.rank();
    RationalVector shift(d, 0), u(d, 0);
    shift[0] = Rational(1, 3);
    u[d - 1] = Rational(1, 4);
    const LatticeCoset c(l, shift);
    const auto pts = enumerate_by_norm(c, u, 6);
    const auto box = oracle::box_theta(g, c.shift, u, RationalVector(d, 0), nullptr, 6, 8);
    std::map<Rational, Cyclotomic> counted;
    for (const auto &p : pts) {
      CHECK(p.norm == l.norm2(add(p.coords, u)));
      CHECK(p.norm < 6);
      counted[p.norm] += Cyclotomic(1);
    }
    CHECK(counted == box);
  }
}

TEST_CASE("theta_sum matches the box oracle with phases and linear insertions") {
  const RationalLattice l(a2());
  const LatticeCoset c(l, {Rational(1, 3), Rational(2, 3)});
  const RationalVector s{Rational(1, 4), 0}, w{Rational(1, 8), Rational(1, 2)}, h{1, 0};
  const Rational order = 12;
  const QSeries plain = theta_sum(c, s, w, std::nullopt, order);
  CHECK(oracle::terms_of(plain) == oracle::box_theta(l.gram(), c.shift, s, w, nullptr, order, 10));
  const QSeries lin = theta_sum(c, s, w, h, order);
  CHECK(oracle::terms_of(lin) == oracle::box_theta(l.gram(), c.shift, s, w, &h, order, 10));
  CHECK(*plain.trunc() == order);
}

TEST_CASE("Jacobi theta_3 as the rank-one theta") {
  // sum_n q^{n^2} for gram [[2]]; r_1(n) = 2 for squares
  const QSeries t = theta_sum(LatticeCoset(RationalLattice(RationalMatrix{{2}}), {0}), {0}, {0}, std::nullopt, 50);
  for (long n = 0; n < 50; ++n) {
    const long r = static_cast<long>(std::lround(std::sqrt(static_cast<double>(n))));
    const long expect = r * r == n ? (n == 0 ? 1 : 2) : 0;
    CHECK(t.coefficient(n) == Cyclotomic(expect));
  }
}

TEST_CASE("characteristics carry the e^{pi i <u,v>} prefactor") {
  const LatticeCoset c(RationalLattice(RationalMatrix{{2}}), {0});
  const RationalVector u{Rational(1, 4)}, v{Rational(1, 4)};
  const QSeries a = theta_with_characteristics(c, u, v, 10);
  const QSeries b = theta_sum(c, u, v, std::nullopt, 10);
  // <u,v> = 1/8 on gram [[2]]
  CHECK(a == Cyclotomic::unit(Rational(1, 16)) * b);
}

TEST_CASE("discriminant groups") {
  struct Case {
    RationalMatrix g;
    std::size_t order;
  };
  for (const Case &k : {Case{{{2}}, 2}, Case{{{2, 0}, {0, 2}}, 4}, Case{a2(), 3},
                        Case{{{2, 0}, {0, 10}}, 20}, Case{{{4, 2}, {2, 6}}, 20}}) {
    const RationalLattice l(k.g);
    const auto data = discriminant_data(l);
    CHECK(data.representatives.size() == k.order);
    CHECK(data.dual_gram == inverse(k.g));
    std::set<RationalVector> seen;
    for (const auto &r : data.representatives) {
      for (const auto &x : r) {
        CHECK(x >= 0);
        CHECK(x < 1);
      }
      // r lies in the dual: <r, e_i> integral
      CHECK(is_integral(mat_vec(k.g, r)));
      seen.insert(r);
    }
    CHECK(seen.size() == k.order);
    CHECK(determinant(k.g) == Rational(static_cast<long>(k.order)));
  }
  CHECK_THROWS_AS(discriminant_data(RationalLattice(RationalMatrix{{1}})), NotEvenIntegral);
  CHECK_THROWS_AS(discriminant_data(RationalLattice(RationalMatrix{{Rational(2, 3)}})), NotEvenIntegral);
}

TEST_CASE("integer diagonal form") {
  const auto [diag, v] = integer_diagonal_form({{4, 2}, {2, 6}});
  Integer prod = 1;
  for (const auto &x : diag)
    prod *= x;
  CHECK(abs(prod) == 20);
}

TEST_CASE("reduce_mod_lattice") {
  CHECK(reduce_mod_lattice({Rational(-1, 3), Rational(7, 2), 0}) ==
        RationalVector{Rational(2, 3), Rational(1, 2), 0});
}

} // TEST_SUITE
