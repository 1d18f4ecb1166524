#include "oracles.hpp"

#include "voatheta/conformal_block.hpp"
#include "voatheta/errors.hpp"

#include <doctest.h>

using namespace voatheta;

namespace {

using Terms = std::map<Rational, Cyclotomic>;

// Independent closed-form reference: box-scanned lattice sum times partition
// counts, with the characteristic phases applied by hand.
Terms reference(const ThetaTask &t0) {
  const ThetaTask t = normalized(t0);
  const ModuleSpec &m = t.module;
  const RationalMatrix &g = m.lattice.gram();
  const std::size_t d = m.lattice.rank();
  const Rational c24 = Rational(static_cast<long>(d)) / 24;
  const RationalVector s = add(m.u0, t.u), w = add(m.v0, t.v);
  const Cyclotomic phase = Cyclotomic::unit(pairing(g, t.u, t.v) / 2 + pairing(g, w, m.u0));
  const RationalVector *h = t.insertion.kind == Insertion::Kind::Cartan ? &t.insertion.h : nullptr;
  Terms base = oracle::box_theta(g, m.coset().shift, s, w, h, t.order + c24, 12);
  Terms out;
  for (const auto &[e, c] : oracle::shifted(oracle::times_partitions(base, static_cast<unsigned>(d), t.order + c24), -c24)) {
    Cyclotomic v = phase * c;
    if (t.insertion.kind == Insertion::Kind::Omega)
      v *= e + c24;
    if (!v.is_zero())
      out[e] = v;
  }
  return out;
}

ThetaTask task(const RationalLattice &l, RationalVector shift, Insertion a, RationalVector u, RationalVector v,
               const Rational &order) {
  ThetaTask t{ModuleSpec::untwisted(l, shift), std::move(a), std::move(u), std::move(v), order};
  return normalized(t);
}

} // namespace

TEST_SUITE("conformal_block") {

TEST_CASE("closed form agrees with the lattice-sum oracle on the grid") {
  const RationalLattice l(RationalMatrix{{2}});
  const std::vector<std::pair<Rational, Rational>> grid{
      {0, 0}, {Rational(1, 4), 0}, {0, Rational(1, 4)}, {Rational(1, 4), Rational(1, 4)}};
  for (const Rational &lambda : {Rational(0), Rational(1, 2)})
    for (const Insertion &a : {Insertion::vacuum(), Insertion::cartan({1}), Insertion::omega()})
      for (const auto &[u, v] : grid) {
        const ThetaTask t = task(l, {lambda}, a, {u}, {v}, 20);
        const QSeries z = z_theta(t);
        CHECK(oracle::terms_of(z) == reference(t));
        CHECK(*z.trunc() == 20);
      }
}

TEST_CASE("closed form with transported sectors and stabilizers on A2") {
  const RationalLattice l(RationalMatrix{{2, -1}, {-1, 2}});
  ThetaTask t = task(l, {Rational(1, 3), Rational(2, 3)}, Insertion::cartan({1, 0}), {Rational(1, 4), 0},
                     {0, Rational(1, 8)}, 8);
  t.module.u0 = {Rational(1, 8), Rational(1, 8)};
  t.module.v0 = {Rational(1, 2), 0};
  CHECK(oracle::terms_of(z_theta(t)) == reference(t));
}

TEST_CASE("brute-force trace equals the closed form below the cap") {
  const RationalLattice l(RationalMatrix{{2}});
  for (const Insertion &a : {Insertion::vacuum(), Insertion::cartan({1}), Insertion::omega()})
    for (const Rational &lambda : {Rational(0), Rational(1, 2)}) {
      const ThetaTask t = task(l, {lambda}, a, {Rational(1, 4)}, {Rational(1, 4)}, 100);
      const QSeries brute = z_theta_bruteforce(t, 4);
      const Rational trunc = Rational(4) - Rational(1, 24);
      CHECK(*brute.trunc() == trunc);
      CHECK(brute == z_theta(task(l, {lambda}, a, {Rational(1, 4)}, {Rational(1, 4)}, trunc)));
    }
  const RationalLattice l2(RationalMatrix{{2, 0}, {0, 2}});
  ThetaTask t = task(l2, {Rational(1, 2), 0}, Insertion::cartan({1, 1}), {0, Rational(1, 4)}, {Rational(1, 4), 0}, 100);
  t.module.u0 = {Rational(1, 8), 0};
  const QSeries brute = z_theta_bruteforce(t, 3);
  ThetaTask closed = t;
  closed.order = *brute.trunc();
  CHECK(brute == z_theta(closed));
}

TEST_CASE("a cap of 1/2 leaves only the vacuum term") {
  const RationalLattice l(RationalMatrix{{2}});
  const QSeries z = z_theta_bruteforce(task(l, {0}, Insertion::vacuum(), {0}, {0}, 100), Rational(1, 2));
  CHECK(z == QSeries::monomial(1, Rational(-1, 24), Rational(1, 2) - Rational(1, 24)));
}

TEST_CASE("Cartan trace on an untwisted module vanishes by alpha -> -alpha symmetry") {
  for (const RationalMatrix &g : {RationalMatrix{{2}}, RationalMatrix{{2, -1}, {-1, 2}}}) {
    const RationalLattice l(g);
    RationalVector h(l.rank(), 0);
    h[0] = 1;
    CHECK(trace_function(ModuleSpec::untwisted(l), Insertion::cartan(h), 30).is_zero());
    // symmetric cosets too: 2 mu in L, or the order-3 rotation of A2
    RationalVector shift(l.rank(), Rational(1, 2));
    if (l.rank() == 2)
      shift = {Rational(1, 3), Rational(2, 3)};
    CHECK(trace_function(ModuleSpec::untwisted(l, shift), Insertion::cartan(h), 30).is_zero());
    // a transported sector breaks the symmetry
    ModuleSpec m = ModuleSpec::untwisted(l);
    m.u0 = RationalVector(l.rank(), Rational(1, 4));
    CHECK(!trace_function(m, Insertion::cartan(h), 30).is_zero());
  }
}

TEST_CASE("omega trace is the weighted vacuum trace") {
  const RationalLattice l(RationalMatrix{{2}});
  const ModuleSpec m = ModuleSpec::untwisted(l);
  const QSeries vac = trace_function(m, Insertion::vacuum(), 30);
  const QSeries om = trace_function(m, Insertion::omega(), 30);
  CHECK(om == q_derivative(vac) + Cyclotomic(Rational(1, 24)) * vac);
}

TEST_CASE("moving u into the sector") {
  // Z(u0; (u, v)) = e^{-pi i <u,v>} Z(u0 + u; (0, v)), checked on literal traces
  const RationalLattice l(RationalMatrix{{2}});
  const RationalVector u{Rational(1, 4)}, v{Rational(1, 4)};
  const ThetaTask a = task(l, {0}, Insertion::cartan({1}), u, v, 100);
  ThetaTask b = task(l, {0}, Insertion::cartan({1}), {0}, v, 100);
  b.module.u0 = u;
  const Cyclotomic phase = Cyclotomic::unit(-l.pair(u, v) / 2);
  CHECK(z_theta_bruteforce(a, 4) == phase * z_theta_bruteforce(b, 4));
}

TEST_CASE("basis size guard") {
  const RationalLattice l(RationalMatrix{{2, 0}, {0, 2}});
  CHECK_THROWS_AS(fock_basis(ModuleSpec::untwisted(l), {0, 0}, 8, 50), BasisTooLarge);
  CHECK(fock_basis(ModuleSpec::untwisted(l), {0, 0}, Rational(3, 2), 50).size() == 7); // vacuum, +-e1, +-e2, e1(-1), e2(-1)
}

TEST_CASE("S and T on the discriminant modules") {
  for (const RationalMatrix &g : {RationalMatrix{{2}}, RationalMatrix{{2, -1}, {-1, 2}}, RationalMatrix{{2, 0}, {0, 2}}}) {
    const RationalLattice l(g);
    const STMatrices st = s_t_matrices(l);
    const auto n = static_cast<Eigen::Index>(st.reps.size());
    CHECK(st.candidate_gap < 1e-8);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    CHECK((st.S * st.S.adjoint() - I).norm() < 1e-8);
    CHECK((st.S - st.S.transpose()).norm() < 1e-8);
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(std::abs(st.T(i, i) - st.t_exact[static_cast<std::size_t>(i)].to_complex()) < 1e-8);
    const Eigen::MatrixXcd ST = st.S * st.T;
    CHECK((ST * ST * ST - st.S * st.S).norm() < 1e-8);
  }
  CHECK_THROWS_AS(s_t_matrices(RationalLattice(RationalMatrix{{1}})), NotEvenIntegral);
}

TEST_CASE("sl2 words reproduce the matrix") {
  for (const SL2 &rho : {SL2::S(), SL2::T(), SL2::S() * SL2::T(), SL2{2, 1, 1, 1}, SL2{1, 0, 3, 1}, SL2{-1, 0, 0, -1}}) {
    SL2 r;
    for (const auto &[c, p] : sl2_word(rho)) {
      const SL2 g = c == 'S' ? SL2::S() : SL2::T();
      if (p >= 0) {
        for (long k = 0; k < p; ++k)
          r = r * g;
      } else {
        const SL2 inv{g.d, -g.b, -g.c, g.a};
        for (long k = 0; k < -p; ++k)
          r = r * inv;
      }
    }
    CHECK(r == rho);
  }
}

TEST_CASE("main theorem converges as the truncation grows") {
  const RationalLattice l(RationalMatrix{{2}});
  const std::complex<double> tau(0.1, 1.0);
  double previous = 1e300;
  for (long order : {50, 100, 200}) {
    const ThetaTask t = task(l, {Rational(1, 2)}, Insertion::cartan({1}), {Rational(1, 4)}, {Rational(1, 4)}, order);
    const TransformReport r = verify_main_theorem(t, SL2::S(), tau, 1e-6);
    CHECK(r.pass());
    CHECK(r.tail_budget <= previous);
    previous = r.tail_budget;
  }
  const ThetaTask t = task(l, {0}, Insertion::vacuum(), {Rational(1, 4)}, {0}, 100);
  CHECK(verify_main_theorem(t, SL2::identity(), tau, 1e-6).residual < 1e-14);
  ThetaTask om = t;
  om.insertion = Insertion::omega();
  CHECK_THROWS_AS(verify_main_theorem(om, SL2::S(), tau, 1e-6), UnsupportedInsertion);
}

TEST_CASE("square-bracket weights") {
  const RationalLattice l(RationalMatrix{{2}});
  CHECK(square_bracket_weight(l, Insertion::vacuum()) == 0);
  CHECK(square_bracket_weight(l, Insertion::cartan({1})) == 1);
  CHECK_THROWS_AS(square_bracket_weight(l, Insertion::omega()), UnsupportedInsertion);
}

TEST_CASE("characteristics transform as a row vector") {
  const auto [u2, v2] = transform_characteristics(SL2{2, 1, 1, 1}, {Rational(1, 4)}, {Rational(1, 8)});
  CHECK(u2 == RationalVector{Rational(2, 4) + Rational(1, 8)});
  CHECK(v2 == RationalVector{Rational(1, 4) + Rational(1, 8)});
}

TEST_CASE("corollary: the (u,v) family transforms with the plain-character matrix") {
  const RationalLattice l(RationalMatrix{{2}});
  for (const SL2 &rho : {SL2::S(), SL2::T(), SL2::S() * SL2::T()})
    CHECK(verify_corollary(l, {Rational(1, 4)}, {Rational(-1, 4)}, rho, 1e-6).pass());
}

TEST_CASE("ill-conditioned fits are rejected") {
  Eigen::MatrixXcd basis(4, 2), lhs(4, 1);
  basis << 1, 1, 2, 2, 3, 3, 4, 4;
  lhs << 1, 2, 3, 4;
  CHECK_THROWS_AS(fit_matrix(lhs, basis, 1e-6), IllConditionedFit);
  Eigen::MatrixXcd b2(3, 1), l2(3, 1);
  b2 << 1, 2, 3;
  l2 << 1, 1, 1;
  CHECK_THROWS_AS(fit_matrix(l2, b2, 1e-6), IllConditionedFit);
}

TEST_CASE("two-point recurrence") {
  const RationalLattice l(RationalMatrix{{2}});
  const ZhuReport r = zhu_recurrence_check(ModuleSpec::untwisted(l), {1}, {1});
  CHECK(r.equal());
  CHECK(r.pole().first == r.pole().second);
  CHECK(!r.pole().first.is_zero());
  ModuleSpec m = ModuleSpec::untwisted(RationalLattice(RationalMatrix{{2, 0}, {0, 2}}));
  m.u0 = {Rational(1, 4), Rational(1, 8)};
  CHECK(zhu_recurrence_check(m, {1, 0}, {0, 1}).equal());
  CHECK(zhu_recurrence_check(m, {1, 1}, {1, -1}, 3, 3).equal());
}

} // TEST_SUITE
