#include "voatheta/lattice.hpp"

#include "voatheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace voatheta {

namespace {

// Fincke-Pohst form of A = G/2: x^T A x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2.
RationalMatrix completed_squares(const RationalMatrix &gram) {
  const std::size_t d = gram.size();
  RationalMatrix q(d, RationalVector(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      q[i][j] = gram[i][j] / 2;
  for (std::size_t i = 0; i < d; ++i) {
    if (q[i][i] <= 0)
      throw NotPositiveDefinite("Gram matrix is not positive definite");
    for (std::size_t j = i + 1; j < d; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (std::size_t k = i + 1; k < d; ++k)
      for (std::size_t l = k; l < d; ++l)
        q[k][l] -= q[k][i] * q[i][l];
  }
  return q;
}

} // namespace

RationalLattice::RationalLattice(RationalMatrix gram) : gram_(std::move(gram)) {
  const std::size_t d = gram_.size();
  if (d == 0)
    throw NotPositiveDefinite("lattice rank must be positive");
  for (const auto &row : gram_)
    if (row.size() != d)
      throw NotPositiveDefinite("Gram matrix must be square");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (gram_[i][j] != gram_[j][i])
        throw NotPositiveDefinite("Gram matrix must be symmetric");
  completed_squares(gram_);
  inverse_ = inverse(gram_);
}

bool RationalLattice::is_integral() const {
  for (const auto &row : gram_)
    if (!voatheta::is_integral(row))
      return false;
  return true;
}

bool RationalLattice::is_even() const {
  if (!is_integral())
    return false;
  for (std::size_t i = 0; i < rank(); ++i)
    if (gram_[i][i].get_num() % 2 != 0)
      return false;
  return true;
}

RationalVector reduce_mod_lattice(const RationalVector &x) {
  RationalVector out;
  out.reserve(x.size());
  for (const auto &c : x)
    out.push_back(frac(c));
  return out;
}

LatticeCoset::LatticeCoset(RationalLattice l, RationalVector s) : lattice(std::move(l)), shift(std::move(s)) {
  if (shift.empty())
    shift.assign(lattice.rank(), Rational(0));
  if (shift.size() != lattice.rank())
    throw Error("coset shift has wrong dimension");
  shift = reduce_mod_lattice(shift);
}

std::vector<LatticePoint> enumerate_by_norm(const LatticeCoset &c, const CartanVector &u, const Rational &bound) {
  const std::size_t d = c.lattice.rank();
  if (u.size() != d)
    throw Error("Cartan vector has wrong dimension");
  std::vector<LatticePoint> out;
  if (bound <= 0)
    return out;
  const RationalMatrix q = completed_squares(c.lattice.gram());
  // y = alpha + u has coordinates in (shift + u) + Z.
  RationalVector base(d);
  for (std::size_t i = 0; i < d; ++i)
    base[i] = c.shift[i] + u[i];
  RationalVector y(d);
  std::function<void(std::size_t, const Rational &)> descend = [&](std::size_t level, const Rational &used) {
    const std::size_t i = level - 1;
    Rational center = 0;
    for (std::size_t j = i + 1; j < d; ++j)
      center -= q[i][j] * y[j];
    const Rational room = bound - used;
    // |y_i - center| <= sqrt(room / q_ii); widen the float estimate and filter exactly.
    const double radius = std::sqrt(std::max(0.0, Rational(room / q[i][i]).get_d())) + 1;
    const Integer lo = ceil(Rational(center - base[i]) - Rational(radius));
    const Integer hi = floor(Rational(center - base[i]) + Rational(radius));
    for (Integer n = lo; n <= hi; ++n) {
      y[i] = base[i] + Rational(n);
      const Rational t = y[i] - center;
      const Rational next = used + q[i][i] * t * t;
      if (next >= bound)
        continue;
      if (i == 0) {
        LatticePoint p;
        p.coords.resize(d);
        for (std::size_t j = 0; j < d; ++j)
          p.coords[j] = y[j] - u[j];
        p.norm = next;
        out.push_back(std::move(p));
      } else {
        descend(i, next);
      }
    }
  };
  descend(d, 0);
  std::sort(out.begin(), out.end(), [](const LatticePoint &a, const LatticePoint &b) { return a.coords < b.coords; });
  return out;
}

QSeries theta_sum(const LatticeCoset &c, const CartanVector &s, const CartanVector &w,
                  const std::optional<CartanVector> &linear, const Rational &order) {
  const auto &l = c.lattice;
  std::vector<std::pair<Rational, Cyclotomic>> terms;
  for (const auto &p : enumerate_by_norm(c, s, order)) {
    Rational weight = 1;
    if (linear)
      weight = l.pair(*linear, add(p.coords, s));
    if (weight == 0)
      continue;
    terms.emplace_back(p.norm, Cyclotomic::unit(l.pair(w, p.coords), weight));
  }
  return QSeries::from_terms(terms, order);
}

QSeries theta_with_characteristics(const LatticeCoset &c, const CartanVector &u, const CartanVector &v,
                                   const Rational &order) {
  const Cyclotomic phase = Cyclotomic::unit(c.lattice.pair(u, v) / 2);
  return phase * theta_sum(c, u, v, std::nullopt, order);
}

GrowthBudget theta_budget(const RationalLattice &l, const std::optional<CartanVector> &linear) {
  GrowthBudget b;
  for (std::size_t i = 0; i < l.rank(); ++i)
    b.C *= 2 * std::sqrt(2 * l.inverse_gram()[i][i].get_d()) + 1;
  b.p = l.rank() / 2.0;
  if (linear) {
    b.C *= std::sqrt(2 * l.pair(*linear, *linear).get_d());
    b.p += 0.5;
  }
  return b;
}

std::pair<std::vector<Integer>, std::vector<std::vector<Integer>>> integer_diagonal_form(const RationalMatrix &g) {
  const std::size_t d = g.size();
  std::vector<std::vector<Integer>> m(d, std::vector<Integer>(d)), v(d, std::vector<Integer>(d, Integer(0)));
  for (std::size_t i = 0; i < d; ++i) {
    v[i][i] = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (g[i][j].get_den() != 1)
        throw NotEvenIntegral("matrix is not integral");
      m[i][j] = g[i][j].get_num();
    }
  }
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < d; ++r) {
      std::swap(m[r][a], m[r][b]);
      std::swap(v[r][a], v[r][b]);
    }
  };
  for (std::size_t t = 0; t < d; ++t) {
    for (;;) {
      // Smallest nonzero entry of the remaining block goes to (t, t).
      std::size_t bi = d, bj = d;
      for (std::size_t i = t; i < d; ++i)
        for (std::size_t j = t; j < d; ++j)
          if (m[i][j] != 0 && (bi == d || abs(m[i][j]) < abs(m[bi][bj]))) {
            bi = i;
            bj = j;
          }
      if (bi == d)
        break;
      std::swap(m[t], m[bi]);
      swap_cols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < d; ++i) {
        Integer qt;
        mpz_fdiv_q(qt.get_mpz_t(), m[i][t].get_mpz_t(), m[t][t].get_mpz_t());
        for (std::size_t j = t; j < d; ++j)
          m[i][j] -= qt * m[t][j];
        clean = clean && m[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < d; ++j) {
        Integer qt;
        mpz_fdiv_q(qt.get_mpz_t(), m[t][j].get_mpz_t(), m[t][t].get_mpz_t());
        for (std::size_t r = 0; r < d; ++r) {
          m[r][j] -= qt * m[r][t];
          v[r][j] -= qt * v[r][t];
        }
        clean = clean && m[t][j] == 0;
      }
      if (clean)
        break;
    }
  }
  std::vector<Integer> diag(d);
  for (std::size_t i = 0; i < d; ++i)
    diag[i] = abs(m[i][i]);
  return {diag, v};
}

DiscriminantData discriminant_data(const RationalLattice &k) {
  if (!k.is_even())
    throw NotEvenIntegral("lattice K must be even integral");
  const std::size_t d = k.rank();
  auto [diag, v] = integer_diagonal_form(k.gram());
  // G x in Z^d  <=>  x in V D^{-1} Z^d.
  std::set<RationalVector> reps{RationalVector(d, Rational(0))};
  std::vector<RationalVector> generators;
  for (std::size_t j = 0; j < d; ++j) {
    RationalVector col(d);
    for (std::size_t r = 0; r < d; ++r)
      col[r] = Rational(v[r][j]) / Rational(diag[j]);
    generators.push_back(col);
  }
  for (std::size_t j = 0; j < d; ++j) {
    std::set<RationalVector> next;
    for (const auto &x : reps)
      for (Integer t = 0; t < diag[j]; ++t)
        next.insert(reduce_mod_lattice(add(x, scale(Rational(t), generators[j]))));
    reps = std::move(next);
  }
  return {k.inverse_gram(), std::vector<RationalVector>(reps.begin(), reps.end())};
}

} // namespace voatheta
