#include "voatheta/conformal_block.hpp"

#include "voatheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace voatheta {

namespace {


RationalVector zeros(std::size_t d) { return RationalVector(d, Rational(0)); }

void fill_or_check(RationalVector &v, std::size_t d, const char *what) {
  if (v.empty())
    v = zeros(d);
  if (v.size() != d)
    throw ParseError(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                     std::to_string(d));
}

Rational eta_offset(std::size_t d) { return Rational(static_cast<long>(d)) / 24; }

} // namespace

ModuleSpec ModuleSpec::untwisted(const RationalLattice &l, const RationalVector &shift) {
  ModuleSpec m{l, shift.empty() ? zeros(l.rank()) : reduce_mod_lattice(shift), zeros(l.rank()), zeros(l.rank())};
  return m;
}

ThetaTask normalized(ThetaTask t) {
  const std::size_t d = t.module.lattice.rank();
  fill_or_check(t.module.shift, d, "shift");
  t.module.shift = reduce_mod_lattice(t.module.shift);
  fill_or_check(t.module.u0, d, "sector_u0");
  fill_or_check(t.module.v0, d, "stab_v0");
  fill_or_check(t.u, d, "u");
  fill_or_check(t.v, d, "v");
  if (t.insertion.kind == Insertion::Kind::Cartan || t.insertion.kind == Insertion::Kind::Charge)
    fill_or_check(t.insertion.h, d, "insertion");
  if (t.order <= 0)
    throw ParseError("order must be positive");
  return t;
}

QSeries z_theta(const ThetaTask &task) {
  const ThetaTask t = normalized(task);
  const auto &l = t.module.lattice;
  const std::size_t d = l.rank();
  if (t.insertion.kind == Insertion::Kind::Charge)
    throw UnsupportedInsertion("charged insertions have no closed-form theta function");

  const CartanVector s = add(t.module.u0, t.u);
  const CartanVector w = add(t.module.v0, t.v);
  std::optional<CartanVector> linear;
  if (t.insertion.kind == Insertion::Kind::Cartan)
    linear = t.insertion.h;

  // theta_sum pairs w with alpha only; the sector shift contributes <w, u0>.
  const Cyclotomic phase = Cyclotomic::unit(l.pair(t.u, t.v) / 2 + l.pair(w, t.module.u0));
  const QSeries theta = theta_sum(t.module.coset(), s, w, linear, t.order + eta_offset(d));
  const QSeries eta_inv = eta_power_inverse(static_cast<unsigned>(d), t.order);
  QSeries z = truncate(phase * (eta_inv * theta), t.order);
  if (t.insertion.kind == Insertion::Kind::Omega)
    z = q_derivative(z) + Cyclotomic(eta_offset(d)) * z;
  return z;
}

QSeries trace_function(const ModuleSpec &m, const Insertion &a, const Rational &order) {
  ThetaTask t{m, a, {}, {}, order};
  return z_theta(t);
}

GrowthBudget z_theta_budget(const ThetaTask &task) {
  const ThetaTask t = normalized(task);
  const auto &l = t.module.lattice;
  std::optional<CartanVector> linear;
  if (t.insertion.kind == Insertion::Kind::Cartan)
    linear = t.insertion.h;
  GrowthBudget b = combine(eta_inverse_budget(static_cast<unsigned>(l.rank())), theta_budget(l, linear));
  if (t.insertion.kind == Insertion::Kind::Omega) {
    // q d/dq + d/24 scales the window [k, k+1) by at most (1 + k + shift + d/24).
    b.C *= 1 + std::abs(b.shift) + static_cast<double>(l.rank()) / 24;
    b.p += 1;
  }
  return b;
}

std::vector<BasisKet> fock_basis(const ModuleSpec &m, const CartanVector &u, const Rational &energy_cap,
                                 std::size_t max_size) {
  const std::size_t d = m.lattice.rank();
  const auto points = enumerate_by_norm(m.coset(), add(m.u0, u), energy_cap);

  std::vector<BasisKet> out;
  for (const auto &p : points) {
    const Rational room = energy_cap - p.norm; // oscillator level must stay strictly below
    long max_n = static_cast<long>(to_int64(ceil(room))) - 1;
    if (max_n < 0)
      max_n = 0;
    std::vector<std::pair<int, Rational>> slots;
    for (long n = 1; n <= max_n; ++n)
      for (std::size_t i = 0; i < d; ++i)
        slots.emplace_back(static_cast<int>(i), Rational(n));
    std::sort(slots.begin(), slots.end());

    std::vector<std::pair<int, Rational>> current;
    auto rec = [&](auto &&self, std::size_t from, const Rational &level) -> void {
      if (out.size() >= max_size)
        throw BasisTooLarge("Fock basis exceeds " + std::to_string(max_size) + " kets");
      out.push_back({Ket{p.coords, current}, p.norm + level});
      for (std::size_t k = from; k < slots.size(); ++k) {
        const Rational next = level + slots[k].second;
        if (next >= room)
          continue;
        current.push_back(slots[k]);
        self(self, k, next);
        current.pop_back();
      }
    };
    rec(rec, 0, Rational(0));
  }
  return out;
}

QSeries brute_trace(const ModuleSpec &m, const CartanVector &u, const CartanVector &w, const Rational &energy_cap,
                    const std::function<FockState(const FockState &)> &op) {
  const auto &l = m.lattice;
  const Rational c24 = eta_offset(l.rank());
  std::vector<std::pair<Rational, Cyclotomic>> terms;
  for (const auto &bk : fock_basis(m, u, energy_cap)) {
    const FockState in = FockState::ket(m.sector(), bk.ket);
    const FockState image = op(in);
    const auto it = image.terms().find(bk.ket);
    if (it == image.terms().end() || it->second == 0)
      continue;
    const Rational angle = l.pair(w, add(bk.ket.momentum, m.u0));
    terms.emplace_back(bk.energy - c24, Cyclotomic::unit(angle, it->second));
  }
  return QSeries::from_terms(terms, energy_cap - c24);
}

QSeries z_theta_bruteforce(const ThetaTask &task, const Rational &energy_cap) {
  const ThetaTask t = normalized(task);
  const auto &l = t.module.lattice;
  const FockState a = catalog_state(l, t.insertion);
  const Rational wt = weight(a);
  const auto expansion = delta_apply(l, t.u, a); // z^{lambda - s} -> p_s a

  auto op = [&](const FockState &ket) {
    FockState acc(ket.sector());
    for (const auto &[e, ps] : expansion)
      acc += vertex_mode(l, ps, wt + e - 1, ket);
    // q^{u(0)} also acts through the trace weight; fock_basis already folds it into the energy.
    return acc;
  };
  const QSeries raw = brute_trace(t.module, t.u, add(t.module.v0, t.v), energy_cap, op);
  return Cyclotomic::unit(l.pair(t.u, t.v) / 2) * raw;
}

std::vector<ModuleSpec> discriminant_modules(const RationalLattice &l) {
  std::vector<ModuleSpec> out;
  for (const auto &mu : discriminant_data(l).representatives)
    out.push_back(ModuleSpec::untwisted(l, mu));
  return out;
}

std::vector<std::complex<double>> sample_taus(std::size_t count) {
  std::vector<std::complex<double>> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = count > 1 ? -0.35 + 0.7 * static_cast<double>(k) / static_cast<double>(count - 1) : 0.1;
    const double y = 0.9 + 0.5 * static_cast<double>((k * 7) % count) / static_cast<double>(count);
    out.emplace_back(x, y);
  }
  return out;
}

FitResult fit_matrix(const Eigen::MatrixXcd &lhs, const Eigen::MatrixXcd &basis, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  FitResult r;
  if (sv.size() == 0 || sv(0) == 0)
    throw IllConditionedFit("empty or zero sample matrix");
  r.condition = sv(0) / sv(sv.size() - 1);
  if (!(r.condition < 1e10))
    throw IllConditionedFit("sample matrix is singular (condition " + format_double(r.condition) +
                            "); the basis functions are linearly dependent");
  const Eigen::MatrixXcd at = svd.solve(lhs); // basis * A^T = lhs
  r.matrix = at.transpose();
  r.residual = (basis * at - lhs).cwiseAbs().maxCoeff();
  if (!(r.residual <= tol))
    throw IllConditionedFit("fit residual " + format_double(r.residual) + " exceeds tolerance");
  return r;
}

std::pair<CartanVector, CartanVector> transform_characteristics(const SL2 &rho, const CartanVector &u,
                                                                const CartanVector &v) {
  return {add(scale(Rational(rho.a), u), scale(Rational(rho.c), v)),
          add(scale(Rational(rho.b), u), scale(Rational(rho.d), v))};
}

Rational square_bracket_weight(const RationalLattice &l, const Insertion &a) {
  if (a.kind == Insertion::Kind::Vacuum)
    return 0;
  if (a.kind != Insertion::Kind::Cartan)
    throw UnsupportedInsertion("insertion '" + a.to_string() + "' is not an L[0] eigenvector in the catalog");
  // L[0] = (omega - c/24)_[1]; check the eigenvalue instead of assuming it.
  FockState om = conformal_vector(l) - Rational(static_cast<long>(l.rank())) / 24 * FockState::vacuum(l.rank());
  const FockState state = catalog_state(l, a);
  const FockState image = bracket_mode(l, om, 1, state);
  const Rational w = weight(state);
  if (image != w * state)
    throw UnsupportedInsertion("insertion is not an L[0] eigenvector");
  return w;
}

namespace {

struct SeriesWithBudget {
  QSeries series;
  GrowthBudget budget;
};

SeriesWithBudget theta_of(const ModuleSpec &m, const Insertion &a, const CartanVector &u, const CartanVector &v,
                          const Rational &order) {
  ThetaTask t{m, a, u, v, order};
  return {z_theta(t), z_theta_budget(t)};
}

// Tail tolerance for sample evaluations; generous because the fit residual
// check is what guards the result.
constexpr double kSampleTail = 1e-8;

} // namespace

double append_family(Eigen::MatrixXcd &lhs, Eigen::MatrixXcd &basis, const std::vector<ModuleSpec> &modules,
                     const Insertion &a, const CartanVector &u, const CartanVector &v, const SL2 &rho,
                     const Rational &order, const std::vector<std::complex<double>> &taus) {
  const std::size_t n = modules.size();
  const auto &l = modules.front().lattice;
  const double wt = square_bracket_weight(l, a).get_d();
  const auto [u2, v2] = transform_characteristics(rho, u, v);
  std::vector<SeriesWithBudget> left, right;
  for (const auto &m : modules) {
    left.push_back(theta_of(m, a, u, v, order));
    right.push_back(theta_of(m, a, u2, v2, order));
  }
  const Eigen::Index base = lhs.rows();
  lhs.conservativeResize(base + static_cast<Eigen::Index>(taus.size()), static_cast<Eigen::Index>(n));
  basis.conservativeResize(base + static_cast<Eigen::Index>(taus.size()), static_cast<Eigen::Index>(n));
  double tail = 0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const auto tau = taus[k];
    const auto factor = std::pow(rho.automorphy(tau), -wt);
    for (std::size_t i = 0; i < n; ++i) {
      const Evaluation el = evaluate(left[i].series, rho.apply(tau), left[i].budget, kSampleTail);
      const Evaluation er = evaluate(right[i].series, tau, right[i].budget, kSampleTail);
      lhs(base + static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = factor * el.value;
      basis(base + static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = er.value;
      tail = std::max({tail, std::abs(factor) * el.tail_bound, er.tail_bound});
    }
  }
  return tail;
}

namespace {

Eigen::MatrixXcd fit_family(const std::vector<ModuleSpec> &modules, const Insertion &a, const CartanVector &u,
                            const CartanVector &v, const SL2 &rho, const Rational &order, double tol,
                            double *residual = nullptr) {
  Eigen::MatrixXcd lhs, basis;
  append_family(lhs, basis, modules, a, u, v, rho, order, sample_taus(std::max<std::size_t>(8, 3 * modules.size())));
  const FitResult f = fit_matrix(lhs, basis, tol);
  if (residual)
    *residual = f.residual;
  return f.matrix;
}

// Plain vacuum characters of V_{L+mu} and V_{L-mu} coincide, so for lattices
// with mu != -mu classes the plain family alone is singular; a generic (u,v)
// family separates them and obeys the same matrix.
Eigen::MatrixXcd fit_plain(const std::vector<ModuleSpec> &modules, const SL2 &rho, const Rational &order, double tol,
                           double *residual = nullptr) {
  const std::size_t d = modules.front().lattice.rank();
  const RationalVector z = zeros(d);
  try {
    return fit_family(modules, Insertion::vacuum(), z, z, rho, order, tol, residual);
  } catch (const IllConditionedFit &) {
  }
  Eigen::MatrixXcd lhs, basis;
  const auto taus = sample_taus(std::max<std::size_t>(8, 3 * modules.size()));
  append_family(lhs, basis, modules, Insertion::vacuum(), z, z, rho, order, taus);
  RationalVector gu(d), gv(d);
  for (std::size_t i = 0; i < d; ++i) {
    // Distinct per direction but with small denominators: the series length
    // grows with the denominator of <u,u>.
    gu[i] = frac(Rational(static_cast<long>(i) + 1) / 8);
    gv[i] = Rational(static_cast<long>(i) + 1) / 16;
  }
  append_family(lhs, basis, modules, Insertion::vacuum(), gu, gv, rho, order, taus);
  const FitResult f = fit_matrix(lhs, basis, tol);
  if (residual)
    *residual = f.residual;
  return f.matrix;
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd &m, long k) {
  Eigen::MatrixXcd base = k < 0 ? Eigen::MatrixXcd(m.inverse()) : m;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  for (long i = 0; i < std::abs(k); ++i)
    out = out * base;
  return out;
}

} // namespace

std::vector<std::pair<char, long>> sl2_word(const SL2 &rho) {
  if (rho.a * rho.d - rho.b * rho.c != 1)
    throw ParseError("matrix is not in SL2(Z): " + rho.to_string());
  // rho = T^k S M' repeatedly, with S^{-1} M = (c d; -a -b), until c = 0.
  std::vector<std::pair<char, long>> word;
  SL2 m = rho;
  auto floor_div = [](long x, long y) {
    long q = x / y;
    if ((x % y != 0) && ((x < 0) != (y < 0)))
      --q;
    return q;
  };
  while (m.c != 0) {
    const long k = floor_div(m.a, m.c);
    if (k != 0)
      word.emplace_back('T', k);
    m = SL2{m.a - k * m.c, m.b - k * m.d, m.c, m.d};
    word.emplace_back('S', 1);
    m = SL2{m.c, m.d, -m.a, -m.b};
  }
  if (m.a == 1) {
    if (m.b != 0)
      word.emplace_back('T', m.b);
  } else { // -T^{-b}
    word.emplace_back('S', 2);
    if (m.b != 0)
      word.emplace_back('T', -m.b);
  }
  return word;
}

Eigen::MatrixXcd candidate_matrix(const STMatrices &st, const SL2 &rho) {
  const auto n = static_cast<Eigen::Index>(st.reps.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n, n);
  for (const auto &[letter, power] : sl2_word(rho))
    out = out * matrix_power(letter == 'S' ? st.S_candidate : st.T_candidate, power);
  return out;
}

STMatrices s_t_matrices(const RationalLattice &l, const Rational &order, double tol) {
  const auto data = discriminant_data(l);
  const auto modules = discriminant_modules(l);
  const auto n = static_cast<Eigen::Index>(modules.size());
  const Rational c24 = eta_offset(l.rank());

  STMatrices st;
  st.reps = data.representatives;
  st.T_candidate = Eigen::MatrixXcd::Zero(n, n);
  st.S_candidate = Eigen::MatrixXcd::Zero(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &mu = st.reps[static_cast<std::size_t>(i)];
    st.t_exact.push_back(Cyclotomic::unit(l.norm2(mu) - c24));
    st.T_candidate(i, i) = st.t_exact.back().to_complex();
    for (Eigen::Index j = 0; j < n; ++j)
      st.S_candidate(i, j) = norm * Cyclotomic::unit(-l.pair(mu, st.reps[static_cast<std::size_t>(j)])).to_complex();
  }

  double rs = 0, rt = 0;
  st.S = fit_plain(modules, SL2::S(), order, tol, &rs);
  st.T = fit_plain(modules, SL2::T(), order, tol, &rt);
  st.fit_residual = std::max(rs, rt);
  st.candidate_gap =
      std::max((st.S - st.S_candidate).cwiseAbs().maxCoeff(), (st.T - st.T_candidate).cwiseAbs().maxCoeff());
  if (!(st.candidate_gap <= tol))
    throw IllConditionedFit("fitted S/T disagree with the Gauss-sum candidates by " +
                            format_double(st.candidate_gap));
  return st;
}

Eigen::MatrixXcd fitted_matrix(const RationalLattice &l, const SL2 &rho, const Rational &order, double tol) {
  const auto modules = discriminant_modules(l);
  const Eigen::MatrixXcd fit = fit_plain(modules, rho, order, tol);
  const STMatrices st = s_t_matrices(l, order, tol);
  const Eigen::MatrixXcd cand = candidate_matrix(st, rho);
  const double gap = (fit - cand).cwiseAbs().maxCoeff();
  if (!(gap <= tol))
    throw IllConditionedFit("fitted A(" + rho.to_string() + ") disagrees with the S/T word candidate by " +
                            format_double(gap));
  return fit;
}

namespace {

std::size_t module_index(const std::vector<ModuleSpec> &modules, const ModuleSpec &m) {
  for (std::size_t i = 0; i < modules.size(); ++i)
    if (modules[i].shift == m.shift)
      return i;
  throw IncompatibleSector("module shift " + to_string(m.shift) + " is not a discriminant class of the lattice");
}

void require_untwisted(const ModuleSpec &m) {
  if (!is_zero(m.u0) || !is_zero(m.v0))
    throw IncompatibleSector("the transformation check runs on untwisted lattice modules; "
                             "express sector shifts through the characteristics (u, v)");
}

} // namespace

TransformReport main_theorem_residual(const ThetaTask &task, const SL2 &rho, std::complex<double> tau,
                                      const Eigen::MatrixXcd &A, const CartanVector &u2, const CartanVector &v2,
                                      double tol) {
  const ThetaTask t = normalized(task);
  require_untwisted(t.module);
  const auto &l = t.module.lattice;
  const auto modules = discriminant_modules(l);
  const std::size_t i = module_index(modules, t.module);
  const double wt = square_bracket_weight(l, t.insertion).get_d();

  TransformReport r;
  r.law = "main";
  r.rho = rho;
  r.tau = tau;
  r.tolerance = tol;
  r.matrix_used = A;

  const auto factor = std::pow(rho.automorphy(tau), -wt);
  const Evaluation el = evaluate(z_theta(t), rho.apply(tau), z_theta_budget(t), tol);
  r.lhs = factor * el.value;
  r.tail_budget = std::abs(factor) * el.tail_bound;
  r.rhs = 0;
  for (std::size_t j = 0; j < modules.size(); ++j) {
    const auto aij = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (std::abs(aij) == 0)
      continue;
    const ThetaTask tj{modules[j], t.insertion, u2, v2, t.order};
    const Evaluation ej = evaluate(z_theta(tj), tau, z_theta_budget(tj), tol);
    r.rhs += aij * ej.value;
    r.tail_budget += std::abs(aij) * ej.tail_bound;
  }
  r.residual = std::abs(r.lhs - r.rhs);
  r.note = "module " + to_string(t.module.shift) + ", insertion " + t.insertion.to_string() + ", (u,v) = (" +
           to_string(t.u) + ", " + to_string(t.v) + ") -> (" + to_string(u2) + ", " + to_string(v2) + ")";
  return r;
}

TransformReport verify_main_theorem(const ThetaTask &task, const SL2 &rho, std::complex<double> tau, double tol) {
  const ThetaTask t = normalized(task);
  require_untwisted(t.module);
  square_bracket_weight(t.module.lattice, t.insertion); // reject omega/charges before fitting
  const Eigen::MatrixXcd A = fitted_matrix(t.module.lattice, rho, t.order, tol);
  const auto [u2, v2] = transform_characteristics(rho, t.u, t.v);
  return main_theorem_residual(t, rho, tau, A, u2, v2, tol);
}

TransformReport verify_corollary(const RationalLattice &l, const CartanVector &u, const CartanVector &v,
                                 const SL2 &rho, double tol, const Rational &order) {
  const auto modules = discriminant_modules(l);
  double r1 = 0;
  const Eigen::MatrixXcd plain = fit_plain(modules, rho, order, tol, &r1);
  const RationalVector uu = u.empty() ? zeros(l.rank()) : u, vv = v.empty() ? zeros(l.rank()) : v;

  // One insertion alone can leave the (u,v) family degenerate (e.g. Z_1 = i Z_0 for the
  // vacuum at (1/4,-1/4) on [[2]]); the vacuum and Cartan insertions obey the same
  // matrix, so stack them.
  Eigen::MatrixXcd lhs, basis;
  const auto taus = sample_taus(std::max<std::size_t>(8, 3 * modules.size()));
  append_family(lhs, basis, modules, Insertion::vacuum(), uu, vv, rho, order, taus);
  for (std::size_t i = 0; i < l.rank(); ++i) {
    RationalVector h = zeros(l.rank());
    h[i] = 1;
    append_family(lhs, basis, modules, Insertion::cartan(h), uu, vv, rho, order, taus);
  }
  const FitResult family = fit_matrix(lhs, basis, tol);

  TransformReport r;
  r.law = "corollary";
  r.rho = rho;
  r.tau = {0, 1};
  r.tolerance = tol;
  r.matrix_used = family.matrix;
  Eigen::Index bi = 0, bj = 0;
  r.residual = (plain - family.matrix).cwiseAbs().maxCoeff(&bi, &bj);
  r.lhs = family.matrix(bi, bj);
  r.rhs = plain(bi, bj);
  r.note = "fit residuals " + format_double(r1) + " (plain), " + format_double(family.residual) + " (family " +
           to_string(uu) + ", " + to_string(vv) + ")";
  return r;
}

bool ZhuReport::equal() const {
  std::set<long> keys;
  for (const auto &[j, s] : lhs)
    keys.insert(j);
  for (const auto &[j, s] : rhs)
    keys.insert(j);
  for (long j : keys) {
    const auto a = lhs.find(j), b = rhs.find(j);
    const QSeries x = a == lhs.end() ? QSeries() : a->second;
    const QSeries y = b == rhs.end() ? QSeries() : b->second;
    if (!(x - y).is_zero())
      return false;
  }
  return true;
}

std::pair<QSeries, QSeries> ZhuReport::pole() const {
  auto get = [](const std::map<long, QSeries> &m) {
    const auto it = m.find(-2);
    return it == m.end() ? QSeries() : it->second;
  };
  return {get(lhs), get(rhs)};
}

namespace {

// Coefficients of 1/(4 sinh^2(Y/2)) = Y^{-2} / sum_j 2 Y^{2j}/(2j+2)!, keyed by power of Y.
std::map<long, Rational> inverse_sinh_squared(long max_power) {
  const long n = max_power + 2 + 1; // coefficients of 1/g up to Y^{max_power+2}
  std::vector<Rational> g(static_cast<std::size_t>(n), Rational(0)), inv(static_cast<std::size_t>(n), Rational(0));
  for (long j = 0; 2 * j < n; ++j)
    g[static_cast<std::size_t>(2 * j)] = Rational(2) / Rational(factorial(2 * j + 2));
  inv[0] = 1 / g[0];
  for (long k = 1; k < n; ++k) {
    Rational s = 0;
    for (long i = 1; i <= k; ++i)
      s += g[static_cast<std::size_t>(i)] * inv[static_cast<std::size_t>(k - i)];
    inv[static_cast<std::size_t>(k)] = -s / g[0];
  }
  std::map<long, Rational> out;
  for (long k = 0; k < n; ++k)
    if (inv[static_cast<std::size_t>(k)] != 0)
      out[k - 2] = inv[static_cast<std::size_t>(k)];
  return out;
}

// Split a vacuum-module state into L(0)-homogeneous parts.
std::map<Rational, FockState> homogeneous_parts(const FockState &s) {
  std::map<Rational, FockState> out;
  for (const auto &[k, c] : s.terms()) {
    Rational w = 0;
    for (const auto &m : k.modes)
      w += m.second;
    out.try_emplace(w, s.sector()).first->second.add(k, c);
  }
  return out;
}

void accumulate(std::map<long, QSeries> &m, long j, const QSeries &s) {
  auto it = m.find(j);
  if (it == m.end())
    m.emplace(j, s);
  else
    it->second = it->second + s;
}

} // namespace

ZhuReport zhu_recurrence_check(const ModuleSpec &mod, const CartanVector &b, const CartanVector &a1, long y_order,
                               long q_order) {
  ThetaTask probe{mod, Insertion::cartan(b), {}, {}, 1};
  const ModuleSpec m = normalized(probe).module;
  const auto &l = m.lattice;
  const std::size_t d = l.rank();
  if (b.size() != d || a1.size() != d)
    throw ParseError("Cartan insertions must have the lattice rank");
  if (y_order < 0 || q_order < 0)
    throw ParseError("orders must be nonnegative");
  const Rational cap(q_order + 1);
  const RationalVector z = zeros(d);

  auto trace = [&](const std::function<FockState(const FockState &)> &op) { return brute_trace(m, z, m.v0, cap, op); };
  auto mode = [&](const CartanVector &h, long n) {
    return [&l, h, n](const FockState &s) { return apply_mode(l, h, Rational(n), s); };
  };

  ZhuReport rep;
  const QSeries Z = trace([](const FockState &s) { return s; });
  const Rational ba = l.pair(b, a1);

  // Left side: sum_n tr b(n) a(-n) e^{-nY}; for n > 0 commute to a(-n) b(n) + n<b,a>,
  // whose n-sum resums to <b,a> Z / (4 sinh^2(Y/2)).
  accumulate(rep.lhs, 0, trace([&](const FockState &s) { return mode(b, 0)(mode(a1, 0)(s)); }));
  const long kmax = q_order + 1;
  for (long k = 1; k <= kmax; ++k) {
    const QSeries rab = trace([&](const FockState &s) { return mode(a1, -k)(mode(b, k)(s)); });
    const QSeries rba = trace([&](const FockState &s) { return mode(b, -k)(mode(a1, k)(s)); });
    Rational pk = 1, mk = 1, fact = 1; // k^j, (-k)^j, j!
    for (long j = 0; j <= y_order; ++j) {
      if (j > 0) {
        pk *= k;
        mk *= -k;
        fact *= j;
      }
      accumulate(rep.lhs, j, Cyclotomic(mk / fact) * rab + Cyclotomic(pk / fact) * rba);
    }
  }
  if (ba != 0)
    for (const auto &[j, c] : inverse_sinh_squared(y_order))
      if (j <= y_order)
        accumulate(rep.lhs, j, Cyclotomic(ba * c) * Z);

  // Right side.
  const FockState bs = catalog_state(l, Insertion::cartan(b));
  const FockState as = catalog_state(l, Insertion::cartan(a1));
  auto one_point = [&](const FockState &c) {
    QSeries acc = QSeries::zero(cap - eta_offset(d));
    for (const auto &[w, part] : homogeneous_parts(c))
      acc = acc + trace([&, w = w, part = part](const FockState &s) { return vertex_mode(l, part, w - 1, s); });
    return acc;
  };
  const Rational top = weight(bs) + weight(as); // b_[n] a = 0 for n >= wt b + wt a

  accumulate(rep.rhs, 0, one_point(bracket_mode(l, bs, -1, as)));
  for (long k = 2; 2 * k - 1 < top; ++k) {
    const FockState c = bracket_mode(l, bs, 2 * k - 1, as);
    if (!c.is_zero())
      accumulate(rep.rhs, 0, -(eisenstein_E(2 * k, cap) * one_point(c)));
  }
  for (long mm = 0; mm < top; ++mm) {
    const FockState c = bracket_mode(l, bs, mm, as);
    if (c.is_zero())
      continue;
    const QSeries s = one_point(c);
    // (2 pi i)^{-(m+1)} wp_{m+1}(x - z): with x - z = Y / (2 pi i), a term
    // (2 pi i)^t G z^p contributes G Y^p (2 pi i)^{t - p - m - 1}.
    for (const auto &term : weierstrass_p(mm + 1, y_order, cap).terms) {
      const long token = term.token - term.z_power - (mm + 1);
      if (token != 0)
        throw TokenMismatch("residual (2 pi i)^" + std::to_string(token) + " at Y^" + std::to_string(term.z_power));
      accumulate(rep.rhs, term.z_power, term.series * s);
    }
    // The wp_{m+1}(z - z) companion only appears for a second insertion point; with one
    // insertion the zero-mode part is the E_{2k} sum above.
  }
  return rep;
}

} // namespace voatheta
