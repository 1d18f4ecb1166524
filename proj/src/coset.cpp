#include "voatheta/coset.hpp"

#include "voatheta/errors.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace voatheta {

namespace {

bool is_integral_matrix(const RationalMatrix &m) {
  for (const auto &row : m)
    if (!is_integral(row))
      return false;
  return true;
}

} // namespace

void CosetFrame::validate() const {
  const std::size_t d = L.rank();
  if (K.rank() != d)
    throw IncompatibleSector("K and L must have equal rank");
  if (embedding.size() != d)
    throw ParseError("embedding must be a square matrix of the lattice rank");
  for (const auto &row : embedding)
    if (row.size() != d)
      throw ParseError("embedding must be a square matrix of the lattice rank");
  if (!K.is_even())
    throw NotEvenIntegral("K must be an even lattice");
  if (!is_integral_matrix(embedding))
    throw IncompatibleSector("K is not contained in L: embedding has non-integral entries");
  const RationalMatrix et = transpose(embedding);
  if (mat_mul(mat_mul(et, L.gram()), embedding) != K.gram())
    throw IncompatibleSector("embedding does not carry the Gram matrix of L onto that of K");
  const RationalMatrix pairing_with_k = mat_mul(et, L.gram());
  if (!is_integral_matrix(pairing_with_k))
    throw IncompatibleSector("L is not contained in the dual of K");
  for (const auto &lam : shifts) {
    if (lam.size() != d)
      throw ParseError("module shift has the wrong dimension");
    if (!is_integral(mat_vec(pairing_with_k, lam)))
      throw IncompatibleSector("L + " + to_string(lam) + " is not contained in the dual of K");
  }
}

ModuleSpec CosetFrame::module(std::size_t i) const {
  if (i >= shifts.size())
    throw ParseError("module index " + std::to_string(i) + " out of range");
  return ModuleSpec::untwisted(L, shifts[i]);
}

RationalVector CosetFrame::to_k(const RationalVector &x) const { return mat_vec(inverse(embedding), x); }

CosetFrame CosetFrame::trivial(const RationalLattice &k) {
  const std::size_t d = k.rank();
  RationalMatrix id(d, RationalVector(d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i)
    id[i][i] = 1;
  CosetFrame f{k, k, id, discriminant_data(k).representatives};
  f.validate();
  return f;
}

CosetFrame CosetFrame::dual(const RationalLattice &k) {
  // Dual basis e*_i has Gram G^{-1}, and e_i = sum_j G_ij e*_j.
  CosetFrame f{RationalLattice(k.inverse_gram()), k, k.gram(), {RationalVector(k.rank(), Rational(0))}};
  f.validate();
  return f;
}

QSeries x_trace(const ThetaTask &task) {
  const ThetaTask t = normalized(task);
  const std::size_t d = t.module.lattice.rank();
  const Rational c24 = Rational(static_cast<long>(d)) / 24;
  const QSeries eta_d = pow_int(dedekind_eta(t.order + c24), static_cast<long>(d));
  return truncate(eta_d * z_theta(t), t.order);
}

GrowthBudget x_trace_budget(const ThetaTask &task) {
  const ThetaTask t = normalized(task);
  const auto &l = t.module.lattice;
  switch (t.insertion.kind) {
  case Insertion::Kind::Vacuum:
    return theta_budget(l, std::nullopt);
  case Insertion::Kind::Cartan:
    return theta_budget(l, t.insertion.h);
  default: {
    GrowthBudget b = z_theta_budget(t);
    for (std::size_t i = 0; i < l.rank(); ++i)
      b = combine(b, eta_budget());
    return b;
  }
  }
}

std::vector<ThetaClass> theta_decompose(const CosetFrame &f, std::size_t i, const Rational &order) {
  f.validate();
  const ModuleSpec m = f.module(i);
  const std::size_t d = f.L.rank();
  const RationalVector zero(d, Rational(0));

  std::map<RationalVector, std::vector<std::pair<Rational, Cyclotomic>>> buckets;
  for (const auto &p : enumerate_by_norm(m.coset(), zero, order))
    buckets[reduce_mod_lattice(f.to_k(p.coords))].emplace_back(p.norm, Cyclotomic(1));

  std::vector<ThetaClass> out;
  for (const auto &mu : discriminant_data(f.K).representatives) {
    // Only classes lying in L + lambda belong to this module.
    if (!is_integral(sub(mat_vec(f.embedding, mu), m.shift)))
      continue;
    const auto it = buckets.find(mu);
    if (it == buckets.end())
      throw NonInvertibleThetaLeading("class " + to_string(mu) + " has no vectors below order " + to_string(order));
    ThetaClass c;
    c.mu = mu;
    c.class_sum = QSeries::from_terms(it->second, order);
    c.theta = theta_sum(LatticeCoset(f.K, mu), zero, zero, std::nullopt, order);
    if (c.theta.is_zero())
      throw NonInvertibleThetaLeading("theta of class " + to_string(mu) + " vanishes below the order");
    c.ch = c.class_sum * invert(c.theta, order - 2 * c.theta.offset());
    const QSeries back = c.theta * c.ch;
    const Rational common = std::min(*back.trunc(), *c.class_sum.trunc());
    if (truncate(back, common) != truncate(c.class_sum, common))
      throw Error("theta * ch does not reproduce the class sum of " + to_string(mu));
    out.push_back(std::move(c));
  }
  return out;
}

QSeries reassemble(const std::vector<ThetaClass> &classes) {
  QSeries acc;
  bool first = true;
  for (const auto &c : classes) {
    const QSeries term = c.theta * c.ch;
    acc = first ? term : acc + term;
    first = false;
  }
  return acc;
}

namespace {

std::size_t ambient_index(const std::vector<ModuleSpec> &modules, const RationalVector &shift) {
  const RationalVector s = reduce_mod_lattice(shift);
  for (std::size_t j = 0; j < modules.size(); ++j)
    if (modules[j].shift == s)
      return j;
  throw IncompatibleSector("shift " + to_string(shift) + " is not a discriminant class of L");
}

} // namespace

TransformReport verify_final_theorem(const CosetFrame &f, std::size_t i, char which, const CartanVector &u,
                                     const CartanVector &v, std::complex<double> tau, double tol,
                                     const Rational &order) {
  f.validate();
  if (which != 'S' && which != 'T')
    throw ParseError("law must be S or T");
  const auto &l = f.L;
  const std::size_t d = l.rank();
  const RationalVector uu = u.empty() ? RationalVector(d, Rational(0)) : u;
  const RationalVector vv = v.empty() ? RationalVector(d, Rational(0)) : v;
  const auto modules = discriminant_modules(l); // NotEvenIntegral unless V_L is a VOA
  const std::size_t row = ambient_index(modules, f.shifts.at(i));
  const STMatrices st = s_t_matrices(l, 100, tol);

  const SL2 rho = which == 'S' ? SL2::S() : SL2::T();
  const auto [u2, v2] = transform_characteristics(rho, uu, vv);
  const Eigen::MatrixXcd &M = which == 'S' ? st.S : st.T;
  const double dd = static_cast<double>(d);
  const std::complex<double> prefactor =
      which == 'S' ? std::pow(std::complex<double>(0, -1) * tau, dd / 2)
                   : std::polar(1.0, 3.14159265358979323846 * dd / 12);

  TransformReport r;
  r.law = which == 'S' ? "coset-S" : "coset-T";
  r.rho = rho;
  r.tau = tau;
  r.tolerance = tol;
  r.matrix_used = M;

  const ThetaTask ti{modules[row], Insertion::vacuum(), uu, vv, order};
  const Evaluation el = evaluate(x_trace(ti), rho.apply(tau), x_trace_budget(ti), tol);
  r.lhs = el.value;
  r.tail_budget = el.tail_bound;
  std::complex<double> sum = 0;
  double tail = 0;
  for (std::size_t j = 0; j < modules.size(); ++j) {
    const auto mij = M(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
    if (std::abs(mij) < 1e-14)
      continue;
    const ThetaTask tj{modules[j], Insertion::vacuum(), u2, v2, order};
    const Evaluation ej = evaluate(x_trace(tj), tau, x_trace_budget(tj), tol);
    sum += mij * ej.value;
    tail += std::abs(mij) * ej.tail_bound;
  }
  r.rhs = prefactor * sum;
  r.tail_budget += std::abs(prefactor) * tail;
  r.residual = std::abs(r.lhs - r.rhs);
  r.note = "module " + to_string(modules[row].shift) + ", (u,v) = (" + to_string(uu) + ", " + to_string(vv) + ")";
  return r;
}

bool final_t_law_exact(const CosetFrame &f, std::size_t i, const CartanVector &u, const CartanVector &v,
                       const Rational &order) {
  f.validate();
  if (!f.L.is_even())
    throw NotEvenIntegral("the T-law needs an even ambient lattice");
  const ModuleSpec m = f.module(i);
  const ThetaTask left{m, Insertion::vacuum(), u, v, order};
  const ThetaTask t = normalized(left);
  const ThetaTask right{m, Insertion::vacuum(), t.u, add(t.u, t.v), order};
  const Cyclotomic phase = Cyclotomic::unit(f.L.norm2(m.shift));
  return t_shift(x_trace(t)) == phase * x_trace(right);
}

VanishingReport vanishing_check(const CosetFrame &f, std::size_t i, const CartanVector &alpha,
                                const CartanVector &u, const CartanVector &v, const Rational &energy_cap) {
  f.validate();
  const ModuleSpec m = f.module(i);
  ThetaTask t = normalized(ThetaTask{m, Insertion::vacuum(), u, v, energy_cap});
  if (alpha.size() != f.L.rank())
    throw ParseError("charge has the wrong dimension");
  VanishingReport rep;
  if (is_zero(alpha)) {
    rep.trace = z_theta(t);
  } else {
    auto op = [&](const FockState &s) {
      FockState out(s.sector());
      for (const auto &[k, c] : s.terms())
        out.add(Ket{add(k.momentum, alpha), k.modes}, c);
      return out;
    };
    rep.trace =
        Cyclotomic::unit(f.L.pair(t.u, t.v) / 2) * brute_trace(t.module, t.u, add(t.module.v0, t.v), energy_cap, op);
  }
  rep.vanished = rep.trace.is_zero();
  return rep;
}

ClosureProbe s_closure_probe(const CosetFrame &f, const Rational &order,
                             const std::vector<std::complex<double>> &taus) {
  f.validate();
  std::vector<QSeries> ch;
  for (std::size_t i = 0; i < f.shifts.size(); ++i)
    for (auto &c : theta_decompose(f, i, order))
      ch.push_back(std::move(c.ch));

  // No growth bound is known for ch; this heuristic budget only sizes the report.
  const GrowthBudget heuristic{1e3, static_cast<double>(f.L.rank()), 1.0, 0.0};
  const double inf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(ch.size());
  const auto rows = static_cast<Eigen::Index>(taus.size());
  Eigen::MatrixXcd lhs(rows, n), basis(rows, n);
  ClosureProbe p;
  p.classes = ch.size();
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto tau = taus[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const Evaluation s = evaluate(ch[static_cast<std::size_t>(j)], -1.0 / tau, heuristic, inf);
      const Evaluation b = evaluate(ch[static_cast<std::size_t>(j)], tau, heuristic, inf);
      lhs(k, j) = s.value;
      basis(k, j) = b.value;
      p.tail = std::max({p.tail, s.tail_bound, b.tail_bound});
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  p.condition = smin > 1e-14 * sv(0) ? sv(0) / smin : inf;
  const Eigen::MatrixXcd at = basis.completeOrthogonalDecomposition().solve(lhs);
  p.matrix = at.transpose();
  p.residual = (basis * at - lhs).cwiseAbs().maxCoeff();
  return p;
}

} // namespace voatheta
