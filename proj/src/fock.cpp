#include "voatheta/fock.hpp"

#include "voatheta/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace voatheta {

namespace {

RationalVector unit_vector(std::size_t d, std::size_t i) {
  RationalVector e(d, Rational(0));
  e[i] = 1;
  return e;
}

// Truncated rational power series helpers (index = power of w).
using Series = std::vector<Rational>;

Series series_mul(const Series &a, const Series &b, std::size_t len) {
  Series out(len, Rational(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

Series series_inverse(const Series &a, std::size_t len) {
  Series out(len, Rational(0));
  out[0] = 1 / a[0];
  for (std::size_t k = 1; k < len; ++k) {
    Rational s = 0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j)
      s += a[j] * out[k - j];
    out[k] = -s / a[0];
  }
  return out;
}

Series series_pow(const Series &a, long k, std::size_t len) {
  Series base = k < 0 ? series_inverse(a, len) : a;
  Series out(len, Rational(0));
  out[0] = 1;
  for (long i = 0; i < std::labs(k); ++i)
    out = series_mul(out, base, len);
  return out;
}

// (1+w)^x as a series.
Series binomial_series(const Rational &x, std::size_t len) {
  Series out(len);
  for (std::size_t j = 0; j < len; ++j)
    out[j] = binomial(x, static_cast<long>(j));
  return out;
}

void check_dims(const RationalLattice &l, const CartanVector &h) {
  if (h.size() != l.rank())
    throw Error("Cartan vector has dimension " + std::to_string(h.size()) + ", lattice rank is " +
                std::to_string(l.rank()));
}

} // namespace

Sector Sector::untwisted(std::size_t rank) {
  return {RationalVector(rank, Rational(0)), RationalVector(rank, Rational(0))};
}

Sector Sector::shifted(const CartanVector &u0) { return {u0, RationalVector(u0.size(), Rational(0))}; }

Sector Sector::twisted(const RationalLattice &l, const CartanVector &shift) {
  check_dims(l, shift);
  Sector s{shift, RationalVector(l.rank())};
  for (std::size_t i = 0; i < l.rank(); ++i) {
    s.twist[i] = frac(l.pair(shift, unit_vector(l.rank(), i)));
    if (s.twist[i] != 0 && s.twist[i] != Rational(1, 2))
      throw IncompatibleSector("a real Heisenberg direction only admits twists 0 and 1/2, got " +
                               s.twist[i].get_str());
  }
  for (std::size_t i = 0; i < l.rank(); ++i)
    for (std::size_t j = 0; j < l.rank(); ++j)
      if (s.twist[i] != s.twist[j] && l.gram()[i][j] != 0)
        throw IncompatibleSector("directions with different twists must be orthogonal");
  return s;
}

FockState FockState::ket(Sector sector, Ket k, const Rational &c) {
  FockState s(std::move(sector));
  s.add(k, c);
  return s;
}

FockState FockState::vacuum(std::size_t rank) {
  return ket(Sector::untwisted(rank), Ket{RationalVector(rank, Rational(0)), {}});
}

void FockState::add(const Ket &k, const Rational &c) {
  if (c == 0)
    return;
  auto [it, inserted] = terms_.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0)
      terms_.erase(it);
  }
}

FockState &FockState::operator+=(const FockState &o) {
  if (terms_.empty() && sector_.u0.empty())
    sector_ = o.sector_;
  for (const auto &[k, c] : o.terms_)
    add(k, c);
  return *this;
}

FockState &FockState::operator-=(const FockState &o) {
  if (terms_.empty() && sector_.u0.empty())
    sector_ = o.sector_;
  for (const auto &[k, c] : o.terms_)
    add(k, -c);
  return *this;
}

FockState &FockState::operator*=(const Rational &c) {
  if (c == 0)
    terms_.clear();
  for (auto &[k, v] : terms_)
    v *= c;
  return *this;
}

std::string FockState::to_string() const {
  if (terms_.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto &[k, c] : terms_) {
    if (!first)
      os << " + ";
    first = false;
    if (c != 1)
      os << c.get_str() << "*";
    for (std::size_t i = 0; i < k.modes.size();) {
      std::size_t j = i;
      while (j < k.modes.size() && k.modes[j] == k.modes[i])
        ++j;
      os << "e" << (k.modes[i].first + 1) << "(-" << k.modes[i].second.get_str() << ")";
      if (j - i > 1)
        os << "^" << (j - i);
      os << " ";
      i = j;
    }
    os << "|" << voatheta::to_string(k.momentum) << ">";
  }
  return os.str();
}

Rational energy(const RationalLattice &l, const Sector &s, const Ket &k) {
  Rational e = 0;
  for (const auto &m : k.modes)
    e += m.second;
  return e + l.norm2(add(k.momentum, s.u0));
}

Rational max_level(const FockState &s) {
  Rational best = 0;
  for (const auto &[k, c] : s.terms()) {
    Rational e = 0;
    for (const auto &m : k.modes)
      e += m.second;
    best = std::max(best, e);
  }
  return best;
}

Rational mode_twist(const Sector &s, const CartanVector &h) {
  std::optional<Rational> t;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] == 0)
      continue;
    const Rational ti = i < s.twist.size() ? s.twist[i] : Rational(0);
    if (t && *t != ti)
      throw IncompatibleSector("Cartan vector mixes directions with different twists");
    t = ti;
  }
  return t.value_or(Rational(0));
}

FockState apply_mode(const RationalLattice &l, const CartanVector &h, const Rational &n, const FockState &s) {
  check_dims(l, h);
  FockState out(s.sector());
  if (is_zero(h) || s.is_zero())
    return out;
  const Rational t = mode_twist(s.sector(), h);
  if (frac(n - t) != 0)
    throw IncompatibleSector("mode index " + n.get_str() + " is not in " + t.get_str() + " + Z");
  const RationalVector gh = mat_vec(l.gram(), h); // <h, e_j>
  for (const auto &[k, c] : s.terms()) {
    if (n < 0) {
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] == 0)
          continue;
        Ket next = k;
        const std::pair<int, Rational> mode{static_cast<int>(i), -n};
        next.modes.insert(std::upper_bound(next.modes.begin(), next.modes.end(), mode), mode);
        out.add(next, c * h[i]);
      }
    } else if (n == 0) {
      out.add(k, c * l.pair(h, add(k.momentum, s.sector().u0)));
    } else {
      for (std::size_t idx = 0; idx < k.modes.size(); ++idx) {
        if (k.modes[idx].second != n || (idx > 0 && k.modes[idx - 1] == k.modes[idx]))
          continue;
        std::size_t mult = 1;
        while (idx + mult < k.modes.size() && k.modes[idx + mult] == k.modes[idx])
          ++mult;
        const Rational coef = c * Rational(static_cast<long>(mult)) * n * gh[static_cast<std::size_t>(k.modes[idx].first)];
        if (coef == 0)
          continue;
        Ket next = k;
        next.modes.erase(next.modes.begin() + static_cast<long>(idx));
        out.add(next, coef);
      }
    }
  }
  return out;
}

FockState schur_apply(const RationalLattice &l, long s_index, const CartanVector &u, const FockState &a) {
  if (s_index < 0)
    throw Error("Schur index must be nonnegative");
  std::vector<FockState> p{a};
  for (long k = 1; k <= s_index; ++k) {
    FockState acc(a.sector());
    for (long n = 1; n <= k; ++n) {
      FockState t = apply_mode(l, u, Rational(n), p[static_cast<std::size_t>(k - n)]);
      acc += (n % 2 == 1 ? Rational(1) : Rational(-1)) * t;
    }
    acc *= Rational(1, k);
    p.push_back(std::move(acc));
  }
  return p.back();
}

std::map<Rational, FockState> delta_apply(const RationalLattice &l, const CartanVector &u, const FockState &a) {
  check_dims(l, u);
  if (mode_twist(a.sector(), u) != 0)
    throw IncompatibleSector("Delta(u, z) needs u in untwisted directions");
  // Split into u(0)-eigencomponents.
  std::map<Rational, FockState> parts;
  for (const auto &[k, c] : a.terms()) {
    const Rational lambda = l.pair(u, add(k.momentum, a.sector().u0));
    parts.try_emplace(lambda, a.sector()).first->second.add(k, c);
  }
  std::map<Rational, FockState> out;
  for (const auto &[lambda, part] : parts) {
    const long top = floor(max_level(part)).get_si();
    for (long s = 0; s <= top; ++s) {
      FockState ps = schur_apply(l, s, u, part);
      if (!ps.is_zero())
        out.try_emplace(lambda - s, a.sector()).first->second += ps;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

std::map<Rational, FockState> delta_apply(const RationalLattice &l, const CartanVector &u,
                                          const std::map<Rational, FockState> &expansion) {
  std::map<Rational, FockState> out;
  for (const auto &[e, state] : expansion)
    for (const auto &[e2, piece] : delta_apply(l, u, state))
      out.try_emplace(e + e2, piece.sector()).first->second += piece;
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

Insertion Insertion::parse(const std::string &text, std::size_t rank) {
  if (text == "vacuum")
    return vacuum();
  if (text == "omega")
    return omega();
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ParseError("unknown insertion '" + text + "'");
  const std::string head = text.substr(0, colon);
  if (head != "h" && head != "charge")
    throw ParseError("unknown insertion '" + text + "'");
  CartanVector v;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ','))
    v.push_back(parse_rational(item));
  if (v.size() != rank)
    throw ParseError("insertion '" + text + "' has wrong dimension");
  return head == "h" ? cartan(v) : charge(v);
}

std::string Insertion::to_string() const {
  auto coords = [this] {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i)
      s += (i ? "," : "") + h[i].get_str();
    return s;
  };
  switch (kind) {
  case Kind::Vacuum:
    return "vacuum";
  case Kind::Omega:
    return "omega";
  case Kind::Cartan:
    return "h:" + coords();
  case Kind::Charge:
    return "charge:" + coords();
  }
  return "";
}

FockState conformal_vector(const RationalLattice &l) {
  const std::size_t d = l.rank();
  FockState out = FockState(Sector::untwisted(d));
  const FockState vac = FockState::vacuum(d);
  for (std::size_t i = 0; i < d; ++i) {
    const RationalVector dual_i = l.inverse_gram()[i];
    out += apply_mode(l, unit_vector(d, i), -1, apply_mode(l, dual_i, -1, vac));
  }
  out *= Rational(1, 2);
  return out;
}

FockState catalog_state(const RationalLattice &l, const Insertion &a) {
  switch (a.kind) {
  case Insertion::Kind::Vacuum:
    return FockState::vacuum(l.rank());
  case Insertion::Kind::Cartan:
    check_dims(l, a.h);
    return apply_mode(l, a.h, -1, FockState::vacuum(l.rank()));
  case Insertion::Kind::Omega:
    return conformal_vector(l);
  case Insertion::Kind::Charge:
    break;
  }
  throw UnsupportedInsertion("charged insertions have no Heisenberg vertex operator");
}

Rational weight(const FockState &a) {
  std::optional<Rational> w;
  for (const auto &[k, c] : a.terms()) {
    if (!is_zero(k.momentum))
      throw UnsupportedInsertion("weight is only defined here for vacuum-module states");
    Rational e = 0;
    for (const auto &m : k.modes)
      e += m.second;
    if (w && *w != e)
      throw UnsupportedInsertion("state is not homogeneous");
    w = e;
  }
  return w.value_or(Rational(0));
}

namespace {

// Apply the normal-ordered mode word (annihilators act first).
FockState apply_normal_ordered(const RationalLattice &l, std::vector<std::pair<int, Rational>> word, FockState s) {
  std::stable_sort(word.begin(), word.end(), [](const auto &x, const auto &y) { return x.second > y.second; });
  const std::size_t d = l.rank();
  for (const auto &[i, p] : word) {
    s = apply_mode(l, unit_vector(d, static_cast<std::size_t>(i)), p, s);
    if (s.is_zero())
      break;
  }
  return s;
}

} // namespace

FockState vertex_mode(const RationalLattice &l, const FockState &a, const Rational &m, const FockState &b) {
  FockState out(b.sector());
  if (m.get_den() != 1)
    throw IncompatibleSector("vertex_mode needs an integral mode index");
  for (const auto &t : b.sector().twist)
    if (t != 0)
      throw IncompatibleSector("vertex_mode is only implemented on untwisted sectors");
  const Rational level = max_level(b);
  for (const auto &[ka, ca] : a.terms()) {
    if (!is_zero(ka.momentum))
      throw UnsupportedInsertion("vertex_mode needs a momentum-zero state");
    const auto &factors = ka.modes;
    const std::size_t k = factors.size();
    if (k == 0) {
      if (m == -1)
        out += ca * b;
      continue;
    }
    Rational total_n = 0;
    for (const auto &f : factors)
      total_n += f.second;
    // sum_r (p_r + n_r) = m + 1; positive p_r are bounded by the level of b.
    const Integer hi = floor(level);
    const Integer lo = ceil(m + 1 - total_n - Rational(static_cast<long>(k - 1)) * level);
    std::vector<std::pair<int, Rational>> word(k);
    std::function<void(std::size_t, const Rational &, const Rational &)> rec = [&](std::size_t r, const Rational &remaining,
                                                                                   const Rational &coef) {
      const Rational n_r = factors[r].second;
      if (r + 1 == k) {
        const Rational p = remaining - n_r;
        if (p > level)
          return;
        const Rational c = coef * binomial(-p - 1, Rational(n_r - 1).get_num().get_si());
        if (c == 0)
          return;
        word[r] = {factors[r].first, p};
        out += c * apply_normal_ordered(l, word, b);
        return;
      }
      for (Integer pi = lo; pi <= hi; ++pi) {
        const Rational p(pi);
        const Rational c = coef * binomial(-p - 1, Rational(n_r - 1).get_num().get_si());
        if (c == 0)
          continue;
        word[r] = {factors[r].first, p};
        rec(r + 1, remaining - p - n_r, c);
      }
    };
    rec(0, m + 1, ca);
  }
  return out;
}

FockState bracket_mode(const RationalLattice &l, const FockState &a, long m, const FockState &b) {
  // Linear in a: handle each homogeneous component on its own.
  std::map<Rational, FockState> parts;
  for (const auto &[k, c] : a.terms()) {
    Rational e = 0;
    for (const auto &md : k.modes)
      e += md.second;
    parts.try_emplace(e, a.sector()).first->second.add(k, c);
  }
  if (parts.size() > 1) {
    FockState out(b.sector());
    for (const auto &[e, part] : parts)
      out += bracket_mode(l, part, m, b);
    return out;
  }
  const Rational wt = weight(a);
  const long top = floor(Rational(wt - 1 + max_level(b))).get_si() + 1; // a_(j) b = 0 for j >= top
  FockState out(b.sector());
  if (m >= top)
    return out;
  const std::size_t len = static_cast<std::size_t>(top - m);
  // log(1+w) = w * L(w), L(w) = sum_k (-1)^k w^k / (k+1).
  Series lw(len);
  for (std::size_t k = 0; k < len; ++k)
    lw[k] = Rational(k % 2 == 0 ? 1 : -1, static_cast<long>(k + 1));
  const Series f = series_mul(series_pow(lw, m, len), binomial_series(wt - 1, len), len);
  for (std::size_t i = 0; i < len; ++i)
    if (f[i] != 0)
      out += f[i] * vertex_mode(l, a, Rational(m + static_cast<long>(i)), b);
  return out;
}

IterateReport iterate_check(const RationalLattice &l, const CartanVector &a, const CartanVector &b, long m,
                            const Rational &n, const FockState &w, long N) {
  check_dims(l, a);
  check_dims(l, b);
  if (n.get_den() != 1)
    throw Error("iterate_check takes an integral n; the twists are added internally");
  const Sector &sec = w.sector();
  const Rational r = mode_twist(sec, a);
  const Rational s = mode_twist(sec, b);
  const Rational ab = l.pair(a, b);
  if (r != s && ab != 0)
    throw IncompatibleSector("a and b have different twists but are not orthogonal");
  const Rational total = n + r + s;
  const Rational level = max_level(w);
  IterateReport rep{FockState(sec), FockState(sec)};

  // Left side: modes of a_(m) b computed from the free-field description.
  if (m >= 0) {
    if (m == 1 && total == -1)
      rep.lhs = ab * w;
  } else {
    const long k = -1 - m;
    const Rational q_sum = total - k - 1;
    const Integer p_lo = ceil(q_sum - level - r);
    const Integer p_hi = floor(level - r);
    for (Integer t = p_lo; t <= p_hi; ++t) {
      const Rational p = r + Rational(t);
      const Rational q = q_sum - p;
      const Rational c = binomial(-p - 1, k);
      if (c == 0)
        continue;
      FockState v = (p > 0) ? apply_mode(l, b, q, apply_mode(l, a, p, w)) : apply_mode(l, a, p, apply_mode(l, b, q, w));
      rep.lhs += c * v;
    }
    if (r != 0 && ab != 0 && total == k + 1) {
      // Regular part of the twisted contraction ((1+x)^{1/2} + (1+x)^{-1/2}) / (2 x^2).
      const Series g = binomial_series(Rational(1, 2), static_cast<std::size_t>(k + 3));
      const Series h = binomial_series(Rational(-1, 2), static_cast<std::size_t>(k + 3));
      const Rational f = (g[static_cast<std::size_t>(k + 2)] + h[static_cast<std::size_t>(k + 2)]) / 2;
      rep.lhs += (ab * f) * w;
    }
  }

  // Right side: the iterate formula. With N < 0 the i-sum runs until every
  // term annihilates w; the j-sum is always cut that way.
  const long span = floor(level).get_si() + std::labs(n.get_num().get_si()) + std::labs(m) + 3;
  if (N < 0)
    N = span;
  const long J = span + N;
  for (long i = 0; i <= N; ++i) {
    const Rational ci = binomial(-r, i);
    if (ci == 0)
      continue;
    for (long j = 0; j <= J; ++j) {
      const Rational cj = binomial(Rational(m + i), j);
      if (cj == 0)
        continue;
      const Rational c = (j % 2 == 0 ? ci : -ci) * cj;
      FockState first = apply_mode(l, a, Rational(m + i - j) + r, apply_mode(l, b, n - i + j + s, w));
      FockState second = apply_mode(l, b, Rational(m - j) + n + s, apply_mode(l, a, Rational(j) + r, w));
      const Rational sign = ((m + i) % 2 == 0) ? 1 : -1;
      rep.rhs += c * (first - sign * second);
    }
  }
  return rep;
}

} // namespace voatheta
