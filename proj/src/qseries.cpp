#include "voatheta/qseries.hpp"

#include "voatheta/errors.hpp"
#include "voatheta/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

namespace voatheta {

namespace {

std::atomic<std::int64_t> g_max_den{0};

std::int64_t check_den(const Integer &n) {
  if (n > Integer(static_cast<long>(max_denominator())))
    throw DenominatorCapExceeded("exponent denominator " + n.get_str() + " exceeds cap " +
                                 std::to_string(max_denominator()));
  return n.get_si();
}

std::int64_t common_den(std::int64_t a, std::int64_t b) {
  return check_den(lcm(Integer(static_cast<long>(a)), Integer(static_cast<long>(b))));
}

std::int64_t with_den(std::int64_t a, const Rational &r) {
  return check_den(lcm(Integer(static_cast<long>(a)), r.get_den()));
}

// Index of exponent e on the grid offset + (1/n) Z; e must lie on the grid.
long grid_index(const Rational &e, const Rational &offset, std::int64_t n) {
  Rational k = (e - offset) * Rational(static_cast<long>(n));
  return k.get_num().get_si();
}

std::optional<Rational> min_trunc(const std::optional<Rational> &a, const std::optional<Rational> &b) {
  if (!a)
    return b;
  if (!b)
    return a;
  return std::min(*a, *b);
}

} // namespace

std::int64_t max_denominator() {
  std::int64_t v = g_max_den.load();
  if (v > 0)
    return v;
  v = 1000000;
  if (const char *env = std::getenv("VOATHETA_MAX_DEN")) {
    char *end = nullptr;
    long long parsed = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0)
      v = parsed;
  }
  g_max_den.store(v);
  return v;
}

void set_max_denominator(std::int64_t cap) {
  if (cap <= 0)
    throw Error("denominator cap must be positive");
  g_max_den.store(cap);
}

QSeries QSeries::zero(std::optional<Rational> trunc) {
  QSeries s;
  s.trunc_ = std::move(trunc);
  s.normalize();
  return s;
}

QSeries QSeries::constant(const Cyclotomic &c, std::optional<Rational> trunc) {
  return monomial(c, 0, std::move(trunc));
}

QSeries QSeries::monomial(const Cyclotomic &c, const Rational &exponent, std::optional<Rational> trunc) {
  return from_terms({{exponent, c}}, std::move(trunc));
}

QSeries QSeries::from_terms(const std::vector<std::pair<Rational, Cyclotomic>> &terms,
                            std::optional<Rational> trunc) {
  QSeries s;
  s.trunc_ = trunc;
  std::int64_t n = 1;
  std::optional<Rational> lo;
  for (const auto &[e, c] : terms) {
    if ((trunc && e >= *trunc) || c.is_zero())
      continue;
    n = with_den(n, e);
    lo = lo ? std::min(*lo, e) : e;
  }
  if (trunc)
    n = with_den(n, *trunc);
  if (!lo) {
    s.normalize();
    return s;
  }
  s.den_ = n;
  s.offset_ = *lo;
  long len = 0;
  if (trunc)
    len = grid_index(*trunc, *lo, n);
  else
    for (const auto &[e, c] : terms)
      if (!c.is_zero())
        len = std::max(len, grid_index(e, *lo, n) + 1);
  s.coeffs_.assign(static_cast<std::size_t>(len), Cyclotomic());
  for (const auto &[e, c] : terms) {
    if ((trunc && e >= *trunc) || c.is_zero())
      continue;
    s.coeffs_[static_cast<std::size_t>(grid_index(e, *lo, n))] += c;
  }
  s.normalize();
  return s;
}

QSeries QSeries::from_dense(std::int64_t den, const Rational &offset, std::optional<Rational> trunc,
                            std::vector<Cyclotomic> coeffs) {
  if (den <= 0)
    throw ParseError("series denominator must be positive");
  check_den(Integer(static_cast<long>(den)));
  const Rational n(static_cast<long>(den));
  if (Rational(offset * n).get_den() != 1)
    throw ParseError("series offset " + offset.get_str() + " is not a multiple of 1/" + std::to_string(den));
  if (trunc) {
    if (Rational(*trunc * n).get_den() != 1)
      throw ParseError("series truncation is not a multiple of 1/" + std::to_string(den));
    Rational expected = (*trunc - offset) * n;
    if (expected < 0 || expected != Rational(static_cast<long>(coeffs.size())))
      throw ParseError("series coefficient count does not match truncation order");
  }
  QSeries s;
  s.den_ = den;
  s.offset_ = offset;
  s.trunc_ = std::move(trunc);
  s.coeffs_ = std::move(coeffs);
  s.normalize();
  return s;
}

void QSeries::normalize() {
  std::size_t first = 0;
  while (first < coeffs_.size() && coeffs_[first].is_zero())
    ++first;
  if (first == coeffs_.size()) {
    coeffs_.clear();
    offset_ = trunc_ ? *trunc_ : Rational(0);
    den_ = static_cast<std::int64_t>(offset_.get_den().get_si());
    return;
  }
  std::size_t last = coeffs_.size();
  if (!trunc_)
    while (coeffs_[last - 1].is_zero())
      --last;
  const Rational n(static_cast<long>(den_));
  Rational new_offset = offset_ + Rational(static_cast<long>(first)) / n;
  // Minimal denominator supporting every nonzero exponent and the truncation.
  Integer m = new_offset.get_den();
  if (trunc_)
    m = lcm(m, trunc_->get_den());
  for (std::size_t i = first; i < last; ++i)
    if (!coeffs_[i].is_zero())
      m = lcm(m, Rational(offset_ + Rational(static_cast<long>(i)) / n).get_den());
  const long step = den_ / m.get_si();
  std::vector<Cyclotomic> out;
  if (trunc_) {
    out.resize(static_cast<std::size_t>(grid_index(*trunc_, new_offset, m.get_si())));
  } else {
    out.resize((last - first - 1) / static_cast<std::size_t>(step) + 1);
  }
  for (std::size_t i = first; i < last; ++i)
    if (!coeffs_[i].is_zero())
      out[(i - first) / static_cast<std::size_t>(step)] = std::move(coeffs_[i]);
  coeffs_ = std::move(out);
  offset_ = new_offset;
  den_ = m.get_si();
}

Cyclotomic QSeries::coefficient(const Rational &e) const {
  if (trunc_ && e >= *trunc_)
    throw Error("coefficient of q^" + e.get_str() + " is beyond the truncation order " + trunc_->get_str());
  if (coeffs_.empty() || e < offset_)
    return {};
  Rational k = (e - offset_) * Rational(static_cast<long>(den_));
  if (k.get_den() != 1 || k >= Rational(static_cast<long>(coeffs_.size())))
    return {};
  return coeffs_[k.get_num().get_ui()];
}

std::vector<std::pair<Rational, Cyclotomic>> QSeries::terms() const {
  std::vector<std::pair<Rational, Cyclotomic>> out;
  const Rational n(static_cast<long>(den_));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (!coeffs_[i].is_zero())
      out.emplace_back(offset_ + Rational(static_cast<long>(i)) / n, coeffs_[i]);
  return out;
}

Cyclotomic QSeries::leading_coefficient() const {
  return coeffs_.empty() ? Cyclotomic() : coeffs_.front();
}

bool operator==(const QSeries &a, const QSeries &b) {
  if (a.trunc_ != b.trunc_ || a.den_ != b.den_ || a.offset_ != b.offset_ || a.coeffs_.size() != b.coeffs_.size())
    return false;
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    if (a.coeffs_[i] != b.coeffs_[i])
      return false;
  return true;
}

namespace {

std::string exponent_string(const Rational &e) {
  if (e.get_den() == 1)
    return "q^" + e.get_str();
  return "q^(" + e.get_str() + ")";
}

std::string monomial_string(const Rational &e) { return e == 1 ? "q" : exponent_string(e); }

} // namespace

std::string QSeries::to_string() const {
  // Fractional offsets are factored out so the body reads in integral steps.
  const Rational base = (coeffs_.empty() || offset_.get_den() == 1) ? Rational(0) : offset_;
  std::string body;
  for (const auto &[e, c] : terms()) {
    const Rational rel = e - base;
    std::string coef;
    bool negative = false;
    if (c.is_rational()) {
      Rational v = c.rational_value();
      negative = v < 0;
      if (negative)
        v = -v;
      if (v != 1 || rel == 0)
        coef = v.get_str();
    } else {
      coef = "(" + c.to_string() + ")";
    }
    std::string term = coef;
    if (rel != 0)
      term += (coef.empty() ? "" : "*") + monomial_string(rel);
    if (body.empty())
      body = negative ? "-" + term : term;
    else
      body += (negative ? " - " : " + ") + term;
  }
  if (trunc_) {
    std::string o = "O(" + monomial_string(*trunc_ - base) + ")";
    body = body.empty() ? o : body + " + " + o;
  }
  if (body.empty())
    body = "0";
  if (base == 0)
    return body;
  return exponent_string(base) + "*(" + body + ")";
}

QSeries operator+(const QSeries &a, const QSeries &b) {
  auto trunc = min_trunc(a.trunc(), b.trunc());
  auto ta = a.terms();
  auto tb = b.terms();
  ta.insert(ta.end(), tb.begin(), tb.end());
  return QSeries::from_terms(ta, trunc);
}

QSeries operator-(const QSeries &a) {
  auto t = a.terms();
  for (auto &term : t)
    term.second = -term.second;
  return QSeries::from_terms(t, a.trunc());
}

QSeries operator-(const QSeries &a, const QSeries &b) { return a + (-b); }

QSeries operator*(const Cyclotomic &c, const QSeries &a) {
  auto t = a.terms();
  for (auto &term : t)
    term.second *= c;
  return QSeries::from_terms(t, a.trunc());
}

QSeries operator*(const QSeries &a, const QSeries &b) {
  if ((a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact()))
    return QSeries::zero();
  std::optional<Rational> trunc;
  if (b.trunc())
    trunc = a.offset() + *b.trunc();
  if (a.trunc())
    trunc = min_trunc(trunc, b.offset() + *a.trunc());
  const std::int64_t n = common_den(a.den(), b.den());
  const Rational off = a.offset() + b.offset();
  const long sa = n / a.den();
  const long sb = n / b.den();
  std::vector<std::pair<long, const Cyclotomic *>> na, nb;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    if (!a.coeffs()[i].is_zero())
      na.emplace_back(static_cast<long>(i) * sa, &a.coeffs()[i]);
  for (std::size_t i = 0; i < b.coeffs().size(); ++i)
    if (!b.coeffs()[i].is_zero())
      nb.emplace_back(static_cast<long>(i) * sb, &b.coeffs()[i]);
  long len;
  if (trunc)
    len = std::max(0L, grid_index(*trunc, off, n));
  else
    len = (na.empty() || nb.empty()) ? 0 : na.back().first + nb.back().first + 1;
  std::vector<Cyclotomic> out(static_cast<std::size_t>(len));
  for (const auto &[i, ca] : na) {
    if (i >= len)
      break;
    for (const auto &[j, cb] : nb) {
      if (i + j >= len)
        break;
      out[static_cast<std::size_t>(i + j)] += (*ca) * (*cb);
    }
  }
  if (!trunc && out.empty())
    return QSeries::zero();
  return QSeries::from_dense(n, off, trunc, std::move(out));
}

QSeries truncate(const QSeries &a, const Rational &order) {
  auto trunc = min_trunc(a.trunc(), order);
  return QSeries::from_terms(a.terms(), trunc);
}

QSeries invert(const QSeries &a, std::optional<Rational> order) {
  if (a.is_zero())
    throw NonInvertibleLeadingTerm("cannot invert a zero series");
  const Cyclotomic inv = a.leading_coefficient().inverse();
  const Rational o = a.offset();
  auto nz = a.terms();
  if (a.is_exact() && nz.size() == 1) {
    auto r = QSeries::monomial(inv, -o);
    return order ? truncate(r, *order) : r;
  }
  std::optional<Rational> trunc;
  if (a.trunc())
    trunc = *a.trunc() - 2 * o;
  trunc = min_trunc(trunc, order);
  if (!trunc)
    throw Error("inverting an exact non-monomial series needs an explicit order");
  const std::int64_t n = with_den(a.den(), *trunc);
  const long len = std::max(0L, grid_index(*trunc, -o, n));
  const long step = n / a.den();
  std::vector<std::pair<long, Cyclotomic>> tail;
  for (std::size_t i = 1; i < a.coeffs().size(); ++i)
    if (!a.coeffs()[i].is_zero())
      tail.emplace_back(static_cast<long>(i) * step, a.coeffs()[i]);
  std::vector<Cyclotomic> b(static_cast<std::size_t>(len));
  if (len > 0)
    b[0] = inv;
  const Cyclotomic minus_inv = -inv;
  for (long k = 1; k < len; ++k) {
    Cyclotomic s;
    for (const auto &[j, c] : tail) {
      if (j > k)
        break;
      const auto &bk = b[static_cast<std::size_t>(k - j)];
      if (!bk.is_zero())
        s += c * bk;
    }
    if (!s.is_zero())
      b[static_cast<std::size_t>(k)] = minus_inv * s;
  }
  return QSeries::from_dense(n, -o, trunc, std::move(b));
}

QSeries pow_int(const QSeries &a, long k, std::optional<Rational> order) {
  if (k == 0)
    return QSeries::constant(1, order);
  QSeries base = a;
  long m = k;
  if (k < 0) {
    m = -k;
    std::optional<Rational> inv_order;
    if (order && !a.is_zero())
      inv_order = *order + Rational(m - 1) * a.offset();
    base = invert(a, inv_order);
  }
  QSeries result = QSeries::constant(1);
  bool have = false;
  while (m > 0) {
    if (m & 1) {
      result = have ? result * base : base;
      have = true;
      if (order)
        result = truncate(result, *order);
    }
    m >>= 1;
    if (m > 0)
      base = base * base;
  }
  return order ? truncate(result, *order) : result;
}

QSeries q_derivative(const QSeries &a) {
  auto t = a.terms();
  for (auto &[e, c] : t)
    c *= e;
  return QSeries::from_terms(t, a.trunc());
}

QSeries shift(const QSeries &a, const Rational &r) {
  auto t = a.terms();
  for (auto &term : t)
    term.first += r;
  std::optional<Rational> trunc;
  if (a.trunc())
    trunc = *a.trunc() + r;
  return QSeries::from_terms(t, trunc);
}

QSeries t_shift(const QSeries &a) {
  auto t = a.terms();
  for (auto &[e, c] : t)
    c *= Cyclotomic::unit(e);
  return QSeries::from_terms(t, a.trunc());
}

GrowthBudget combine(const GrowthBudget &a, const GrowthBudget &b) {
  // Products of window [j, j+1) and [k, k+1) land in windows j+k and j+k+1,
  // and there are at most K+1 pairs (j, k) with j + k = K.
  return {2 * a.C * b.C, a.p + b.p + 1, std::max(a.rho, b.rho), a.shift + b.shift};
}

std::complex<double> q_power(std::complex<double> tau, const Rational &e) {
  using namespace std::complex_literals;
  return std::exp(2.0 * std::numbers::pi * 1i * tau * e.get_d());
}

double tail_bound(const QSeries &a, std::complex<double> tau, const GrowthBudget &budget) {
  if (a.is_exact())
    return 0;
  const double inf = std::numeric_limits<double>::infinity();
  const double log_q = -2 * std::numbers::pi * tau.imag();
  const double log_rho = std::log(budget.rho);
  if (budget.C <= 0)
    return 0;
  if (log_rho + log_q >= 0)
    return inf;
  const double start = a.trunc()->get_d() + budget.shift;
  const double k0 = std::max(0.0, std::floor(start));
  auto log_term = [&](double k) {
    return std::log(budget.C) + budget.p * std::log1p(k) + k * log_rho + (std::max(k, start) - budget.shift) * log_q;
  };
  double total = 0;
  for (double k = k0; k < k0 + 1e7; k += 1) {
    const double lt = log_term(k);
    if (lt > 700)
      return inf;
    const double t = std::exp(lt);
    total += t;
    if (k > start) {
      const double r = std::pow((k + 2) / (k + 1), budget.p) * std::exp(log_rho + log_q);
      if (r < 1 && (r < 0.5 || t * r / (1 - r) < 1e-6 * total))
        return total + t * r / (1 - r);
    }
  }
  return inf;
}

Evaluation evaluate(const QSeries &a, std::complex<double> tau, const GrowthBudget &budget,
                    double tail_tolerance) {
  if (!(tau.imag() > 0))
    throw NotInUpperHalfPlane("tau must have positive imaginary part");
  Evaluation ev;
  for (const auto &[e, c] : a.terms())
    ev.value += c.to_complex() * q_power(tau, e);
  ev.tail_bound = tail_bound(a, tau, budget);
  if (!(ev.tail_bound <= tail_tolerance))
    throw TailBoundExceeded("tail bound " + format_double(ev.tail_bound) + " exceeds tolerance " +
                            format_double(tail_tolerance));
  return ev;
}

} // namespace voatheta
