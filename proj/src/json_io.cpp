#include "voatheta/json_io.hpp"

#include "voatheta/errors.hpp"

#include <cstdio>
#include <fstream>

namespace voatheta::json_io {

json to_json(const Rational &r) { return to_string(r); }

Rational rational_from(const json &j) {
  if (j.is_string())
    return parse_rational(j.get<std::string>());
  if (j.is_number_integer())
    return Rational(j.get<long>());
  throw ParseError("expected a rational string \"p/q\", got " + j.dump());
}

json to_json(const RationalVector &v) {
  json out = json::array();
  for (const auto &x : v)
    out.push_back(to_json(x));
  return out;
}

RationalVector vector_from(const json &j) {
  if (!j.is_array())
    throw ParseError("expected an array of rationals, got " + j.dump());
  RationalVector out;
  for (const auto &x : j)
    out.push_back(rational_from(x));
  return out;
}

json to_json(const RationalMatrix &m) {
  json out = json::array();
  for (const auto &row : m)
    out.push_back(to_json(row));
  return out;
}

RationalMatrix matrix_from(const json &j) {
  if (!j.is_array())
    throw ParseError("expected a matrix, got " + j.dump());
  RationalMatrix out;
  for (const auto &row : j)
    out.push_back(vector_from(row));
  return out;
}

std::string decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(std::complex<double> z) { return json::array({decimal(z.real()), decimal(z.imag())}); }

std::complex<double> complex_from(const json &j) {
  auto num = [](const json &x) {
    if (x.is_number())
      return x.get<double>();
    if (x.is_string()) {
      try {
        std::size_t used = 0;
        const std::string s = x.get<std::string>();
        const double v = std::stod(s, &used);
        if (used == s.size())
          return v;
      } catch (const std::exception &) {
      }
    }
    throw ParseError("malformed real number " + x.dump());
  };
  if (!j.is_array() || j.size() != 2)
    throw ParseError("expected [re, im], got " + j.dump());
  return {num(j[0]), num(j[1])};
}

json to_json(const QSeries &s) {
  json coeffs = json::array();
  for (const auto &c : s.coeffs()) {
    json terms = json::array();
    for (const auto &[angle, value] : c.terms())
      terms.push_back(json::array({to_json(value), to_json(angle)}));
    coeffs.push_back(terms);
  }
  return {{"den", s.den()},
          {"offset", to_json(s.offset())},
          {"trunc", s.trunc() ? to_json(*s.trunc()) : json(nullptr)},
          {"coeffs", coeffs}};
}

QSeries series_from(const json &j) {
  try {
    std::vector<Cyclotomic> coeffs;
    for (const auto &c : j.at("coeffs")) {
      Cyclotomic v;
      for (const auto &t : c)
        v += Cyclotomic::unit(rational_from(t.at(1)), rational_from(t.at(0)));
      coeffs.push_back(v);
    }
    std::optional<Rational> trunc;
    if (j.contains("trunc") && !j.at("trunc").is_null())
      trunc = rational_from(j.at("trunc"));
    return QSeries::from_dense(j.at("den").get<std::int64_t>(), rational_from(j.at("offset")), trunc,
                               std::move(coeffs));
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed series JSON: ") + e.what());
  }
}

json lattice_to_json(const RationalLattice &l, const RationalVector &shift) {
  json out{{"gram", to_json(l.gram())}};
  if (!shift.empty())
    out["shift"] = to_json(shift);
  return out;
}

RationalLattice lattice_from(const json &j) {
  if (!j.is_object() || !j.contains("gram"))
    throw ParseError("lattice JSON needs a \"gram\" entry");
  return RationalLattice(matrix_from(j.at("gram")));
}

json to_json(const ThetaTask &t) {
  return {{"lattice", lattice_to_json(t.module.lattice)},
          {"shift", to_json(t.module.shift)},
          {"sector_u0", to_json(t.module.u0)},
          {"stab_v0", to_json(t.module.v0)},
          {"insertion", t.insertion.to_string()},
          {"u", to_json(t.u)},
          {"v", to_json(t.v)},
          {"order", to_json(t.order)}};
}

ThetaTask task_from(const json &j) {
  if (!j.is_object() || !j.contains("lattice"))
    throw ParseError("task JSON needs a \"lattice\" entry");
  try {
    const json &lj = j.at("lattice");
    ThetaTask t;
    t.module.lattice = lattice_from(lj);
    const std::size_t d = t.module.lattice.rank();
    auto vec = [&](const char *key, const json *fallback = nullptr) {
      if (j.contains(key))
        return vector_from(j.at(key));
      if (fallback)
        return vector_from(*fallback);
      return RationalVector(d, Rational(0));
    };
    t.module.shift = vec("shift", lj.contains("shift") ? &lj.at("shift") : nullptr);
    t.module.u0 = vec("sector_u0");
    t.module.v0 = vec("stab_v0");
    t.u = vec("u");
    t.v = vec("v");
    t.insertion = Insertion::parse(j.value("insertion", std::string("vacuum")), d);
    if (j.contains("order"))
      t.order = rational_from(j.at("order"));
    return normalized(t);
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed task JSON: ") + e.what());
  }
}

json to_json(const CosetFrame &f) {
  json shifts = json::array();
  for (const auto &s : f.shifts)
    shifts.push_back(to_json(s));
  return {{"L", lattice_to_json(f.L)}, {"K", lattice_to_json(f.K)}, {"embedding", to_json(f.embedding)},
          {"shifts", shifts}};
}

CosetFrame frame_from(const json &j) {
  try {
    CosetFrame f;
    f.L = lattice_from(j.at("L"));
    f.K = lattice_from(j.at("K"));
    f.embedding = matrix_from(j.at("embedding"));
    if (j.contains("shifts"))
      for (const auto &s : j.at("shifts"))
        f.shifts.push_back(vector_from(s));
    else
      f.shifts.push_back(RationalVector(f.L.rank(), Rational(0)));
    f.validate();
    return f;
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed frame JSON: ") + e.what());
  }
}

json to_json(const Eigen::MatrixXcd &m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back(to_json(std::complex<double>(m(i, k))));
    out.push_back(row);
  }
  return out;
}

json to_json(const TransformReport &r) {
  return {{"law", r.law},
          {"rho", r.rho.to_string()},
          {"tau", to_json(r.tau)},
          {"lhs", to_json(r.lhs)},
          {"rhs", to_json(r.rhs)},
          {"residual", decimal(r.residual)},
          {"tail_budget", decimal(r.tail_budget)},
          {"tolerance", decimal(r.tolerance)},
          {"pass", r.pass()},
          {"matrix_used", to_json(r.matrix_used)},
          {"note", r.note}};
}

json read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ParseError(path + ": " + e.what());
  }
}

} // namespace voatheta::json_io
