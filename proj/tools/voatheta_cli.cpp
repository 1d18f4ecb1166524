// Command-line front end. Exit codes: 0 ok, 1 a verification failed,
// 2 parse error, 3 tail bound exceeded, 4 oracle mismatch, 5 basis too large,
// 6 any other library error.

#include "voatheta/conformal_block.hpp"
#include "voatheta/coset.hpp"
#include "voatheta/errors.hpp"
#include "voatheta/json_io.hpp"
#include "voatheta/modforms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <future>
#include <iostream>
#include <sstream>

using namespace voatheta;
namespace jio = voatheta::json_io;
using json = nlohmann::json;

namespace {

struct Options {
  std::string format = "text";
  std::string order; // empty: 100, or the task's own order
  std::vector<std::string> taus;
  bool eval = false;
  double tol = 1e-6;
  std::int64_t max_den = 0;
  unsigned jobs = 1;

  long weight = 4;
  long wp_k = 1;
  long z_order = 4;
  std::string z = "0.1";

  std::string lattice, task, frame;
  std::string u, v;
  std::size_t module = 0;

  bool oracle = false;
  std::string cap = "5";

  std::string law;
  std::string rho = "S;T";
  std::vector<long> ks;
  std::string b, a;
  std::size_t samples = 8;
};

double parse_real(const std::string &s) {
  if (s.find('/') != std::string::npos)
    return parse_rational(s).get_d();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size())
      return v;
  } catch (const std::exception &) {
  }
  throw ParseError("malformed number '" + s + "'");
}

// "i", "2i", "1/3+i", "0.5-1.5i", or "re,im".
std::complex<double> parse_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty())
    throw ParseError("empty complex number");
  if (const auto comma = s.find(','); comma != std::string::npos)
    return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
  if (s.back() != 'i')
    return {parse_real(s), 0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string re = split == std::string::npos ? "0" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+")
    im = "1";
  else if (im == "-")
    im = "-1";
  else if (im[0] == '+')
    im = im.substr(1);
  return {parse_real(re), parse_real(im)};
}

std::vector<std::complex<double>> tau_list(const Options &o) {
  std::vector<std::complex<double>> out;
  for (const auto &t : o.taus) {
    std::stringstream ss(t);
    std::string item;
    // Several taus may share one flag separated by ';'.
    while (std::getline(ss, item, ';'))
      if (!item.empty())
        out.push_back(parse_complex(item));
  }
  if (out.empty())
    out.emplace_back(0, 1);
  return out;
}

// "S;T;ST", "S,T" (words) or "0,-1,1,0" (one matrix).
std::vector<SL2> rho_list(const std::string &text) {
  std::vector<SL2> out;
  std::stringstream ss(text);
  std::string group;
  while (std::getline(ss, group, ';')) {
    if (group.empty())
      continue;
    const bool numeric = group.find_first_not_of("0123456789-,") == std::string::npos;
    if (numeric) {
      out.push_back(SL2::parse(group));
      continue;
    }
    std::stringstream gs(group);
    std::string word;
    while (std::getline(gs, word, ','))
      out.push_back(SL2::parse(word));
  }
  return out;
}

json load(const std::string &arg) {
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error &e) {
      throw ParseError(std::string("inline JSON: ") + e.what());
    }
  }
  return jio::read_file(arg);
}

RationalVector parse_vector(const std::string &s, std::size_t d) {
  if (s.empty())
    return RationalVector(d, Rational(0));
  RationalVector out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_rational(item));
  if (out.size() != d)
    throw ParseError("vector '" + s + "' has dimension " + std::to_string(out.size()) + ", expected " +
                     std::to_string(d));
  return out;
}

Rational order_of(const Options &o) { return parse_rational(o.order.empty() ? "100" : o.order); }

// An explicit --order overrides the order stored in the task.
ThetaTask require_task(const Options &o) {
  if (o.task.empty())
    throw ParseError("--task is required");
  ThetaTask t = jio::task_from(load(o.task));
  if (!o.order.empty())
    t.order = order_of(o);
  return t;
}

RationalLattice require_lattice(const Options &o) {
  if (!o.lattice.empty())
    return jio::lattice_from(load(o.lattice));
  if (!o.task.empty())
    return require_task(o).module.lattice;
  throw ParseError("--lattice (or --task) is required");
}

void print_series(const Options &o, const QSeries &s) {
  if (o.format == "json")
    std::cout << jio::to_json(s).dump() << "\n";
  else
    std::cout << s.to_string() << "\n";
}

void print_eval(const Options &o, std::complex<double> tau, const Evaluation &e) {
  if (o.format == "json")
    std::cout << json{{"tau", jio::to_json(tau)}, {"value", jio::to_json(e.value)},
                      {"tail_bound", jio::decimal(e.tail_bound)}}
                     .dump()
              << "\n";
  else
    std::cout << "tau=" << jio::decimal(tau.real()) << "+" << jio::decimal(tau.imag()) << "i  value="
              << jio::decimal(e.value.real()) << (e.value.imag() < 0 ? "" : "+") << jio::decimal(e.value.imag())
              << "i  tail<=" << jio::decimal(e.tail_bound) << "\n";
}

void series_or_eval(const Options &o, const QSeries &s, const GrowthBudget &b) {
  if (!o.eval) {
    print_series(o, s);
    return;
  }
  for (auto tau : tau_list(o))
    print_eval(o, tau, evaluate(s, tau, b, o.tol));
}

void print_matrix(const std::string &name, const Eigen::MatrixXcd &m) {
  std::cout << name << ":\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::cout << " ";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const auto z = m(i, k);
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %+.10f%+.10fi", std::abs(z.real()) < 5e-16 ? 0.0 : z.real(),
                    std::abs(z.imag()) < 5e-16 ? 0.0 : z.imag());
      std::cout << buf;
    }
    std::cout << "\n";
  }
}

// ---- verify ----

std::vector<TransformReport> verify_jobs(std::vector<std::function<std::vector<TransformReport>()>> jobs,
                                         unsigned parallel) {
  std::vector<std::vector<TransformReport>> results(jobs.size());
  if (parallel <= 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k)
      results[k] = jobs[k]();
  } else {
    // Batches of `parallel` futures; results are stored by input position.
    for (std::size_t start = 0; start < jobs.size(); start += parallel) {
      std::vector<std::future<std::vector<TransformReport>>> fs;
      for (std::size_t k = start; k < std::min(jobs.size(), start + parallel); ++k)
        fs.push_back(std::async(std::launch::async, jobs[k]));
      for (std::size_t k = 0; k < fs.size(); ++k)
        results[start + k] = fs[k].get();
    }
  }
  std::vector<TransformReport> out;
  for (auto &r : results)
    out.insert(out.end(), r.begin(), r.end());
  return out;
}

TransformReport zhu_report(const ZhuReport &z) {
  TransformReport r;
  r.law = "zhu";
  r.tolerance = 0.5;
  r.residual = z.equal() ? 0 : 1;
  std::ostringstream note;
  for (const auto &[j, s] : z.lhs)
    note << "Y^" << j << " lhs " << s.to_string() << "; ";
  r.note = note.str();
  return r;
}

int cmd_verify(const Options &o) {
  const auto taus = tau_list(o);
  const auto rhos = rho_list(o.rho);
  const Rational order = order_of(o);
  const double tol = o.tol;
  std::vector<std::function<std::vector<TransformReport>()>> jobs;

  if (o.law == "eta") {
    for (auto tau : taus)
      jobs.push_back([=] { return verify_eta_laws(tau, tol, order); });
  } else if (o.law == "eisenstein") {
    const std::vector<long> ks = o.ks.empty() ? std::vector<long>{4, 6} : o.ks;
    for (long k : ks)
      for (const auto &rho : rhos)
        for (auto tau : taus)
          jobs.push_back([=] { return std::vector{verify_eisenstein_modularity(k, rho, tau, tol, order)}; });
  } else if (o.law == "wp") {
    const std::vector<long> ks = o.ks.empty() ? std::vector<long>{1, 2} : o.ks;
    const auto z = parse_complex(o.z);
    for (long k : ks)
      for (const auto &rho : rhos)
        for (auto tau : taus)
          jobs.push_back([=] { return std::vector{verify_wp_modularity(k, rho, z, tau, tol, order)}; });
  } else if (o.law == "main") {
    const ThetaTask t = require_task(o);
    for (const auto &rho : rhos)
      for (auto tau : taus)
        jobs.push_back([=] { return std::vector{verify_main_theorem(t, rho, tau, tol)}; });
  } else if (o.law == "corollary") {
    const RationalLattice l = require_lattice(o);
    const auto u = parse_vector(o.u, l.rank()), v = parse_vector(o.v, l.rank());
    for (const auto &rho : rhos)
      jobs.push_back([=] { return std::vector{verify_corollary(l, u, v, rho, tol, order)}; });
  } else if (o.law == "coset-T" || o.law == "coset-S") {
    if (o.frame.empty())
      throw ParseError("--frame is required");
    const CosetFrame f = jio::frame_from(load(o.frame));
    const auto u = parse_vector(o.u, f.L.rank()), v = parse_vector(o.v, f.L.rank());
    const char which = o.law.back();
    for (auto tau : taus)
      jobs.push_back([=] { return std::vector{verify_final_theorem(f, o.module, which, u, v, tau, tol, order)}; });
  } else if (o.law == "zhu") {
    const ThetaTask t = require_task(o);
    const std::size_t d = t.module.lattice.rank();
    RationalVector b = parse_vector(o.b, d), a = parse_vector(o.a, d);
    if (o.b.empty())
      b[0] = 1;
    if (o.a.empty())
      a = b;
    jobs.push_back([=] { return std::vector{zhu_report(zhu_recurrence_check(t.module, b, a, 2, 3))}; });
  } else {
    throw ParseError("unknown law '" + o.law + "'");
  }

  const auto reports = verify_jobs(std::move(jobs), o.jobs);
  bool ok = true;
  json arr = json::array();
  for (const auto &r : reports) {
    ok = ok && r.pass();
    arr.push_back(jio::to_json(r));
  }
  if (o.format == "text") {
    for (const auto &r : reports)
      std::cout << (r.pass() ? "PASS " : "FAIL ") << r.law << " rho=" << r.rho.to_string() << " tau=("
                << jio::decimal(r.tau.real()) << "," << jio::decimal(r.tau.imag())
                << ") residual=" << jio::decimal(r.residual) << " tail=" << jio::decimal(r.tail_budget)
                << (r.note.empty() ? "" : "  " + r.note) << "\n";
  } else {
    std::cout << arr.dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

int run(const std::string &cmd, const Options &o) {
  if (o.max_den > 0)
    set_max_denominator(o.max_den);
  if (!(o.tol > 0))
    throw ParseError("tolerance must be positive");
  const Rational order = order_of(o);
  if (order <= 0)
    throw ParseError("order must be positive");

  if (cmd == "eta") {
    series_or_eval(o, dedekind_eta(order), eta_budget());
  } else if (cmd == "eisenstein") {
    series_or_eval(o, eisenstein_E(o.weight, order), eisenstein_budget(o.weight));
  } else if (cmd == "wp") {
    const WpExpansion wp = weierstrass_p(o.wp_k, o.z_order, order);
    if (o.eval) {
      const auto z = parse_complex(o.z);
      for (auto tau : tau_list(o))
        print_eval(o, tau, evaluate_wp(wp, z, tau, o.tol));
    } else if (o.format == "json") {
      json arr = json::array();
      for (const auto &t : wp.terms)
        arr.push_back({{"z_power", t.z_power}, {"token", t.token}, {"series", jio::to_json(t.series)}});
      std::cout << arr.dump() << "\n";
    } else {
      for (const auto &t : wp.terms)
        std::cout << "z^" << t.z_power << "  (2 pi i)^" << t.token << "  " << t.series.to_string() << "\n";
    }
  } else if (cmd == "theta-lattice") {
    if (o.lattice.empty())
      throw ParseError("--lattice is required");
    const json lj = load(o.lattice);
    const RationalLattice l = jio::lattice_from(lj);
    const RationalVector shift =
        lj.contains("shift") ? jio::vector_from(lj.at("shift")) : RationalVector(l.rank(), Rational(0));
    const LatticeCoset c(l, shift);
    const auto u = parse_vector(o.u, l.rank()), v = parse_vector(o.v, l.rank());
    series_or_eval(o, theta_with_characteristics(c, u, v, order), theta_budget(l, std::nullopt));
  } else if (cmd == "trace") {
    ThetaTask t = require_task(o);
    t.u.assign(t.u.size(), Rational(0));
    t.v.assign(t.v.size(), Rational(0));
    series_or_eval(o, trace_function(t.module, t.insertion, t.order), z_theta_budget(t));
  } else if (cmd == "ztheta") {
    ThetaTask t = require_task(o);
    const QSeries z = z_theta(t);
    if (o.oracle) {
      const Rational cap = parse_rational(o.cap);
      const QSeries brute = z_theta_bruteforce(t, cap);
      const Rational common = std::min(*brute.trunc(), z.trunc() ? *z.trunc() : *brute.trunc());
      if (truncate(brute, common) != truncate(z, common))
        throw OracleMismatch("closed form and brute-force trace differ below " + to_string(common) + ":\n  " +
                             truncate(z, common).to_string() + "\n  " + truncate(brute, common).to_string());
      std::cerr << "oracle agrees below q^" << to_string(common) << "\n";
    }
    series_or_eval(o, z, z_theta_budget(t));
  } else if (cmd == "xtrace") {
    const ThetaTask t = require_task(o);
    series_or_eval(o, x_trace(t), x_trace_budget(t));
  } else if (cmd == "st-matrices") {
    const RationalLattice l = require_lattice(o);
    const STMatrices st = s_t_matrices(l, order, o.tol);
    if (o.format == "json") {
      json reps = json::array(), t = json::array();
      for (const auto &r : st.reps)
        reps.push_back(jio::to_json(r));
      for (const auto &c : st.t_exact)
        t.push_back(c.to_string());
      std::cout << json{{"classes", reps},         {"T_exact", t},
                        {"S", jio::to_json(st.S)}, {"T", jio::to_json(st.T)},
                        {"fit_residual", jio::decimal(st.fit_residual)},
                        {"candidate_gap", jio::decimal(st.candidate_gap)}}
                       .dump(2)
                << "\n";
    } else {
      for (std::size_t i = 0; i < st.reps.size(); ++i)
        std::cout << "class " << to_string(st.reps[i]) << "  T = " << st.t_exact[i].to_string() << "\n";
      print_matrix("S (fitted)", st.S);
      print_matrix("T (fitted)", st.T);
      std::cout << "fit residual " << jio::decimal(st.fit_residual) << ", gap to Gauss candidate "
                << jio::decimal(st.candidate_gap) << "\n";
    }
  } else if (cmd == "verify") {
    return cmd_verify(o);
  } else if (cmd == "decompose") {
    if (o.frame.empty())
      throw ParseError("--frame is required");
    const CosetFrame f = jio::frame_from(load(o.frame));
    const auto classes = theta_decompose(f, o.module, order);
    const QSeries x = x_trace(ThetaTask{f.module(o.module), Insertion::vacuum(), {}, {}, order});
    const bool exact = reassemble(classes) == x;
    if (o.format == "json") {
      json arr = json::array();
      for (const auto &c : classes)
        arr.push_back({{"mu", jio::to_json(c.mu)},
                       {"theta", jio::to_json(c.theta)},
                       {"ch", jio::to_json(c.ch)},
                       {"class_sum", jio::to_json(c.class_sum)}});
      std::cout << json{{"classes", arr}, {"reassembly_exact", exact}}.dump() << "\n";
    } else {
      for (const auto &c : classes)
        std::cout << "class " << to_string(c.mu) << "\n  theta = " << c.theta.to_string()
                  << "\n  ch    = " << c.ch.to_string() << "\n";
      std::cout << "reassembly " << (exact ? "exact" : "MISMATCH") << "\n";
    }
    return exact ? 0 : 1;
  } else if (cmd == "probe-closure") {
    if (o.frame.empty())
      throw ParseError("--frame is required");
    const CosetFrame f = jio::frame_from(load(o.frame));
    const ClosureProbe p = s_closure_probe(f, order, sample_taus(o.samples));
    if (o.format == "json")
      std::cout << json{{"classes", p.classes},
                        {"residual", jio::decimal(p.residual)},
                        {"condition", jio::decimal(p.condition)},
                        {"tail_heuristic", jio::decimal(p.tail)},
                        {"matrix", jio::to_json(p.matrix)}}
                       .dump(2)
                << "\n";
    else {
      std::cout << "classes " << p.classes << ", residual " << jio::decimal(p.residual) << ", condition "
                << jio::decimal(p.condition) << " (report only)\n";
      print_matrix("fitted S on ch", p.matrix);
    }
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Theta functions, trace functions and modular checks for lattice vertex algebras"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App *sc) {
    sc->add_option("--order", o.order, "truncation order (rational, default 100)");
    sc->add_option("--tau,--tau-list", o.taus, "evaluation point(s): i, 2i, 1/3+i, re,im; ';' separates several");
    sc->add_flag("--eval", o.eval, "evaluate at --tau instead of printing the expansion");
    sc->add_option("--tol", o.tol, "tolerance")->capture_default_str();
    sc->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sc->add_option("--max-den", o.max_den, "exponent denominator cap");
    sc->add_option("--jobs", o.jobs, "parallel verification jobs")->capture_default_str();
  };

  auto *eta = app.add_subcommand("eta", "Dedekind eta expansion");
  common(eta);
  auto *eis = app.add_subcommand("eisenstein", "normalized Eisenstein series E_k");
  common(eis);
  eis->add_option("--weight", o.weight, "even weight >= 4")->capture_default_str();
  auto *wp = app.add_subcommand("wp", "Weierstrass function wp_k");
  common(wp);
  wp->add_option("--k", o.wp_k, "index k >= 1")->capture_default_str();
  wp->add_option("--z-order", o.z_order, "highest power of z kept")->capture_default_str();
  wp->add_option("--z", o.z, "elliptic variable for --eval")->capture_default_str();

  auto *theta = app.add_subcommand("theta-lattice", "theta series with characteristics of a lattice coset");
  common(theta);
  theta->add_option("--lattice", o.lattice, "lattice JSON (file or inline)");
  theta->add_option("--u", o.u, "characteristic u, comma separated");
  theta->add_option("--v", o.v, "characteristic v, comma separated");

  auto *trace = app.add_subcommand("trace", "trace function of a task's module and insertion");
  auto *zt = app.add_subcommand("ztheta", "generalized theta function of a task");
  auto *xt = app.add_subcommand("xtrace", "eta^d times the generalized theta function");
  for (auto *sc : {trace, zt, xt}) {
    common(sc);
    sc->add_option("--task", o.task, "task JSON (file or inline)")->required();
  }
  zt->add_flag("--oracle", o.oracle, "cross-check against the brute-force Fock trace");
  zt->add_option("--cap", o.cap, "energy cap for --oracle")->capture_default_str();

  auto *st = app.add_subcommand("st-matrices", "fitted and Gauss-sum S/T matrices of an even lattice");
  common(st);
  st->add_option("--lattice", o.lattice, "lattice JSON (file or inline)")->required();

  auto *ver = app.add_subcommand("verify", "transformation-law checks; exit 1 if any fails");
  common(ver);
  ver->add_option("--law", o.law, "eta|eisenstein|wp|main|corollary|coset-T|coset-S|zhu")->required();
  ver->add_option("--rho", o.rho, "SL2 elements: words (S,T,ST) or a,b,c,d; ';' separates")->capture_default_str();
  ver->add_option("--k", o.ks, "weights (eisenstein) or indices (wp)");
  ver->add_option("--z", o.z, "elliptic variable for wp")->capture_default_str();
  ver->add_option("--task", o.task, "task JSON for main/zhu");
  ver->add_option("--lattice", o.lattice, "lattice JSON for corollary");
  ver->add_option("--frame", o.frame, "frame JSON for coset laws");
  ver->add_option("--module", o.module, "module index in the frame")->capture_default_str();
  ver->add_option("--u", o.u, "characteristic u");
  ver->add_option("--v", o.v, "characteristic v");
  ver->add_option("--b", o.b, "Cartan vector b for zhu (default e_1)");
  ver->add_option("--a", o.a, "Cartan vector a1 for zhu (default b)");
  ver->get_option("--format")->default_str("json");

  auto *dec = app.add_subcommand("decompose", "split a frame module into theta_{K+mu} * ch_mu");
  common(dec);
  dec->add_option("--frame", o.frame, "frame JSON (file or inline)")->required();
  dec->add_option("--module", o.module, "module index")->capture_default_str();

  auto *probe = app.add_subcommand("probe-closure", "exploratory S-closure fit of the coset characters");
  common(probe);
  probe->add_option("--frame", o.frame, "frame JSON (file or inline)")->required();
  probe->add_option("--samples", o.samples, "number of sample points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }
  if (ver->parsed() && std::find(argv, argv + argc, std::string("--format")) == argv + argc)
    o.format = "json";

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run(cmd, o);
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const TailBoundExceeded &e) {
    std::cerr << "tail bound exceeded: " << e.what() << "\n";
    return 3;
  } catch (const OracleMismatch &e) {
    std::cerr << "oracle mismatch: " << e.what() << "\n";
    return 4;
  } catch (const BasisTooLarge &e) {
    std::cerr << "basis too large: " << e.what() << "\n";
    return 5;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  }
}
