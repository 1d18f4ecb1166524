#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace voatheta {

/// Element (a b; c d) of SL2(Z).
struct SL2 {
  long a = 1, b = 0, c = 0, d = 1;

  static SL2 identity() { return {}; }
  static SL2 S() { return {0, -1, 1, 0}; }
  static SL2 T() { return {1, 1, 0, 1}; }
  /// Accepts "I", words in S and T such as "ST", or "a,b,c,d".
  static SL2 parse(const std::string &text);

  SL2 operator*(const SL2 &o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const SL2 &o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }

  std::complex<double> apply(std::complex<double> tau) const {
    return (static_cast<double>(a) * tau + static_cast<double>(b)) /
           (static_cast<double>(c) * tau + static_cast<double>(d));
  }
  std::complex<double> automorphy(std::complex<double> tau) const {
    return static_cast<double>(c) * tau + static_cast<double>(d);
  }
  std::string to_string() const;
};

/// Short scientific form for messages, e.g. "3.2e-12".
std::string format_double(double x);

/// Outcome of one transformation-law check.
struct TransformReport {
  std::string law;
  SL2 rho;
  std::complex<double> tau;
  std::complex<double> lhs, rhs;
  double residual = 0;
  double tail_budget = 0;
  double tolerance = 0;
  Eigen::MatrixXcd matrix_used;
  std::string note;

  bool pass() const { return residual + tail_budget < tolerance; }
};

} // namespace voatheta
