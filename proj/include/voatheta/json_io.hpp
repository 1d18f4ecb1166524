#pragma once

#include "voatheta/conformal_block.hpp"
#include "voatheta/coset.hpp"
#include "voatheta/qseries.hpp"
#include "voatheta/report.hpp"

#include <json.hpp>

#include <complex>
#include <string>

namespace voatheta::json_io {

using nlohmann::json;

// Rationals travel as "p/q" strings; integer JSON numbers are accepted on input.
json to_json(const Rational &r);
Rational rational_from(const json &j);
json to_json(const RationalVector &v);
RationalVector vector_from(const json &j);
json to_json(const RationalMatrix &m);
RationalMatrix matrix_from(const json &j);

/// Complex numbers as ["re", "im"] decimal strings (17 significant digits).
json to_json(std::complex<double> z);
std::complex<double> complex_from(const json &j);
std::string decimal(double x);

/// {"den", "offset", "trunc" (null when exact), "coeffs": [[[c, angle], ...], ...]}.
json to_json(const QSeries &s);
QSeries series_from(const json &j);

/// {"gram": [[...]], "shift": [...] (optional)}.
json lattice_to_json(const RationalLattice &l, const RationalVector &shift = {});
RationalLattice lattice_from(const json &j);

json to_json(const ThetaTask &t);
ThetaTask task_from(const json &j);

json to_json(const CosetFrame &f);
CosetFrame frame_from(const json &j);

json to_json(const TransformReport &r);
json to_json(const Eigen::MatrixXcd &m);

/// Parse a UTF-8 JSON file; ParseError on I/O or syntax errors.
json read_file(const std::string &path);

} // namespace voatheta::json_io
