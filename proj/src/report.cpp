#include "voatheta/report.hpp"

#include "voatheta/errors.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace voatheta {

SL2 SL2::parse(const std::string &text) {
  if (text.empty() || text == "I" || text == "identity")
    return identity();
  if (text.find(',') != std::string::npos) {
    std::vector<long> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stol(item, &used));
        if (used != item.size())
          throw ParseError("");
      } catch (const std::exception &) {
        throw ParseError("malformed SL2 entry '" + item + "'");
      }
    }
    if (v.size() != 4)
      throw ParseError("SL2 element needs four entries: " + text);
    SL2 r{v[0], v[1], v[2], v[3]};
    if (r.a * r.d - r.b * r.c != 1)
      throw ParseError("determinant of " + text + " is not 1");
    return r;
  }
  SL2 r;
  for (char ch : text) {
    if (ch == 'S')
      r = r * S();
    else if (ch == 'T')
      r = r * T();
    else
      throw ParseError("SL2 word may only contain S and T: " + text);
  }
  return r;
}

std::string SL2::to_string() const {
  std::ostringstream os;
  os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
  return os.str();
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

} // namespace voatheta
