#include "types.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace ruleke {

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

EntityId normalize_entity(std::string_view raw) { return trim(raw); }

Relation normalize_relation(std::string_view raw) {
  std::string t = trim(raw);
  std::string out;
  out.reserve(t.size());
  bool in_space = false;
  for (char c : t) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space) {
      out.push_back('_');
      in_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace ruleke
