#include "pimsner/scalar.hpp"

#include <cctype>
#include <stdexcept>

namespace pimsner {

mpq_class parse_rational(const std::string& text) {
  std::size_t start = 0;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) start = 1;
  bool slash = false, digits = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (c == '/' && !slash && digits) {
      slash = true;
      digits = false;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
    } else {
      throw std::invalid_argument("not a rational: '" + text + "'");
    }
  }
  if (!digits) throw std::invalid_argument("not a rational: '" + text + "'");
  mpq_class value(text[0] == '+' ? text.substr(1) : text, 10);
  if (slash && value.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  value.canonicalize();
  return value;
}

}  // namespace pimsner
