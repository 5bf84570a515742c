#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace umorph {

// Splits a UTF-8 string into code point units. Each unit is the byte
// sequence of one code point; malformed bytes are kept as single-byte
// units so no input is ever rejected here.
inline std::vector<std::string> utf8_units(std::string_view s) {
  std::vector<std::string> units;
  units.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (b >= 0xF0)
      len = 4;
    else if (b >= 0xE0)
      len = 3;
    else if (b >= 0xC0)
      len = 2;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    units.emplace_back(s.substr(i, len));
    i += len;
  }
  return units;
}

}  // namespace umorph
