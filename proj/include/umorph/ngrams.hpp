#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace umorph {

struct NgramConfig {
  int n = 3;
  std::string pad = "#";
};

// Overlapping character n-grams with one pad symbol at each end,
// e.g. ("abc", n=3) -> ["#ab", "abc", "bc#"]. Operates on code point
// units, so multi-byte characters count as one position.
std::vector<std::string> extract_ngrams(std::string_view username,
                                        const NgramConfig& config);

}  // namespace umorph
