#include "umorph/ngrams.hpp"

#include <stdexcept>

#include "umorph/utf8.hpp"

namespace umorph {

std::vector<std::string> extract_ngrams(std::string_view username,
                                        const NgramConfig& config) {
  if (username.empty())
    throw std::invalid_argument("extract_ngrams: empty username");
  if (config.n < 2) throw std::invalid_argument("extract_ngrams: n must be >= 2");
  std::vector<std::string> units = utf8_units(username);
  units.insert(units.begin(), config.pad);
  units.push_back(config.pad);
  std::vector<std::string> out;
  auto n = static_cast<std::size_t>(config.n);
  if (units.size() < n) return out;
  out.reserve(units.size() - n + 1);
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string g;
    for (std::size_t k = 0; k < n; ++k) g += units[i + k];
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace umorph
