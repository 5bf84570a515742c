#include "umorph/corpus.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "umorph/rng.hpp"

namespace umorph {

namespace {

bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

char ascii_lower(char c) {
  return ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::string normalize_case(std::string_view raw) {
  if (raw.empty()) throw std::invalid_argument("normalize_case: empty input");
  std::string out;
  out.reserve(raw.size() + 4);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '$') {
      out += "$$";
      continue;
    }
    if (ascii_upper(c)) {
      if (i > 0 && !ascii_upper(raw[i - 1])) out += '$';
      out += ascii_lower(c);
    } else {
      out += c;
    }
  }
  return out;
}

std::string decode_markers(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '$') {
      if (i + 1 < encoded.size() && encoded[i + 1] == '$') {
        out += '$';
        ++i;
      }
      // bare marker: dropped
    } else {
      out += encoded[i];
    }
  }
  return out;
}

std::vector<UsernameRecord> load_labeled(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<UsernameRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 >= line.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected label<TAB>username");
    UsernameRecord rec;
    rec.label = line.substr(0, tab);
    rec.raw = line.substr(tab + 1);
    rec.encoded = normalize_case(rec.raw);
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw std::runtime_error("read error: " + path);
  return records;
}

std::vector<UsernameRecord> load_unlabeled(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<UsernameRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    UsernameRecord rec;
    rec.raw = line;
    rec.encoded = normalize_case(rec.raw);
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw std::runtime_error("read error: " + path);
  return records;
}

DataSplit split_partitions(std::vector<UsernameRecord> records,
                           std::array<double, 3> ratios, std::uint64_t seed) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 ||
      std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(
        "split_partitions: ratios must be positive and sum to 1");
  std::mt19937_64 rng(seed);
  deterministic_shuffle(records, rng);
  auto n = records.size();
  auto b1 = static_cast<std::size_t>(std::llround(ratios[0] * n));
  auto b2 = static_cast<std::size_t>(
      std::llround((ratios[0] + ratios[1]) * n));
  if (b1 > n) b1 = n;
  if (b2 < b1) b2 = b1;
  if (b2 > n) b2 = n;
  DataSplit split;
  split.seed = seed;
  split.train.assign(records.begin(), records.begin() + b1);
  split.validation.assign(records.begin() + b1, records.begin() + b2);
  split.test.assign(records.begin() + b2, records.end());
  return split;
}

}  // namespace umorph
