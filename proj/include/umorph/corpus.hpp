#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace umorph {

struct UsernameRecord {
  std::string raw;
  std::string encoded;
  std::optional<std::string> label;
};

struct DataSplit {
  std::vector<UsernameRecord> train;
  std::vector<UsernameRecord> validation;
  std::vector<UsernameRecord> test;
  std::uint64_t seed = 0;
};

// Lowercases the input and inserts a '$' marker before every uppercase
// character that follows a non-uppercase character, e.g. "JohnDoe" ->
// "john$doe". Leading uppercase and upper->upper runs are unmarked.
// A literal '$' in the input is escaped as "$$".
std::string normalize_case(std::string_view raw);

// Inverse of the marker encoding: strips markers, undoes '$' escaping.
std::string decode_markers(std::string_view encoded);

// File format: UTF-8, LF, one `label<TAB>username` per line, no header.
std::vector<UsernameRecord> load_labeled(const std::string& path);

// One username per line, labels absent. Empty lines are skipped.
std::vector<UsernameRecord> load_unlabeled(const std::string& path);

// Deterministic shuffle-then-slice partition. Ratios must be positive
// and sum to 1 within 1e-9.
DataSplit split_partitions(std::vector<UsernameRecord> records,
                           std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace umorph
