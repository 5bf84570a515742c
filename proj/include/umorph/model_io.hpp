#pragma once

#include <optional>
#include <string>
#include <vector>

#include "umorph/classify.hpp"
#include "umorph/morphology.hpp"
#include "umorph/selftrain.hpp"

namespace umorph {

// Text model container: header line "UMORPH-MODEL v1" followed by
// optional [morph], [classifier] (repeated for one-vs-all members, each
// carrying a `target` line) and [calibration] sections. Counts are
// written with shortest-round-trip formatting so load(save(m)) is
// bit-exact. Unknown sections are rejected by name.
struct SavedClassifier {
  std::string feature;  // "umorph" | "ngram3" | "ngram4"
  std::optional<std::string> target;
  ClassModel model;
};

struct SavedModel {
  std::optional<MorphModel> morph;
  std::vector<SavedClassifier> classifiers;
  std::optional<CalibrationTable> calibration;
};

std::string serialize_model(const SavedModel& model);
SavedModel parse_model(const std::string& text);

void save_model(const SavedModel& model, const std::string& path);
SavedModel load_model(const std::string& path);

}  // namespace umorph
