#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "umorph/morphology.hpp"
#include "umorph/ngrams.hpp"

namespace umorph {

enum class FeatureKind { UMorph, Ngram3, Ngram4 };

inline FeatureKind feature_kind_from_name(std::string_view name) {
  if (name == "umorph") return FeatureKind::UMorph;
  if (name == "ngram3") return FeatureKind::Ngram3;
  if (name == "ngram4") return FeatureKind::Ngram4;
  throw std::invalid_argument("unknown feature kind: " + std::string(name));
}

inline std::string feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::UMorph: return "umorph";
    case FeatureKind::Ngram3: return "ngram3";
    default: return "ngram4";
  }
}

// Featurize one encoded username. `morph_model` is required for UMorph.
inline std::vector<std::string> extract_features(std::string_view encoded,
                                                 FeatureKind kind,
                                                 const MorphModel* morph_model) {
  switch (kind) {
    case FeatureKind::UMorph:
      if (!morph_model)
        throw std::invalid_argument("u-morph features need a morph model");
      return viterbi_segment_closed(*morph_model, encoded).morphs;
    case FeatureKind::Ngram3:
      return extract_ngrams(encoded, {3, "#"});
    default:
      return extract_ngrams(encoded, {4, "#"});
  }
}

}  // namespace umorph
