#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace umorph {

// Unigram morph lexicon induced by an MDL objective. `counts` holds only
// positive entries; `total_tokens` is their sum (the N in count/N).
// `char_counts` are corpus character frequencies; the per-character code
// lengths used by the lexicon cost come from them via add-one smoothing
// (rebuild_char_costs) so a reloaded model reproduces costs exactly.
struct MorphModel {
  std::map<std::string, long long> counts;
  long long total_tokens = 0;
  double alpha = 1.0;
  std::map<std::string, long long> char_counts;

  // Derived: -ln p(char) per code point unit, plus the end-of-morph symbol.
  std::unordered_map<std::string, double> char_costs;
  double end_cost = 0.0;

  void rebuild_char_costs();
};

struct Segmentation {
  std::vector<std::string> morphs;
  double cost = 0.0;
};

// -sum over tokens of ln(count(m)/N). Every morph must be in the model.
double corpus_cost(const MorphModel& model,
                   const std::vector<Segmentation>& segmentations);

// Each lexicon entry priced by spelling it out: sum of per-character code
// lengths plus the end-of-morph symbol. The lexicon is a set.
double lexicon_cost(const MorphModel& model);

// alpha * corpus_cost + lexicon_cost.
double total_cost(const MorphModel& model,
                  const std::vector<Segmentation>& segmentations);

// Code length of spelling one morph (characters + end symbol).
double spell_cost(const MorphModel& model, std::string_view morph);

// Minimum-cost segmentation restricted to lexicon morphs. Characters with
// no lexicon entry fall back to single-character morphs at a floor
// probability of 1/(N + |lexicon| + 1). Ties: fewer morphs, then
// lexicographically smallest morph sequence.
Segmentation viterbi_segment_closed(const MorphModel& model,
                                    std::string_view word);

// As closed, but substrings absent from the lexicon are priced by
// `new_morph_cost` so the trainer can weigh adding them.
using NewMorphCost = std::function<double(const std::string&)>;
Segmentation viterbi_segment_open(const MorphModel& model,
                                  std::string_view word,
                                  const NewMorphCost& new_morph_cost);

// Default proposal price: spell_cost(m) + ln(N + 1).
NewMorphCost default_new_morph_cost(const MorphModel& model);

struct MorphTrainOptions {
  double alpha = 1.0;
  int max_epochs = 10;
  double convergence_tol = 1e-4;
  std::uint64_t seed = 0;
  // observes (epoch, total_cost) after every epoch; epoch 0 is the
  // initial whole-name state
  std::function<void(int, double)> on_epoch;
};

struct MorphTrainResult {
  MorphModel model;
  double final_cost = 0.0;
  int epochs_run = 0;
};

// Iterative MDL induction over distinct encoded usernames (type-based):
// start with whole names as morphs, re-segment each type in open mode,
// keep the new segmentation only when it lowers the total cost.
// Deterministic given (corpus, alpha, seed); total cost never increases.
MorphTrainResult train_morph(const std::vector<std::string>& corpus,
                             const MorphTrainOptions& options);

// Grid search: lower eval_fn is better, ties go to the smaller alpha.
double tune_alpha(const std::vector<double>& grid,
                  const std::function<MorphModel(double)>& train_fn,
                  const std::function<double(const MorphModel&)>& eval_fn);

}  // namespace umorph
