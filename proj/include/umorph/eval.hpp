#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "umorph/classify.hpp"

namespace umorph {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;
  // class absent from golds: recall reported as 0 with this flag set
  bool recall_undefined = false;
};

struct EvalReport {
  std::map<std::string, ClassMetrics> per_class;
  // micro = pooled over all users (equals accuracy for single-label
  // multiclass); macro = unweighted mean of per-class metrics
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double error = 0.0;
};

double error_rate(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& golds);

ClassMetrics prf1(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& golds,
                  const std::string& cls);

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& golds);

// Per class, morphs sorted by descending likelihood ratio
// smoothed_prob(m, c) / smoothed_prob(m, rest); ties by higher count in c
// then lexicographic. "rest" pools the counts of the other classes under
// the same beta and vocabulary.
std::map<std::string, std::vector<std::pair<std::string, double>>>
rank_features(const ClassModel& model, int top_k);

struct BoundaryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged P/R/F1 over internal boundary positions. Both sides must
// segment the same strings in the same order.
BoundaryScore boundary_f1(
    const std::vector<std::vector<std::string>>& predicted,
    const std::vector<std::vector<std::string>>& gold);

struct SynthConfig {
  int lexicon_size = 12;
  int morph_len_min = 3;
  int morph_len_max = 6;
  int num_classes = 2;
  double zipf_exponent = 1.0;
  // the first num_classes * exclusive_per_class lexicon entries are
  // class-exclusive; the remainder is shared by every class
  int exclusive_per_class = 3;
  int morphs_per_name_min = 2;
  int morphs_per_name_max = 4;
  int corpus_size = 5000;
  std::vector<double> class_priors;  // empty = uniform
  std::uint64_t seed = 0;
};

struct SynthRecord {
  std::string label;
  std::string name;
  std::vector<std::string> gold_morphs;
};

struct SynthCorpus {
  std::vector<SynthRecord> records;
  std::vector<std::string> lexicon;
  // class -> morph -> sampling probability (absent = disallowed)
  std::map<std::string, std::map<std::string, double>> class_morph_probs;
  std::vector<double> priors;  // aligned with class ids c0..c{K-1}
  // mean of (1 - max-class posterior) under the exact generative
  // posterior, enumerated per name over all lexicon decompositions
  double bayes_error = 0.0;
};

SynthCorpus generate_synthetic(const SynthConfig& config);

// Exact generative posterior p(class | name) for a synthetic corpus.
std::map<std::string, double> synth_posterior(const SynthCorpus& corpus,
                                              const SynthConfig& config,
                                              const std::string& name);

}  // namespace umorph
