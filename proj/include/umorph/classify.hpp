#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace umorph {

struct Example {
  std::string label;
  std::vector<std::string> features;
};

// Fractional per-class weights, used by the self-training M-step.
struct SoftExample {
  std::vector<std::string> features;
  std::map<std::string, double> class_weights;
};

// Class-conditional unigram model with count-normalizing smoothing
//   p(m|c) = (1 + beta * n(m,c) / n(c)) / Z,  Z = beta + |M|.
// Counts are doubles because the self-training M-step contributes
// fractional counts; supervised training keeps them integral.
struct ClassModel {
  std::vector<std::string> classes;
  std::map<std::string, double> prior_counts;
  std::map<std::string, std::map<std::string, double>> feature_counts;
  std::map<std::string, double> class_totals;
  std::set<std::string> vocab;
  double beta = 0.0;
};

struct Posterior {
  std::map<std::string, double> log_scores;
  std::map<std::string, double> normalized;
};

// beta defaults to the number of training examples.
ClassModel train_classifier(const std::vector<Example>& examples,
                            std::optional<double> beta = std::nullopt);

// Shared accumulation path for hard and fractional counts. The effective
// example count for the default beta is |hard| + |soft|.
ClassModel train_classifier_soft(const std::vector<Example>& hard,
                                 const std::vector<SoftExample>& soft,
                                 std::optional<double> beta = std::nullopt);

double smoothed_prob(const ClassModel& model, const std::string& morph,
                     const std::string& cls);

// Features outside the vocabulary are dropped (their smoothed probability
// 1/Z is class independent, so the argmax is unchanged). When every
// feature is out of vocabulary the posterior equals the prior.
Posterior log_posterior(const ClassModel& model,
                        const std::vector<std::string>& features);

// Argmax of the posterior; ties go to the earlier class in model.classes.
std::string classify(const ClassModel& model,
                     const std::vector<std::string>& features);

std::string argmax_class(const ClassModel& model, const Posterior& posterior);

inline const std::string kRestLabel = "__rest__";

// One binary (target vs kRestLabel) model per class.
std::map<std::string, ClassModel> train_one_vs_all(
    const std::vector<Example>& examples,
    std::optional<double> beta = std::nullopt);

// Multiclass posterior from one-vs-all models: each class is scored by the
// log of its binary model's normalized target probability, renormalized.
Posterior one_vs_all_posterior(const std::map<std::string, ClassModel>& models,
                               const std::vector<std::string>& features);

// Equal-weight average of posterior log-probabilities, renormalized.
Posterior combine(const Posterior& p1, const Posterior& p2);

}  // namespace umorph
