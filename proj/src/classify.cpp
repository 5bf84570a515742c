#include "umorph/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace umorph {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log-sum-exp normalization of log_scores into normalized.
void normalize(Posterior& p) {
  double max_log = kNegInf;
  for (const auto& [c, s] : p.log_scores) max_log = std::max(max_log, s);
  double sum = 0.0;
  for (const auto& [c, s] : p.log_scores) sum += std::exp(s - max_log);
  double log_z = max_log + std::log(sum);
  for (const auto& [c, s] : p.log_scores) p.normalized[c] = std::exp(s - log_z);
}

double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

}  // namespace

ClassModel train_classifier_soft(const std::vector<Example>& hard,
                                 const std::vector<SoftExample>& soft,
                                 std::optional<double> beta) {
  ClassModel model;
  for (const auto& ex : hard) {
    if (ex.features.empty())
      throw std::invalid_argument("train_classifier: empty feature list");
    model.prior_counts[ex.label] += 1.0;
    auto& counts = model.feature_counts[ex.label];
    for (const auto& f : ex.features) {
      counts[f] += 1.0;
      model.class_totals[ex.label] += 1.0;
      model.vocab.insert(f);
    }
  }
  for (const auto& ex : soft) {
    if (ex.features.empty())
      throw std::invalid_argument("train_classifier: empty feature list");
    for (const auto& [cls, w] : ex.class_weights) {
      if (w <= 0.0) continue;
      model.prior_counts[cls] += w;
      auto& counts = model.feature_counts[cls];
      for (const auto& f : ex.features) {
        counts[f] += w;
        model.class_totals[cls] += w;
        model.vocab.insert(f);
      }
    }
  }
  if (model.prior_counts.size() < 2)
    throw std::invalid_argument(
        "train_classifier: need at least two classes");
  for (const auto& [c, n] : model.prior_counts) model.classes.push_back(c);
  model.beta = beta.value_or(
      static_cast<double>(hard.size() + soft.size()));
  if (model.beta <= 0.0)
    throw std::invalid_argument("train_classifier: beta must be > 0");
  return model;
}

ClassModel train_classifier(const std::vector<Example>& examples,
                            std::optional<double> beta) {
  return train_classifier_soft(examples, {}, beta);
}

double smoothed_prob(const ClassModel& model, const std::string& morph,
                     const std::string& cls) {
  if (!model.vocab.count(morph))
    throw std::invalid_argument("smoothed_prob: feature not in vocabulary");
  auto tot = model.class_totals.find(cls);
  if (tot == model.class_totals.end())
    throw std::invalid_argument("smoothed_prob: unknown class");
  double z = model.beta + static_cast<double>(model.vocab.size());
  if (tot->second <= 0.0) return 1.0 / static_cast<double>(model.vocab.size());
  double n_mc = 0.0;
  auto fc = model.feature_counts.find(cls);
  if (fc != model.feature_counts.end()) {
    auto it = fc->second.find(morph);
    if (it != fc->second.end()) n_mc = it->second;
  }
  return (1.0 + model.beta * n_mc / tot->second) / z;
}

Posterior log_posterior(const ClassModel& model,
                        const std::vector<std::string>& features) {
  double prior_total = 0.0;
  for (const auto& [c, n] : model.prior_counts) prior_total += n;
  Posterior post;
  for (const auto& c : model.classes) {
    double score = std::log(model.prior_counts.at(c) / prior_total);
    for (const auto& f : features) {
      if (!model.vocab.count(f)) continue;  // OOV: dropped
      score += std::log(smoothed_prob(model, f, c));
    }
    post.log_scores[c] = score;
  }
  normalize(post);
  return post;
}

std::string argmax_class(const ClassModel& model, const Posterior& posterior) {
  const std::string* best = nullptr;
  double best_score = kNegInf;
  for (const auto& c : model.classes) {
    double s = posterior.log_scores.at(c);
    if (best == nullptr || s > best_score) {
      best = &c;
      best_score = s;
    }
  }
  return *best;
}

std::string classify(const ClassModel& model,
                     const std::vector<std::string>& features) {
  return argmax_class(model, log_posterior(model, features));
}

std::map<std::string, ClassModel> train_one_vs_all(
    const std::vector<Example>& examples, std::optional<double> beta) {
  std::set<std::string> classes;
  for (const auto& ex : examples) classes.insert(ex.label);
  if (classes.size() < 2)
    throw std::invalid_argument("train_one_vs_all: need at least two classes");
  std::map<std::string, ClassModel> models;
  for (const auto& target : classes) {
    std::vector<Example> binary;
    binary.reserve(examples.size());
    for (const auto& ex : examples)
      binary.push_back({ex.label == target ? target : kRestLabel,
                        ex.features});
    ClassModel m = train_classifier(binary, beta);
    // target first so exact ties resolve toward the target class
    m.classes = {target, kRestLabel};
    models.emplace(target, std::move(m));
  }
  return models;
}

Posterior one_vs_all_posterior(const std::map<std::string, ClassModel>& models,
                               const std::vector<std::string>& features) {
  if (models.empty())
    throw std::invalid_argument("one_vs_all_posterior: no models");
  Posterior post;
  for (const auto& [target, model] : models) {
    Posterior binary = log_posterior(model, features);
    post.log_scores[target] = safe_log(binary.normalized.at(target));
  }
  normalize(post);
  return post;
}

Posterior combine(const Posterior& p1, const Posterior& p2) {
  if (p1.normalized.size() != p2.normalized.size())
    throw std::invalid_argument("combine: class sets differ");
  Posterior out;
  for (const auto& [c, v1] : p1.normalized) {
    auto it = p2.normalized.find(c);
    if (it == p2.normalized.end())
      throw std::invalid_argument("combine: class sets differ");
    out.log_scores[c] = 0.5 * (safe_log(v1) + safe_log(it->second));
  }
  normalize(out);
  return out;
}

}  // namespace umorph
