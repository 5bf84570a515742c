#include "umorph/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "umorph/rng.hpp"
#include "umorph/utf8.hpp"

namespace umorph {

double error_rate(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& golds) {
  if (predictions.size() != golds.size())
    throw std::invalid_argument("error_rate: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("error_rate: empty");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] != golds[i]) ++wrong;
  return static_cast<double>(wrong) / predictions.size();
}

ClassMetrics prf1(const std::vector<std::string>& predictions,
                  const std::vector<std::string>& golds,
                  const std::string& cls) {
  if (predictions.size() != golds.size())
    throw std::invalid_argument("prf1: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("prf1: empty");
  long long tp = 0, fp = 0, fn = 0, support = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool p = predictions[i] == cls;
    bool g = golds[i] == cls;
    if (g) ++support;
    if (p && g)
      ++tp;
    else if (p)
      ++fp;
    else if (g)
      ++fn;
  }
  ClassMetrics m;
  m.support = support;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  if (support == 0) {
    m.recall_undefined = true;
    m.recall = 0.0;
  } else {
    m.recall = static_cast<double>(tp) / (tp + fn);
  }
  m.f1 = m.precision + m.recall > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& golds) {
  EvalReport report;
  std::set<std::string> classes(golds.begin(), golds.end());
  classes.insert(predictions.begin(), predictions.end());
  long long tp = 0, fp = 0, fn = 0;
  for (const auto& cls : classes) {
    ClassMetrics m = prf1(predictions, golds, cls);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      bool p = predictions[i] == cls;
      bool g = golds[i] == cls;
      if (p && g)
        ++tp;
      else if (p)
        ++fp;
      else if (g)
        ++fn;
    }
    report.per_class.emplace(cls, m);
  }
  auto k = static_cast<double>(classes.size());
  report.macro_precision /= k;
  report.macro_recall /= k;
  report.macro_f1 /= k;
  report.micro_precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  report.micro_recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  report.micro_f1 =
      report.micro_precision + report.micro_recall > 0
          ? 2.0 * report.micro_precision * report.micro_recall /
                (report.micro_precision + report.micro_recall)
          : 0.0;
  report.error = error_rate(predictions, golds);
  return report;
}

std::map<std::string, std::vector<std::pair<std::string, double>>>
rank_features(const ClassModel& model, int top_k) {
  std::map<std::string, std::vector<std::pair<std::string, double>>> out;
  double z = model.beta + static_cast<double>(model.vocab.size());
  for (const auto& cls : model.classes) {
    // pool the other classes into a "rest" count table
    double rest_total = 0.0;
    for (const auto& [c, t] : model.class_totals)
      if (c != cls) rest_total += t;
    double cls_total = model.class_totals.at(cls);
    const auto& cls_counts = model.feature_counts.at(cls);

    struct Entry {
      std::string morph;
      double ratio;
      double count;
    };
    std::vector<Entry> entries;
    entries.reserve(model.vocab.size());
    for (const auto& m : model.vocab) {
      double n_c = 0.0;
      auto it = cls_counts.find(m);
      if (it != cls_counts.end()) n_c = it->second;
      double n_rest = 0.0;
      for (const auto& [c, counts] : model.feature_counts) {
        if (c == cls) continue;
        auto jt = counts.find(m);
        if (jt != counts.end()) n_rest += jt->second;
      }
      double p_c = (1.0 + model.beta * (cls_total > 0 ? n_c / cls_total : 0.0)) / z;
      double p_rest =
          (1.0 + model.beta * (rest_total > 0 ? n_rest / rest_total : 0.0)) / z;
      entries.push_back({m, p_c / p_rest, n_c});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                if (a.ratio != b.ratio) return a.ratio > b.ratio;
                if (a.count != b.count) return a.count > b.count;
                return a.morph < b.morph;
              });
    auto& ranked = out[cls];
    for (std::size_t i = 0;
         i < entries.size() && i < static_cast<std::size_t>(top_k); ++i)
      ranked.emplace_back(entries[i].morph, entries[i].ratio);
  }
  return out;
}

namespace {

// internal boundary positions (in code point units) of a segmentation
std::set<std::size_t> boundaries(const std::vector<std::string>& morphs) {
  std::set<std::size_t> out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i + 1 < morphs.size(); ++i) {
    pos += utf8_units(morphs[i]).size();
    out.insert(pos);
  }
  return out;
}

std::string concat(const std::vector<std::string>& morphs) {
  std::string s;
  for (const auto& m : morphs) s += m;
  return s;
}

}  // namespace

BoundaryScore boundary_f1(
    const std::vector<std::vector<std::string>>& predicted,
    const std::vector<std::vector<std::string>>& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("boundary_f1: size mismatch");
  long long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (concat(predicted[i]) != concat(gold[i]))
      throw std::invalid_argument(
          "boundary_f1: segmentations cover different strings");
    auto pb = boundaries(predicted[i]);
    auto gb = boundaries(gold[i]);
    for (auto b : pb)
      gb.count(b) ? ++tp : ++fp;
    for (auto b : gb)
      if (!pb.count(b)) ++fn;
  }
  BoundaryScore s;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
  s.f1 = s.precision + s.recall > 0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

namespace {

void validate(const SynthConfig& c) {
  if (c.lexicon_size <= 0 || c.morph_len_min <= 0 ||
      c.morph_len_max < c.morph_len_min || c.num_classes < 2 ||
      c.exclusive_per_class < 0 || c.morphs_per_name_min <= 0 ||
      c.morphs_per_name_max < c.morphs_per_name_min || c.corpus_size <= 0 ||
      c.zipf_exponent < 0.0)
    throw std::invalid_argument("generate_synthetic: invalid config");
  if (c.num_classes * c.exclusive_per_class > c.lexicon_size)
    throw std::invalid_argument(
        "generate_synthetic: exclusive morphs exceed lexicon size");
  if (!c.class_priors.empty()) {
    if (static_cast<int>(c.class_priors.size()) != c.num_classes)
      throw std::invalid_argument(
          "generate_synthetic: priors/classes size mismatch");
    for (double p : c.class_priors)
      if (p <= 0.0)
        throw std::invalid_argument("generate_synthetic: priors must be > 0");
  }
}

std::size_t sample_cdf(const std::vector<double>& weights,
                       std::mt19937_64& rng) {
  double u = unit_real(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  SynthCorpus corpus;

  // distinct hidden morphs of random length over a-z
  std::set<std::string> seen;
  while (static_cast<int>(corpus.lexicon.size()) < config.lexicon_size) {
    auto len = static_cast<std::size_t>(
        config.morph_len_min +
        bounded(rng, config.morph_len_max - config.morph_len_min + 1));
    std::string m;
    for (std::size_t i = 0; i < len; ++i)
      m += static_cast<char>('a' + bounded(rng, 26));
    if (seen.insert(m).second) corpus.lexicon.push_back(m);
  }

  corpus.priors = config.class_priors;
  if (corpus.priors.empty())
    corpus.priors.assign(config.num_classes, 1.0 / config.num_classes);
  double prior_sum = 0.0;
  for (double p : corpus.priors) prior_sum += p;
  for (double& p : corpus.priors) p /= prior_sum;

  // class i draws from its exclusive block plus the shared tail, with
  // Zipf weights over a per-class shuffle of that set
  int excl = config.exclusive_per_class;
  std::vector<std::vector<std::string>> allowed(config.num_classes);
  std::vector<std::vector<double>> weights(config.num_classes);
  for (int c = 0; c < config.num_classes; ++c) {
    for (int i = c * excl; i < (c + 1) * excl; ++i)
      allowed[c].push_back(corpus.lexicon[i]);
    for (int i = config.num_classes * excl; i < config.lexicon_size; ++i)
      allowed[c].push_back(corpus.lexicon[i]);
    deterministic_shuffle(allowed[c], rng);
    double norm = 0.0;
    for (std::size_t r = 0; r < allowed[c].size(); ++r) {
      double w = std::pow(static_cast<double>(r + 1), -config.zipf_exponent);
      weights[c].push_back(w);
      norm += w;
    }
    std::string label = "c" + std::to_string(c);
    auto& probs = corpus.class_morph_probs[label];
    for (std::size_t r = 0; r < allowed[c].size(); ++r) {
      weights[c][r] /= norm;
      probs[allowed[c][r]] = weights[c][r];
    }
  }

  for (int i = 0; i < config.corpus_size; ++i) {
    auto cls = sample_cdf(corpus.priors, rng);
    SynthRecord rec;
    rec.label = "c" + std::to_string(cls);
    auto k = static_cast<std::size_t>(
        config.morphs_per_name_min +
        bounded(rng, config.morphs_per_name_max - config.morphs_per_name_min +
                         1));
    for (std::size_t j = 0; j < k; ++j) {
      const std::string& m = allowed[cls][sample_cdf(weights[cls], rng)];
      rec.gold_morphs.push_back(m);
      rec.name += m;
    }
    corpus.records.push_back(std::move(rec));
  }

  double err = 0.0;
  for (const auto& rec : corpus.records) {
    auto post = synth_posterior(corpus, config, rec.name);
    double best = 0.0;
    for (const auto& [c, p] : post) best = std::max(best, p);
    err += 1.0 - best;
  }
  corpus.bayes_error = err / corpus.records.size();
  return corpus;
}

std::map<std::string, double> synth_posterior(const SynthCorpus& corpus,
                                              const SynthConfig& config,
                                              const std::string& name) {
  std::size_t n = name.size();
  int kmin = config.morphs_per_name_min;
  int kmax = config.morphs_per_name_max;
  double p_k = 1.0 / (kmax - kmin + 1);
  std::map<std::string, double> joint;
  double total = 0.0;
  for (int cls = 0; cls < config.num_classes; ++cls) {
    std::string label = "c" + std::to_string(cls);
    const auto& probs = corpus.class_morph_probs.at(label);
    // f[j][k] = total probability of decomposing name[0..j) into k morphs
    std::vector<std::vector<double>> f(
        n + 1, std::vector<double>(kmax + 1, 0.0));
    f[0][0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
      for (int len = config.morph_len_min;
           len <= config.morph_len_max && static_cast<std::size_t>(len) <= j;
           ++len) {
        auto it = probs.find(name.substr(j - len, len));
        if (it == probs.end()) continue;
        for (int k = 1; k <= kmax; ++k)
          if (f[j - len][k - 1] > 0.0)
            f[j][k] += f[j - len][k - 1] * it->second;
      }
    }
    double likelihood = 0.0;
    for (int k = kmin; k <= kmax; ++k) likelihood += p_k * f[n][k];
    double j_p = corpus.priors[cls] * likelihood;
    joint[label] = j_p;
    total += j_p;
  }
  if (total <= 0.0)
    throw std::invalid_argument("synth_posterior: name has no decomposition");
  for (auto& [c, p] : joint) p /= total;
  return joint;
}

}  // namespace umorph
