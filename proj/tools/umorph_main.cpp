#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umorph/corpus.hpp"
#include "umorph/eval.hpp"
#include "umorph/features.hpp"
#include "umorph/model_io.hpp"
#include "umorph/selftrain.hpp"
#include "umorph/textio.hpp"

namespace {

using namespace umorph;

std::string fixed6(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

std::vector<std::string> corpus_encoded(const std::string& path,
                                        bool labeled) {
  std::vector<std::string> out;
  auto records = labeled ? load_labeled(path) : load_unlabeled(path);
  out.reserve(records.size());
  for (auto& r : records) out.push_back(std::move(r.encoded));
  return out;
}

std::vector<Example> featurize_labeled(const std::vector<UsernameRecord>& recs,
                                       FeatureKind kind,
                                       const MorphModel* morph) {
  std::vector<Example> out;
  out.reserve(recs.size());
  for (const auto& r : recs)
    out.push_back({*r.label, extract_features(r.encoded, kind, morph)});
  return out;
}

struct LoadedClassifier {
  SavedModel saved;
  FeatureKind kind;
  const MorphModel* morph = nullptr;

  explicit LoadedClassifier(const std::string& path)
      : saved(load_model(path)) {
    if (saved.classifiers.empty())
      throw std::runtime_error(path + ": model has no classifier section");
    kind = feature_kind_from_name(saved.classifiers.front().feature);
    if (saved.morph) morph = &*saved.morph;
  }

  Posterior score(const std::string& encoded) const {
    auto features = extract_features(encoded, kind, morph);
    if (saved.classifiers.size() == 1 && !saved.classifiers.front().target)
      return log_posterior(saved.classifiers.front().model, features);
    std::map<std::string, ClassModel> ova;
    for (const auto& c : saved.classifiers) {
      if (!c.target)
        throw std::runtime_error("mixed direct/one-vs-all classifier file");
      ova.emplace(*c.target, c.model);
    }
    return one_vs_all_posterior(ova, features);
  }
};

std::pair<std::string, double> best_class(const Posterior& p) {
  std::string cls;
  double conf = -1.0;
  for (const auto& [c, v] : p.normalized)
    if (v > conf) {
      cls = c;
      conf = v;
    }
  return {cls, conf};
}

void print_metric(const std::string& name, const std::string& cls, double v) {
  std::cout << name << "\t" << cls << "\t" << fixed6(v) << "\n";
}

void cmd_train_morph(const std::string& corpus_path, bool labeled,
                     const MorphTrainOptions& options,
                     const std::string& out_path) {
  auto corpus = corpus_encoded(corpus_path, labeled);
  MorphTrainResult result = train_morph(corpus, options);
  SavedModel saved;
  saved.morph = std::move(result.model);
  save_model(saved, out_path);
  print_metric("total_cost", "-", result.final_cost);
  std::cout << "lexicon_size\t-\t" << saved.morph->counts.size() << "\n";
}

void cmd_segment(const std::string& model_path, const std::string& input) {
  SavedModel saved = load_model(model_path);
  if (!saved.morph)
    throw std::runtime_error(model_path + ": model has no [morph] section");
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + input);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      std::cerr << "warning: " << input << ":" << lineno
                << ": empty line skipped\n";
      continue;
    }
    std::string encoded = normalize_case(line);
    Segmentation seg = viterbi_segment_closed(*saved.morph, encoded);
    std::cout << line << "\t";
    for (std::size_t i = 0; i < seg.morphs.size(); ++i) {
      if (i) std::cout << "|";
      std::cout << seg.morphs[i];
    }
    std::cout << "\n";
  }
}

void cmd_train_clf(const std::string& labeled_path, const std::string& feature,
                   const std::string& morph_model_path,
                   std::optional<double> beta, bool one_vs_all,
                   const std::string& out_path) {
  FeatureKind kind = feature_kind_from_name(feature);
  SavedModel saved;
  const MorphModel* morph = nullptr;
  if (kind == FeatureKind::UMorph) {
    SavedModel morph_file = load_model(morph_model_path);
    if (!morph_file.morph)
      throw std::runtime_error(morph_model_path + ": no [morph] section");
    saved.morph = std::move(morph_file.morph);
    morph = &*saved.morph;
  }
  auto examples = featurize_labeled(load_labeled(labeled_path), kind, morph);
  if (one_vs_all) {
    for (auto& [target, model] : train_one_vs_all(examples, beta))
      saved.classifiers.push_back({feature, target, std::move(model)});
  } else {
    saved.classifiers.push_back(
        {feature, std::nullopt, train_classifier(examples, beta)});
  }
  save_model(saved, out_path);
  std::cout << "classes\t-\t"
            << (one_vs_all ? saved.classifiers.size()
                           : saved.classifiers.front().model.classes.size())
            << "\n";
}

void cmd_classify(const std::string& model_path, const std::string& input,
                  const std::string& combine_path) {
  LoadedClassifier primary(model_path);
  std::optional<LoadedClassifier> secondary;
  if (!combine_path.empty()) secondary.emplace(combine_path);
  for (const auto& rec : load_unlabeled(input)) {
    Posterior post = primary.score(rec.encoded);
    if (secondary) post = combine(post, secondary->score(rec.encoded));
    auto [cls, conf] = best_class(post);
    std::cout << rec.raw << "\t" << cls << "\t" << fixed6(conf) << "\n";
  }
}

void cmd_self_train(const std::string& labeled_path,
                    const std::string& unlabeled_path,
                    const std::string& validation_path,
                    const std::string& feature,
                    const std::string& morph_model_path,
                    std::optional<double> beta, const SelfTrainConfig& config,
                    const std::string& out_path) {
  FeatureKind kind = feature_kind_from_name(feature);
  SavedModel saved;
  const MorphModel* morph = nullptr;
  if (kind == FeatureKind::UMorph) {
    SavedModel morph_file = load_model(morph_model_path);
    if (!morph_file.morph)
      throw std::runtime_error(morph_model_path + ": no [morph] section");
    saved.morph = std::move(morph_file.morph);
    morph = &*saved.morph;
  }
  auto labeled = featurize_labeled(load_labeled(labeled_path), kind, morph);
  auto validation =
      featurize_labeled(load_labeled(validation_path), kind, morph);
  std::vector<std::vector<std::string>> unlabeled;
  for (const auto& r : load_unlabeled(unlabeled_path))
    unlabeled.push_back(extract_features(r.encoded, kind, morph));
  SelfTrainResult result =
      self_train(labeled, unlabeled, validation, beta, config);
  if (result.all_discarded)
    std::cerr << "warning: every unlabeled record fell below the confidence "
                 "floor; returning the supervised model\n";
  saved.classifiers.push_back(
      {feature, std::nullopt, std::move(result.model)});
  save_model(saved, out_path);
  std::cout << "iterations\t-\t" << result.iterations << "\n";
}

void cmd_evaluate(const std::string& predictions_path,
                  const std::string& gold_path) {
  std::ifstream in(predictions_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + predictions_path);
  std::vector<std::string> names, preds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2)
      throw std::runtime_error(predictions_path +
                               ": expected username<TAB>class[<TAB>conf]");
    names.emplace_back(fields[0]);
    preds.emplace_back(fields[1]);
  }
  auto gold_records = load_labeled(gold_path);
  if (gold_records.size() != preds.size())
    throw std::runtime_error("evaluate: prediction/gold size mismatch");
  std::vector<std::string> golds;
  for (std::size_t i = 0; i < gold_records.size(); ++i) {
    if (gold_records[i].raw != names[i])
      throw std::runtime_error("evaluate: username mismatch at line " +
                               std::to_string(i + 1));
    golds.push_back(*gold_records[i].label);
  }
  EvalReport report = evaluate(preds, golds);
  print_metric("error_rate", "-", report.error);
  print_metric("micro_precision", "-", report.micro_precision);
  print_metric("micro_recall", "-", report.micro_recall);
  print_metric("micro_f1", "-", report.micro_f1);
  print_metric("macro_precision", "-", report.macro_precision);
  print_metric("macro_recall", "-", report.macro_recall);
  print_metric("macro_f1", "-", report.macro_f1);
  for (const auto& [cls, m] : report.per_class) {
    print_metric("precision", cls, m.precision);
    print_metric("recall", cls, m.recall);
    print_metric("f1", cls, m.f1);
    std::cout << "support\t" << cls << "\t" << m.support << "\n";
  }
}

void cmd_synth(const SynthConfig& config, const std::string& out_prefix) {
  SynthCorpus corpus = generate_synthetic(config);
  std::ofstream labeled(out_prefix + ".labeled.tsv", std::ios::binary);
  std::ofstream gold(out_prefix + ".gold.tsv", std::ios::binary);
  if (!labeled || !gold)
    throw std::runtime_error("cannot write synth output files");
  for (const auto& rec : corpus.records) {
    labeled << rec.label << "\t" << rec.name << "\n";
    gold << rec.name << "\t";
    for (std::size_t i = 0; i < rec.gold_morphs.size(); ++i) {
      if (i) gold << "|";
      gold << rec.gold_morphs[i];
    }
    gold << "\n";
  }
  print_metric("bayes_error", "-", corpus.bayes_error);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"username u-morph induction and demographic classification"};
  app.require_subcommand(1);

  auto positive = CLI::PositiveNumber;

  // train-morph
  std::string tm_corpus, tm_out = "morph.model";
  bool tm_labeled = false;
  MorphTrainOptions tm_options;
  auto* tm = app.add_subcommand("train-morph",
                                "induce a u-morph lexicon (MDL)");
  tm->add_option("corpus", tm_corpus, "corpus file, one username per line")
      ->required();
  tm->add_flag("--labeled", tm_labeled,
               "corpus is label<TAB>username format");
  tm->add_option("--alpha", tm_options.alpha, "corpus-cost weight")
      ->check(positive);
  tm->add_option("--epochs", tm_options.max_epochs, "max training epochs")
      ->check(positive);
  tm->add_option("--tol", tm_options.convergence_tol,
                 "relative cost improvement to stop at")
      ->check(positive);
  tm->add_option("--seed", tm_options.seed, "shuffle seed");
  tm->add_option("--out", tm_out, "output model file");
  tm->callback([&] { cmd_train_morph(tm_corpus, tm_labeled, tm_options, tm_out); });

  // segment
  std::string sg_model, sg_input;
  auto* sg = app.add_subcommand("segment",
                                "segment usernames with a trained model");
  sg->add_option("model", sg_model)->required();
  sg->add_option("input", sg_input)->required();
  sg->callback([&] { cmd_segment(sg_model, sg_input); });

  // train-clf
  std::string tc_labeled, tc_feature = "umorph", tc_morph, tc_out = "clf.model";
  double tc_beta = -1.0;
  bool tc_ova = false;
  auto* tc = app.add_subcommand("train-clf",
                                "train a class-conditional unigram classifier");
  tc->add_option("labeled", tc_labeled)->required();
  tc->add_option("--feature", tc_feature, "umorph|ngram3|ngram4")
      ->check(CLI::IsMember({"umorph", "ngram3", "ngram4"}));
  tc->add_option("--morph-model", tc_morph, "required for --feature umorph");
  tc->add_option("--beta", tc_beta,
                 "smoothing strength (default: number of training examples)")
      ->check(positive);
  tc->add_flag("--one-vs-all", tc_ova, "train one binary model per class");
  tc->add_option("--out", tc_out);
  tc->callback([&] {
    if (tc_feature == "umorph" && tc_morph.empty())
      throw CLI::ValidationError("--feature umorph requires --morph-model");
    cmd_train_clf(tc_labeled, tc_feature, tc_morph,
                  tc_beta > 0 ? std::optional<double>(tc_beta) : std::nullopt,
                  tc_ova, tc_out);
  });

  // classify
  std::string cf_model, cf_input, cf_combine;
  auto* cf = app.add_subcommand("classify", "classify usernames");
  cf->add_option("model", cf_model)->required();
  cf->add_option("input", cf_input)->required();
  cf->add_option("--combine", cf_combine,
                 "second model; average posterior log-probabilities");
  cf->callback([&] { cmd_classify(cf_model, cf_input, cf_combine); });

  // self-train
  std::string st_labeled, st_unlabeled, st_validation;
  std::string st_feature = "umorph", st_morph, st_out = "clf.model";
  double st_beta = -1.0;
  SelfTrainConfig st_config;
  auto* st = app.add_subcommand(
      "self-train", "semi-supervised EM self-training with calibration");
  st->add_option("labeled", st_labeled)->required();
  st->add_option("unlabeled", st_unlabeled)->required();
  st->add_option("validation", st_validation)->required();
  st->add_option("--feature", st_feature)
      ->check(CLI::IsMember({"umorph", "ngram3", "ngram4"}));
  st->add_option("--morph-model", st_morph);
  st->add_option("--beta", st_beta)->check(positive);
  st->add_option("--min-confidence", st_config.min_confidence)
      ->check(CLI::Range(0.0, 1.0));
  st->add_option("--bins", st_config.bins)->check(positive);
  st->add_option("--max-iters", st_config.max_iters)->check(positive);
  st->add_option("--convergence", st_config.convergence)->check(positive);
  st->add_flag("--refit-calibration", st_config.refit_calibration,
               "refit the calibration table every EM iteration");
  st->callback([&] {
    if (st_feature == "umorph" && st_morph.empty())
      throw CLI::ValidationError("--feature umorph requires --morph-model");
    cmd_self_train(st_labeled, st_unlabeled, st_validation, st_feature,
                   st_morph,
                   st_beta > 0 ? std::optional<double>(st_beta) : std::nullopt,
                   st_config, st_out);
  });
  st->add_option("--out", st_out);

  // evaluate
  std::string ev_pred, ev_gold;
  auto* ev = app.add_subcommand("evaluate",
                                "score predictions against gold labels");
  ev->add_option("predictions", ev_pred)->required();
  ev->add_option("gold", ev_gold)->required();
  ev->callback([&] { cmd_evaluate(ev_pred, ev_gold); });

  // synth
  SynthConfig sy_config;
  std::string sy_prefix = "synth";
  std::vector<double> sy_priors;
  auto* sy = app.add_subcommand("synth",
                                "generate a synthetic oracle corpus");
  sy->add_option("--out-prefix", sy_prefix);
  sy->add_option("--seed", sy_config.seed);
  sy->add_option("--classes", sy_config.num_classes)->check(CLI::Range(2, 64));
  sy->add_option("--lexicon-size", sy_config.lexicon_size)->check(positive);
  sy->add_option("--zipf", sy_config.zipf_exponent)
      ->check(CLI::NonNegativeNumber);
  sy->add_option("--exclusive", sy_config.exclusive_per_class)
      ->check(CLI::NonNegativeNumber);
  sy->add_option("--len-min", sy_config.morph_len_min)->check(positive);
  sy->add_option("--len-max", sy_config.morph_len_max)->check(positive);
  sy->add_option("--morphs-min", sy_config.morphs_per_name_min)
      ->check(positive);
  sy->add_option("--morphs-max", sy_config.morphs_per_name_max)
      ->check(positive);
  sy->add_option("--size", sy_config.corpus_size)->check(positive);
  sy->add_option("--priors", sy_priors, "per-class priors");
  sy->callback([&] {
    sy_config.class_priors = sy_priors;
    cmd_synth(sy_config, sy_prefix);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
