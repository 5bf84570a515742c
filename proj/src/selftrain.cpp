#include "umorph/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace umorph {

namespace {

// winner = largest normalized probability; ties to the first class in
// map (lexicographic) order
std::pair<std::string, double> winning_class(const Posterior& p) {
  std::string best;
  double best_p = -1.0;
  for (const auto& [c, v] : p.normalized) {
    if (v > best_p) {
      best = c;
      best_p = v;
    }
  }
  return {best, best_p};
}

double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

}  // namespace

int CalibrationTable::bin_index(double confidence) const {
  double w = bin_width();
  int idx = static_cast<int>(std::floor((confidence - lo()) / w));
  return std::clamp(idx, 0, bins - 1);
}

CalibrationTable fit_calibration(const ClassModel& model,
                                 const std::vector<Example>& validation,
                                 int bins, long long min_samples) {
  if (validation.empty())
    throw std::invalid_argument("fit_calibration: empty validation set");
  if (bins < 2) throw std::invalid_argument("fit_calibration: bins must be >= 2");
  CalibrationTable table;
  table.num_classes = static_cast<int>(model.classes.size());
  table.bins = bins;
  table.min_samples = min_samples;
  table.bin_counts.assign(bins, 0);
  std::vector<long long> correct(bins, 0);
  for (const auto& ex : validation) {
    Posterior post = log_posterior(model, ex.features);
    auto [winner, confidence] = winning_class(post);
    int idx = table.bin_index(confidence);
    table.bin_counts[idx]++;
    if (winner == ex.label) correct[idx]++;
  }
  table.bin_accuracy.assign(bins, std::nullopt);
  for (int i = 0; i < bins; ++i) {
    if (table.bin_counts[i] >= std::max<long long>(min_samples, 1))
      table.bin_accuracy[i] =
          static_cast<double>(correct[i]) / table.bin_counts[i];
  }
  return table;
}

Posterior apply_calibration(const CalibrationTable& table,
                            const Posterior& posterior) {
  auto [winner, raw_conf] = winning_class(posterior);
  auto acc_opt = table.bin_accuracy[table.bin_index(raw_conf)];
  double acc = acc_opt.value_or(raw_conf);  // identity fallback
  std::size_t k = posterior.normalized.size();
  Posterior out;
  for (const auto& [c, v] : posterior.normalized) {
    double p;
    if (c == winner)
      p = acc;
    else if (raw_conf < 1.0)
      p = v * (1.0 - acc) / (1.0 - raw_conf);
    else
      p = (1.0 - acc) / static_cast<double>(k - 1);
    out.normalized[c] = p;
    out.log_scores[c] = safe_log(p);
  }
  return out;
}

SelfTrainResult self_train(
    const std::vector<Example>& labeled,
    const std::vector<std::vector<std::string>>& unlabeled,
    const std::vector<Example>& validation, std::optional<double> beta,
    const SelfTrainConfig& config) {
  SelfTrainResult result;
  result.model = train_classifier(labeled, beta);
  if (unlabeled.empty() || config.min_confidence >= 1.0) return result;

  CalibrationTable table =
      fit_calibration(result.model, validation, config.bins,
                      config.min_samples);

  std::vector<std::string> prev_assignment(unlabeled.size());
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    // E-step: calibrated probabilistic labels, confidence floor
    std::vector<SoftExample> soft;
    std::vector<std::string> assignment(unlabeled.size());
    soft.reserve(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      Posterior post = log_posterior(result.model, unlabeled[i]);
      Posterior calibrated = apply_calibration(table, post);
      auto [winner, confidence] = winning_class(calibrated);
      assignment[i] = winner;
      if (confidence < config.min_confidence) continue;
      SoftExample ex;
      ex.features = unlabeled[i];
      ex.class_weights = calibrated.normalized;
      soft.push_back(std::move(ex));
    }
    if (soft.empty()) {
      if (iter == 1) {
        result.all_discarded = true;
        return result;
      }
      break;
    }

    // M-step
    result.model = train_classifier_soft(labeled, soft, beta);
    result.iterations = iter;
    if (config.refit_calibration)
      table = fit_calibration(result.model, validation, config.bins,
                              config.min_samples);

    if (iter > 1) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < unlabeled.size(); ++i)
        if (assignment[i] != prev_assignment[i]) ++changed;
      if (static_cast<double>(changed) / unlabeled.size() <
          config.convergence)
        break;
    }
    prev_assignment = std::move(assignment);
  }
  return result;
}

}  // namespace umorph
