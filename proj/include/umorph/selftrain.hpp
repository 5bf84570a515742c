#pragma once

#include <optional>
#include <string>
#include <vector>

#include "umorph/classify.hpp"

namespace umorph {

// Equal-width confidence bins over [1/K, 1]. Bins with fewer than
// min_samples validation points keep accuracy = nullopt and fall back to
// the raw confidence when applied.
struct CalibrationTable {
  int num_classes = 2;
  int bins = 10;
  long long min_samples = 1;
  std::vector<long long> bin_counts;
  std::vector<std::optional<double>> bin_accuracy;

  double lo() const { return 1.0 / num_classes; }
  double bin_width() const { return (1.0 - lo()) / bins; }
  int bin_index(double confidence) const;
};

struct SelfTrainConfig {
  double min_confidence = 0.6;
  int max_iters = 10;
  // stop when the fraction of unlabeled predictions changing class
  // between iterations drops below this
  double convergence = 0.001;
  int bins = 10;
  long long min_samples = 1;
  bool refit_calibration = false;
};

CalibrationTable fit_calibration(const ClassModel& model,
                                 const std::vector<Example>& validation,
                                 int bins, long long min_samples = 1);

// Replaces the winning class's probability with its bin's accuracy and
// redistributes the remainder over the other classes in proportion to
// their raw scores.
Posterior apply_calibration(const CalibrationTable& table,
                            const Posterior& posterior);

struct SelfTrainResult {
  ClassModel model;
  int iterations = 0;
  // every unlabeled record fell below the confidence floor; the
  // supervised model is returned unchanged
  bool all_discarded = false;
};

// EM self-training: supervised model, calibrate on validation, then
// alternate between calibrated probabilistic labeling of the unlabeled
// records (discarding those below min_confidence) and retraining on the
// combined hard + fractional counts.
SelfTrainResult self_train(const std::vector<Example>& labeled,
                           const std::vector<std::vector<std::string>>& unlabeled,
                           const std::vector<Example>& validation,
                           std::optional<double> beta,
                           const SelfTrainConfig& config);

}  // namespace umorph
