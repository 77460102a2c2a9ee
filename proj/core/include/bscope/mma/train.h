#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bscope/eval.h"
#include "bscope/mma/config.h"
#include "bscope/mma/dataset.h"
#include "bscope/mma/embedder.h"
#include "bscope/mma/model.h"

namespace bscope::mma {

// w_c = N / (2 * n_c). Throws InvalidArgument unless both classes occur.
std::array<double, 2> inverse_frequency_weights(std::span<const Label> labels);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  MetricsReport dev;
  std::optional<double> train_accuracy;
  bool best = false;

  // One line of the training log, no trailing newline.
  std::string to_json_line() const;
};

struct TrainOptions {
  // Score the training set after every epoch (extra forward passes).
  bool track_train_accuracy = false;
  // Stop once train accuracy reaches this value; needs track_train_accuracy.
  std::optional<double> stop_at_train_accuracy;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  MmaModel model;  // parameters of the best dev epoch
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  std::array<double, 2> class_weights{};
};

// Adam on class-weighted cross-entropy with per-batch normalization. Throws
// InvalidArgument when train or dev is empty, a label is missing, or the
// training data holds one class only.
TrainResult train(std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> dev_set, const Embedder& embedder,
                  const MmaConfig& config, const TrainOptions& options = {},
                  const MmaModel* initial = nullptr);

// Predictions for every example, in order.
std::vector<Prediction> predict_all(const MmaModel& model, const Embedder& embedder,
                                    std::span<const LabeledExample> examples);

// Adam with bias correction.
class Adam {
 public:
  explicit Adam(nn::ParameterStore& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step();

 private:
  nn::ParameterStore& params_;
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<nn::Matrix> m_, v_;
};

}  // namespace bscope::mma
