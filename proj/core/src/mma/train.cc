#include "bscope/mma/train.h"

#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bscope/error.h"
#include "bscope/rng.h"

namespace bscope::mma {
namespace {

int class_index(Label l) { return l == Label::kBaseline ? 0 : 1; }

// Encodes lazily, or once up front when caching is on.
class EncodedSet {
 public:
  EncodedSet(std::span<const LabeledExample> examples, const Embedder& embedder,
             const MmaConfig& config, bool cache)
      : examples_(examples), embedder_(embedder), config_(config) {
    if (cache) {
      cached_.reserve(examples.size());
      for (const auto& ex : examples) cached_.push_back(encode_input(ex.input, embedder, config));
    }
  }

  EncodedInput get(std::size_t i) const {
    if (!cached_.empty()) return cached_[i];
    return encode_input(examples_[i].input, embedder_, config_);
  }

  std::size_t size() const { return examples_.size(); }

 private:
  std::span<const LabeledExample> examples_;
  const Embedder& embedder_;
  const MmaConfig& config_;
  std::vector<EncodedInput> cached_;
};

struct Scored {
  double loss = 0.0;
  std::vector<Label> predicted;
};

Scored score(const MmaModel& model, const EncodedSet& set,
             std::span<const LabeledExample> examples, std::array<double, 2> weights) {
  Scored s;
  std::vector<std::array<double, 2>> logits;
  std::vector<Label> gold;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Prediction p = model.predict(set.get(i));
    logits.push_back(p.logits);
    gold.push_back(examples[i].label);
    s.predicted.push_back(p.label);
  }
  s.loss = weighted_cross_entropy(logits, gold, weights);
  return s;
}

void require_labels(std::span<const LabeledExample> set, const char* which) {
  if (set.empty()) throw InvalidArgument(fmt::format("{} set is empty", which));
  for (const auto& ex : set) {
    if (ex.label == Label::kUnlabeled) {
      throw InvalidArgument(fmt::format("{} set: reference {}/{} is unlabeled", which,
                                        ex.paper_id, ex.ref_id));
    }
  }
}

}  // namespace

std::array<double, 2> inverse_frequency_weights(std::span<const Label> labels) {
  std::array<double, 2> counts{};
  for (Label l : labels) {
    if (l == Label::kUnlabeled) throw InvalidArgument("class weights: unlabeled example");
    counts[static_cast<std::size_t>(class_index(l))] += 1.0;
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw InvalidArgument("training data contains a single class");
  }
  const double n = counts[0] + counts[1];
  return {n / (2.0 * counts[0]), n / (2.0 * counts[1])};
}

std::string EpochRecord::to_json_line() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["train_loss"] = train_loss;
  j["dev_loss"] = dev_loss;
  j["dev_precision"] = dev.overall.precision;
  j["dev_recall"] = dev.overall.recall;
  j["dev_f1"] = dev.overall.f1;
  j["dev_accuracy"] = dev.accuracy();
  if (train_accuracy) j["train_accuracy"] = *train_accuracy;
  j["best"] = best;
  return j.dump();
}

Adam::Adam(nn::ParameterStore& params, double lr, double beta1, double beta2, double eps)
    : params_(params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.push_back(nn::Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(nn::Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::step() {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  std::size_t i = 0;
  for (auto& p : params_) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    ++i;
  }
}

TrainResult train(std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> dev_set, const Embedder& embedder,
                  const MmaConfig& config, const TrainOptions& options,
                  const MmaModel* initial) {
  config.validate();
  require_labels(train_set, "train");
  require_labels(dev_set, "dev");
  std::vector<Label> train_labels;
  for (const auto& ex : train_set) train_labels.push_back(ex.label);
  const auto frequency = inverse_frequency_weights(train_labels);
  const std::array<double, 2> weights = config.class_weights.value_or(frequency);

  MmaModel model(config);
  if (initial != nullptr) {
    if (!initial->config().same_architecture(config)) {
      throw IntegrityError("initial model architecture differs from the training config");
    }
    model.parameters().restore(initial->parameters().snapshot());
  }
  EncodedSet train_enc(train_set, embedder, config, config.cache_embeddings);
  EncodedSet dev_enc(dev_set, embedder, config, config.cache_embeddings);

  Rng order_rng(mix64(config.seed ^ 0x6f72646572ULL));
  Rng dropout_rng(mix64(config.seed ^ 0x64726f70ULL));
  Adam adam(model.parameters(), config.learning_rate);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Label> dev_gold;
  for (const auto& ex : dev_set) dev_gold.push_back(ex.label);

  TrainResult result{std::move(model), {}, 0, weights};
  MmaModel& m = result.model;
  std::vector<nn::Matrix> best_params = m.parameters().snapshot();
  double best_f1 = -1.0;
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    double epoch_weight = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      double batch_weight = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        batch_weight += weights[static_cast<std::size_t>(class_index(train_set[order[k]].label))];
      }
      m.parameters().zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const LabeledExample& ex = train_set[order[k]];
        const int y = class_index(ex.label);
        const double w = weights[static_cast<std::size_t>(y)];
        nn::Tape tape;
        auto f = m.forward(tape, train_enc.get(order[k]), Mode::kTrain, &dropout_rng);
        nn::Var loss = nn::cross_entropy(f.logits, y, w / batch_weight);
        epoch_loss += loss.value()(0, 0) * batch_weight;
        tape.backward(loss);
      }
      epoch_weight += batch_weight;
      adam.step();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / epoch_weight;
    const Scored dev = score(m, dev_enc, dev_set, weights);
    rec.dev_loss = dev.loss;
    rec.dev = compute_metrics(dev_gold, dev.predicted);
    if (options.track_train_accuracy) {
      const Scored tr = score(m, train_enc, train_set, weights);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < tr.predicted.size(); ++i) {
        hits += tr.predicted[i] == train_set[i].label ? 1 : 0;
      }
      rec.train_accuracy = static_cast<double>(hits) / static_cast<double>(train_set.size());
    }
    if (rec.dev.overall.f1 > best_f1) {
      best_f1 = rec.dev.overall.f1;
      best_params = m.parameters().snapshot();
      result.best_epoch = epoch;
      rec.best = true;
    }
    result.log.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (options.stop_at_train_accuracy && rec.train_accuracy &&
        *rec.train_accuracy >= *options.stop_at_train_accuracy) {
      break;
    }
  }
  m.parameters().restore(best_params);
  return result;
}

std::vector<Prediction> predict_all(const MmaModel& model, const Embedder& embedder,
                                    std::span<const LabeledExample> examples) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(model.predict(encode_input(ex.input, embedder, model.config())));
  }
  return out;
}

}  // namespace bscope::mma
