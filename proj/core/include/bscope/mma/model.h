#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bscope/context.h"
#include "bscope/features.h"
#include "bscope/mma/config.h"
#include "bscope/mma/embedder.h"
#include "bscope/nn/ops.h"
#include "bscope/nn/tape.h"
#include "bscope/rng.h"
#include "bscope/types.h"

namespace bscope::mma {

// Everything the classifier sees for one reference, before embedding.
struct ExampleInput {
  ContextWindow window;
  Tokens title_abstract;
  Tokens citation_sentence;
  FeatureVector features;
  // False for bibliography-only references: the two text modules are
  // replaced by a zero sentinel and masked out of module attention.
  bool has_mention = true;
};

// ExampleInput after the embedder ran.
struct EncodedInput {
  Eigen::MatrixXd tokens;               // (rows * cols) x dim
  std::vector<bool> mask;               // rows * cols
  std::vector<Eigen::MatrixXd> layers;  // layer_count x (seq x dim)
  std::array<double, kFeatureDim> features{};
  bool has_mention = true;
};

EncodedInput encode_input(const ExampleInput& input, const Embedder& embedder,
                          const MmaConfig& config);

// Attention distributions of one forward pass.
struct AttentionTrace {
  Eigen::MatrixXd word;          // rows x cols, zero for masked cells/rows
  Eigen::VectorXd sentence;      // rows
  Eigen::VectorXd layer;         // layer_count
  Eigen::VectorXd feature;       // 3 families: location, cue words, count
  Eigen::VectorXd module;        // context, pair, features
  std::vector<Eigen::MatrixXd> self_attention;  // per encoder layer and head
};

struct Prediction {
  double prob_baseline = 0.0;
  Label label = Label::kNonBaseline;
  std::array<double, 2> logits{};  // (baseline, non_baseline)
  // Set for references without any in-text mention.
  bool features_only = false;
};

enum class Mode : std::uint8_t { kTrain, kEval };

// Additive attention scorer: score_i = v . tanh(W x_i + b).
struct AttentionScorer {
  nn::Parameter* weight = nullptr;  // in x attention_dim
  nn::Parameter* bias = nullptr;    // 1 x attention_dim
  nn::Parameter* context = nullptr; // attention_dim x 1

  // Weights over the rows of x (n x in); masked rows get exactly 0.
  nn::Var weights(nn::Tape& t, nn::Var x, std::span<const bool> mask = {}) const;
};

struct Linear {
  nn::Parameter* weight = nullptr;  // in x out
  nn::Parameter* bias = nullptr;    // 1 x out

  nn::Var operator()(nn::Tape& t, nn::Var x) const;
};

struct LstmCell {
  nn::Parameter* input = nullptr;      // in x 4h, gate order i, f, g, o
  nn::Parameter* recurrent = nullptr;  // h x 4h
  nn::Parameter* bias = nullptr;       // 1 x 4h
};

struct EncoderLayer {
  Linear query, key, value, output;
  nn::Parameter* norm1_gain = nullptr;
  nn::Parameter* norm1_bias = nullptr;
  Linear ff1, ff2;
  nn::Parameter* norm2_gain = nullptr;
  nn::Parameter* norm2_bias = nullptr;
};

class MmaModel {
 public:
  struct Forward {
    nn::Var logits;    // 1 x 2
    nn::Var fused;     // 1 x fused_dim
    nn::Var context;   // 1 x fused_dim
    nn::Var pair;      // 1 x fused_dim
    nn::Var features;  // 1 x fused_dim
    AttentionTrace trace;
  };

  // Parameters are drawn from `config.seed`.
  explicit MmaModel(const MmaConfig& config);

  MmaModel(MmaModel&&) = default;
  MmaModel& operator=(MmaModel&&) = default;

  const MmaConfig& config() const { return config_; }
  nn::ParameterStore& parameters() { return *params_; }
  const nn::ParameterStore& parameters() const { return *params_; }

  // `dropout_rng` drives dropout in kTrain mode and is ignored in kEval.
  Forward forward(nn::Tape& t, const EncodedInput& in, Mode mode, Rng* dropout_rng) const;

  // Module encoders, each yielding 1 x fused_dim.
  nn::Var encode_context(nn::Tape& t, const EncodedInput& in, Mode mode, Rng* rng,
                         AttentionTrace* trace) const;
  nn::Var encode_pair(nn::Tape& t, const EncodedInput& in, Mode mode, Rng* rng,
                      AttentionTrace* trace) const;
  nn::Var encode_features(nn::Tape& t, const std::array<double, kFeatureDim>& features,
                          Mode mode, Rng* rng, AttentionTrace* trace) const;

  // Evaluation-mode forward without recording gradients.
  Prediction predict(const EncodedInput& in, AttentionTrace* trace = nullptr) const;

  // Sub-blocks, exposed for independent checks.
  const AttentionScorer& word_attention() const { return word_attention_; }
  const AttentionScorer& sentence_attention() const { return sentence_attention_; }
  const LstmCell& lstm_forward() const { return lstm_fwd_; }
  const LstmCell& lstm_backward() const { return lstm_bwd_; }
  const Linear& context_projection() const { return context_proj_; }
  const nn::Parameter& layer_logits() const { return *layer_logits_; }
  const std::vector<EncoderLayer>& encoder() const { return encoder_; }
  const Linear& pair_projection() const { return pair_proj_; }
  const std::array<Linear, 3>& feature_families() const { return feature_family_; }
  const AttentionScorer& feature_attention() const { return feature_attention_; }
  const Linear& feature_projection() const { return feature_proj_; }
  const AttentionScorer& module_attention() const { return module_attention_; }
  const Linear& classifier() const { return classifier_; }

  // Column ranges of the three feature families in the flat vector.
  static constexpr std::array<std::pair<int, int>, 3> kFeatureFamilies = {
      std::pair<int, int>{0, 6}, std::pair<int, int>{6, 45}, std::pair<int, int>{51, 1}};

 private:
  nn::Parameter& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Linear add_linear(const std::string& name, int in, int out);
  AttentionScorer add_scorer(const std::string& name, int in);
  LstmCell add_lstm(const std::string& name, int in, int hidden);
  void initialize(std::uint64_t seed);

  nn::Var run_lstm(nn::Tape& t, const LstmCell& cell, std::span<const nn::Var> steps) const;
  nn::Var encoder_layer(nn::Tape& t, const EncoderLayer& layer, nn::Var x, Mode mode, Rng* rng,
                        AttentionTrace* trace) const;

  MmaConfig config_;
  std::unique_ptr<nn::ParameterStore> params_;

  AttentionScorer word_attention_;
  AttentionScorer sentence_attention_;
  LstmCell lstm_fwd_;
  LstmCell lstm_bwd_;
  Linear context_proj_;
  nn::Parameter* layer_logits_ = nullptr;
  std::vector<EncoderLayer> encoder_;
  Linear pair_proj_;
  std::array<Linear, 3> feature_family_;
  AttentionScorer feature_attention_;
  Linear feature_proj_;
  AttentionScorer module_attention_;
  Linear classifier_;
};

// Class-weighted cross-entropy: sum_i w[y_i] * nll_i / sum_i w[y_i].
double weighted_cross_entropy(std::span<const std::array<double, 2>> logits,
                              std::span<const Label> targets, std::array<double, 2> weights);

}  // namespace bscope::mma
