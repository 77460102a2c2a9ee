#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bscope/context.h"
#include "bscope/features.h"

namespace bscope::mma {

// Hyperparameters of the multi-module attention classifier. Defaults are
// the production settings.
struct MmaConfig {
  int context_dim = 768;     // embedder width
  int layer_count = 13;      // hidden-state layers exposed by the embedder
  int bilstm_hidden = 64;    // per direction
  double dropout = 0.2;
  int encoder_layers = 6;
  int encoder_heads = 8;
  int encoder_ff_dim = 2048;
  int fused_dim = 128;
  int feature_dim = static_cast<int>(kFeatureDim);
  int attention_dim = 64;    // scorer width of every additive attention
  int feature_hidden = 64;   // width of each feature-family projection
  int window_rows = 10;
  int window_cols = 50;
  int pair_max_tokens = 256;
  int batch_size = 32;
  double learning_rate = 0.001;
  int epochs = 20;
  // (baseline, non_baseline); inverse class frequency when absent.
  std::optional<std::array<double, 2>> class_weights;
  double decision_threshold = 0.5;
  std::uint64_t seed = 0;
  CountTransform count_transform = CountTransform::kLog1p;
  // Keep embedder outputs of the training set in memory across epochs.
  bool cache_embeddings = false;

  WindowShape window() const { return {window_rows, window_cols}; }
  FeatureOptions feature_options() const { return {window(), count_transform}; }

  // Throws InvalidArgument naming the first bad field.
  void validate() const;

  // Tiny dimensions for tests and smoke runs.
  static MmaConfig toy();

  std::string to_json() const;
  // Absent fields keep their defaults; unknown fields are rejected.
  static MmaConfig from_json(std::string_view text, const MmaConfig& base);
  static MmaConfig from_json(std::string_view text);

  // True when two configs build identically-shaped models.
  bool same_architecture(const MmaConfig& other) const;

  friend bool operator==(const MmaConfig&, const MmaConfig&) = default;
};

}  // namespace bscope::mma
