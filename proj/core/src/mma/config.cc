#include "bscope/mma/config.h"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bscope/error.h"

namespace bscope::mma {
namespace {

using nlohmann::ordered_json;

std::string_view transform_name(CountTransform t) {
  return t == CountTransform::kLog1p ? "log1p" : "raw";
}

CountTransform parse_transform(const std::string& s) {
  if (s == "log1p") return CountTransform::kLog1p;
  if (s == "raw") return CountTransform::kRaw;
  throw ParseError(fmt::format("count_transform: unknown value '{}'", s));
}

void positive(const char* field, double v) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("config: {} must be positive, got {}", field, v));
  }
}

}  // namespace

void MmaConfig::validate() const {
  positive("context_dim", context_dim);
  positive("layer_count", layer_count);
  positive("bilstm_hidden", bilstm_hidden);
  positive("encoder_layers", encoder_layers);
  positive("encoder_heads", encoder_heads);
  positive("encoder_ff_dim", encoder_ff_dim);
  positive("fused_dim", fused_dim);
  positive("attention_dim", attention_dim);
  positive("feature_hidden", feature_hidden);
  positive("window_rows", window_rows);
  positive("window_cols", window_cols);
  positive("batch_size", batch_size);
  positive("learning_rate", learning_rate);
  positive("epochs", epochs);
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidArgument(fmt::format("config: dropout must lie in [0, 1), got {}", dropout));
  }
  if (feature_dim != static_cast<int>(kFeatureDim)) {
    throw InvalidArgument(
        fmt::format("config: feature_dim must be {}, got {}", kFeatureDim, feature_dim));
  }
  if (context_dim % encoder_heads != 0) {
    throw InvalidArgument(fmt::format("config: context_dim {} not divisible by encoder_heads {}",
                                      context_dim, encoder_heads));
  }
  if (pair_max_tokens < 5) {
    throw InvalidArgument("config: pair_max_tokens must be at least 5");
  }
  if (class_weights) {
    positive("class_weights[0]", (*class_weights)[0]);
    positive("class_weights[1]", (*class_weights)[1]);
  }
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw InvalidArgument("config: decision_threshold must lie in (0, 1)");
  }
}

MmaConfig MmaConfig::toy() {
  MmaConfig c;
  c.context_dim = 8;
  c.layer_count = 3;
  c.bilstm_hidden = 4;
  c.encoder_layers = 1;
  c.encoder_heads = 2;
  c.encoder_ff_dim = 16;
  c.fused_dim = 16;
  c.attention_dim = 4;
  c.feature_hidden = 4;
  c.window_rows = 2;
  c.window_cols = 5;
  c.pair_max_tokens = 12;
  c.batch_size = 8;
  c.cache_embeddings = true;
  return c;
}

std::string MmaConfig::to_json() const {
  ordered_json j;
  j["context_dim"] = context_dim;
  j["layer_count"] = layer_count;
  j["bilstm_hidden"] = bilstm_hidden;
  j["dropout"] = dropout;
  j["encoder_layers"] = encoder_layers;
  j["encoder_heads"] = encoder_heads;
  j["encoder_ff_dim"] = encoder_ff_dim;
  j["fused_dim"] = fused_dim;
  j["feature_dim"] = feature_dim;
  j["attention_dim"] = attention_dim;
  j["feature_hidden"] = feature_hidden;
  j["window_rows"] = window_rows;
  j["window_cols"] = window_cols;
  j["pair_max_tokens"] = pair_max_tokens;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  if (class_weights) {
    j["class_weights"] = {(*class_weights)[0], (*class_weights)[1]};
  } else {
    j["class_weights"] = nullptr;
  }
  j["decision_threshold"] = decision_threshold;
  j["seed"] = seed;
  j["count_transform"] = transform_name(count_transform);
  j["cache_embeddings"] = cache_embeddings;
  return j.dump(2);
}

MmaConfig MmaConfig::from_json(std::string_view text, const MmaConfig& base) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  MmaConfig c = base;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "context_dim") c.context_dim = v.get<int>();
      else if (key == "layer_count") c.layer_count = v.get<int>();
      else if (key == "bilstm_hidden") c.bilstm_hidden = v.get<int>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "encoder_layers") c.encoder_layers = v.get<int>();
      else if (key == "encoder_heads") c.encoder_heads = v.get<int>();
      else if (key == "encoder_ff_dim") c.encoder_ff_dim = v.get<int>();
      else if (key == "fused_dim") c.fused_dim = v.get<int>();
      else if (key == "feature_dim") c.feature_dim = v.get<int>();
      else if (key == "attention_dim") c.attention_dim = v.get<int>();
      else if (key == "feature_hidden") c.feature_hidden = v.get<int>();
      else if (key == "window_rows") c.window_rows = v.get<int>();
      else if (key == "window_cols") c.window_cols = v.get<int>();
      else if (key == "pair_max_tokens") c.pair_max_tokens = v.get<int>();
      else if (key == "batch_size") c.batch_size = v.get<int>();
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "epochs") c.epochs = v.get<int>();
      else if (key == "class_weights") {
        if (v.is_null()) {
          c.class_weights.reset();
        } else {
          auto w = v.get<std::vector<double>>();
          if (w.size() != 2) throw ParseError("config: class_weights needs two values");
          c.class_weights = std::array<double, 2>{w[0], w[1]};
        }
      } else if (key == "decision_threshold") c.decision_threshold = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "count_transform") c.count_transform = parse_transform(v.get<std::string>());
      else if (key == "cache_embeddings") c.cache_embeddings = v.get<bool>();
      else throw ParseError(fmt::format("config: unknown field '{}'", key));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("config: field '{}': {}", key, e.what()));
    }
  }
  return c;
}

MmaConfig MmaConfig::from_json(std::string_view text) { return from_json(text, MmaConfig{}); }

bool MmaConfig::same_architecture(const MmaConfig& o) const {
  return context_dim == o.context_dim && layer_count == o.layer_count &&
         bilstm_hidden == o.bilstm_hidden && encoder_layers == o.encoder_layers &&
         encoder_heads == o.encoder_heads && encoder_ff_dim == o.encoder_ff_dim &&
         fused_dim == o.fused_dim && feature_dim == o.feature_dim &&
         attention_dim == o.attention_dim && feature_hidden == o.feature_hidden &&
         window_rows == o.window_rows && window_cols == o.window_cols &&
         pair_max_tokens == o.pair_max_tokens && count_transform == o.count_transform;
}

}  // namespace bscope::mma
