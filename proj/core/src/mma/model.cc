#include "bscope/mma/model.h"

#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "bscope/error.h"

namespace bscope::mma {
namespace {

using nn::Matrix;
using nn::Tape;
using nn::Var;

// std::vector<bool> has no contiguous storage, and the softmax mask is a
// span of bool.
struct BoolBuffer {
  std::unique_ptr<bool[]> data;
  std::size_t size = 0;

  explicit BoolBuffer(std::size_t n) : data(new bool[n]()), size(n) {}
  std::span<const bool> span() const { return {data.get(), size}; }
  bool& operator[](std::size_t i) { return data[i]; }
};

Var maybe_dropout(Var x, double rate, Mode mode, Rng* rng) {
  if (mode != Mode::kTrain) return x;
  return nn::dropout(x, rate, rng);
}

}  // namespace

nn::Var AttentionScorer::weights(Tape& t, Var x, std::span<const bool> mask) const {
  Var hidden = nn::tanh(nn::add_row(nn::matmul(x, t.param(*weight)), t.param(*bias)));
  Var scores = nn::matmul(hidden, t.param(*context));
  return nn::masked_softmax(scores, mask);
}

nn::Var Linear::operator()(Tape& t, Var x) const {
  return nn::add_row(nn::matmul(x, t.param(*weight)), t.param(*bias));
}

EncodedInput encode_input(const ExampleInput& input, const Embedder& embedder,
                          const MmaConfig& config) {
  if (embedder.dimension() != config.context_dim) {
    throw InvalidArgument(fmt::format("embedder dimension {} does not match context_dim {}",
                                      embedder.dimension(), config.context_dim));
  }
  if (embedder.layer_count() != config.layer_count) {
    throw InvalidArgument(fmt::format("embedder exposes {} layers, config expects {}",
                                      embedder.layer_count(), config.layer_count));
  }
  EncodedInput out;
  out.features = input.features.flatten();
  out.has_mention = input.has_mention;
  if (!input.has_mention) return out;

  if (input.window.shape != config.window()) {
    throw InvalidArgument(fmt::format("window is {}x{}, config expects {}x{}",
                                      input.window.shape.rows, input.window.shape.cols,
                                      config.window_rows, config.window_cols));
  }
  out.tokens = embedder.token_embed(input.window);
  const Eigen::Index cells = static_cast<Eigen::Index>(config.window_rows) * config.window_cols;
  if (out.tokens.rows() != cells || out.tokens.cols() != config.context_dim) {
    throw InvalidArgument("embedder returned a token matrix of the wrong shape");
  }
  out.mask = input.window.mask;
  out.layers = embedder.encode_pair(input.title_abstract, input.citation_sentence,
                                    config.pair_max_tokens);
  if (static_cast<int>(out.layers.size()) != config.layer_count) {
    throw InvalidArgument("embedder returned the wrong number of pair layers");
  }
  for (const auto& m : out.layers) {
    if (m.cols() != config.context_dim || m.rows() != out.layers[0].rows() || m.rows() == 0) {
      throw InvalidArgument("embedder returned pair layers of inconsistent shape");
    }
    if (!m.allFinite()) throw InvalidArgument("embedder returned non-finite pair states");
  }
  if (!out.tokens.allFinite()) throw InvalidArgument("embedder returned non-finite tokens");
  return out;
}

MmaModel::MmaModel(const MmaConfig& config)
    : config_(config), params_(std::make_unique<nn::ParameterStore>()) {
  config_.validate();
  const int d = config_.context_dim;
  const int h = config_.bilstm_hidden;
  const int fused = config_.fused_dim;

  word_attention_ = add_scorer("context.word_attention", d);
  sentence_attention_ = add_scorer("context.sentence_attention", d);
  lstm_fwd_ = add_lstm("context.lstm_forward", d, h);
  lstm_bwd_ = add_lstm("context.lstm_backward", d, h);
  context_proj_ = add_linear("context.projection", 2 * h, fused);

  layer_logits_ = &add("pair.layer_logits", 1, config_.layer_count);
  for (int l = 0; l < config_.encoder_layers; ++l) {
    const std::string p = fmt::format("pair.encoder{}", l);
    EncoderLayer layer;
    layer.query = add_linear(p + ".query", d, d);
    layer.key = add_linear(p + ".key", d, d);
    layer.value = add_linear(p + ".value", d, d);
    layer.output = add_linear(p + ".output", d, d);
    layer.norm1_gain = &add(p + ".norm1.gain", 1, d);
    layer.norm1_bias = &add(p + ".norm1.bias", 1, d);
    layer.ff1 = add_linear(p + ".ff1", d, config_.encoder_ff_dim);
    layer.ff2 = add_linear(p + ".ff2", config_.encoder_ff_dim, d);
    layer.norm2_gain = &add(p + ".norm2.gain", 1, d);
    layer.norm2_bias = &add(p + ".norm2.bias", 1, d);
    encoder_.push_back(layer);
  }
  pair_proj_ = add_linear("pair.projection", d, fused);

  static constexpr std::array<const char*, 3> kFamilyNames = {"location", "cue", "count"};
  for (std::size_t f = 0; f < 3; ++f) {
    feature_family_[f] = add_linear(fmt::format("features.{}", kFamilyNames[f]),
                                    kFeatureFamilies[f].second, config_.feature_hidden);
  }
  feature_attention_ = add_scorer("features.attention", config_.feature_hidden);
  feature_proj_ = add_linear("features.projection", config_.feature_hidden, fused);

  module_attention_ = add_scorer("module_attention", fused);
  classifier_ = add_linear("classifier", fused, 2);

  initialize(config_.seed);
}

nn::Parameter& MmaModel::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  return params_->add(name, rows, cols);
}

Linear MmaModel::add_linear(const std::string& name, int in, int out) {
  return {&add(name + ".weight", in, out), &add(name + ".bias", 1, out)};
}

AttentionScorer MmaModel::add_scorer(const std::string& name, int in) {
  const int a = config_.attention_dim;
  return {&add(name + ".weight", in, a), &add(name + ".bias", 1, a),
          &add(name + ".context", a, 1)};
}

LstmCell MmaModel::add_lstm(const std::string& name, int in, int hidden) {
  return {&add(name + ".input", in, 4 * hidden), &add(name + ".recurrent", hidden, 4 * hidden),
          &add(name + ".bias", 1, 4 * hidden)};
}

void MmaModel::initialize(std::uint64_t seed) {
  Rng rng(mix64(seed ^ 0x6d6d612d696e6974ULL));
  for (auto& p : *params_) {
    const std::string_view name = p.name;
    if (name.ends_with(".gain")) {
      p.value.setOnes();
    } else if (name.ends_with(".bias") || name == "pair.layer_logits") {
      p.value.setZero();
    } else {
      // Glorot uniform.
      const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
      for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
        for (Eigen::Index i = 0; i < p.value.rows(); ++i) p.value(i, j) = rng.uniform(-limit, limit);
      }
    }
    p.zero_grad();
  }
  // Forget-gate bias 1.
  const Eigen::Index h = config_.bilstm_hidden;
  lstm_fwd_.bias->value.middleCols(h, h).setOnes();
  lstm_bwd_.bias->value.middleCols(h, h).setOnes();
}

nn::Var MmaModel::run_lstm(Tape& t, const LstmCell& cell, std::span<const Var> steps) const {
  const Eigen::Index h = config_.bilstm_hidden;
  Var w_in = t.param(*cell.input);
  Var w_rec = t.param(*cell.recurrent);
  Var bias = t.param(*cell.bias);
  Var hidden = t.constant(Matrix::Zero(1, h));
  Var state = t.constant(Matrix::Zero(1, h));
  for (const Var& x : steps) {
    Var gates = nn::add_row(nn::add(nn::matmul(x, w_in), nn::matmul(hidden, w_rec)), bias);
    Var i = nn::sigmoid(nn::slice_cols(gates, 0, h));
    Var f = nn::sigmoid(nn::slice_cols(gates, h, h));
    Var g = nn::tanh(nn::slice_cols(gates, 2 * h, h));
    Var o = nn::sigmoid(nn::slice_cols(gates, 3 * h, h));
    state = nn::add(nn::mul(f, state), nn::mul(i, g));
    hidden = nn::mul(o, nn::tanh(state));
  }
  return hidden;
}

nn::Var MmaModel::encode_context(Tape& t, const EncodedInput& in, Mode mode, Rng* rng,
                                 AttentionTrace* trace) const {
  const int rows = config_.window_rows;
  const int cols = config_.window_cols;
  const int d = config_.context_dim;
  if (in.tokens.rows() != static_cast<Eigen::Index>(rows) * cols || in.tokens.cols() != d ||
      in.mask.size() != static_cast<std::size_t>(rows) * cols) {
    throw InvalidArgument("context input does not match the configured window");
  }
  Var tokens = maybe_dropout(t.constant(in.tokens), config_.dropout, mode, rng);

  BoolBuffer row_mask(static_cast<std::size_t>(rows));
  std::vector<Var> sentences;
  sentences.reserve(static_cast<std::size_t>(rows));
  if (trace) trace->word = Eigen::MatrixXd::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    BoolBuffer cell_mask(static_cast<std::size_t>(cols));
    bool any = false;
    for (int c = 0; c < cols; ++c) {
      cell_mask[static_cast<std::size_t>(c)] = in.mask[static_cast<std::size_t>(r * cols + c)];
      any = any || cell_mask[static_cast<std::size_t>(c)];
    }
    row_mask[static_cast<std::size_t>(r)] = any;
    if (!any) {
      sentences.push_back(t.constant(Matrix::Zero(1, d)));
      continue;
    }
    Var words = nn::slice_rows(tokens, static_cast<Eigen::Index>(r) * cols, cols);
    Var alpha = word_attention_.weights(t, words, cell_mask.span());
    if (trace) trace->word.row(r) = alpha.value().col(0).transpose();
    sentences.push_back(nn::matmul(nn::transpose(alpha), words));
  }
  Var sentence_matrix = nn::concat_rows(sentences);
  Var beta = sentence_attention_.weights(t, sentence_matrix, row_mask.span());
  if (trace) trace->sentence = beta.value().col(0);

  Var attended = nn::scale_rows(sentence_matrix, beta);
  std::vector<Var> steps;
  for (int r = 0; r < rows; ++r) {
    if (row_mask[static_cast<std::size_t>(r)]) steps.push_back(nn::slice_rows(attended, r, 1));
  }
  Var forward = run_lstm(t, lstm_fwd_, steps);
  std::vector<Var> reversed(steps.rbegin(), steps.rend());
  Var backward = run_lstm(t, lstm_bwd_, reversed);
  const std::array<Var, 2> both = {forward, backward};
  Var encoded = maybe_dropout(nn::concat_cols(both), config_.dropout, mode, rng);
  return context_proj_(t, encoded);
}

nn::Var MmaModel::encoder_layer(Tape& t, const EncoderLayer& layer, Var x, Mode mode, Rng* rng,
                                AttentionTrace* trace) const {
  const int heads = config_.encoder_heads;
  const Eigen::Index dh = config_.context_dim / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Var q = layer.query(t, x);
  Var k = layer.key(t, x);
  Var v = layer.value(t, x);
  std::vector<Var> outputs;
  outputs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Var qh = nn::slice_cols(q, h * dh, dh);
    Var kh = nn::slice_cols(k, h * dh, dh);
    Var vh = nn::slice_cols(v, h * dh, dh);
    Var scores = nn::scale(nn::matmul(qh, nn::transpose(kh)), inv_scale);
    Var attn = nn::softmax_rows(scores);
    if (trace) trace->self_attention.push_back(attn.value());
    outputs.push_back(nn::matmul(maybe_dropout(attn, config_.dropout, mode, rng), vh));
  }
  Var attended = layer.output(t, nn::concat_cols(outputs));
  Var x1 = nn::layer_norm(nn::add(x, maybe_dropout(attended, config_.dropout, mode, rng)),
                          t.param(*layer.norm1_gain), t.param(*layer.norm1_bias));
  Var ff = layer.ff2(t, nn::gelu(layer.ff1(t, x1)));
  return nn::layer_norm(nn::add(x1, maybe_dropout(ff, config_.dropout, mode, rng)),
                        t.param(*layer.norm2_gain), t.param(*layer.norm2_bias));
}

nn::Var MmaModel::encode_pair(Tape& t, const EncodedInput& in, Mode mode, Rng* rng,
                              AttentionTrace* trace) const {
  if (static_cast<int>(in.layers.size()) != config_.layer_count || in.layers[0].rows() == 0) {
    throw InvalidArgument("pair input does not carry the configured layer count");
  }
  std::vector<Var> layers;
  layers.reserve(in.layers.size());
  for (const auto& m : in.layers) layers.push_back(t.constant(m));
  Var alpha = nn::masked_softmax(nn::transpose(t.param(*layer_logits_)));
  if (trace) trace->layer = alpha.value().col(0);
  Var x = maybe_dropout(nn::mix(alpha, layers), config_.dropout, mode, rng);
  for (const auto& layer : encoder_) x = encoder_layer(t, layer, x, mode, rng, trace);
  return pair_proj_(t, nn::slice_rows(x, 0, 1));
}

nn::Var MmaModel::encode_features(Tape& t, const std::array<double, kFeatureDim>& features,
                                  Mode mode, Rng* rng, AttentionTrace* trace) const {
  (void)mode;
  (void)rng;
  Matrix row(1, static_cast<Eigen::Index>(kFeatureDim));
  for (std::size_t i = 0; i < kFeatureDim; ++i) row(0, static_cast<Eigen::Index>(i)) = features[i];
  Var x = t.constant(std::move(row));
  std::array<Var, 3> families;
  for (std::size_t f = 0; f < 3; ++f) {
    families[f] = feature_family_[f](
        t, nn::slice_cols(x, kFeatureFamilies[f].first, kFeatureFamilies[f].second));
  }
  Var stacked = nn::concat_rows(families);
  Var w = feature_attention_.weights(t, stacked);
  if (trace) trace->feature = w.value().col(0);
  return feature_proj_(t, nn::matmul(nn::transpose(w), stacked));
}

MmaModel::Forward MmaModel::forward(Tape& t, const EncodedInput& in, Mode mode,
                                    Rng* dropout_rng) const {
  Forward out;
  AttentionTrace* trace = &out.trace;
  const Eigen::Index fused = config_.fused_dim;
  if (in.has_mention) {
    out.context = encode_context(t, in, mode, dropout_rng, trace);
    out.pair = encode_pair(t, in, mode, dropout_rng, trace);
  } else {
    out.context = t.constant(Matrix::Zero(1, fused));
    out.pair = t.constant(Matrix::Zero(1, fused));
  }
  out.features = encode_features(t, in.features, mode, dropout_rng, trace);

  const std::array<Var, 3> modules = {out.context, out.pair, out.features};
  Var stacked = nn::concat_rows(modules);
  const std::array<bool, 3> live = {in.has_mention, in.has_mention, true};
  Var w = module_attention_.weights(t, stacked, live);
  out.trace.module = w.value().col(0);
  out.fused = nn::matmul(nn::transpose(w), stacked);
  out.logits = classifier_(t, maybe_dropout(out.fused, config_.dropout, mode, dropout_rng));
  return out;
}

Prediction MmaModel::predict(const EncodedInput& in, AttentionTrace* trace) const {
  Tape t(false);
  Forward f = forward(t, in, Mode::kEval, nullptr);
  Prediction p;
  const Eigen::RowVectorXd logits = f.logits.value().row(0);
  const Eigen::RowVectorXd probs = nn::softmax(logits);
  p.logits = {logits(0), logits(1)};
  p.prob_baseline = probs(0);
  p.label = p.prob_baseline >= config_.decision_threshold ? Label::kBaseline : Label::kNonBaseline;
  p.features_only = !in.has_mention;
  if (trace) *trace = std::move(f.trace);
  return p;
}

double weighted_cross_entropy(std::span<const std::array<double, 2>> logits,
                              std::span<const Label> targets, std::array<double, 2> weights) {
  if (logits.size() != targets.size() || logits.empty()) {
    throw InvalidArgument("cross-entropy: logits and targets must be equal-length and nonempty");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (targets[i] == Label::kUnlabeled) throw InvalidArgument("cross-entropy: unlabeled target");
    const int y = targets[i] == Label::kBaseline ? 0 : 1;
    const double a = logits[i][0];
    const double b = logits[i][1];
    const double peak = std::max(a, b);
    const double lse = peak + std::log(std::exp(a - peak) + std::exp(b - peak));
    const double w = weights[static_cast<std::size_t>(y)];
    num += w * (lse - logits[i][static_cast<std::size_t>(y)]);
    den += w;
  }
  return num / den;
}

}  // namespace bscope::mma
