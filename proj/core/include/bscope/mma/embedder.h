#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "bscope/context.h"
#include "bscope/types.h"

namespace bscope::mma {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";

// [CLS] a [SEP] b [SEP], trimming `a` first and then `b` to fit max_tokens.
// Throws InvalidArgument when either side is empty or max_tokens < 5.
Tokens pair_tokens(const Tokens& a, const Tokens& b, int max_tokens);

// Source of token representations for the two text modules.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual int dimension() const = 0;
  virtual int layer_count() const = 0;
  // Stable identifier recorded in checkpoints.
  virtual std::string identifier() const = 0;

  // (rows * cols) x dimension, row r * cols + c for window cell (r, c).
  // Padding cells are zero.
  virtual Eigen::MatrixXd token_embed(const ContextWindow& window) const = 0;

  // layer_count matrices of sequence x dimension for pair_tokens(a, b).
  virtual std::vector<Eigen::MatrixXd> encode_pair(const Tokens& a, const Tokens& b,
                                                   int max_tokens) const = 0;
};

// Deterministic hash-derived vectors in [-1, 1): each (token, layer) pair gets
// its own vector. Lowercases tokens first.
class HashEmbedder : public Embedder {
 public:
  HashEmbedder(int dimension, int layer_count, std::uint64_t salt = 0);

  int dimension() const override { return dimension_; }
  int layer_count() const override { return layer_count_; }
  std::string identifier() const override;
  Eigen::MatrixXd token_embed(const ContextWindow& window) const override;
  std::vector<Eigen::MatrixXd> encode_pair(const Tokens& a, const Tokens& b,
                                           int max_tokens) const override;

  Eigen::RowVectorXd vector(std::string_view token, int layer) const;

 private:
  int dimension_;
  int layer_count_;
  std::uint64_t salt_;
};

// Static word vectors from a text file ("word v1 v2 ... vd" per line, an
// optional "count dim" header line). Unknown words map to zero. Every layer
// of encode_pair carries the same static vectors.
class StaticTableEmbedder : public Embedder {
 public:
  StaticTableEmbedder(const std::filesystem::path& path, int layer_count);

  int dimension() const override { return dimension_; }
  int layer_count() const override { return layer_count_; }
  std::string identifier() const override;
  Eigen::MatrixXd token_embed(const ContextWindow& window) const override;
  std::vector<Eigen::MatrixXd> encode_pair(const Tokens& a, const Tokens& b,
                                           int max_tokens) const override;

 private:
  Eigen::RowVectorXd lookup(std::string_view token) const;

  std::filesystem::path path_;
  int dimension_ = 0;
  int layer_count_;
  std::unordered_map<std::string, Eigen::RowVectorXd> table_;
};

// Rebuilds an embedder from its identifier ("hash/v1:dim=8:layers=3:salt=0"
// or "static/v1:layers=13:<path>").
std::unique_ptr<Embedder> make_embedder(std::string_view identifier);

}  // namespace bscope::mma
