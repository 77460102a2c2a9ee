#include "bscope/mma/embedder.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bscope/error.h"
#include "bscope/rng.h"
#include "bscope/text.h"

namespace bscope::mma {
namespace {

std::uint64_t token_hash(std::string_view token) {
  const std::string lower = to_lower(token);
  return fnv1a64(lower.data(), lower.size());
}

bool is_pad(std::string_view token) { return token == kPadToken; }

int parse_int_field(std::string_view spec, std::string_view key) {
  const std::string needle = fmt::format("{}=", key);
  const auto pos = spec.find(needle);
  if (pos == std::string_view::npos) {
    throw ParseError(fmt::format("embedder identifier '{}' lacks {}", spec, key));
  }
  const char* begin = spec.data() + pos + needle.size();
  const char* end = spec.data() + spec.size();
  long long v = 0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr == begin) {
    throw ParseError(fmt::format("embedder identifier '{}': bad {}", spec, key));
  }
  return static_cast<int>(v);
}

}  // namespace

Tokens pair_tokens(const Tokens& a, const Tokens& b, int max_tokens) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("pair input: both token sequences must be nonempty");
  }
  if (max_tokens < 5) throw InvalidArgument("pair input: max_tokens must be at least 5");
  const std::size_t budget = static_cast<std::size_t>(max_tokens) - 3;
  std::size_t na = a.size();
  std::size_t nb = b.size();
  // Trim the longer context first, keeping at least one token per side.
  while (na + nb > budget) {
    if (na > 1 && (na >= nb || nb <= 1)) {
      --na;
    } else {
      --nb;
    }
  }
  Tokens out;
  out.reserve(na + nb + 3);
  out.emplace_back(kClsToken);
  out.insert(out.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(na));
  out.emplace_back(kSepToken);
  out.insert(out.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(nb));
  out.emplace_back(kSepToken);
  return out;
}

HashEmbedder::HashEmbedder(int dimension, int layer_count, std::uint64_t salt)
    : dimension_(dimension), layer_count_(layer_count), salt_(salt) {
  if (dimension <= 0 || layer_count <= 0) {
    throw InvalidArgument("hash embedder: dimension and layer_count must be positive");
  }
}

std::string HashEmbedder::identifier() const {
  return fmt::format("hash/v1:dim={}:layers={}:salt={}", dimension_, layer_count_, salt_);
}

Eigen::RowVectorXd HashEmbedder::vector(std::string_view token, int layer) const {
  Eigen::RowVectorXd v(dimension_);
  const std::uint64_t base =
      mix64(token_hash(token) ^ mix64(salt_ + 0x51ed27ULL * static_cast<std::uint64_t>(layer + 1)));
  for (int d = 0; d < dimension_; ++d) {
    const std::uint64_t h = mix64(base + static_cast<std::uint64_t>(d));
    v(d) = static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
  }
  return v;
}

Eigen::MatrixXd HashEmbedder::token_embed(const ContextWindow& window) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(window.tokens.size()),
                                              dimension_);
  for (std::size_t i = 0; i < window.tokens.size(); ++i) {
    if (window.mask[i] && !is_pad(window.tokens[i])) {
      out.row(static_cast<Eigen::Index>(i)) = vector(window.tokens[i], 0);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> HashEmbedder::encode_pair(const Tokens& a, const Tokens& b,
                                                       int max_tokens) const {
  const Tokens seq = pair_tokens(a, b, max_tokens);
  std::vector<Eigen::MatrixXd> layers;
  layers.reserve(static_cast<std::size_t>(layer_count_));
  for (int l = 0; l < layer_count_; ++l) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(seq.size()), dimension_);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = vector(seq[i], l);
    }
    layers.push_back(std::move(m));
  }
  return layers;
}

StaticTableEmbedder::StaticTableEmbedder(const std::filesystem::path& path, int layer_count)
    : path_(path), layer_count_(layer_count) {
  if (layer_count <= 0) throw InvalidArgument("static embedder: layer_count must be positive");
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open word vectors '{}'", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    std::vector<double> values;
    double x = 0;
    while (ls >> x) values.push_back(x);
    if (!ls.eof()) {
      throw ParseError(fmt::format("{}:{}: non-numeric vector entry", path.string(), line_no));
    }
    // "count dim" header.
    if (line_no == 1 && values.size() == 1) continue;
    if (values.empty()) {
      throw ParseError(fmt::format("{}:{}: word without vector", path.string(), line_no));
    }
    if (dimension_ == 0) dimension_ = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dimension_) {
      throw ParseError(fmt::format("{}:{}: expected {} values, found {}", path.string(), line_no,
                                   dimension_, values.size()));
    }
    table_.emplace(to_lower(word),
                   Eigen::Map<Eigen::RowVectorXd>(values.data(), dimension_));
  }
  if (dimension_ == 0) throw ParseError(fmt::format("'{}' holds no vectors", path.string()));
}

std::string StaticTableEmbedder::identifier() const {
  return fmt::format("static/v1:layers={}:{}", layer_count_, path_.string());
}

Eigen::RowVectorXd StaticTableEmbedder::lookup(std::string_view token) const {
  auto it = table_.find(to_lower(token));
  if (it == table_.end()) return Eigen::RowVectorXd::Zero(dimension_);
  return it->second;
}

Eigen::MatrixXd StaticTableEmbedder::token_embed(const ContextWindow& window) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(window.tokens.size()),
                                              dimension_);
  for (std::size_t i = 0; i < window.tokens.size(); ++i) {
    if (window.mask[i] && !is_pad(window.tokens[i])) {
      out.row(static_cast<Eigen::Index>(i)) = lookup(window.tokens[i]);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> StaticTableEmbedder::encode_pair(const Tokens& a, const Tokens& b,
                                                              int max_tokens) const {
  const Tokens seq = pair_tokens(a, b, max_tokens);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(seq.size()), dimension_);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = lookup(seq[i]);
  }
  return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(layer_count_), m);
}

std::unique_ptr<Embedder> make_embedder(std::string_view identifier) {
  if (identifier.starts_with("hash/v1:")) {
    const int dim = parse_int_field(identifier, "dim");
    const int layers = parse_int_field(identifier, "layers");
    const int salt = parse_int_field(identifier, "salt");
    return std::make_unique<HashEmbedder>(dim, layers, static_cast<std::uint64_t>(salt));
  }
  if (identifier.starts_with("static/v1:")) {
    const int layers = parse_int_field(identifier, "layers");
    const auto rest = identifier.substr(std::string_view("static/v1:").size());
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(fmt::format("embedder identifier '{}' lacks a path", identifier));
    }
    return std::make_unique<StaticTableEmbedder>(std::filesystem::path(rest.substr(colon + 1)),
                                                 layers);
  }
  throw ParseError(fmt::format("unknown embedder identifier '{}'", identifier));
}

}  // namespace bscope::mma
