#include "bscope/mma/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bscope/error.h"

namespace bscope::mma {
namespace {

constexpr char kMagic[8] = {'B', 'S', 'C', 'O', 'P', 'E', 'C', 'K'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ParseError(fmt::format("{}: truncated checkpoint", path.string()));
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MmaModel& model,
                     const CheckpointMeta& meta) {
  nlohmann::ordered_json header;
  header["config"] = nlohmann::ordered_json::parse(meta.config.to_json());
  header["lexicon_fingerprint"] = meta.lexicon_fingerprint;
  header["embedder"] = meta.embedder_id;
  header["class_weights"] = {meta.class_weights[0], meta.class_weights[1]};
  header["best_epoch"] = meta.best_epoch;
  auto& tensors = header["tensors"] = nlohmann::ordered_json::array();
  for (const auto& p : model.parameters()) {
    tensors.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write checkpoint '{}'", path.string()));
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kCheckpointVersion);
  write_pod<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : model.parameters()) {
    // Column-major, as stored by Eigen.
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p.size())));
  }
  if (!out) throw IoError(fmt::format("failed writing checkpoint '{}'", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open checkpoint '{}'", path.string()));
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(fmt::format("{}: not a checkpoint file", path.string()));
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw ParseError(fmt::format("{}: unsupported checkpoint version {}", path.string(), version));
  }
  const auto length = read_pod<std::uint64_t>(in, path);
  if (length > (std::uint64_t{1} << 30)) {
    throw ParseError(fmt::format("{}: implausible header length", path.string()));
  }
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw ParseError(fmt::format("{}: truncated checkpoint header", path.string()));
  }
  CheckpointMeta meta;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
    meta.config = MmaConfig::from_json(header.at("config").dump());
    meta.lexicon_fingerprint = header.at("lexicon_fingerprint").get<std::string>();
    meta.embedder_id = header.at("embedder").get<std::string>();
    const auto w = header.at("class_weights").get<std::vector<double>>();
    if (w.size() != 2) throw ParseError("class_weights needs two values");
    meta.class_weights = {w[0], w[1]};
    meta.best_epoch = header.at("best_epoch").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: bad checkpoint header: {}", path.string(), e.what()));
  }

  MmaModel model(meta.config);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != model.parameters().size()) {
    throw ParseError(fmt::format("{}: checkpoint holds {} tensors, model has {}", path.string(),
                                 tensors.size(), model.parameters().size()));
  }
  std::size_t i = 0;
  for (auto& p : model.parameters()) {
    const auto& t = tensors[i++];
    if (t.at("name").get<std::string>() != p.name ||
        t.at("rows").get<Eigen::Index>() != p.value.rows() ||
        t.at("cols").get<Eigen::Index>() != p.value.cols()) {
      throw ParseError(fmt::format("{}: tensor '{}' does not match the model layout",
                                   path.string(), t.at("name").get<std::string>()));
    }
    if (!in.read(reinterpret_cast<char*>(p.value.data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p.size())))) {
      throw ParseError(fmt::format("{}: truncated tensor data", path.string()));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(fmt::format("{}: trailing bytes after tensor data", path.string()));
  }
  return {std::move(meta), std::move(model)};
}

void verify_checkpoint(const CheckpointMeta& meta, const MmaConfig& config,
                       const std::string& lexicon_fingerprint, const std::string& embedder_id) {
  if (!meta.config.same_architecture(config)) {
    throw IntegrityError("checkpoint was trained with a different model configuration");
  }
  if (meta.lexicon_fingerprint != lexicon_fingerprint) {
    throw IntegrityError(fmt::format("checkpoint cue lexicon {} differs from the active lexicon {}",
                                     meta.lexicon_fingerprint, lexicon_fingerprint));
  }
  if (meta.embedder_id != embedder_id) {
    throw IntegrityError(fmt::format("checkpoint embedder '{}' differs from the active '{}'",
                                     meta.embedder_id, embedder_id));
  }
}

}  // namespace bscope::mma
