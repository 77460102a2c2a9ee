#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "bscope/mma/config.h"
#include "bscope/mma/model.h"

namespace bscope::mma {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  MmaConfig config;
  std::string lexicon_fingerprint;
  std::string embedder_id;
  std::array<double, 2> class_weights{1.0, 1.0};
  int best_epoch = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  MmaModel model;
};

// Binary container: magic, version, JSON header, raw little-endian doubles.
void save_checkpoint(const std::filesystem::path& path, const MmaModel& model,
                     const CheckpointMeta& meta);

// Throws IoError / ParseError on unreadable or corrupt files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws IntegrityError when the checkpoint was built with a different
// architecture, cue lexicon, or embedder.
void verify_checkpoint(const CheckpointMeta& meta, const MmaConfig& config,
                       const std::string& lexicon_fingerprint, const std::string& embedder_id);

}  // namespace bscope::mma
