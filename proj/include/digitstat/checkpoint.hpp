#pragma once

// Versioned text checkpoints of an Analyzer. Only integers are stored (sums as
// decimal strings); floating-point fields are recomputed on load, so a resumed
// run is bit-identical to an uninterrupted one on any platform.
//
//   digitstat-checkpoint 1
//   fingerprint <16 hex digits>
//   position <digits consumed from the source>
//   ...state lines...
//   checksum <16 hex digits, FNV-1a of every preceding line>

#include <cstdint>
#include <filesystem>
#include <string>

#include "digitstat/analyzer.hpp"

namespace digitstat {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointData {
  std::string fingerprint;
  std::uint64_t position = 0;
};

std::string encode_checkpoint(const Analyzer& analyzer, const CheckpointData& meta);

/// Parses `text` into `analyzer` (constructed from the live options).
/// Throws CheckpointError on version or fingerprint mismatch and on any
/// corruption.
CheckpointData decode_checkpoint(const std::string& text, const std::string& expected_fingerprint,
                                 Analyzer& analyzer);

/// Writes to a temporary sibling and renames it into place, so a failed write
/// never clobbers the previous checkpoint.
void checkpoint_save(const std::filesystem::path& path, const Analyzer& analyzer,
                     const CheckpointData& meta);

CheckpointData checkpoint_load(const std::filesystem::path& path,
                               const std::string& expected_fingerprint, Analyzer& analyzer);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace digitstat
