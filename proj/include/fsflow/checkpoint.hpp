#pragma once

#include <json.hpp>
#include <string>

#include "fsflow/dynamics.hpp"
#include "fsflow/model.hpp"

namespace fsflow {

/// Binary checkpoint container.
///
/// Layout: the 8-byte magic "FSFCKPT1", a little-endian uint64 header length,
/// a UTF-8 JSON header, then raw little-endian float64 arrays in the order
/// listed under "arrays" in the header. Volume fields are stored vertical
/// node fastest (one horizontal point after another); surface fields in
/// horizontal point order. The header carries the grid parameters and the
/// caller's metadata (normally the run configuration).
struct CheckpointData {
  nlohmann::ordered_json meta;
  State state;
  StepperHistory history;
};

void write_checkpoint(const std::string& path, const Grid& grid, const nlohmann::ordered_json& meta, const State& state,
                      const StepperHistory& history);

/// Throws ConfigError on a malformed file or when the stored grid differs
/// from `grid`.
CheckpointData read_checkpoint(const std::string& path, const Grid& grid);

}  // namespace fsflow
