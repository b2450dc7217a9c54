#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "kg/model.hpp"

namespace kg {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointHeader {
  int format_version = kCheckpointFormatVersion;
  ModelSpec spec;
  std::int64_t num_entities = 0;
  std::int64_t num_relations = 0;
  std::uint64_t seed = 0;

  bool operator==(const CheckpointHeader&) const = default;
};

struct Checkpoint {
  CheckpointHeader header;
  ModelParams<float> params;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layout: one JSON header line, then little-endian float32 arrays in the
/// order entity, relation, hidden (row-major), out, bias. The MLP arrays are
/// absent for kinds without a hidden layer.
void write_checkpoint(std::ostream& out, const CheckpointHeader& header, const ModelParams<float>& params);
Checkpoint read_checkpoint(std::istream& in);

std::string checkpoint_bytes(const CheckpointHeader& header, const ModelParams<float>& params);
void save_checkpoint(const std::string& path, const CheckpointHeader& header, const ModelParams<float>& params);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace kg
