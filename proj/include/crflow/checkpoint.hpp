#pragma once

#include <string>

#include "crflow/flow.hpp"

namespace crflow {

/// Self-describing header of a checkpoint file; the numeric payload (time,
/// periods, arrays) lives in the binary section so round-trips are bit-exact.
struct CheckpointMeta {
  Formulation formulation = Formulation::tensor;
  int n = 0;
  int N = 0;  // 0 for closed-form trajectories
  std::vector<double> periods;
};

struct CheckpointFile {
  CheckpointMeta meta;
  CheckpointData data;
};

std::string serialize_checkpoint(const CheckpointMeta& meta, const CheckpointData& data);
CheckpointFile deserialize_checkpoint(const std::string& bytes);

void write_checkpoint(const std::string& path, const CheckpointMeta& meta,
                      const CheckpointData& data);
CheckpointFile read_checkpoint(const std::string& path);

CheckpointMeta checkpoint_meta(const Trajectory& tr);

}  // namespace crflow
