#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "botsense/layers.h"

namespace botsense {

constexpr char kCheckpointMagic[] = "BSNN1";
constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { Float32 = 1, Float64 = 2 };

// One stored tensor; `bytes` holds the little-endian raw values.
struct CheckpointTensor {
  std::string name;
  DType dtype = DType::Float32;
  Shape shape;
  std::string bytes;
};

// Layout: "BSNN1", u32 version, then per tensor: u32 name length, name,
// u8 dtype, u32 rank, rank x u32 dims, raw values. Integers little-endian.
std::string encode_checkpoint(const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> decode_checkpoint(const std::string& bytes);

void write_checkpoint_file(const std::string& path, const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> read_checkpoint_file(const std::string& path);

template <typename T>
CheckpointTensor to_checkpoint(const Param<T>& p);

// Copies stored values into `params` by name. Every param must be present
// with identical shape and dtype; extra stored tensors are rejected too.
template <typename T>
void load_params(const std::vector<CheckpointTensor>& stored, const std::vector<Param<T>*>& params);

}  // namespace botsense
