#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sst/autodiff/parameters.hpp"

namespace sst::ad {

// Binary checkpoint layout (all integers little-endian):
//   "SSTCKPT" (7 bytes) | version u32 | records until end of file
//   record: name length u32 | UTF-8 name | rank u32 | dims u64 x rank |
//               dtype u8 (0 = f64, 1 = f32) | payload
inline constexpr char kCheckpointMagic[] = "SSTCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { f64 = 0, f32 = 1 };

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                      DType dtype = DType::f64);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

void save_parameters(const std::filesystem::path& path, const ParameterStore& store,
                     DType dtype = DType::f64);
// Loads into an already-shaped store; every store entry must be present.
void load_parameters(const std::filesystem::path& path, ParameterStore& store);

}  // namespace sst::ad
