#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "srp/srpnet.hpp"
#include "srp/train.hpp"

namespace srp::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    SrpModel model;
    std::optional<AdamState<float>> optimizer;
    std::uint64_t update_count = 0;
};

// Container: "SRPCKPT\0" | u32 version | u64 header bytes | JSON header |
// concatenated little-endian f32 blobs. The header records hyper-parameters,
// seed, update count and a (name, shape, offset) manifest for every blob.
void save_checkpoint(const std::filesystem::path& path, const SrpModel& model,
                     const AdamState<float>* optimizer = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace srp::nn
