#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

struct PatchDataset {
  std::vector<Tensor<float>> patches;  // each [3, patch, patch] in [0,1]
};

// Deterministic seeded patch extraction from a directory of PNG/PPM
// images. Augmentations (when enabled): scale jitter in [0.75, 1.25]
// applied as a resized source crop, 90-degree rotations and horizontal
// flips. Unreadable or too-small images are skipped with a warning; an
// empty result is an error.
PatchDataset make_patches(const std::string& image_dir, int patch, int count,
                          std::uint64_t seed, bool augment);

}  // namespace dbcc
