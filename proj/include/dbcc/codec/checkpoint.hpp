#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbcc/codec/network.hpp"

namespace dbcc {

// Model checkpoint: config header followed by the named parameter blobs in
// registration order, little-endian 32-bit floats. Save/load round trips
// byte-identically.
std::vector<std::uint8_t> serialize_checkpoint(const Model<float>& model);
Model<float> deserialize_checkpoint(const std::uint8_t* data,
                                    std::size_t size);

void save_checkpoint(const std::string& path, const Model<float>& model);
Model<float> load_checkpoint(const std::string& path);

}  // namespace dbcc
