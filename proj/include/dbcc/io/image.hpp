#pragma once

#include <string>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

// 8-bit RGB image I/O: PNG and binary PPM (P6). Loads to [3,H,W] with
// pixels scaled to [0,1]; images with an alpha channel are rejected.
// The format is detected from the file's magic bytes on read and from the
// extension (.png / .ppm) on write.
Tensor<float> load_image(const std::string& path);
void save_image(const std::string& path, const Tensor<float>& image);

}  // namespace dbcc
