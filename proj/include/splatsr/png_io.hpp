#pragma once

#include <filesystem>

#include "splatsr/image.hpp"

namespace splatsr {

// 8-bit RGB PNG with the sRGB transfer function at the boundary; in-memory
// frames stay linear float.
void write_png(const std::filesystem::path& path, const Image<float>& img);
Image<float> read_png(const std::filesystem::path& path);

}  // namespace splatsr
