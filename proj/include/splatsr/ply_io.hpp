#pragma once

#include <filesystem>

#include "splatsr/splat.hpp"

namespace splatsr {

// Binary little-endian PLY in the community Gaussian-splat vertex layout:
// x,y,z, nx,ny,nz (zeros), f_dc_0..2, f_rest_0..44 (channel-major higher-order
// SH), opacity (logit), scale_0..2 (log), rot_0..3 (quaternion wxyz).
// 62 float32 properties per vertex.

SplatScene<float> load_ply(const std::filesystem::path& path);
void save_ply(const SplatScene<float>& scene, const std::filesystem::path& path);

}  // namespace splatsr
