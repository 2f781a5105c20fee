#pragma once

#include "gdmd/mlp.hpp"

#include <filesystem>

namespace gdmd::nn {

/// Flat binary model record (header + little-endian float64 parameter block).
/// The exact byte layout is documented in docs/file_formats.md.
void save_checkpoint(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace gdmd::nn
