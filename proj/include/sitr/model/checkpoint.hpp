#pragma once

#include <filesystem>
#include <string>

#include "sitr/model/encoder.hpp"

namespace sitr::model {

// Writes config.json plus one f32 tensor file per named parameter into dir.
// Loading rebuilds the state from the stored config and restores every
// parameter bitwise; the positional table is recomputed, never stored.
void save_checkpoint(const std::filesystem::path& dir,
                     const EncoderState<float>& st);
EncoderState<float> load_checkpoint(const std::filesystem::path& dir);

// SHA-256 over parameter names and payload bytes, in registry order. Equal
// checksums before and after a pass prove the parameters were not touched.
std::string state_checksum(const EncoderState<float>& st);

}  // namespace sitr::model
