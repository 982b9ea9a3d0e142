#pragma once

#include <string>

#include "hetlink/layers.hpp"

namespace hetlink {

// Versioned binary container: encoder kind, dimension metadata and every
// named parameter tensor. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace hetlink
