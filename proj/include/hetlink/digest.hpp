#pragma once

#include <cstdint>
#include <string>

namespace hetlink {

// SHA-256 as lowercase hex; used for the reproducibility digests in run
// manifests.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

}  // namespace hetlink
