#pragma once

#include <map>
#include <string>

#include "mkit/image.h"

namespace mkit {

// 64-bit perceptual hashes as 16 hex digits, keyed pHash, aHash,
// dHash_horizontal, dHash_vertical. Informational only.
std::map<std::string, std::string> perceptual_hashes(const RgbImage& image);

}  // namespace mkit
