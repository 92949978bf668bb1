#pragma once

#include <string>

#include "cor/image.hpp"

namespace cor {

// 8-bit grayscale or RGB PNG only. Load maps level v to v/255; save clamps
// to [0,1], scales by 255 and rounds half-up.
Image load_png(const std::string& path);
void save_png(const Image& img, const std::string& path);

}  // namespace cor
