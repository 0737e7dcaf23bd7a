#pragma once

#include <cstdint>
#include <vector>

#include "rts/image.hpp"

namespace rts {

/// `count` random size x size crops at seeded uniform top-left positions;
/// duplicates permitted.
std::vector<ImageF> extract_patches(const ImageF& img, int size, int count, std::uint64_t seed);

/// Single deterministic center crop (validation convenience).
ImageF center_crop(const ImageF& img, int size);

}  // namespace rts
