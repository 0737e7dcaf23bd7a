#pragma once

#include <array>

#include "rts/image.hpp"

namespace rts {

enum class DegradeOrder { compress_then_downscale, downscale_then_compress };

struct DegradeConfig {
    int quality = 30;  // 1..100
    DegradeOrder order = DegradeOrder::compress_then_downscale;
    bool enabled = true;
};

/// Orthonormal 2-D DCT-II of an 8x8 block; dct8_inverse composes to identity.
void dct8_forward(const std::array<double, 64>& block, std::array<double, 64>& coeffs);
void dct8_inverse(const std::array<double, 64>& coeffs, std::array<double, 64>& block);

/// Block-DCT quantization with the standard JPEG luminance table scaled by
/// the usual quality factor; same table for all channels, no entropy coding.
ImageF jpeg_surrogate(const ImageF& img, int quality);

/// LR construction: compression surrogate plus half-size downscale in the
/// configured order; enabled=false bypasses compression.
ImageF make_lr(const ImageF& hr, const DegradeConfig& cfg);

}  // namespace rts
