#pragma once

#include "rts/image.hpp"

namespace rts {

enum class KernelKind { lanczos3, bilinear, nearest };

/// Windowed sinc: sinc(x)*sinc(x/a) for |x| < a, 0 outside, 1 at the origin.
double lanczos_weight(double x, int a);

/// Half-size separable resampling with the kernel stretched by the scale
/// factor (anti-aliased), per-pixel weight normalization and edge-replicate
/// boundaries. Requires even width and height.
ImageF downscale2x(const ImageF& img, bool clamp = true, KernelKind kind = KernelKind::lanczos3);

/// Double-size separable interpolation at unit kernel scale. Analysis
/// operator only; the network upscales via pixel shuffle instead.
ImageF upscale2x(const ImageF& img, bool clamp = true, KernelKind kind = KernelKind::lanczos3);

/// Separable Gaussian, kernel radius ceil(3*sigma), edge-replicate.
ImageF gaussian_blur(const ImageF& img, double sigma);

/// clamp(img + lambda*(img - blur(img, sigma)), 0, 1)
ImageF unsharp_mask(const ImageF& img, double lambda, double sigma);

}  // namespace rts
