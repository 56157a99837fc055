#pragma once

#include "warpkit/geometry.hpp"

namespace warpkit {

/// Peak signal-to-noise ratio in dB for samples in [0,1]. When a mask is
/// given, the squared error is averaged with per-pixel mask weights.
/// Identical inputs give +infinity. Throws DimensionError on shape mismatch
/// and ValueError when the mask weights sum to zero.
double psnr(const ImageBuffer& a, const ImageBuffer& b, const Mask* mask = nullptr);

/// Mean structural similarity over the valid region of an 11x11 Gaussian
/// window (sigma 1.5), constants K1=0.01, K2=0.03, dynamic range 1.0;
/// channels are averaged. Both images must be at least 11x11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

} // namespace warpkit
