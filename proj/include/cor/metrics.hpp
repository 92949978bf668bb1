#pragma once

#include "cor/image.hpp"
#include "cor/rng.hpp"

namespace cor {

// Both metrics compare the clamped [0,1] view of their inputs and are
// symmetric. psnr pools per-channel squared error over all channels,
// peak 1.0; zero MSE yields +inf. ssim converts to luma first and averages
// local SSIM over 11x11 Gaussian (sigma 1.5) windows; images smaller than
// the window fall back to one full-image window.
double mse(const Image& a, const Image& b, bool parallel = true);
double psnr(const Image& a, const Image& b, bool parallel = true);
double ssim(const Image& a, const Image& b, bool parallel = true);

namespace serial {
inline double psnr(const Image& a, const Image& b) { return cor::psnr(a, b, false); }
inline double ssim(const Image& a, const Image& b) { return cor::ssim(a, b, false); }
}  // namespace serial

// size x size crop at a uniform random valid offset; the whole image when
// either dimension is smaller than size.
Image random_crop(const Image& img, int size, Rng& rng);

}  // namespace cor
