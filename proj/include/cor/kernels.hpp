#pragma once

#include "cor/image.hpp"

namespace cor::kernels {

// All kernels are pure per-pixel/per-row loops; the parallel flag only
// switches OpenMP on, outputs are identical either way. Borders reflect.

Image gaussian_blur(const Image& img, double sigma, bool parallel = true);
Image min_filter(const Image& gray, int radius, bool parallel = true);
Image median3(const Image& img, bool parallel = true);
Image median_window(const Image& img, int radius, bool parallel = true);
Image bilateral(const Image& img, double spatial_sigma, double range_sigma,
                int radius, bool parallel = true);
// Median along a line of `length` samples through each pixel at `angle_deg`
// (image-plane degrees, 90 = vertical).
Image directional_median(const Image& img, double angle_deg, int length,
                         bool parallel = true);

namespace serial {
inline Image gaussian_blur(const Image& i, double s) { return kernels::gaussian_blur(i, s, false); }
inline Image min_filter(const Image& g, int r) { return kernels::min_filter(g, r, false); }
inline Image median3(const Image& i) { return kernels::median3(i, false); }
inline Image median_window(const Image& i, int r) { return kernels::median_window(i, r, false); }
inline Image bilateral(const Image& i, double ss, double rs, int r) {
    return kernels::bilateral(i, ss, rs, r, false);
}
inline Image directional_median(const Image& i, double a, int l) {
    return kernels::directional_median(i, a, l, false);
}
}  // namespace serial

}  // namespace cor::kernels
