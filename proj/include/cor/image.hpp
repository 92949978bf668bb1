#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cor {

// Raster in linear intensity, nominal [0,1] but unclipped between pipeline
// stages. Clamping happens only at 8-bit export and inside the metrics.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;          // 1 or 3
    std::vector<double> data;  // row-major, interleaved channels

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {
        if (h < 1 || w < 1 || (c != 1 && c != 3))
            throw std::invalid_argument("Image: bad dimensions " +
                                        std::to_string(h) + "x" + std::to_string(w) +
                                        "x" + std::to_string(c));
    }

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Level v maps to v/255 on load; export rounds half-up after clamping.
inline uint8_t to_level(double v) {
    double s = clamp01(v) * 255.0;
    int lv = static_cast<int>(s + 0.5);
    return static_cast<uint8_t>(std::min(lv, 255));
}

// Rec.601 luma. Single-channel images pass through.
double luma_at(const Image& img, int y, int x);
Image to_gray(const Image& img);

}  // namespace cor
