#include "cor/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cor::kernels {

namespace {

int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

std::vector<double> gaussian_taps(double sigma, int& radius) {
    radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[i + radius] = v;
        sum += v;
    }
    for (auto& t : taps) t /= sum;
    return taps;
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma, bool parallel) {
    if (sigma <= 0.0) return img;
    int radius = 0;
    auto taps = gaussian_taps(sigma, radius);
    Image tmp(img.height, img.width, img.channels);
    Image out(img.height, img.width, img.channels);
    const int H = img.height, W = img.width, C = img.channels;

    // horizontal pass
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += taps[k + radius] * img.at(y, reflect(x + k, W), c);
                tmp.at(y, x, c) = acc;
            }
    // vertical pass
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += taps[k + radius] * tmp.at(reflect(y + k, H), x, c);
                out.at(y, x, c) = acc;
            }
    return out;
}

Image min_filter(const Image& gray, int radius, bool parallel) {
    Image out(gray.height, gray.width, gray.channels);
    const int H = gray.height, W = gray.width, C = gray.channels;
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double m = gray.at(y, x, c);
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx)
                        m = std::min(m, gray.at(reflect(y + dy, H), reflect(x + dx, W), c));
                out.at(y, x, c) = m;
            }
    return out;
}

Image median3(const Image& img, bool parallel) {
    return median_window(img, 1, parallel);
}

Image median_window(const Image& img, int radius, bool parallel) {
    Image out(img.height, img.width, img.channels);
    const int H = img.height, W = img.width, C = img.channels;
    const int n = (2 * radius + 1) * (2 * radius + 1);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y) {
        std::vector<double> buf(n);
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                int i = 0;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx)
                        buf[i++] = img.at(reflect(y + dy, H), reflect(x + dx, W), c);
                std::nth_element(buf.begin(), buf.begin() + n / 2, buf.end());
                out.at(y, x, c) = buf[n / 2];
            }
    }
    return out;
}

Image bilateral(const Image& img, double spatial_sigma, double range_sigma,
                int radius, bool parallel) {
    Image out(img.height, img.width, img.channels);
    const int H = img.height, W = img.width, C = img.channels;
    std::vector<double> spatial((2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            spatial[(dy + radius) * (2 * radius + 1) + (dx + radius)] =
                std::exp(-0.5 * (dy * dy + dx * dx) / (spatial_sigma * spatial_sigma));
    const double inv2r2 = 0.5 / (range_sigma * range_sigma);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                const double center = img.at(y, x, c);
                double acc = 0.0, wsum = 0.0;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx) {
                        double v = img.at(reflect(y + dy, H), reflect(x + dx, W), c);
                        double d = v - center;
                        double w = spatial[(dy + radius) * (2 * radius + 1) + (dx + radius)] *
                                   std::exp(-d * d * inv2r2);
                        acc += w * v;
                        wsum += w;
                    }
                out.at(y, x, c) = acc / wsum;
            }
    return out;
}

Image directional_median(const Image& img, double angle_deg, int length,
                         bool parallel) {
    Image out(img.height, img.width, img.channels);
    const int H = img.height, W = img.width, C = img.channels;
    const double a = angle_deg * 3.14159265358979323846 / 180.0;
    const double dx = std::cos(a), dy = -std::sin(a);  // y axis points down
    const int half = length / 2;
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y) {
        std::vector<double> buf;
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                buf.clear();
                for (int k = -half; k <= half; ++k) {
                    int sx = reflect(x + static_cast<int>(std::lround(k * dx)), W);
                    int sy = reflect(y + static_cast<int>(std::lround(k * dy)), H);
                    buf.push_back(img.at(sy, sx, c));
                }
                std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
                out.at(y, x, c) = buf[buf.size() / 2];
            }
    }
    return out;
}

}  // namespace cor::kernels
