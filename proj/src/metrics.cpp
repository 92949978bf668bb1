#include "cor/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cor/kernels.hpp"

namespace cor {

namespace {

void check_shapes(const Image& a, const Image& b, const char* who) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(who) + ": image shapes differ");
}

}  // namespace

double mse(const Image& a, const Image& b, bool parallel) {
    check_shapes(a, b, "mse");
    const int H = a.height;
    // Per-row partials summed serially so the result does not depend on the
    // thread count.
    std::vector<double> rows(H, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < H; ++y) {
        double acc = 0.0;
        for (int x = 0; x < a.width; ++x)
            for (int c = 0; c < a.channels; ++c) {
                double d = clamp01(a.at(y, x, c)) - clamp01(b.at(y, x, c));
                acc += d * d;
            }
        rows[y] = acc;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total / (a.pixel_count() * a.channels);
}

double psnr(const Image& a, const Image& b, bool parallel) {
    double m = mse(a, b, parallel);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const Image& a, const Image& b, bool parallel) {
    check_shapes(a, b, "ssim");
    constexpr double C1 = 0.01 * 0.01;
    constexpr double C2 = 0.03 * 0.03;
    constexpr int win = 11;
    constexpr double sigma = 1.5;

    Image ga = to_gray(a);
    Image gb = to_gray(b);
    const int H = ga.height, W = ga.width;
    for (auto& v : ga.data) v = clamp01(v);
    for (auto& v : gb.data) v = clamp01(v);

    if (H < win || W < win) {
        // one full-image window, uniform weights
        double ma = 0, mb = 0;
        for (size_t i = 0; i < ga.data.size(); ++i) { ma += ga.data[i]; mb += gb.data[i]; }
        ma /= ga.data.size();
        mb /= gb.data.size();
        double va = 0, vb = 0, cov = 0;
        for (size_t i = 0; i < ga.data.size(); ++i) {
            va += (ga.data[i] - ma) * (ga.data[i] - ma);
            vb += (gb.data[i] - mb) * (gb.data[i] - mb);
            cov += (ga.data[i] - ma) * (gb.data[i] - mb);
        }
        double n = static_cast<double>(ga.data.size());
        va /= n; vb /= n; cov /= n;
        return ((2 * ma * mb + C1) * (2 * cov + C2)) /
               ((ma * ma + mb * mb + C1) * (va + vb + C2));
    }

    // Gaussian window taps
    const int r = win / 2;
    std::vector<double> w(win * win);
    double wsum = 0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            double v = std::exp(-0.5 * (dy * dy + dx * dx) / (sigma * sigma));
            w[(dy + r) * win + (dx + r)] = v;
            wsum += v;
        }
    for (auto& v : w) v /= wsum;

    const int outH = H - win + 1, outW = W - win + 1;
    std::vector<double> rowsum(outH, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < outH; ++y) {
        double acc = 0.0;
        for (int x = 0; x < outW; ++x) {
            double ma = 0, mb = 0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    double wt = w[dy * win + dx];
                    ma += wt * ga.at(y + dy, x + dx, 0);
                    mb += wt * gb.at(y + dy, x + dx, 0);
                }
            double va = 0, vb = 0, cov = 0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    double wt = w[dy * win + dx];
                    double da = ga.at(y + dy, x + dx, 0) - ma;
                    double db = gb.at(y + dy, x + dx, 0) - mb;
                    va += wt * da * da;
                    vb += wt * db * db;
                    cov += wt * da * db;
                }
            acc += ((2 * ma * mb + C1) * (2 * cov + C2)) /
                   ((ma * ma + mb * mb + C1) * (va + vb + C2));
        }
        rowsum[y] = acc;
    }
    double total = 0.0;
    for (double v : rowsum) total += v;
    return total / (static_cast<double>(outH) * outW);
}

Image random_crop(const Image& img, int size, Rng& rng) {
    if (img.height < size || img.width < size) return img;
    int oy = static_cast<int>(rng.next_below(img.height - size + 1));
    int ox = static_cast<int>(rng.next_below(img.width - size + 1));
    Image out(size, size, img.channels);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(y, x, c) = img.at(oy + y, ox + x, c);
    return out;
}

}  // namespace cor
