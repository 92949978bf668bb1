#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cor/kernels.hpp"
#include "cor/metrics.hpp"
#include "cor/rng.hpp"
#include "cor/synthesis.hpp"

using namespace cor;

namespace {

Image random_image(uint64_t seed, int h, int w, int c) {
    Rng rng(seed);
    Image img(h, w, c);
    for (auto& v : img.data) v = rng.next_double();
    return img;
}

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    Image img = random_image(1, 83, 61, 3);  // odd sizes stress the row split
    CHECK(kernels::gaussian_blur(img, 1.3).data == kernels::serial::gaussian_blur(img, 1.3).data);
    CHECK(kernels::min_filter(img, 3).data == kernels::serial::min_filter(img, 3).data);
    CHECK(kernels::median3(img).data == kernels::serial::median3(img).data);
    CHECK(kernels::median_window(img, 2).data == kernels::serial::median_window(img, 2).data);
    CHECK(kernels::bilateral(img, 1.5, 0.1, 2).data ==
          kernels::serial::bilateral(img, 1.5, 0.1, 2).data);
    CHECK(kernels::directional_median(img, 72.0, 9).data ==
          kernels::serial::directional_median(img, 72.0, 9).data);
}

TEST_CASE("parallel metrics match the serial reference") {
    Image a = gen_clean(2, 97, 103);
    Image b = apply_noise(a, NoiseParams{25.0, 3});
    CHECK(psnr(a, b) == serial::psnr(a, b));
    CHECK(ssim(a, b) == serial::ssim(a, b));
}

TEST_CASE("gaussian blur preserves a constant image") {
    Image img(32, 32, 1, 0.42);
    Image out = kernels::gaussian_blur(img, 2.0);
    for (double v : out.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("min filter lower-bounds the input") {
    Image img = random_image(4, 40, 40, 1);
    Image out = kernels::min_filter(img, 2);
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(out.data[i] <= img.data[i]);
}

TEST_CASE("median window is idempotent on constants and bounded by extremes") {
    Image img = random_image(5, 40, 40, 1);
    Image out = kernels::median_window(img, 1);
    double mn = 1e9, mx = -1e9;
    for (double v : img.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (double v : out.data) {
        CHECK(v >= mn);
        CHECK(v <= mx);
    }
}
