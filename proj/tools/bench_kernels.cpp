// Benchmark of the OpenMP kernels against their serial reference
// implementations. Both paths must agree bit-for-bit; this tool reports the
// wall-clock ratio on this machine.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "cor/kernels.hpp"
#include "cor/metrics.hpp"
#include "cor/rng.hpp"
#include "cor/synthesis.hpp"

using namespace cor;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto start = clock_type::now();
    for (int i = 0; i < reps; ++i) fn();
    auto stop = clock_type::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const std::string& name, const std::function<void()>& parallel,
            const std::function<void()>& serial, int reps) {
    double tp = time_ms(parallel, reps);
    double ts = time_ms(serial, reps);
    std::printf("%-20s parallel %8.2f ms   serial %8.2f ms   speedup %.2fx\n", name.c_str(), tp,
                ts, ts / tp);
}

}  // namespace

int main(int argc, char** argv) {
    int size = argc > 1 ? std::atoi(argv[1]) : 512;
    int reps = argc > 2 ? std::atoi(argv[2]) : 3;

    Rng rng(7);
    Image img(size, size, 3);
    for (auto& v : img.data) v = rng.next_double();
    Image other = img;
    for (auto& v : other.data) v += 0.05 * rng.gaussian();

    std::printf("image %dx%dx3, %d reps per timing\n", size, size, reps);
    report("gaussian_blur s=1.5", [&] { kernels::gaussian_blur(img, 1.5); },
           [&] { kernels::serial::gaussian_blur(img, 1.5); }, reps);
    report("min_filter 7x7", [&] { kernels::min_filter(img, 3); },
           [&] { kernels::serial::min_filter(img, 3); }, reps);
    report("median3", [&] { kernels::median3(img); },
           [&] { kernels::serial::median3(img); }, reps);
    report("median_window 5x5", [&] { kernels::median_window(img, 2); },
           [&] { kernels::serial::median_window(img, 2); }, reps);
    report("bilateral r=2", [&] { kernels::bilateral(img, 1.5, 0.1, 2); },
           [&] { kernels::serial::bilateral(img, 1.5, 0.1, 2); }, reps);
    report("directional_median", [&] { kernels::directional_median(img, 80.0, 9); },
           [&] { kernels::serial::directional_median(img, 80.0, 9); }, reps);
    report("psnr", [&] { psnr(img, other); }, [&] { serial::psnr(img, other); }, reps);
    report("ssim", [&] { ssim(img, other); }, [&] { serial::ssim(img, other); }, reps);
    return 0;
}
