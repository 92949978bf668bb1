#include "cor/restorers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "cor/kernels.hpp"
#include "cor/metrics.hpp"

namespace cor {

RestorerRegistry::RestorerRegistry(RestorerMode mode, BasisSet bases)
    : mode_(mode), bases_(std::move(bases)) {
    if (bases_.size() == 0)
        throw std::invalid_argument("RestorerRegistry: empty basis set");
}

std::pair<Image, SynthesisRecord> RestorerRegistry::oracle_remove(
    const Image& img, const DegradationLabel& basis, const SynthesisRecord& record) const {
    // Match each basis part against a remaining record component, outermost
    // matching component first so the algebraic inverses compose cleanly
    // within the call.
    std::vector<bool> used(record.applied.size(), false);
    std::vector<size_t> targets;
    auto parts = basis.composition_order();
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        bool found = false;
        for (size_t i = record.applied.size(); i-- > 0;) {
            if (!used[i] && record.applied[i].symbol == *it) {
                used[i] = true;
                targets.push_back(i);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error("oracle_remove: basis component '" + *it +
                                     "' is not among the record's remaining components");
    }
    // targets are outermost-first already (descending record index per part
    // rank); sort descending to be explicit
    std::sort(targets.rbegin(), targets.rend());

    Image out = img;
    for (size_t i : targets) out = invert_component(out, record.applied[i]);

    SynthesisRecord updated;
    updated.clean_ref = record.clean_ref;
    for (size_t i = 0; i < record.applied.size(); ++i)
        if (!used[i]) updated.applied.push_back(record.applied[i]);
    return {std::move(out), std::move(updated)};
}

Image RestorerRegistry::restore(const Image& img, const DegradationLabel& basis,
                                const SynthesisRecord* context) const {
    if (!has(basis))
        throw std::invalid_argument("restore: basis '" + basis.canonical_key() +
                                    "' is not in the registry");
    if (mode_ == RestorerMode::Oracle) {
        if (!context)
            throw std::invalid_argument("restore: oracle mode requires a synthesis record");
        return oracle_remove(img, basis, *context).first;
    }
    Image out = img;
    auto parts = basis.composition_order();
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        out = classical_restore_symbol(out, *it);
    return out;
}

double coupling_gap(const Image& clean, const SynthesisRecord& record_remaining,
                    const Image& after_removal, const DegradationLabel& remaining) {
    if (!(record_remaining.label() == remaining))
        throw std::invalid_argument("coupling_gap: remaining label does not match record");
    Image reference = resynthesize(clean, record_remaining);
    return psnr(after_removal, reference);
}

// ---------------------------------------------------------------------------
// classical restorers

Image classical_denoise(const Image& img, double sigma_hint) {
    Image median = kernels::median3(img);
    double range_sigma = std::max(0.02, 2.0 * sigma_hint / 255.0);
    return kernels::bilateral(median, 1.5, range_sigma, 2);
}

Image classical_dehaze(const Image& img) {
    constexpr double t_floor = 0.1;
    const int H = img.height, W = img.width;

    // dark channel: per-pixel channel minimum, then 7x7 min filter
    Image chan_min(H, W, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double m = clamp01(img.at(y, x, 0));
            for (int c = 1; c < img.channels; ++c)
                m = std::min(m, clamp01(img.at(y, x, c)));
            chan_min.at(y, x, 0) = m;
        }
    Image dark = kernels::min_filter(chan_min, 3);

    // Haze lifts the darkest pixels everywhere, so the low percentile of the
    // (noise-robust) median-filtered channel minimum estimates haze density.
    // Ramp the correction strength with it so haze-free inputs pass through
    // nearly untouched instead of being stretched by a spurious step.
    Image med = kernels::median3(chan_min);
    std::vector<double> floor_vals = med.data;
    std::sort(floor_vals.begin(), floor_vals.end());
    double haze_floor = floor_vals[floor_vals.size() / 100];
    double omega = 0.95 * std::clamp((haze_floor - 0.20) / 0.08, 0.0, 1.0);
    if (omega == 0.0) return img;

    // airlight: mean image intensity over the brightest 0.1% dark-channel pixels
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(dark.data.size());
    for (size_t i = 0; i < dark.data.size(); ++i)
        ranked.emplace_back(dark.data[i], static_cast<int>(i));
    size_t top = std::max<size_t>(1, ranked.size() / 1000);
    std::partial_sort(ranked.begin(), ranked.begin() + top, ranked.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    double airlight = 0.0;
    for (size_t k = 0; k < top; ++k) {
        int idx = ranked[k].second;
        int y = idx / W, x = idx % W;
        double v = 0.0;
        for (int c = 0; c < img.channels; ++c) v += clamp01(img.at(y, x, c));
        airlight += v / img.channels;
    }
    airlight /= static_cast<double>(top);
    airlight = std::clamp(airlight, 0.05, 1.0);

    Image out(H, W, img.channels);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double t = std::max(t_floor, 1.0 - omega * dark.at(y, x, 0));
            for (int c = 0; c < img.channels; ++c)
                out.at(y, x, c) = (img.at(y, x, c) - airlight * (1.0 - t)) / t;
        }
    return out;
}

namespace {

// dominant streak angle from a gradient orientation histogram on luma
double estimate_streak_angle(const Image& img) {
    Image gray = to_gray(img);
    const int H = gray.height, W = gray.width;
    constexpr int bins = 36;  // 5 degree resolution over [0,180)
    std::vector<double> hist(bins, 0.0);
    for (int y = 1; y < H - 1; ++y)
        for (int x = 1; x < W - 1; ++x) {
            double gx = gray.at(y, x + 1, 0) - gray.at(y, x - 1, 0);
            double gy = gray.at(y + 1, x, 0) - gray.at(y - 1, x, 0);
            double mag = std::sqrt(gx * gx + gy * gy);
            if (mag < 0.05) continue;
            // gradient is perpendicular to the streak direction
            double ang = std::atan2(-gy, gx) * 180.0 / 3.14159265358979323846 + 90.0;
            while (ang < 0) ang += 180.0;
            while (ang >= 180.0) ang -= 180.0;
            int b = std::min(bins - 1, static_cast<int>(ang / 180.0 * bins));
            hist[b] += mag;
        }
    int best = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    return (best + 0.5) * 180.0 / bins;
}

}  // namespace

Image classical_derain(const Image& img) {
    double angle = estimate_streak_angle(img);
    // median along the streak direction suppresses the thin bright streaks
    return kernels::directional_median(img, angle, 9);
}

Image classical_desnow(const Image& img) {
    return kernels::median_window(img, 2);
}

Image classical_delowlight(const Image& img) {
    // Assume the clean scene spans roughly [0.05, 0.95]; fit gain and gamma
    // to the observed 1st/99th luminance percentiles.
    Image gray = to_gray(img);
    std::vector<double> vals = gray.data;
    for (auto& v : vals) v = clamp01(v);
    std::sort(vals.begin(), vals.end());
    auto pct = [&](double q) {
        size_t i = static_cast<size_t>(q * (vals.size() - 1));
        return std::max(vals[i], 1e-4);
    };
    double p_lo = pct(0.01), p_hi = pct(0.99);
    constexpr double ref_lo = 0.05, ref_hi = 0.95;
    double gamma_hat = std::log(p_hi / p_lo) / std::log(ref_hi / ref_lo);
    gamma_hat = std::clamp(gamma_hat, 1.0, 4.0);
    double gain_hat = std::clamp(p_hi / std::pow(ref_hi, gamma_hat), 0.05, 1.0);

    // scale the correction with how dark the image actually is, so a
    // spurious step on a well-lit image degenerates to the identity
    double luma = 0.0;
    for (double v : gray.data) luma += clamp01(v);
    luma /= static_cast<double>(gray.data.size());
    double strength = std::clamp((0.35 - luma) / 0.10, 0.0, 1.0);
    if (strength == 0.0) return img;
    gamma_hat = 1.0 + strength * (gamma_hat - 1.0);
    gain_hat = 1.0 + strength * (gain_hat - 1.0);

    Image out = img;
    double inv_gamma = 1.0 / gamma_hat;
    for (auto& v : out.data) {
        double u = std::max(0.0, v) / gain_hat;
        v = std::pow(u, inv_gamma);
    }
    return out;
}

Image classical_restore_symbol(const Image& img, const std::string& symbol) {
    if (symbol == "noise15") return classical_denoise(img, 15.0);
    if (symbol == "noise25") return classical_denoise(img, 25.0);
    if (symbol == "noise50") return classical_denoise(img, 50.0);
    if (symbol == "haze") return classical_dehaze(img);
    if (symbol == "rain") return classical_derain(img);
    if (symbol == "snow") return classical_desnow(img);
    if (symbol == "low") return classical_delowlight(img);
    throw std::invalid_argument("classical_restore_symbol: unknown symbol '" + symbol + "'");
}

}  // namespace cor
