#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cor/algebra.hpp"
#include "cor/image.hpp"
#include "cor/rng.hpp"

namespace cor {

// Per-component parameters. Every stochastic variant carries the seed its
// additive field is regenerated from, so inversion is exact.
struct NoiseParams {
    double sigma = 15.0;  // 8-bit units; applied std is sigma/255
    uint64_t seed = 0;
};

struct HazeParams {
    double airlight = 0.8;          // A in (0,1]
    bool ramp = false;              // false: uniform t, true: left-right linear ramp
    double t = 0.6;                 // uniform mode
    double t_lo = 0.3, t_hi = 0.9;  // ramp mode
};

struct RainParams {
    int count = 150;
    double angle_deg = 80.0;  // [60,120]
    double length = 20.0;     // pixels
    double intensity = 0.25;  // [0.1,0.4]
    double blur_sigma = 0.7;
    uint64_t seed = 0;
};

struct LowLightParams {
    double gamma = 2.0;  // [1.5,3.0]
    double gain = 0.5;   // [0.3,0.7]
};

struct SnowParams {
    int count = 250;
    double r_min = 1.5, r_max = 4.0;
    double intensity = 0.5;
    uint64_t seed = 0;
};

using DegradationParams =
    std::variant<NoiseParams, HazeParams, RainParams, LowLightParams, SnowParams>;

struct AppliedComponent {
    std::string symbol;
    DegradationParams params;
};

// Full parametric trace of one synthesis; drives the oracle restorers.
struct SynthesisRecord {
    std::string clean_ref;
    std::vector<AppliedComponent> applied;  // in composition order

    DegradationLabel label() const;  // multiset of applied symbols
    bool empty() const { return applied.empty(); }
};

// Sampling ranges for per-component parameter draws.
struct SynthConfig {
    double haze_airlight_lo = 0.6, haze_airlight_hi = 1.0;
    double haze_t_lo = 0.4, haze_t_hi = 0.8;
    bool haze_ramp = false;
    double haze_ramp_lo = 0.3, haze_ramp_hi = 0.9;
    int rain_count_lo = 100, rain_count_hi = 250;
    double rain_angle_lo = 60.0, rain_angle_hi = 120.0;
    double rain_length_lo = 15.0, rain_length_hi = 30.0;
    double rain_intensity_lo = 0.1, rain_intensity_hi = 0.4;
    double rain_blur_sigma = 0.7;
    double low_gamma_lo = 1.5, low_gamma_hi = 3.0;
    double low_gain_lo = 0.3, low_gain_hi = 0.7;
    int snow_count_lo = 150, snow_count_hi = 350;
    double snow_r_min = 1.5, snow_r_max = 4.0;
    double snow_intensity_lo = 0.3, snow_intensity_hi = 0.6;
};

// Forward operators. None of them clips.
Image apply_noise(const Image& img, const NoiseParams& p);
Image apply_haze(const Image& img, const HazeParams& p);
Image apply_rain(const Image& img, const RainParams& p);
Image apply_snow(const Image& img, const SnowParams& p);
Image apply_low_light(const Image& img, const LowLightParams& p);

Image apply_component(const Image& img, const AppliedComponent& comp);
// Exact algebraic/subtractive inverse of apply_component.
Image invert_component(const Image& img, const AppliedComponent& comp);

// Regenerated additive fields (zero-mean gaussian for noise; nonnegative
// layers for rain/snow), bit-reproducible from the stored seed.
Image noise_field(int h, int w, int c, const NoiseParams& p);
Image rain_layer(int h, int w, int c, const RainParams& p);
Image snow_layer(int h, int w, int c, const SnowParams& p);

// Transmission at a pixel for either haze mode. Always > 0.
double haze_transmission(const HazeParams& p, int x, int width);

// Draw one component's parameters from config ranges.
DegradationParams draw_params(const std::string& symbol, const SynthConfig& config, Rng& rng);

// Applies label components in canonical physical order (low, haze, rain,
// snow, noise). Equal labels give identical outputs for the same seed.
std::pair<Image, SynthesisRecord> synthesize(const Image& clean, const DegradationLabel& label,
                                             const SynthConfig& config, uint64_t master_seed);

// Re-applies the record's components to a clean image, bit-identically.
Image resynthesize(const Image& clean, const SynthesisRecord& record);

// Procedural clean source: smooth gradients, band-limited texture, a few
// geometric shapes; values normalized into [0.05, 0.95].
Image gen_clean(uint64_t seed, int height, int width);

// The 12 dataset categories (n1, n2, n5, r, h, h+r, h+n1, h+n5, r+n1, r+n5,
// h+r+n1, h+r+n5, spelled with full symbol names).
std::vector<DegradationLabel> default_categories();

// Writes out_dir/clean/NNNN.png, out_dir/<label>/NNNN.png and
// out_dir/manifest.json; returns the manifest path.
std::string build_dataset(const std::string& out_dir,
                          const std::vector<DegradationLabel>& categories,
                          int per_category, uint64_t seed,
                          const SynthConfig& config = {}, int image_size = 256);

// Manifest (de)serialization.
std::string record_to_json(const SynthesisRecord& record);
SynthesisRecord record_from_json(const std::string& json_text);

struct ManifestEntry {
    std::string clean;     // path relative to the dataset root
    std::string degraded;  // path relative to the dataset root
    std::string label;
    SynthesisRecord record;
};

struct Manifest {
    int version = 1;
    uint64_t seed = 0;
    std::vector<ManifestEntry> entries;
};

Manifest load_manifest(const std::string& path);

}  // namespace cor
