#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cor/metrics.hpp"
#include "cor/png_io.hpp"
#include "cor/synthesis.hpp"

using namespace cor;
namespace fs = std::filesystem;

namespace {

double mean(const Image& img) {
    double s = 0;
    for (double v : img.data) s += v;
    return s / img.data.size();
}

double sample_std(const Image& a, const Image& b) {
    double m = 0;
    for (size_t i = 0; i < a.data.size(); ++i) m += a.data[i] - b.data[i];
    m /= a.data.size();
    double var = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i] - m;
        var += d * d;
    }
    return std::sqrt(var / a.data.size());
}

}  // namespace

TEST_CASE("noise with sigma zero is the identity") {
    Image img = gen_clean(1, 64, 64);
    Image out = apply_noise(img, NoiseParams{0.0, 5});
    CHECK(out.data == img.data);
}

TEST_CASE("noise sample std tracks sigma/255 within 3 percent") {
    Image img = gen_clean(2, 256, 256);
    NoiseParams p{25.0, 77};
    Image out = apply_noise(img, p);
    double s = sample_std(out, img);
    CHECK(s == doctest::Approx(25.0 / 255.0).epsilon(0.03));
}

TEST_CASE("noise fields are deterministic given the seed") {
    NoiseParams p{15.0, 123};
    Image a = noise_field(32, 32, 3, p);
    Image b = noise_field(32, 32, 3, p);
    CHECK(a.data == b.data);
}

TEST_CASE("haze with unit transmission is the identity") {
    Image img = gen_clean(3, 64, 64);
    HazeParams p;
    p.airlight = 0.8;
    p.t = 1.0;
    Image out = apply_haze(img, p);
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("haze on a black image gives A(1-t)") {
    Image img(16, 16, 3, 0.0);
    HazeParams p;
    p.airlight = 0.8;
    p.t = 0.5;
    Image out = apply_haze(img, p);
    for (double v : out.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("haze pulls the mean toward the airlight as t decreases") {
    Image img = gen_clean(4, 64, 64);
    HazeParams p;
    p.airlight = 0.9;
    double prev_dist = std::abs(mean(img) - p.airlight);
    for (double t : {0.8, 0.6, 0.4}) {
        p.t = t;
        double dist = std::abs(mean(apply_haze(img, p)) - p.airlight);
        CHECK(dist < prev_dist);
        prev_dist = dist;
    }
}

TEST_CASE("haze rejects non-invertible transmission") {
    Image img(16, 16, 1, 0.5);
    HazeParams p;
    p.t = 0.0;
    CHECK_THROWS(apply_haze(img, p));
}

TEST_CASE("rain with zero streaks is the identity") {
    Image img = gen_clean(5, 64, 64);
    RainParams p;
    p.count = 0;
    CHECK(apply_rain(img, p).data == img.data);
}

TEST_CASE("rain residual equals the regenerated layer") {
    Image img = gen_clean(6, 96, 96);
    RainParams p;
    p.seed = 9;
    Image out = apply_rain(img, p);
    Image layer = rain_layer(96, 96, 3, p);
    // (img + layer) - img loses up to one ulp, so compare with a tiny slack
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(out.data[i] - img.data[i] - layer.data[i]) <= 1e-15);
    for (double v : layer.data) CHECK(v >= 0.0);
}

TEST_CASE("mean rain mass grows with streak count") {
    double prev = -1.0;
    for (int count : {50, 150, 400}) {
        RainParams p;
        p.count = count;
        p.seed = 21;
        double m = mean(rain_layer(128, 128, 1, p));
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("snow layer is nonnegative and additive") {
    Image img = gen_clean(7, 96, 96);
    SnowParams p;
    p.seed = 3;
    Image out = apply_snow(img, p);
    Image layer = snow_layer(96, 96, 3, p);
    for (size_t i = 0; i < img.data.size(); ++i) {
        CHECK(std::abs(out.data[i] - img.data[i] - layer.data[i]) <= 1e-15);
        CHECK(layer.data[i] >= 0.0);
    }
}

TEST_CASE("low light with gamma 1 and gain 1 is the identity") {
    Image img = gen_clean(8, 64, 64);
    Image out = apply_low_light(img, LowLightParams{1.0, 1.0});
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("low light hand arithmetic") {
    Image img(8, 8, 1, 0.81);
    Image out = apply_low_light(img, LowLightParams{2.0, 0.5});
    for (double v : out.data) CHECK(v == doctest::Approx(0.5 * 0.6561).epsilon(1e-12));
}

TEST_CASE("low light darkens any non-black image") {
    Image img = gen_clean(9, 64, 64);
    Image out = apply_low_light(img, LowLightParams{2.0, 0.6});
    CHECK(mean(out) < mean(img));
}

TEST_CASE("synthesize composes operators in canonical order") {
    Image clean = gen_clean(10, 64, 64);
    auto label = DegradationLabel::parse("haze+noise15");
    SynthConfig cfg;
    auto [degraded, record] = synthesize(clean, label, cfg, 4242);
    REQUIRE(record.applied.size() == 2);
    CHECK(record.applied[0].symbol == "haze");  // haze is inner, noise outer
    CHECK(record.applied[1].symbol == "noise15");
    Image manual = apply_component(apply_component(clean, record.applied[0]), record.applied[1]);
    CHECK(degraded.data == manual.data);
    CHECK(equals(record.label(), label));
}

TEST_CASE("synthesize with a single component records one entry") {
    Image clean = gen_clean(11, 64, 64);
    auto [degraded, record] =
        synthesize(clean, DegradationLabel::parse("noise15"), SynthConfig{}, 1);
    CHECK(record.applied.size() == 1);
}

TEST_CASE("synthesize is invariant to label permutation") {
    Image clean = gen_clean(12, 64, 64);
    SynthConfig cfg;
    auto [a, ra] = synthesize(clean, DegradationLabel::parse("noise15+haze"), cfg, 99);
    auto [b, rb] = synthesize(clean, DegradationLabel::parse("haze+noise15"), cfg, 99);
    CHECK(a.data == b.data);
}

TEST_CASE("no synthesis step produces non-finite values") {
    Image clean = gen_clean(13, 64, 64);
    auto [degraded, record] =
        synthesize(clean, DegradationLabel::parse("low+haze+rain+snow+noise50"), SynthConfig{}, 7);
    for (double v : degraded.data) CHECK(std::isfinite(v));
}

TEST_CASE("gen_clean is deterministic, bounded and spans the dynamic range") {
    Image a = gen_clean(77, 128, 128);
    Image b = gen_clean(77, 128, 128);
    CHECK(a.data == b.data);
    double mn = 1.0, mx = 0.0;
    // the affine normalization can overshoot the endpoints by an ulp
    for (double v : a.data) {
        CHECK(v >= 0.05 - 1e-12);
        CHECK(v <= 0.95 + 1e-12);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    CHECK(mx - mn >= 0.5);
    CHECK_THROWS(gen_clean(1, 32, 32));
}

TEST_CASE("record JSON round-trips and regenerates the degraded image") {
    Image clean = gen_clean(14, 64, 64);
    auto [degraded, record] =
        synthesize(clean, DegradationLabel::parse("haze+rain+noise25"), SynthConfig{}, 314);
    SynthesisRecord back = record_from_json(record_to_json(record));
    Image regen = resynthesize(clean, back);
    CHECK(regen.data == degraded.data);
}

TEST_CASE("build_dataset writes the documented layout and a regenerable manifest") {
    fs::path dir = fs::temp_directory_path() / "cor_mini_dataset";
    fs::remove_all(dir);
    std::vector<DegradationLabel> cats = {DegradationLabel::parse("haze"),
                                          DegradationLabel::parse("rain+noise15")};
    build_dataset(dir.string(), cats, 2, 555, SynthConfig{}, 64);

    CHECK(fs::exists(dir / "clean" / "0000.png"));
    CHECK(fs::exists(dir / "haze" / "0001.png"));
    CHECK(fs::exists(dir / "noise15+rain" / "0000.png"));

    Manifest m = load_manifest((dir / "manifest.json").string());
    CHECK(m.entries.size() == 4);
    for (const auto& e : m.entries) {
        Image clean = load_png((dir / e.clean).string());
        Image stored = load_png((dir / e.degraded).string());
        Image regen = resynthesize(clean, e.record);
        // quantize and compare bit-exactly
        for (size_t i = 0; i < regen.data.size(); ++i)
            CHECK(to_level(regen.data[i]) == to_level(stored.data[i]));
    }
    fs::remove_all(dir);
}

TEST_CASE("default dataset has the 12 categories") {
    auto cats = default_categories();
    CHECK(cats.size() == 12);
}
