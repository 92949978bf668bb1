#include "cor/synthesis.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cor/kernels.hpp"
#include "cor/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cor {

DegradationLabel SynthesisRecord::label() const {
    std::vector<std::string> parts;
    for (const auto& c : applied) parts.push_back(c.symbol);
    return DegradationLabel(parts);
}

Image noise_field(int h, int w, int c, const NoiseParams& p) {
    Image field(h, w, c);
    if (p.sigma == 0.0) return field;
    Rng rng(p.seed);
    const double std = p.sigma / 255.0;
    for (auto& v : field.data) v = std * rng.gaussian();
    return field;
}

Image apply_noise(const Image& img, const NoiseParams& p) {
    if (p.sigma == 0.0) return img;
    Image out = img;
    Image field = noise_field(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += field.data[i];
    return out;
}

double haze_transmission(const HazeParams& p, int x, int width) {
    if (!p.ramp) return p.t;
    if (width <= 1) return p.t_lo;
    return p.t_lo + (p.t_hi - p.t_lo) * (static_cast<double>(x) / (width - 1));
}

Image apply_haze(const Image& img, const HazeParams& p) {
    if (p.airlight <= 0.0 || p.airlight > 1.0)
        throw std::invalid_argument("apply_haze: airlight must be in (0,1]");
    double tmin = p.ramp ? std::min(p.t_lo, p.t_hi) : p.t;
    if (tmin <= 0.0)
        throw std::invalid_argument("apply_haze: transmission must be > 0");
    Image out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double t = haze_transmission(p, x, img.width);
            for (int c = 0; c < img.channels; ++c)
                out.at(y, x, c) = img.at(y, x, c) * t + p.airlight * (1.0 - t);
        }
    return out;
}

Image rain_layer(int h, int w, int c, const RainParams& p) {
    Image layer(h, w, 1);
    Rng rng(p.seed);
    const double a = p.angle_deg * 3.14159265358979323846 / 180.0;
    const double dx = std::cos(a), dy = -std::sin(a);
    for (int s = 0; s < p.count; ++s) {
        double x0 = rng.uniform(0, w);
        double y0 = rng.uniform(0, h);
        double amp = p.intensity * rng.uniform(0.6, 1.0);
        int steps = static_cast<int>(p.length * 2);
        for (int k = 0; k < steps; ++k) {
            double px = x0 + dx * 0.5 * k;
            double py = y0 + dy * 0.5 * k;
            int ix = static_cast<int>(std::floor(px));
            int iy = static_cast<int>(std::floor(py));
            double fx = px - ix, fy = py - iy;
            // bilinear splat, 0.5 per sub-step so total mass tracks length
            auto splat = [&](int yy, int xx, double wgt) {
                if (yy >= 0 && yy < h && xx >= 0 && xx < w)
                    layer.at(yy, xx, 0) += amp * 0.5 * wgt;
            };
            splat(iy, ix, (1 - fx) * (1 - fy));
            splat(iy, ix + 1, fx * (1 - fy));
            splat(iy + 1, ix, (1 - fx) * fy);
            splat(iy + 1, ix + 1, fx * fy);
        }
    }
    if (p.blur_sigma > 0.0) layer = kernels::gaussian_blur(layer, p.blur_sigma, false);
    if (c == 1) return layer;
    Image out(h, w, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) out.at(y, x, ch) = layer.at(y, x, 0);
    return out;
}

Image apply_rain(const Image& img, const RainParams& p) {
    if (p.count == 0) return img;
    Image out = img;
    Image layer = rain_layer(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += layer.data[i];
    return out;
}

Image snow_layer(int h, int w, int c, const SnowParams& p) {
    Image layer(h, w, 1);
    Rng rng(p.seed);
    for (int s = 0; s < p.count; ++s) {
        double x0 = rng.uniform(0, w);
        double y0 = rng.uniform(0, h);
        double r = rng.uniform(p.r_min, p.r_max);
        double amp = p.intensity * rng.uniform(0.5, 1.0);
        int lo_y = std::max(0, static_cast<int>(std::floor(y0 - r)));
        int hi_y = std::min(h - 1, static_cast<int>(std::ceil(y0 + r)));
        int lo_x = std::max(0, static_cast<int>(std::floor(x0 - r)));
        int hi_x = std::min(w - 1, static_cast<int>(std::ceil(x0 + r)));
        for (int y = lo_y; y <= hi_y; ++y)
            for (int x = lo_x; x <= hi_x; ++x) {
                double d2 = ((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (r * r);
                if (d2 < 1.0) {
                    double fall = (1.0 - d2);
                    layer.at(y, x, 0) += amp * fall * fall;
                }
            }
    }
    if (c == 1) return layer;
    Image out(h, w, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) out.at(y, x, ch) = layer.at(y, x, 0);
    return out;
}

Image apply_snow(const Image& img, const SnowParams& p) {
    if (p.count == 0) return img;
    Image out = img;
    Image layer = snow_layer(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += layer.data[i];
    return out;
}

Image apply_low_light(const Image& img, const LowLightParams& p) {
    if (p.gamma < 1.0 || p.gain <= 0.0 || p.gain > 1.0)
        throw std::invalid_argument("apply_low_light: need gamma >= 1, 0 < gain <= 1");
    Image out = img;
    for (auto& v : out.data) {
        double s = v < 0.0 ? -1.0 : 1.0;  // sign-preserving power for unclipped inputs
        v = p.gain * s * std::pow(std::abs(v), p.gamma);
    }
    return out;
}

namespace {

Image apply_forward(const Image& img, const NoiseParams& p) { return apply_noise(img, p); }
Image apply_forward(const Image& img, const HazeParams& p) { return apply_haze(img, p); }
Image apply_forward(const Image& img, const RainParams& p) { return apply_rain(img, p); }
Image apply_forward(const Image& img, const SnowParams& p) { return apply_snow(img, p); }
Image apply_forward(const Image& img, const LowLightParams& p) { return apply_low_light(img, p); }

Image invert(const Image& img, const NoiseParams& p) {
    Image out = img;
    Image field = noise_field(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= field.data[i];
    return out;
}

Image invert(const Image& img, const HazeParams& p) {
    Image out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double t = haze_transmission(p, x, img.width);
            for (int c = 0; c < img.channels; ++c)
                out.at(y, x, c) = (img.at(y, x, c) - p.airlight * (1.0 - t)) / t;
        }
    return out;
}

Image invert(const Image& img, const RainParams& p) {
    Image out = img;
    Image layer = rain_layer(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= layer.data[i];
    return out;
}

Image invert(const Image& img, const SnowParams& p) {
    Image out = img;
    Image layer = snow_layer(img.height, img.width, img.channels, p);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= layer.data[i];
    return out;
}

Image invert(const Image& img, const LowLightParams& p) {
    Image out = img;
    const double inv_gamma = 1.0 / p.gamma;
    for (auto& v : out.data) {
        double u = v / p.gain;
        double s = u < 0.0 ? -1.0 : 1.0;
        v = s * std::pow(std::abs(u), inv_gamma);
    }
    return out;
}

}  // namespace

Image apply_component(const Image& img, const AppliedComponent& comp) {
    return std::visit([&](const auto& p) { return apply_forward(img, p); }, comp.params);
}

Image invert_component(const Image& img, const AppliedComponent& comp) {
    return std::visit([&](const auto& p) { return invert(img, p); }, comp.params);
}

DegradationParams draw_params(const std::string& symbol, const SynthConfig& cfg, Rng& rng) {
    if (symbol == "noise15" || symbol == "noise25" || symbol == "noise50") {
        NoiseParams p;
        p.sigma = symbol == "noise15" ? 15.0 : symbol == "noise25" ? 25.0 : 50.0;
        p.seed = rng.next_u64();
        return p;
    }
    if (symbol == "haze") {
        HazeParams p;
        p.airlight = rng.uniform(cfg.haze_airlight_lo, cfg.haze_airlight_hi);
        p.ramp = cfg.haze_ramp;
        if (p.ramp) {
            p.t_lo = rng.uniform(cfg.haze_ramp_lo, cfg.haze_ramp_hi);
            p.t_hi = rng.uniform(cfg.haze_ramp_lo, cfg.haze_ramp_hi);
        } else {
            p.t = rng.uniform(cfg.haze_t_lo, cfg.haze_t_hi);
        }
        return p;
    }
    if (symbol == "rain") {
        RainParams p;
        p.count = cfg.rain_count_lo +
                  static_cast<int>(rng.next_below(cfg.rain_count_hi - cfg.rain_count_lo + 1));
        p.angle_deg = rng.uniform(cfg.rain_angle_lo, cfg.rain_angle_hi);
        p.length = rng.uniform(cfg.rain_length_lo, cfg.rain_length_hi);
        p.intensity = rng.uniform(cfg.rain_intensity_lo, cfg.rain_intensity_hi);
        p.blur_sigma = cfg.rain_blur_sigma;
        p.seed = rng.next_u64();
        return p;
    }
    if (symbol == "low") {
        LowLightParams p;
        p.gamma = rng.uniform(cfg.low_gamma_lo, cfg.low_gamma_hi);
        p.gain = rng.uniform(cfg.low_gain_lo, cfg.low_gain_hi);
        return p;
    }
    if (symbol == "snow") {
        SnowParams p;
        p.count = cfg.snow_count_lo +
                  static_cast<int>(rng.next_below(cfg.snow_count_hi - cfg.snow_count_lo + 1));
        p.r_min = cfg.snow_r_min;
        p.r_max = cfg.snow_r_max;
        p.intensity = rng.uniform(cfg.snow_intensity_lo, cfg.snow_intensity_hi);
        p.seed = rng.next_u64();
        return p;
    }
    throw std::invalid_argument("draw_params: unknown symbol '" + symbol + "'");
}

std::pair<Image, SynthesisRecord> synthesize(const Image& clean, const DegradationLabel& label,
                                             const SynthConfig& config, uint64_t master_seed) {
    SynthesisRecord record;
    Image img = clean;
    auto ordered = label.composition_order();
    for (size_t i = 0; i < ordered.size(); ++i) {
        Rng stream(derive_seed(master_seed, i));
        AppliedComponent comp{ordered[i], draw_params(ordered[i], config, stream)};
        img = apply_component(img, comp);
        record.applied.push_back(std::move(comp));
    }
    return {std::move(img), std::move(record)};
}

Image resynthesize(const Image& clean, const SynthesisRecord& record) {
    Image img = clean;
    for (const auto& comp : record.applied) img = apply_component(img, comp);
    return img;
}

Image gen_clean(uint64_t seed, int height, int width) {
    if (height < 64 || width < 64)
        throw std::invalid_argument("gen_clean: dimensions must be >= 64");
    Rng rng(seed);
    Image img(height, width, 3);

    // smooth gradient base, per-channel offsets for colorfulness
    double gx = rng.uniform(-0.4, 0.4), gy = rng.uniform(-0.4, 0.4);
    double base[3], coff[3];
    for (int c = 0; c < 3; ++c) {
        base[c] = rng.uniform(0.3, 0.7);
        coff[c] = rng.uniform(-0.1, 0.1);
    }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double u = static_cast<double>(x) / width;
            double v = static_cast<double>(y) / height;
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = base[c] + gx * u + gy * v + coff[c] * (u - v);
        }

    // band-limited texture: a handful of oriented sinusoids
    const int waves = 6;
    for (int i = 0; i < waves; ++i) {
        double fx = rng.uniform(0.5, 8.0) * (rng.next_double() < 0.5 ? -1.0 : 1.0);
        double fy = rng.uniform(0.5, 8.0) * (rng.next_double() < 0.5 ? -1.0 : 1.0);
        double phase = rng.uniform(0.0, 6.283185307179586);
        double amp = rng.uniform(0.02, 0.10);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                double s = amp * std::sin(6.283185307179586 *
                                              (fx * x / width + fy * y / height) +
                                          phase);
                for (int c = 0; c < 3; ++c) img.at(y, x, c) += s;
            }
    }

    // a few flat geometric shapes
    const int shapes = 4;
    for (int i = 0; i < shapes; ++i) {
        bool disc = rng.next_double() < 0.5;
        double cx = rng.uniform(0.1, 0.9) * width;
        double cy = rng.uniform(0.1, 0.9) * height;
        double r = rng.uniform(0.05, 0.2) * std::min(width, height);
        double val[3];
        for (int c = 0; c < 3; ++c) val[c] = rng.uniform(-0.35, 0.35);
        int lo_y = std::max(0, static_cast<int>(cy - r)), hi_y = std::min(height - 1, static_cast<int>(cy + r));
        int lo_x = std::max(0, static_cast<int>(cx - r)), hi_x = std::min(width - 1, static_cast<int>(cx + r));
        for (int y = lo_y; y <= hi_y; ++y)
            for (int x = lo_x; x <= hi_x; ++x) {
                if (disc) {
                    double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    if (d2 > r * r) continue;
                }
                for (int c = 0; c < 3; ++c) img.at(y, x, c) += val[c];
            }
    }

    // normalize jointly into [0.05, 0.95]
    double mn = img.data[0], mx = img.data[0];
    for (double v : img.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    double span = mx - mn;
    if (span < 1e-12) span = 1.0;
    for (auto& v : img.data) v = 0.05 + 0.9 * (v - mn) / span;
    return img;
}

std::vector<DegradationLabel> default_categories() {
    const std::vector<std::string> names = {
        "noise15", "noise25", "noise50", "rain", "haze",
        "haze+rain", "haze+noise15", "haze+noise50",
        "rain+noise15", "rain+noise50",
        "haze+rain+noise15", "haze+rain+noise50"};
    std::vector<DegradationLabel> out;
    for (const auto& n : names) out.push_back(DegradationLabel::parse(n));
    return out;
}

namespace {

json params_to_json(const DegradationParams& params) {
    json j;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoiseParams>) {
                j["sigma"] = p.sigma;
                j["seed"] = p.seed;
            } else if constexpr (std::is_same_v<T, HazeParams>) {
                j["airlight"] = p.airlight;
                j["t_mode"] = p.ramp ? "ramp" : "uniform";
                if (p.ramp) {
                    j["t_lo"] = p.t_lo;
                    j["t_hi"] = p.t_hi;
                } else {
                    j["t"] = p.t;
                }
            } else if constexpr (std::is_same_v<T, RainParams>) {
                j["count"] = p.count;
                j["angle_deg"] = p.angle_deg;
                j["length"] = p.length;
                j["intensity"] = p.intensity;
                j["blur_sigma"] = p.blur_sigma;
                j["seed"] = p.seed;
            } else if constexpr (std::is_same_v<T, LowLightParams>) {
                j["gamma"] = p.gamma;
                j["gain"] = p.gain;
            } else if constexpr (std::is_same_v<T, SnowParams>) {
                j["count"] = p.count;
                j["r_min"] = p.r_min;
                j["r_max"] = p.r_max;
                j["intensity"] = p.intensity;
                j["seed"] = p.seed;
            }
        },
        params);
    return j;
}

DegradationParams params_from_json(const std::string& symbol, const json& j) {
    if (symbol.rfind("noise", 0) == 0) {
        NoiseParams p;
        p.sigma = j.at("sigma").get<double>();
        p.seed = j.at("seed").get<uint64_t>();
        return p;
    }
    if (symbol == "haze") {
        HazeParams p;
        p.airlight = j.at("airlight").get<double>();
        p.ramp = j.at("t_mode").get<std::string>() == "ramp";
        if (p.ramp) {
            p.t_lo = j.at("t_lo").get<double>();
            p.t_hi = j.at("t_hi").get<double>();
        } else {
            p.t = j.at("t").get<double>();
        }
        return p;
    }
    if (symbol == "rain") {
        RainParams p;
        p.count = j.at("count").get<int>();
        p.angle_deg = j.at("angle_deg").get<double>();
        p.length = j.at("length").get<double>();
        p.intensity = j.at("intensity").get<double>();
        p.blur_sigma = j.at("blur_sigma").get<double>();
        p.seed = j.at("seed").get<uint64_t>();
        return p;
    }
    if (symbol == "low") {
        LowLightParams p;
        p.gamma = j.at("gamma").get<double>();
        p.gain = j.at("gain").get<double>();
        return p;
    }
    if (symbol == "snow") {
        SnowParams p;
        p.count = j.at("count").get<int>();
        p.r_min = j.at("r_min").get<double>();
        p.r_max = j.at("r_max").get<double>();
        p.intensity = j.at("intensity").get<double>();
        p.seed = j.at("seed").get<uint64_t>();
        return p;
    }
    throw std::invalid_argument("params_from_json: unknown symbol '" + symbol + "'");
}

json record_to_json_obj(const SynthesisRecord& record) {
    json applied = json::array();
    for (const auto& comp : record.applied) {
        json c = params_to_json(comp.params);
        c["symbol"] = comp.symbol;
        applied.push_back(c);
    }
    return json{{"clean_ref", record.clean_ref}, {"applied", applied}};
}

SynthesisRecord record_from_json_obj(const json& j) {
    SynthesisRecord record;
    record.clean_ref = j.value("clean_ref", "");
    for (const auto& c : j.at("applied")) {
        std::string symbol = c.at("symbol").get<std::string>();
        record.applied.push_back({symbol, params_from_json(symbol, c)});
    }
    return record;
}

}  // namespace

std::string record_to_json(const SynthesisRecord& record) {
    return record_to_json_obj(record).dump();
}

SynthesisRecord record_from_json(const std::string& json_text) {
    return record_from_json_obj(json::parse(json_text));
}

std::string build_dataset(const std::string& out_dir,
                          const std::vector<DegradationLabel>& categories,
                          int per_category, uint64_t seed, const SynthConfig& config,
                          int image_size) {
    fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "clean", ec);
    if (ec) throw std::runtime_error("build_dataset: cannot create " + out_dir);

    json entries = json::array();
    char name[32];

    // clean sources are shared across categories
    std::vector<Image> cleans;
    for (int i = 0; i < per_category; ++i) {
        Image clean = gen_clean(derive_seed(seed, 1000000 + i), image_size, image_size);
        std::snprintf(name, sizeof(name), "%04d.png", i);
        save_png(clean, (root / "clean" / name).string());
        // synthesize from the quantized clean, so manifest + clean PNG
        // regenerate every degraded PNG bit-exactly
        for (auto& v : clean.data) v = to_level(v) / 255.0;
        cleans.push_back(std::move(clean));
    }

    for (size_t ci = 0; ci < categories.size(); ++ci) {
        const auto& label = categories[ci];
        fs::path cat_dir = root / label.canonical_key();
        fs::create_directories(cat_dir, ec);
        if (ec) throw std::runtime_error("build_dataset: cannot create " + cat_dir.string());
        for (int i = 0; i < per_category; ++i) {
            uint64_t img_seed = derive_seed(seed, ci * 100000 + i);
            auto [degraded, record] = synthesize(cleans[i], label, config, img_seed);
            std::snprintf(name, sizeof(name), "%04d.png", i);
            record.clean_ref = (fs::path("clean") / name).generic_string();
            save_png(degraded, (cat_dir / name).string());
            json e;
            e["clean"] = record.clean_ref;
            e["degraded"] = (fs::path(label.canonical_key()) / name).generic_string();
            e["label"] = label.canonical_key();
            e["record"] = record_to_json_obj(record);
            entries.push_back(std::move(e));
        }
    }

    json manifest{{"version", 1}, {"seed", seed}, {"entries", entries}};
    std::string manifest_path = (root / "manifest.json").string();
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("build_dataset: cannot write manifest");
    out << manifest.dump(2) << '\n';
    return manifest_path;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + path);
    json j = json::parse(in);
    Manifest m;
    m.version = j.at("version").get<int>();
    m.seed = j.at("seed").get<uint64_t>();
    for (const auto& e : j.at("entries")) {
        ManifestEntry entry;
        entry.clean = e.at("clean").get<std::string>();
        entry.degraded = e.at("degraded").get<std::string>();
        entry.label = e.at("label").get<std::string>();
        entry.record = record_from_json_obj(e.at("record"));
        m.entries.push_back(std::move(entry));
    }
    return m;
}

}  // namespace cor
