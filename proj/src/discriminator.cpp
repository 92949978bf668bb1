#include "cor/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "cor/algebra.hpp"
#include "cor/kernels.hpp"
#include "cor/metrics.hpp"

using nlohmann::json;

namespace cor {

FeatureVector extract_features(const Image& patch) {
    if (patch.height < 16 || patch.width < 16)
        throw std::invalid_argument("extract_features: patch must be at least 16x16");

    const int H = patch.height, W = patch.width, C = patch.channels;
    Image clamped = patch;
    for (auto& v : clamped.data) v = clamp01(v);

    // luminance plane
    Image gray = to_gray(clamped);

    double lum_mean = 0.0;
    for (double v : gray.data) lum_mean += v;
    lum_mean /= gray.data.size();

    double lum_var = 0.0;
    for (double v : gray.data) lum_var += (v - lum_mean) * (v - lum_mean);
    lum_var /= gray.data.size();
    double lum_std = std::sqrt(lum_var);

    // dark channel mean
    Image chan_min(H, W, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double m = clamped.at(y, x, 0);
            for (int c = 1; c < C; ++c) m = std::min(m, clamped.at(y, x, c));
            chan_min.at(y, x, 0) = m;
        }
    Image dark = kernels::min_filter(chan_min, 3, false);
    double dark_mean = 0.0;
    for (double v : dark.data) dark_mean += v;
    dark_mean /= dark.data.size();

    // Laplacian energy and gradient statistics on luma
    double lap_energy = 0.0;
    double grad_v = 0.0, grad_h = 0.0, grad_d1 = 0.0, grad_d2 = 0.0;
    int inner = 0;
    for (int y = 1; y < H - 1; ++y)
        for (int x = 1; x < W - 1; ++x) {
            double center = gray.at(y, x, 0);
            double lap = gray.at(y - 1, x, 0) + gray.at(y + 1, x, 0) +
                         gray.at(y, x - 1, 0) + gray.at(y, x + 1, 0) - 4.0 * center;
            lap_energy += lap * lap;
            double gx = gray.at(y, x + 1, 0) - gray.at(y, x - 1, 0);
            double gy = gray.at(y + 1, x, 0) - gray.at(y - 1, x, 0);
            double d1 = gray.at(y + 1, x + 1, 0) - gray.at(y - 1, x - 1, 0);
            double d2 = gray.at(y + 1, x - 1, 0) - gray.at(y - 1, x + 1, 0);
            grad_h += gx * gx;
            grad_v += gy * gy;
            grad_d1 += d1 * d1;
            grad_d2 += d2 * d2;
            ++inner;
        }
    lap_energy /= inner;
    constexpr double tiny = 1e-9;
    double vh_ratio = (grad_v + tiny) / (grad_h + tiny);
    double diag_aniso = (std::max(grad_d1, grad_d2) + tiny) / (std::min(grad_d1, grad_d2) + tiny);

    // mean saturation (max - min channel spread)
    double sat = 0.0;
    if (C == 3) {
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                double mx = clamped.at(y, x, 0), mn = mx;
                for (int c = 1; c < 3; ++c) {
                    mx = std::max(mx, clamped.at(y, x, c));
                    mn = std::min(mn, clamped.at(y, x, c));
                }
                sat += mx - mn;
            }
        sat /= static_cast<double>(H) * W;
    }

    // 32-bin luminance histogram entropy
    std::array<double, 32> hist{};
    for (double v : gray.data) {
        int b = std::min(31, static_cast<int>(v * 32.0));
        hist[b] += 1.0;
    }
    double entropy = 0.0;
    for (double h : hist) {
        if (h <= 0) continue;
        double p = h / gray.data.size();
        entropy -= p * std::log2(p);
    }

    return {lum_mean, lum_std, dark_mean, lap_energy, vh_ratio, diag_aniso, sat, entropy};
}

std::vector<double> ClassifierModel::predict_one(const FeatureVector& features) const {
    const int K = num_classes();
    std::vector<double> logits(K);
    for (int k = 0; k < K; ++k) {
        double z = biases[k];
        for (int f = 0; f < kFeatureCount; ++f) {
            double s = feature_stds[f] > 0 ? feature_stds[f] : 1.0;
            z += weights[k * kFeatureCount + f] * ((features[f] - feature_means[f]) / s);
        }
        logits[k] = z;
    }
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    std::vector<double> probs(K);
    for (int k = 0; k < K; ++k) {
        probs[k] = std::exp(logits[k] - mx);
        sum += probs[k];
    }
    for (auto& p : probs) p /= sum;
    return probs;
}

TrainResult train_classifier(const std::vector<TrainSample>& samples,
                             const std::vector<std::string>& class_labels,
                             const TrainHyper& hyper) {
    const int K = static_cast<int>(class_labels.size());
    const int N = static_cast<int>(samples.size());
    if (N == 0) throw std::invalid_argument("train_classifier: no samples");

    std::vector<int> class_counts(K, 0);
    for (const auto& s : samples) {
        if (s.class_index < 0 || s.class_index >= K)
            throw std::invalid_argument("train_classifier: class index out of range");
        ++class_counts[s.class_index];
    }
    for (int k = 0; k < K; ++k)
        if (class_counts[k] == 0)
            throw std::invalid_argument("train_classifier: class '" + class_labels[k] +
                                        "' has no samples");

    ClassifierModel model;
    model.class_labels = class_labels;
    model.weights.assign(static_cast<size_t>(K) * kFeatureCount, 0.0);
    model.biases.assign(K, 0.0);

    // standardization statistics from the training set
    for (int f = 0; f < kFeatureCount; ++f) {
        double mean = 0.0;
        for (const auto& s : samples) mean += s.features[f];
        mean /= N;
        double var = 0.0;
        for (const auto& s : samples) var += (s.features[f] - mean) * (s.features[f] - mean);
        var /= N;
        model.feature_means[f] = mean;
        model.feature_stds[f] = std::sqrt(var) > 1e-12 ? std::sqrt(var) : 1.0;
    }

    std::vector<FeatureVector> X(N);
    for (int i = 0; i < N; ++i)
        for (int f = 0; f < kFeatureCount; ++f)
            X[i][f] = (samples[i].features[f] - model.feature_means[f]) / model.feature_stds[f];

    Rng rng(hyper.seed);
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);

    const int batch = hyper.batch > 0 ? std::min(hyper.batch, N) : N;
    std::vector<double> grad_w(model.weights.size());
    std::vector<double> grad_b(K);
    std::vector<double> losses;

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        if (hyper.batch > 0) {
            // Fisher-Yates with the seeded stream
            for (int i = N - 1; i > 0; --i) {
                int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i) + 1));
                std::swap(order[i], order[j]);
            }
        }
        double epoch_loss = 0.0;
        for (int start = 0; start < N; start += batch) {
            int end = std::min(start + batch, N);
            int m = end - start;
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (int bi = start; bi < end; ++bi) {
                int i = order[bi];
                std::vector<double> logits(K);
                for (int k = 0; k < K; ++k) {
                    double z = model.biases[k];
                    for (int f = 0; f < kFeatureCount; ++f)
                        z += model.weights[k * kFeatureCount + f] * X[i][f];
                    logits[k] = z;
                }
                double mx = *std::max_element(logits.begin(), logits.end());
                double sum = 0.0;
                for (int k = 0; k < K; ++k) sum += std::exp(logits[k] - mx);
                double logsum = mx + std::log(sum);
                epoch_loss += logsum - logits[samples[i].class_index];
                for (int k = 0; k < K; ++k) {
                    double p = std::exp(logits[k] - logsum);
                    double err = p - (k == samples[i].class_index ? 1.0 : 0.0);
                    grad_b[k] += err;
                    for (int f = 0; f < kFeatureCount; ++f)
                        grad_w[k * kFeatureCount + f] += err * X[i][f];
                }
            }
            double scale = hyper.learning_rate / m;
            for (size_t w = 0; w < model.weights.size(); ++w)
                model.weights[w] -= scale * (grad_w[w] + hyper.weight_decay * m * model.weights[w]);
            for (int k = 0; k < K; ++k) model.biases[k] -= scale * grad_b[k];
        }
        epoch_loss /= N;
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("train_classifier: loss diverged at epoch " +
                                     std::to_string(epoch));
        losses.push_back(epoch_loss);
    }
    return {std::move(model), std::move(losses)};
}

std::vector<double> predict_probs(const ClassifierModel& model, const Image& img,
                                  int patches, int patch_size, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(model.num_classes(), 0.0);
    for (int i = 0; i < patches; ++i) {
        Image patch = random_crop(img, patch_size, rng);
        auto p = model.predict_one(extract_features(patch));
        for (int k = 0; k < model.num_classes(); ++k) v[k] += p[k];
    }
    for (auto& x : v) x /= patches;
    return v;
}

MarginConfig MarginConfig::defaults_for(const std::vector<std::string>& basis_labels) {
    MarginConfig cfg;
    for (const auto& label : basis_labels) {
        auto parts = DegradationLabel::parse(label).parts();
        if (std::find(parts.begin(), parts.end(), "low") != parts.end())
            cfg.epsilon_b[DegradationLabel::parse(label).canonical_key()] = -0.05;
    }
    return cfg;
}

std::vector<double> apply_margins(const std::vector<double>& v, const MarginConfig& margins,
                                  const std::vector<int>& basis_orders,
                                  const std::vector<std::string>& basis_labels) {
    if (basis_orders.size() != basis_labels.size() || v.size() != basis_orders.size() + 1)
        throw std::invalid_argument("apply_margins: length mismatch");
    std::vector<double> out = v;
    for (size_t i = 0; i < basis_orders.size(); ++i)
        out[i] += basis_orders[i] * margins.epsilon_o + margins.basis_margin(basis_labels[i]);
    return out;
}

Decision discriminate(const ClassifierModel& model, const Image& img,
                      const MarginConfig& margins, DiscriminatorMode mode,
                      int patches, int patch_size, uint64_t seed) {
    auto v = predict_probs(model, img, patches, patch_size, seed);
    if (mode == DiscriminatorMode::Blind) {
        if (model.num_classes() != 2)
            throw std::invalid_argument("discriminate: blind mode needs a 2-class model");
        if (v[model.clean_index()] > v[0]) return {true, ""};
        return {false, model.class_labels[0]};
    }
    std::vector<int> orders;
    std::vector<std::string> labels;
    for (int k = 0; k < model.num_classes() - 1; ++k) {
        labels.push_back(model.class_labels[k]);
        orders.push_back(DegradationLabel::parse(model.class_labels[k]).order());
    }
    auto revised = apply_margins(v, margins, orders, labels);
    int best = 0;
    for (int k = 1; k < model.num_classes(); ++k)
        if (revised[k] > revised[best]) best = k;  // ties keep the lowest index
    if (best == model.clean_index()) return {true, ""};
    return {false, DegradationLabel::parse(model.class_labels[best]).canonical_key()};
}

std::string ClassifierModel::to_json() const {
    json j;
    j["class_labels"] = class_labels;
    j["feature_means"] = feature_means;
    j["feature_stds"] = feature_stds;
    j["weights"] = weights;
    j["biases"] = biases;
    return j.dump(2);
}

ClassifierModel ClassifierModel::from_json(const std::string& text) {
    json j = json::parse(text);
    ClassifierModel m;
    m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    auto means = j.at("feature_means").get<std::vector<double>>();
    auto stds = j.at("feature_stds").get<std::vector<double>>();
    if (means.size() != kFeatureCount || stds.size() != kFeatureCount)
        throw std::runtime_error("ClassifierModel: bad feature statistics length");
    std::copy(means.begin(), means.end(), m.feature_means.begin());
    std::copy(stds.begin(), stds.end(), m.feature_stds.begin());
    m.weights = j.at("weights").get<std::vector<double>>();
    m.biases = j.at("biases").get<std::vector<double>>();
    if (m.weights.size() != m.class_labels.size() * kFeatureCount ||
        m.biases.size() != m.class_labels.size())
        throw std::runtime_error("ClassifierModel: inconsistent weight shape");
    return m;
}

void ClassifierModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ClassifierModel::save: cannot write " + path);
    out << to_json() << '\n';
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ClassifierModel::load: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

}  // namespace cor
