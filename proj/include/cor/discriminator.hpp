#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cor/image.hpp"
#include "cor/rng.hpp"

namespace cor {

constexpr int kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

// 8 handcrafted patch statistics, computed on the clamped [0,1] view:
// mean luminance, luminance std, dark-channel mean (7x7 min filter),
// Laplacian energy, vertical/horizontal gradient-energy ratio, diagonal
// gradient anisotropy, mean saturation, 32-bin luminance entropy.
FeatureVector extract_features(const Image& patch);

// Multinomial logistic regression over standardized features. class_labels
// holds the n basis labels followed by the terminal "clean" class.
struct ClassifierModel {
    std::vector<std::string> class_labels;
    std::vector<double> weights;  // (n+1) x kFeatureCount, row-major
    std::vector<double> biases;   // n+1
    FeatureVector feature_means{};
    FeatureVector feature_stds{};

    int num_classes() const { return static_cast<int>(class_labels.size()); }
    int clean_index() const { return num_classes() - 1; }

    std::vector<double> predict_one(const FeatureVector& features) const;  // softmax

    std::string to_json() const;
    static ClassifierModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static ClassifierModel load(const std::string& path);
};

struct TrainHyper {
    double learning_rate = 2e-3;
    int epochs = 400;
    int batch = 32;        // 0 = full batch
    double weight_decay = 1e-3;
    uint64_t seed = 0;
};

struct TrainSample {
    FeatureVector features;
    int class_index;
};

struct TrainResult {
    ClassifierModel model;
    std::vector<double> epoch_losses;  // mean cross-entropy per epoch
};

TrainResult train_classifier(const std::vector<TrainSample>& samples,
                             const std::vector<std::string>& class_labels,
                             const TrainHyper& hyper);

// Patch-voting inference: average of per-patch softmax outputs over N seeded
// random crops (the whole image when it is smaller than patch_size).
std::vector<double> predict_probs(const ClassifierModel& model, const Image& img,
                                  int patches = 12, int patch_size = 128,
                                  uint64_t seed = 0);

struct MarginConfig {
    double epsilon_o = 0.03;
    std::map<std::string, double> epsilon_b;  // by canonical basis key

    double basis_margin(const std::string& canonical_key) const {
        auto it = epsilon_b.find(canonical_key);
        return it == epsilon_b.end() ? 0.0 : it->second;
    }
    // -0.05 on every basis containing "low", 0 elsewhere
    static MarginConfig defaults_for(const std::vector<std::string>& basis_labels);
};

// v'_i = v_i + order_i * eps_o + eps_b(i) for the n basis entries; the clean
// entry is left unshifted. Not renormalized: only the argmax is consumed.
std::vector<double> apply_margins(const std::vector<double>& v, const MarginConfig& margins,
                                  const std::vector<int>& basis_orders,
                                  const std::vector<std::string>& basis_labels);

enum class DiscriminatorMode { Blind, NonBlind };

struct Decision {
    bool clean = false;
    std::string basis;  // canonical key, set when !clean
};

// Blind: 2-class clean/degraded vote. Non-blind: argmax over the margined
// vector; ties go to the lowest class index.
Decision discriminate(const ClassifierModel& model, const Image& img,
                      const MarginConfig& margins, DiscriminatorMode mode,
                      int patches = 12, int patch_size = 128, uint64_t seed = 0);

}  // namespace cor
