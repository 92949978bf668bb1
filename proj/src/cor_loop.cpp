#include "cor/cor_loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace cor {

uint64_t image_hash(const Image& img) {
    // FNV-1a over the raw double bytes
    uint64_t h = 14695981039346656037ULL;
    auto mix = [&](const void* p, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    mix(&img.height, sizeof(img.height));
    mix(&img.width, sizeof(img.width));
    mix(&img.channels, sizeof(img.channels));
    mix(img.data.data(), img.data.size() * sizeof(double));
    return h;
}

Decision oracle_dd(const SynthesisRecord& context, const RestorerRegistry& registry) {
    if (context.applied.empty()) return {true, ""};
    DegradationLabel remaining = context.label();
    auto cover = decompose(remaining, registry.bases());
    if (!cover)
        throw std::runtime_error("oracle_dd: remaining label '" + remaining.canonical_key() +
                                 "' is not decomposable over the registry bases");
    // pick the cover part containing the outermost remaining component
    std::string outer;
    int outer_rank = -1;
    for (const auto& comp : context.applied) {
        int r = composition_rank(comp.symbol);
        if (r > outer_rank) {
            outer_rank = r;
            outer = comp.symbol;
        }
    }
    const DegradationLabel* best = nullptr;
    for (const auto& part : *cover) {
        const auto& parts = part.parts();
        if (std::find(parts.begin(), parts.end(), outer) == parts.end()) continue;
        if (!best || part.order() > best->order()) best = &part;
    }
    if (!best) best = &cover->front();  // duplicate symbols can leave no direct holder
    return {false, best->canonical_key()};
}

namespace {

double mean_abs_change(const Image& a, const Image& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) acc += std::abs(a.data[i] - b.data[i]);
    return acc / a.data.size();
}

}  // namespace

std::pair<Image, CoRTrace> run_cor(const Image& img, const RestorerRegistry& registry,
                                   const ClassifierModel* model, const CoRConfig& config,
                                   const SynthesisRecord* context) {
    if (config.max_steps < 1)
        throw std::invalid_argument("run_cor: max_steps must be >= 1");
    if (registry.mode() == RestorerMode::Oracle && !context)
        throw std::invalid_argument("run_cor: oracle restorers require a synthesis record");
    if (config.oracle_dd && !context)
        throw std::invalid_argument("run_cor: the oracle discriminator requires a record");
    if (!config.oracle_dd) {
        if (!model)
            throw std::invalid_argument("run_cor: trained mode requires a classifier model");
        if (config.mode == DiscriminatorMode::NonBlind) {
            for (int k = 0; k < model->num_classes() - 1; ++k) {
                auto basis = DegradationLabel::parse(model->class_labels[k]);
                if (!registry.has(basis))
                    throw std::invalid_argument("run_cor: classifier class '" +
                                                model->class_labels[k] +
                                                "' has no registered restorer");
            }
        } else if (registry.mode() != RestorerMode::Oracle) {
            throw std::invalid_argument(
                "run_cor: blind mode needs oracle restorers to select the target basis");
        }
    }

    Image x = img;
    SynthesisRecord rec;
    if (context) rec = *context;
    CoRTrace trace;
    std::string prev_basis;
    int restorations = 0;

    for (int step = 0;; ++step) {
        CoRStep entry;
        entry.index = step;
        entry.image_hash = image_hash(x);

        Decision decision;
        if (config.oracle_dd) {
            decision = oracle_dd(rec, registry);
        } else {
            uint64_t step_seed = derive_seed(config.seed, static_cast<uint64_t>(step));
            entry.probabilities =
                predict_probs(*model, x, config.patches, config.patch_size, step_seed);
            if (config.mode == DiscriminatorMode::Blind) {
                if (model->num_classes() != 2)
                    throw std::invalid_argument("run_cor: blind mode needs a 2-class model");
                entry.revised = entry.probabilities;
                if (entry.probabilities[1] > entry.probabilities[0]) {
                    decision = {true, ""};
                } else {
                    // the blind restorer targets the outermost remaining basis
                    decision = oracle_dd(rec, registry);
                }
            } else {
                std::vector<int> orders;
                std::vector<std::string> labels;
                for (int k = 0; k < model->num_classes() - 1; ++k) {
                    labels.push_back(model->class_labels[k]);
                    orders.push_back(DegradationLabel::parse(model->class_labels[k]).order());
                }
                entry.revised = apply_margins(entry.probabilities, config.margins, orders, labels);
                int best = 0;
                for (int k = 1; k < model->num_classes(); ++k)
                    if (entry.revised[k] > entry.revised[best]) best = k;
                if (best == model->clean_index())
                    decision = {true, ""};
                else
                    decision = {false,
                                DegradationLabel::parse(model->class_labels[best]).canonical_key()};
            }
        }

        if (decision.clean) {
            entry.clean = true;
            trace.steps.push_back(std::move(entry));
            trace.termination = Termination::CleanDetected;
            return {std::move(x), std::move(trace)};
        }

        entry.chosen_basis = decision.basis;
        auto basis = DegradationLabel::parse(decision.basis);

        Image next = x;
        if (registry.mode() == RestorerMode::Oracle) {
            try {
                auto [restored, updated] = registry.oracle_remove(x, basis, rec);
                next = std::move(restored);
                rec = std::move(updated);
            } catch (const std::runtime_error&) {
                if (!config.skip_unmatched_oracle_choice) throw;
                entry.skipped = true;
            }
        } else {
            next = registry.restore(x, basis);
        }
        ++restorations;
        trace.steps.push_back(entry);
        if (config.step_sink) config.step_sink(step, next);

        bool no_progress = decision.basis == prev_basis &&
                           mean_abs_change(next, x) < config.no_progress_threshold;
        x = std::move(next);
        prev_basis = decision.basis;

        if (no_progress) {
            trace.termination = Termination::NoProgress;
            return {std::move(x), std::move(trace)};
        }
        if (restorations >= config.max_steps) {
            trace.termination = Termination::MaxSteps;
            return {std::move(x), std::move(trace)};
        }
    }
}

Ratio step_count_expectation(int n, int k) {
    return inference_ratio(n, k);
}

Ratio simulate_mean_steps(int n, int k, uint64_t seed) {
    if (k < 1 || n < k)
        throw std::invalid_argument("simulate_mean_steps: need 1 <= k <= n");
    const auto& reg = symbol_registry();
    if (n > static_cast<int>(reg.size()))
        throw std::invalid_argument("simulate_mean_steps: n exceeds the symbol registry");

    RestorerRegistry registry(RestorerMode::Oracle, enumerate_bases(n, k));
    Image clean = gen_clean(seed, 64, 64);
    SynthConfig synth_cfg;
    CoRConfig cfg;
    cfg.oracle_dd = true;
    cfg.max_steps = 2 * n + 2;

    uint128 total_steps = 0;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::string> parts;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) parts.push_back(reg[i].name);
        DegradationLabel label(parts);
        auto [degraded, record] = synthesize(clean, label, synth_cfg, derive_seed(seed, mask));
        auto [restored, trace] = run_cor(degraded, registry, nullptr, cfg, &record);
        if (trace.termination != Termination::CleanDetected)
            throw std::runtime_error("simulate_mean_steps: run did not terminate clean");
        total_steps += static_cast<uint128>(trace.steps.size() - 1);
    }
    return Ratio(total_steps, (static_cast<uint128>(1) << n) - 1);
}

}  // namespace cor
