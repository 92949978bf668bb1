#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cor/complexity.hpp"
#include "cor/discriminator.hpp"
#include "cor/restorers.hpp"

namespace cor {

enum class Termination { CleanDetected, MaxSteps, NoProgress };

struct CoRConfig {
    int max_steps = 16;                     // 2 * |isolated symbols| + 2
    double no_progress_threshold = 1e-4;    // mean-abs-change floor
    MarginConfig margins;
    DiscriminatorMode mode = DiscriminatorMode::NonBlind;
    bool oracle_dd = false;                 // ground-truth discriminator
    int patches = 12;
    int patch_size = 128;
    uint64_t seed = 0;
    // Oracle-restorer policy when the discriminator picks a basis that is
    // absent from the record: skip the step instead of aborting the run.
    bool skip_unmatched_oracle_choice = true;
    // Observer invoked with the image after every restoration step; used by
    // the CLI to dump intermediate frames. No effect on the loop itself.
    std::function<void(int, const Image&)> step_sink;
};

struct CoRStep {
    int index = 0;
    std::vector<double> probabilities;  // empty for the oracle discriminator
    std::vector<double> revised;
    bool clean = false;
    std::string chosen_basis;  // canonical key
    uint64_t image_hash = 0;
    bool skipped = false;  // oracle restorer could not address the choice
};

struct CoRTrace {
    std::vector<CoRStep> steps;
    Termination termination = Termination::CleanDetected;
};

// Ground-truth discriminator: Clean when nothing remains, otherwise the
// registry basis covering the outermost remaining components, highest order
// first, via decompose. Throws when the remaining label cannot be covered.
Decision oracle_dd(const SynthesisRecord& context, const RestorerRegistry& registry);

// The iterative restoration loop: discriminate, remove one basis, repeat.
// `model` may be null when config.oracle_dd is set. `context` is required
// for oracle restorers and is consumed step by step.
std::pair<Image, CoRTrace> run_cor(const Image& img, const RestorerRegistry& registry,
                                   const ClassifierModel* model, const CoRConfig& config,
                                   const SynthesisRecord* context = nullptr);

// varphi(n,k)/(2^n - 1): the exact mean number of steps over all 2^n - 1
// composites when every basis of order <= k is available.
Ratio step_count_expectation(int n, int k);

// Cross-check of step_count_expectation by running the loop with oracle
// components over every composite of n symbols. Exact rational.
Ratio simulate_mean_steps(int n, int k, uint64_t seed);

uint64_t image_hash(const Image& img);

}  // namespace cor
