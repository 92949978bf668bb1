#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cor/cor_loop.hpp"
#include "cor/discriminator.hpp"
#include "cor/restorers.hpp"
#include "cor/synthesis.hpp"

namespace cor {

// Everything a command needs to be reproducible. Parsed from a JSON config
// file; unknown keys are errors so a typo cannot silently change a run.
struct RunConfig {
    uint64_t seed = 1;
    std::string dataset_dir = "data/uird-mini";
    std::string model_path = "out/model.json";
    std::string out_dir = "out";
    int image_size = 256;
    int per_category = 20;
    std::vector<std::string> categories;  // empty = the 12 defaults

    RestorerMode mode = RestorerMode::Classical;
    std::vector<std::string> bases;  // empty = all 1-order symbols
    bool dd_oracle = false;

    // optional explicit margins; empty epsilon_b map + negative epsilon_o
    // sentinel means "derive defaults from the basis list"
    double epsilon_o = -1.0;
    std::map<std::string, double> epsilon_b;

    int max_steps = 16;
    double no_progress_threshold = 1e-4;
    int patches = 12;
    int patch_size = 128;

    TrainHyper train;
    int train_patches_per_image = 6;
    double holdout_fraction = 0.2;
    // add restored order-1 images to the clean class (training aid for the
    // loop's clean detection; never part of the holdout)
    bool train_augment_restored = true;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
    std::string to_json() const;
    void save_snapshot(const std::string& dir) const;  // writes dir/config.json

    BasisSet basis_set() const;
    MarginConfig margin_config() const;
    RestorerRegistry make_registry() const;
    CoRConfig cor_config() const;
};

// synth: dataset + manifest + config snapshot under dataset_dir.
std::string cmd_synth(const RunConfig& config);  // returns manifest path

struct TrainSummary {
    std::string model_path;
    std::string log_path;  // CSV: epoch, loss
    double holdout_accuracy = 0.0;
    int num_classes = 0;
};
TrainSummary cmd_train_dd(const RunConfig& config);

struct RunOutput {
    std::string input_path;
    std::string restored_path;
    std::string trace_path;
    CoRTrace trace;
};
// input may be a single PNG or a directory of PNGs. manifest_path is
// required in oracle mode (it carries the synthesis records).
std::vector<RunOutput> cmd_run(const RunConfig& config, const std::string& input,
                               const std::string& manifest_path, bool dump_steps);

struct EvalRow {
    std::string category;
    double psnr_input = 0, ssim_input = 0;
    double psnr_single_pass = 0;
    double psnr_cor = 0, ssim_cor = 0;
    double mean_steps = 0;
};
// Per-category metrics plus a final "mean" row; written to out_dir/eval.csv.
std::vector<EvalRow> cmd_eval(const RunConfig& config);

struct AblateRow {
    std::string table;    // "dd" or "bases"
    std::string setting;  // "a".."e"
    std::string detail;
    double psnr = 0, ssim = 0;
};
// DD settings (a)-(e) on coupled low+haze+snow composites and basis-set
// settings (a)-(d) on low+haze+rain; written to out_dir/ablation.csv.
std::vector<AblateRow> cmd_ablate(const RunConfig& config);

// TR/IR curve CSV for k = 1..n; returns the output path.
std::string cmd_complexity(int n, const std::string& out_path);

std::string termination_name(Termination t);
std::string trace_to_json(const CoRTrace& trace);

}  // namespace cor
