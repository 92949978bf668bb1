#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cor/harness.hpp"

using namespace cor;

namespace {

// shared flag state; CLI flags override the values loaded from --config
struct CommonOpts {
    std::string config_path;
    bool seed_set = false;
    uint64_t seed = 0;
    std::string out_dir;
    std::string categories;  // comma separated
    std::string mode;        // oracle|classical
    std::string dd;          // trained|oracle
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration");
    cmd->add_option("--seed", opts.seed, "master seed override")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--out", opts.out_dir, "output directory override");
    cmd->add_option("--categories", opts.categories,
                    "comma-separated category labels (e.g. haze+noise15,rain)");
    cmd->add_option("--mode", opts.mode, "restorer mode: oracle|classical")
        ->check(CLI::IsMember({"oracle", "classical"}));
    cmd->add_option("--dd", opts.dd, "discriminator: trained|oracle")
        ->check(CLI::IsMember({"trained", "oracle"}));
}

RunConfig resolve(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (!opts.categories.empty()) {
        cfg.categories.clear();
        std::string cur;
        for (char ch : opts.categories + ",") {
            if (ch == ',') {
                if (!cur.empty()) cfg.categories.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
    }
    if (opts.mode == "oracle") cfg.mode = RestorerMode::Oracle;
    if (opts.mode == "classical") cfg.mode = RestorerMode::Classical;
    if (opts.dd == "oracle") cfg.dd_oracle = true;
    if (opts.dd == "trained") cfg.dd_oracle = false;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chain-of-restoration pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input, manifest_path, complexity_out = "complexity.csv";
    bool dump_steps = false;
    int complexity_n = 20;

    auto* synth = app.add_subcommand("synth", "synthesize the degradation dataset");
    add_common(synth, opts);

    auto* train = app.add_subcommand("train-dd", "train the degradation discriminator");
    add_common(train, opts);

    auto* run = app.add_subcommand("run", "restore one PNG or a directory of PNGs");
    add_common(run, opts);
    run->add_option("input", input, "PNG file or directory")->required();
    run->add_option("--manifest", manifest_path, "dataset manifest (required in oracle mode)");
    run->add_flag("--dump-steps", dump_steps, "write every intermediate image");

    auto* eval = app.add_subcommand("eval", "per-category PSNR/SSIM table");
    add_common(eval, opts);

    auto* ablate = app.add_subcommand("ablate", "discriminator and basis-set ablations");
    add_common(ablate, opts);

    auto* complexity = app.add_subcommand("complexity", "TR/IR curve CSV");
    add_common(complexity, opts);
    complexity->add_option("-n", complexity_n, "number of isolated degradations");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = resolve(opts);
        if (synth->parsed()) {
            // --out names the dataset directory for synth
            if (!opts.out_dir.empty()) cfg.dataset_dir = opts.out_dir;
            std::cout << "manifest: " << cmd_synth(cfg) << "\n";
        } else if (train->parsed()) {
            TrainSummary s = cmd_train_dd(cfg);
            std::cout << "model: " << s.model_path << "\nlog: " << s.log_path << "\n";
        } else if (run->parsed()) {
            auto outputs = cmd_run(cfg, input, manifest_path, dump_steps);
            for (const auto& o : outputs)
                std::cout << o.input_path << " -> " << o.restored_path << " ("
                          << termination_name(o.trace.termination) << ", "
                          << o.trace.steps.size() << " trace entries)\n";
        } else if (eval->parsed()) {
            cmd_eval(cfg);
        } else if (ablate->parsed()) {
            cmd_ablate(cfg);
        } else if (complexity->parsed()) {
            std::string path = opts.out_dir.empty()
                                   ? complexity_out
                                   : opts.out_dir + "/complexity.csv";
            std::cout << "curves: " << cmd_complexity(complexity_n, path) << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
