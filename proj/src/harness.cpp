#include "cor/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cor/metrics.hpp"
#include "cor/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cor {

namespace {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// caps the infinite PSNR of a bit-exact restoration so means stay finite
double capped_psnr(const Image& a, const Image& b) {
    double p = psnr(a, b);
    return std::isinf(p) ? 99.0 : std::min(p, 99.0);
}

Image quantized(const Image& img) {
    Image out = img;
    for (auto& v : out.data) v = to_level(v) / 255.0;
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

RunConfig RunConfig::from_file(const std::string& path) {
    return from_json_text(read_file(path));
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j = json::parse(text);
    RunConfig cfg;
    reject_unknown_keys(j,
                        {"seed", "dataset_dir", "model_path", "out_dir", "image_size",
                         "per_category", "categories", "registry", "dd", "margins", "cor",
                         "train"},
                        "top level");
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("dataset_dir")) cfg.dataset_dir = j["dataset_dir"].get<std::string>();
    if (j.contains("model_path")) cfg.model_path = j["model_path"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("image_size")) cfg.image_size = j["image_size"].get<int>();
    if (j.contains("per_category")) cfg.per_category = j["per_category"].get<int>();
    if (j.contains("categories"))
        cfg.categories = j["categories"].get<std::vector<std::string>>();
    if (j.contains("registry")) {
        const json& r = j["registry"];
        reject_unknown_keys(r, {"mode", "bases"}, "registry");
        if (r.contains("mode")) {
            std::string mode = r["mode"].get<std::string>();
            if (mode == "oracle")
                cfg.mode = RestorerMode::Oracle;
            else if (mode == "classical")
                cfg.mode = RestorerMode::Classical;
            else
                throw std::invalid_argument("config: registry.mode must be oracle|classical");
        }
        if (r.contains("bases")) cfg.bases = r["bases"].get<std::vector<std::string>>();
    }
    if (j.contains("dd")) {
        std::string dd = j["dd"].get<std::string>();
        if (dd == "oracle")
            cfg.dd_oracle = true;
        else if (dd == "trained")
            cfg.dd_oracle = false;
        else
            throw std::invalid_argument("config: dd must be trained|oracle");
    }
    if (j.contains("margins")) {
        const json& m = j["margins"];
        reject_unknown_keys(m, {"epsilon_o", "epsilon_b"}, "margins");
        if (m.contains("epsilon_o")) cfg.epsilon_o = m["epsilon_o"].get<double>();
        if (m.contains("epsilon_b"))
            for (auto it = m["epsilon_b"].begin(); it != m["epsilon_b"].end(); ++it)
                cfg.epsilon_b[DegradationLabel::parse(it.key()).canonical_key()] =
                    it.value().get<double>();
    }
    if (j.contains("cor")) {
        const json& c = j["cor"];
        reject_unknown_keys(c, {"max_steps", "no_progress_threshold", "patches", "patch_size"},
                            "cor");
        if (c.contains("max_steps")) cfg.max_steps = c["max_steps"].get<int>();
        if (c.contains("no_progress_threshold"))
            cfg.no_progress_threshold = c["no_progress_threshold"].get<double>();
        if (c.contains("patches")) cfg.patches = c["patches"].get<int>();
        if (c.contains("patch_size")) cfg.patch_size = c["patch_size"].get<int>();
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        reject_unknown_keys(t,
                            {"learning_rate", "epochs", "batch", "weight_decay",
                             "patches_per_image", "holdout_fraction", "augment_restored"},
                            "train");
        if (t.contains("augment_restored"))
            cfg.train_augment_restored = t["augment_restored"].get<bool>();
        if (t.contains("learning_rate")) cfg.train.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
        if (t.contains("batch")) cfg.train.batch = t["batch"].get<int>();
        if (t.contains("weight_decay")) cfg.train.weight_decay = t["weight_decay"].get<double>();
        if (t.contains("patches_per_image"))
            cfg.train_patches_per_image = t["patches_per_image"].get<int>();
        if (t.contains("holdout_fraction"))
            cfg.holdout_fraction = t["holdout_fraction"].get<double>();
    }
    return cfg;
}

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["dataset_dir"] = dataset_dir;
    j["model_path"] = model_path;
    j["out_dir"] = out_dir;
    j["image_size"] = image_size;
    j["per_category"] = per_category;
    j["categories"] = categories;
    j["registry"]["mode"] = mode == RestorerMode::Oracle ? "oracle" : "classical";
    j["registry"]["bases"] = bases;
    j["dd"] = dd_oracle ? "oracle" : "trained";
    MarginConfig m = margin_config();
    j["margins"]["epsilon_o"] = m.epsilon_o;
    j["margins"]["epsilon_b"] = m.epsilon_b;
    j["cor"]["max_steps"] = max_steps;
    j["cor"]["no_progress_threshold"] = no_progress_threshold;
    j["cor"]["patches"] = patches;
    j["cor"]["patch_size"] = patch_size;
    j["train"]["learning_rate"] = train.learning_rate;
    j["train"]["epochs"] = train.epochs;
    j["train"]["batch"] = train.batch;
    j["train"]["weight_decay"] = train.weight_decay;
    j["train"]["patches_per_image"] = train_patches_per_image;
    j["train"]["holdout_fraction"] = holdout_fraction;
    j["train"]["augment_restored"] = train_augment_restored;
    return j.dump(2) + "\n";
}

void RunConfig::save_snapshot(const std::string& dir) const {
    fs::create_directories(dir);
    write_file((fs::path(dir) / "config.json").string(), to_json());
}

BasisSet RunConfig::basis_set() const {
    if (bases.empty()) return enumerate_bases(static_cast<int>(symbol_registry().size()), 1);
    BasisSet set;
    for (const auto& b : bases) set.insert(DegradationLabel::parse(b));
    return set;
}

MarginConfig RunConfig::margin_config() const {
    std::vector<std::string> keys;
    for (const auto& b : basis_set().members()) keys.push_back(b.canonical_key());
    MarginConfig m = MarginConfig::defaults_for(keys);
    if (epsilon_o >= 0.0) m.epsilon_o = epsilon_o;
    if (!epsilon_b.empty()) m.epsilon_b = epsilon_b;
    return m;
}

RestorerRegistry RunConfig::make_registry() const { return {mode, basis_set()}; }

CoRConfig RunConfig::cor_config() const {
    CoRConfig c;
    c.max_steps = max_steps;
    c.no_progress_threshold = no_progress_threshold;
    c.margins = margin_config();
    c.oracle_dd = dd_oracle;
    c.patches = patches;
    c.patch_size = patch_size;
    c.seed = seed;
    return c;
}

// ---------------------------------------------------------------------------
// synth

std::string cmd_synth(const RunConfig& config) {
    std::vector<DegradationLabel> cats;
    if (config.categories.empty()) {
        cats = default_categories();
    } else {
        for (const auto& c : config.categories) cats.push_back(DegradationLabel::parse(c));
    }
    std::string manifest = build_dataset(config.dataset_dir, cats, config.per_category,
                                         config.seed, SynthConfig{}, config.image_size);
    config.save_snapshot(config.dataset_dir);
    return manifest;
}

// ---------------------------------------------------------------------------
// train-dd

namespace {

struct LabeledImage {
    std::string path;  // absolute
    std::string cls;
    // symbols removed classically (outermost first) before sampling; the
    // label then names the degradation still left underneath
    std::vector<std::string> restore_chain;
};

std::vector<TrainSample> sample_patches(const Image& img, int cls, int count, int patch_size,
                                        uint64_t seed) {
    std::vector<TrainSample> out;
    Rng rng(seed);
    for (int p = 0; p < count; ++p) {
        Image patch = random_crop(img, patch_size, rng);
        out.push_back({extract_features(patch), cls});
    }
    return out;
}

}  // namespace

TrainSummary cmd_train_dd(const RunConfig& config) {
    Manifest manifest = load_manifest((fs::path(config.dataset_dir) / "manifest.json").string());
    fs::path root = config.dataset_dir;

    // The discriminator's classes are registry bases, not dataset categories:
    // each degraded image is labeled with the basis a correct chain removes
    // next (its outermost cover part), so composite categories teach the
    // model to name the outermost degradation.
    RestorerRegistry registry = config.make_registry();
    std::vector<LabeledImage> images;
    std::vector<std::string> seen_clean;
    std::vector<std::string> class_labels;
    for (const auto& e : manifest.entries) {
        Decision d = oracle_dd(e.record, registry);
        images.push_back({(root / e.degraded).string(), d.basis});
        if (std::find(class_labels.begin(), class_labels.end(), d.basis) == class_labels.end())
            class_labels.push_back(d.basis);
        if (std::find(seen_clean.begin(), seen_clean.end(), e.clean) == seen_clean.end()) {
            seen_clean.push_back(e.clean);
            images.push_back({(root / e.clean).string(), "clean"});
        }
        // A running chain sees *partially restored* images: a blind restorer
        // filters what it removes, so intermediate states look different from
        // fresh dataset images. Teach every such state by peeling the record
        // outermost-first with the classical restorers and labeling what is
        // still left underneath (clean at the end of the chain).
        if (config.train_augment_restored) {
            std::vector<std::string> chain;
            SynthesisRecord remaining = e.record;
            while (!remaining.applied.empty()) {
                chain.push_back(remaining.applied.back().symbol);
                remaining.applied.pop_back();
                std::string cls =
                    remaining.applied.empty() ? "clean" : oracle_dd(remaining, registry).basis;
                images.push_back({(root / e.degraded).string(), cls, chain});
                if (cls != "clean" &&
                    std::find(class_labels.begin(), class_labels.end(), cls) ==
                        class_labels.end())
                    class_labels.push_back(cls);
            }
        }
    }
    std::sort(class_labels.begin(), class_labels.end());
    class_labels.push_back("clean");
    auto class_of = [&](const std::string& label) {
        auto it = std::find(class_labels.begin(), class_labels.end(), label);
        return static_cast<int>(it - class_labels.begin());
    };

    // Image-level holdout split so evaluation patches come from unseen
    // images. The restored-clean augmentation images are a training aid,
    // not part of the dataset's patch set, so they never enter the holdout.
    std::vector<LabeledImage> dataset_images, aug_images;
    for (auto& li : images)
        (li.restore_chain.empty() ? dataset_images : aug_images).push_back(li);
    Rng split_rng(derive_seed(config.seed, 0xABCDULL));
    for (size_t i = dataset_images.size(); i > 1; --i)
        std::swap(dataset_images[i - 1], dataset_images[split_rng.next_below(i)]);
    size_t holdout =
        static_cast<size_t>(std::round(config.holdout_fraction * dataset_images.size()));
    holdout = std::min(holdout, dataset_images.size() - 1);
    size_t train_count = dataset_images.size() - holdout;
    dataset_images.insert(dataset_images.begin() + train_count, aug_images.begin(),
                          aug_images.end());
    train_count += aug_images.size();

    std::vector<TrainSample> train_set, held_set;
    for (size_t i = 0; i < dataset_images.size(); ++i) {
        Image img = load_png(dataset_images[i].path);
        for (const auto& symbol : dataset_images[i].restore_chain)
            img = classical_restore_symbol(img, symbol);
        auto samples =
            sample_patches(img, class_of(dataset_images[i].cls), config.train_patches_per_image,
                           config.patch_size, derive_seed(config.seed, 0x5EED + i));
        auto& sink = i < train_count ? train_set : held_set;
        sink.insert(sink.end(), samples.begin(), samples.end());
    }

    TrainHyper hyper = config.train;
    hyper.seed = derive_seed(config.seed, 0x7EA1ULL);
    TrainResult result = train_classifier(train_set, class_labels, hyper);

    int correct = 0;
    for (const auto& s : held_set) {
        auto probs = result.model.predict_one(s.features);
        int best = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        if (best == s.class_index) ++correct;
    }
    double accuracy = held_set.empty() ? 0.0 : static_cast<double>(correct) / held_set.size();

    fs::create_directories(fs::path(config.model_path).parent_path().empty()
                               ? "."
                               : fs::path(config.model_path).parent_path().string());
    result.model.save(config.model_path);

    fs::create_directories(config.out_dir);
    std::string log_path = (fs::path(config.out_dir) / "training_log.csv").string();
    std::ostringstream log;
    log << "epoch,loss\n";
    for (size_t e = 0; e < result.epoch_losses.size(); ++e)
        log << e << "," << std::setprecision(17) << result.epoch_losses[e] << "\n";
    write_file(log_path, log.str());
    config.save_snapshot(config.out_dir);

    std::cout << "classes: " << class_labels.size() << "  train patches: " << train_set.size()
              << "  held-out patches: " << held_set.size() << "  held-out accuracy: " << accuracy
              << "\n";
    return {config.model_path, log_path, accuracy, static_cast<int>(class_labels.size())};
}

// ---------------------------------------------------------------------------
// run

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::CleanDetected: return "clean_detected";
        case Termination::MaxSteps: return "max_steps";
        case Termination::NoProgress: return "no_progress";
    }
    return "unknown";
}

std::string trace_to_json(const CoRTrace& trace) {
    json j;
    j["termination"] = termination_name(trace.termination);
    j["steps"] = json::array();
    for (const auto& s : trace.steps) {
        json step;
        step["index"] = s.index;
        step["clean"] = s.clean;
        step["chosen_basis"] = s.chosen_basis;
        step["skipped"] = s.skipped;
        step["probabilities"] = s.probabilities;
        step["revised"] = s.revised;
        step["image_hash"] = s.image_hash;
        j["steps"].push_back(step);
    }
    return j.dump(2) + "\n";
}

namespace {

// find the manifest record whose degraded path matches the input file
const ManifestEntry* match_entry(const Manifest& manifest, const std::string& input) {
    std::string name = fs::path(input).filename().string();
    std::string parent = fs::path(input).parent_path().filename().string();
    const ManifestEntry* by_name = nullptr;
    for (const auto& e : manifest.entries) {
        fs::path d = e.degraded;
        if (d.filename() == name) {
            if (d.parent_path().filename() == parent) return &e;
            if (!by_name) by_name = &e;
        }
    }
    return by_name;
}

}  // namespace

std::vector<RunOutput> cmd_run(const RunConfig& config, const std::string& input,
                               const std::string& manifest_path, bool dump_steps) {
    std::vector<std::string> inputs;
    if (fs::is_directory(input)) {
        for (const auto& e : fs::directory_iterator(input))
            if (e.path().extension() == ".png") inputs.push_back(e.path().string());
        std::sort(inputs.begin(), inputs.end());
    } else {
        inputs.push_back(input);
    }
    if (inputs.empty()) throw std::invalid_argument("run: no PNG inputs under " + input);

    bool needs_manifest = config.mode == RestorerMode::Oracle || config.dd_oracle;
    if (needs_manifest && manifest_path.empty())
        throw std::invalid_argument(
            "run: oracle restorers/discriminator need --manifest for the synthesis records");
    Manifest manifest;
    if (!manifest_path.empty()) manifest = load_manifest(manifest_path);

    RestorerRegistry registry = config.make_registry();
    ClassifierModel model;
    if (!config.dd_oracle) model = ClassifierModel::load(config.model_path);

    fs::create_directories(config.out_dir);
    config.save_snapshot(config.out_dir);

    std::vector<RunOutput> outputs;
    for (const auto& path : inputs) {
        Image img = load_png(path);
        const ManifestEntry* entry = nullptr;
        if (!manifest_path.empty()) {
            entry = match_entry(manifest, path);
            if (!entry && needs_manifest)
                throw std::runtime_error("run: no manifest record matches " + path);
        }

        std::string stem = fs::path(path).stem().string();
        CoRConfig cor = config.cor_config();
        if (dump_steps) {
            cor.step_sink = [&](int step, const Image& x) {
                save_png(x, (fs::path(config.out_dir) /
                             (stem + "_step" + std::to_string(step) + ".png"))
                                .string());
            };
        }
        auto [restored, trace] =
            run_cor(img, registry, config.dd_oracle ? nullptr : &model, cor,
                    entry ? &entry->record : nullptr);

        RunOutput out;
        out.input_path = path;
        out.restored_path = (fs::path(config.out_dir) / (stem + "_restored.png")).string();
        out.trace_path = (fs::path(config.out_dir) / (stem + "_trace.json")).string();
        save_png(restored, out.restored_path);
        write_file(out.trace_path, trace_to_json(trace));
        out.trace = std::move(trace);
        outputs.push_back(std::move(out));
    }
    return outputs;
}

// ---------------------------------------------------------------------------
// eval

std::vector<EvalRow> cmd_eval(const RunConfig& config) {
    Manifest manifest = load_manifest((fs::path(config.dataset_dir) / "manifest.json").string());
    fs::path root = config.dataset_dir;

    RestorerRegistry registry = config.make_registry();
    ClassifierModel model;
    if (!config.dd_oracle) model = ClassifierModel::load(config.model_path);

    std::vector<std::string> wanted = config.categories;
    for (auto& w : wanted) w = DegradationLabel::parse(w).canonical_key();

    // group manifest entries by category, preserving manifest order
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ManifestEntry*>> groups;
    for (const auto& e : manifest.entries) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), e.label) == wanted.end())
            continue;
        if (!groups.count(e.label)) order.push_back(e.label);
        groups[e.label].push_back(&e);
    }
    if (order.empty()) throw std::invalid_argument("eval: no matching categories in the manifest");

    std::vector<EvalRow> rows;
    for (const auto& cat : order) {
        EvalRow row;
        row.category = cat;
        DegradationLabel label = DegradationLabel::parse(cat);

        // single-pass baseline: the best isolated restorer for this category,
        // chosen among the category's own components (an informed baseline)
        std::vector<std::string> symbols;
        for (const auto& s : label.parts())
            if (std::find(symbols.begin(), symbols.end(), s) == symbols.end())
                symbols.push_back(s);
        std::vector<double> single_sums(symbols.size(), 0.0);

        for (const ManifestEntry* e : groups[cat]) {
            Image clean = load_png((root / e->clean).string());
            Image degraded = load_png((root / e->degraded).string());
            row.psnr_input += capped_psnr(degraded, clean);
            row.ssim_input += ssim(degraded, clean);

            for (size_t s = 0; s < symbols.size(); ++s) {
                DegradationLabel basis = DegradationLabel::parse(symbols[s]);
                Image once = registry.has(basis)
                                 ? registry.restore(degraded, basis, &e->record)
                                 : degraded;
                single_sums[s] += capped_psnr(quantized(once), clean);
            }

            auto [restored, trace] =
                run_cor(degraded, registry, config.dd_oracle ? nullptr : &model,
                        config.cor_config(), &e->record);
            row.psnr_cor += capped_psnr(quantized(restored), clean);
            row.ssim_cor += ssim(quantized(restored), clean);
            for (const auto& s : trace.steps)
                if (!s.clean && !s.skipped) row.mean_steps += 1.0;
        }

        double n = static_cast<double>(groups[cat].size());
        row.psnr_input /= n;
        row.ssim_input /= n;
        row.psnr_cor /= n;
        row.ssim_cor /= n;
        row.mean_steps /= n;
        row.psnr_single_pass = single_sums.empty()
                                   ? row.psnr_input
                                   : *std::max_element(single_sums.begin(), single_sums.end()) / n;
        rows.push_back(row);
    }

    EvalRow mean;
    mean.category = "mean";
    for (const auto& r : rows) {
        mean.psnr_input += r.psnr_input;
        mean.ssim_input += r.ssim_input;
        mean.psnr_single_pass += r.psnr_single_pass;
        mean.psnr_cor += r.psnr_cor;
        mean.ssim_cor += r.ssim_cor;
        mean.mean_steps += r.mean_steps;
    }
    double n = static_cast<double>(rows.size());
    mean.psnr_input /= n;
    mean.ssim_input /= n;
    mean.psnr_single_pass /= n;
    mean.psnr_cor /= n;
    mean.ssim_cor /= n;
    mean.mean_steps /= n;
    rows.push_back(mean);

    fs::create_directories(config.out_dir);
    std::ostringstream csv;
    csv << "category,psnr_input,ssim_input,psnr_single_pass,psnr_cor,ssim_cor,mean_steps\n";
    for (const auto& r : rows)
        csv << r.category << "," << fmt(r.psnr_input) << "," << fmt(r.ssim_input) << ","
            << fmt(r.psnr_single_pass) << "," << fmt(r.psnr_cor) << "," << fmt(r.ssim_cor) << ","
            << fmt(r.mean_steps) << "\n";
    write_file((fs::path(config.out_dir) / "eval.csv").string(), csv.str());
    config.save_snapshot(config.out_dir);
    std::cout << csv.str();
    return rows;
}

// ---------------------------------------------------------------------------
// ablate

namespace {

struct Scored {
    double psnr = 0, ssim = 0;
};

Scored score(const Image& restored, const Image& clean) {
    Image r = quantized(restored);
    return {capped_psnr(r, clean), ssim(r, clean)};
}

// setting (a): uniform choice over registry bases and "stop" each step
Image random_policy_restore(const Image& degraded, const SynthesisRecord& record,
                            const RestorerRegistry& registry, int max_steps, uint64_t seed) {
    Rng rng(seed);
    const auto& members = registry.bases().members();
    Image x = degraded;
    SynthesisRecord rec = record;
    for (int step = 0; step < max_steps; ++step) {
        size_t pick = rng.next_below(members.size() + 1);
        if (pick == members.size()) break;  // "clean" drawn
        try {
            auto [restored, updated] = registry.oracle_remove(x, members[pick], rec);
            x = std::move(restored);
            rec = std::move(updated);
        } catch (const std::runtime_error&) {
            // basis absent from the remainder: the step is a no-op
        }
    }
    return x;
}

// greedy partial-cover oracle loop for basis-set ablation: repeatedly remove
// the highest-order registered basis that fits inside the remainder and
// contains its outermost component; stop when nothing fits.
Image greedy_cover_restore(const Image& degraded, const SynthesisRecord& record,
                           const RestorerRegistry& registry) {
    Image x = degraded;
    SynthesisRecord rec = record;
    while (!rec.applied.empty()) {
        std::string outer;
        int outer_rank = -1;
        for (const auto& comp : rec.applied) {
            int r = composition_rank(comp.symbol);
            if (r > outer_rank) {
                outer_rank = r;
                outer = comp.symbol;
            }
        }
        // sub-multiset test against the remaining label
        auto remaining = rec.label().parts();
        std::sort(remaining.begin(), remaining.end());
        const DegradationLabel* best = nullptr;
        for (const auto& b : registry.bases().members()) {
            auto parts = b.parts();
            std::sort(parts.begin(), parts.end());
            if (!std::includes(remaining.begin(), remaining.end(), parts.begin(), parts.end()))
                continue;
            if (std::find(parts.begin(), parts.end(), outer) == parts.end()) continue;
            if (!best || b.order() > best->order()) best = &b;
        }
        if (!best) break;  // unresolvable remainder
        auto [restored, updated] = registry.oracle_remove(x, *best, rec);
        x = std::move(restored);
        rec = std::move(updated);
    }
    return x;
}

ClassifierModel train_ablation_model(const std::vector<std::string>& basis_keys,
                                     const RunConfig& config) {
    std::vector<std::string> class_labels = basis_keys;
    std::sort(class_labels.begin(), class_labels.end());
    class_labels.push_back("clean");

    const int per_class = 25, size = 160;
    std::vector<TrainSample> samples;
    SynthConfig synth_cfg;
    for (size_t c = 0; c < class_labels.size(); ++c) {
        for (int i = 0; i < per_class; ++i) {
            uint64_t s = derive_seed(config.seed, 0xAB1A7E + c * 1000 + i);
            Image clean = gen_clean(s, size, size);
            Image img = clean;
            if (class_labels[c] != "clean") {
                auto [degraded, rec] =
                    synthesize(clean, DegradationLabel::parse(class_labels[c]), synth_cfg, s + 1);
                img = std::move(degraded);
            }
            auto patches = sample_patches(img, static_cast<int>(c), 4, config.patch_size,
                                          derive_seed(s, 0xC0DE));
            samples.insert(samples.end(), patches.begin(), patches.end());
        }
    }
    TrainHyper hyper = config.train;
    hyper.seed = derive_seed(config.seed, 0xF17ULL);
    return train_classifier(samples, class_labels, hyper).model;
}

}  // namespace

std::vector<AblateRow> cmd_ablate(const RunConfig& config) {
    std::vector<AblateRow> rows;
    SynthConfig synth_cfg;
    const int n_eval = 12, size = 192;

    // --- DD ablation on coupled low+haze+snow composites, oracle restorers
    {
        std::vector<std::string> basis_keys = {"low", "haze", "snow", "haze+snow"};
        BasisSet bases;
        for (const auto& k : basis_keys) bases.insert(DegradationLabel::parse(k));
        RestorerRegistry registry(RestorerMode::Oracle, bases);
        ClassifierModel model = train_ablation_model(basis_keys, config);

        DegradationLabel label = DegradationLabel::parse("low+haze+snow");
        std::vector<Image> cleans, degradeds;
        std::vector<SynthesisRecord> records;
        for (int i = 0; i < n_eval; ++i) {
            Image clean = gen_clean(derive_seed(config.seed, 0xEDA7 + i), size, size);
            auto [degraded, rec] =
                synthesize(clean, label, synth_cfg, derive_seed(config.seed, 0xDE6 + i));
            cleans.push_back(quantized(clean));
            degradeds.push_back(std::move(degraded));
            records.push_back(std::move(rec));
        }

        auto run_setting = [&](const std::string& name, const std::string& detail,
                               double eps_o, double eps_low, bool random_policy) {
            Scored total;
            for (int i = 0; i < n_eval; ++i) {
                Image out(1, 1, 1);
                if (random_policy) {
                    out = random_policy_restore(degradeds[i], records[i], registry,
                                                config.max_steps,
                                                derive_seed(config.seed, 0xA11 + i));
                } else {
                    CoRConfig cor = config.cor_config();
                    cor.oracle_dd = false;
                    cor.margins.epsilon_o = eps_o;
                    cor.margins.epsilon_b.clear();
                    if (eps_low != 0.0)
                        for (const auto& k : basis_keys)
                            if (DegradationLabel::parse(k).canonical_key().find("low") !=
                                std::string::npos)
                                cor.margins.epsilon_b[DegradationLabel::parse(k).canonical_key()] =
                                    eps_low;
                    auto [restored, trace] =
                        run_cor(degradeds[i], registry, &model, cor, &records[i]);
                    out = std::move(restored);
                }
                Scored s = score(out, cleans[i]);
                total.psnr += s.psnr;
                total.ssim += s.ssim;
            }
            rows.push_back({"dd", name, detail, total.psnr / n_eval, total.ssim / n_eval});
        };

        run_setting("a", "random basis selection", 0, 0, true);
        run_setting("b", "classifier only", 0.0, 0.0, false);
        run_setting("c", "classifier + epsilon_o", 0.03, 0.0, false);
        run_setting("d", "classifier + epsilon_b", 0.0, -0.05, false);
        run_setting("e", "classifier + both margins", 0.03, -0.05, false);
    }

    // --- basis-set ablation on low+haze+rain, greedy oracle cover loop
    {
        DegradationLabel label = DegradationLabel::parse("low+haze+rain");
        std::vector<Image> cleans, degradeds;
        std::vector<SynthesisRecord> records;
        for (int i = 0; i < n_eval; ++i) {
            Image clean = gen_clean(derive_seed(config.seed, 0xBA5E + i), size, size);
            auto [degraded, rec] =
                synthesize(clean, label, synth_cfg, derive_seed(config.seed, 0xB0B + i));
            cleans.push_back(quantized(clean));
            degradeds.push_back(std::move(degraded));
            records.push_back(std::move(rec));
        }

        auto run_bases = [&](const std::string& name, const std::string& detail,
                             const std::vector<std::string>& keys) {
            BasisSet bases;
            for (const auto& k : keys) bases.insert(DegradationLabel::parse(k));
            RestorerRegistry registry(RestorerMode::Oracle, bases);
            Scored total;
            for (int i = 0; i < n_eval; ++i) {
                Image out = greedy_cover_restore(degradeds[i], records[i], registry);
                Scored s = score(out, cleans[i]);
                total.psnr += s.psnr;
                total.ssim += s.ssim;
            }
            rows.push_back({"bases", name, detail, total.psnr / n_eval, total.ssim / n_eval});
        };

        run_bases("a", "missing low", {"rain", "haze", "rain+haze"});
        run_bases("b", "overlapping 2-order only", {"rain+haze", "low+haze"});
        run_bases("c", "full 1-order", {"low", "rain", "haze"});
        run_bases("d", "full with 2-order", {"low", "rain", "haze", "rain+haze", "low+haze"});
    }

    fs::create_directories(config.out_dir);
    std::ostringstream csv;
    csv << "table,setting,detail,psnr,ssim\n";
    for (const auto& r : rows)
        csv << r.table << "," << r.setting << "," << r.detail << "," << fmt(r.psnr) << ","
            << fmt(r.ssim) << "\n";
    write_file((fs::path(config.out_dir) / "ablation.csv").string(), csv.str());
    config.save_snapshot(config.out_dir);
    std::cout << csv.str();
    return rows;
}

// ---------------------------------------------------------------------------
// complexity

std::string cmd_complexity(int n, const std::string& out_path) {
    fs::path p = out_path;
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    emit_curves(n, out_path);
    return out_path;
}

}  // namespace cor
