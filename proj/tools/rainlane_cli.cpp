// rainlane: rainy road image synthesis, dual-layer kernel prediction
// restoration, and evaluation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rainlane/bench.hpp"
#include "rainlane/checkpoint.hpp"
#include "rainlane/config_json.hpp"
#include "rainlane/dataset.hpp"
#include "rainlane/error.hpp"
#include "rainlane/image_io.hpp"
#include "rainlane/kpn.hpp"
#include "rainlane/metrics.hpp"
#include "rainlane/parallel.hpp"
#include "rainlane/rcflane.hpp"

namespace fs = std::filesystem;
using namespace rainlane;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// Synthesis flags shared by synth, build-dataset and pipeline. Flags override
// the config file, which overrides built-in defaults.
struct SynthFlags {
    std::string config;
    std::optional<double> beta, gamma, lambda, atmos, fog_scale, mask_value, density, angle, threshold, noise_sigma;
    std::optional<int> streak_length;

    void add(CLI::App* app) {
        app->add_option("--config", config, "JSON file with an rcflane configuration")->check(CLI::ExistingFile);
        app->add_option("--beta", beta, "rain layer weight (>= 0)");
        app->add_option("--gamma", gamma, "retention weight of the darkening mask, [0,1]");
        app->add_option("--mask-value", mask_value, "intensity of the constant mask layer, [0,1]");
        app->add_option("--lambda", lambda, "fog attenuation coefficient per pixel distance (>= 0)");
        app->add_option("--atmos", atmos, "atmospheric light A, [0,1]");
        app->add_option("--fog-scale", fog_scale, "fog scale S in pixels (default: center-to-corner distance)");
        app->add_option("--density", density, "fraction of pixels seeding rain streaks, [0,1]");
        app->add_option("--streak-length", streak_length, "rain streak length in pixels (>= 1)");
        app->add_option("--angle", angle, "rain streak angle in degrees from the x axis");
        app->add_option("--threshold", threshold, "drop streak values below this after normalization, [0,1]");
        app->add_option("--noise-sigma", noise_sigma, "std-dev of the streak seeding noise");
    }

    RcflaneConfig resolve() const {
        RcflaneConfig cfg = config.empty() ? RcflaneConfig{} : load_rcflane_config(config);
        if (beta) cfg.beta = *beta;
        if (gamma) cfg.mask.gamma = *gamma;
        if (mask_value) cfg.mask.mask_value = *mask_value;
        if (lambda) cfg.fog.lambda = *lambda;
        if (atmos) cfg.fog.atmos_light = *atmos;
        if (fog_scale) cfg.fog.fog_scale = *fog_scale;
        if (density) cfg.rain.density = *density;
        if (streak_length) cfg.rain.streak_length = *streak_length;
        if (angle) cfg.rain.angle_deg = *angle;
        if (threshold) cfg.rain.threshold = *threshold;
        if (noise_sigma) cfg.rain.noise_sigma = *noise_sigma;
        cfg.validate();
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string input;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    bool emit_intermediates = false;
    SynthFlags flags;
};

int run_synth(const SynthArgs& a) {
    RcflaneConfig cfg = a.flags.resolve();
    if (a.seed) cfg.rain.seed = *a.seed;
    const ImageBuffer img = load_image(a.input);
    const SynthResult res = synthesize(img, cfg);
    const fs::path out(a.out);
    ensure_dir(out);
    const std::string stem = fs::path(a.input).stem().string();
    save_image(res.rainy, out / (stem + "_rainy.png"));
    if (a.emit_intermediates) {
        save_image(res.rain_layer, out / (stem + "_rain.png"));
        save_image(res.rain_composed, out / (stem + "_o1.png"));
        save_image(res.masked, out / (stem + "_o2.png"));
        save_image(field_to_image(res.transmission), out / (stem + "_td.png"));
    }
    std::cout << "wrote " << (out / (stem + "_rainy.png")).string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// build-dataset

struct BuildArgs {
    std::string src, out, depth_dir;
    double split = 0.872;
    std::uint64_t seed = 0;
    SynthFlags flags;
};

int run_build(const BuildArgs& a) {
    BuildOptions opts;
    opts.src_dir = a.src;
    opts.out_dir = a.out;
    opts.config = a.flags.resolve();
    opts.split_ratio = a.split;
    opts.seed = a.seed;
    if (!a.depth_dir.empty()) opts.depth_dir = fs::path(a.depth_dir);
    const DatasetManifest m = build_dataset(opts);
    std::size_t train = 0;
    for (const auto& e : m.entries) train += e.split == "train";
    std::cout << "built " << m.entries.size() << " pairs (" << train << " train, " << m.entries.size() - train
              << " test); manifest " << (fs::path(a.out) / "manifest.json").string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    inline static const TrainConfig defaults{};
    std::string manifest, out, init, layer = "both", hidden = "32,32,32";
    std::string loss = to_string(defaults.loss);
    double lr = defaults.learning_rate, momentum = defaults.momentum;
    double identity_logit = defaults.init.identity_logit, head_scale = defaults.init.head_weight_scale;
    int steps = defaults.steps, batch = defaults.batch, crop = defaults.crop;
    int ksize = defaults.arch.ksize, levels = defaults.arch.levels, eval_every = 100;
    double lr2 = defaults.second_layer().learning_rate;
    double identity_logit2 = defaults.second_layer().init.identity_logit;
    std::uint64_t seed = 0;
};

std::vector<int> parse_widths(const std::string& text) {
    std::vector<int> widths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            widths.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("invalid hidden width list '" + text + "'");
        }
    }
    return widths;
}

void report_eval(const char* tag, int step, double loss, const std::vector<ImagePair>& held_out,
                 const std::vector<ImageBuffer>& inputs, const KpnModel& model) {
    double p = 0.0, s = 0.0;
    for (std::size_t i = 0; i < held_out.size(); ++i) {
        const ImageBuffer restored = kpn_restore(model, inputs[i]);
        p += psnr(restored, held_out[i].clean);
        s += ssim(restored, held_out[i].clean);
    }
    const double n = static_cast<double>(held_out.size());
    std::cout << tag << " step " << step << " loss " << num(loss, 5) << " test_psnr " << num(p / n, 3)
              << " test_ssim " << num(s / n, 4) << "\n";
}

int run_train(const TrainArgs& a) {
    if (a.layer != "1" && a.layer != "2" && a.layer != "both") throw UsageError("--layer must be 1, 2 or both");
    TrainConfig cfg;
    cfg.arch.hidden = parse_widths(a.hidden);
    cfg.arch.ksize = a.ksize;
    cfg.arch.levels = a.levels;
    cfg.init.identity_logit = a.identity_logit;
    cfg.init.head_weight_scale = a.head_scale;
    cfg.loss = parse_loss(a.loss);
    cfg.learning_rate = a.lr;
    cfg.momentum = a.momentum;
    cfg.steps = a.steps;
    cfg.batch = a.batch;
    cfg.crop = a.crop;
    cfg.seed = a.seed;

    const fs::path manifest(a.manifest);
    std::vector<ImagePair> train = load_pairs(manifest, Split::Train);
    if (train.empty()) throw DataError("manifest has no training entries");
    const std::vector<ImagePair> test = load_pairs(manifest, Split::Test);
    cfg.arch.in_channels = train.front().rainy.channels();

    std::vector<TrainPair> pairs;
    for (const ImagePair& p : train) pairs.push_back({p.rainy, p.clean});
    std::vector<ImageBuffer> eval_inputs;
    for (const ImagePair& p : test) eval_inputs.push_back(p.rainy);

    auto hook = [&](const char* tag, std::vector<ImageBuffer>& inputs) -> StepCallback {
        return [&, tag](const StepInfo& info, const KpnModel& model) {
            if (a.eval_every <= 0 || info.step % a.eval_every != 0) return;
            if (test.empty()) {
                std::cout << tag << " step " << info.step << " loss " << num(info.loss, 5) << "\n";
            } else {
                report_eval(tag, info.step, info.loss, test, inputs, model);
            }
        };
    };

    std::vector<KpnModel> layers;
    if (a.layer == "1" || a.layer == "both") {
        TrainResult r = train_layer(pairs, cfg, nullptr, hook("layer1", eval_inputs));
        std::cout << "layer1 final loss " << num(r.losses.back(), 5) << "\n";
        layers.push_back(std::move(r.model));
    } else {
        if (a.init.empty()) throw UsageError("--layer 2 needs --init with a layer-1 checkpoint");
        std::vector<KpnModel> prior = load_layers(a.init);
        layers.push_back(std::move(prior.front()));
    }
    if (a.layer == "2" || a.layer == "both") {
        if (layers.front().arch.in_channels != cfg.arch.in_channels) {
            throw DataError("layer-1 checkpoint channel count does not match the dataset");
        }
        for (TrainPair& p : pairs) p.input = kpn_restore(layers.front(), p.input);
        for (ImageBuffer& img : eval_inputs) img = kpn_restore(layers.front(), img);
        TrainConfig cfg2 = cfg.second_layer();
        cfg2.learning_rate = a.lr2;
        cfg2.init.identity_logit = a.identity_logit2;
        TrainResult r = train_layer(pairs, cfg2, nullptr, hook("layer2", eval_inputs));
        std::cout << "layer2 final loss " << num(r.losses.back(), 5) << "\n";
        layers.push_back(std::move(r.model));
    }
    const fs::path out(a.out);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    save_checkpoint(layers, out);
    std::cout << "wrote " << out.string() << " (" << layers.size() << " layer(s))\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// infer

struct InferArgs {
    std::string checkpoint, out = ".";
    std::vector<std::string> inputs;
    bool emit_mid = false;
};

int run_infer(const InferArgs& a) {
    const std::vector<KpnModel> layers = load_layers(a.checkpoint);
    const fs::path out(a.out);
    ensure_dir(out);
    for (const std::string& in : a.inputs) {
        const ImageBuffer img = load_image(in);
        const std::string stem = fs::path(in).stem().string();
        const ImageBuffer mid = kpn_restore(layers[0], img);
        if (layers.size() == 2) {
            save_image(kpn_restore(layers[1], mid), out / (stem + "_restored.png"));
            if (a.emit_mid) save_image(mid, out / (stem + "_mid.png"));
        } else {
            save_image(mid, out / (stem + "_restored.png"));
        }
        std::cout << "restored " << in << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// eval-recon

struct ReconArgs {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string manifest, restored_dir, split = "test", csv;
};

int run_eval_recon(const ReconArgs& a) {
    struct Row {
        std::string name;
        ReconMetrics m;
    };
    std::vector<Row> rows;
    for (const auto& [restored, clean] : a.pairs) {
        rows.push_back({fs::path(restored).stem().string(), recon_metrics(load_image(restored), load_image(clean))});
    }
    if (!a.manifest.empty()) {
        for (const ImagePair& p : load_pairs(a.manifest, parse_split(a.split))) {
            const ImageBuffer candidate = a.restored_dir.empty()
                                              ? p.rainy
                                              : load_image(fs::path(a.restored_dir) / (p.name + "_restored.png"));
            rows.push_back({p.name, recon_metrics(candidate, p.clean)});
        }
    }
    if (rows.empty()) throw UsageError("eval-recon needs --pair or --manifest");

    std::ostringstream csv;
    csv << "image,psnr_db,ssim\n";
    double p = 0.0, s = 0.0;
    std::printf("%-32s %10s %8s\n", "image", "PSNR dB", "SSIM");
    for (const Row& r : rows) {
        csv << r.name << ',' << num(r.m.psnr_db, 6) << ',' << num(r.m.ssim, 6) << '\n';
        std::printf("%-32s %10.3f %8.4f\n", r.name.c_str(), r.m.psnr_db, r.m.ssim);
        p += r.m.psnr_db;
        s += r.m.ssim;
    }
    const double n = static_cast<double>(rows.size());
    std::printf("%-32s %10.3f %8.4f\n", "mean", p / n, s / n);
    if (!a.csv.empty()) write_text(a.csv, csv.str());
    return kOk;
}

// ---------------------------------------------------------------------------
// eval-depth

struct DepthArgs {
    std::vector<std::pair<std::string, std::string>> pairs;
    double cap = kDefaultDepthCap;
    std::string csv;
};

constexpr const char* kDepthHeader = "image,abs_rel,sq_rel,rmse,rmse_log,log10,delta1,delta2,delta3";

std::string depth_csv_row(const std::string& name, const DepthMetrics& m) {
    return name + ',' + num(m.abs_rel, 6) + ',' + num(m.sq_rel, 6) + ',' + num(m.rmse, 6) + ',' +
           num(m.rmse_log, 6) + ',' + num(m.log10, 6) + ',' + num(m.delta1, 6) + ',' + num(m.delta2, 6) + ',' +
           num(m.delta3, 6);
}

void print_depth_row(const std::string& name, const DepthMetrics& m) {
    std::printf("%-24s %8.3f %8.3f %8.3f %9.3f %8.3f %8.3f %8.3f %8.3f\n", name.c_str(), m.abs_rel, m.sq_rel, m.rmse,
                m.rmse_log, m.log10, m.delta1, m.delta2, m.delta3);
}

int run_eval_depth(const DepthArgs& a) {
    if (a.pairs.empty()) throw UsageError("eval-depth needs at least one --pair");
    std::printf("%-24s %8s %8s %8s %9s %8s %8s %8s %8s\n", "image", "AbsRel", "SqRel", "RMSE", "RMSElog", "log10",
                "d<1.25", "d<1.25^2", "d<1.25^3");
    std::ostringstream csv;
    csv << kDepthHeader << '\n';
    std::vector<DepthMetrics> all;
    for (const auto& [pred, gt] : a.pairs) {
        const DepthMetrics m = depth_metrics(load_depth_png(pred), load_depth_png(gt), a.cap);
        const std::string name = fs::path(pred).stem().string();
        print_depth_row(name, m);
        csv << depth_csv_row(name, m) << '\n';
        all.push_back(m);
    }
    print_depth_row("mean", mean_metrics(all));
    if (!a.csv.empty()) write_text(a.csv, csv.str());
    return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string checkpoint, image, csv;
    int iterations = 20, warmup = 3;
};

int run_bench_cmd(const BenchArgs& a) {
    const DlkpnModel model = load_checkpoint(a.checkpoint);
    const BenchReport report = run_bench(model, load_image(a.image), a.iterations, a.warmup);
    std::cout << report.to_text();
    if (!a.csv.empty()) write_text(a.csv, report.to_csv());
    return kOk;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
    std::string clean_dir, checkpoint, out, depth_cmd, gt_depth_dir, csv;
    std::uint64_t seed = 0;
    double cap = kDefaultDepthCap;
    SynthFlags flags;
};

std::string fill_template(std::string tmpl, const std::string& in, const std::string& out) {
    auto replace = [&](const std::string& key, const std::string& value) {
        for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
            tmpl.replace(pos, key.size(), value);
        }
    };
    replace("{in}", in);
    replace("{out}", out);
    return tmpl;
}

int run_pipeline(const PipelineArgs& a) {
    const RcflaneConfig base = a.flags.resolve();
    const std::vector<KpnModel> layers = load_layers(a.checkpoint);
    const std::vector<fs::path> files = list_images(a.clean_dir);
    if (files.empty()) throw DataError("no images in '" + a.clean_dir + "'");
    const fs::path out(a.out);
    ensure_dir(out);
    const bool with_depth = !a.depth_cmd.empty();
    if (with_depth) ensure_dir(out / "depth");

    std::ostringstream csv;
    csv << "image,rainy_psnr,rainy_ssim,restored_psnr,restored_ssim,rainy_abs_rel,restored_abs_rel,status\n";
    std::printf("%-24s %11s %11s %13s %13s %s\n", "image", "rainy PSNR", "rainy SSIM", "restored PSNR",
                "restored SSIM", "status");
    double sums[4] = {};
    for (const fs::path& file : files) {
        const std::string stem = file.stem().string();
        const ImageBuffer clean = load_image(file);
        RcflaneConfig cfg = base;
        cfg.rain.seed = image_seed(a.seed, file.filename().string());
        const ImageBuffer rainy = synthesize(clean, cfg).rainy;
        ImageBuffer restored = kpn_restore(layers[0], rainy);
        if (layers.size() == 2) restored = kpn_restore(layers[1], restored);
        const fs::path rainy_path = out / (stem + "_rainy.png");
        const fs::path restored_path = out / (stem + "_restored.png");
        save_image(rainy, rainy_path);
        save_image(restored, restored_path);
        const ReconMetrics mr = recon_metrics(rainy, clean);
        const ReconMetrics mo = recon_metrics(restored, clean);
        sums[0] += mr.psnr_db;
        sums[1] += mr.ssim;
        sums[2] += mo.psnr_db;
        sums[3] += mo.ssim;

        std::string status = "ok";
        std::string rainy_abs = "", restored_abs = "";
        if (with_depth) {
            const fs::path gt = a.gt_depth_dir.empty() ? fs::path() : fs::path(a.gt_depth_dir) / (stem + ".png");
            std::string abs_values[2];
            const fs::path inputs[2] = {rainy_path, restored_path};
            const char* tags[2] = {"rainy", "restored"};
            for (int k = 0; k < 2 && status == "ok"; ++k) {
                const fs::path depth_out = out / "depth" / (stem + "_" + tags[k] + "_depth.png");
                const int rc = std::system(fill_template(a.depth_cmd, inputs[k].string(), depth_out.string()).c_str());
                if (rc != 0) {
                    status = std::string("depth-cmd-failed(") + tags[k] + ")";
                    break;
                }
                if (gt.empty() || !fs::exists(gt)) {
                    status = "no-gt";
                    continue;
                }
                try {
                    abs_values[k] = num(depth_metrics(load_depth_png(depth_out), load_depth_png(gt), a.cap).abs_rel, 6);
                } catch (const DataError&) {
                    status = std::string("depth-eval-failed(") + tags[k] + ")";
                }
            }
            rainy_abs = abs_values[0];
            restored_abs = abs_values[1];
        }
        csv << stem << ',' << num(mr.psnr_db, 6) << ',' << num(mr.ssim, 6) << ',' << num(mo.psnr_db, 6) << ','
            << num(mo.ssim, 6) << ',' << rainy_abs << ',' << restored_abs << ',' << status << '\n';
        std::printf("%-24s %11.3f %11.4f %13.3f %13.4f %s\n", stem.c_str(), mr.psnr_db, mr.ssim, mo.psnr_db, mo.ssim,
                    status.c_str());
    }
    const double n = static_cast<double>(files.size());
    std::printf("%-24s %11.3f %11.4f %13.3f %13.4f\n", "mean", sums[0] / n, sums[1] / n, sums[2] / n, sums[3] / n);
    write_text(a.csv.empty() ? out / "summary.csv" : fs::path(a.csv), csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rainlane: rainy road image synthesis, kernel-prediction restoration and evaluation"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    int threads = thread_count();
    app.add_option("--threads", threads, "worker threads for row-parallel loops (default RAINLANE_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "synthesize a rainy image from a clear one");
    c_synth->add_option("input", synth.input, "clear input image (PNG/PPM)")->required()->check(CLI::ExistingFile);
    c_synth->add_option("-o,--out", synth.out, "output directory");
    c_synth->add_option("--seed", synth.seed, "rain layer seed");
    c_synth->add_flag("--emit-intermediates", synth.emit_intermediates,
                      "also write the rain layer, O1, O2 and the transmission map");
    synth.flags.add(c_synth);

    BuildArgs build;
    auto* c_build = app.add_subcommand("build-dataset", "synthesize a paired rainy/clean dataset with a manifest");
    c_build->add_option("--src", build.src, "directory of clear images")->required();
    c_build->add_option("--out", build.out, "output directory")->required();
    c_build->add_option("--split", build.split, "fraction of images assigned to the training split");
    c_build->add_option("--seed", build.seed, "dataset seed (rain seeds and split shuffle)");
    c_build->add_option("--depth-dir", build.depth_dir, "directory of ground-truth depth PNGs named like the images");
    build.flags.add(c_build);

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "train one or both kernel prediction layers");
    c_train->add_option("--manifest", train.manifest, "dataset manifest")->required()->check(CLI::ExistingFile);
    c_train->add_option("--out", train.out, "checkpoint to write")->required();
    c_train->add_option("--layer", train.layer, "1, 2 or both");
    c_train->add_option("--init", train.init, "existing checkpoint whose first layer feeds layer-2 training");
    c_train->add_option("--loss", train.loss, "training loss: l1 or l2");
    c_train->add_option("--lr", train.lr, "learning rate");
    c_train->add_option("--momentum", train.momentum, "SGD momentum");
    c_train->add_option("--steps", train.steps, "optimizer steps per layer");
    c_train->add_option("--batch", train.batch, "crops per step");
    c_train->add_option("--crop", train.crop, "square crop size in pixels");
    c_train->add_option("--seed", train.seed, "initialization and crop sampling seed");
    c_train->add_option("--hidden", train.hidden, "comma separated widths of the hidden conv stages");
    c_train->add_option("--ksize", train.ksize, "predicted kernel size K (odd)");
    c_train->add_option("--levels", train.levels, "dilation levels (strides 1,2,4,...)");
    c_train->add_option("--identity-logit", train.identity_logit, "initial logit of the center tap");
    c_train->add_option("--lr2", train.lr2, "learning rate of layer 2");
    c_train->add_option("--identity-logit2", train.identity_logit2, "initial center-tap logit of layer 2");
    c_train->add_option("--head-scale", train.head_scale, "initial weight scale of the kernel head");
    c_train->add_option("--eval-every", train.eval_every, "report loss and test PSNR/SSIM every N steps (0: off)");

    InferArgs infer;
    auto* c_infer = app.add_subcommand("infer", "restore images with a trained checkpoint");
    c_infer->add_option("--checkpoint", infer.checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
    c_infer->add_option("inputs", infer.inputs, "rainy images")->required()->check(CLI::ExistingFile);
    c_infer->add_option("-o,--out", infer.out, "output directory");
    c_infer->add_flag("--emit-mid", infer.emit_mid, "also write the layer-1 output");

    ReconArgs recon;
    auto* c_recon = app.add_subcommand("eval-recon", "PSNR/SSIM of restored images against clean references");
    c_recon->add_option("--pair", recon.pairs, "restored and clean image paths (repeatable)");
    c_recon->add_option("--manifest", recon.manifest, "evaluate the pairs of a dataset manifest");
    c_recon->add_option("--restored-dir", recon.restored_dir,
                        "directory with <name>_restored.png (default: evaluate the rainy inputs)");
    c_recon->add_option("--split", recon.split, "manifest split: train, test or all");
    c_recon->add_option("--csv", recon.csv, "write per-image results as CSV");

    DepthArgs depth;
    auto* c_depth = app.add_subcommand("eval-depth", "depth error metrics of predicted depth maps");
    c_depth->add_option("--pair", depth.pairs, "predicted and ground-truth 16-bit depth PNGs (repeatable)")
        ->required();
    c_depth->add_option("--cap", depth.cap, "maximum evaluated depth in meters");
    c_depth->add_option("--csv", depth.csv, "write per-image results as CSV");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "single-image inference latency of a dual-layer checkpoint");
    c_bench->add_option("--checkpoint", bench.checkpoint, "dual-layer checkpoint")->required()->check(CLI::ExistingFile);
    c_bench->add_option("--image", bench.image, "input image")->required()->check(CLI::ExistingFile);
    c_bench->add_option("--iterations", bench.iterations, "timed runs")->check(CLI::PositiveNumber);
    c_bench->add_option("--warmup", bench.warmup, "untimed runs before timing")->check(CLI::NonNegativeNumber);
    c_bench->add_option("--csv", bench.csv, "write the report as CSV");

    PipelineArgs pipe;
    auto* c_pipe = app.add_subcommand("pipeline", "synthesize, restore and evaluate a directory of clear images");
    c_pipe->add_option("--clean-dir", pipe.clean_dir, "directory of clear images")->required();
    c_pipe->add_option("--checkpoint", pipe.checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
    c_pipe->add_option("--out", pipe.out, "output directory")->required();
    c_pipe->add_option("--seed", pipe.seed, "rain seed base (per image: seed xor filename hash)");
    c_pipe->add_option("--depth-cmd", pipe.depth_cmd, "external depth model command, e.g. \"prog {in} {out}\"");
    c_pipe->add_option("--gt-depth-dir", pipe.gt_depth_dir, "ground-truth depth PNGs named like the images");
    c_pipe->add_option("--cap", pipe.cap, "maximum evaluated depth in meters");
    c_pipe->add_option("--csv", pipe.csv, "summary CSV path (default <out>/summary.csv)");
    pipe.flags.add(c_pipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "rainlane: error[usage]: " << one_line(e.what()) << "\n";
        return kUsage;
    }
    set_thread_count(threads);

    try {
        if (c_synth->parsed()) return run_synth(synth);
        if (c_build->parsed()) return run_build(build);
        if (c_train->parsed()) return run_train(train);
        if (c_infer->parsed()) return run_infer(infer);
        if (c_recon->parsed()) return run_eval_recon(recon);
        if (c_depth->parsed()) return run_eval_depth(depth);
        if (c_bench->parsed()) return run_bench_cmd(bench);
        if (c_pipe->parsed()) return run_pipeline(pipe);
    } catch (const UsageError& e) {
        std::cerr << "rainlane: error[usage]: " << one_line(e.what()) << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "rainlane: error[usage]: " << one_line(e.what()) << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "rainlane: error[numerical]: " << one_line(e.what()) << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "rainlane: error[data]: " << one_line(e.what()) << "\n";
        return kData;
    }
    return kUsage;
}
