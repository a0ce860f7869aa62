#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "rainlane/checkpoint.hpp"
#include "rainlane/image_io.hpp"
#include "rainlane/metrics.hpp"
#include "support/depth_oracle.hpp"
#include "support/scenes.hpp"
#include "support/tempdir.hpp"

using namespace rainlane;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli {
public:
    Cli() { fs::create_directories(tmp_.path() / "logs"); }

    Run operator()(const std::string& args) {
        const fs::path o = tmp_.path() / "logs" / "out.txt", e = tmp_.path() / "logs" / "err.txt";
        const std::string cmd = std::string("\"") + RAINLANE_CLI_PATH + "\" " + args + " > \"" + o.string() +
                                "\" 2> \"" + e.string() + "\"";
        const int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(o);
        r.err = slurp(e);
        return r;
    }

    const fs::path& dir() const { return tmp_.path(); }
    std::string path(const std::string& name) const { return "\"" + (tmp_.path() / name).string() + "\""; }

private:
    rainlane::testing::TempDir tmp_{"rainlane-cli"};
};

void write_scenes(const fs::path& dir, int count, int w, int h) {
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        save_image(rainlane::testing::road_scene(500 + i, w, h), dir / ("img" + std::to_string(i) + ".png"));
    }
}

KpnModel identity_layer() {
    KpnArch arch;
    arch.hidden = {4};
    arch.ksize = 3;
    arch.levels = 2;
    KpnModel m = KpnModel::initialize(arch, 0);
    const int head = arch.stages() - 1;
    for (std::size_t i = arch.weight_offset(head); i < arch.param_count(); ++i) m.params[i] = 0.0;
    m.params[arch.bias_offset(head) + 4] = 200.0;
    return m;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("help documents every subcommand and flag") {
    Cli cli;
    const Run top = cli("--help");
    CHECK(top.code == 0);
    for (const char* sub : {"synth", "build-dataset", "train", "infer", "eval-recon", "eval-depth", "bench", "pipeline"}) {
        CHECK(top.out.find(sub) != std::string::npos);
        CHECK(cli(std::string(sub) + " --help").code == 0);
    }
    const Run synth = cli("synth --help");
    for (const char* flag : {"--out", "--seed", "--emit-intermediates", "--config", "--beta", "--gamma", "--mask-value",
                             "--lambda", "--atmos", "--fog-scale", "--density", "--streak-length", "--angle",
                             "--threshold", "--noise-sigma"}) {
        CHECK_MESSAGE(synth.out.find(flag) != std::string::npos, flag);
    }
    const Run train = cli("train --help");
    for (const char* flag : {"--manifest", "--layer", "--init", "--lr", "--momentum", "--steps", "--batch", "--crop",
                             "--hidden", "--ksize", "--levels", "--eval-every"}) {
        CHECK_MESSAGE(train.out.find(flag) != std::string::npos, flag);
    }
}

TEST_CASE("errors are single machine-parsable lines with typed exit codes") {
    Cli cli;
    const Run usage = cli("synth");
    CHECK(usage.code == 1);
    CHECK(usage.err.rfind("rainlane: error[usage]: ", 0) == 0);
    CHECK(count_lines(usage.err) == 1);

    CHECK(cli("bogus-command").code == 1);
    write_scenes(cli.dir() / "src", 1, 24, 16);
    CHECK(cli("synth " + cli.path("src/img0.png") + " --gamma 1.5 -o " + cli.path("o")).code == 1);

    std::ofstream(cli.dir() / "junk.png") << "not an image";
    const Run data = cli("synth " + cli.path("junk.png") + " -o " + cli.path("o"));
    CHECK(data.code == 2);
    CHECK(data.err.rfind("rainlane: error[data]: ", 0) == 0);
    CHECK(count_lines(data.err) == 1);
}

TEST_CASE("synth is seed deterministic and emits intermediates") {
    Cli cli;
    write_scenes(cli.dir() / "src", 1, 40, 30);
    REQUIRE(cli("synth " + cli.path("src/img0.png") + " --seed 4 -o " + cli.path("a")).code == 0);
    REQUIRE(cli("synth " + cli.path("src/img0.png") + " --seed 4 -o " + cli.path("b") + " --emit-intermediates").code == 0);
    CHECK(slurp(cli.dir() / "a/img0_rainy.png") == slurp(cli.dir() / "b/img0_rainy.png"));
    for (const char* suffix : {"_rain", "_o1", "_o2", "_td"}) {
        CHECK(fs::exists(cli.dir() / "b" / (std::string("img0") + suffix + ".png")));
    }
    REQUIRE(cli("synth " + cli.path("src/img0.png") + " --seed 5 -o " + cli.path("c")).code == 0);
    CHECK(slurp(cli.dir() / "a/img0_rainy.png") != slurp(cli.dir() / "c/img0_rainy.png"));

    REQUIRE(cli("synth " + cli.path("src/img0.png") + " --density 0 --gamma 1 --lambda 0 -o " + cli.path("id")).code == 0);
    CHECK(load_image(cli.dir() / "id/img0_rainy.png") == load_image(cli.dir() / "src/img0.png"));
}

TEST_CASE("dataset, training, inference and evaluation chain") {
    Cli cli;
    write_scenes(cli.dir() / "src", 5, 40, 36);
    REQUIRE(cli("build-dataset --src " + cli.path("src") + " --out " + cli.path("ds") + " --split 0.6 --seed 3").code == 0);
    REQUIRE(fs::exists(cli.dir() / "ds/manifest.json"));

    const std::string tiny = " --steps 4 --batch 1 --crop 16 --hidden 4,4 --ksize 3 --levels 2 --seed 1";
    const Run tr = cli("train --manifest " + cli.path("ds/manifest.json") + " --out " + cli.path("m.ckpt") + tiny);
    REQUIRE_MESSAGE(tr.code == 0, tr.err);
    const DlkpnModel model = load_checkpoint(cli.dir() / "m.ckpt");
    CHECK(model.layer1.arch.hidden == std::vector<int>{4, 4});

    const Run l1 = cli("train --manifest " + cli.path("ds/manifest.json") + " --layer 1 --out " + cli.path("l1.ckpt") + tiny);
    REQUIRE(l1.code == 0);
    CHECK(load_layers(cli.dir() / "l1.ckpt").size() == 1);

    const Run inf = cli("infer --checkpoint " + cli.path("m.ckpt") + " " + cli.path("ds/rainy/img1.png") + " --emit-mid -o " +
                        cli.path("inf"));
    REQUIRE_MESSAGE(inf.code == 0, inf.err);
    const ImageBuffer restored = load_image(cli.dir() / "inf/img1_restored.png");
    CHECK(fs::exists(cli.dir() / "inf/img1_mid.png"));
    CHECK(restored.width() == 40);

    const Run rec = cli("eval-recon --pair " + cli.path("inf/img1_restored.png") + " " + cli.path("src/img1.png") +
                        " --csv " + cli.path("rec.csv"));
    REQUIRE(rec.code == 0);
    const std::string csv = slurp(cli.dir() / "rec.csv");
    CHECK(csv.rfind("image,psnr_db,ssim\n", 0) == 0);
    CHECK(count_lines(csv) == 2);

    const Run man = cli("eval-recon --manifest " + cli.path("ds/manifest.json") + " --split test --csv " + cli.path("m.csv"));
    REQUIRE(man.code == 0);
    CHECK(count_lines(slurp(cli.dir() / "m.csv")) == 3);

    const Run bench = cli("bench --checkpoint " + cli.path("m.ckpt") + " --image " + cli.path("src/img0.png") +
                          " --iterations 2 --warmup 1 --csv " + cli.path("b.csv"));
    REQUIRE(bench.code == 0);
    CHECK(slurp(cli.dir() / "b.csv").find(",single_layer,") != std::string::npos);
    CHECK(cli("bench --checkpoint " + cli.path("l1.ckpt") + " --image " + cli.path("src/img0.png")).code == 2);
}

TEST_CASE("eval-depth") {
    Cli cli;
    DepthMap gt(6, 4, 10.0), pred(6, 4, 12.0);
    save_depth_png(gt, cli.dir() / "gt.png");
    save_depth_png(pred, cli.dir() / "pred.png");
    const Run r = cli("eval-depth --pair " + cli.path("pred.png") + " " + cli.path("gt.png") + " --csv " + cli.path("d.csv"));
    REQUIRE(r.code == 0);
    const std::string csv = slurp(cli.dir() / "d.csv");
    CHECK(csv.rfind("image,abs_rel,sq_rel,rmse,rmse_log,log10,delta1,delta2,delta3\n", 0) == 0);
    CHECK(csv.find(",0.2") != std::string::npos);
}

TEST_CASE("pipeline with an identity checkpoint") {
    Cli cli;
    write_scenes(cli.dir() / "clean", 3, 32, 24);
    save_checkpoint(std::vector<KpnModel>{identity_layer(), identity_layer()}, cli.dir() / "id.ckpt");
    fs::create_directories(cli.dir() / "gt");
    for (int i = 0; i < 3; ++i) {
        const std::string name = "img" + std::to_string(i);
        save_depth_png(rainlane::testing::oracle_depth(load_image(cli.dir() / "clean" / (name + ".png"))),
                       cli.dir() / "gt" / (name + ".png"));
    }
    const std::string depth_cmd = std::string("\"\\\"") + FAKE_DEPTH_PATH + "\\\" {in} {out}\"";
    const Run r = cli("pipeline --clean-dir " + cli.path("clean") + " --checkpoint " + cli.path("id.ckpt") + " --out " +
                      cli.path("run") + " --seed 2 --depth-cmd " + depth_cmd + " --gt-depth-dir " + cli.path("gt"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream rows(slurp(cli.dir() / "run/summary.csv"));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "image,rainy_psnr,rainy_ssim,restored_psnr,restored_ssim,rainy_abs_rel,restored_abs_rel,status");
    int count = 0;
    while (std::getline(rows, line)) {
        ++count;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        CHECK(cells[1] == cells[3]);
        CHECK(cells[5] == cells[6]);
        CHECK(cells[7] == "ok");
    }
    CHECK(count == 3);

    const Run failing = cli("pipeline --clean-dir " + cli.path("clean") + " --checkpoint " + cli.path("id.ckpt") + " --out " +
                            cli.path("run2") + " --depth-cmd false");
    REQUIRE(failing.code == 0);
    const std::string summary = slurp(cli.dir() / "run2/summary.csv");
    CHECK(count_lines(summary) == 4);
    CHECK(summary.find("depth-cmd-failed(rainy)") != std::string::npos);
}
