#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hyperball/commands.hpp"
#include "hyperball/config.hpp"
#include "hyperball/model_io.hpp"
#include "hyperball/projector.hpp"
#include "support.hpp"

using namespace hyperball;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hyperball");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kSmallConfig = R"({
  "n": 2, "epochs": 2, "batch_size": 32, "seed": 5,
  "synth": {"num_super": 2, "subs_per_super": 1, "d": 4, "samples": 120}
})";

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("gen-data is reproducible") {
    const auto dir = testing::scratch_dir("cli_gen");
    write(dir / "cfg.json", kSmallConfig);
    const auto r1 = run_cli({"gen-data", "--config", (dir / "cfg.json").string(), "--out", (dir / "a").string()});
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("K=4 d=4 S=120") != std::string::npos);
    REQUIRE(run_cli({"gen-data", "--config", (dir / "cfg.json").string(), "--out", (dir / "b").string()}).code == 0);
    for (const char* f : {"features.csv", "labels_single.csv", "labels_full.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK(count_lines(slurp(dir / "a" / f)) == 121);
    }
    REQUIRE(run_cli({"gen-data", "--config", (dir / "cfg.json").string(), "--out", (dir / "c").string(), "--seed", "6"})
                .code == 0);
    CHECK(slurp(dir / "a" / "features.csv") != slurp(dir / "c" / "features.csv"));
}

TEST_CASE("train, eval, analyze and export") {
    const auto dir = testing::scratch_dir("cli_pipeline");
    write(dir / "cfg.json", kSmallConfig);
    const auto cfg = (dir / "cfg.json").string();
    REQUIRE(run_cli({"gen-data", "--config", cfg, "--out", (dir / "data").string()}).code == 0);

    const auto model = (dir / "model.json").string();
    const auto t1 = run_cli({"train", "--config", cfg, "--out", model, "--features", (dir / "data" / "features.csv").string(),
                             "--labels-single", (dir / "data" / "labels_single.csv").string(), "--labels-full",
                             (dir / "data" / "labels_full.csv").string()});
    REQUIRE(t1.code == 0);
    const auto metrics = slurp(model + ".metrics.csv");
    CHECK(metrics.rfind("epoch,cls,reg,uni,total\n", 0) == 0);
    CHECK(count_lines(metrics) == 3);

    // training directly from the synthetic section gives the same model
    const auto model2 = (dir / "model2.json").string();
    REQUIRE(run_cli({"train", "--config", cfg, "--out", model2}).code == 0);
    CHECK(slurp(model) == slurp(model2));

    const auto e = run_cli({"eval", "--model", model, "--config", cfg});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("\"num_eval_samples\": 24") != std::string::npos);
    const auto e2 = run_cli({"eval", "--model", model, "--features", (dir / "data" / "features.csv").string(),
                             "--labels-full", (dir / "data" / "labels_full.csv").string()});
    REQUIRE(e2.code == 0);
    CHECK(e2.out.find("\"num_eval_samples\": 120") != std::string::npos);

    const auto a = run_cli({"analyze", "--model", model, "--labels-full", (dir / "data" / "labels_full.csv").string(),
                            "--out", (dir / "corr.csv").string()});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("num_pairs=6") != std::string::npos);
    CHECK(count_lines(slurp(dir / "corr.csv")) == 7);

    const auto x = run_cli({"export-map", "--model", model, "--label", "1", "--resolution", "4", "--out",
                            (dir / "map.csv").string()});
    REQUIRE(x.code == 0);
    CHECK(count_lines(slurp(dir / "map.csv")) == 17);
    REQUIRE(run_cli({"export-map", "--model", model, "--label", "0", "--out", (dir / "map256.csv").string()}).code == 0);
    CHECK(count_lines(slurp(dir / "map256.csv")) == 256 * 256 + 1);

    CHECK(run_cli({"export-map", "--model", model, "--label", "0", "--resolution", "0", "--out",
                   (dir / "m0.csv").string()})
              .code == 1);
    CHECK(run_cli({"export-map", "--model", model, "--label", "0", "--resolution", "-3", "--out",
                   (dir / "m0.csv").string()})
              .code == 1);
}

TEST_CASE("zero epochs keeps the initialization") {
    const auto dir = testing::scratch_dir("cli_zero_epochs");
    std::string cfg_text = kSmallConfig;
    cfg_text.replace(cfg_text.find("\"epochs\": 2"), 11, "\"epochs\": 0");
    write(dir / "cfg.json", cfg_text);
    REQUIRE(run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "m.json").string()}).code == 0);
    const auto c = load_config(dir / "cfg.json");
    CHECK(load_model(dir / "m.json") == init_params(c.init_options(4, 4)));
    CHECK(count_lines(slurp(dir / "m.json.metrics.csv")) == 1);
}

TEST_CASE("error exit codes") {
    const auto dir = testing::scratch_dir("cli_errors");
    write(dir / "cfg.json", kSmallConfig);
    const auto cfg = (dir / "cfg.json").string();

    SUBCASE("usage") {
        CHECK(run_cli({}).code == 1);
        CHECK(run_cli({"frobnicate"}).code == 1);
        CHECK(run_cli({"train", "--config", cfg}).code == 1);
    }
    SUBCASE("missing config key is named") {
        write(dir / "bad.json", R"({"synth": {"num_super": 2}})");
        const auto r = run_cli({"gen-data", "--config", (dir / "bad.json").string(), "--out", (dir / "x").string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("subs_per_super") != std::string::npos);
    }
    SUBCASE("malformed csv") {
        REQUIRE(run_cli({"gen-data", "--config", cfg, "--out", (dir / "d").string()}).code == 0);
        REQUIRE(run_cli({"train", "--config", cfg, "--out", (dir / "m.json").string()}).code == 0);
        auto text = slurp(dir / "d" / "features.csv");
        const auto line4 = [&] {
            std::size_t p = 0;
            for (int i = 0; i < 3; ++i) p = text.find('\n', p) + 1;
            return p;
        }();
        text.replace(text.find(',', line4) + 1, 0, "x");
        write(dir / "d" / "features.csv", text);
        const auto r = run_cli({"eval", "--model", (dir / "m.json").string(), "--features",
                                (dir / "d" / "features.csv").string(), "--labels-full",
                                (dir / "d" / "labels_full.csv").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("features.csv:4:") != std::string::npos);
    }
    SUBCASE("analyze with two labels") {
        const auto model = (dir / "k2.json").string();
        write(dir / "k2cfg.json", R"({"n": 3, "epochs": 0, "synth": {"num_super": 1, "subs_per_super": 1, "d": 4, "samples": 20}})");
        REQUIRE(run_cli({"train", "--config", (dir / "k2cfg.json").string(), "--out", model}).code == 0);
        REQUIRE(run_cli({"gen-data", "--config", (dir / "k2cfg.json").string(), "--out", (dir / "k2").string()}).code == 0);
        const auto r = run_cli({"analyze", "--model", model, "--labels-full", (dir / "k2" / "labels_full.csv").string(),
                                "--out", (dir / "c.csv").string()});
        CHECK(r.code == 2);
        CHECK_FALSE(r.err.empty());

        const auto x = run_cli({"export-map", "--model", model, "--label", "0", "--out", (dir / "m.csv").string()});
        CHECK(x.code == 1);
        CHECK(x.err.find("n = 2") != std::string::npos);
    }
    SUBCASE("numeric failure") {
        write(dir / "hot.json", R"({"n": 2, "epochs": 1, "lr_euc": 1e308, "lambda1": 0, "lambda2": 0,
            "synth": {"num_super": 2, "subs_per_super": 1, "d": 4, "samples": 200}})");
        const auto r = run_cli({"train", "--config", (dir / "hot.json").string(), "--out", (dir / "h.json").string()});
        CHECK(r.code == 3);
    }
}

TEST_CASE("binary exit status") {
    const std::string bin = HYPERBALL_CLI;
    CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
    const int status = std::system((bin + " export-map --model /nonexistent.json --label 0 --out /dev/null 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 2);
}
