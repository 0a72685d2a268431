#include "hyperball/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperball/config.hpp"
#include "hyperball/data.hpp"
#include "hyperball/errors.hpp"
#include "hyperball/eval.hpp"
#include "hyperball/model_io.hpp"
#include "hyperball/train.hpp"

namespace hyperball::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string model;
    std::string features;
    std::string labels_single;
    std::string labels_full;
    std::optional<std::uint64_t> seed;
    long long label = -1;
    long long resolution = 256;
};

TrainConfig config_with_overrides(const Options& o) {
    TrainConfig c = load_config(o.config);
    if (o.seed) {
        c.seed = *o.seed;
        if (c.synth) c.synth->seed = *o.seed;
    }
    if (!o.features.empty()) c.data.features = o.features;
    if (!o.labels_single.empty()) c.data.labels_single = o.labels_single;
    if (!o.labels_full.empty()) c.data.labels_full = o.labels_full;
    return c;
}

// Dataset named by the config: files when given, otherwise the synthetic
// generator.
data::Dataset resolve_dataset(const TrainConfig& c) {
    if (c.data.features || c.data.labels_single) {
        if (!c.data.features) throw ConfigError("missing required config key 'data.features'");
        if (!c.data.labels_single) throw ConfigError("missing required config key 'data.labels_single'");
        return data::load_dataset(*c.data.features, *c.data.labels_single, c.data.labels_full, c.num_labels);
    }
    if (c.synth) return data::generate_synthetic(*c.synth);
    throw ConfigError("missing required config key 'data' (or 'synth')");
}

std::pair<data::Dataset, data::Dataset> split_for(const TrainConfig& c, const data::Dataset& ds) {
    if (c.holdout_frac == 0.0) return {ds, data::Dataset{}};
    return data::train_eval_split(ds, 1.0 - c.holdout_frac, c.seed);
}

int cmd_gen_data(const Options& o, std::ostream& out) {
    const TrainConfig c = config_with_overrides(o);
    if (!c.synth) throw ConfigError("missing required config key 'synth'");
    const auto ds = data::generate_synthetic(*c.synth);
    const auto files = data::save_dataset(ds, o.out);
    out << "K=" << ds.num_labels << " d=" << ds.feature_dim() << " S=" << ds.size() << '\n';
    out << "wrote " << files.features.string() << ", " << files.single_labels.string() << ", "
        << files.full_labels.string() << '\n';
    return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    const TrainConfig c = config_with_overrides(o);
    const auto ds = resolve_dataset(c);
    const auto [train_ds, holdout] = split_for(c, ds);

    const fs::path model_path = o.out;
    const fs::path metrics_path = c.metrics_path ? *c.metrics_path : fs::path(model_path.string() + ".metrics.csv");
    const bool fresh = !fs::exists(metrics_path) || fs::file_size(metrics_path) == 0;
    std::ofstream metrics(metrics_path, std::ios::binary | std::ios::app);
    if (!metrics) throw DataError("cannot write " + metrics_path.string());
    if (fresh) metrics << "epoch,cls,reg,uni,total\n";
    metrics.precision(17);

    const auto result = train(c, train_ds, [&](const EpochMetrics& m) {
        metrics << m.epoch << ',' << m.loss.cls << ',' << m.loss.reg << ',' << m.loss.uni << ',' << m.loss.total << '\n';
        metrics.flush();
    });
    save_model(result.params, model_path);
    out << "trained on " << train_ds.size() << " samples for " << c.epochs << " epochs";
    if (!result.history.empty()) out << ", final total loss " << result.history.back().loss.total;
    out << "\nwrote " << model_path.string() << '\n';
    return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto params = load_model(o.model);
    data::Dataset ds;
    if (!o.config.empty()) {
        // Evaluate the held-out partition of the run's dataset.
        const TrainConfig c = config_with_overrides(o);
        const auto full = resolve_dataset(c);
        ds = c.holdout_frac == 0.0 ? full : split_for(c, full).second;
    } else {
        if (o.features.empty()) throw ConfigError("missing required flag --features");
        if (o.labels_full.empty()) throw ConfigError("missing required flag --labels-full");
        ds = o.labels_single.empty()
                 ? data::load_evaluation_dataset(o.features, o.labels_full)
                 : data::load_dataset(o.features, o.labels_single, fs::path(o.labels_full));
    }
    const auto report = eval::mean_ap(params, ds);
    out << report.to_json() << '\n';
    return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
    if (o.labels_full.empty()) throw ConfigError("missing required flag --labels-full");
    const auto params = load_model(o.model);
    const auto labels = data::load_full_labels(o.labels_full);
    const auto report = eval::cooccurrence_analysis(params, labels);
    eval::write_correlation_csv(report, o.out);
    out.precision(17);
    out << "pearson_r=" << report.pearson_r << " num_pairs=" << report.num_pairs << '\n';
    return kOk;
}

int cmd_export_map(const Options& o, std::ostream& out) {
    if (o.label < 0) throw ConfigError("missing or negative --label");
    if (o.resolution <= 0) throw ConfigError("--resolution must be positive");
    const auto params = load_model(o.model);
    const auto grid = eval::export_response_map(params, static_cast<std::size_t>(o.label),
                                                static_cast<std::size_t>(o.resolution));
    eval::write_response_map_csv(grid, o.out);
    out << "wrote " << grid.size() << " cells to " << o.out << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hyperbolic ball classifier for single-positive multi-label learning"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic hierarchical dataset");
    gen->add_option("--config", o.config, "JSON config with a 'synth' section")->required();
    gen->add_option("--out", o.out, "Output directory")->required();

    auto* trn = app.add_subcommand("train", "Train a model");
    trn->add_option("--config", o.config, "JSON config")->required();
    trn->add_option("--out", o.out, "Model JSON to write")->required();

    auto* ev = app.add_subcommand("eval", "mAP against full labels, JSON on stdout");
    ev->add_option("--model", o.model, "Model JSON")->required();
    ev->add_option("--config", o.config, "Evaluate the held-out split of this config's dataset");

    auto* an = app.add_subcommand("analyze", "Co-occurrence vs. embedding distance correlation");
    an->add_option("--model", o.model, "Model JSON")->required();
    an->add_option("--out", o.out, "Correlation CSV to write")->required();

    auto* ex = app.add_subcommand("export-map", "Response map of one label on a 2-D model");
    ex->add_option("--model", o.model, "Model JSON")->required();
    ex->add_option("--label", o.label, "Label index")->required();
    ex->add_option("--resolution", o.resolution, "Grid points per axis")->capture_default_str();
    ex->add_option("--out", o.out, "Grid CSV to write")->required();

    for (auto* sub : {trn, ev}) {
        sub->add_option("--features", o.features, "Features CSV");
        sub->add_option("--labels-single", o.labels_single, "Single-positive labels CSV");
        sub->add_option("--labels-full", o.labels_full, "Full labels CSV");
    }
    an->add_option("--labels-full", o.labels_full, "Full labels CSV")->required();
    for (auto* sub : {gen, trn, ev}) sub->add_option("--seed", o.seed, "Overrides the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(o, out);
        if (trn->parsed()) return cmd_train(o, out);
        if (ev->parsed()) return cmd_eval(o, out);
        if (an->parsed()) return cmd_analyze(o, out);
        if (ex->parsed()) return cmd_export_map(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace hyperball::cli
