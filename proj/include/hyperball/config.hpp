#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hyperball/data.hpp"
#include "hyperball/grad.hpp"
#include "hyperball/optim.hpp"
#include "hyperball/projector.hpp"

namespace hyperball {

struct DataPaths {
    std::optional<std::filesystem::path> features;
    std::optional<std::filesystem::path> labels_single;
    std::optional<std::filesystem::path> labels_full;
};

// Default learning rates for desk-scale runs. A default synthetic run takes
// about 1.5k optimizer steps, so the rates sit 10x above the fine-tuning
// rates (1e-4 Riemannian, 1e-5 Euclidean) meant for ~40k-step runs.
inline constexpr double kDefaultLrRiem = 1e-3;
inline constexpr double kDefaultLrEuc = 1e-4;

// Everything a run needs. Parsed from a single JSON document; unknown keys
// are rejected.
struct TrainConfig {
    std::size_t n = 16;
    std::optional<std::size_t> d;
    std::optional<std::size_t> num_labels;
    std::size_t epochs = 60;
    std::size_t batch_size = 128;
    optim::OptimConfig optim{kDefaultLrRiem, kDefaultLrEuc, 1.0, {}};
    losses::LossWeights weights;
    losses::DoubleWellParams well;
    TempMode temp_mode = TempMode::learnable_per_class;
    double fixed_tau = 1.0;
    Mode mode = Mode::hyperbolic;
    std::uint64_t seed = 0;
    double holdout_frac = 0.2;  // 0 trains on every row
    DataPaths data;
    std::optional<data::SynthConfig> synth;
    std::optional<std::filesystem::path> metrics_path;

    grad::LossConfig loss_config() const { return {well, weights}; }
    InitOptions init_options(std::size_t d, std::size_t k) const;

    // Throws ConfigError naming the offending key.
    void validate() const;
};

TrainConfig parse_config(const std::string& json_text);
TrainConfig load_config(const std::filesystem::path& path);

// "fixed:0.5", "learnable_scalar", "learnable_per_class"
void parse_temp_spec(const std::string& spec, TempMode& mode, double& fixed_tau);
std::string temp_spec(TempMode mode, double fixed_tau);

}  // namespace hyperball
