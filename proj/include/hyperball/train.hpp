#pragma once

#include <functional>
#include <vector>

#include "hyperball/config.hpp"
#include "hyperball/data.hpp"
#include "hyperball/losses.hpp"
#include "hyperball/projector.hpp"

namespace hyperball {

struct EpochMetrics {
    std::size_t epoch = 0;  // 1-based
    losses::LossBreakdown loss;  // sample-weighted mean over the epoch's batches
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochMetrics> history;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Seeded mini-batch training: each epoch reshuffles the rows and keeps the
// short final batch. Single-threaded and bit-reproducible for a fixed config.
TrainResult train(const TrainConfig& config, const data::Dataset& train_ds, const EpochCallback& on_epoch = {});

}  // namespace hyperball
