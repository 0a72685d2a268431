#include "hyperball/train.hpp"

#include <numeric>

#include "hyperball/errors.hpp"
#include "hyperball/grad.hpp"
#include "hyperball/optim.hpp"
#include "hyperball/rng.hpp"

namespace hyperball {

namespace {

void check_finite(const ModelParams& params) {
    if (!all_finite(params.weight.data())) throw NumericFailure("W");
    if (!all_finite(params.bias)) throw NumericFailure("b");
    if (!all_finite(params.labels.data())) throw NumericFailure("labels");
    if (!all_finite(params.log_tau)) throw NumericFailure("log_tau");
    if (!all_finite(params.label_bias)) throw NumericFailure("label_bias");
}

}  // namespace

TrainResult train(const TrainConfig& config, const data::Dataset& train_ds, const EpochCallback& on_epoch) {
    config.validate();
    train_ds.validate();
    if (train_ds.size() == 0) throw InvalidDataset("training set is empty");
    const std::size_t d = train_ds.feature_dim();
    const std::size_t k = train_ds.num_labels;
    if (config.d && *config.d != d)
        throw ConfigError("config key 'd' is " + std::to_string(*config.d) + " but the data has d = " + std::to_string(d));
    if (config.num_labels && *config.num_labels != k)
        throw ConfigError("config key 'K' is " + std::to_string(*config.num_labels) + " but the data has K = " +
                          std::to_string(k));

    TrainResult result{init_params(config.init_options(d, k)), {}};
    ModelParams& params = result.params;
    optim::OptimState optimizer(params, config.optim);
    const auto loss_config = config.loss_config();
    const auto all = train_ds.samples();

    auto rng = make_stream(config.seed, streams::kShuffle);
    std::vector<std::size_t> order(all.size());
    std::vector<grad::Sample> batch;
    batch.reserve(config.batch_size);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        EpochMetrics metrics{epoch, {}};
        auto& acc = metrics.loss;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.clear();
            for (std::size_t i = start; i < end; ++i) batch.push_back(all[order[i]]);
            auto [loss, gradients] = grad::loss_gradients(params, batch, loss_config);
            const double w = static_cast<double>(batch.size()) / static_cast<double>(order.size());
            acc.cls += w * loss.cls;
            acc.reg += w * loss.reg;
            acc.uni += w * loss.uni;
            acc.total += w * loss.total;
            optimizer.step(params, std::move(gradients));
            check_finite(params);
        }
        acc.lambda1 = config.weights.lambda1;
        acc.lambda2 = config.weights.lambda2;
        result.history.push_back(metrics);
        if (on_epoch) on_epoch(metrics);
    }
    return result;
}

}  // namespace hyperball
