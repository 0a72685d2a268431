#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hyperball/losses.hpp"
#include "hyperball/projector.hpp"

namespace hyperball::grad {

struct Sample {
    std::span<const double> features;
    std::size_t positive = 0;
};

struct LossConfig {
    losses::DoubleWellParams well;
    losses::LossWeights weights;
};

// Ambient (Euclidean) gradients, shaped like ModelParams.
struct Gradients {
    Matrix weight;
    Vec bias;
    Matrix labels;
    Vec log_tau;
    Vec label_bias;

    static Gradients zeros_like(const ModelParams& params);
    double squared_norm() const;
    void scale(double factor);
};

// Total loss by a plain forward pass. Euclidean baseline uses the
// classification term only (reg = uni = 0).
losses::LossBreakdown evaluate_loss(const ModelParams& params, std::span<const Sample> batch,
                                    const LossConfig& config);

struct LossAndGradients {
    losses::LossBreakdown loss;
    Gradients gradients;
};

// Closed-form gradients of evaluate_loss. Throws NumericFailure naming the
// first parameter group with a non-finite entry.
LossAndGradients loss_gradients(const ModelParams& params, std::span<const Sample> batch,
                                const LossConfig& config);

// Central differences of evaluate_loss, one scalar at a time.
Gradients finite_diff_oracle(const ModelParams& params, std::span<const Sample> batch,
                             const LossConfig& config, double h = 1e-5);

// Flat views in the order W, b, labels, log_tau, label_bias.
Vec flatten(const ModelParams& params);
void unflatten(ModelParams& params, std::span<const double> flat);
Vec flatten(const Gradients& g);

}  // namespace hyperball::grad
