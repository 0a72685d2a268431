#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyperball/geometry.hpp"
#include "hyperball/grad.hpp"
#include "hyperball/projector.hpp"

namespace hyperball::optim {

struct AdamConstants {
    double beta_m = 0.9;
    double beta_v = 0.999;
    double eps = 1e-8;
};

// Moment buffers for one parameter tensor.
struct Moments {
    Vec m;
    Vec v;

    explicit Moments(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

// Rescales every entry by clip_norm / ||g|| when the global norm exceeds
// clip_norm.
grad::Gradients clip_gradients(grad::Gradients g, double clip_norm);

// One bias-corrected Adam update in place. `step` is the 1-based step index.
void adam_step(Moments& state, std::span<double> param, std::span<const double> gradient, double lr,
               std::uint64_t step, const AdamConstants& k = {});

// Riemannian Adam on the Poincare ball. The ambient gradient is rescaled by
// the inverse metric ((1 - |x|^2) / 2)^2, Adam moments are kept in ambient
// coordinates (no parallel transport), and the step is retracted with the
// exponential map exp_x(u) = x (+) exp0(lambda_x u / 2).
geometry::HyperbolicPoint riemannian_adam_step(Moments& state, const geometry::HyperbolicPoint& label,
                                               std::span<const double> ambient_grad, double lr,
                                               std::uint64_t step, const AdamConstants& k = {});

struct OptimConfig {
    double lr_riem = 1e-4;
    double lr_euc = 1e-5;
    double clip_norm = 1.0;
    AdamConstants adam;
};

// Optimizer state for a whole ModelParams. Label rows use the Riemannian rule
// in hyperbolic mode and plain Adam in the Euclidean baseline (at lr_riem in
// both cases); W, b, log tau and label biases use Adam at lr_euc.
class OptimState {
public:
    OptimState(const ModelParams& params, OptimConfig config);

    // Clips, then updates params in place.
    void step(ModelParams& params, grad::Gradients g);

    std::uint64_t steps() const { return t_; }
    const OptimConfig& config() const { return config_; }

private:
    OptimConfig config_;
    std::uint64_t t_ = 0;
    Moments weight_;
    Moments bias_;
    std::vector<Moments> labels_;
    Moments log_tau_;
    Moments label_bias_;
};

}  // namespace hyperball::optim
