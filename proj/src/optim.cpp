#include "hyperball/optim.hpp"

#include <algorithm>
#include <cmath>

#include "hyperball/balls.hpp"
#include "hyperball/errors.hpp"

namespace hyperball::optim {

grad::Gradients clip_gradients(grad::Gradients g, double clip_norm) {
    if (!(clip_norm > 0)) throw ConfigError("clip_norm must be positive");
    const double total = std::sqrt(g.squared_norm());
    if (total > clip_norm) g.scale(clip_norm / total);
    return g;
}

namespace {

// Returns the Adam displacement -lr * m_hat / (sqrt(v_hat) + eps) for one
// coordinate after updating its moments.
double adam_delta(double& m, double& v, double gradient, double lr, std::uint64_t step,
                  const AdamConstants& k) {
    m = k.beta_m * m + (1.0 - k.beta_m) * gradient;
    v = k.beta_v * v + (1.0 - k.beta_v) * gradient * gradient;
    const double t = static_cast<double>(step);
    const double m_hat = m / (1.0 - std::pow(k.beta_m, t));
    const double v_hat = v / (1.0 - std::pow(k.beta_v, t));
    return -lr * m_hat / (std::sqrt(v_hat) + k.eps);
}

}  // namespace

void adam_step(Moments& state, std::span<double> param, std::span<const double> gradient, double lr,
               std::uint64_t step, const AdamConstants& k) {
    if (param.size() != gradient.size() || state.m.size() != param.size())
        throw ShapeError("adam_step: shape mismatch");
    if (step == 0) throw ConfigError("adam_step: step index is 1-based");
    for (std::size_t i = 0; i < param.size(); ++i)
        param[i] += adam_delta(state.m[i], state.v[i], gradient[i], lr, step, k);
}

geometry::HyperbolicPoint riemannian_adam_step(Moments& state, const geometry::HyperbolicPoint& label,
                                               std::span<const double> ambient_grad, double lr,
                                               std::uint64_t step, const AdamConstants& k) {
    const std::size_t n = label.dim();
    if (ambient_grad.size() != n || state.m.size() != n) throw ShapeError("riemannian_adam_step: shape mismatch");
    if (step == 0) throw ConfigError("riemannian_adam_step: step index is 1-based");
    const double metric = (1.0 - squared_norm(label.coords())) / 2.0;
    const double inv_metric = metric * metric;
    const double half_lambda = 1.0 / (1.0 - squared_norm(label.coords()));

    Vec tangent(n);
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = adam_delta(state.m[i], state.v[i], ambient_grad[i] * inv_metric, lr, step, k);
        tangent[i] = half_lambda * u;
        moved = moved || u != 0.0;
    }
    if (!moved) return label;
    return geometry::mobius_add(label, geometry::exp0({std::move(tangent)}));
}

OptimState::OptimState(const ModelParams& params, OptimConfig config)
    : config_(config),
      weight_(params.weight.data().size()),
      bias_(params.bias.size()),
      labels_(params.num_labels(), Moments(params.n())),
      log_tau_(params.log_tau.size()),
      label_bias_(params.label_bias.size()) {}

void OptimState::step(ModelParams& params, grad::Gradients g) {
    if (!params.temperature_trainable()) g.log_tau.assign(g.log_tau.size(), 0.0);
    g = clip_gradients(std::move(g), config_.clip_norm);
    ++t_;
    const auto& k = config_.adam;
    adam_step(weight_, params.weight.data(), g.weight.data(), config_.lr_euc, t_, k);
    adam_step(bias_, params.bias, g.bias, config_.lr_euc, t_, k);
    if (params.temperature_trainable()) {
        adam_step(log_tau_, params.log_tau, g.log_tau, config_.lr_euc, t_, k);
        const double floor = std::log(balls::kTauMin);
        for (double& lt : params.log_tau) lt = std::max(lt, floor);
    }
    if (params.mode == Mode::euclidean_baseline) {
        adam_step(label_bias_, params.label_bias, g.label_bias, config_.lr_euc, t_, k);
    }
    for (std::size_t i = 0; i < params.num_labels(); ++i) {
        auto row = params.labels.row(i);
        if (params.mode == Mode::euclidean_baseline) {
            adam_step(labels_[i], row, g.labels.row(i), config_.lr_riem, t_, k);
            continue;
        }
        const auto updated =
            riemannian_adam_step(labels_[i], geometry::project_to_ball(row), g.labels.row(i), config_.lr_riem, t_, k);
        std::copy(updated.coords().begin(), updated.coords().end(), row.begin());
    }
}

}  // namespace hyperball::optim
