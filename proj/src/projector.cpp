#include "hyperball/projector.hpp"

#include <algorithm>
#include <cmath>

#include "hyperball/errors.hpp"
#include "hyperball/rng.hpp"

namespace hyperball {

std::string_view to_string(Mode mode) {
    return mode == Mode::hyperbolic ? "hyperbolic" : "euclidean_baseline";
}

std::string_view to_string(TempMode mode) {
    switch (mode) {
        case TempMode::fixed: return "fixed";
        case TempMode::learnable_scalar: return "learnable_scalar";
        case TempMode::learnable_per_class: return "learnable_per_class";
    }
    return "unknown";
}

Mode parse_mode(std::string_view s) {
    if (s == "hyperbolic") return Mode::hyperbolic;
    if (s == "euclidean_baseline") return Mode::euclidean_baseline;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

TempMode parse_temp_mode(std::string_view s) {
    if (s == "fixed") return TempMode::fixed;
    if (s == "learnable_scalar") return TempMode::learnable_scalar;
    if (s == "learnable_per_class") return TempMode::learnable_per_class;
    throw ConfigError("unknown temp_mode '" + std::string(s) + "'");
}

double ModelParams::tau(std::size_t label) const {
    const double lt = temp_mode == TempMode::learnable_per_class ? log_tau[label] : log_tau[0];
    return std::max(std::exp(lt), balls::kTauMin);
}

geometry::HyperbolicPoint ModelParams::label_point(std::size_t i) const {
    return geometry::project_to_ball(labels.row(i));
}

balls::LabelBall ModelParams::label_ball(std::size_t i) const {
    return balls::ball_from_embedding(label_point(i));
}

void ModelParams::validate() const {
    const std::size_t k = num_labels();
    if (bias.size() != n()) throw ShapeError("bias length must equal n");
    if (labels.cols() != n()) throw ShapeError("label dimension must equal n");
    if (k == 0) throw ShapeError("model has no labels");
    const std::size_t tau_len = temp_mode == TempMode::learnable_per_class ? k : 1;
    if (log_tau.size() != tau_len) throw ShapeError("log_tau length does not match temp_mode");
    if (mode == Mode::euclidean_baseline && label_bias.size() != k)
        throw ShapeError("label_bias length must equal K");
    if (mode == Mode::hyperbolic && !label_bias.empty())
        throw ShapeError("label_bias is only used by euclidean_baseline");
    if (!all_finite(weight.data()) || !all_finite(bias) || !all_finite(labels.data()) ||
        !all_finite(log_tau) || !all_finite(label_bias))
        throw InvalidInput("non-finite model parameter");
    for (double lt : log_tau)
        if (std::exp(lt) < balls::kTauMin) throw InvalidTemperature("temperature below 1e-3");
    if (mode == Mode::hyperbolic) {
        for (std::size_t i = 0; i < k; ++i)
            if (norm(labels.row(i)) > geometry::kMaxNorm)
                throw InvalidInput("label embedding outside the ball");
    }
}

ModelParams init_params(const InitOptions& opts) {
    if (opts.n == 0 || opts.d == 0 || opts.num_labels == 0)
        throw ConfigError("init_params: n, d and K must be positive");
    ModelParams p;
    p.mode = opts.mode;
    p.temp_mode = opts.temp_mode;
    p.weight = Matrix(opts.n, opts.d);
    p.bias.assign(opts.n, 0.0);
    p.labels = Matrix(opts.num_labels, opts.n);

    auto rng = make_stream(opts.seed, streams::kInit);
    const double bound = 1.0 / std::sqrt(static_cast<double>(opts.d));
    for (double& w : p.weight.data()) w = rng.uniform(-bound, bound);
    for (double& b : p.bias) b = rng.uniform(-bound, bound);

    for (std::size_t i = 0; i < opts.num_labels; ++i) {
        auto row = p.labels.row(i);
        double len = 0.0;
        do {
            for (double& x : row) x = rng.normal();
            len = norm(row);
        } while (len == 0.0);
        const double rho = rng.uniform(0.3, 0.7);
        for (double& x : row) x *= rho / len;
    }

    if (opts.temp_mode == TempMode::fixed) {
        if (!(opts.fixed_tau >= balls::kTauMin)) throw InvalidTemperature("fixed tau below 1e-3");
        p.log_tau = {std::log(opts.fixed_tau)};
    } else {
        p.log_tau.assign(opts.temp_mode == TempMode::learnable_per_class ? opts.num_labels : 1, 0.0);
    }
    if (opts.mode == Mode::euclidean_baseline) p.label_bias.assign(opts.num_labels, 0.0);
    return p;
}

geometry::HyperbolicPoint mobius_linear(const Matrix& weight, std::span<const double> bias,
                                        std::span<const double> features) {
    if (weight.cols() != features.size()) throw ShapeError("feature length must equal d");
    if (weight.rows() != bias.size()) throw ShapeError("bias length must equal n");
    Vec t = weight.apply(features);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += bias[i];
    return geometry::exp0({std::move(t)});
}

Vec forward(const ModelParams& params, std::span<const double> features) {
    const std::size_t k = params.num_labels();
    Vec scores(k);
    if (params.mode == Mode::euclidean_baseline) {
        if (params.weight.cols() != features.size()) throw ShapeError("feature length must equal d");
        Vec x = params.weight.apply(features);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += params.bias[i];
        for (std::size_t i = 0; i < k; ++i) scores[i] = dot(params.labels.row(i), x) + params.label_bias[i];
        return scores;
    }
    const auto x = mobius_linear(params.weight, params.bias, features);
    for (std::size_t i = 0; i < k; ++i) scores[i] = balls::score(x, params.label_ball(i), params.tau(i));
    return scores;
}

double sigmoid(double s) {
    constexpr double kLo = 1e-12;
    constexpr double kHi = 1.0 - 1e-12;
    const double p = s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
    return std::clamp(p, kLo, kHi);
}

Vec predict_probs(const ModelParams& params, std::span<const double> features) {
    Vec s = forward(params, features);
    for (double& v : s) v = sigmoid(v);
    return s;
}

}  // namespace hyperball
