#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperball/balls.hpp"
#include "hyperball/geometry.hpp"
#include "hyperball/linalg.hpp"

namespace hyperball {

enum class Mode { hyperbolic, euclidean_baseline };

enum class TempMode { fixed, learnable_scalar, learnable_per_class };

std::string_view to_string(Mode mode);
std::string_view to_string(TempMode mode);
Mode parse_mode(std::string_view s);
TempMode parse_temp_mode(std::string_view s);

// Full trainable state of the classifier.
//
// Hyperbolic mode: x = exp0(W f + b), s_i = (alpha_i / tau_i) (r_i - ||c_i* - x||).
// Euclidean baseline: x = W f + b, s_i = <w_i, x> + label_bias_i, where the
// rows of `labels` are the free vectors w_i.
struct ModelParams {
    Mode mode = Mode::hyperbolic;
    TempMode temp_mode = TempMode::learnable_per_class;
    Matrix weight;            // n x d
    Vec bias;                 // n
    Matrix labels;            // K x n
    Vec log_tau;              // 1 value, or K for learnable_per_class
    Vec label_bias;           // K, euclidean_baseline only

    std::size_t n() const { return weight.rows(); }
    std::size_t d() const { return weight.cols(); }
    std::size_t num_labels() const { return labels.rows(); }

    // Temperature used by label i, floored at kTauMin.
    double tau(std::size_t label) const;
    bool temperature_trainable() const { return temp_mode != TempMode::fixed; }

    geometry::HyperbolicPoint label_point(std::size_t i) const;
    balls::LabelBall label_ball(std::size_t i) const;

    // Throws ShapeError / InvalidInput if shapes or values are inconsistent.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

struct InitOptions {
    std::size_t n = 16;
    std::size_t d = 0;
    std::size_t num_labels = 0;
    Mode mode = Mode::hyperbolic;
    TempMode temp_mode = TempMode::learnable_per_class;
    double fixed_tau = 1.0;
    std::uint64_t seed = 0;
};

// W, b ~ U(-1/sqrt(d), 1/sqrt(d)); label directions uniform on the sphere with
// norm ~ U(0.3, 0.7); log tau = 0 unless a fixed tau is requested.
ModelParams init_params(const InitOptions& opts);

// exp0(W f + b)
geometry::HyperbolicPoint mobius_linear(const Matrix& weight, std::span<const double> bias,
                                        std::span<const double> features);

Vec forward(const ModelParams& params, std::span<const double> features);

double sigmoid(double s);

Vec predict_probs(const ModelParams& params, std::span<const double> features);

}  // namespace hyperball
