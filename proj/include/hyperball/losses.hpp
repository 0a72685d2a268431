#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyperball/linalg.hpp"

namespace hyperball::losses {

inline constexpr double kLogClamp = 1e-12;

struct DoubleWellParams {
    double beta1 = 0.1;   // Gaussian sharpness (or width when beta1_as_width)
    double beta2 = 500.0; // boundary-mask steepness
    double c1 = 0.1;      // inner well
    double c2 = 0.9;      // outer well
    bool beta1_as_width = false;

    // Throws ConfigError unless beta1, beta2 > 0 and 0 < c1 < c2 < 1.
    void validate() const;
};

struct LossWeights {
    double lambda1 = 10.0;
    double lambda2 = 1.0;
};

// total == cls + lambda1 * reg + lambda2 * uni
struct LossBreakdown {
    double cls = 0.0;
    double reg = 0.0;
    double uni = 0.0;
    double total = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

// Assumed-negative binary cross-entropy, averaged over the K labels.
double bce_an(std::span<const double> scores, std::size_t pos_idx);

// d bce_an / d s_i
Vec bce_an_grad(std::span<const double> scores, std::size_t pos_idx);

// Radial double-well energy summed over labels.
double double_well(std::span<const double> rhos, const DoubleWellParams& p);

// Energy of one label and its derivative in rho.
double double_well_term(double rho, const DoubleWellParams& p);
double double_well_term_derivative(double rho, const DoubleWellParams& p);

// Mean |cos| over ordered pairs of distinct label rows. Zero when K < 2.
double uniformity(const Matrix& labels);

struct ScoredSample {
    Vec scores;
    std::size_t positive = 0;
};

// cls is the batch mean of bce_an, reg the double-well over label norms,
// uni the uniformity over label directions.
LossBreakdown total_loss(std::span<const ScoredSample> batch, const Matrix& labels,
                         const DoubleWellParams& well, const LossWeights& weights);

LossBreakdown combine(double cls, double reg, double uni, const LossWeights& weights);

}  // namespace hyperball::losses
