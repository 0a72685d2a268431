#include "hyperball/losses.hpp"

#include <algorithm>
#include <cmath>

#include "hyperball/errors.hpp"

namespace hyperball::losses {

namespace {

const double kMaxLogLoss = -std::log(kLogClamp);

// -log(max(sigmoid(s), kLogClamp)) computed without cancellation.
double neg_log_sigmoid(double s) {
    const double v = s >= 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
    return std::min(v, kMaxLogLoss);
}

double gaussian(double rho, double c, const DoubleWellParams& p) {
    const double z = rho - c;
    return p.beta1_as_width ? std::exp(-(z * z) / (p.beta1 * p.beta1)) : std::exp(-p.beta1 * z * z);
}

double gaussian_derivative(double rho, double c, const DoubleWellParams& p) {
    const double z = rho - c;
    const double k = p.beta1_as_width ? 1.0 / (p.beta1 * p.beta1) : p.beta1;
    return -2.0 * k * z * gaussian(rho, c, p);
}

}  // namespace

void DoubleWellParams::validate() const {
    if (!(beta1 > 0)) throw ConfigError("beta1 must be positive");
    if (!(beta2 > 0)) throw ConfigError("beta2 must be positive");
    if (!(0 < c1 && c1 < c2 && c2 < 1)) throw ConfigError("wells must satisfy 0 < c1 < c2 < 1");
}

double bce_an(std::span<const double> scores, std::size_t pos_idx) {
    if (pos_idx >= scores.size()) throw IndexOutOfRange("bce_an: positive index out of range");
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        sum += i == pos_idx ? neg_log_sigmoid(scores[i]) : neg_log_sigmoid(-scores[i]);
    return sum / static_cast<double>(scores.size());
}

Vec bce_an_grad(std::span<const double> scores, std::size_t pos_idx) {
    if (pos_idx >= scores.size()) throw IndexOutOfRange("bce_an: positive index out of range");
    const double k = static_cast<double>(scores.size());
    Vec g(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        // Inside the log clamp the term is constant.
        const double signed_s = i == pos_idx ? scores[i] : -scores[i];
        if (neg_log_sigmoid(signed_s) >= kMaxLogLoss) {
            g[i] = 0.0;
            continue;
        }
        const double sig = 1.0 / (1.0 + std::exp(-scores[i]));
        g[i] = (sig - (i == pos_idx ? 1.0 : 0.0)) / k;
    }
    return g;
}

double double_well_term(double rho, const DoubleWellParams& p) {
    const double inner = gaussian(rho, p.c1, p) * (1.0 - std::exp(-p.beta2 * rho * rho));
    const double outer = gaussian(rho, p.c2, p) * (1.0 - std::exp(-p.beta2 * (1.0 - rho) * (1.0 - rho)));
    return -inner - outer;
}

double double_well_term_derivative(double rho, const DoubleWellParams& p) {
    const double mask_in = 1.0 - std::exp(-p.beta2 * rho * rho);
    const double dmask_in = 2.0 * p.beta2 * rho * std::exp(-p.beta2 * rho * rho);
    const double q = 1.0 - rho;
    const double mask_out = 1.0 - std::exp(-p.beta2 * q * q);
    const double dmask_out = -2.0 * p.beta2 * q * std::exp(-p.beta2 * q * q);
    return -(gaussian_derivative(rho, p.c1, p) * mask_in + gaussian(rho, p.c1, p) * dmask_in) -
           (gaussian_derivative(rho, p.c2, p) * mask_out + gaussian(rho, p.c2, p) * dmask_out);
}

double double_well(std::span<const double> rhos, const DoubleWellParams& p) {
    double sum = 0.0;
    for (double rho : rhos) sum += double_well_term(rho, p);
    return sum;
}

double uniformity(const Matrix& labels) {
    const std::size_t k = labels.rows();
    if (k < 2) return 0.0;
    Vec norms(k);
    for (std::size_t i = 0; i < k; ++i) norms[i] = norm(labels.row(i));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (norms[i] > 0 && norms[j] > 0)
                sum += std::abs(dot(labels.row(i), labels.row(j)) / (norms[i] * norms[j]));
    // each unordered pair stands for two ordered pairs
    return 2.0 * sum / static_cast<double>(k * (k - 1));
}

LossBreakdown combine(double cls, double reg, double uni, const LossWeights& weights) {
    LossBreakdown out;
    out.cls = cls;
    out.reg = reg;
    out.uni = uni;
    out.lambda1 = weights.lambda1;
    out.lambda2 = weights.lambda2;
    out.total = cls + weights.lambda1 * reg + weights.lambda2 * uni;
    return out;
}

LossBreakdown total_loss(std::span<const ScoredSample> batch, const Matrix& labels,
                         const DoubleWellParams& well, const LossWeights& weights) {
    double cls = 0.0;
    for (const auto& s : batch) cls += bce_an(s.scores, s.positive);
    if (!batch.empty()) cls /= static_cast<double>(batch.size());
    Vec rhos(labels.rows());
    for (std::size_t i = 0; i < labels.rows(); ++i) rhos[i] = norm(labels.row(i));
    return combine(cls, double_well(rhos, well), uniformity(labels), weights);
}

}  // namespace hyperball::losses
