#include "hyperball/grad.hpp"

#include <cmath>

#include "hyperball/errors.hpp"

namespace hyperball::grad {

Gradients Gradients::zeros_like(const ModelParams& params) {
    Gradients g;
    g.weight = Matrix(params.weight.rows(), params.weight.cols());
    g.bias.assign(params.bias.size(), 0.0);
    g.labels = Matrix(params.labels.rows(), params.labels.cols());
    g.log_tau.assign(params.log_tau.size(), 0.0);
    g.label_bias.assign(params.label_bias.size(), 0.0);
    return g;
}

double Gradients::squared_norm() const {
    return hyperball::squared_norm(weight.data()) + hyperball::squared_norm(bias) +
           hyperball::squared_norm(labels.data()) + hyperball::squared_norm(log_tau) +
           hyperball::squared_norm(label_bias);
}

void Gradients::scale(double factor) {
    for (double& v : weight.data()) v *= factor;
    for (double& v : bias) v *= factor;
    for (double& v : labels.data()) v *= factor;
    for (double& v : log_tau) v *= factor;
    for (double& v : label_bias) v *= factor;
}

losses::LossBreakdown evaluate_loss(const ModelParams& params, std::span<const Sample> batch,
                                    const LossConfig& config) {
    std::vector<losses::ScoredSample> scored;
    scored.reserve(batch.size());
    for (const auto& s : batch) scored.push_back({forward(params, s.features), s.positive});
    if (params.mode == Mode::euclidean_baseline) {
        double cls = 0.0;
        for (const auto& s : scored) cls += losses::bce_an(s.scores, s.positive);
        if (!scored.empty()) cls /= static_cast<double>(scored.size());
        return losses::combine(cls, 0.0, 0.0, config.weights);
    }
    Matrix labels(params.num_labels(), params.n());
    for (std::size_t i = 0; i < params.num_labels(); ++i) {
        const auto p = params.label_point(i);
        std::copy(p.coords().begin(), p.coords().end(), labels.row(i).begin());
    }
    return losses::total_loss(scored, labels, config.well, config.weights);
}

namespace {

// Per-label quantities reused across the batch.
struct BallCache {
    balls::LabelBall ball;
    double tau = 1.0;
    bool tau_floored = false;
    bool rho_clamped = false;
    double raw_rho = 0.0;
};

// dL/dt for x = project(exp0(t)), given dL/dx.
Vec exp0_backward(std::span<const double> t, std::span<const double> gx) {
    const double s = norm(t);
    Vec gt(gx.begin(), gx.end());
    if (s == 0.0) return gt;
    const double th = std::tanh(s);
    double g = th;
    double dg = 1.0 - th * th;
    if (th > geometry::kMaxNorm) {
        g = geometry::kMaxNorm;
        dg = 0.0;
    }
    double ug = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) ug += t[i] / s * gx[i];
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double u = t[i] / s;
        gt[i] = dg * ug * u + (g / s) * (gx[i] - ug * u);
    }
    return gt;
}

void check_finite(std::span<const double> v, const std::string& name) {
    if (!all_finite(v)) throw NumericFailure(name);
}

void euclidean_gradients(const ModelParams& params, std::span<const Sample> batch, Gradients& g,
                         double& cls) {
    const std::size_t k = params.num_labels();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& sample : batch) {
        Vec x = params.weight.apply(sample.features);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += params.bias[i];
        check_finite(params.weight.data(), "W");
        check_finite(params.bias, "b");
        check_finite(x, "W");
        Vec scores(k);
        for (std::size_t i = 0; i < k; ++i) scores[i] = dot(params.labels.row(i), x) + params.label_bias[i];
        cls += losses::bce_an(scores, sample.positive) * inv_b;
        const Vec ds = losses::bce_an_grad(scores, sample.positive);

        Vec gx(x.size(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const double w = ds[i] * inv_b;
            auto row = params.labels.row(i);
            auto grow = g.labels.row(i);
            for (std::size_t a = 0; a < x.size(); ++a) {
                grow[a] += w * x[a];
                gx[a] += w * row[a];
            }
            g.label_bias[i] += w;
        }
        for (std::size_t a = 0; a < x.size(); ++a) {
            g.bias[a] += gx[a];
            auto wrow = g.weight.row(a);
            for (std::size_t c = 0; c < sample.features.size(); ++c) wrow[c] += gx[a] * sample.features[c];
        }
    }
}

}  // namespace

LossAndGradients loss_gradients(const ModelParams& params, std::span<const Sample> batch,
                                const LossConfig& config) {
    const std::size_t k = params.num_labels();
    const std::size_t n = params.n();
    Gradients g = Gradients::zeros_like(params);
    double cls = 0.0;

    if (params.mode == Mode::euclidean_baseline) {
        if (!batch.empty()) euclidean_gradients(params, batch, g, cls);
        LossAndGradients out{losses::combine(cls, 0.0, 0.0, config.weights), std::move(g)};
        check_finite(out.gradients.weight.data(), "W");
        check_finite(out.gradients.bias, "b");
        check_finite(out.gradients.labels.data(), "labels");
        check_finite(out.gradients.label_bias, "label_bias");
        return out;
    }

    std::vector<BallCache> cache(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto point = params.label_point(i);
        cache[i].raw_rho = point.norm();
        cache[i].ball = balls::ball_from_embedding(point);
        cache[i].rho_clamped = cache[i].raw_rho < balls::kRhoEps;
        const double lt = params.temp_mode == TempMode::learnable_per_class ? params.log_tau[i] : params.log_tau[0];
        cache[i].tau = params.tau(i);
        cache[i].tau_floored = std::exp(lt) < balls::kTauMin;
    }

    // Accumulated over the batch: dL/dc* per label and dL/drho through r, alpha.
    Matrix g_center(k, n);
    Vec g_rho(k, 0.0);

    const double inv_b = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    Vec scores(k);
    Vec diff(n);
    for (const auto& sample : batch) {
        if (sample.features.size() != params.d()) throw ShapeError("feature length must equal d");
        Vec t = params.weight.apply(sample.features);
        for (std::size_t a = 0; a < n; ++a) t[a] += params.bias[a];
        check_finite(params.weight.data(), "W");
        check_finite(params.bias, "b");
        check_finite(t, "W");
        const auto x = geometry::exp0({t});

        std::vector<double> dist(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& b = cache[i].ball;
            double d2 = 0.0;
            for (std::size_t a = 0; a < n; ++a) d2 += (b.center[a] - x[a]) * (b.center[a] - x[a]);
            dist[i] = std::sqrt(d2);
            scores[i] = b.alpha / cache[i].tau * (b.radius - dist[i]);
        }
        cls += losses::bce_an(scores, sample.positive) * inv_b;
        const Vec ds = losses::bce_an_grad(scores, sample.positive);

        Vec gx(n, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const double w = ds[i] * inv_b;
            if (w == 0.0) continue;
            const auto& b = cache[i].ball;
            const double scale = b.alpha / cache[i].tau;
            if (dist[i] > 0.0) {
                auto gc = g_center.row(i);
                for (std::size_t a = 0; a < n; ++a) {
                    const double dir = (b.center[a] - x[a]) / dist[i];
                    gx[a] += w * scale * dir;
                    gc[a] -= w * scale * dir;
                }
            }
            if (!cache[i].rho_clamped) {
                const double rho = b.rho;
                const double one_m = 1.0 - rho * rho;
                const double dalpha = 4.0 * rho / (one_m * one_m);
                const double dradius = -0.5 / (rho * rho) - 0.5;
                const double m = b.radius - dist[i];
                g_rho[i] += w * (dalpha * m + b.alpha * dradius) / cache[i].tau;
            }
            if (!cache[i].tau_floored) {
                const std::size_t slot = params.temp_mode == TempMode::learnable_per_class ? i : 0;
                g.log_tau[slot] -= w * scores[i];
            }
        }

        const Vec gt = exp0_backward(t, gx);
        for (std::size_t a = 0; a < n; ++a) {
            g.bias[a] += gt[a];
            auto wrow = g.weight.row(a);
            for (std::size_t c = 0; c < sample.features.size(); ++c) wrow[c] += gt[a] * sample.features[c];
        }
    }

    // Chain dL/dc* and dL/drho back to the raw label rows.
    Vec rhos(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& b = cache[i].ball;
        const double raw = cache[i].raw_rho;
        rhos[i] = raw;
        if (raw == 0.0) continue;
        auto gc = g.labels.row(i);
        auto gcs = g_center.row(i);
        const auto c = b.embedding.coords();
        const double rho = b.rho;
        const double stretch = (1.0 + rho * rho) / (2.0 * rho * rho);  // c* = stretch * c
        if (cache[i].rho_clamped) {
            // c_eff = eps * c / |c|; only the direction of c matters.
            Vec ge(n);
            for (std::size_t a = 0; a < n; ++a) ge[a] = stretch * gcs[a];
            double proj = 0.0;
            for (std::size_t a = 0; a < n; ++a) proj += ge[a] * c[a] / rho;
            for (std::size_t a = 0; a < n; ++a) gc[a] += (rho / raw) * (ge[a] - proj * c[a] / rho);
            continue;
        }
        const double dstretch = -1.0 / (rho * rho * rho);
        const double c_dot_gcs = dot(c, gcs);
        for (std::size_t a = 0; a < n; ++a) {
            const double u = c[a] / rho;
            gc[a] += stretch * gcs[a] + (dstretch * c_dot_gcs + g_rho[i]) * u;
        }
    }

    // Double-well term on the label norms.
    const auto& w = config.weights;
    if (w.lambda1 != 0.0) {
        for (std::size_t i = 0; i < k; ++i) {
            if (rhos[i] == 0.0) continue;
            const double dr = w.lambda1 * losses::double_well_term_derivative(rhos[i], config.well);
            auto row = params.labels.row(i);
            auto gc = g.labels.row(i);
            for (std::size_t a = 0; a < n; ++a) gc[a] += dr * row[a] / rhos[i];
        }
    }

    // Uniformity term on the label directions.
    if (w.lambda2 != 0.0 && k >= 2) {
        const double coef = w.lambda2 * 2.0 / static_cast<double>(k * (k - 1));
        Matrix unit(k, n);
        for (std::size_t i = 0; i < k; ++i)
            if (rhos[i] > 0)
                for (std::size_t a = 0; a < n; ++a) unit(i, a) = params.labels(i, a) / rhos[i];
        for (std::size_t i = 0; i < k; ++i) {
            if (rhos[i] == 0.0) continue;
            Vec gu(n, 0.0);
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i || rhos[j] == 0.0) continue;
                const double cosine = dot(unit.row(i), unit.row(j));
                const double sign = cosine > 0 ? 1.0 : (cosine < 0 ? -1.0 : 0.0);
                for (std::size_t a = 0; a < n; ++a) gu[a] += sign * unit(j, a);
            }
            const double along = dot(gu, unit.row(i));
            auto gc = g.labels.row(i);
            for (std::size_t a = 0; a < n; ++a) gc[a] += coef * (gu[a] - along * unit(i, a)) / rhos[i];
        }
    }

    losses::LossBreakdown loss = losses::combine(
        cls, losses::double_well(rhos, config.well), losses::uniformity(params.labels), w);

    check_finite(g.weight.data(), "W");
    check_finite(g.bias, "b");
    for (std::size_t i = 0; i < k; ++i) check_finite(g.labels.row(i), "labels[" + std::to_string(i) + "]");
    check_finite(g.log_tau, "log_tau");
    return {loss, std::move(g)};
}

Vec flatten(const ModelParams& params) {
    Vec flat;
    flat.insert(flat.end(), params.weight.data().begin(), params.weight.data().end());
    flat.insert(flat.end(), params.bias.begin(), params.bias.end());
    flat.insert(flat.end(), params.labels.data().begin(), params.labels.data().end());
    flat.insert(flat.end(), params.log_tau.begin(), params.log_tau.end());
    flat.insert(flat.end(), params.label_bias.begin(), params.label_bias.end());
    return flat;
}

void unflatten(ModelParams& params, std::span<const double> flat) {
    auto it = flat.begin();
    auto take = [&](std::vector<double>& dst) {
        if (static_cast<std::size_t>(flat.end() - it) < dst.size()) throw ShapeError("unflatten: too few values");
        std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    take(params.weight.data());
    take(params.bias);
    take(params.labels.data());
    take(params.log_tau);
    take(params.label_bias);
    if (it != flat.end()) throw ShapeError("unflatten: too many values");
}

Vec flatten(const Gradients& g) {
    Vec flat;
    flat.insert(flat.end(), g.weight.data().begin(), g.weight.data().end());
    flat.insert(flat.end(), g.bias.begin(), g.bias.end());
    flat.insert(flat.end(), g.labels.data().begin(), g.labels.data().end());
    flat.insert(flat.end(), g.log_tau.begin(), g.log_tau.end());
    flat.insert(flat.end(), g.label_bias.begin(), g.label_bias.end());
    return flat;
}

Gradients finite_diff_oracle(const ModelParams& params, std::span<const Sample> batch,
                             const LossConfig& config, double h) {
    ModelParams probe = params;
    Vec theta = flatten(params);
    Vec grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        unflatten(probe, theta);
        const double plus = evaluate_loss(probe, batch, config).total;
        theta[i] = saved - h;
        unflatten(probe, theta);
        const double minus = evaluate_loss(probe, batch, config).total;
        theta[i] = saved;
        grad[i] = (plus - minus) / (2.0 * h);
    }
    Gradients g = Gradients::zeros_like(params);
    auto it = grad.begin();
    auto take = [&](std::vector<double>& dst) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    take(g.weight.data());
    take(g.bias);
    take(g.labels.data());
    take(g.log_tau);
    take(g.label_bias);
    return g;
}

}  // namespace hyperball::grad
