#include "hyperball/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "hyperball/errors.hpp"
#include "hyperball/geometry.hpp"

namespace hyperball::eval {

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["map"] = map;
    auto per_class = nlohmann::json::array();
    for (const auto& ap : per_class_ap) per_class.push_back(ap ? nlohmann::json(*ap) : nlohmann::json(nullptr));
    j["per_class_ap"] = std::move(per_class);
    j["num_eval_samples"] = num_eval_samples;
    return j.dump(2);
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> truths) {
    if (scores.size() != truths.size()) throw ShapeError("average_precision: length mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double hits = 0.0;
    double sum = 0.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (!truths[order[rank]]) continue;
        hits += 1.0;
        sum += hits / static_cast<double>(rank + 1);
    }
    if (hits == 0.0) throw UndefinedAP("average precision undefined without positives");
    return sum / hits;
}

EvalReport mean_ap_from_scores(const std::vector<Vec>& scores, const std::vector<data::LabelRow>& truths) {
    if (scores.size() != truths.size()) throw ShapeError("mean_ap: score and label rows differ");
    EvalReport report;
    report.num_eval_samples = scores.size();
    if (scores.empty()) throw UndefinedAP("mAP undefined on an empty dataset");
    const std::size_t k = truths.front().size();
    report.per_class_ap.resize(k);
    Vec column(scores.size());
    std::vector<std::uint8_t> truth(scores.size());
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t c = 0; c < k; ++c) {
        bool any = false;
        for (std::size_t s = 0; s < scores.size(); ++s) {
            column[s] = scores[s][c];
            truth[s] = truths[s][c];
            any = any || truth[s];
        }
        if (!any) continue;
        const double ap = average_precision(column, truth);
        report.per_class_ap[c] = ap;
        sum += ap;
        ++counted;
    }
    if (counted == 0) throw UndefinedAP("no class has a positive sample");
    report.map = sum / static_cast<double>(counted);
    return report;
}

EvalReport mean_ap(const ModelParams& params, const data::Dataset& eval_ds) {
    if (!eval_ds.full_labels) throw InvalidDataset("evaluation requires full labels");
    if (eval_ds.num_labels != params.num_labels())
        throw ShapeError("dataset has " + std::to_string(eval_ds.num_labels) + " labels, model has " +
                         std::to_string(params.num_labels()));
    std::vector<Vec> scores;
    scores.reserve(eval_ds.size());
    for (std::size_t s = 0; s < eval_ds.size(); ++s) scores.push_back(forward(params, eval_ds.features.row(s)));
    return mean_ap_from_scores(scores, *eval_ds.full_labels);
}

double prevalence_map(const data::Dataset& train_ds, const data::Dataset& eval_ds) {
    if (!train_ds.full_labels || !eval_ds.full_labels) throw InvalidDataset("prevalence baseline requires full labels");
    Vec prior(train_ds.num_labels, 0.0);
    for (const auto& row : *train_ds.full_labels)
        for (std::size_t c = 0; c < row.size(); ++c) prior[c] += row[c];
    for (double& p : prior) p /= static_cast<double>(train_ds.size());
    std::vector<Vec> scores(eval_ds.size(), prior);
    return mean_ap_from_scores(scores, *eval_ds.full_labels).map;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("pearson: length mismatch");
    if (x.size() < 2) throw UndefinedCorrelation("pearson correlation needs at least two pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson correlation undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport cooccurrence_analysis(const ModelParams& params, const std::vector<data::LabelRow>& full_labels) {
    const std::size_t k = params.num_labels();
    if (full_labels.empty()) throw InvalidDataset("co-occurrence analysis needs samples");
    for (const auto& row : full_labels)
        if (row.size() != k) throw ShapeError("label rows do not match the model's K");

    std::vector<geometry::HyperbolicPoint> points;
    for (std::size_t i = 0; i < k; ++i) points.push_back(params.label_point(i));

    CorrelationReport report;
    const double s = static_cast<double>(full_labels.size());
    Vec probs, dists;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            std::size_t both = 0;
            for (const auto& row : full_labels) both += (row[i] && row[j]) ? 1 : 0;
            PairStat p{i, j, static_cast<double>(both) / s, geometry::distance(points[i], points[j])};
            probs.push_back(p.cooccur_prob);
            dists.push_back(p.distance);
            report.pairs.push_back(p);
        }
    }
    report.num_pairs = report.pairs.size();
    report.pearson_r = pearson(probs, dists);
    return report;
}

std::vector<PairRelation> relation_report(const ModelParams& params) {
    if (params.mode != Mode::hyperbolic) throw UnsupportedMode("relation report requires a hyperbolic model");
    const std::size_t k = params.num_labels();
    std::vector<balls::LabelBall> ballset;
    for (std::size_t i = 0; i < k; ++i) ballset.push_back(params.label_ball(i));
    std::vector<PairRelation> out;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) out.push_back({i, j, balls::ball_relation(ballset[i], ballset[j])});
    return out;
}

double grid_coordinate(std::size_t index, std::size_t resolution) {
    constexpr double kExtent = 0.999;
    if (resolution == 1) return 0.0;
    return -kExtent + 2.0 * kExtent * static_cast<double>(index) / static_cast<double>(resolution - 1);
}

std::vector<GridCell> export_response_map(const ModelParams& params, std::size_t label, std::size_t resolution) {
    if (params.mode != Mode::hyperbolic) throw UnsupportedMode("response maps require a hyperbolic model");
    if (params.n() != 2)
        throw UnsupportedDimension("response maps require n = 2, model has n = " + std::to_string(params.n()));
    if (label >= params.num_labels()) throw IndexOutOfRange("label index out of range");
    if (resolution == 0) throw ConfigError("resolution must be positive");
    const auto ball = params.label_ball(label);
    const double tau = params.tau(label);
    std::vector<GridCell> grid;
    grid.reserve(resolution * resolution);
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        const double y = grid_coordinate(iy, resolution);
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            const double x = grid_coordinate(ix, resolution);
            GridCell cell{x, y, std::numeric_limits<double>::quiet_NaN()};
            if (x * x + y * y <= geometry::kMaxNorm * geometry::kMaxNorm) {
                const double xy[2] = {x, y};
                cell.prob = sigmoid(balls::score(geometry::project_to_ball(xy), ball, tau));
            }
            grid.push_back(cell);
        }
    }
    return grid;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace

void write_response_map_csv(const std::vector<GridCell>& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,y,prob\n";
    for (const auto& c : grid) out << fmt(c.x) << ',' << fmt(c.y) << ',' << fmt(c.prob) << '\n';
}

void write_correlation_csv(const CorrelationReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "label_i,label_j,cooccur_prob,center_distance\n";
    for (const auto& p : report.pairs)
        out << p.i << ',' << p.j << ',' << fmt(p.cooccur_prob) << ',' << fmt(p.distance) << '\n';
}

}  // namespace hyperball::eval
