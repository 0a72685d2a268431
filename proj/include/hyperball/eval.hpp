#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperball/balls.hpp"
#include "hyperball/data.hpp"
#include "hyperball/projector.hpp"

namespace hyperball::eval {

struct EvalReport {
    std::vector<std::optional<double>> per_class_ap;  // nullopt: class has no positives
    double map = 0.0;
    std::size_t num_eval_samples = 0;

    std::string to_json() const;
};

// Ranks by descending score with ties broken by ascending sample index.
// Throws UndefinedAP when truths has no positive.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> truths);

// mAP over classes with at least one positive. Throws UndefinedAP when no
// class has positives.
EvalReport mean_ap_from_scores(const std::vector<Vec>& scores, const std::vector<data::LabelRow>& truths);

// Classes are ranked by forward scores; predict_probs is a strictly increasing
// function of them except inside its saturation clamp, where it would tie.
EvalReport mean_ap(const ModelParams& params, const data::Dataset& eval_ds);

// Mean AP obtained by scoring every sample with its class prior.
double prevalence_map(const data::Dataset& train_ds, const data::Dataset& eval_ds);

struct PairStat {
    std::size_t i = 0;
    std::size_t j = 0;
    double cooccur_prob = 0.0;
    double distance = 0.0;
};

struct CorrelationReport {
    std::vector<PairStat> pairs;
    double pearson_r = 0.0;
    std::size_t num_pairs = 0;
};

// Throws UndefinedCorrelation when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Co-occurrence frequency vs. Poincare distance between label embeddings over
// all unordered label pairs.
CorrelationReport cooccurrence_analysis(const ModelParams& params, const std::vector<data::LabelRow>& full_labels);

struct PairRelation {
    std::size_t i = 0;
    std::size_t j = 0;
    balls::BallRelation relation;
};

// Throws UnsupportedMode for the Euclidean baseline.
std::vector<PairRelation> relation_report(const ModelParams& params);

struct GridCell {
    double x = 0.0;
    double y = 0.0;
    double prob = 0.0;  // NaN outside the clamped ball
};

// resolution x resolution grid over [-0.999, 0.999]^2, y-major then x.
// Requires a hyperbolic model with n = 2.
std::vector<GridCell> export_response_map(const ModelParams& params, std::size_t label, std::size_t resolution);

double grid_coordinate(std::size_t index, std::size_t resolution);

void write_response_map_csv(const std::vector<GridCell>& grid, const std::filesystem::path& path);
void write_correlation_csv(const CorrelationReport& report, const std::filesystem::path& path);

}  // namespace hyperball::eval
