#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hyperball/errors.hpp"
#include "hyperball/eval.hpp"
#include "support.hpp"

using namespace hyperball;
using namespace hyperball::eval;

namespace {

// AP by enumerating every cutoff: for each positive at rank k, precision is
// the fraction of positives among the first k items.
double brute_force_ap(const Vec& scores, const data::LabelRow& truths) {
    const std::size_t s = scores.size();
    std::vector<std::pair<std::size_t, std::size_t>> terms;  // (rank, hits)
    for (std::size_t i = 0; i < s; ++i) {
        if (!truths[i]) continue;
        // rank of i: items strictly ahead of it (higher score, or equal score
        // and smaller index)
        std::size_t rank = 1, hits = 1;
        for (std::size_t j = 0; j < s; ++j) {
            if (j == i) continue;
            const bool ahead = scores[j] > scores[i] || (scores[j] == scores[i] && j < i);
            if (ahead) {
                ++rank;
                hits += truths[j];
            }
        }
        terms.emplace_back(rank, hits);
    }
    // accumulate from the top of the ranking
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (const auto& [rank, hits] : terms) total += static_cast<double>(hits) / static_cast<double>(rank);
    return total / static_cast<double>(terms.size());
}

ModelParams two_d_model(const std::vector<Vec>& labels) {
    ModelParams p;
    p.temp_mode = TempMode::learnable_per_class;
    p.weight = Matrix(2, 2);
    p.weight(0, 0) = 1.0;
    p.weight(1, 1) = 1.0;
    p.bias = {0.0, 0.0};
    p.labels = Matrix(labels.size(), 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        p.labels(i, 0) = labels[i][0];
        p.labels(i, 1) = labels[i][1];
    }
    p.log_tau = Vec(labels.size(), std::log(0.5));
    return p;
}

}  // namespace

TEST_CASE("average precision examples") {
    const Vec scores{0.9, 0.8, 0.1};
    CHECK(average_precision(scores, data::LabelRow{1, 0, 1}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(average_precision(scores, data::LabelRow{1, 1, 0}) == 1.0);
    CHECK(average_precision(scores, data::LabelRow{1, 1, 1}) == 1.0);
    CHECK_THROWS_AS(average_precision(scores, data::LabelRow{0, 0, 0}), UndefinedAP);
    // ties: the earlier index ranks first
    CHECK(average_precision(Vec{0.5, 0.5}, data::LabelRow{0, 1}) == 0.5);
    CHECK(average_precision(Vec{0.5, 0.5}, data::LabelRow{1, 0}) == 1.0);
}

TEST_CASE("average precision matches brute force") {
    SplitMix64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const std::size_t s = 1 + rng.below(20);
        const std::size_t k = 1 + rng.below(5);
        std::vector<Vec> scores(s, Vec(k));
        std::vector<data::LabelRow> truths(s, data::LabelRow(k));
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t c = 0; c < k; ++c) {
                scores[i][c] = static_cast<double>(rng.below(4)) / 4.0;  // many ties
                truths[i][c] = rng.uniform() < 0.4;
            }
        double sum = 0.0;
        int counted = 0;
        std::vector<std::optional<double>> expect(k);
        for (std::size_t c = 0; c < k; ++c) {
            Vec col(s);
            data::LabelRow tc(s);
            for (std::size_t i = 0; i < s; ++i) {
                col[i] = scores[i][c];
                tc[i] = truths[i][c];
            }
            if (std::count(tc.begin(), tc.end(), 1) == 0) continue;
            expect[c] = brute_force_ap(col, tc);
            CHECK(average_precision(col, tc) == *expect[c]);
            sum += *expect[c];
            ++counted;
        }
        if (counted == 0) {
            CHECK_THROWS_AS(mean_ap_from_scores(scores, truths), UndefinedAP);
            continue;
        }
        const auto report = mean_ap_from_scores(scores, truths);
        CHECK(report.per_class_ap == expect);
        CHECK(report.map == sum / counted);
    }
}

TEST_CASE("AP is invariant under increasing transforms") {
    SplitMix64 rng(2);
    for (int t = 0; t < 50; ++t) {
        Vec s(15);
        data::LabelRow y(15);
        for (std::size_t i = 0; i < 15; ++i) {
            s[i] = rng.uniform(-3, 3);
            y[i] = rng.uniform() < 0.5;
        }
        y[0] = 1;
        Vec e(15);
        std::transform(s.begin(), s.end(), e.begin(), [](double v) { return std::exp(2 * v) + 1; });
        CHECK(average_precision(s, y) == average_precision(e, y));
    }
}

TEST_CASE("random scores give AP near prevalence") {
    SplitMix64 rng(23);
    const std::size_t s = 10000;
    Vec scores(s);
    data::LabelRow y(s);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < s; ++i) {
        scores[i] = rng.uniform();
        y[i] = rng.uniform() < 0.3;
        pos += y[i];
    }
    CHECK(std::abs(average_precision(scores, y) - static_cast<double>(pos) / s) <= 0.05);
}

TEST_CASE("mean_ap on a model") {
    const auto p = two_d_model({{0.6, 0.0}, {-0.6, 0.0}});
    data::Dataset ds;
    ds.num_labels = 2;
    ds.features = Matrix(4, 2);
    const double far = std::atanh(0.9);
    ds.features(0, 0) = far;
    ds.features(1, 0) = -far;
    ds.features(2, 0) = 0.9 * far;
    ds.features(3, 0) = -0.9 * far;
    ds.ids = {"a", "b", "c", "d"};
    ds.observed_pos = {0, 1, 0, 1};
    ds.full_labels = std::vector<data::LabelRow>{{1, 0}, {0, 1}, {1, 0}, {0, 1}};
    const auto report = mean_ap(p, ds);
    CHECK(report.map == 1.0);
    CHECK(report.num_eval_samples == 4);
    const auto json = report.to_json();
    CHECK(json.find("\"map\"") != std::string::npos);
    CHECK(json.find("\"num_eval_samples\": 4") != std::string::npos);

    ds.full_labels = std::vector<data::LabelRow>{{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    const auto partial = mean_ap(p, ds);
    CHECK_FALSE(partial.per_class_ap[1].has_value());
    CHECK(partial.map == 1.0);
}

TEST_CASE("pearson") {
    const Vec x{0.1, 0.4, 0.2, 0.9, 0.5};
    Vec y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return 3.0 - 2.0 * v; });
    CHECK(pearson(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    SplitMix64 rng(19);
    Vec a(1000), b(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    const double r = pearson(a, b);
    CHECK(std::abs(r) <= 0.1);
    Vec b2(b), neg(b);
    for (auto& v : b2) v = 5.0 * v + 3.0;
    for (auto& v : neg) v = -v;
    CHECK(pearson(a, b2) == doctest::Approx(r).epsilon(1e-10));
    CHECK(pearson(a, neg) == doctest::Approx(-r).epsilon(1e-10));

    CHECK_THROWS_AS(pearson(Vec{1.0}, Vec{2.0}), UndefinedCorrelation);
    CHECK_THROWS_AS(pearson(Vec{1.0, 1.0, 1.0}, Vec{1.0, 2.0, 3.0}), UndefinedCorrelation);
}

TEST_CASE("co-occurrence analysis") {
    const auto p = two_d_model({{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.3, 0.3}});
    const std::vector<data::LabelRow> labels{{1, 1, 0, 0}, {1, 0, 1, 1}, {0, 1, 0, 1}, {1, 1, 1, 0}};
    const auto report = cooccurrence_analysis(p, labels);
    CHECK(report.num_pairs == 6);
    CHECK(report.pairs.size() == 6);
    for (const auto& pair : report.pairs) {
        double both = 0;
        for (const auto& row : labels) both += row[pair.i] && row[pair.j];
        CHECK(pair.cooccur_prob == both / 4.0);
        CHECK(pair.distance == geometry::distance(p.label_point(pair.i), p.label_point(pair.j)));
        CHECK(pair.i < pair.j);
    }

    const auto k2 = two_d_model({{0.5, 0.0}, {0.0, 0.5}});
    CHECK_THROWS_AS(cooccurrence_analysis(k2, {{1, 1}, {1, 0}}), UndefinedCorrelation);

    const auto dir = testing::scratch_dir("correlation");
    write_correlation_csv(report, dir / "c.csv");
    std::ifstream in(dir / "c.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "label_i,label_j,cooccur_prob,center_distance");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("relation report") {
    const auto p = two_d_model({{0.3, 0.0}, {0.8, 0.0}, {-0.9, 0.0}, {0.3, 0.0}});
    const auto rel = relation_report(p);
    CHECK(rel.size() == 6);
    auto find = [&](std::size_t i, std::size_t j) {
        return *std::find_if(rel.begin(), rel.end(), [&](const PairRelation& r) { return r.i == i && r.j == j; });
    };
    CHECK(find(0, 1).relation.kind == balls::RelationKind::contains);
    CHECK(find(1, 2).relation.kind == balls::RelationKind::disjoint);
    CHECK(find(0, 3).relation.kind == balls::RelationKind::contains);
    CHECK(find(0, 3).relation.margin == 0.0);

    auto base = p;
    base.mode = Mode::euclidean_baseline;
    base.label_bias = Vec(4, 0.0);
    CHECK_THROWS_AS(relation_report(base), UnsupportedMode);
}

TEST_CASE("response map") {
    const auto p = two_d_model({{0.5, 0.2}, {-0.3, -0.6}});
    const auto grid = export_response_map(p, 0, 4);
    CHECK(grid.size() == 16);
    CHECK(grid[0].x == doctest::Approx(-0.999));
    CHECK(grid[1].x == doctest::Approx(-0.333));
    CHECK(grid[1].y == grid[0].y);
    CHECK(grid[4].y == doctest::Approx(-0.333));
    CHECK(std::isnan(grid[0].prob));  // corner lies outside the ball

    const std::size_t res = 256;
    const auto big = export_response_map(p, 1, res);
    for (const auto& cell : big) {
        if (std::hypot(cell.x, cell.y) <= geometry::kMaxNorm) {
            CHECK(cell.prob > 0.0);
            CHECK(cell.prob < 1.0);
        } else {
            CHECK(std::isnan(cell.prob));
        }
    }

    CHECK_THROWS_AS(export_response_map(p, 0, 0), ConfigError);
    CHECK_THROWS_AS(export_response_map(p, 2, 8), IndexOutOfRange);
    auto three = p;
    three.weight = Matrix(3, 2);
    three.bias = Vec(3, 0.0);
    three.labels = Matrix(2, 3);
    three.labels(0, 0) = 0.5;
    three.labels(1, 1) = 0.5;
    CHECK_THROWS_AS(export_response_map(three, 0, 8), UnsupportedDimension);

    const auto dir = testing::scratch_dir("response_map");
    write_response_map_csv(grid, dir / "m.csv");
    std::ifstream in(dir / "m.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,prob");
    std::getline(in, line);
    CHECK(line.substr(line.rfind(',') + 1) == "nan");
}
