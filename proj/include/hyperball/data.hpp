#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperball/grad.hpp"
#include "hyperball/linalg.hpp"

namespace hyperball::data {

using LabelRow = std::vector<std::uint8_t>;

// Single-positive multi-label dataset. full_labels, when present, is the
// complete ground truth used for evaluation only.
struct Dataset {
    std::vector<std::string> ids;
    Matrix features;                           // S x d
    std::vector<std::size_t> observed_pos;     // S
    std::optional<std::vector<LabelRow>> full_labels;  // S rows of K
    std::size_t num_labels = 0;

    std::size_t size() const { return ids.size(); }
    std::size_t feature_dim() const { return features.cols(); }

    // Throws InvalidDataset when an invariant is broken.
    void validate() const;

    std::vector<grad::Sample> samples() const;
    Dataset subset(const std::vector<std::size_t>& rows) const;

    bool operator==(const Dataset&) const = default;
};

struct CooccurPair {
    std::size_t first = 0;
    std::size_t second = 0;
    double probability = 0.0;
};

// Label layout: superclass s owns index s * (1 + subs_per_super) followed by
// its subs_per_super subclasses.
struct SynthConfig {
    std::size_t num_super = 5;
    std::size_t subs_per_super = 2;
    std::vector<CooccurPair> cooccur_pairs;
    std::size_t d = 32;
    std::size_t samples = 4000;
    double noise_sigma = 0.5;
    std::uint64_t seed = 0;

    std::size_t num_labels() const { return num_super * (1 + subs_per_super); }
    std::size_t super_label(std::size_t s) const { return s * (1 + subs_per_super); }
    // Superclass index owning label i.
    std::size_t parent_of(std::size_t label) const { return label / (1 + subs_per_super); }
    bool is_super(std::size_t label) const { return label % (1 + subs_per_super) == 0; }

    void validate() const;

    // Cross-superclass pairs used when none are configured.
    static std::vector<CooccurPair> default_pairs(std::size_t num_super, std::size_t subs_per_super);
};

// Per sample: one superclass, its label and 1-2 of its subclasses are active;
// each pair (a, b, p) with a active activates b with probability p (and b's
// superclass, so the hierarchy stays closed). Features are the sum of the
// active labels' N(0, 1) prototypes plus noise_sigma * N(0, 1).
Dataset generate_synthetic(const SynthConfig& cfg);

// Uniform pick among each row's positives.
std::vector<std::size_t> mask_to_single_positive(const std::vector<LabelRow>& full_labels, std::uint64_t seed);

// CSV formats:
//   features      id,f0,...,f{d-1}
//   single labels id,pos_idx
//   full labels   id,y0,...,y{K-1}
// Ids must appear in the same order in every file. num_labels is required
// when no full-label file is given.
Dataset load_dataset(const std::filesystem::path& features, const std::filesystem::path& single_labels,
                     const std::optional<std::filesystem::path>& full_labels,
                     std::optional<std::size_t> num_labels = std::nullopt);

std::vector<LabelRow> load_full_labels(const std::filesystem::path& path);

// Features plus full labels, for evaluation. Evaluation never reads the
// observed positives, so each row's first true label stands in for them.
Dataset load_evaluation_dataset(const std::filesystem::path& features, const std::filesystem::path& full_labels);

void write_features(const Dataset& ds, const std::filesystem::path& path);
void write_single_labels(const Dataset& ds, const std::filesystem::path& path);
void write_full_labels(const Dataset& ds, const std::filesystem::path& path);

struct DatasetFiles {
    std::filesystem::path features;
    std::filesystem::path single_labels;
    std::filesystem::path full_labels;
};

DatasetFiles default_files(const std::filesystem::path& dir);
DatasetFiles save_dataset(const Dataset& ds, const std::filesystem::path& dir);

// Seeded shuffle, then the first round(frac * S) rows go to the first part.
std::pair<Dataset, Dataset> train_eval_split(const Dataset& ds, double frac, std::uint64_t seed);

}  // namespace hyperball::data
