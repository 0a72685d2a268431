#pragma once

#include <filesystem>
#include <string>

#include "hyperball/projector.hpp"

namespace hyperball {

inline constexpr int kModelFormatVersion = 1;

// JSON document:
//   {version, mode, n, d, K, W (row-major, n*d), b, labels (K rows of n),
//    temp_mode, log_tau (number, or K numbers for learnable_per_class),
//    label_bias (euclidean_baseline only)}
std::string model_to_json(const ModelParams& params);
ModelParams model_from_json(const std::string& text);

void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace hyperball
