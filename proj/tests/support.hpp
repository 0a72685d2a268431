#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hyperball/geometry.hpp"
#include "hyperball/linalg.hpp"
#include "hyperball/rng.hpp"

namespace testing {

// Uniform direction scaled to a norm drawn from [lo, hi].
inline hyperball::Vec random_vector(hyperball::SplitMix64& rng, std::size_t n, double lo, double hi) {
    hyperball::Vec v(n);
    double len = 0.0;
    do {
        for (double& x : v) x = rng.normal();
        len = hyperball::norm(v);
    } while (len == 0.0);
    const double target = rng.uniform(lo, hi);
    for (double& x : v) x *= target / len;
    return v;
}

inline hyperball::geometry::HyperbolicPoint random_point(hyperball::SplitMix64& rng, std::size_t n, double max_norm) {
    return hyperball::geometry::project_to_ball(random_vector(rng, n, 0.0, max_norm));
}

inline hyperball::geometry::HyperbolicPoint point(std::initializer_list<double> coords) {
    hyperball::Vec v(coords);
    return hyperball::geometry::project_to_ball(v);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hyperball_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
