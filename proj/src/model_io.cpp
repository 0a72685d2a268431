#include "hyperball/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hyperball/errors.hpp"

namespace hyperball {

using nlohmann::json;

std::string model_to_json(const ModelParams& params) {
    json j;
    j["version"] = kModelFormatVersion;
    j["mode"] = std::string(to_string(params.mode));
    j["n"] = params.n();
    j["d"] = params.d();
    j["K"] = params.num_labels();
    j["W"] = params.weight.data();
    j["b"] = params.bias;
    json labels = json::array();
    for (std::size_t i = 0; i < params.num_labels(); ++i) {
        auto row = params.labels.row(i);
        labels.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["labels"] = std::move(labels);
    j["temp_mode"] = std::string(to_string(params.temp_mode));
    if (params.temp_mode == TempMode::learnable_per_class)
        j["log_tau"] = params.log_tau;
    else
        j["log_tau"] = params.log_tau.at(0);
    if (params.mode == Mode::euclidean_baseline) j["label_bias"] = params.label_bias;
    // nlohmann emits the shortest representation that round-trips exactly.
    return j.dump(2) + "\n";
}

namespace {

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw DataError(std::string("model: missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("model: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

ModelParams model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model: ") + e.what());
    }
    if (field<int>(j, "version") != kModelFormatVersion) throw DataError("model: unsupported version");

    ModelParams p;
    try {
        p.mode = parse_mode(field<std::string>(j, "mode"));
        p.temp_mode = parse_temp_mode(field<std::string>(j, "temp_mode"));
    } catch (const ConfigError& e) {
        throw DataError(std::string("model: ") + e.what());
    }
    const auto n = field<std::size_t>(j, "n");
    const auto d = field<std::size_t>(j, "d");
    const auto k = field<std::size_t>(j, "K");

    auto w = field<std::vector<double>>(j, "W");
    if (w.size() != n * d) throw DataError("model: W must have n*d entries");
    p.weight = Matrix(n, d);
    p.weight.data() = std::move(w);
    p.bias = field<std::vector<double>>(j, "b");

    auto rows = field<std::vector<std::vector<double>>>(j, "labels");
    if (rows.size() != k) throw DataError("model: labels must have K rows");
    p.labels = Matrix(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        if (rows[i].size() != n) throw DataError("model: label rows must have n entries");
        std::copy(rows[i].begin(), rows[i].end(), p.labels.row(i).begin());
    }
    if (p.temp_mode == TempMode::learnable_per_class)
        p.log_tau = field<std::vector<double>>(j, "log_tau");
    else
        p.log_tau = {field<double>(j, "log_tau")};
    if (p.mode == Mode::euclidean_baseline) p.label_bias = field<std::vector<double>>(j, "label_bias");

    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw DataError(std::string("model: ") + e.what());
    }
    return p;
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << model_to_json(params);
    if (!out) throw DataError("failed writing " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace hyperball
