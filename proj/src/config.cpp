#include "hyperball/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hyperball/errors.hpp"

namespace hyperball {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where = "") {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + where + key + "' has the wrong type");
    }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where = "") {
    if (!j.contains(key)) return;
    T v{};
    read(j, key, v, where);
    out = v;
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing required config key '" + where + key + "'");
    T v{};
    read(j, key, v, where);
    return v;
}

data::SynthConfig parse_synth(const json& j) {
    if (!j.is_object()) throw ConfigError("config key 'synth' must be an object");
    reject_unknown(j, {"num_super", "subs_per_super", "cooccur_pairs", "d", "samples", "noise_sigma"}, "synth.");
    data::SynthConfig s;
    s.num_super = require<std::size_t>(j, "num_super", "synth.");
    s.subs_per_super = require<std::size_t>(j, "subs_per_super", "synth.");
    read(j, "d", s.d, "synth.");
    read(j, "samples", s.samples, "synth.");
    read(j, "noise_sigma", s.noise_sigma, "synth.");
    if (j.contains("cooccur_pairs")) {
        const auto& arr = j.at("cooccur_pairs");
        if (!arr.is_array()) throw ConfigError("config key 'synth.cooccur_pairs' must be an array");
        for (const auto& p : arr) {
            if (!p.is_array() || p.size() != 3)
                throw ConfigError("config key 'synth.cooccur_pairs' entries must be [first, second, probability]");
            try {
                s.cooccur_pairs.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>(), p[2].get<double>()});
            } catch (const json::exception&) {
                throw ConfigError("config key 'synth.cooccur_pairs' has the wrong type");
            }
        }
    } else {
        s.cooccur_pairs = data::SynthConfig::default_pairs(s.num_super, s.subs_per_super);
    }
    return s;
}

}  // namespace

void parse_temp_spec(const std::string& spec, TempMode& mode, double& fixed_tau) {
    if (spec.rfind("fixed:", 0) == 0) {
        const std::string value = spec.substr(6);
        std::size_t used = 0;
        double tau = 0.0;
        try {
            tau = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) throw ConfigError("config key 'temp_mode': bad fixed temperature '" + value + "'");
        mode = TempMode::fixed;
        fixed_tau = tau;
        return;
    }
    if (spec == "fixed") throw ConfigError("config key 'temp_mode': fixed mode needs a value, e.g. 'fixed:0.5'");
    try {
        mode = parse_temp_mode(spec);
    } catch (const ConfigError&) {
        throw ConfigError("config key 'temp_mode': unknown value '" + spec + "'");
    }
}

std::string temp_spec(TempMode mode, double fixed_tau) {
    if (mode != TempMode::fixed) return std::string(to_string(mode));
    std::ostringstream ss;
    ss << "fixed:" << fixed_tau;
    return ss.str();
}

InitOptions TrainConfig::init_options(std::size_t d_, std::size_t k) const {
    InitOptions o;
    o.n = n;
    o.d = d_;
    o.num_labels = k;
    o.mode = mode;
    o.temp_mode = temp_mode;
    o.fixed_tau = fixed_tau;
    o.seed = seed;
    return o;
}

void TrainConfig::validate() const {
    if (n == 0) throw ConfigError("config key 'n' must be positive");
    if (batch_size == 0) throw ConfigError("config key 'batch_size' must be positive");
    if (!(optim.lr_riem >= 0)) throw ConfigError("config key 'lr_riem' must be non-negative");
    if (!(optim.lr_euc >= 0)) throw ConfigError("config key 'lr_euc' must be non-negative");
    if (!(optim.clip_norm > 0)) throw ConfigError("config key 'clip_norm' must be positive");
    if (!(weights.lambda1 >= 0)) throw ConfigError("config key 'lambda1' must be non-negative");
    if (!(weights.lambda2 >= 0)) throw ConfigError("config key 'lambda2' must be non-negative");
    if (!(holdout_frac >= 0 && holdout_frac < 1)) throw ConfigError("config key 'holdout_frac' must lie in [0, 1)");
    if (temp_mode == TempMode::fixed && !(fixed_tau >= 1e-3))
        throw ConfigError("config key 'temp_mode': fixed temperature below 1e-3");
    if (!(well.beta1 > 0)) throw ConfigError("config key 'beta1' must be positive");
    if (!(well.beta2 > 0)) throw ConfigError("config key 'beta2' must be positive");
    if (!(0 < well.c1 && well.c1 < well.c2 && well.c2 < 1))
        throw ConfigError("config keys 'c1', 'c2' must satisfy 0 < c1 < c2 < 1");
    if (synth) synth->validate();
}

TrainConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"n", "d", "K", "epochs", "batch_size", "lr_riem", "lr_euc", "clip_norm", "lambda1", "lambda2",
                    "beta1", "beta2", "c1", "c2", "beta1_as_width", "temp_mode", "mode", "seed", "holdout_frac",
                    "data", "synth", "metrics_path"},
                   "");
    TrainConfig c;
    read(j, "n", c.n);
    read_opt(j, "d", c.d);
    read_opt(j, "K", c.num_labels);
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "lr_riem", c.optim.lr_riem);
    read(j, "lr_euc", c.optim.lr_euc);
    read(j, "clip_norm", c.optim.clip_norm);
    read(j, "lambda1", c.weights.lambda1);
    read(j, "lambda2", c.weights.lambda2);
    read(j, "beta1", c.well.beta1);
    read(j, "beta2", c.well.beta2);
    read(j, "c1", c.well.c1);
    read(j, "c2", c.well.c2);
    read(j, "beta1_as_width", c.well.beta1_as_width);
    if (j.contains("temp_mode")) {
        std::string spec;
        read(j, "temp_mode", spec);
        parse_temp_spec(spec, c.temp_mode, c.fixed_tau);
    }
    if (j.contains("mode")) {
        std::string m;
        read(j, "mode", m);
        try {
            c.mode = parse_mode(m);
        } catch (const ConfigError&) {
            throw ConfigError("config key 'mode': unknown value '" + m + "'");
        }
    }
    read(j, "seed", c.seed);
    read(j, "holdout_frac", c.holdout_frac);
    if (j.contains("metrics_path")) {
        std::string p;
        read(j, "metrics_path", p);
        c.metrics_path = p;
    }
    if (j.contains("data")) {
        const auto& d = j.at("data");
        if (!d.is_object()) throw ConfigError("config key 'data' must be an object");
        reject_unknown(d, {"features", "labels_single", "labels_full"}, "data.");
        std::string p;
        if (d.contains("features")) { read(d, "features", p, "data."); c.data.features = p; }
        if (d.contains("labels_single")) { read(d, "labels_single", p, "data."); c.data.labels_single = p; }
        if (d.contains("labels_full")) { read(d, "labels_full", p, "data."); c.data.labels_full = p; }
    }
    if (j.contains("synth")) {
        c.synth = parse_synth(j.at("synth"));
        c.synth->seed = c.seed;
    }
    c.validate();
    return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace hyperball
