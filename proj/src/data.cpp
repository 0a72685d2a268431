#include "hyperball/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hyperball/errors.hpp"
#include "hyperball/rng.hpp"

namespace hyperball::data {

void Dataset::validate() const {
    const std::size_t s = ids.size();
    if (features.rows() != s) throw InvalidDataset("feature rows do not match sample count");
    if (observed_pos.size() != s) throw InvalidDataset("single-label rows do not match sample count");
    for (std::size_t i = 0; i < s; ++i) {
        if (observed_pos[i] >= num_labels)
            throw InvalidDataset("sample '" + ids[i] + "': positive index " + std::to_string(observed_pos[i]) +
                                 " out of range for K = " + std::to_string(num_labels));
    }
    if (!full_labels) return;
    if (full_labels->size() != s) throw InvalidDataset("full-label rows do not match sample count");
    for (std::size_t i = 0; i < s; ++i) {
        const auto& row = (*full_labels)[i];
        if (row.size() != num_labels) throw InvalidDataset("sample '" + ids[i] + "': full-label row has wrong length");
        if (std::find(row.begin(), row.end(), 1) == row.end())
            throw InvalidDataset("sample '" + ids[i] + "': full-label row has no positive");
        if (row[observed_pos[i]] != 1)
            throw InvalidDataset("sample '" + ids[i] + "': observed positive is negative in full labels");
    }
}

std::vector<grad::Sample> Dataset::samples() const {
    std::vector<grad::Sample> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back({features.row(i), observed_pos[i]});
    return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.num_labels = num_labels;
    out.features = Matrix(rows.size(), feature_dim());
    if (full_labels) out.full_labels.emplace();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        out.ids.push_back(ids[src]);
        std::copy(features.row(src).begin(), features.row(src).end(), out.features.row(r).begin());
        out.observed_pos.push_back(observed_pos[src]);
        if (full_labels) out.full_labels->push_back((*full_labels)[src]);
    }
    return out;
}

void SynthConfig::validate() const {
    if (num_super == 0) throw ConfigError("synth.num_super must be positive");
    if (subs_per_super == 0) throw ConfigError("synth.subs_per_super must be positive");
    if (d == 0) throw ConfigError("synth.d must be positive");
    if (samples == 0) throw ConfigError("synth.samples must be positive");
    if (!(noise_sigma >= 0) || !std::isfinite(noise_sigma)) throw ConfigError("synth.noise_sigma must be >= 0");
    for (const auto& p : cooccur_pairs) {
        if (p.first >= num_labels() || p.second >= num_labels())
            throw ConfigError("synth.cooccur_pairs: label index out of range");
        if (!(p.probability >= 0 && p.probability <= 1))
            throw ConfigError("synth.cooccur_pairs: probability outside [0, 1]");
    }
}

std::vector<CooccurPair> SynthConfig::default_pairs(std::size_t num_super, std::size_t subs_per_super) {
    std::vector<CooccurPair> pairs;
    if (num_super < 2) return pairs;
    const std::size_t stride = 1 + subs_per_super;
    for (std::size_t s = 0; s < num_super; ++s)
        pairs.push_back({s * stride + 1, ((s + 1) % num_super) * stride, 0.9});
    return pairs;
}

Dataset generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.num_labels();
    auto rng = make_stream(cfg.seed, streams::kSynth);

    Matrix prototypes(k, cfg.d);
    for (double& v : prototypes.data()) v = rng.normal();

    Dataset ds;
    ds.num_labels = k;
    ds.features = Matrix(cfg.samples, cfg.d);
    ds.full_labels.emplace();
    ds.full_labels->reserve(cfg.samples);

    std::vector<std::size_t> subs(cfg.subs_per_super);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        LabelRow active(k, 0);
        const std::size_t sup = rng.below(cfg.num_super);
        active[cfg.super_label(sup)] = 1;
        const std::size_t count = cfg.subs_per_super >= 2 ? 1 + rng.below(2) : 1;
        std::iota(subs.begin(), subs.end(), std::size_t{0});
        rng.shuffle(subs);
        for (std::size_t c = 0; c < count; ++c) active[cfg.super_label(sup) + 1 + subs[c]] = 1;

        for (const auto& pair : cfg.cooccur_pairs) {
            if (!active[pair.first]) continue;
            if (rng.uniform() < pair.probability) {
                active[pair.second] = 1;
                active[cfg.super_label(cfg.parent_of(pair.second))] = 1;
            }
        }

        auto row = ds.features.row(s);
        for (std::size_t i = 0; i < k; ++i)
            if (active[i])
                for (std::size_t c = 0; c < cfg.d; ++c) row[c] += prototypes(i, c);
        for (std::size_t c = 0; c < cfg.d; ++c) row[c] += cfg.noise_sigma * rng.normal();

        ds.ids.push_back("s" + std::to_string(s));
        ds.full_labels->push_back(std::move(active));
    }
    ds.observed_pos = mask_to_single_positive(*ds.full_labels, cfg.seed);
    ds.validate();
    return ds;
}

std::vector<std::size_t> mask_to_single_positive(const std::vector<LabelRow>& full_labels, std::uint64_t seed) {
    auto rng = make_stream(seed, streams::kMask);
    std::vector<std::size_t> out;
    out.reserve(full_labels.size());
    std::vector<std::size_t> positives;
    for (std::size_t r = 0; r < full_labels.size(); ++r) {
        positives.clear();
        for (std::size_t i = 0; i < full_labels[r].size(); ++i)
            if (full_labels[r][i]) positives.push_back(i);
        if (positives.empty()) throw InvalidDataset("row " + std::to_string(r) + " has no positive label");
        out.push_back(positives[rng.below(positives.size())]);
    }
    return out;
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError(path.string(), line_no, 1,
                             "expected " + std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(path.string(), line_no, 1, "empty id");
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw ParseError(path.string(), 1, 1, "missing header");
    return table;
}

// 1-based column of field `f` on a line.
std::size_t column_of(const std::vector<std::string>& fields, std::size_t f) {
    std::size_t col = 1;
    for (std::size_t i = 0; i < f; ++i) col += fields[i].size() + 1;
    return col;
}

double parse_double(const CsvTable& t, std::size_t r, std::size_t f, const std::filesystem::path& path) {
    const auto& s = t.rows[r][f];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(path.string(), t.line_numbers[r], column_of(t.rows[r], f), "invalid number '" + s + "'");
    return v;
}

std::size_t parse_index(const CsvTable& t, std::size_t r, std::size_t f, const std::filesystem::path& path) {
    const auto& s = t.rows[r][f];
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(path.string(), t.line_numbers[r], column_of(t.rows[r], f), "invalid index '" + s + "'");
    return v;
}

void expect_header(const CsvTable& t, const std::string& prefix, std::size_t first_data_col,
                   const std::filesystem::path& path) {
    if (t.header.empty() || t.header[0] != "id") throw ParseError(path.string(), 1, 1, "header must start with 'id'");
    for (std::size_t i = first_data_col; i < t.header.size(); ++i) {
        const std::string want = prefix + std::to_string(i - first_data_col);
        if (t.header[i] != want)
            throw ParseError(path.string(), 1, column_of(t.header, i), "expected header '" + want + "'");
    }
}

void check_ids(const CsvTable& t, const std::vector<std::string>& ids, const std::filesystem::path& path) {
    if (t.rows.size() != ids.size())
        throw InvalidDataset(path.string() + ": " + std::to_string(t.rows.size()) + " rows, expected " +
                             std::to_string(ids.size()));
    for (std::size_t r = 0; r < ids.size(); ++r)
        if (t.rows[r][0] != ids[r])
            throw InvalidDataset(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": id '" + t.rows[r][0] +
                                 "' does not match features id '" + ids[r] + "'");
}

std::vector<LabelRow> parse_full(const CsvTable& t, const std::filesystem::path& path) {
    expect_header(t, "y", 1, path);
    std::vector<LabelRow> rows;
    rows.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        LabelRow row(t.header.size() - 1);
        for (std::size_t f = 1; f < t.header.size(); ++f) {
            const auto& s = t.rows[r][f];
            if (s != "0" && s != "1")
                throw ParseError(path.string(), t.line_numbers[r], column_of(t.rows[r], f), "expected 0 or 1, got '" + s + "'");
            row[f - 1] = s == "1" ? 1 : 0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<LabelRow> load_full_labels(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    auto rows = parse_full(table, path);
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (std::find(rows[r].begin(), rows[r].end(), 1) == rows[r].end())
            throw InvalidDataset(path.string() + ":" + std::to_string(table.line_numbers[r]) + ": row has no positive label");
    return rows;
}

namespace {

Dataset read_features(const std::filesystem::path& features) {
    Dataset ds;
    const auto ft = read_csv(features);
    expect_header(ft, "f", 1, features);
    const std::size_t d = ft.header.size() - 1;
    if (d == 0) throw ParseError(features.string(), 1, 1, "no feature columns");
    ds.features = Matrix(ft.rows.size(), d);
    for (std::size_t r = 0; r < ft.rows.size(); ++r) {
        ds.ids.push_back(ft.rows[r][0]);
        for (std::size_t f = 1; f <= d; ++f) ds.features(r, f - 1) = parse_double(ft, r, f, features);
    }
    return ds;
}

}  // namespace

Dataset load_evaluation_dataset(const std::filesystem::path& features, const std::filesystem::path& full_labels) {
    Dataset ds = read_features(features);
    const auto lt = read_csv(full_labels);
    check_ids(lt, ds.ids, full_labels);
    ds.full_labels = parse_full(lt, full_labels);
    ds.num_labels = lt.header.size() - 1;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto& row = (*ds.full_labels)[r];
        const auto first = std::find(row.begin(), row.end(), 1);
        if (first == row.end())
            throw InvalidDataset(full_labels.string() + ":" + std::to_string(lt.line_numbers[r]) + ": row has no positive label");
        ds.observed_pos.push_back(static_cast<std::size_t>(first - row.begin()));
    }
    ds.validate();
    return ds;
}

Dataset load_dataset(const std::filesystem::path& features, const std::filesystem::path& single_labels,
                     const std::optional<std::filesystem::path>& full_labels, std::optional<std::size_t> num_labels) {
    Dataset ds = read_features(features);

    const auto st = read_csv(single_labels);
    if (st.header != std::vector<std::string>{"id", "pos_idx"})
        throw ParseError(single_labels.string(), 1, 1, "header must be 'id,pos_idx'");
    check_ids(st, ds.ids, single_labels);
    for (std::size_t r = 0; r < st.rows.size(); ++r) ds.observed_pos.push_back(parse_index(st, r, 1, single_labels));

    if (full_labels) {
        const auto lt = read_csv(*full_labels);
        check_ids(lt, ds.ids, *full_labels);
        ds.full_labels = parse_full(lt, *full_labels);
        ds.num_labels = lt.header.size() - 1;
        if (num_labels && *num_labels != ds.num_labels)
            throw InvalidDataset("full labels have " + std::to_string(ds.num_labels) + " columns, expected " +
                                 std::to_string(*num_labels));
    } else if (num_labels) {
        ds.num_labels = *num_labels;
    } else {
        throw ConfigError("number of labels unknown: provide a full-label file or K");
    }
    ds.validate();
    return ds;
}

void write_features(const Dataset& ds, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "id";
    for (std::size_t c = 0; c < ds.feature_dim(); ++c) out << ",f" << c;
    out << '\n';
    for (std::size_t r = 0; r < ds.size(); ++r) {
        out << ds.ids[r];
        for (double v : ds.features.row(r)) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_single_labels(const Dataset& ds, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "id,pos_idx\n";
    for (std::size_t r = 0; r < ds.size(); ++r) out << ds.ids[r] << ',' << ds.observed_pos[r] << '\n';
}

void write_full_labels(const Dataset& ds, const std::filesystem::path& path) {
    if (!ds.full_labels) throw InvalidDataset("dataset has no full labels");
    auto out = open_out(path);
    out << "id";
    for (std::size_t c = 0; c < ds.num_labels; ++c) out << ",y" << c;
    out << '\n';
    for (std::size_t r = 0; r < ds.size(); ++r) {
        out << ds.ids[r];
        for (auto v : (*ds.full_labels)[r]) out << ',' << static_cast<int>(v);
        out << '\n';
    }
}

DatasetFiles default_files(const std::filesystem::path& dir) {
    return {dir / "features.csv", dir / "labels_single.csv", dir / "labels_full.csv"};
}

DatasetFiles save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    auto files = default_files(dir);
    write_features(ds, files.features);
    write_single_labels(ds, files.single_labels);
    if (ds.full_labels) write_full_labels(ds, files.full_labels);
    return files;
}

std::pair<Dataset, Dataset> train_eval_split(const Dataset& ds, double frac, std::uint64_t seed) {
    if (!(frac > 0 && frac < 1)) throw ConfigError("split fraction must lie in (0, 1)");
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_stream(seed, streams::kSplit);
    rng.shuffle(order);
    const auto cut = static_cast<std::size_t>(std::llround(frac * static_cast<double>(ds.size())));
    std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    return {ds.subset(first), ds.subset(second)};
}

}  // namespace hyperball::data
