#include "varsel/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "varsel/rng.hpp"

namespace varsel::data {

size_t TabularDataset::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    throw Error("MISSING_COLUMN", "no column named '" + name + "'");
}

const Column& TabularDataset::column(const std::string& name) const {
    return columns[column_index(name)];
}

namespace {

bool parses_as_number(const std::string& s) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    std::strtod(begin, &end);
    return end == begin + s.size();
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

}  // namespace

TabularDataset load_csv_text(const std::string& text,
                             const LoadOptions& options) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("EMPTY_FILE", "file has no header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    TabularDataset ds;
    for (const auto& name : split_line(line)) ds.columns.push_back({name});
    const size_t arity = ds.columns.size();

    size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_no;
        auto cells = split_line(line);
        if (cells.size() != arity)
            throw Error("RAGGED_ROW",
                        "row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(arity));
        ds.rows.push_back(std::move(cells));
    }
    if (ds.rows.empty()) throw Error("EMPTY_FILE", "file has no data rows");

    std::set<std::string> text_cols(options.text_columns.begin(),
                                    options.text_columns.end());
    for (size_t c = 0; c < ds.columns.size(); ++c) {
        if (text_cols.count(ds.columns[c].name)) {
            ds.columns[c].kind = ColumnKind::Text;
            continue;
        }
        bool numeric = true;
        for (const auto& row : ds.rows)
            if (!parses_as_number(row[c])) {
                numeric = false;
                break;
            }
        ds.columns[c].kind = numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
    }

    if (options.target) ds.column_index(*options.target);  // MISSING_COLUMN
    if (options.sensitive) ds.column_index(*options.sensitive);
    ds.target = options.target;
    ds.sensitive = options.sensitive;
    return ds;
}

TabularDataset load_csv(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), options);
}

namespace {

std::map<std::string, std::vector<size_t>> rows_by_class(
    const TabularDataset& dataset) {
    if (!dataset.target) throw Error("UNLABELED", "dataset has no target column");
    size_t t = dataset.column_index(*dataset.target);
    std::map<std::string, std::vector<size_t>> classes;
    for (size_t i = 0; i < dataset.rows.size(); ++i)
        classes[dataset.rows[i][t]].push_back(i);
    return classes;
}

}  // namespace

std::string default_positive_label(const TabularDataset& dataset) {
    auto classes = rows_by_class(dataset);
    if (classes.size() > 2)
        throw Error("NON_BINARY_TARGET",
                    "target has " + std::to_string(classes.size()) + " classes");
    if (classes.empty()) throw Error("DEGENERATE_CLASS", "no rows");
    return classes.rbegin()->first;  // lexicographically larger label
}

double positive_fraction(const TabularDataset& dataset) {
    auto classes = rows_by_class(dataset);
    if (classes.size() > 2)
        throw Error("NON_BINARY_TARGET",
                    "target has " + std::to_string(classes.size()) + " classes");
    std::string pos = default_positive_label(dataset);
    size_t count = classes.count(pos) ? classes[pos].size() : 0;
    return static_cast<double>(count) / static_cast<double>(dataset.rows.size());
}

DatasetProfile profile(const TabularDataset& dataset, const ProfileHint& hint,
                       const SelectorThresholds& thresholds) {
    thresholds.check();
    DatasetProfile p;
    p.sample_size = dataset.rows.size();
    p.feature_count = dataset.columns.size() - (dataset.target ? 1 : 0);
    p.labeled = dataset.target.has_value();
    p.prediction_kind = hint.prediction_kind;
    p.known_category_count = hint.known_category_count;
    p.few_features =
        p.feature_count < static_cast<size_t>(thresholds.few_features);
    for (const auto& c : dataset.columns)
        if (c.kind == ColumnKind::Text) p.text_data = true;
    if (p.labeled && hint.prediction_kind == PredictionKind::Category) {
        auto classes = rows_by_class(dataset);
        if (classes.size() <= 2) p.positive_fraction = positive_fraction(dataset);
    }
    return p;
}

std::pair<TabularDataset, TabularDataset> stratified_split(
    const TabularDataset& dataset, double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error("BAD_FRACTION", "test_fraction must lie in (0, 1)");
    auto classes = rows_by_class(dataset);
    for (const auto& [label, rows] : classes)
        if (rows.empty())
            throw Error("DEGENERATE_CLASS", "class '" + label + "' has no rows");
    if (classes.empty()) throw Error("DEGENERATE_CLASS", "dataset has no rows");

    const double total = static_cast<double>(dataset.rows.size());
    const long long target_test = std::llround(total * test_fraction);

    // Largest-remainder apportionment of the test total across classes.
    struct Share {
        std::string label;
        size_t count;
        long long base;
        double remainder;
    };
    std::vector<Share> shares;
    long long assigned = 0;
    for (const auto& [label, rows] : classes) {
        double quota = static_cast<double>(rows.size()) * test_fraction;
        long long base = static_cast<long long>(std::floor(quota));
        shares.push_back({label, rows.size(), base, quota - std::floor(quota)});
        assigned += base;
    }
    std::vector<size_t> order(shares.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return shares[a].remainder > shares[b].remainder;
    });
    for (size_t i = 0; assigned < target_test && i < order.size(); ++i) {
        if (shares[order[i]].base < static_cast<long long>(shares[order[i]].count)) {
            ++shares[order[i]].base;
            ++assigned;
        }
    }

    // Seeded per-class shuffles pick the members; classes are visited in
    // label order so the draw sequence is reproducible.
    SplitMix64 rng(seed);
    std::set<size_t> test_rows;
    for (const auto& share : shares) {
        auto rows = classes[share.label];
        for (size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[rng.bounded(i)]);
        for (long long k = 0; k < share.base; ++k) test_rows.insert(rows[k]);
    }

    TabularDataset train, test;
    train.columns = test.columns = dataset.columns;
    train.target = test.target = dataset.target;
    train.sensitive = test.sensitive = dataset.sensitive;
    for (size_t i = 0; i < dataset.rows.size(); ++i)
        (test_rows.count(i) ? test : train).rows.push_back(dataset.rows[i]);
    return {std::move(train), std::move(test)};
}

}  // namespace varsel::data
