#include "varsel/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "varsel/rng.hpp"

namespace varsel::learners {

using data::ColumnKind;
using data::TabularDataset;
using json = nlohmann::ordered_json;

std::map<std::string, double> default_hyperparameters(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::LinearSvc:
            return {{"lambda", 0.01}, {"epochs", 200}};
        case AlgorithmKind::Knn:
            return {{"k", 5}};
        case AlgorithmKind::RbfSvc:
            return {{"lambda", 0.01}, {"epochs", 20}, {"gamma", 0.0}};
        case AlgorithmKind::Ensemble:
            return {{"trees", 100}, {"max_depth", 8}, {"bootstrap", 1}};
        case AlgorithmKind::SgdClassifier:
            return {{"lambda", 1e-4}, {"epochs", 50}, {"eta0", 0.1}};
        case AlgorithmKind::NaiveBayes:
            return {{"var_floor", 1e-9}};
        default:
            throw Error("UNSUPPORTED_KIND",
                        selector::to_string(kind) + " is not a trainable classifier");
    }
}

namespace {

std::map<std::string, double> merge_hyperparameters(const LearnerSpec& spec) {
    auto params = default_hyperparameters(spec.kind);
    for (const auto& [name, value] : spec.hyperparameters) {
        auto it = params.find(name);
        if (it == params.end())
            throw Error("UNKNOWN_HYPERPARAMETER",
                        selector::to_string(spec.kind) + " has no hyperparameter '" +
                            name + "'");
        it->second = value;
    }
    return params;
}

struct Problem {
    std::vector<std::string> labels;        // sorted, size 2
    std::vector<int> y;                     // label indices per row
    std::vector<size_t> feature_columns;    // column indices, target excluded
};

Problem extract_problem(const TabularDataset& ds) {
    if (!ds.target) throw Error("UNLABELED", "training set has no target column");
    size_t t = ds.column_index(*ds.target);
    Problem p;
    std::set<std::string> distinct;
    for (const auto& row : ds.rows) distinct.insert(row[t]);
    if (distinct.size() < 2)
        throw Error("SINGLE_CLASS_TRAINING_SET",
                    "training set holds a single class");
    if (distinct.size() > 2)
        throw Error("NON_BINARY_LABELS", "training set holds " +
                                             std::to_string(distinct.size()) +
                                             " classes");
    p.labels.assign(distinct.begin(), distinct.end());
    for (const auto& row : ds.rows)
        p.y.push_back(row[t] == p.labels[1] ? 1 : 0);
    for (size_t c = 0; c < ds.columns.size(); ++c)
        if (c != t) p.feature_columns.push_back(c);
    return p;
}

double parse_cell(const std::string& cell) {
    return std::strtod(cell.c_str(), nullptr);
}

std::vector<ColumnEncoding> build_encodings(const TabularDataset& ds,
                                            const Problem& p) {
    std::vector<ColumnEncoding> encodings;
    for (size_t c : p.feature_columns) {
        const auto& col = ds.columns[c];
        if (col.kind == ColumnKind::Text)
            throw Error("TEXT_FEATURES_UNSUPPORTED",
                        "column '" + col.name + "' holds text");
        ColumnEncoding enc;
        enc.name = col.name;
        enc.numeric = col.kind == ColumnKind::Numeric;
        if (!enc.numeric) {
            std::set<std::string> cats;
            for (const auto& row : ds.rows) cats.insert(row[c]);
            enc.categories.assign(cats.begin(), cats.end());
        }
        encodings.push_back(std::move(enc));
    }
    return encodings;
}

std::vector<std::vector<double>> encode_rows(
    const TabularDataset& ds, const std::vector<ColumnEncoding>& encodings) {
    // Feature columns of `ds` must match the training encodings by name and
    // order; a target column, if present, is skipped.
    std::vector<size_t> cols;
    size_t skip = ds.target ? ds.column_index(*ds.target) : ds.columns.size();
    for (size_t c = 0; c < ds.columns.size(); ++c)
        if (c != skip) cols.push_back(c);
    if (cols.size() != encodings.size())
        throw Error("ARITY_MISMATCH",
                    "expected " + std::to_string(encodings.size()) +
                        " feature columns, got " + std::to_string(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i)
        if (ds.columns[cols[i]].name != encodings[i].name)
            throw Error("ARITY_MISMATCH",
                        "feature column '" + ds.columns[cols[i]].name +
                            "' does not match trained column '" +
                            encodings[i].name + "'");

    std::vector<std::vector<double>> matrix;
    matrix.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::vector<double> x;
        for (size_t i = 0; i < cols.size(); ++i) {
            const auto& enc = encodings[i];
            const std::string& cell = row[cols[i]];
            if (enc.numeric) {
                x.push_back(parse_cell(cell));
            } else {
                for (const auto& cat : enc.categories)
                    x.push_back(cat == cell ? 1.0 : 0.0);
            }
        }
        matrix.push_back(std::move(x));
    }
    return matrix;
}

void standardize_in_place(std::vector<std::vector<double>>& matrix,
                          std::vector<double>& mean,
                          std::vector<double>& scale) {
    if (matrix.empty()) return;
    size_t d = matrix[0].size();
    mean.assign(d, 0.0);
    scale.assign(d, 1.0);
    for (const auto& row : matrix)
        for (size_t j = 0; j < d; ++j) mean[j] += row[j];
    for (size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(matrix.size());
    std::vector<double> var(d, 0.0);
    for (const auto& row : matrix)
        for (size_t j = 0; j < d; ++j) {
            double dev = row[j] - mean[j];
            var[j] += dev * dev;
        }
    for (size_t j = 0; j < d; ++j) {
        double s = std::sqrt(var[j] / static_cast<double>(matrix.size()));
        scale[j] = s > 0.0 ? s : 1.0;
    }
    for (auto& row : matrix)
        for (size_t j = 0; j < d; ++j) row[j] = (row[j] - mean[j]) / scale[j];
}

void apply_standardization(std::vector<std::vector<double>>& matrix,
                           const std::vector<double>& mean,
                           const std::vector<double>& scale) {
    for (auto& row : matrix)
        for (size_t j = 0; j < mean.size(); ++j)
            row[j] = (row[j] - mean[j]) / scale[j];
}

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double s = w.back();  // bias
    for (size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    return s;
}

// L2-regularized hinge loss, full-batch subgradient, step 1/(lambda*t).
LinearState train_linear_svc(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& y, double lambda,
                             int epochs) {
    const size_t n = x.size(), d = x[0].size();
    std::vector<double> w(d + 1, 0.0);
    for (int t = 1; t <= epochs; ++t) {
        double eta = 1.0 / (lambda * t);
        std::vector<double> grad(d + 1, 0.0);
        for (size_t j = 0; j < d; ++j) grad[j] = lambda * w[j];
        for (size_t i = 0; i < n; ++i) {
            double yi = y[i] == 1 ? 1.0 : -1.0;
            if (yi * dot(w, x[i]) < 1.0) {
                for (size_t j = 0; j < d; ++j) grad[j] -= yi * x[i][j] / n;
                grad[d] -= yi / n;
            }
        }
        for (size_t j = 0; j <= d; ++j) w[j] -= eta * grad[j];
    }
    return {std::move(w)};
}

// Logistic loss, one seeded shuffle per epoch.
LinearState train_sgd_logistic(const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y, double lambda,
                               int epochs, double eta0, uint64_t seed) {
    const size_t n = x.size(), d = x[0].size();
    std::vector<double> w(d + 1, 0.0);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    long t = 0;
    for (int e = 0; e < epochs; ++e) {
        for (size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.bounded(i)]);
        for (size_t i : order) {
            ++t;
            double eta = eta0 / (1.0 + eta0 * lambda * t);
            double p = 1.0 / (1.0 + std::exp(-dot(w, x[i])));
            double err = static_cast<double>(y[i]) - p;
            for (size_t j = 0; j < d; ++j)
                w[j] += eta * (err * x[i][j] - lambda * w[j]);
            w[d] += eta * err;
        }
    }
    return {std::move(w)};
}

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b,
                  double gamma) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) {
        double dev = a[j] - b[j];
        s += dev * dev;
    }
    return std::exp(-gamma * s);
}

// Kernelized pegasos with seeded sampling.
KernelState train_rbf_svc(std::vector<std::vector<double>> x,
                          std::vector<int> y, double lambda, int epochs,
                          double gamma, uint64_t seed) {
    const size_t n = x.size();
    if (gamma <= 0.0) gamma = 1.0 / static_cast<double>(x[0].size());
    std::vector<double> alpha(n, 0.0);
    SplitMix64 rng(seed);
    const long total = static_cast<long>(epochs) * static_cast<long>(n);
    for (long t = 1; t <= total; ++t) {
        size_t i = rng.bounded(n);
        double s = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (alpha[j] == 0.0) continue;
            double yj = y[j] == 1 ? 1.0 : -1.0;
            s += alpha[j] * yj * rbf_kernel(x[j], x[i], gamma);
        }
        double yi = y[i] == 1 ? 1.0 : -1.0;
        if (yi * s / (lambda * t) < 1.0) alpha[i] += 1.0;
    }
    return {std::move(x), std::move(y), std::move(alpha), gamma};
}

int majority_label(const std::vector<int>& y, const std::vector<size_t>& idx) {
    int64_t ones = 0;
    for (size_t i : idx) ones += y[i];
    int64_t zeros = static_cast<int64_t>(idx.size()) - ones;
    return ones > zeros ? 1 : 0;  // tie toward the smaller label index
}

double gini(int64_t ones, int64_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(ones) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // impurity decrease
};

Split best_split(const std::vector<std::vector<double>>& x,
                 const std::vector<int>& y, const std::vector<size_t>& idx) {
    const size_t d = x[0].size();
    int64_t total_ones = 0;
    for (size_t i : idx) total_ones += y[i];
    const int64_t total = static_cast<int64_t>(idx.size());
    const double parent = gini(total_ones, total);

    Split best;
    for (size_t f = 0; f < d; ++f) {
        std::vector<std::pair<double, int>> values;
        values.reserve(idx.size());
        for (size_t i : idx) values.push_back({x[i][f], y[i]});
        std::sort(values.begin(), values.end());
        int64_t left_ones = 0, left_n = 0;
        for (size_t i = 0; i + 1 < values.size(); ++i) {
            left_ones += values[i].second;
            ++left_n;
            if (values[i].first == values[i + 1].first) continue;
            double threshold = (values[i].first + values[i + 1].first) / 2.0;
            int64_t right_n = total - left_n;
            double child =
                (static_cast<double>(left_n) * gini(left_ones, left_n) +
                 static_cast<double>(right_n) *
                     gini(total_ones - left_ones, right_n)) /
                static_cast<double>(total);
            double score = parent - child;
            if (score > best.score + 1e-15) {
                best = {static_cast<int>(f), threshold, score};
            }
        }
    }
    return best;
}

int build_tree(const std::vector<std::vector<double>>& x,
               const std::vector<int>& y, const std::vector<size_t>& idx,
               int depth, int max_depth, std::vector<TreeNode>& nodes) {
    TreeNode node;
    node.leaf_label = majority_label(y, idx);
    int self = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (depth >= max_depth) return self;

    Split split = best_split(x, y, idx);
    if (split.feature < 0 || split.score <= 0.0) return self;

    std::vector<size_t> left, right;
    for (size_t i : idx)
        (x[i][split.feature] <= split.threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return self;

    nodes[self].feature = split.feature;
    nodes[self].threshold = split.threshold;
    int l = build_tree(x, y, left, depth + 1, max_depth, nodes);
    nodes[self].left = l;
    int r = build_tree(x, y, right, depth + 1, max_depth, nodes);
    nodes[self].right = r;
    return self;
}

ForestState train_forest(const std::vector<std::vector<double>>& x,
                         const std::vector<int>& y, int trees, int max_depth,
                         bool bootstrap, uint64_t seed) {
    ForestState forest;
    const size_t n = x.size();
    SplitMix64 rng(seed);
    for (int t = 0; t < trees; ++t) {
        std::vector<size_t> idx(n);
        if (bootstrap)
            for (size_t i = 0; i < n; ++i) idx[i] = rng.bounded(n);
        else
            std::iota(idx.begin(), idx.end(), 0);
        std::vector<TreeNode> nodes;
        build_tree(x, y, idx, 0, max_depth, nodes);
        forest.trees.push_back(std::move(nodes));
    }
    return forest;
}

int tree_predict(const std::vector<TreeNode>& nodes,
                 const std::vector<double>& x) {
    int cur = 0;
    while (nodes[cur].feature >= 0)
        cur = x[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                            : nodes[cur].right;
    return nodes[cur].leaf_label;
}

BayesState train_bayes(const TabularDataset& ds, const Problem& p,
                       double var_floor) {
    BayesState nb;
    std::vector<int64_t> class_rows(2, 0);
    for (int yi : p.y) ++class_rows[yi];
    for (int c = 0; c < 2; ++c)
        nb.log_prior.push_back(std::log(static_cast<double>(class_rows[c]) /
                                        static_cast<double>(p.y.size())));

    for (size_t c : p.feature_columns) {
        const auto& col = ds.columns[c];
        BayesState::ColumnStats stats;
        stats.name = col.name;
        stats.numeric = col.kind == ColumnKind::Numeric;
        stats.class_rows = class_rows;
        if (stats.numeric) {
            stats.mean.assign(2, 0.0);
            stats.variance.assign(2, 0.0);
            for (size_t i = 0; i < ds.rows.size(); ++i)
                stats.mean[p.y[i]] += parse_cell(ds.rows[i][c]);
            for (int k = 0; k < 2; ++k)
                stats.mean[k] /= static_cast<double>(class_rows[k]);
            for (size_t i = 0; i < ds.rows.size(); ++i) {
                double dev = parse_cell(ds.rows[i][c]) - stats.mean[p.y[i]];
                stats.variance[p.y[i]] += dev * dev;
            }
            for (int k = 0; k < 2; ++k) {
                stats.variance[k] /= static_cast<double>(class_rows[k]);
                if (stats.variance[k] < var_floor) stats.variance[k] = var_floor;
            }
        } else {
            stats.counts.assign(2, {});
            for (size_t i = 0; i < ds.rows.size(); ++i)
                ++stats.counts[p.y[i]][ds.rows[i][c]];
        }
        nb.columns.push_back(std::move(stats));
    }
    return nb;
}

double bayes_column_loglik(const BayesState::ColumnStats& stats, int cls,
                           const std::string& cell) {
    if (stats.numeric) {
        double v = parse_cell(cell);
        double var = stats.variance[cls];
        double dev = v - stats.mean[cls];
        return -0.5 * (std::log(2.0 * M_PI * var) + dev * dev / var);
    }
    std::set<std::string> domain;
    for (const auto& per_class : stats.counts)
        for (const auto& [value, count] : per_class) domain.insert(value);
    int64_t count = 0;
    if (auto it = stats.counts[cls].find(cell); it != stats.counts[cls].end())
        count = it->second;
    // Laplace smoothing over the observed domain.
    return std::log(static_cast<double>(count + 1) /
                    static_cast<double>(stats.class_rows[cls] +
                                        static_cast<int64_t>(domain.size()) + 1));
}

}  // namespace

TrainedModel train(const LearnerSpec& spec, const TabularDataset& train_set) {
    if (!is_trainable_classifier(spec.kind))
        throw Error("UNSUPPORTED_KIND",
                    selector::to_string(spec.kind) +
                        " is not a trainable classifier");
    auto params = merge_hyperparameters(spec);
    Problem p = extract_problem(train_set);

    TrainedModel model;
    model.kind = spec.kind;
    model.labels = p.labels;

    if (spec.kind == AlgorithmKind::NaiveBayes) {
        model.state = train_bayes(train_set, p, params.at("var_floor"));
        return model;
    }

    model.encodings = build_encodings(train_set, p);
    auto x = encode_rows(train_set, model.encodings);
    if (spec.kind == AlgorithmKind::Ensemble) {
        model.mean.assign(x[0].size(), 0.0);
        model.scale.assign(x[0].size(), 1.0);
    } else {
        standardize_in_place(x, model.mean, model.scale);
    }

    switch (spec.kind) {
        case AlgorithmKind::LinearSvc:
            model.state = train_linear_svc(x, p.y, params.at("lambda"),
                                           static_cast<int>(params.at("epochs")));
            break;
        case AlgorithmKind::Knn: {
            KnnState knn;
            knn.points = std::move(x);
            knn.labels = p.y;
            knn.k = static_cast<int>(params.at("k"));
            if (knn.k < 1) throw Error("BAD_HYPERPARAMETER", "k must be >= 1");
            model.state = std::move(knn);
            break;
        }
        case AlgorithmKind::RbfSvc:
            model.state = train_rbf_svc(std::move(x), p.y, params.at("lambda"),
                                        static_cast<int>(params.at("epochs")),
                                        params.at("gamma"), spec.seed);
            break;
        case AlgorithmKind::Ensemble:
            model.state = train_forest(x, p.y,
                                       static_cast<int>(params.at("trees")),
                                       static_cast<int>(params.at("max_depth")),
                                       params.at("bootstrap") != 0.0, spec.seed);
            break;
        case AlgorithmKind::SgdClassifier:
            model.state = train_sgd_logistic(x, p.y, params.at("lambda"),
                                             static_cast<int>(params.at("epochs")),
                                             params.at("eta0"), spec.seed);
            break;
        default:
            break;  // unreachable
    }
    return model;
}

std::vector<std::string> predict(const TrainedModel& model,
                                 const TabularDataset& rows) {
    std::vector<int> indices;

    if (model.kind == AlgorithmKind::NaiveBayes) {
        const auto& nb = std::get<BayesState>(model.state);
        std::vector<size_t> cols;
        for (const auto& stats : nb.columns) cols.push_back(rows.column_index(stats.name));
        for (const auto& row : rows.rows) {
            double best = 0.0;
            int best_cls = 0;
            for (int cls = 0; cls < 2; ++cls) {
                double ll = nb.log_prior[cls];
                for (size_t i = 0; i < nb.columns.size(); ++i)
                    ll += bayes_column_loglik(nb.columns[i], cls, row[cols[i]]);
                if (cls == 0 || ll > best) {
                    best = ll;
                    best_cls = cls;
                }
            }
            indices.push_back(best_cls);
        }
    } else {
        auto x = encode_rows(rows, model.encodings);
        apply_standardization(x, model.mean, model.scale);
        switch (model.kind) {
            case AlgorithmKind::LinearSvc:
            case AlgorithmKind::SgdClassifier: {
                const auto& linear = std::get<LinearState>(model.state);
                for (const auto& row : x)
                    indices.push_back(dot(linear.weights, row) >= 0.0 ? 1 : 0);
                break;
            }
            case AlgorithmKind::Knn: {
                const auto& knn = std::get<KnnState>(model.state);
                for (const auto& row : x) {
                    std::vector<std::pair<double, size_t>> dist;
                    dist.reserve(knn.points.size());
                    for (size_t i = 0; i < knn.points.size(); ++i) {
                        double s = 0.0;
                        for (size_t j = 0; j < row.size(); ++j) {
                            double dev = row[j] - knn.points[i][j];
                            s += dev * dev;
                        }
                        dist.push_back({s, i});
                    }
                    size_t k = std::min<size_t>(knn.k, dist.size());
                    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
                    int64_t ones = 0;
                    for (size_t i = 0; i < k; ++i) ones += knn.labels[dist[i].second];
                    // Ties break toward the smaller declared label index.
                    indices.push_back(ones > static_cast<int64_t>(k) - ones ? 1 : 0);
                }
                break;
            }
            case AlgorithmKind::RbfSvc: {
                const auto& kernel = std::get<KernelState>(model.state);
                for (const auto& row : x) {
                    double s = 0.0;
                    for (size_t i = 0; i < kernel.points.size(); ++i) {
                        if (kernel.alpha[i] == 0.0) continue;
                        double yi = kernel.labels[i] == 1 ? 1.0 : -1.0;
                        s += kernel.alpha[i] * yi *
                             rbf_kernel(kernel.points[i], row, kernel.gamma);
                    }
                    indices.push_back(s >= 0.0 ? 1 : 0);
                }
                break;
            }
            case AlgorithmKind::Ensemble: {
                const auto& forest = std::get<ForestState>(model.state);
                for (const auto& row : x) {
                    int64_t ones = 0;
                    for (const auto& tree : forest.trees)
                        ones += tree_predict(tree, row);
                    int64_t zeros = static_cast<int64_t>(forest.trees.size()) - ones;
                    indices.push_back(ones > zeros ? 1 : 0);
                }
                break;
            }
            default:
                throw Error("UNSUPPORTED_KIND", "model kind cannot predict");
        }
    }

    std::vector<std::string> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(model.labels[i]);
    return out;
}

namespace {

json encodings_to_json(const std::vector<ColumnEncoding>& encodings) {
    json arr = json::array();
    for (const auto& e : encodings)
        arr.push_back({{"name", e.name},
                       {"numeric", e.numeric},
                       {"categories", e.categories}});
    return arr;
}

std::vector<ColumnEncoding> encodings_from_json(const json& arr) {
    std::vector<ColumnEncoding> encodings;
    for (const auto& e : arr) {
        ColumnEncoding enc;
        enc.name = e.at("name");
        enc.numeric = e.at("numeric");
        enc.categories = e.at("categories").get<std::vector<std::string>>();
        encodings.push_back(std::move(enc));
    }
    return encodings;
}

}  // namespace

std::string serialize(const TrainedModel& model) {
    json j;
    j["version"] = 1;
    j["kind"] = selector::to_string(model.kind);
    j["labels"] = model.labels;
    j["encodings"] = encodings_to_json(model.encodings);
    j["mean"] = model.mean;
    j["scale"] = model.scale;

    json state;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearState>) {
                state = {{"type", "linear"}, {"weights", s.weights}};
            } else if constexpr (std::is_same_v<T, KnnState>) {
                state = {{"type", "knn"},
                         {"points", s.points},
                         {"labels", s.labels},
                         {"k", s.k}};
            } else if constexpr (std::is_same_v<T, KernelState>) {
                state = {{"type", "kernel"},
                         {"points", s.points},
                         {"labels", s.labels},
                         {"alpha", s.alpha},
                         {"gamma", s.gamma}};
            } else if constexpr (std::is_same_v<T, ForestState>) {
                json trees = json::array();
                for (const auto& tree : s.trees) {
                    json nodes = json::array();
                    for (const auto& n : tree)
                        nodes.push_back({{"feature", n.feature},
                                         {"threshold", n.threshold},
                                         {"left", n.left},
                                         {"right", n.right},
                                         {"leaf_label", n.leaf_label}});
                    trees.push_back(std::move(nodes));
                }
                state = {{"type", "forest"}, {"trees", std::move(trees)}};
            } else if constexpr (std::is_same_v<T, BayesState>) {
                json cols = json::array();
                for (const auto& c : s.columns) {
                    json counts = json::array();
                    for (const auto& per_class : c.counts) {
                        json m = json::object();
                        for (const auto& [k, v] : per_class) m[k] = v;
                        counts.push_back(std::move(m));
                    }
                    cols.push_back({{"name", c.name},
                                    {"numeric", c.numeric},
                                    {"mean", c.mean},
                                    {"variance", c.variance},
                                    {"counts", std::move(counts)},
                                    {"class_rows", c.class_rows}});
                }
                state = {{"type", "bayes"},
                         {"log_prior", s.log_prior},
                         {"columns", std::move(cols)}};
            }
        },
        model.state);
    j["state"] = std::move(state);
    return j.dump(2) + "\n";
}

TrainedModel deserialize(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error("BAD_MODEL_FILE", "model text is not valid JSON");
    if (j.at("version") != 1)
        throw Error("BAD_MODEL_VERSION", "unsupported model version");
    TrainedModel model;
    model.kind = selector::algorithm_from_string(j.at("kind"));
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.encodings = encodings_from_json(j.at("encodings"));
    model.mean = j.at("mean").get<std::vector<double>>();
    model.scale = j.at("scale").get<std::vector<double>>();

    const json& state = j.at("state");
    std::string type = state.at("type");
    if (type == "linear") {
        model.state = LinearState{state.at("weights").get<std::vector<double>>()};
    } else if (type == "knn") {
        KnnState s;
        s.points = state.at("points").get<std::vector<std::vector<double>>>();
        s.labels = state.at("labels").get<std::vector<int>>();
        s.k = state.at("k");
        model.state = std::move(s);
    } else if (type == "kernel") {
        KernelState s;
        s.points = state.at("points").get<std::vector<std::vector<double>>>();
        s.labels = state.at("labels").get<std::vector<int>>();
        s.alpha = state.at("alpha").get<std::vector<double>>();
        s.gamma = state.at("gamma");
        model.state = std::move(s);
    } else if (type == "forest") {
        ForestState s;
        for (const auto& tree : state.at("trees")) {
            std::vector<TreeNode> nodes;
            for (const auto& n : tree)
                nodes.push_back({n.at("feature"), n.at("threshold"), n.at("left"),
                                 n.at("right"), n.at("leaf_label")});
            s.trees.push_back(std::move(nodes));
        }
        model.state = std::move(s);
    } else if (type == "bayes") {
        BayesState s;
        s.log_prior = state.at("log_prior").get<std::vector<double>>();
        for (const auto& c : state.at("columns")) {
            BayesState::ColumnStats stats;
            stats.name = c.at("name");
            stats.numeric = c.at("numeric");
            stats.mean = c.at("mean").get<std::vector<double>>();
            stats.variance = c.at("variance").get<std::vector<double>>();
            for (const auto& per_class : c.at("counts")) {
                std::map<std::string, int64_t> m;
                for (auto it = per_class.begin(); it != per_class.end(); ++it)
                    m[it.key()] = it.value();
                stats.counts.push_back(std::move(m));
            }
            stats.class_rows = c.at("class_rows").get<std::vector<int64_t>>();
            s.columns.push_back(std::move(stats));
        }
        model.state = std::move(s);
    } else {
        throw Error("BAD_MODEL_STATE", "unknown state type '" + type + "'");
    }
    return model;
}

metrics::PredictionSet import_predictions_text(const std::string& text,
                                               const ImportOptions& options) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("EMPTY_FILE", "no header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) header.push_back(cell);
    }
    auto index_of = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error("MISSING_COLUMN", "predictions file lacks column '" + name + "'");
    };
    size_t c_id = index_of("row_id");
    size_t c_true = index_of("y_true");
    size_t c_pred = index_of("y_pred");
    size_t c_group = index_of(options.group_column);

    metrics::PredictionSet set;
    std::set<int64_t> seen_ids;
    std::set<std::string> labels;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != header.size())
            throw Error("RAGGED_ROW", "prediction row has wrong arity");
        int64_t id = std::strtoll(cells[c_id].c_str(), nullptr, 10);
        if (!seen_ids.insert(id).second)
            throw Error("DUPLICATE_ROW_ID",
                        "row_id " + std::to_string(id) + " appears twice");
        labels.insert(cells[c_true]);
        labels.insert(cells[c_pred]);
        set.entries.push_back({id, cells[c_true], cells[c_pred], cells[c_group]});
    }
    if (labels.size() > 2)
        throw Error("NON_BINARY_LABELS",
                    "predictions use " + std::to_string(labels.size()) + " labels");
    set.labels.assign(labels.begin(), labels.end());
    if (options.positive_label) {
        auto it = std::find(set.labels.begin(), set.labels.end(),
                            *options.positive_label);
        if (it == set.labels.end())
            throw Error("UNKNOWN_POSITIVE_LABEL",
                        "'" + *options.positive_label + "' never appears");
        std::rotate(it, it + 1, set.labels.end());  // positive label last
    }
    return set;
}

metrics::PredictionSet import_predictions(const std::string& path,
                                          const ImportOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return import_predictions_text(buf.str(), options);
}

}  // namespace varsel::learners
