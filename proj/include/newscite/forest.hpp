#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscite/error.hpp"
#include "newscite/features.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/rng.hpp"

// Random-forest learner for SC (multi-class) and FC (cost-sensitive binary):
// seeded bagging, per-node uniform feature sampling, class-weighted Gini
// splits at midpoints of observed values, missing values routed to the
// majority branch, class-weighted leaf votes. Deterministic under a fixed
// seed, including the serialized model.

namespace newscite::learn {

using features::is_missing;
using features::NamedFeatures;

// ---------------------------------------------------------------------------
// Dataset

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::string> classes;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;          // index into classes
    std::vector<std::string> groups;  // group id per row; required for FC splits

    void set_classes(std::vector<std::string> cs) { classes = std::move(cs); }

    int class_index(const std::string& label) const {
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == label) return static_cast<int>(i);
        return -1;
    }

    void add_row(const NamedFeatures& f, const std::string& label, const std::string& group = "") {
        if (feature_names.empty()) {
            feature_names = features::names_of(f);
        } else if (feature_names.size() != f.size()) {
            throw Error("feature row width mismatch");
        }
        std::vector<double> values;
        values.reserve(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i].first != feature_names[i])
                throw Error("feature name mismatch at column " + std::to_string(i) + ": expected '" +
                            feature_names[i] + "', got '" + f[i].first + "'");
            values.push_back(f[i].second);
        }
        int idx = class_index(label);
        if (idx < 0) {
            classes.push_back(label);
            idx = static_cast<int>(classes.size()) - 1;
        }
        rows.push_back(std::move(values));
        labels.push_back(idx);
        groups.push_back(group);
    }

    // Column subset by predicate, used for ablation and baseline runs.
    Dataset select_features(const std::function<bool(const std::string&)>& keep) const {
        Dataset out;
        out.classes = classes;
        out.labels = labels;
        out.groups = groups;
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < feature_names.size(); ++i) {
            if (keep(feature_names[i])) {
                cols.push_back(i);
                out.feature_names.push_back(feature_names[i]);
            }
        }
        if (cols.empty()) throw Error("feature selection removed every column");
        out.rows.reserve(rows.size());
        for (const auto& row : rows) {
            std::vector<double> r;
            r.reserve(cols.size());
            for (auto c : cols) r.push_back(row[c]);
            out.rows.push_back(std::move(r));
        }
        return out;
    }

    Dataset subset(const std::vector<std::size_t>& row_ids) const {
        Dataset out;
        out.feature_names = feature_names;
        out.classes = classes;
        for (auto i : row_ids) {
            out.rows.push_back(rows[i]);
            out.labels.push_back(labels[i]);
            out.groups.push_back(groups[i]);
        }
        return out;
    }
};

// Class weights proportional to inverse class frequency, normalized so the
// weights average to one over observed rows.
inline std::vector<double> inverse_frequency_weights(const Dataset& data) {
    std::vector<double> counts(data.classes.size(), 0.0);
    for (int label : data.labels) counts[label] += 1.0;
    const double n = static_cast<double>(data.labels.size());
    const double k = static_cast<double>(data.classes.size());
    std::vector<double> weights(data.classes.size(), 1.0);
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] > 0.0) weights[c] = n / (k * counts[c]);
    return weights;
}

// ---------------------------------------------------------------------------
// Trees and forest

struct ForestParams {
    int n_trees = 100;
    int max_depth = 25;
    int min_leaf = 2;
    int features_per_split = 0;  // 0 -> ceil(sqrt(F))
    std::uint64_t seed = 42;
    bool bootstrap = true;
};

struct DecisionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        bool missing_left = true;
        int left = -1;
        int right = -1;
        std::vector<double> dist;  // leaf class distribution (weighted, normalized)
    };
    std::vector<Node> nodes;

    const std::vector<double>& leaf_for(const std::vector<double>& row) const {
        int at = 0;
        while (nodes[at].feature >= 0) {
            const double v = row[nodes[at].feature];
            const bool go_left = is_missing(v) ? nodes[at].missing_left : v <= nodes[at].threshold;
            at = go_left ? nodes[at].left : nodes[at].right;
        }
        return nodes[at].dist;
    }
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    ForestParams params;
    std::vector<double> class_weights;
    std::vector<std::string> feature_names;
    std::vector<std::string> classes;
    std::string task = "SC";

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const { jsonl::write_json_file(path, to_json()); }
    static RandomForest load(const std::filesystem::path& path) {
        return from_json(jsonl::read_json_file(path));
    }
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    bool missing_left = true;
    double decrease = 0.0;
};

inline double gini(const std::vector<double>& class_weight_sums, double total) {
    if (total <= 0.0) return 0.0;
    double acc = 0.0;
    for (double w : class_weight_sums) {
        const double p = w / total;
        acc += p * p;
    }
    return 1.0 - acc;
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const ForestParams& params, const std::vector<double>& class_weights,
                rng::Rng& rng)
        : data_(data), params_(params), weights_(class_weights), rng_(rng) {}

    DecisionTree build(const std::vector<std::size_t>& row_ids) {
        tree_.nodes.clear();
        grow(row_ids, 0);
        return std::move(tree_);
    }

private:
    int grow(const std::vector<std::size_t>& rows, int depth) {
        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        std::vector<double> counts(data_.classes.size(), 0.0);
        for (auto r : rows) counts[data_.labels[r]] += weights_[data_.labels[r]];
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);

        bool pure = true;
        int first_label = data_.labels[rows.front()];
        for (auto r : rows) {
            if (data_.labels[r] != first_label) {
                pure = false;
                break;
            }
        }

        SplitChoice split;
        if (!pure && depth < params_.max_depth &&
            rows.size() >= 2 * static_cast<std::size_t>(params_.min_leaf)) {
            split = choose_split(rows, counts, total);
        }
        if (!split.found) {
            make_leaf(node_id, counts, total);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            const double v = data_.rows[r][split.feature];
            const bool go_left = is_missing(v) ? split.missing_left : v <= split.threshold;
            (go_left ? left : right).push_back(r);
        }
        if (left.size() < static_cast<std::size_t>(params_.min_leaf) ||
            right.size() < static_cast<std::size_t>(params_.min_leaf)) {
            make_leaf(node_id, counts, total);
            return node_id;
        }
        tree_.nodes[node_id].feature = split.feature;
        tree_.nodes[node_id].threshold = split.threshold;
        tree_.nodes[node_id].missing_left = split.missing_left;
        const int left_id = grow(left, depth + 1);
        const int right_id = grow(right, depth + 1);
        tree_.nodes[node_id].left = left_id;
        tree_.nodes[node_id].right = right_id;
        return node_id;
    }

    void make_leaf(int node_id, const std::vector<double>& counts, double total) {
        auto& node = tree_.nodes[node_id];
        node.feature = -1;
        node.dist.assign(counts.size(), 0.0);
        if (total > 0.0)
            for (std::size_t c = 0; c < counts.size(); ++c) node.dist[c] = counts[c] / total;
    }

    SplitChoice choose_split(const std::vector<std::size_t>& rows, const std::vector<double>& counts,
                             double total) {
        const std::size_t n_features = data_.feature_names.size();
        std::size_t m = params_.features_per_split > 0
                            ? static_cast<std::size_t>(params_.features_per_split)
                            : static_cast<std::size_t>(
                                  std::ceil(std::sqrt(static_cast<double>(n_features))));
        m = std::min(m, n_features);

        // uniform sample of m distinct features, then ascending order so
        // ties resolve toward the lower feature index
        std::vector<int> all(n_features);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + rng_.next_index(n_features - i);
            std::swap(all[i], all[j]);
        }
        std::vector<int> candidates(all.begin(), all.begin() + m);
        std::sort(candidates.begin(), candidates.end());

        const double parent_gini = gini(counts, total);
        SplitChoice best;
        std::vector<std::pair<double, int>> present;  // (value, label)

        for (int f : candidates) {
            present.clear();
            std::vector<double> missing_counts(data_.classes.size(), 0.0);
            double missing_weight = 0.0;
            std::size_t missing_rows = 0;
            for (auto r : rows) {
                const double v = data_.rows[r][f];
                if (is_missing(v)) {
                    missing_counts[data_.labels[r]] += weights_[data_.labels[r]];
                    missing_weight += weights_[data_.labels[r]];
                    ++missing_rows;
                } else {
                    present.emplace_back(v, data_.labels[r]);
                }
            }
            if (present.size() < 2) continue;
            std::sort(present.begin(), present.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (present.front().first == present.back().first) continue;

            std::vector<double> left_counts(data_.classes.size(), 0.0);
            double left_weight = 0.0;
            std::size_t left_rows = 0;
            for (std::size_t i = 0; i + 1 < present.size(); ++i) {
                const auto& [value, label] = present[i];
                left_counts[label] += weights_[label];
                left_weight += weights_[label];
                ++left_rows;
                if (present[i + 1].first == value) continue;  // not a distinct-value boundary

                const double threshold = value + (present[i + 1].first - value) / 2.0;
                const std::size_t right_rows = present.size() - left_rows;
                const double right_weight_present = total - missing_weight - left_weight;
                // missing rows follow the heavier present branch; ties go left
                const bool missing_left = left_weight >= right_weight_present;

                std::vector<double> lc = left_counts;
                double lw = left_weight;
                std::size_t ln = left_rows;
                std::vector<double> rc(data_.classes.size(), 0.0);
                for (std::size_t cidx = 0; cidx < rc.size(); ++cidx)
                    rc[cidx] = counts[cidx] - left_counts[cidx] - missing_counts[cidx];
                double rw = right_weight_present;
                std::size_t rn = right_rows;
                if (missing_left) {
                    for (std::size_t cidx = 0; cidx < lc.size(); ++cidx) lc[cidx] += missing_counts[cidx];
                    lw += missing_weight;
                    ln += missing_rows;
                } else {
                    for (std::size_t cidx = 0; cidx < rc.size(); ++cidx) rc[cidx] += missing_counts[cidx];
                    rw += missing_weight;
                    rn += missing_rows;
                }
                if (ln < static_cast<std::size_t>(params_.min_leaf) ||
                    rn < static_cast<std::size_t>(params_.min_leaf))
                    continue;

                const double decrease =
                    parent_gini - (lw * gini(lc, lw) + rw * gini(rc, rw)) / total;
                if (decrease > best.decrease + 1e-12 || !best.found) {
                    if (decrease <= 1e-12) continue;
                    best.found = true;
                    best.feature = f;
                    best.threshold = threshold;
                    best.missing_left = missing_left;
                    best.decrease = decrease;
                }
            }
        }
        return best;
    }

    const Dataset& data_;
    const ForestParams& params_;
    const std::vector<double>& weights_;
    rng::Rng& rng_;
    DecisionTree tree_;
};

}  // namespace detail

inline RandomForest train_forest(const Dataset& data, const ForestParams& params,
                                 std::vector<double> class_weights = {}, const std::string& task = "SC") {
    if (data.rows.empty()) throw Error("cannot train on an empty dataset");
    for (const auto& row : data.rows)
        if (row.size() != data.feature_names.size()) throw Error("dataset row width mismatch");
    std::set<int> distinct(data.labels.begin(), data.labels.end());
    if (distinct.size() < 2) throw Error("training data contains a single class");
    if (class_weights.empty()) class_weights.assign(data.classes.size(), 1.0);
    if (class_weights.size() != data.classes.size())
        throw Error("class weight vector width mismatch");

    RandomForest forest;
    forest.params = params;
    forest.class_weights = class_weights;
    forest.feature_names = data.feature_names;
    forest.classes = data.classes;
    forest.task = task;

    const std::size_t n = data.rows.size();
    for (int t = 0; t < params.n_trees; ++t) {
        rng::Rng tree_rng(params.seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> row_ids;
        row_ids.reserve(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) row_ids.push_back(tree_rng.next_index(n));
        } else {
            row_ids.resize(n);
            std::iota(row_ids.begin(), row_ids.end(), 0);
        }
        detail::TreeBuilder builder(data, params, class_weights, tree_rng);
        forest.trees.push_back(builder.build(row_ids));
    }
    return forest;
}

struct Prediction {
    int class_index = 0;
    std::vector<double> distribution;
};

inline Prediction predict(const RandomForest& forest, const std::vector<double>& row) {
    if (row.size() != forest.feature_names.size())
        throw Error("prediction row width mismatch: expected " +
                    std::to_string(forest.feature_names.size()) + " features, got " +
                    std::to_string(row.size()));
    Prediction out;
    out.distribution.assign(forest.classes.size(), 0.0);
    for (const auto& tree : forest.trees) {
        const auto& dist = tree.leaf_for(row);
        for (std::size_t c = 0; c < dist.size(); ++c) out.distribution[c] += dist[c];
    }
    const double n = static_cast<double>(forest.trees.size());
    for (auto& v : out.distribution) v /= n;
    out.class_index = 0;
    for (std::size_t c = 1; c < out.distribution.size(); ++c)
        if (out.distribution[c] > out.distribution[out.class_index]) out.class_index = static_cast<int>(c);
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct ClassMetrics {
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    bool precision_defined = true, recall_defined = true;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;  // aligned with the class list
    double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;

    nlohmann::json to_json(const std::vector<std::string>& classes) const {
        nlohmann::json per = nlohmann::json::object();
        for (std::size_t c = 0; c < per_class.size(); ++c) {
            const auto& m = per_class[c];
            per[classes[c]] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                               {"tp", m.tp},               {"fp", m.fp},         {"fn", m.fn}};
        }
        return nlohmann::json{{"per_class", per},
                              {"micro_precision", micro_precision},
                              {"micro_recall", micro_recall},
                              {"micro_f1", micro_f1}};
    }
};

inline MetricsReport compute_metrics(const std::vector<int>& predictions, const std::vector<int>& gold,
                                     std::size_t n_classes) {
    if (predictions.size() != gold.size()) throw Error("prediction/label length mismatch");
    MetricsReport report;
    report.per_class.resize(n_classes);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i], g = gold[i];
        if (p == g) {
            report.per_class[p].tp += 1;
        } else {
            report.per_class[p].fp += 1;
            report.per_class[g].fn += 1;
        }
    }
    long tp = 0, fp = 0, fn = 0;
    for (auto& m : report.per_class) {
        if (m.tp + m.fp == 0) {
            m.precision = 0.0;
            m.precision_defined = false;
        } else {
            m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
        }
        if (m.tp + m.fn == 0) {
            m.recall = 0.0;
            m.recall_defined = false;
        } else {
            m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
        }
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                              : 0.0;
        tp += m.tp;
        fp += m.fp;
        fn += m.fn;
    }
    report.micro_precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    report.micro_recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    report.micro_f1 = (report.micro_precision + report.micro_recall) > 0.0
                          ? 2.0 * report.micro_precision * report.micro_recall /
                                (report.micro_precision + report.micro_recall)
                          : 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Splits

// Group-aware split: every group (statement id) lands entirely on one side.
inline std::pair<Dataset, Dataset> split_fc(const Dataset& data, double fraction, std::uint64_t seed) {
    if (data.rows.empty()) throw Error("cannot split an empty dataset");
    std::vector<std::string> group_ids;
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        auto [it, inserted] = by_group.try_emplace(data.groups[i]);
        if (inserted) group_ids.push_back(data.groups[i]);
        it->second.push_back(i);
    }
    std::sort(group_ids.begin(), group_ids.end());
    rng::Rng r(seed);
    r.shuffle(group_ids);
    std::size_t n_train = static_cast<std::size_t>(fraction * static_cast<double>(group_ids.size()));
    n_train = std::clamp<std::size_t>(n_train, 1, group_ids.size() - (group_ids.size() > 1 ? 1 : 0));
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t g = 0; g < group_ids.size(); ++g) {
        auto& target = g < n_train ? train_rows : test_rows;
        for (auto i : by_group[group_ids[g]]) target.push_back(i);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {data.subset(train_rows), data.subset(test_rows)};
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json RandomForest::to_json() const {
    nlohmann::json trees_json = nlohmann::json::array();
    for (const auto& tree : trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back(nlohmann::json::array(
                {n.feature, n.threshold, n.missing_left ? 1 : 0, n.left, n.right, n.dist}));
        }
        trees_json.push_back(std::move(nodes));
    }
    return nlohmann::json{{"format", "newscite-forest"},
                          {"version", 1},
                          {"task", task},
                          {"params",
                           {{"n_trees", params.n_trees},
                            {"max_depth", params.max_depth},
                            {"min_leaf", params.min_leaf},
                            {"features_per_split", params.features_per_split},
                            {"seed", params.seed},
                            {"bootstrap", params.bootstrap}}},
                          {"class_weights", class_weights},
                          {"feature_names", feature_names},
                          {"classes", classes},
                          {"trees", trees_json}};
}

inline RandomForest RandomForest::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "newscite-forest" || j.value("version", 0) != 1)
        throw Error("not a newscite-forest v1 file");
    RandomForest f;
    f.task = j.at("task").get<std::string>();
    const auto& p = j.at("params");
    f.params.n_trees = p.at("n_trees").get<int>();
    f.params.max_depth = p.at("max_depth").get<int>();
    f.params.min_leaf = p.at("min_leaf").get<int>();
    f.params.features_per_split = p.at("features_per_split").get<int>();
    f.params.seed = p.at("seed").get<std::uint64_t>();
    f.params.bootstrap = p.at("bootstrap").get<bool>();
    f.class_weights = j.at("class_weights").get<std::vector<double>>();
    f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    f.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& tj : j.at("trees")) {
        DecisionTree tree;
        for (const auto& nj : tj) {
            DecisionTree::Node n;
            n.feature = nj.at(0).get<int>();
            n.threshold = nj.at(1).get<double>();
            n.missing_left = nj.at(2).get<int>() != 0;
            n.left = nj.at(3).get<int>();
            n.right = nj.at(4).get<int>();
            n.dist = nj.at(5).get<std::vector<double>>();
            tree.nodes.push_back(std::move(n));
        }
        f.trees.push_back(std::move(tree));
    }
    return f;
}

}  // namespace newscite::learn
