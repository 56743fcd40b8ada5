// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_GBM_HPP
#define PATHLOSS_GBM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathloss/common.hpp"

namespace pathloss {

// ---------------------------------------------------------------------------
// Data layout
// ---------------------------------------------------------------------------

/// Dense row-major feature matrix.
struct DataMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;

    double at(std::size_t row, std::size_t col) const { return values[row * n_cols + col]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * n_cols, n_cols);
    }
};

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

struct TrainConfig {
    int n_trees = 500;
    double learning_rate = 0.1;
    int max_depth = 6;
    int min_samples_leaf = 20;
    double subsample = 1.0;
    std::uint64_t seed = 0;
    std::vector<std::string> feature_names;
};

inline void validate(const TrainConfig& cfg) {
    require(cfg.n_trees >= 1, "train config: n_trees must be >= 1");
    require(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0,
            "train config: learning_rate must be in (0, 1]");
    require(cfg.max_depth >= 1, "train config: max_depth must be >= 1");
    require(cfg.min_samples_leaf >= 1, "train config: min_samples_leaf must be >= 1");
    require(cfg.subsample > 0.0 && cfg.subsample <= 1.0,
            "train config: subsample must be in (0, 1]");
    require(!cfg.feature_names.empty(), "train config: feature_names must not be empty");
    for (std::size_t i = 0; i < cfg.feature_names.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.feature_names.size(); ++j)
            require(cfg.feature_names[i] != cfg.feature_names[j],
                    "train config: duplicate feature name '" + cfg.feature_names[i] + "'");
}

/// Internal node (feature >= 0) or leaf (feature < 0). Traversal sends
/// value < threshold left, >= threshold right.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const {
        int idx = 0;
        while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
            const auto& nd = nodes[static_cast<std::size_t>(idx)];
            idx = row[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(idx)].leaf;
    }
};

/// Additive ensemble: prediction = init + learning_rate * sum of tree outputs.
struct GbmModel {
    double init = 0.0;
    double learning_rate = 0.1;
    std::vector<std::string> feature_names;
    std::vector<RegressionTree> trees;

    double predict(std::span<const double> row) const {
        require(row.size() == feature_names.size(),
                "predict: row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(feature_names.size()));
        double sum = 0.0;
        for (const auto& tree : trees) sum += tree.predict(row);
        return init + learning_rate * sum;
    }
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct FitReport {
    std::vector<double> train_mse;  // after each boosting iteration
};

namespace detail {

struct TreeBuilder {
    const DataMatrix& x;
    const std::vector<double>& residual;
    const TrainConfig& cfg;
    std::vector<TreeNode> nodes;
    std::vector<char> side;  // per global row: 1 = left child of the split in flight

    // node_lists[f] holds the node's rows sorted by feature f; rows holds the
    // same set ascending by row id, which is the summation order everywhere
    // (it is invariant under monotone feature transforms).
    int build(std::vector<std::vector<std::uint32_t>>& node_lists,
              std::vector<std::uint32_t>& rows, int depth) {
        const std::size_t n_node = rows.size();
        double node_sum = 0.0;
        for (std::uint32_t r : rows) node_sum += residual[r];

        const int node_index = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes.back().leaf = node_sum / static_cast<double>(n_node);
        if (depth >= cfg.max_depth ||
            n_node < 2 * static_cast<std::size_t>(cfg.min_samples_leaf))
            return node_index;

        // Exact greedy search: enumerate boundaries between consecutive
        // distinct sorted values. Gain ties resolve to the lowest feature
        // index, then the lowest sorted-rank position (first found wins).
        const double base = node_sum * node_sum / static_cast<double>(n_node);
        double best_gain = 0.0;
        int best_feature = -1;
        std::size_t best_pos = 0;
        const auto min_leaf = static_cast<std::size_t>(cfg.min_samples_leaf);
        for (std::size_t f = 0; f < x.n_cols; ++f) {
            const auto& idx = node_lists[f];
            double prefix = 0.0;
            for (std::size_t k = 1; k < n_node; ++k) {
                prefix += residual[idx[k - 1]];
                if (x.at(idx[k - 1], f) == x.at(idx[k], f)) continue;
                if (k < min_leaf || n_node - k < min_leaf) continue;
                const double right_sum = node_sum - prefix;
                const double gain = prefix * prefix / static_cast<double>(k) +
                                    right_sum * right_sum / static_cast<double>(n_node - k) -
                                    base;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_pos = k;
                }
            }
        }
        if (best_feature < 0) return node_index;

        const auto& split_list = node_lists[static_cast<std::size_t>(best_feature)];
        const double lo = x.at(split_list[best_pos - 1], static_cast<std::size_t>(best_feature));
        const double hi = x.at(split_list[best_pos], static_cast<std::size_t>(best_feature));
        double threshold = (lo + hi) / 2.0;
        if (!(threshold > lo)) threshold = hi;  // adjacent doubles can round the midpoint down

        for (std::size_t k = 0; k < n_node; ++k) side[split_list[k]] = k < best_pos ? 1 : 0;

        std::vector<std::vector<std::uint32_t>> left_lists(x.n_cols), right_lists(x.n_cols);
        for (std::size_t f = 0; f < x.n_cols; ++f) {
            left_lists[f].reserve(best_pos);
            right_lists[f].reserve(n_node - best_pos);
            for (std::uint32_t r : node_lists[f])
                (side[r] ? left_lists[f] : right_lists[f]).push_back(r);
            node_lists[f].clear();
            node_lists[f].shrink_to_fit();
        }
        std::vector<std::uint32_t> left_rows, right_rows;
        left_rows.reserve(best_pos);
        right_rows.reserve(n_node - best_pos);
        for (std::uint32_t r : rows) (side[r] ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        nodes[static_cast<std::size_t>(node_index)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_index)].threshold = threshold;
        const int left_child = build(left_lists, left_rows, depth + 1);
        const int right_child = build(right_lists, right_rows, depth + 1);
        nodes[static_cast<std::size_t>(node_index)].left = left_child;
        nodes[static_cast<std::size_t>(node_index)].right = right_child;
        return node_index;
    }
};

}  // namespace detail

/// Least-squares gradient boosting with exact split enumeration. Deterministic
/// for a fixed (data, config) pair: subsampling derives from config.seed and
/// tie-breaking is by rank, not threshold value.
inline GbmModel fit(const DataMatrix& x, const std::vector<double>& y, const TrainConfig& cfg,
                    FitReport* report = nullptr) {
    validate(cfg);
    require(x.n_rows >= 2, "fit: need at least 2 rows");
    require(x.n_rows == y.size(), "fit: feature/target row counts differ");
    require(x.n_cols == cfg.feature_names.size(),
            "fit: matrix has " + std::to_string(x.n_cols) + " columns, config names " +
                std::to_string(cfg.feature_names.size()));
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        require(std::isfinite(y[i]), "fit: non-finite target at row " + std::to_string(i));
        for (std::size_t j = 0; j < x.n_cols; ++j)
            require(std::isfinite(x.at(i, j)), "fit: non-finite feature at row " +
                                                   std::to_string(i) + ", column '" +
                                                   cfg.feature_names[j] + "'");
    }

    GbmModel model;
    model.learning_rate = cfg.learning_rate;
    model.feature_names = cfg.feature_names;
    model.init = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

    const std::size_t n = x.n_rows;
    std::vector<double> pred(n, model.init);
    std::vector<double> residual(n, 0.0);

    // One global argsort per feature; each tree filters it by its subsample,
    // which keeps per-node lists sorted without re-sorting.
    std::vector<std::vector<std::uint32_t>> presorted(x.n_cols);
    for (std::size_t f = 0; f < x.n_cols; ++f) {
        auto& idx = presorted[f];
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double va = x.at(a, f), vb = x.at(b, f);
            return va < vb || (va == vb && a < b);
        });
    }

    detail::TreeBuilder builder{x, residual, cfg, {}, std::vector<char>(n, 0)};
    std::vector<char> in_tree(n, 1);
    const auto sample_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));

    for (int t = 0; t < cfg.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];

        if (cfg.subsample < 1.0) {
            std::vector<std::uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0u);
            Rng rng(derive_seed(cfg.seed, "tree:" + std::to_string(t)));
            rng.shuffle(order);
            std::fill(in_tree.begin(), in_tree.end(), 0);
            for (std::size_t i = 0; i < sample_size; ++i) in_tree[order[i]] = 1;
        }

        std::vector<std::vector<std::uint32_t>> root_lists(x.n_cols);
        for (std::size_t f = 0; f < x.n_cols; ++f) {
            root_lists[f].reserve(sample_size);
            for (std::uint32_t r : presorted[f])
                if (in_tree[r]) root_lists[f].push_back(r);
        }
        std::vector<std::uint32_t> root_rows;
        root_rows.reserve(sample_size);
        for (std::uint32_t r = 0; r < n; ++r)
            if (in_tree[r]) root_rows.push_back(r);

        builder.nodes.clear();
        builder.build(root_lists, root_rows, 0);
        model.trees.push_back(RegressionTree{builder.nodes});

        const auto& tree = model.trees.back();
        parallel_for(n, [&](std::size_t i) {
            pred[i] += cfg.learning_rate * tree.predict(x.row(i));
        });
        if (report) {
            double mse = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = y[i] - pred[i];
                mse += e * e;
            }
            report->train_mse.push_back(mse / static_cast<double>(n));
        }
    }
    return model;
}

inline std::vector<double> predict_all(const GbmModel& model, const DataMatrix& x) {
    require(x.n_cols == model.feature_names.size(),
            "predict: matrix has " + std::to_string(x.n_cols) + " columns, model expects " +
                std::to_string(model.feature_names.size()));
    std::vector<double> out(x.n_rows, 0.0);
    parallel_for(x.n_rows, [&](std::size_t i) { out[i] = model.predict(x.row(i)); });
    return out;
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

/// Mean absolute error between predicted and true pathloss.
inline double mae(std::span<const double> predicted, std::span<const double> truth) {
    require(predicted.size() == truth.size(), "mae: length mismatch (" +
                                                  std::to_string(predicted.size()) + " vs " +
                                                  std::to_string(truth.size()) + ")");
    require(!predicted.empty(), "mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::fabs(truth[i] - predicted[i]);
    return sum / static_cast<double>(predicted.size());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline constexpr int gbm_model_version = 1;

inline std::string save_model(const GbmModel& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& nd : tree.nodes) {
            if (nd.is_leaf())
                nodes.push_back({{"leaf", nd.leaf}});
            else
                nodes.push_back(
                    {{"f", nd.feature}, {"t", nd.threshold}, {"l", nd.left}, {"r", nd.right}});
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    const nlohmann::json doc{{"version", gbm_model_version},
                             {"init", model.init},
                             {"learning_rate", model.learning_rate},
                             {"feature_names", model.feature_names},
                             {"trees", std::move(trees)}};
    return doc.dump(2) + "\n";
}

inline GbmModel load_model(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("model JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    try {
        const int version = doc.at("version").get<int>();
        if (version != gbm_model_version)
            throw Error("incompatible model version " + std::to_string(version) + ", expected " +
                        std::to_string(gbm_model_version));
        GbmModel model;
        model.init = doc.at("init").get<double>();
        model.learning_rate = doc.at("learning_rate").get<double>();
        model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        require(!model.feature_names.empty(), "model JSON: empty feature_names");
        for (const auto& jt : doc.at("trees")) {
            RegressionTree tree;
            for (const auto& jn : jt.at("nodes")) {
                TreeNode nd;
                if (jn.contains("leaf")) {
                    nd.leaf = jn.at("leaf").get<double>();
                } else {
                    nd.feature = jn.at("f").get<int>();
                    nd.threshold = jn.at("t").get<double>();
                    nd.left = jn.at("l").get<int>();
                    nd.right = jn.at("r").get<int>();
                    require(nd.feature >= 0 &&
                                nd.feature < static_cast<int>(model.feature_names.size()),
                            "model JSON: node feature index out of range");
                }
                tree.nodes.push_back(nd);
            }
            require(!tree.nodes.empty(), "model JSON: tree with no nodes");
            for (const auto& nd : tree.nodes)
                if (!nd.is_leaf())
                    require(nd.left >= 0 && nd.right >= 0 &&
                                nd.left < static_cast<int>(tree.nodes.size()) &&
                                nd.right < static_cast<int>(tree.nodes.size()),
                            "model JSON: child index out of range");
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model JSON schema error: ") + e.what());
    }
}

}  // namespace pathloss

#endif  // PATHLOSS_GBM_HPP
