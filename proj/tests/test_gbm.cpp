// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#include <catch2/catch_amalgamated.hpp>

#include "pathloss/gbm.hpp"

using namespace pathloss;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

DataMatrix matrix(std::size_t n_cols, std::vector<double> values) {
    DataMatrix m;
    m.n_cols = n_cols;
    m.n_rows = values.size() / n_cols;
    m.values = std::move(values);
    return m;
}

TrainConfig stump_config() {
    TrainConfig cfg;
    cfg.n_trees = 1;
    cfg.learning_rate = 1.0;
    cfg.max_depth = 1;
    cfg.min_samples_leaf = 1;
    cfg.feature_names = {"x"};
    return cfg;
}

DataMatrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    DataMatrix m;
    m.n_rows = n;
    m.n_cols = p;
    m.values.resize(n * p);
    for (auto& v : m.values) v = rng.uniform(-10.0, 10.0);
    return m;
}

std::vector<double> toy_targets(const DataMatrix& x, double noise_sigma, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i)
        y[i] = 3.0 * x.at(i, 0) - 2.0 * x.at(i, 1) + 0.5 * x.at(i, 0) * x.at(i, 2) +
               (noise_sigma > 0 ? rng.normal(0.0, noise_sigma) : 0.0);
    return y;
}

}  // namespace

TEST_CASE("constant targets are predicted exactly with any config") {
    const DataMatrix x = random_matrix(40, 3, 1);
    const std::vector<double> y(40, 120.0);
    TrainConfig cfg;
    cfg.n_trees = 7;
    cfg.max_depth = 4;
    cfg.min_samples_leaf = 2;
    cfg.feature_names = {"a", "b", "c"};
    const GbmModel model = fit(x, y, cfg);
    CHECK(model.init == 120.0);
    for (std::size_t i = 0; i < x.n_rows; ++i) CHECK(model.predict(x.row(i)) == 120.0);
}

TEST_CASE("the hand-run stump reproduces its training data") {
    const DataMatrix x = matrix(1, {0.0, 0.0, 1.0, 1.0});
    const std::vector<double> y{0.0, 0.0, 10.0, 10.0};
    const GbmModel model = fit(x, y, stump_config());
    CHECK(model.init == 5.0);
    REQUIRE(model.trees.size() == 1);
    REQUIRE(model.trees[0].nodes.size() == 3);
    CHECK(model.trees[0].nodes[0].feature == 0);
    CHECK(model.trees[0].nodes[0].threshold == 0.5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(model.predict(x.row(i)) == y[i]);
    // value below the threshold goes to the left leaf
    const double at_03 = model.predict(std::vector<double>{0.3});
    CHECK(at_03 == 0.0);
}

TEST_CASE("an ensemble with no trees predicts its init") {
    GbmModel model;
    model.init = 42.5;
    model.feature_names = {"x"};
    CHECK(model.predict(std::vector<double>{123.0}) == 42.5);
}

TEST_CASE("prediction is the additive identity over per-tree traversals") {
    const DataMatrix x = random_matrix(120, 4, 2);
    const auto y = toy_targets(x, 1.0, 3);
    TrainConfig cfg;
    cfg.n_trees = 25;
    cfg.max_depth = 3;
    cfg.min_samples_leaf = 4;
    cfg.feature_names = {"a", "b", "c", "d"};
    const GbmModel model = fit(x, y, cfg);
    for (std::size_t i = 0; i < 10; ++i) {
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.predict(x.row(i));
        CHECK(model.predict(x.row(i)) == model.init + cfg.learning_rate * sum);
    }
}

TEST_CASE("training MSE is non-increasing at full subsample") {
    const DataMatrix x = random_matrix(300, 4, 4);
    const auto y = toy_targets(x, 2.0, 5);
    TrainConfig cfg;
    cfg.n_trees = 60;
    cfg.max_depth = 4;
    cfg.min_samples_leaf = 5;
    cfg.feature_names = {"a", "b", "c", "d"};
    FitReport report;
    fit(x, y, cfg, &report);
    REQUIRE(report.train_mse.size() == 60);
    for (std::size_t i = 1; i < report.train_mse.size(); ++i)
        CHECK(report.train_mse[i] <= report.train_mse[i - 1] + 1e-12);
}

TEST_CASE("refitting identical inputs gives a byte-identical model") {
    const DataMatrix x = random_matrix(150, 3, 6);
    const auto y = toy_targets(x, 1.0, 7);
    TrainConfig cfg;
    cfg.n_trees = 30;
    cfg.max_depth = 4;
    cfg.min_samples_leaf = 3;
    cfg.subsample = 0.7;
    cfg.seed = 99;
    cfg.feature_names = {"a", "b", "c"};
    const std::string first = save_model(fit(x, y, cfg));
    const std::string second = save_model(fit(x, y, cfg));
    CHECK(first == second);
    cfg.seed = 100;
    CHECK(save_model(fit(x, y, cfg)) != first);
}

TEST_CASE("a strictly increasing feature transform leaves training predictions unchanged") {
    const DataMatrix x = random_matrix(200, 3, 8);
    const auto y = toy_targets(x, 1.5, 9);
    TrainConfig cfg;
    cfg.n_trees = 40;
    cfg.max_depth = 4;
    cfg.min_samples_leaf = 5;
    cfg.feature_names = {"a", "b", "c"};
    const GbmModel base = fit(x, y, cfg);

    DataMatrix warped = x;
    for (std::size_t i = 0; i < warped.n_rows; ++i) {
        double& v = warped.values[i * warped.n_cols + 1];
        v = v * v * v;  // strictly increasing on all of R
    }
    const GbmModel transformed = fit(warped, y, cfg);
    for (std::size_t i = 0; i < x.n_rows; ++i)
        CHECK_THAT(transformed.predict(warped.row(i)) - base.predict(x.row(i)),
                   WithinAbs(0.0, 1e-9));
}

TEST_CASE("split search respects depth and leaf-size limits") {
    const DataMatrix x = random_matrix(64, 2, 10);
    const auto y = toy_targets(x, 0.0, 0);
    TrainConfig cfg;
    cfg.n_trees = 5;
    cfg.max_depth = 1;
    cfg.min_samples_leaf = 1;
    cfg.feature_names = {"a", "b"};
    for (const auto& tree : fit(x, y, cfg).trees) CHECK(tree.nodes.size() <= 3);

    cfg.min_samples_leaf = 33;  // no split can give both children 33 of 64 rows
    for (const auto& tree : fit(x, y, cfg).trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].is_leaf());
    }
}

TEST_CASE("non-finite inputs are rejected") {
    DataMatrix x = random_matrix(10, 2, 11);
    std::vector<double> y(10, 1.0);
    TrainConfig cfg;
    cfg.feature_names = {"a", "b"};
    cfg.min_samples_leaf = 1;
    x.values[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH(fit(x, y, cfg), ContainsSubstring("non-finite feature"));
    x.values[5] = 0.0;
    y[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH(fit(x, y, cfg), ContainsSubstring("non-finite target"));
    y[3] = 0.0;
    CHECK_THROWS_AS(fit(matrix(2, {1.0, 2.0}), {1.0}, cfg), Error);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.feature_names = {"a"};
    cfg.n_trees = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg.n_trees = 1;
    cfg.learning_rate = 1.5;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg.learning_rate = 0.1;
    cfg.subsample = 0.0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg.subsample = 1.0;
    cfg.feature_names = {"a", "a"};
    CHECK_THROWS_WITH(validate(cfg), ContainsSubstring("duplicate feature"));
}

TEST_CASE("mae arithmetic and guards") {
    CHECK(mae(std::vector<double>{100.0, 110.0}, std::vector<double>{102.0, 106.0}) == 3.0);
    CHECK(mae(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 2.0, 3.0}) == 0.0);
    std::vector<double> a{100.0, 110.0, 95.5};
    std::vector<double> b{102.0, 106.0, 99.25};
    std::vector<double> a_shift = a, b_shift = b;
    for (auto& v : a_shift) v += 17.5;
    for (auto& v : b_shift) v += 17.5;
    CHECK(mae(a, b) == mae(a_shift, b_shift));
    CHECK_THROWS_AS(mae(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("model JSON round-trips predictions exactly") {
    const DataMatrix x = random_matrix(100, 3, 12);
    const auto y = toy_targets(x, 1.0, 13);
    TrainConfig cfg;
    cfg.n_trees = 20;
    cfg.max_depth = 5;
    cfg.min_samples_leaf = 2;
    cfg.feature_names = {"a", "b", "c"};
    const GbmModel model = fit(x, y, cfg);
    const std::string text = save_model(model);
    const GbmModel loaded = load_model(text);
    CHECK(loaded.feature_names == model.feature_names);
    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> row{rng.uniform(-12.0, 12.0), rng.uniform(-12.0, 12.0),
                                      rng.uniform(-12.0, 12.0)};
        CHECK(loaded.predict(row) == model.predict(row));
    }
    CHECK(save_model(loaded) == text);
}

TEST_CASE("model JSON failure modes") {
    const std::string good = save_model(fit(matrix(1, {0.0, 1.0}), {0.0, 1.0}, stump_config()));
    CHECK_THROWS_WITH(load_model(good.substr(0, good.size() / 2)),
                      ContainsSubstring("parse error at byte"));
    auto doc = nlohmann::json::parse(good);
    doc["version"] = 999;
    CHECK_THROWS_WITH(load_model(doc.dump()), ContainsSubstring("incompatible model version"));
    doc = nlohmann::json::parse(good);
    doc.erase("init");
    CHECK_THROWS_WITH(load_model(doc.dump()), ContainsSubstring("schema"));
}

TEST_CASE("subsampled trees still reduce held-out error") {
    const DataMatrix train = random_matrix(400, 3, 15);
    const auto y_train = toy_targets(train, 1.0, 16);
    const DataMatrix test = random_matrix(200, 3, 17);
    const auto y_test = toy_targets(test, 1.0, 18);
    TrainConfig cfg;
    cfg.n_trees = 80;
    cfg.max_depth = 4;
    cfg.min_samples_leaf = 5;
    cfg.subsample = 0.6;
    cfg.seed = 5;
    cfg.feature_names = {"a", "b", "c"};
    const GbmModel model = fit(train, y_train, cfg);
    std::vector<double> baseline(y_test.size(), model.init);
    CHECK(mae(predict_all(model, test), y_test) < 0.6 * mae(baseline, y_test));
}
