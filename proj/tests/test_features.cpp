// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pathloss/features.hpp"

using namespace pathloss;
using Catch::Matchers::WithinAbs;

namespace {

Raster filled(int n, double cellsize, double value) {
    Raster r;
    r.ncols = n;
    r.nrows = n;
    r.cellsize = cellsize;
    r.values.assign(static_cast<std::size_t>(n) * n, value);
    return r;
}

TerrainStack uniform_stack(int n, double cellsize, double ground, double clutter) {
    return make_terrain_stack(filled(n, cellsize, ground + clutter),
                              filled(n, cellsize, clutter));
}

/// Brute-force neighborhood count over every cell of the raster.
std::size_t brute_force_count(const Raster& r, Point center, double radius) {
    std::size_t count = 0;
    for (int row = 0; row < r.nrows; ++row)
        for (int col = 0; col < r.ncols; ++col) {
            const double dx = r.cell_center_x(col) - center.x;
            const double dy = r.cell_center_y(row) - center.y;
            if (dx * dx + dy * dy <= radius * radius && !r.is_nodata(r.at(col, row))) ++count;
        }
    return count;
}

}  // namespace

TEST_CASE("a tiny radius at a cell center selects exactly that cell") {
    const Raster r = filled(9, 5.0, 3.0);
    const Point center{r.cell_center_x(4), r.cell_center_y(4)};
    const auto values = neighbors_within(r, center, 0.5);
    REQUIRE(values.size() == 1);
    CHECK(values[0] == 3.0);
}

TEST_CASE("radius 50 m on a 5 m grid selects 317 cells") {
    const Raster r = filled(41, 5.0, 1.0);
    const Point center{r.cell_center_x(20), r.cell_center_y(20)};
    CHECK(brute_force_count(r, center, 50.0) == 317);
    CHECK(neighbors_within(r, center, 50.0).size() == 317);
}

TEST_CASE("neighborhood counts match the brute force at random centers") {
    Rng rng(13);
    const Raster r = filled(33, 4.0, 0.0);
    for (int i = 0; i < 50; ++i) {
        const Point c{rng.uniform(r.xmin(), r.xmax()), rng.uniform(r.ymin(), r.ymax())};
        const double radius = rng.uniform(3.0, 40.0);
        CHECK(neighbors_within(r, c, radius).size() == brute_force_count(r, c, radius));
    }
}

TEST_CASE("neighborhood values come from the raster") {
    Rng rng(14);
    Raster r = filled(15, 5.0, 0.0);
    for (auto& v : r.values) v = std::floor(rng.uniform(0.0, 100.0));
    const std::multiset<double> all(r.values.begin(), r.values.end());
    const auto values = neighbors_within(r, {r.cell_center_x(7), r.cell_center_y(7)}, 20.0);
    for (double v : values) CHECK(all.count(v) > 0);
}

TEST_CASE("empty neighborhoods are an error") {
    const Raster r = filled(9, 10.0, 1.0);
    // off the cell-center lattice with a radius smaller than half a cell
    CHECK_THROWS_WITH(neighbors_within(r, {10.0, 10.0}, 1.0),
                      Catch::Matchers::ContainsSubstring("no cells"));
}

TEST_CASE("percentile rank interpolation") {
    std::vector<double> v{109, 100, 105, 102, 108, 101, 104, 103, 107, 106};  // 100..109 shuffled
    CHECK_THAT(percentile(v, 0.10), WithinAbs(100.9, 1e-12));
    CHECK_THAT(percentile(v, 0.90), WithinAbs(108.1, 1e-12));
    CHECK_THAT(percentile(v, 0.90) - percentile(v, 0.10), WithinAbs(7.2, 1e-12));
    CHECK(percentile({42.0}, 0.3) == 42.0);
    CHECK(percentile(v, 0.0) == 100.0);
    CHECK(percentile(v, 1.0) == 109.0);
    CHECK_THROWS_AS(percentile({}, 0.5), Error);
    CHECK_THROWS_AS(percentile({1.0}, 1.5), Error);
}

TEST_CASE("flat-field feature arithmetic") {
    const TerrainStack stack = uniform_stack(201, 5.0, 200.0, 0.0);
    TxSite tx{300.0, 300.0, 30.0, {1800.0}, "s"};
    const Point rx{600.0, 700.0};  // offset (300, 400), distance 500
    const FeatureVector fv = compute_features(stack, tx, rx, 1800.0);
    CHECK(fv.freq_mhz == 1800.0);
    CHECK(fv.d_bs == 500.0);
    CHECK(fv.h_bs == 30.0);
    CHECK(fv.h_c == 0.0);
    CHECK(fv.roughness == 0.0);
    CHECK(fv.tx_haat == 30.0);
    CHECK_THAT(fv.alpha, WithinAbs(0.06, 1e-15));
    CHECK_FALSE(fv.blockage.has_value());
}

TEST_CASE("uniform clutter shifts h_c and tx_haat") {
    const TerrainStack stack = uniform_stack(201, 5.0, 200.0, 10.0);
    TxSite tx{300.0, 300.0, 30.0, {1800.0}, "s"};
    const FeatureVector fv = compute_features(stack, tx, {600.0, 700.0}, 1800.0);
    CHECK(fv.h_c == 10.0);
    CHECK(fv.h_bs == 30.0);
    CHECK_THAT(fv.alpha, WithinAbs(0.04, 1e-15));
    CHECK(fv.tx_haat == 20.0);
}

TEST_CASE("sea-level shifts leave every feature unchanged") {
    Rng rng(31);
    Raster ground = filled(41, 5.0, 0.0);
    // dyadic values keep the +50 shift exact in floating point
    for (auto& v : ground.values) v = std::floor(rng.uniform(0.0, 200.0)) * 0.25;
    Raster dhm = filled(41, 5.0, 0.0);
    for (auto& v : dhm.values) v = std::floor(rng.uniform(0.0, 40.0)) * 0.25;
    Raster dsm = ground;
    for (std::size_t i = 0; i < dsm.values.size(); ++i) dsm.values[i] += dhm.values[i];
    const TerrainStack base = make_terrain_stack(dsm, dhm);
    Raster dsm_up = dsm;
    for (auto& v : dsm_up.values) v += 50.0;
    const TerrainStack shifted = make_terrain_stack(dsm_up, dhm);

    TxSite tx{52.5, 52.5, 25.0, {1800.0}, "s"};
    FeatureConfig cfg;
    cfg.radius = 30.0;
    cfg.include_blockage = true;
    // at cell centers the arithmetic is exact, so the shift cancels bitwise
    for (const Point rx : {Point{152.5, 152.5}, Point{62.5, 147.5}, Point{172.5, 57.5}}) {
        const FeatureVector a = compute_features(base, tx, rx, 1800.0, cfg);
        const FeatureVector b = compute_features(shifted, tx, rx, 1800.0, cfg);
        CHECK(a.d_bs == b.d_bs);
        CHECK(a.h_bs == b.h_bs);
        CHECK(a.h_c == b.h_c);
        CHECK(a.roughness == b.roughness);
        CHECK(a.tx_haat == b.tx_haat);
        CHECK(a.alpha == b.alpha);
        REQUIRE(a.blockage.has_value());
        CHECK(*a.blockage == *b.blockage);
    }
    // off the cell-center lattice bilinear weights reorder the rounding, so
    // the invariance holds to tolerance instead
    for (const Point rx : {Point{61.0, 148.0}, Point{170.0, 60.0}}) {
        const FeatureVector a = compute_features(base, tx, rx, 1800.0, cfg);
        const FeatureVector b = compute_features(shifted, tx, rx, 1800.0, cfg);
        CHECK_THAT(a.h_bs - b.h_bs, WithinAbs(0.0, 1e-9));
        CHECK_THAT(a.roughness - b.roughness, WithinAbs(0.0, 1e-9));
        CHECK_THAT(a.alpha - b.alpha, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("alpha times distance equals the height gap") {
    for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
        const TerrainStack stack = generate_synthetic_terrain(seed, 33, 10.0, 25.0, 0.2, 2.0, 15.0);
        Rng rng(seed);
        TxSite tx{165.0, 165.0, 40.0, {1800.0}, "s"};
        for (int i = 0; i < 20; ++i) {
            const Point rx{rng.uniform(40.0, 290.0), rng.uniform(40.0, 290.0)};
            const FeatureVector fv = compute_features(stack, tx, rx, 1800.0);
            CHECK_THAT(fv.alpha * fv.d_bs - (fv.h_bs - fv.h_c), WithinAbs(0.0, 1e-9));
        }
    }
}

TEST_CASE("blockage feature matches the direct computation") {
    const TerrainStack stack = generate_synthetic_terrain(11, 33, 10.0, 15.0, 0.3, 5.0, 20.0);
    TxSite tx{60.0, 60.0, 35.0, {1800.0}, "s"};
    const Point rx{260.0, 250.0};
    FeatureConfig cfg;
    cfg.include_blockage = true;
    const FeatureVector fv = compute_features(stack, tx, rx, 1800.0, cfg);
    REQUIRE(fv.blockage.has_value());
    CHECK(*fv.blockage ==
          blockage_distance(stack, tx, rx, cfg.rx_antenna_m, 1800.0, stack.ground.cellsize));
}

TEST_CASE("receiver on the transmitter is rejected") {
    const TerrainStack stack = uniform_stack(41, 5.0, 100.0, 0.0);
    TxSite tx{100.0, 100.0, 30.0, {1800.0}, "s"};
    CHECK_THROWS_AS(compute_features(stack, tx, {100.0, 100.0}, 1800.0), Error);
}

TEST_CASE("batch features equal independent scalar calls in order") {
    const TerrainStack stack = generate_synthetic_terrain(21, 33, 10.0, 20.0, 0.25, 3.0, 12.0);
    TxSite tx{165.0, 165.0, 40.0, {731.5, 1950.0}, "s"};
    const std::vector<Point> points{{60.0, 60.0}, {240.0, 100.0}, {120.0, 260.0}};
    const std::vector<double> freqs{731.5, 1950.0, 2538.2};
    FeatureConfig cfg;
    cfg.include_blockage = true;
    const auto batch = batch_features(stack, tx, points, freqs, cfg);
    REQUIRE(batch.size() == points.size() * freqs.size());
    for (std::size_t pi = 0; pi < points.size(); ++pi)
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            const auto& got = batch[pi * freqs.size() + fi];
            const FeatureVector want = compute_features(stack, tx, points[pi], freqs[fi], cfg);
            CHECK(got.freq_mhz == freqs[fi]);
            CHECK(got.d_bs == want.d_bs);
            CHECK(got.h_bs == want.h_bs);
            CHECK(got.h_c == want.h_c);
            CHECK(got.roughness == want.roughness);
            CHECK(got.tx_haat == want.tx_haat);
            CHECK(got.alpha == want.alpha);
            CHECK(*got.blockage == *want.blockage);
        }
}

TEST_CASE("batch rejects empty frequency lists") {
    const TerrainStack stack = uniform_stack(17, 10.0, 50.0, 0.0);
    TxSite tx{80.0, 80.0, 30.0, {1800.0}, "s"};
    CHECK_THROWS_WITH(batch_features(stack, tx, {{40.0, 40.0}}, {}, {}),
                      Catch::Matchers::ContainsSubstring("no frequencies"));
}
