// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#include <catch2/catch_amalgamated.hpp>

#include "pathloss/raster.hpp"

using namespace pathloss;

namespace {

Raster make_raster(int ncols, int nrows, double cellsize, std::vector<double> values,
                   double xll = 0.0, double yll = 0.0) {
    Raster r;
    r.ncols = ncols;
    r.nrows = nrows;
    r.xll = xll;
    r.yll = yll;
    r.cellsize = cellsize;
    r.values = std::move(values);
    validate(r);
    return r;
}

Raster constant_raster(int ncols, int nrows, double cellsize, double value) {
    return make_raster(ncols, nrows, cellsize,
                       std::vector<double>(static_cast<std::size_t>(ncols) * nrows, value));
}

}  // namespace

TEST_CASE("2x2 grid maps the first body value to the north-west cell") {
    const std::string text =
        "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n"
        "1 2\n3 4\n";
    const Raster r = load_ascii_grid(text);
    CHECK(r.ncols == 2);
    CHECK(r.nrows == 2);
    CHECK(r.nodata == -9999.0);
    // north-west cell center is (2.5, 7.5)
    CHECK(sample(r, 2.5, 7.5, SampleMode::nearest) == 1.0);
    CHECK(sample(r, 7.5, 7.5, SampleMode::nearest) == 2.0);
    CHECK(sample(r, 2.5, 2.5, SampleMode::nearest) == 3.0);
    CHECK(sample(r, 7.5, 2.5, SampleMode::nearest) == 4.0);
}

TEST_CASE("header keys are case-insensitive and NODATA is honored") {
    const std::string text =
        "NCOLS 2\nNROWS 2\nXLLCORNER 1\nYLLCORNER 2\nCELLSIZE 5\nNODATA_VALUE -1\n"
        "1 2 3 4\n";
    const Raster r = load_ascii_grid(text);
    CHECK(r.xll == 1.0);
    CHECK(r.nodata == -1.0);
}

TEST_CASE("missing required key is reported") {
    const std::string text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\n1 2 3 4\n";
    CHECK_THROWS_WITH(load_ascii_grid(text),
                      Catch::Matchers::ContainsSubstring("missing required key"));
}

TEST_CASE("body errors carry line numbers") {
    const std::string base = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n";
    CHECK_THROWS_WITH(load_ascii_grid(base + "1 2\n3 oops\n"),
                      Catch::Matchers::ContainsSubstring("line 7"));
    CHECK_THROWS_WITH(load_ascii_grid(base + "1 2 3\n"),
                      Catch::Matchers::ContainsSubstring("wrong value count"));
    CHECK_THROWS_WITH(load_ascii_grid(base + "1 2 3 4 5\n"),
                      Catch::Matchers::ContainsSubstring("too many values"));
    CHECK_THROWS_WITH(load_ascii_grid("ncols 2\nwible 3\n"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
}

TEST_CASE("load-save-load is a fixpoint") {
    const std::string text =
        "ncols 3\nnrows 2\nxllcorner -12.25\nyllcorner 7.125\ncellsize 1.524\n"
        "NODATA_value -9999\n"
        "0.1 2000.25 -9999\n17 0.333333333333333314829616256247390992939472198486328125 4\n";
    const Raster first = load_ascii_grid(text);
    const Raster second = load_ascii_grid(save_ascii_grid(first));
    CHECK(second.ncols == first.ncols);
    CHECK(second.nrows == first.nrows);
    CHECK(second.xll == first.xll);
    CHECK(second.yll == first.yll);
    CHECK(second.cellsize == first.cellsize);
    CHECK(second.nodata == first.nodata);
    CHECK(second.values == first.values);
    CHECK(save_ascii_grid(second) == save_ascii_grid(first));
}

TEST_CASE("bilinear on a constant raster returns the constant everywhere") {
    const Raster r = constant_raster(8, 6, 5.0, 200.0);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(r.xmin(), r.xmax());
        const double y = rng.uniform(r.ymin(), r.ymax());
        CHECK(sample(r, x, y, SampleMode::bilinear) == 200.0);
    }
}

TEST_CASE("cell-center samples reproduce stored values in both modes") {
    Rng rng(11);
    std::vector<double> values(7 * 5);
    for (auto& v : values) v = rng.uniform(-100.0, 400.0);
    const Raster r = make_raster(7, 5, 2.5, values, 100.0, -40.0);
    for (int row = 0; row < r.nrows; ++row)
        for (int col = 0; col < r.ncols; ++col) {
            const double x = r.cell_center_x(col);
            const double y = r.cell_center_y(row);
            CHECK(sample(r, x, y, SampleMode::nearest) == r.at(col, row));
            CHECK_THAT(sample(r, x, y, SampleMode::bilinear),
                       Catch::Matchers::WithinRel(r.at(col, row), 1e-9));
        }
}

TEST_CASE("bilinear midpoint of a 0-10 ramp is 5") {
    // two adjacent cells 0 and 10; midpoint between their centers
    const Raster r = make_raster(2, 2, 10.0, {0.0, 10.0, 0.0, 10.0});
    CHECK_THAT(sample(r, 10.0, 10.0, SampleMode::bilinear),
               Catch::Matchers::WithinAbs(5.0, 1e-12));
}

TEST_CASE("out-of-bounds and nodata queries fail") {
    Raster r = constant_raster(4, 4, 10.0, 1.0);
    CHECK_THROWS_WITH(sample(r, -0.1, 5.0, SampleMode::nearest),
                      Catch::Matchers::ContainsSubstring("outside"));
    CHECK_THROWS_WITH(sample(r, 5.0, 40.1, SampleMode::bilinear),
                      Catch::Matchers::ContainsSubstring("outside"));
    r.at(1, 1) = r.nodata;  // center (15, 25)
    CHECK_THROWS_WITH(sample(r, 15.0, 25.0, SampleMode::nearest),
                      Catch::Matchers::ContainsSubstring("nodata"));
    CHECK_THROWS_WITH(sample(r, 15.0, 25.0, SampleMode::bilinear),
                      Catch::Matchers::ContainsSubstring("nodata"));
}

TEST_CASE("a nodata neighbor degrades bilinear to nearest") {
    Raster r = constant_raster(4, 4, 10.0, 7.0);
    r.at(2, 1) = 100.0;
    r.at(1, 1) = r.nodata;  // neighbor of the query below
    // query between cells (1,2) and (2,2) and rows 1-2; containing cell (2,2)=7
    const double v = sample(r, 22.0, 18.0, SampleMode::bilinear);
    CHECK(v == 7.0);
}

TEST_CASE("edge margin degrades to nearest") {
    const Raster r = make_raster(2, 2, 10.0, {1.0, 2.0, 3.0, 4.0});
    // within the outer half-cell ring there is no 4-neighborhood
    CHECK(sample(r, 1.0, 1.0, SampleMode::bilinear) == 3.0);
    CHECK(sample(r, 19.5, 19.9, SampleMode::bilinear) == 2.0);
}

TEST_CASE("raster invariants are enforced") {
    CHECK_THROWS_AS(make_raster(1, 2, 5.0, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(make_raster(2, 2, 0.0, {1.0, 2.0, 3.0, 4.0}), Error);
    CHECK_THROWS_AS(make_raster(2, 2, 5.0, {1.0, 2.0, 3.0}), Error);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_raster(2, 2, 5.0, {1.0, 2.0, 3.0, inf}), Error);
}
