// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_DEMO_HPP
#define PATHLOSS_DEMO_HPP

#include <memory>
#include <string>
#include <vector>

#include "pathloss/measurements.hpp"
#include "pathloss/pipeline.hpp"
#include "pathloss/simulate.hpp"
#include "pathloss/terrain.hpp"

namespace pathloss::demo {

// Two bundled environments exercise the full augmentation workflow end to
// end without external data:
//   A - flat farmland-like terrain, SUI terrain-C ground truth
//   B - hilly terrain, COST-231 suburban ground truth
// "Real" data are RSRP logs generated from the site's ground-truth model
// plus 2 dB shadowing and a per-cell offset, so the conversion chain has
// something honest to recover.

struct DemoSite {
    std::shared_ptr<const TerrainStack> stack;
    std::vector<RsrpMeasurement> measurements;
    SiteConfig config;  // stack_mem and measurements_mem already set
};

struct DemoScale {
    int terrain_size = 65;
    double cellsize = 10.0;
    double inset = 20.0;
    double grid_spacing = 12.0;
    int n_measurements = 2000;
    int n_trees = 500;
    int max_depth = 6;
    int min_samples_leaf = 20;
};

inline DemoScale demo_scale(bool quick) {
    DemoScale s;
    if (quick) {
        s.terrain_size = 33;
        s.inset = 15.0;
        s.n_measurements = 400;
        s.n_trees = 150;
        s.max_depth = 5;
        s.min_samples_leaf = 10;
    }
    return s;
}

inline constexpr double demo_freq_low_mhz = 1950.0;   // LTE band 2, earfcn 800
inline constexpr int demo_earfcn_low = 800;
inline constexpr double demo_freq_high_mhz = 2132.5;  // LTE band 4, earfcn 2175
inline constexpr double demo_noise_sigma_db = 2.0;

inline DemoSite make_demo_site(char which, std::uint64_t seed, bool quick) {
    const DemoScale sc = demo_scale(quick);
    const bool flat = which == 'A';
    const std::string name(1, which);
    auto stack = std::make_shared<TerrainStack>(generate_synthetic_terrain(
        derive_seed(seed, "terrain:" + name), sc.terrain_size, sc.cellsize,
        flat ? 3.0 : 70.0, flat ? 0.06 : 0.14, flat ? 4.0 : 5.0, flat ? 9.0 : 15.0));
    const double extent = sc.terrain_size * sc.cellsize;

    DemoSite site;
    site.stack = stack;
    site.config.stack_mem = stack;
    site.config.tx_x = extent / 2.0 - 2.0;
    site.config.tx_y = extent / 2.0 - 8.0;
    site.config.tower_height_m = 45.0;
    site.config.freqs_mhz = {demo_freq_low_mhz, demo_freq_high_mhz};
    site.config.grid.xmin = sc.inset;
    site.config.grid.ymin = sc.inset;
    site.config.grid.xmax = extent - sc.inset;
    site.config.grid.ymax = extent - sc.inset;
    site.config.grid.spacing = sc.grid_spacing;
    if (flat) {
        site.config.model.kind = ModelKind::sui;
        site.config.model.terrain = SuiTerrain::C;
    } else {
        site.config.model.kind = ModelKind::cost231;
        site.config.model.env = Cost231Env::suburban;
    }

    // measurement campaign stand-in: noisy ground truth at random points,
    // one carrier per point, alternating between the two cells
    GridSpec meas_points = site.config.grid;
    meas_points.spacing.reset();
    meas_points.n_points = sc.n_measurements;
    meas_points.seed = derive_seed(seed, "meas-pts:" + name);
    const auto points = generate_grid(meas_points, *stack);
    TxSite tx{site.config.tx_x, site.config.tx_y, site.config.tower_height_m,
              site.config.freqs_mhz, name};
    const double delta_low = flat ? 17.5 : 21.0;
    const double delta_high = flat ? 16.0 : 19.5;
    for (int half = 0; half < 2; ++half) {
        std::vector<Point> subset;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (i % 2 == static_cast<std::size_t>(half)) subset.push_back(points[i]);
        SimulateOptions opt;
        opt.model = site.config.model;
        opt.noise_sigma_db = demo_noise_sigma_db;
        opt.seed = derive_seed(seed, "meas:" + name + ":" + std::to_string(half));
        const double freq = half == 0 ? demo_freq_low_mhz : demo_freq_high_mhz;
        const auto sim = simulate_site(*stack, tx, subset, {freq}, opt);
        for (std::size_t i = 0; i < sim.rows.size(); ++i) {
            RsrpMeasurement m;
            m.x = sim.row_positions[i].x;
            m.y = sim.row_positions[i].y;
            m.rsrp_dbm = -sim.rows[i].pathloss_db + (half == 0 ? delta_low : delta_high);
            if (half == 0)
                m.earfcn = demo_earfcn_low;
            else
                m.freq_mhz = demo_freq_high_mhz;
            m.cell_id = half == 0 ? "c1" : "c2";
            m.site_id = name;
            site.measurements.push_back(std::move(m));
        }
    }
    site.config.measurements_mem = site.measurements;
    return site;
}

inline TrainConfig demo_model_config(bool quick) {
    const DemoScale sc = demo_scale(quick);
    TrainConfig cfg;
    cfg.n_trees = sc.n_trees;
    cfg.max_depth = sc.max_depth;
    cfg.min_samples_leaf = sc.min_samples_leaf;
    return cfg;
}

/// Cross-environment generalization experiment: trains on real A, synthetic
/// B, and their mixture, and evaluates on both real holdouts.
inline ExperimentConfig demo_table_config(std::uint64_t seed, bool quick) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.model_config = demo_model_config(quick);
    cfg.sites["A"] = make_demo_site('A', seed, quick).config;
    cfg.sites["B"] = make_demo_site('B', seed, quick).config;
    cfg.scenarios.push_back({{{"A", 0.5, 1}}, {}});
    cfg.scenarios.push_back({{}, {"B"}});
    cfg.scenarios.push_back({{{"A", 0.5, 1}}, {"B"}});
    cfg.tests.push_back({"A", Source::real});
    cfg.tests.push_back({"B", Source::real});
    return cfg;
}

/// Limited-measurement experiment: 5% of site A's real data against a large
/// synthetic set generated with a deliberately mismatched model (COST-231
/// while the truth behind the measurements is SUI-C). Offsets still convert
/// against the matching SUI-C simulation.
///
/// The sweep's model is configured to pool rather than memorize: leaves must
/// hold more rows than the largest repetition count, otherwise the exact
/// split search isolates each repeated measurement into its own leaf and the
/// correction never reaches held-out locations.
inline TrainConfig demo_sweep_model_config(bool quick) {
    TrainConfig cfg;
    cfg.n_trees = quick ? 150 : 400;
    cfg.max_depth = quick ? 3 : 4;
    cfg.min_samples_leaf = quick ? 40 : 80;
    return cfg;
}

inline ExperimentConfig demo_sweep_config(std::uint64_t seed, bool quick) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.model_config = demo_sweep_model_config(quick);
    DemoSite site = make_demo_site('A', seed, quick);
    site.config.conversion_model = site.config.model;  // SUI-C, matches the truth
    site.config.model.kind = ModelKind::cost231;
    site.config.model.env = Cost231Env::suburban;
    // a coarser synthetic grid keeps the repeated real rows from drowning
    site.config.grid.spacing = 16.0;
    cfg.sites["A"] = site.config;
    cfg.scenarios.push_back({{{"A", 0.05, 1}}, {"A"}});
    cfg.tests.push_back({"A", Source::real});
    return cfg;
}

/// Baseline for the sweep: synthetic-only training, evaluated on the full
/// real dataset of the same site.
inline ExperimentConfig demo_synthetic_only_config(std::uint64_t seed, bool quick) {
    ExperimentConfig cfg = demo_sweep_config(seed, quick);
    cfg.scenarios.clear();
    cfg.scenarios.push_back({{}, {"A"}});
    return cfg;
}

/// File-based variant of the table config for the CLI demo: identical
/// parameters, but sites reference the raster/measurement files the demo
/// command writes into its output directory.
inline ExperimentConfig demo_table_config_paths(std::uint64_t seed, bool quick) {
    ExperimentConfig cfg = demo_table_config(seed, quick);
    for (auto& [name, site] : cfg.sites) {
        const std::string prefix = name == "A" ? "a" : "b";
        site.stack_mem.reset();
        site.measurements_mem.reset();
        site.dsm_path = prefix + "_dsm.asc";
        site.dhm_path = prefix + "_dhm.asc";
        site.measurements_path = prefix + "_measurements.csv";
    }
    return cfg;
}

}  // namespace pathloss::demo

#endif  // PATHLOSS_DEMO_HPP
