// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_SIMULATE_HPP
#define PATHLOSS_SIMULATE_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pathloss/common.hpp"
#include "pathloss/dataset.hpp"
#include "pathloss/features.hpp"
#include "pathloss/propagation.hpp"
#include "pathloss/terrain.hpp"

namespace pathloss {

// ---------------------------------------------------------------------------
// Receiver grids
// ---------------------------------------------------------------------------

/// Receiver layout over an area: a regular lattice (spacing) or seeded
/// uniform random points (n_points). Exactly one of the two must be set.
struct GridSpec {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
    std::optional<double> spacing;  // meters, lattice mode
    std::optional<int> n_points;    // random mode
    std::uint64_t seed = 0;
};

inline void validate(const GridSpec& spec) {
    require(spec.xmax > spec.xmin && spec.ymax > spec.ymin, "grid bounds are degenerate");
    require(spec.spacing.has_value() != spec.n_points.has_value(),
            "grid spec must set exactly one of spacing / n_points");
    if (spec.spacing) require(*spec.spacing > 0.0, "grid spacing must be positive");
    if (spec.n_points) require(*spec.n_points > 0, "grid n_points must be positive");
}

/// Lattice points row-major from (xmin, ymin), or seeded uniform points.
/// Points whose containing DSM cell is nodata are discarded and counted.
inline std::vector<Point> generate_grid(const GridSpec& spec, const TerrainStack& stack,
                                        int* dropped_nodata = nullptr) {
    validate(spec);
    const Raster& dsm = stack.dsm;
    require(spec.xmin >= dsm.xmin() && spec.xmax <= dsm.xmax() && spec.ymin >= dsm.ymin() &&
                spec.ymax <= dsm.ymax(),
            "grid bounds extend outside the raster");

    std::vector<Point> candidates;
    if (spec.spacing) {
        const double s = *spec.spacing;
        const double tol = 1e-9 * std::max(1.0, std::max(spec.xmax - spec.xmin,
                                                         spec.ymax - spec.ymin));
        const auto nx = static_cast<int>(std::floor((spec.xmax - spec.xmin + tol) / s));
        const auto ny = static_cast<int>(std::floor((spec.ymax - spec.ymin + tol) / s));
        candidates.reserve(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1));
        for (int iy = 0; iy <= ny; ++iy)
            for (int ix = 0; ix <= nx; ++ix)
                candidates.push_back({spec.xmin + ix * s, spec.ymin + iy * s});
    } else {
        Rng rng(derive_seed(spec.seed, "grid"));
        candidates.reserve(static_cast<std::size_t>(*spec.n_points));
        for (int i = 0; i < *spec.n_points; ++i) {
            const double x = rng.uniform(spec.xmin, spec.xmax);
            const double y = rng.uniform(spec.ymin, spec.ymax);
            candidates.push_back({x, y});
        }
    }

    std::vector<Point> points;
    points.reserve(candidates.size());
    int dropped = 0;
    for (const auto& p : candidates) {
        if (dsm.is_nodata(dsm.at(dsm.col_of(p.x), dsm.row_of(p.y))))
            ++dropped;
        else
            points.push_back(p);
    }
    if (dropped_nodata) *dropped_nodata = dropped;
    require(!points.empty(), "grid is empty after discarding nodata points");
    return points;
}

// ---------------------------------------------------------------------------
// Site simulation
// ---------------------------------------------------------------------------

struct SimulateOptions {
    ModelParams model;
    double radius_m = 50.0;
    bool include_blockage = false;
    double rx_antenna_m = 1.5;     // enters slant distance and blockage only
    double noise_sigma_db = 0.0;   // optional log-normal shadowing, dB
    std::uint64_t seed = 0;        // shadowing sub-seed base
};

struct SimulatedSite {
    std::vector<DatasetRow> rows;          // point-major, then frequency
    std::vector<Point> row_positions;      // receiver position of each row
    int dropped_below_reference = 0;       // points under SUI's 100 m floor
    int domain_warnings = 0;               // out-of-domain model evaluations
};

/// Evaluates the propagation model and features at every (point, frequency).
/// Rows are emitted point-major in the input order regardless of the worker
/// count; optional shadowing noise is applied in that order afterwards.
inline SimulatedSite simulate_site(const TerrainStack& stack, const TxSite& tx,
                                   const std::vector<Point>& grid,
                                   const std::vector<double>& freqs,
                                   const SimulateOptions& opt) {
    validate(tx);
    require(!grid.empty(), "simulate_site: empty grid");
    require(!freqs.empty(), "simulate_site: no frequencies");

    SimulatedSite result;
    std::vector<Point> points;
    points.reserve(grid.size());
    if (opt.model.kind == ModelKind::sui) {
        for (const auto& p : grid) {
            if (distance_2d(p, tx.position()) < sui_reference_distance_m)
                ++result.dropped_below_reference;
            else
                points.push_back(p);
        }
        require(!points.empty(),
                "simulate_site: every grid point is below the SUI reference distance");
    } else {
        points = grid;
    }

    FeatureConfig fcfg;
    fcfg.radius = opt.radius_m;
    fcfg.include_blockage = opt.include_blockage;
    fcfg.rx_antenna_m = opt.rx_antenna_m;
    const auto ctx = detail::make_tx_context(stack, tx, opt.radius_m);

    const std::size_t n_rows = points.size() * freqs.size();
    result.rows.resize(n_rows);
    result.row_positions.resize(n_rows);
    std::vector<int> warn_flags(points.size(), 0);

    parallel_for(points.size(), [&](std::size_t pi) {
        const Point rx = points[pi];
        const double rx_ground = sample(stack.ground, rx.x, rx.y, SampleMode::bilinear);
        int warns = 0;
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            DatasetRow row;
            row.site_id = tx.site_id;
            row.source = Source::synthetic;
            row.fv = detail::compute_features_with_context(stack, tx, ctx, rx, freqs[fi], fcfg);
            LinkGeometry geom;
            geom.tx_antenna_asl = ctx.antenna_asl;
            geom.rx_antenna_asl = rx_ground + opt.rx_antenna_m;
            geom.distance_2d = row.fv.d_bs;
            geom.freq_mhz = freqs[fi];
            bool warn = false;
            row.pathloss_db =
                model_pathloss(opt.model, geom, tx.tower_height, opt.rx_antenna_m, &warn);
            if (warn) ++warns;
            result.rows[pi * freqs.size() + fi] = std::move(row);
            result.row_positions[pi * freqs.size() + fi] = rx;
        }
        warn_flags[pi] = warns;
    });
    for (int w : warn_flags) result.domain_warnings += w;

    if (opt.noise_sigma_db > 0.0) {
        Rng rng(derive_seed(opt.seed, "shadow:" + tx.site_id));
        for (auto& row : result.rows)
            row.pathloss_db += rng.normal(0.0, opt.noise_sigma_db);
    }
    return result;
}

inline std::vector<SimPoint> to_sim_points(const SimulatedSite& sim) {
    std::vector<SimPoint> out;
    out.reserve(sim.rows.size());
    for (std::size_t i = 0; i < sim.rows.size(); ++i)
        out.push_back({sim.row_positions[i].x, sim.row_positions[i].y, sim.rows[i].fv.freq_mhz,
                       sim.rows[i].pathloss_db});
    return out;
}

// ---------------------------------------------------------------------------
// Sim-points CSV (position + pathloss; feeds measurement conversion)
// ---------------------------------------------------------------------------

inline constexpr const char* sim_points_csv_header = "x,y,freq_mhz,pathloss_db";

inline std::string write_sim_points_csv(const std::vector<SimPoint>& points) {
    std::string out = std::string(sim_points_csv_header) + "\n";
    for (const auto& p : points)
        out += format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.freq_mhz) +
               ',' + format_double(p.pathloss_db) + '\n';
    return out;
}

inline std::vector<SimPoint> parse_sim_points_csv(const std::string& text) {
    const auto lines = detail::read_lines(text);
    require(!lines.empty(), "sim points CSV is empty");
    require(detail::split_csv_line(lines[0]) == detail::split_csv_line(sim_points_csv_header),
            std::string("sim points CSV header must be exactly '") + sim_points_csv_header + "'");
    std::vector<SimPoint> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 4)
            throw Error("sim points row " + std::to_string(i + 1) + " has " +
                        std::to_string(f.size()) + " fields, expected 4");
        const std::string ctx = "in sim points row " + std::to_string(i + 1);
        out.push_back({parse_double(f[0], ctx), parse_double(f[1], ctx), parse_double(f[2], ctx),
                       parse_double(f[3], ctx)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coverage-map export (lattice grids only)
// ---------------------------------------------------------------------------

/// Packs per-point values back into a raster whose cells are the lattice
/// points. Cells without a surviving point stay nodata.
inline Raster make_coverage_raster(const GridSpec& spec, const std::vector<Point>& points,
                                   const std::vector<double>& values) {
    validate(spec);
    require(spec.spacing.has_value(), "coverage maps need a lattice grid");
    require(points.size() == values.size(), "coverage map: point/value counts differ");
    const double s = *spec.spacing;
    Raster map;
    const double tol = 1e-9 * std::max(1.0, std::max(spec.xmax - spec.xmin, spec.ymax - spec.ymin));
    map.ncols = static_cast<int>(std::floor((spec.xmax - spec.xmin + tol) / s)) + 1;
    map.nrows = static_cast<int>(std::floor((spec.ymax - spec.ymin + tol) / s)) + 1;
    require(map.ncols >= 2 && map.nrows >= 2, "coverage map needs at least a 2x2 lattice");
    map.cellsize = s;
    map.xll = spec.xmin - s / 2.0;
    map.yll = spec.ymin - s / 2.0;
    map.nodata = -9999.0;
    map.values.assign(static_cast<std::size_t>(map.ncols) * static_cast<std::size_t>(map.nrows),
                      map.nodata);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int col = static_cast<int>(std::llround((points[i].x - spec.xmin) / s));
        const int row_from_bottom = static_cast<int>(std::llround((points[i].y - spec.ymin) / s));
        require(col >= 0 && col < map.ncols && row_from_bottom >= 0 && row_from_bottom < map.nrows,
                "coverage map: point off the lattice");
        map.at(col, map.nrows - 1 - row_from_bottom) = values[i];
    }
    return map;
}

}  // namespace pathloss

#endif  // PATHLOSS_SIMULATE_HPP
