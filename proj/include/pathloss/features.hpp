// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_FEATURES_HPP
#define PATHLOSS_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "pathloss/common.hpp"
#include "pathloss/propagation.hpp"
#include "pathloss/raster.hpp"
#include "pathloss/terrain.hpp"

namespace pathloss {

/// Engineered model inputs for one (transmitter, receiver, frequency) triple.
/// All heights are differences, so the vector is invariant under a constant
/// sea-level shift of DSM and ground.
struct FeatureVector {
    double freq_mhz = 0.0;
    double d_bs = 0.0;       // 2-D distance rx -> serving BS, meters
    double h_bs = 0.0;       // BS antenna ASL minus rx ground, meters, signed
    double h_c = 0.0;        // mean clutter height around rx, meters
    double roughness = 0.0;  // p90 - p10 of ground around rx, meters
    double tx_haat = 0.0;    // BS antenna ASL minus mean DSM around tx, signed
    double alpha = 0.0;      // (h_bs - h_c) / d_bs, elevation-angle tangent
    std::optional<double> blockage;  // cumulative Fresnel blockage, meters
};

/// Values of all non-nodata cells whose centers lie within `radius` of
/// `center`, inclusive.
inline std::vector<double> neighbors_within(const Raster& r, Point center, double radius) {
    require(radius > 0.0, "neighbors_within: radius must be positive");
    require(r.contains(center.x, center.y),
            "neighbors_within: center (" + format_double(center.x) + ", " +
                format_double(center.y) + ") is outside the raster");
    const int c_lo = std::max(0, static_cast<int>(std::floor((center.x - radius - r.xll) / r.cellsize - 0.5)));
    const int c_hi = std::min(r.ncols - 1, static_cast<int>(std::ceil((center.x + radius - r.xll) / r.cellsize - 0.5)));
    const int b_lo = std::max(0, static_cast<int>(std::floor((center.y - radius - r.yll) / r.cellsize - 0.5)));
    const int b_hi = std::min(r.nrows - 1, static_cast<int>(std::ceil((center.y + radius - r.yll) / r.cellsize - 0.5)));

    std::vector<double> out;
    const double r2 = radius * radius;
    for (int b = b_lo; b <= b_hi; ++b) {
        const int row = r.nrows - 1 - b;
        const double dy = r.cell_center_y(row) - center.y;
        for (int c = c_lo; c <= c_hi; ++c) {
            const double dx = r.cell_center_x(c) - center.x;
            if (dx * dx + dy * dy > r2) continue;
            const double v = r.at(c, row);
            if (!r.is_nodata(v)) out.push_back(v);
        }
    }
    if (out.empty())
        throw Error("neighbors_within: no cells within " + format_double(radius) + " m of (" +
                    format_double(center.x) + ", " + format_double(center.y) + ")");
    return out;
}

/// Linear interpolation on the sorted values at rank p * (n - 1).
inline double percentile(std::vector<double> values, double p) {
    require(!values.empty(), "percentile: empty value list");
    require(p >= 0.0 && p <= 1.0, "percentile: p must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double mean_of(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

struct FeatureConfig {
    double radius = 50.0;           // neighborhood radius R, shared by h_c, roughness, tx_haat
    bool include_blockage = false;
    double rx_antenna_m = 1.5;      // enters blockage geometry only
    double blockage_step_m = 0.0;   // 0 = raster cellsize
};

namespace detail {

/// Transmitter-side quantities shared by every receiver point of a site.
struct TxContext {
    double antenna_asl = 0.0;
    double dsm_mean = 0.0;
};

inline TxContext make_tx_context(const TerrainStack& stack, const TxSite& tx, double radius) {
    TxContext ctx;
    ctx.antenna_asl =
        sample(stack.ground, tx.x, tx.y, SampleMode::bilinear) + tx.tower_height;
    ctx.dsm_mean = mean_of(neighbors_within(stack.dsm, tx.position(), radius));
    return ctx;
}

inline FeatureVector compute_features_with_context(const TerrainStack& stack, const TxSite& tx,
                                                   const TxContext& ctx, Point rx, double freq_mhz,
                                                   const FeatureConfig& cfg) {
    FeatureVector fv;
    fv.freq_mhz = freq_mhz;
    fv.d_bs = distance_2d(rx, tx.position());
    require(fv.d_bs > 0.0, "compute_features: receiver coincides with the transmitter");

    const double rx_ground = sample(stack.ground, rx.x, rx.y, SampleMode::bilinear);
    fv.h_bs = ctx.antenna_asl - rx_ground;
    fv.h_c = mean_of(neighbors_within(stack.dhm, rx, cfg.radius));
    auto ground_ring = neighbors_within(stack.ground, rx, cfg.radius);
    fv.roughness = percentile(ground_ring, 0.90) - percentile(std::move(ground_ring), 0.10);
    fv.tx_haat = ctx.antenna_asl - ctx.dsm_mean;
    fv.alpha = (fv.h_bs - fv.h_c) / fv.d_bs;
    if (cfg.include_blockage) {
        const double step = cfg.blockage_step_m > 0.0 ? cfg.blockage_step_m : stack.ground.cellsize;
        fv.blockage = blockage_distance(stack, tx, rx, cfg.rx_antenna_m, freq_mhz, step);
    }
    return fv;
}

}  // namespace detail

inline FeatureVector compute_features(const TerrainStack& stack, const TxSite& tx, Point rx,
                                      double freq_mhz, const FeatureConfig& cfg = {}) {
    return detail::compute_features_with_context(
        stack, tx, detail::make_tx_context(stack, tx, cfg.radius), rx, freq_mhz, cfg);
}

/// One vector per (point, frequency), point-major. Shares the tx-side work
/// across points; elementwise identical to compute_features.
inline std::vector<FeatureVector> batch_features(const TerrainStack& stack, const TxSite& tx,
                                                 const std::vector<Point>& rx_points,
                                                 const std::vector<double>& freqs,
                                                 const FeatureConfig& cfg = {}) {
    require(!freqs.empty(), "batch_features: no frequencies");
    require(!rx_points.empty(), "batch_features: no receiver points");
    const auto ctx = detail::make_tx_context(stack, tx, cfg.radius);
    std::vector<FeatureVector> out(rx_points.size() * freqs.size());
    parallel_for(rx_points.size(), [&](std::size_t pi) {
        for (std::size_t fi = 0; fi < freqs.size(); ++fi)
            out[pi * freqs.size() + fi] = detail::compute_features_with_context(
                stack, tx, ctx, rx_points[pi], freqs[fi], cfg);
    });
    return out;
}

}  // namespace pathloss

#endif  // PATHLOSS_FEATURES_HPP
