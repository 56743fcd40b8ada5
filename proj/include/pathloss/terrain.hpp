// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_TERRAIN_HPP
#define PATHLOSS_TERRAIN_HPP

#include <cmath>
#include <string>
#include <vector>

#include "pathloss/common.hpp"
#include "pathloss/raster.hpp"

namespace pathloss {

/// Transmitter site: planar position, tower height above local ground, and
/// the carrier frequencies available at the site.
struct TxSite {
    double x = 0.0;
    double y = 0.0;
    double tower_height = 0.0;  // meters above local ground
    std::vector<double> freqs;  // MHz
    std::string site_id;

    Point position() const { return {x, y}; }
};

inline void validate(const TxSite& tx) {
    require(tx.tower_height > 0.0, "tx site '" + tx.site_id + "': tower_height must be positive");
    require(!tx.freqs.empty(), "tx site '" + tx.site_id + "': no frequencies configured");
    for (double f : tx.freqs)
        require(f > 0.0 && f < 100000.0,
                "tx site '" + tx.site_id + "': frequency " + format_double(f) +
                    " MHz outside (0, 100000)");
}

/// Surface model (DSM, above sea level), clutter height model (DHM, above
/// ground) and the derived bare ground. All three share one grid.
struct TerrainStack {
    Raster dsm;
    Raster dhm;
    Raster ground;
};

struct StackReport {
    int clamped_negative_dhm = 0;
};

/// Builds a stack from a DSM and DHM on identical grids. Negative DHM values
/// (LiDAR noise) are clamped to zero and counted. The DSM is re-derived as
/// ground + dhm per cell so the identity holds exactly in floating point.
inline TerrainStack make_terrain_stack(Raster dsm, Raster dhm, StackReport* report = nullptr) {
    validate(dsm);
    validate(dhm);
    require(dsm.ncols == dhm.ncols && dsm.nrows == dhm.nrows, "dsm/dhm grid dimensions differ");
    require(dsm.xll == dhm.xll && dsm.yll == dhm.yll, "dsm/dhm grid origins differ");
    require(dsm.cellsize == dhm.cellsize, "dsm/dhm cell sizes differ");

    int clamped = 0;
    Raster ground = dsm;
    for (std::size_t i = 0; i < dsm.values.size(); ++i) {
        double s = dsm.values[i];
        double h = dhm.values[i];
        if (dsm.is_nodata(s) || dhm.is_nodata(h)) {
            ground.values[i] = ground.nodata;
            dsm.values[i] = dsm.nodata;
            dhm.values[i] = dhm.nodata;
            continue;
        }
        if (h < 0.0) {
            h = 0.0;
            ++clamped;
            dhm.values[i] = 0.0;
        }
        ground.values[i] = s - h;
        dsm.values[i] = ground.values[i] + h;
    }
    if (report) report->clamped_negative_dhm = clamped;
    return TerrainStack{std::move(dsm), std::move(dhm), std::move(ground)};
}

// ---------------------------------------------------------------------------
// Terrain profiles
// ---------------------------------------------------------------------------

struct ProfileSample {
    double distance = 0.0;  // along-path, meters
    double ground = 0.0;    // bare-earth elevation, ASL
    double surface = 0.0;   // top-of-clutter elevation, ASL
};

/// Bilinear ground/surface samples along the segment a -> b at spacing
/// `step`, plus a final sample exactly at |b - a|.
inline std::vector<ProfileSample> extract_profile(const TerrainStack& stack, Point a, Point b,
                                                  double step) {
    require(step > 0.0, "profile step must be positive");
    const double total = distance_2d(a, b);
    require(total > 0.0, "profile endpoints coincide");

    const double tol = 1e-9 * std::max(1.0, total);
    const auto n_regular = static_cast<std::size_t>(std::floor((total - tol) / step));
    std::vector<ProfileSample> profile;
    profile.reserve(n_regular + 2);
    for (std::size_t k = 0; k <= n_regular + 1; ++k) {
        const double d = (k <= n_regular) ? static_cast<double>(k) * step : total;
        const double t = d / total;
        const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        profile.push_back({d, sample(stack.ground, p.x, p.y, SampleMode::bilinear),
                           sample(stack.dsm, p.x, p.y, SampleMode::bilinear)});
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Synthetic terrain (desk-scale test environments)
// ---------------------------------------------------------------------------

namespace detail {

/// Diamond-square midpoint displacement on a (size x size) grid,
/// size = 2^k + 1. Returns raw heights, not yet scaled.
inline std::vector<double> diamond_square(int size, Rng& rng) {
    std::vector<double> h(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
    auto at = [&](int i, int j) -> double& {
        return h[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) +
                 static_cast<std::size_t>(j)];
    };
    at(0, 0) = rng.uniform(-1.0, 1.0);
    at(0, size - 1) = rng.uniform(-1.0, 1.0);
    at(size - 1, 0) = rng.uniform(-1.0, 1.0);
    at(size - 1, size - 1) = rng.uniform(-1.0, 1.0);

    double amp = 1.0;
    for (int step = size - 1; step > 1; step /= 2) {
        const int half = step / 2;
        // diamond: centers of squares
        for (int i = half; i < size; i += step)
            for (int j = half; j < size; j += step) {
                const double avg = (at(i - half, j - half) + at(i - half, j + half) +
                                    at(i + half, j - half) + at(i + half, j + half)) /
                                   4.0;
                at(i, j) = avg + rng.uniform(-amp, amp);
            }
        // square: edge midpoints, averaging the in-grid neighbors
        for (int i = 0; i < size; i += half)
            for (int j = ((i / half) % 2 == 0) ? half : 0; j < size; j += step) {
                double sum = 0.0;
                int n = 0;
                if (i - half >= 0) { sum += at(i - half, j); ++n; }
                if (i + half < size) { sum += at(i + half, j); ++n; }
                if (j - half >= 0) { sum += at(i, j - half); ++n; }
                if (j + half < size) { sum += at(i, j + half); ++n; }
                at(i, j) = sum / n + rng.uniform(-amp, amp);
            }
        amp *= 0.5;
    }
    return h;
}

inline bool is_power_of_two_plus_one(int size) {
    const int n = size - 1;
    return size >= 3 && (n & (n - 1)) == 0;
}

}  // namespace detail

/// Deterministic synthetic environment: diamond-square ground rescaled so its
/// elevation span equals `relief`, plus axis-aligned rectangular clutter
/// blocks with uniform heights in [clutter_height_min, clutter_height_max]
/// covering approximately `clutter_density` of the cells.
inline TerrainStack generate_synthetic_terrain(std::uint64_t seed, int size, double cellsize,
                                               double relief, double clutter_density,
                                               double clutter_height_min,
                                               double clutter_height_max) {
    require(detail::is_power_of_two_plus_one(size),
            "terrain size must be 2^k + 1 with k >= 1, got " + std::to_string(size));
    require(cellsize > 0.0, "cellsize must be positive");
    require(relief >= 0.0, "relief must be non-negative");
    require(clutter_density >= 0.0 && clutter_density <= 1.0, "clutter_density must be in [0, 1]");
    require(clutter_height_min >= 0.0 && clutter_height_max >= clutter_height_min,
            "invalid clutter height range");

    Raster ground;
    ground.ncols = size;
    ground.nrows = size;
    ground.xll = 0.0;
    ground.yll = 0.0;
    ground.cellsize = cellsize;
    ground.values.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);

    if (relief > 0.0) {
        Rng rng(derive_seed(seed, "ground"));
        auto raw = detail::diamond_square(size, rng);
        const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
        const double span = *hi_it - *lo_it;
        if (span > 0.0)
            for (std::size_t i = 0; i < raw.size(); ++i)
                ground.values[i] = (raw[i] - *lo_it) / span * relief;
    }

    Raster dhm = ground;
    std::fill(dhm.values.begin(), dhm.values.end(), 0.0);
    const auto total_cells = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
    const auto target = static_cast<std::size_t>(
        std::llround(clutter_density * static_cast<double>(total_cells)));
    if (target > 0) {
        Rng rng(derive_seed(seed, "clutter"));
        std::vector<char> covered(total_cells, 0);
        std::size_t n_covered = 0;
        const int max_block = std::max(2, size / 10);
        int guard = 0;
        while (n_covered < target && ++guard < 200000) {
            const int w = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_block - 1)));
            const int h = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_block - 1)));
            const int col = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - w + 1)));
            const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - h + 1)));
            const double height = rng.uniform(clutter_height_min, clutter_height_max);
            for (int r = row; r < row + h; ++r)
                for (int c = col; c < col + w; ++c) {
                    const std::size_t i = static_cast<std::size_t>(r) * size + c;
                    if (!covered[i]) {
                        covered[i] = 1;
                        ++n_covered;
                    }
                    dhm.values[i] = std::max(dhm.values[i], height);
                }
        }
    }

    Raster dsm = ground;
    for (std::size_t i = 0; i < dsm.values.size(); ++i) dsm.values[i] += dhm.values[i];
    return make_terrain_stack(std::move(dsm), std::move(dhm));
}

}  // namespace pathloss

#endif  // PATHLOSS_TERRAIN_HPP
