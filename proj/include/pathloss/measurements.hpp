// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_MEASUREMENTS_HPP
#define PATHLOSS_MEASUREMENTS_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathloss/common.hpp"

namespace pathloss {

/// One phone-log row. After ingest freq_mhz is always resolved (from the
/// EARFCN when the log does not carry an explicit frequency).
struct RsrpMeasurement {
    double x = 0.0;
    double y = 0.0;
    double rsrp_dbm = 0.0;
    std::optional<int> earfcn;
    std::optional<double> freq_mhz;
    std::string cell_id;
    std::string site_id;

    double freq() const {
        require(freq_mhz.has_value(), "measurement has no resolved frequency");
        return *freq_mhz;
    }
};

/// Per-site (or per-cell) lumped offset covering transmit power, antenna
/// gain and cable loss. residual_std is a data-quality diagnostic: the
/// spread of the per-sample offsets the mean was taken over.
struct SiteOffset {
    std::string site_id;
    std::string cell_id;  // empty when estimated per site
    double delta_db = 0.0;
    int n_samples = 0;
    double residual_std_db = 0.0;
};

// ---------------------------------------------------------------------------
// EARFCN -> downlink frequency
// ---------------------------------------------------------------------------

struct LteBand {
    int band;
    double f_dl_low_mhz;
    int n_offs_dl;
    int earfcn_lo;
    int earfcn_hi;
};

/// Downlink channel ranges for the North-American LTE bands seen in the
/// measurement campaigns this tool ingests.
inline constexpr std::array<LteBand, 10> lte_bands{{
    {2, 1930.0, 600, 600, 1199},
    {4, 2110.0, 1950, 1950, 2399},
    {5, 869.0, 2400, 2400, 2649},
    {12, 729.0, 5010, 5010, 5179},
    {13, 746.0, 5180, 5180, 5279},
    {17, 734.0, 5730, 5730, 5849},
    {25, 1930.0, 8040, 8040, 8689},
    {26, 859.0, 8690, 8690, 9039},
    {30, 2350.0, 9770, 9770, 9869},
    {66, 2110.0, 66436, 66436, 67335},
}};

/// F_DL = F_DL_low + 0.1 * (earfcn - N_Offs_DL).
inline double earfcn_to_freq(int earfcn) {
    for (const auto& b : lte_bands)
        if (earfcn >= b.earfcn_lo && earfcn <= b.earfcn_hi)
            return b.f_dl_low_mhz + 0.1 * (earfcn - b.n_offs_dl);
    std::string ranges;
    for (const auto& b : lte_bands) {
        if (!ranges.empty()) ranges += ", ";
        ranges += "band " + std::to_string(b.band) + " [" + std::to_string(b.earfcn_lo) + ".." +
                  std::to_string(b.earfcn_hi) + "]";
    }
    throw Error("earfcn " + std::to_string(earfcn) + " outside all supported downlink ranges: " +
                ranges);
}

// ---------------------------------------------------------------------------
// Measurement CSV ingest
// ---------------------------------------------------------------------------

inline constexpr const char* measurement_csv_header = "x,y,rsrp_dbm,earfcn,freq_mhz,cell_id,site_id";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

inline std::vector<std::string> read_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline void check_csv_field(const std::string& value, const std::string& what) {
    require(value.find(',') == std::string::npos && value.find('\n') == std::string::npos,
            what + " must not contain commas or newlines");
}

}  // namespace detail

/// Parses the documented measurement CSV. Each row must carry an EARFCN or
/// an explicit frequency; RSRP outside the [-160, -30] dBm sanity band is
/// rejected with its row number.
inline std::vector<RsrpMeasurement> parse_measurements_csv(const std::string& text) {
    const auto lines = detail::read_lines(text);
    require(!lines.empty(), "measurement CSV is empty");
    {
        const auto header = detail::split_csv_line(lines[0]);
        const auto expected = detail::split_csv_line(measurement_csv_header);
        require(header == expected,
                std::string("measurement CSV header must be exactly '") + measurement_csv_header +
                    "'");
    }
    std::vector<RsrpMeasurement> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string row_ctx = "in measurement row " + std::to_string(i + 1);
        const auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 7)
            throw Error("measurement row " + std::to_string(i + 1) + " has " +
                        std::to_string(f.size()) + " fields, expected 7");
        RsrpMeasurement m;
        m.x = parse_double(f[0], row_ctx);
        m.y = parse_double(f[1], row_ctx);
        m.rsrp_dbm = parse_double(f[2], row_ctx);
        if (m.rsrp_dbm < -160.0 || m.rsrp_dbm > -30.0)
            throw Error("measurement row " + std::to_string(i + 1) + ": rsrp " +
                        format_double(m.rsrp_dbm) + " dBm outside the sanity band [-160, -30]");
        if (!f[3].empty()) m.earfcn = static_cast<int>(parse_int(f[3], row_ctx));
        if (!f[4].empty()) m.freq_mhz = parse_double(f[4], row_ctx);
        if (!m.earfcn && !m.freq_mhz)
            throw Error("measurement row " + std::to_string(i + 1) +
                        ": needs an earfcn or a freq_mhz");
        if (!m.freq_mhz) m.freq_mhz = earfcn_to_freq(*m.earfcn);
        m.cell_id = f[5];
        m.site_id = f[6];
        require(!m.site_id.empty(),
                "measurement row " + std::to_string(i + 1) + ": empty site_id");
        out.push_back(std::move(m));
    }
    return out;
}

inline std::string write_measurements_csv(const std::vector<RsrpMeasurement>& measurements) {
    std::string out = std::string(measurement_csv_header) + "\n";
    for (const auto& m : measurements) {
        detail::check_csv_field(m.cell_id, "cell_id");
        detail::check_csv_field(m.site_id, "site_id");
        out += format_double(m.x) + ',' + format_double(m.y) + ',' + format_double(m.rsrp_dbm) +
               ',';
        if (m.earfcn) out += std::to_string(*m.earfcn);
        out += ',';
        // When the row carries an EARFCN the frequency stays implicit.
        if (m.freq_mhz && !m.earfcn) out += format_double(*m.freq_mhz);
        out += ',' + m.cell_id + ',' + m.site_id + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matching measurements to simulated points
// ---------------------------------------------------------------------------

struct SimPoint {
    double x = 0.0;
    double y = 0.0;
    double freq_mhz = 0.0;
    double pathloss_db = 0.0;
};

struct MatchedPair {
    std::size_t measurement_index = 0;
    double rsrp_dbm = 0.0;
    double sim_pathloss_db = 0.0;
    double match_distance_m = 0.0;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    int dropped = 0;  // measurements with no same-frequency sim point in range
};

/// Pairs each measurement with its nearest sim point of equal frequency
/// (within 0.1 MHz) no farther than max_dist. Equidistant candidates break
/// ties toward the lower (x, then y) coordinate, so the result does not
/// depend on sim point order.
inline MatchResult match_to_simulation(const std::vector<RsrpMeasurement>& measurements,
                                       const std::vector<SimPoint>& sim_points, double max_dist) {
    require(!measurements.empty(), "match_to_simulation: no measurements");
    require(!sim_points.empty(), "match_to_simulation: no sim points");
    require(max_dist > 0.0, "match_to_simulation: max_dist must be positive");

    MatchResult result;
    for (std::size_t mi = 0; mi < measurements.size(); ++mi) {
        const auto& m = measurements[mi];
        const double freq = m.freq();
        const SimPoint* best = nullptr;
        double best_d2 = max_dist * max_dist;
        for (const auto& sp : sim_points) {
            if (std::fabs(sp.freq_mhz - freq) > 0.1) continue;
            const double dx = sp.x - m.x;
            const double dy = sp.y - m.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > best_d2) continue;
            if (!best || d2 < best_d2 || sp.x < best->x ||
                (sp.x == best->x && sp.y < best->y)) {
                best = &sp;
                best_d2 = d2;
            }
        }
        if (!best) {
            ++result.dropped;
            continue;
        }
        result.pairs.push_back({mi, m.rsrp_dbm, best->pathloss_db, std::sqrt(best_d2)});
    }
    if (result.pairs.empty())
        throw Error("match_to_simulation: zero matches; the offset would be undefined");
    return result;
}

// ---------------------------------------------------------------------------
// Offset estimation and conversion
// ---------------------------------------------------------------------------

/// Offset from matched (rsrp, simulated pathloss) pairs: the mean of the
/// per-sample sums rsrp + pathloss, with their sample standard deviation as
/// a diagnostic.
inline SiteOffset estimate_offset(const std::vector<std::pair<double, double>>& pairs) {
    require(!pairs.empty(), "estimate_offset: no pairs");
    double sum = 0.0;
    for (const auto& [rsrp, sim_pl] : pairs) sum += rsrp + sim_pl;
    SiteOffset offset;
    offset.n_samples = static_cast<int>(pairs.size());
    offset.delta_db = sum / static_cast<double>(pairs.size());
    if (pairs.size() > 1) {
        double ss = 0.0;
        for (const auto& [rsrp, sim_pl] : pairs) {
            const double d = rsrp + sim_pl - offset.delta_db;
            ss += d * d;
        }
        offset.residual_std_db = std::sqrt(ss / static_cast<double>(pairs.size() - 1));
    }
    return offset;
}

/// PL = delta - RSRP.
inline double rsrp_to_pathloss(const RsrpMeasurement& m, const SiteOffset& offset) {
    require(offset.site_id == m.site_id, "rsrp_to_pathloss: offset for site '" + offset.site_id +
                                             "' applied to measurement from site '" + m.site_id +
                                             "'");
    return offset.delta_db - m.rsrp_dbm;
}

/// Groups measurements per (site, cell) when per_cell is set and cell ids are
/// present, else per site, and estimates one offset per group. Output sorted
/// by (site, cell).
inline std::vector<SiteOffset> estimate_offsets(const std::vector<RsrpMeasurement>& measurements,
                                                const std::vector<SimPoint>& sim_points,
                                                double max_dist, bool per_cell = true) {
    const auto matches = match_to_simulation(measurements, sim_points, max_dist);
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> groups;
    for (const auto& p : matches.pairs) {
        const auto& m = measurements[p.measurement_index];
        const std::string cell = per_cell ? m.cell_id : std::string();
        groups[{m.site_id, cell}].push_back({p.rsrp_dbm, p.sim_pathloss_db});
    }
    std::vector<SiteOffset> out;
    out.reserve(groups.size());
    for (const auto& [key, pairs] : groups) {
        SiteOffset o = estimate_offset(pairs);
        o.site_id = key.first;
        o.cell_id = key.second;
        out.push_back(std::move(o));
    }
    return out;
}

/// Offset lookup for conversion: exact (site, cell) match first, then the
/// site-wide record (empty cell_id).
inline const SiteOffset* find_offset(const std::vector<SiteOffset>& offsets,
                                     const std::string& site_id, const std::string& cell_id) {
    const SiteOffset* site_wide = nullptr;
    for (const auto& o : offsets) {
        if (o.site_id != site_id) continue;
        if (o.cell_id == cell_id) return &o;
        if (o.cell_id.empty()) site_wide = &o;
    }
    return site_wide;
}

// ---------------------------------------------------------------------------
// Offsets JSON
// ---------------------------------------------------------------------------

inline nlohmann::json offsets_to_json(const std::vector<SiteOffset>& offsets) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : offsets) {
        nlohmann::json rec{{"site_id", o.site_id},
                           {"delta_db", o.delta_db},
                           {"n_samples", o.n_samples},
                           {"residual_std_db", o.residual_std_db}};
        if (!o.cell_id.empty()) rec["cell_id"] = o.cell_id;
        arr.push_back(std::move(rec));
    }
    return arr;
}

inline std::vector<SiteOffset> offsets_from_json(const nlohmann::json& arr) {
    require(arr.is_array(), "offsets JSON must be an array");
    std::vector<SiteOffset> out;
    for (const auto& rec : arr) {
        SiteOffset o;
        o.site_id = rec.at("site_id").get<std::string>();
        o.cell_id = rec.value("cell_id", std::string());
        o.delta_db = rec.at("delta_db").get<double>();
        o.n_samples = rec.at("n_samples").get<int>();
        o.residual_std_db = rec.value("residual_std_db", 0.0);
        require(o.n_samples >= 1, "offset record for site '" + o.site_id + "': n_samples < 1");
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace pathloss

#endif  // PATHLOSS_MEASUREMENTS_HPP
