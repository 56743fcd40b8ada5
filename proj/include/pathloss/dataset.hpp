// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_DATASET_HPP
#define PATHLOSS_DATASET_HPP

#include <cmath>
#include <string>
#include <vector>

#include "pathloss/common.hpp"
#include "pathloss/features.hpp"
#include "pathloss/gbm.hpp"
#include "pathloss/measurements.hpp"

namespace pathloss {

enum class Source { real, synthetic };

inline std::string source_name(Source s) { return s == Source::real ? "real" : "synthetic"; }

inline Source parse_source(const std::string& name) {
    if (name == "real") return Source::real;
    if (name == "synthetic") return Source::synthetic;
    throw Error("unknown source tag '" + name + "' (real, synthetic)");
}

/// One training/evaluation row: the feature vector, its pathloss target and
/// provenance tags.
struct DatasetRow {
    std::string site_id;
    Source source = Source::synthetic;
    FeatureVector fv;
    double pathloss_db = 0.0;
};

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

inline constexpr const char* dataset_csv_header =
    "site,source,freq_mhz,d_bs_m,h_bs_m,h_c_m,roughness_m,txhaat_m,alpha,blockage_m,pathloss_db";

inline std::string write_dataset_csv(const std::vector<DatasetRow>& rows) {
    std::string out = std::string(dataset_csv_header) + "\n";
    for (const auto& r : rows) {
        detail::check_csv_field(r.site_id, "site id");
        require(std::isfinite(r.pathloss_db), "dataset row for site '" + r.site_id +
                                                  "' has a non-finite pathloss");
        out += r.site_id + ',' + source_name(r.source) + ',' + format_double(r.fv.freq_mhz) +
               ',' + format_double(r.fv.d_bs) + ',' + format_double(r.fv.h_bs) + ',' +
               format_double(r.fv.h_c) + ',' + format_double(r.fv.roughness) + ',' +
               format_double(r.fv.tx_haat) + ',' + format_double(r.fv.alpha) + ',';
        if (r.fv.blockage) out += format_double(*r.fv.blockage);
        out += ',' + format_double(r.pathloss_db) + '\n';
    }
    return out;
}

inline std::vector<DatasetRow> parse_dataset_csv(const std::string& text) {
    const auto lines = detail::read_lines(text);
    require(!lines.empty(), "dataset CSV is empty");
    require(detail::split_csv_line(lines[0]) == detail::split_csv_line(dataset_csv_header),
            std::string("dataset CSV header must be exactly '") + dataset_csv_header + "'");
    std::vector<DatasetRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = detail::split_csv_line(lines[i]);
        const std::string row_ctx = "in dataset row " + std::to_string(i + 1);
        if (f.size() != 11)
            throw Error("dataset row " + std::to_string(i + 1) + " has " +
                        std::to_string(f.size()) + " fields, expected 11");
        DatasetRow r;
        r.site_id = f[0];
        r.source = parse_source(f[1]);
        r.fv.freq_mhz = parse_double(f[2], row_ctx);
        r.fv.d_bs = parse_double(f[3], row_ctx);
        r.fv.h_bs = parse_double(f[4], row_ctx);
        r.fv.h_c = parse_double(f[5], row_ctx);
        r.fv.roughness = parse_double(f[6], row_ctx);
        r.fv.tx_haat = parse_double(f[7], row_ctx);
        r.fv.alpha = parse_double(f[8], row_ctx);
        if (!f[9].empty()) r.fv.blockage = parse_double(f[9], row_ctx);
        r.pathloss_db = parse_double(f[10], row_ctx);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Feature-name selection
// ---------------------------------------------------------------------------

/// Column names match the dataset CSV header.
inline std::vector<std::string> default_feature_names(bool include_frequency = true,
                                                      bool include_blockage = false) {
    std::vector<std::string> names;
    if (include_frequency) names.push_back("freq_mhz");
    names.insert(names.end(), {"d_bs_m", "h_bs_m", "h_c_m", "roughness_m", "txhaat_m", "alpha"});
    if (include_blockage) names.push_back("blockage_m");
    return names;
}

inline double feature_value(const FeatureVector& fv, const std::string& name) {
    if (name == "freq_mhz") return fv.freq_mhz;
    if (name == "d_bs_m") return fv.d_bs;
    if (name == "h_bs_m") return fv.h_bs;
    if (name == "h_c_m") return fv.h_c;
    if (name == "roughness_m") return fv.roughness;
    if (name == "txhaat_m") return fv.tx_haat;
    if (name == "alpha") return fv.alpha;
    if (name == "blockage_m") {
        require(fv.blockage.has_value(), "missing feature blockage_m (row computed without it)");
        return *fv.blockage;
    }
    throw Error("unknown feature name '" + name + "'");
}

inline DataMatrix to_matrix(const std::vector<DatasetRow>& rows,
                            const std::vector<std::string>& feature_names) {
    DataMatrix m;
    m.n_rows = rows.size();
    m.n_cols = feature_names.size();
    m.values.reserve(m.n_rows * m.n_cols);
    for (const auto& r : rows)
        for (const auto& name : feature_names) m.values.push_back(feature_value(r.fv, name));
    return m;
}

inline std::vector<double> targets(const std::vector<DatasetRow>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.pathloss_db);
    return out;
}

/// Spec-shaped convenience: train directly from dataset rows.
inline GbmModel fit(const std::vector<DatasetRow>& rows, const TrainConfig& cfg,
                    FitReport* report = nullptr) {
    return fit(to_matrix(rows, cfg.feature_names), targets(rows), cfg, report);
}

inline double predict(const GbmModel& model, const FeatureVector& fv) {
    std::vector<double> row;
    row.reserve(model.feature_names.size());
    for (const auto& name : model.feature_names) row.push_back(feature_value(fv, name));
    return model.predict(row);
}

}  // namespace pathloss

#endif  // PATHLOSS_DATASET_HPP
