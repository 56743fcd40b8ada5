// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_PIPELINE_HPP
#define PATHLOSS_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathloss/common.hpp"
#include "pathloss/dataset.hpp"
#include "pathloss/gbm.hpp"
#include "pathloss/measurements.hpp"
#include "pathloss/simulate.hpp"
#include "pathloss/terrain.hpp"

namespace pathloss {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct RealTrainSpec {
    std::string site;
    double fraction = 0.5;  // share of the site's real rows used for training
    int repeat = 1;         // duplication factor for the training share
};

struct TrainSpec {
    std::vector<RealTrainSpec> real;
    std::vector<std::string> synthetic;  // sites contributing all synthetic rows
};

struct TestSpec {
    std::string site;
    Source kind = Source::real;
};

struct SiteConfig {
    std::string dsm_path;
    std::string dhm_path;
    double tx_x = 0.0;
    double tx_y = 0.0;
    double tower_height_m = 0.0;
    std::vector<double> freqs_mhz;
    GridSpec grid;
    ModelParams model;  // generates this site's synthetic training data
    // Model the measurement conversion matches against; defaults to `model`.
    // Separating the two lets experiments train on deliberately mismatched
    // synthetic data while offsets are still estimated against the
    // simulator's own predictions.
    std::optional<ModelParams> conversion_model;
    std::string measurements_path;  // empty = no real data for this site

    // Programmatic overrides (not part of the JSON form): tests and the demo
    // build experiments without touching the filesystem.
    std::shared_ptr<const TerrainStack> stack_mem;
    std::optional<std::vector<RsrpMeasurement>> measurements_mem;

    bool has_measurements() const {
        return measurements_mem.has_value() || !measurements_path.empty();
    }
};

struct ExperimentConfig {
    std::map<std::string, SiteConfig> sites;
    std::vector<TrainSpec> scenarios;  // one table row group per scenario
    std::vector<TestSpec> tests;
    TrainConfig model_config;  // feature_names/seed are filled per run
    bool include_frequency = true;
    bool include_blockage = false;
    double radius_m = 50.0;
    double rx_antenna_m = 1.5;
    double max_match_dist_m = 0.0;  // 0 = twice the governing raster cellsize
    bool per_cell_offsets = true;
    std::uint64_t seed = 0;
    std::filesystem::path base_dir;  // resolves relative paths in site configs
};

inline void validate(const ExperimentConfig& cfg) {
    require(!cfg.sites.empty(), "experiment config: no sites defined");
    require(!cfg.scenarios.empty(), "experiment config: no scenarios defined");
    require(!cfg.tests.empty(), "experiment config: no test sets defined");
    auto check_site = [&](const std::string& name, const std::string& where) {
        require(cfg.sites.count(name) != 0,
                "experiment config: " + where + " references undefined site '" + name + "'");
    };
    for (std::size_t si = 0; si < cfg.scenarios.size(); ++si) {
        const auto& sc = cfg.scenarios[si];
        const std::string where = "scenario " + std::to_string(si + 1);
        require(!sc.real.empty() || !sc.synthetic.empty(), where + " has an empty training set");
        for (std::size_t i = 0; i < sc.real.size(); ++i) {
            check_site(sc.real[i].site, where);
            require(sc.real[i].fraction > 0.0 && sc.real[i].fraction <= 1.0,
                    where + ": fraction must be in (0, 1]");
            require(sc.real[i].repeat >= 1, where + ": repeat must be >= 1");
            for (std::size_t j = i + 1; j < sc.real.size(); ++j)
                require(sc.real[i].site != sc.real[j].site,
                        where + ": site '" + sc.real[i].site + "' listed twice under real");
        }
        for (const auto& s : sc.synthetic) check_site(s, where);
    }
    for (const auto& t : cfg.tests) check_site(t.site, "test list");
    for (const auto& [name, site] : cfg.sites) {
        require(!site.freqs_mhz.empty(), "site '" + name + "': no frequencies");
        require(site.tower_height_m > 0.0, "site '" + name + "': tower height must be positive");
        validate(site.grid);
    }
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json model_params_to_json(const ModelParams& p) {
    nlohmann::json j{{"name", model_kind_name(p.kind)}};
    if (p.kind == ModelKind::cost231)
        j["env"] = p.env == Cost231Env::metropolitan ? "metropolitan" : "suburban";
    if (p.kind == ModelKind::sui)
        j["terrain"] = p.terrain == SuiTerrain::A ? "A" : (p.terrain == SuiTerrain::B ? "B" : "C");
    return j;
}

inline ModelParams model_params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.kind = parse_model_kind(j.at("name").get<std::string>());
    if (j.contains("env")) p.env = parse_cost231_env(j.at("env").get<std::string>());
    if (j.contains("terrain")) p.terrain = parse_sui_terrain(j.at("terrain").get<std::string>());
    return p;
}

inline nlohmann::json grid_to_json(const GridSpec& g) {
    nlohmann::json j{{"bounds", {g.xmin, g.ymin, g.xmax, g.ymax}}};
    if (g.spacing) j["spacing_m"] = *g.spacing;
    if (g.n_points) j["n_points"] = *g.n_points;
    return j;
}

inline GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    const auto& b = j.at("bounds");
    require(b.is_array() && b.size() == 4, "grid bounds must be [xmin, ymin, xmax, ymax]");
    g.xmin = b[0].get<double>();
    g.ymin = b[1].get<double>();
    g.xmax = b[2].get<double>();
    g.ymax = b[3].get<double>();
    if (j.contains("spacing_m")) g.spacing = j.at("spacing_m").get<double>();
    if (j.contains("n_points")) g.n_points = j.at("n_points").get<int>();
    return g;
}

}  // namespace detail

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json sites = nlohmann::json::object();
    for (const auto& [name, s] : cfg.sites) {
        nlohmann::json js{{"dsm", s.dsm_path},
                          {"dhm", s.dhm_path},
                          {"tx", {{"x", s.tx_x}, {"y", s.tx_y}, {"tower_height_m", s.tower_height_m}}},
                          {"freqs_mhz", s.freqs_mhz},
                          {"grid", detail::grid_to_json(s.grid)},
                          {"model", detail::model_params_to_json(s.model)}};
        if (s.conversion_model)
            js["conversion_model"] = detail::model_params_to_json(*s.conversion_model);
        if (!s.measurements_path.empty()) js["measurements"] = s.measurements_path;
        sites[name] = std::move(js);
    }
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& sc : cfg.scenarios) {
        nlohmann::json real = nlohmann::json::array();
        for (const auto& r : sc.real)
            real.push_back({{"site", r.site}, {"fraction", r.fraction}, {"repeat", r.repeat}});
        scenarios.push_back({{"real", std::move(real)}, {"synthetic", sc.synthetic}});
    }
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : cfg.tests)
        tests.push_back({{"site", t.site}, {"kind", source_name(t.kind)}});
    return nlohmann::json{
        {"seed", cfg.seed},
        {"include_frequency", cfg.include_frequency},
        {"include_blockage", cfg.include_blockage},
        {"radius_m", cfg.radius_m},
        {"rx_antenna_m", cfg.rx_antenna_m},
        {"max_match_dist_m", cfg.max_match_dist_m},
        {"per_cell_offsets", cfg.per_cell_offsets},
        {"model_config",
         {{"n_trees", cfg.model_config.n_trees},
          {"learning_rate", cfg.model_config.learning_rate},
          {"max_depth", cfg.model_config.max_depth},
          {"min_samples_leaf", cfg.model_config.min_samples_leaf},
          {"subsample", cfg.model_config.subsample}}},
        {"sites", std::move(sites)},
        {"scenarios", std::move(scenarios)},
        {"test", std::move(tests)}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    const std::filesystem::path& base_dir = {}) {
    try {
        ExperimentConfig cfg;
        cfg.base_dir = base_dir;
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.include_frequency = j.value("include_frequency", true);
        cfg.include_blockage = j.value("include_blockage", false);
        cfg.radius_m = j.value("radius_m", 50.0);
        cfg.rx_antenna_m = j.value("rx_antenna_m", 1.5);
        cfg.max_match_dist_m = j.value("max_match_dist_m", 0.0);
        cfg.per_cell_offsets = j.value("per_cell_offsets", true);
        if (j.contains("model_config")) {
            const auto& m = j.at("model_config");
            cfg.model_config.n_trees = m.value("n_trees", cfg.model_config.n_trees);
            cfg.model_config.learning_rate =
                m.value("learning_rate", cfg.model_config.learning_rate);
            cfg.model_config.max_depth = m.value("max_depth", cfg.model_config.max_depth);
            cfg.model_config.min_samples_leaf =
                m.value("min_samples_leaf", cfg.model_config.min_samples_leaf);
            cfg.model_config.subsample = m.value("subsample", cfg.model_config.subsample);
        }
        for (const auto& [name, js] : j.at("sites").items()) {
            SiteConfig s;
            s.dsm_path = js.at("dsm").get<std::string>();
            s.dhm_path = js.at("dhm").get<std::string>();
            s.tx_x = js.at("tx").at("x").get<double>();
            s.tx_y = js.at("tx").at("y").get<double>();
            s.tower_height_m = js.at("tx").at("tower_height_m").get<double>();
            s.freqs_mhz = js.at("freqs_mhz").get<std::vector<double>>();
            s.grid = detail::grid_from_json(js.at("grid"));
            s.model = detail::model_params_from_json(js.at("model"));
            if (js.contains("conversion_model"))
                s.conversion_model = detail::model_params_from_json(js.at("conversion_model"));
            if (js.contains("measurements")) s.measurements_path = js.at("measurements");
            cfg.sites[name] = std::move(s);
        }
        auto parse_train = [](const nlohmann::json& jt) {
            TrainSpec sc;
            for (const auto& r : jt.value("real", nlohmann::json::array())) {
                RealTrainSpec rt;
                rt.site = r.at("site").get<std::string>();
                rt.fraction = r.value("fraction", 0.5);
                rt.repeat = r.value("repeat", 1);
                sc.real.push_back(std::move(rt));
            }
            for (const auto& s : jt.value("synthetic", nlohmann::json::array()))
                sc.synthetic.push_back(s.get<std::string>());
            return sc;
        };
        if (j.contains("scenarios"))
            for (const auto& jt : j.at("scenarios")) cfg.scenarios.push_back(parse_train(jt));
        else if (j.contains("train"))
            cfg.scenarios.push_back(parse_train(j.at("train")));
        for (const auto& jt : j.at("test")) {
            TestSpec t;
            t.site = jt.at("site").get<std::string>();
            t.kind = parse_source(jt.value("kind", std::string("real")));
            cfg.tests.push_back(std::move(t));
        }
        validate(cfg);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("experiment config: ") + e.what());
    }
}

inline std::string experiment_config_digest(const ExperimentConfig& cfg) {
    return hex64(fnv1a64(experiment_config_to_json(cfg).dump()));
}

// ---------------------------------------------------------------------------
// Split and mix
// ---------------------------------------------------------------------------

/// Seeded uniform per-site partition. round(fraction * n) rows of each site
/// go to the training half; both halves preserve the input row order.
inline std::pair<std::vector<DatasetRow>, std::vector<DatasetRow>> split(
    const std::vector<DatasetRow>& rows, double fraction, std::uint64_t seed) {
    require(!rows.empty(), "split: no rows");
    require(fraction > 0.0 && fraction < 1.0, "split: fraction must be in (0, 1)");

    std::map<std::string, std::vector<std::size_t>> by_site;
    for (std::size_t i = 0; i < rows.size(); ++i) by_site[rows[i].site_id].push_back(i);

    std::vector<char> in_train(rows.size(), 0);
    for (const auto& [site, indices] : by_site) {
        require(indices.size() >= 2, "split: site '" + site + "' has fewer than 2 rows");
        auto shuffled = indices;
        Rng rng(derive_seed(seed, "split:" + site));
        rng.shuffle(shuffled);
        const auto n_train = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(indices.size())));
        for (std::size_t i = 0; i < n_train && i < shuffled.size(); ++i)
            in_train[shuffled[i]] = 1;
    }
    std::pair<std::vector<DatasetRow>, std::vector<DatasetRow>> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        (in_train[i] ? out.first : out.second).push_back(rows[i]);
    return out;
}

/// Training mixture: all synthetic rows, then the real rows duplicated
/// `repeat` times. Duplication is the deterministic analogue of the
/// per-epoch repetition strategy and equals integer sample weighting.
inline std::vector<DatasetRow> mix(const std::vector<DatasetRow>& real_train,
                                   const std::vector<DatasetRow>& synthetic, int repeat) {
    require(repeat >= 1, "mix: repeat must be >= 1");
    require(!real_train.empty() || !synthetic.empty(), "mix: both inputs are empty");
    std::vector<DatasetRow> out;
    out.reserve(synthetic.size() + static_cast<std::size_t>(repeat) * real_train.size());
    out.insert(out.end(), synthetic.begin(), synthetic.end());
    for (int r = 0; r < repeat; ++r) out.insert(out.end(), real_train.begin(), real_train.end());
    return out;
}

// ---------------------------------------------------------------------------
// Site resolution
// ---------------------------------------------------------------------------

struct SiteData {
    std::shared_ptr<const TerrainStack> stack;
    TxSite tx;
    SimulatedSite sim;                   // synthetic rows (training model)
    std::vector<DatasetRow> real_rows;   // converted measurements with features
    std::vector<SiteOffset> offsets;
    int measurements_unmatched = 0;
};

inline std::map<std::string, SiteData> resolve_sites(const ExperimentConfig& cfg) {
    validate(cfg);
    std::map<std::string, SiteData> out;
    for (const auto& [name, sc] : cfg.sites) {
        SiteData data;
        if (sc.stack_mem) {
            data.stack = sc.stack_mem;
        } else {
            require(!sc.dsm_path.empty() && !sc.dhm_path.empty(),
                    "site '" + name + "': missing dsm/dhm raster paths");
            auto stack = std::make_shared<TerrainStack>(
                make_terrain_stack(load_ascii_grid_file(cfg.base_dir / sc.dsm_path),
                                   load_ascii_grid_file(cfg.base_dir / sc.dhm_path)));
            data.stack = std::move(stack);
        }
        data.tx = TxSite{sc.tx_x, sc.tx_y, sc.tower_height_m, sc.freqs_mhz, name};
        require(data.stack->dsm.contains(sc.tx_x, sc.tx_y),
                "site '" + name + "': transmitter is outside the raster");

        GridSpec grid = sc.grid;
        grid.seed = derive_seed(cfg.seed, "grid:" + name);
        const auto points = generate_grid(grid, *data.stack);

        SimulateOptions opt;
        opt.model = sc.model;
        opt.radius_m = cfg.radius_m;
        opt.include_blockage = cfg.include_blockage;
        opt.rx_antenna_m = cfg.rx_antenna_m;
        data.sim = simulate_site(*data.stack, data.tx, points, sc.freqs_mhz, opt);

        if (sc.has_measurements()) {
            std::vector<RsrpMeasurement> measurements;
            if (sc.measurements_mem) {
                measurements = *sc.measurements_mem;
                for (auto& m : measurements) {
                    require(m.freq_mhz.has_value() || m.earfcn.has_value(),
                            "site '" + name + "': measurement without earfcn or frequency");
                    if (!m.freq_mhz) m.freq_mhz = earfcn_to_freq(*m.earfcn);
                }
            } else {
                std::ifstream in(cfg.base_dir / sc.measurements_path, std::ios::binary);
                require(static_cast<bool>(in), "site '" + name + "': cannot open measurements '" +
                                                   sc.measurements_path + "'");
                std::ostringstream buf;
                buf << in.rdbuf();
                measurements = parse_measurements_csv(buf.str());
            }
            for (const auto& m : measurements)
                require(m.site_id == name, "site '" + name +
                                               "': measurement file contains rows for site '" +
                                               m.site_id + "'");

            std::vector<SimPoint> conv_points;
            if (sc.conversion_model) {
                SimulateOptions copt = opt;
                copt.model = *sc.conversion_model;
                copt.include_blockage = false;
                conv_points =
                    to_sim_points(simulate_site(*data.stack, data.tx, points, sc.freqs_mhz, copt));
            } else {
                conv_points = to_sim_points(data.sim);
            }
            const double max_dist = cfg.max_match_dist_m > 0.0
                                        ? cfg.max_match_dist_m
                                        : 2.0 * data.stack->ground.cellsize;
            data.offsets =
                estimate_offsets(measurements, conv_points, max_dist, cfg.per_cell_offsets);

            FeatureConfig fcfg;
            fcfg.radius = cfg.radius_m;
            fcfg.include_blockage = cfg.include_blockage;
            fcfg.rx_antenna_m = cfg.rx_antenna_m;
            const auto ctx = detail::make_tx_context(*data.stack, data.tx, cfg.radius_m);
            for (const auto& m : measurements) {
                const SiteOffset* offset = find_offset(data.offsets, m.site_id, m.cell_id);
                if (!offset) {
                    ++data.measurements_unmatched;
                    continue;
                }
                DatasetRow row;
                row.site_id = name;
                row.source = Source::real;
                row.fv = detail::compute_features_with_context(*data.stack, data.tx, ctx,
                                                               {m.x, m.y}, m.freq(), fcfg);
                row.pathloss_db = rsrp_to_pathloss(m, *offset);
                data.real_rows.push_back(std::move(row));
            }
            require(!data.real_rows.empty(), "site '" + name + "': no convertible measurements");
        }
        out[name] = std::move(data);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

struct ResultRow {
    std::string train_label;
    std::string test_label;
    double mae_db = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::string config_digest;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

inline constexpr const char* result_csv_header =
    "train_label,test_label,mae_db,n_train,n_test,config_digest";

inline std::string write_result_csv(const ResultTable& table) {
    std::string out = std::string(result_csv_header) + "\n";
    for (const auto& r : table.rows) {
        detail::check_csv_field(r.train_label, "train label");
        detail::check_csv_field(r.test_label, "test label");
        out += r.train_label + ',' + r.test_label + ',' + format_double(r.mae_db) + ',' +
               std::to_string(r.n_train) + ',' + std::to_string(r.n_test) + ',' +
               r.config_digest + '\n';
    }
    return out;
}

/// Human-readable rendering. The footer restates the model configuration so
/// no table circulates without its hyperparameters.
inline std::string render_result_table(const ResultTable& table, const ExperimentConfig& cfg) {
    std::size_t w_train = 10, w_test = 9;
    for (const auto& r : table.rows) {
        w_train = std::max(w_train, r.train_label.size());
        w_test = std::max(w_test, r.test_label.size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::string out = pad("train", w_train) + "  " + pad("test", w_test) +
                      "  mae_db   n_train  n_test\n";
    out += std::string(w_train + w_test + 28, '-') + "\n";
    for (const auto& r : table.rows) {
        char mae_buf[32];
        std::snprintf(mae_buf, sizeof(mae_buf), "%7.2f", r.mae_db);
        out += pad(r.train_label, w_train) + "  " + pad(r.test_label, w_test) + "  " + mae_buf +
               "  " + pad(std::to_string(r.n_train), 7) + "  " + std::to_string(r.n_test) + "\n";
    }
    const auto& m = cfg.model_config;
    out += "\nmodel: n_trees=" + std::to_string(m.n_trees) +
           " learning_rate=" + format_double(m.learning_rate) +
           " max_depth=" + std::to_string(m.max_depth) +
           " min_samples_leaf=" + std::to_string(m.min_samples_leaf) +
           " subsample=" + format_double(m.subsample) + " seed=" + std::to_string(cfg.seed) + "\n";
    std::string names;
    for (const auto& n : default_feature_names(cfg.include_frequency, cfg.include_blockage)) {
        if (!names.empty()) names += ",";
        names += n;
    }
    out += "features: " + names + "\nconfig: " + experiment_config_digest(cfg) + "\n";
    return out;
}

struct ScenarioRun {
    std::string train_label;
    GbmModel model;
    std::vector<ResultRow> rows;
};

namespace detail {

inline std::string scenario_label(const TrainSpec& scenario) {
    std::string label;
    auto append = [&](const std::string& piece) {
        if (!label.empty()) label += " + ";
        label += piece;
    };
    for (const auto& r : scenario.real) {
        std::string piece = r.site + " (R";
        if (r.repeat > 1) piece += " x" + std::to_string(r.repeat);
        piece += ")";
        append(piece);
    }
    for (const auto& s : scenario.synthetic) append(s + " (S)");
    return label;
}

inline ScenarioRun run_one_scenario(const ExperimentConfig& cfg,
                                    const std::map<std::string, SiteData>& sites,
                                    const TrainSpec& scenario, const std::string& digest) {
    std::vector<DatasetRow> synthetic;
    for (const auto& name : scenario.synthetic) {
        const auto& rows = sites.at(name).sim.rows;
        synthetic.insert(synthetic.end(), rows.begin(), rows.end());
    }

    std::vector<DatasetRow> train = std::move(synthetic);
    std::map<std::string, std::vector<DatasetRow>> holdouts;
    for (const auto& r : scenario.real) {
        const auto& site = sites.at(r.site);
        require(!site.real_rows.empty(),
                "scenario uses real data of site '" + r.site + "' but it has no measurements");
        std::vector<DatasetRow> part;
        if (r.fraction >= 1.0) {
            part = site.real_rows;
            holdouts[r.site] = {};
        } else {
            auto [tr, holdout] = split(site.real_rows, r.fraction, cfg.seed);
            part = std::move(tr);
            holdouts[r.site] = std::move(holdout);
        }
        for (int k = 0; k < r.repeat; ++k) train.insert(train.end(), part.begin(), part.end());
    }
    require(!train.empty(), "scenario training set is empty");

    TrainConfig tc = cfg.model_config;
    tc.feature_names = default_feature_names(cfg.include_frequency, cfg.include_blockage);
    tc.seed = derive_seed(cfg.seed, "gbm");

    ScenarioRun run;
    run.train_label = scenario_label(scenario);
    run.model = fit(to_matrix(train, tc.feature_names), targets(train), tc);

    for (const auto& t : cfg.tests) {
        const auto& site = sites.at(t.site);
        const std::vector<DatasetRow>* rows = nullptr;
        if (t.kind == Source::synthetic) {
            rows = &site.sim.rows;
        } else {
            require(!site.real_rows.empty(),
                    "test set needs real data of site '" + t.site + "' but it has none");
            const auto it = holdouts.find(t.site);
            rows = it != holdouts.end() ? &it->second : &site.real_rows;
        }
        require(!rows->empty(), "test set for site '" + t.site + "' is empty");
        const auto pred = predict_all(run.model, to_matrix(*rows, tc.feature_names));
        const auto truth = targets(*rows);
        ResultRow row;
        row.train_label = run.train_label;
        row.test_label = t.site + (t.kind == Source::real ? " (R)" : " (S)");
        row.mae_db = mae(pred, truth);
        row.n_train = train.size();
        row.n_test = rows->size();
        row.config_digest = digest;
        run.rows.push_back(std::move(row));
    }
    return run;
}

}  // namespace detail

struct ExperimentResult {
    ResultTable table;
    std::vector<ScenarioRun> runs;
};

/// Runs every scenario of the config against the shared site data: one fitted
/// model per scenario, one table row per (scenario, test set).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const auto sites = resolve_sites(cfg);
    const std::string digest = experiment_config_digest(cfg);
    ExperimentResult result;
    for (const auto& scenario : cfg.scenarios) {
        auto run = detail::run_one_scenario(cfg, sites, scenario, digest);
        result.table.rows.insert(result.table.rows.end(), run.rows.begin(), run.rows.end());
        result.runs.push_back(std::move(run));
    }
    return result;
}

/// Single-scenario convenience wrapper.
inline ExperimentResult run_scenario(const ExperimentConfig& cfg) {
    require(cfg.scenarios.size() == 1, "run_scenario expects exactly one scenario; use "
                                       "run_experiment for multi-scenario configs");
    return run_experiment(cfg);
}

/// One run per repeat value with everything else fixed; the repeat count is
/// echoed in each row's train label ("x<k>").
inline ResultTable repetition_sweep(const ExperimentConfig& cfg, const std::vector<int>& repeats) {
    require(!repeats.empty(), "repetition_sweep: no repeat values");
    require(cfg.scenarios.size() == 1, "repetition_sweep expects exactly one scenario");
    require(!cfg.scenarios[0].real.empty(),
            "repetition_sweep: the scenario has no real training data to repeat");
    const auto sites = resolve_sites(cfg);
    const std::string digest = experiment_config_digest(cfg);
    ResultTable table;
    for (int k : repeats) {
        require(k >= 1, "repetition_sweep: repeat values must be >= 1");
        TrainSpec scenario = cfg.scenarios[0];
        for (auto& r : scenario.real) r.repeat = k;
        auto run = detail::run_one_scenario(cfg, sites, scenario, digest);
        table.rows.insert(table.rows.end(), run.rows.begin(), run.rows.end());
    }
    return table;
}

/// Plot-ready companion for sweeps: repeat,test_label,mae_db.
inline std::string write_sweep_csv(const ResultTable& table, const std::vector<int>& repeats,
                                   std::size_t tests_per_repeat) {
    require(table.rows.size() == repeats.size() * tests_per_repeat,
            "sweep CSV: table shape does not match the repeat list");
    std::string out = "repeat,test_label,mae_db\n";
    for (std::size_t i = 0; i < repeats.size(); ++i)
        for (std::size_t t = 0; t < tests_per_repeat; ++t) {
            const auto& row = table.rows[i * tests_per_repeat + t];
            out += std::to_string(repeats[i]) + ',' + row.test_label + ',' +
                   format_double(row.mae_db) + '\n';
        }
    return out;
}

}  // namespace pathloss

#endif  // PATHLOSS_PIPELINE_HPP
