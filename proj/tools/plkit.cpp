// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors
//
// plkit: command-line front end for terrain-aware pathloss datasets, model
// training and the augmentation experiments. Every run validates its inputs,
// computes in memory, then writes outputs plus a manifest recording inputs,
// digests and seeds. Reruns with identical inputs and seeds are byte-identical
// except for the manifest timestamp.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathloss/common.hpp"
#include "pathloss/dataset.hpp"
#include "pathloss/demo.hpp"
#include "pathloss/features.hpp"
#include "pathloss/gbm.hpp"
#include "pathloss/measurements.hpp"
#include "pathloss/pipeline.hpp"
#include "pathloss/propagation.hpp"
#include "pathloss/raster.hpp"
#include "pathloss/simulate.hpp"
#include "pathloss/terrain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pathloss;

namespace {

// ---------------------------------------------------------------------------
// Small file/manifest helpers
// ---------------------------------------------------------------------------

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// The output-directory override: PLKIT_OUT_DIR redirects relative outputs.
fs::path resolve_output(const fs::path& path) {
    const char* env = std::getenv("PLKIT_OUT_DIR");
    if (env && *env && !path.is_absolute()) return fs::path(env) / path;
    return path;
}

struct Manifest {
    json doc;
    std::vector<std::pair<fs::path, std::string>> pending_outputs;

    // No thread-cap field here: the cap never affects outputs, and manifests
    // from reruns must differ only in the timestamp.
    explicit Manifest(const std::string& command) {
        doc["command"] = command;
        doc["timestamp_utc"] = iso_timestamp_utc();
        doc["inputs"] = json::object();
        doc["outputs"] = json::array();
    }

    std::string note_input(const fs::path& path) {
        const std::string text = read_text_file(path);
        doc["inputs"][path.string()] = "fnv1a64:" + hex64(fnv1a64(text));
        return text;
    }

    void stage_output(const fs::path& path, std::string content) {
        pending_outputs.emplace_back(path, std::move(content));
        doc["outputs"].push_back(path.string());
    }

    /// Writes every staged output, then the manifest itself.
    void commit(const fs::path& manifest_path) {
        for (const auto& [path, content] : pending_outputs) write_text_file(path, content);
        write_text_file(manifest_path, doc.dump(2) + "\n");
    }
};

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_double(item, "in " + what));
    require(!out.empty(), what + " must not be empty");
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

/// "1..20", "1,2,5" or "7".
std::vector<int> parse_repeat_list(const std::string& text) {
    const auto dots = text.find("..");
    std::vector<int> out;
    if (dots != std::string::npos) {
        const int lo = static_cast<int>(parse_int(text.substr(0, dots), "in sweep range"));
        const int hi = static_cast<int>(parse_int(text.substr(dots + 2), "in sweep range"));
        require(lo >= 1 && hi >= lo, "invalid sweep range '" + text + "'");
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    for (const auto& item : parse_name_list(text))
        out.push_back(static_cast<int>(parse_int(item, "in sweep list")));
    require(!out.empty(), "empty sweep list");
    return out;
}

/// Per-command parameter store: defaults, overlaid by an optional JSON config
/// file, overlaid by explicitly passed flags. The merged result lands in the
/// run manifest.
struct Params {
    json values;

    void load_config(const std::string& path) {
        try {
            values.update(json::parse(read_text_file(path)));
        } catch (const json::parse_error& e) {
            throw Error("config '" + path + "' parse error at byte " + std::to_string(e.byte) +
                        ": " + e.what());
        }
    }

    template <typename T>
    void override_if(const CLI::Option* opt, const std::string& key, const T& value) {
        if (opt && opt->count() > 0) values[key] = value;
    }

    double num(const std::string& key) const { return values.at(key).get<double>(); }
    int integer(const std::string& key) const { return values.at(key).get<int>(); }
    std::string str(const std::string& key) const { return values.at(key).get<std::string>(); }
    bool flag(const std::string& key) const { return values.at(key).get<bool>(); }
    bool has(const std::string& key) const {
        return values.contains(key) && !values.at(key).is_null();
    }
};

ModelParams model_from_params(const Params& p) {
    ModelParams m;
    m.kind = parse_model_kind(p.str("model"));
    if (m.kind == ModelKind::cost231) {
        bool rural_mapped = false;
        m.env = parse_cost231_env(p.str("env"), &rural_mapped);
        if (rural_mapped)
            std::cerr << "plkit: warning: cost231 'rural' maps to the suburban correction\n";
    }
    if (m.kind == ModelKind::sui) m.terrain = parse_sui_terrain(p.str("terrain"));
    return m;
}

// ---------------------------------------------------------------------------
// terrain-gen
// ---------------------------------------------------------------------------

struct TerrainGenCli {
    std::string config, out_dir, name;
    std::uint64_t seed = 0;
    int size = 0;
    double cellsize = 0, relief = 0, clutter_density = 0, clutter_min = 0, clutter_max = 0;
    CLI::Option *o_seed, *o_size, *o_cellsize, *o_relief, *o_density, *o_cmin, *o_cmax, *o_name;
};

int cmd_terrain_gen(const TerrainGenCli& cli) {
    Params p;
    p.values = {{"seed", 42},          {"size", 65},          {"cellsize", 10.0},
                {"relief", 40.0},      {"clutter_density", 0.15},
                {"clutter_min", 3.0},  {"clutter_max", 12.0}, {"name", "terrain"}};
    if (!cli.config.empty()) p.load_config(cli.config);
    p.override_if(cli.o_seed, "seed", cli.seed);
    p.override_if(cli.o_size, "size", cli.size);
    p.override_if(cli.o_cellsize, "cellsize", cli.cellsize);
    p.override_if(cli.o_relief, "relief", cli.relief);
    p.override_if(cli.o_density, "clutter_density", cli.clutter_density);
    p.override_if(cli.o_cmin, "clutter_min", cli.clutter_min);
    p.override_if(cli.o_cmax, "clutter_max", cli.clutter_max);
    p.override_if(cli.o_name, "name", cli.name);

    const TerrainStack stack = generate_synthetic_terrain(
        p.values.at("seed").get<std::uint64_t>(), p.integer("size"), p.num("cellsize"),
        p.num("relief"), p.num("clutter_density"), p.num("clutter_min"), p.num("clutter_max"));

    const fs::path dir = resolve_output(cli.out_dir.empty() ? "." : cli.out_dir);
    const std::string name = p.str("name");
    Manifest manifest("terrain-gen");
    manifest.doc["effective_config"] = p.values;
    manifest.doc["seed"] = p.values.at("seed");
    manifest.stage_output(dir / (name + "_dsm.asc"), save_ascii_grid(stack.dsm));
    manifest.stage_output(dir / (name + "_dhm.asc"), save_ascii_grid(stack.dhm));
    manifest.commit(dir / (name + ".manifest.json"));
    std::cout << "wrote " << (dir / (name + "_dsm.asc")).string() << " and "
              << (dir / (name + "_dhm.asc")).string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCli {
    std::string config, dsm, dhm, site, model, terrain, env, freqs, bounds, out, points_out,
        map_out;
    double tx_x = 0, tx_y = 0, tower_height = 0, grid_spacing = 0, radius = 0, rx_antenna = 0,
           noise_sigma = 0, map_freq = 0;
    int grid_n = 0;
    std::uint64_t seed = 0;
    bool include_blockage = false;
    CLI::Option *o_dsm, *o_dhm, *o_site, *o_model, *o_terrain, *o_env, *o_freqs, *o_bounds,
        *o_tx_x, *o_tx_y, *o_tower, *o_spacing, *o_grid_n, *o_radius, *o_rx_antenna, *o_noise,
        *o_map_freq, *o_seed, *o_blockage;
};

int cmd_simulate(const SimulateCli& cli) {
    Params p;
    p.values = {{"dsm", nullptr},    {"dhm", nullptr},         {"site", "site"},
                {"model", "fspl"},   {"terrain", "C"},         {"env", "suburban"},
                {"tx_x", nullptr},   {"tx_y", nullptr},        {"tower_height_m", nullptr},
                {"freqs_mhz", nullptr}, {"bounds", nullptr},   {"grid_spacing_m", nullptr},
                {"grid_n", nullptr}, {"radius_m", 50.0},       {"include_blockage", false},
                {"rx_antenna_m", 1.5}, {"noise_sigma_db", 0.0}, {"seed", 42}};
    if (!cli.config.empty()) p.load_config(cli.config);
    p.override_if(cli.o_dsm, "dsm", cli.dsm);
    p.override_if(cli.o_dhm, "dhm", cli.dhm);
    p.override_if(cli.o_site, "site", cli.site);
    p.override_if(cli.o_model, "model", cli.model);
    p.override_if(cli.o_terrain, "terrain", cli.terrain);
    p.override_if(cli.o_env, "env", cli.env);
    p.override_if(cli.o_tx_x, "tx_x", cli.tx_x);
    p.override_if(cli.o_tx_y, "tx_y", cli.tx_y);
    p.override_if(cli.o_tower, "tower_height_m", cli.tower_height);
    p.override_if(cli.o_radius, "radius_m", cli.radius);
    p.override_if(cli.o_rx_antenna, "rx_antenna_m", cli.rx_antenna);
    p.override_if(cli.o_noise, "noise_sigma_db", cli.noise_sigma);
    p.override_if(cli.o_seed, "seed", cli.seed);
    p.override_if(cli.o_blockage, "include_blockage", cli.include_blockage);
    if (cli.o_freqs->count()) p.values["freqs_mhz"] = parse_double_list(cli.freqs, "--freqs");
    if (cli.o_bounds->count()) {
        const auto b = parse_double_list(cli.bounds, "--bounds");
        require(b.size() == 4, "--bounds needs xmin,ymin,xmax,ymax");
        p.values["bounds"] = b;
    }
    if (cli.o_spacing->count()) p.values["grid_spacing_m"] = cli.grid_spacing;
    if (cli.o_grid_n->count()) p.values["grid_n"] = cli.grid_n;

    for (const char* key : {"dsm", "dhm", "tx_x", "tx_y", "tower_height_m", "freqs_mhz"})
        require(p.has(key), std::string("missing required parameter '") + key + "'");

    Manifest manifest("simulate");
    const Raster dsm = load_ascii_grid(manifest.note_input(p.str("dsm")));
    const Raster dhm = load_ascii_grid(manifest.note_input(p.str("dhm")));
    StackReport stack_report;
    const TerrainStack stack = make_terrain_stack(dsm, dhm, &stack_report);
    if (stack_report.clamped_negative_dhm > 0)
        std::cerr << "plkit: warning: clamped " << stack_report.clamped_negative_dhm
                  << " negative DHM cells to 0\n";

    TxSite tx{p.num("tx_x"), p.num("tx_y"), p.num("tower_height_m"),
              p.values.at("freqs_mhz").get<std::vector<double>>(), p.str("site")};
    require(stack.dsm.contains(tx.x, tx.y), "transmitter (" + format_double(tx.x) + ", " +
                                                format_double(tx.y) +
                                                ") is outside the raster");

    GridSpec grid;
    if (p.has("bounds")) {
        const auto b = p.values.at("bounds").get<std::vector<double>>();
        require(b.size() == 4, "bounds needs [xmin, ymin, xmax, ymax]");
        grid.xmin = b[0];
        grid.ymin = b[1];
        grid.xmax = b[2];
        grid.ymax = b[3];
    } else {
        grid.xmin = stack.dsm.xmin() + stack.dsm.cellsize;
        grid.ymin = stack.dsm.ymin() + stack.dsm.cellsize;
        grid.xmax = stack.dsm.xmax() - stack.dsm.cellsize;
        grid.ymax = stack.dsm.ymax() - stack.dsm.cellsize;
    }
    if (p.has("grid_spacing_m")) grid.spacing = p.num("grid_spacing_m");
    if (p.has("grid_n")) grid.n_points = p.integer("grid_n");
    grid.seed = derive_seed(p.values.at("seed").get<std::uint64_t>(), "grid");

    int dropped_nodata = 0;
    const auto points = generate_grid(grid, stack, &dropped_nodata);
    if (dropped_nodata > 0)
        std::cerr << "plkit: warning: dropped " << dropped_nodata << " grid points on nodata\n";

    SimulateOptions opt;
    opt.model = model_from_params(p);
    opt.radius_m = p.num("radius_m");
    opt.include_blockage = p.flag("include_blockage");
    opt.rx_antenna_m = p.num("rx_antenna_m");
    opt.noise_sigma_db = p.num("noise_sigma_db");
    opt.seed = p.values.at("seed").get<std::uint64_t>();
    const auto sim = simulate_site(stack, tx, points, tx.freqs, opt);
    if (sim.dropped_below_reference > 0)
        std::cerr << "plkit: warning: dropped " << sim.dropped_below_reference
                  << " points below the SUI reference distance\n";
    if (sim.domain_warnings > 0)
        std::cerr << "plkit: warning: " << sim.domain_warnings
                  << " model evaluations outside the recommended domain\n";

    const fs::path out = resolve_output(cli.out);
    manifest.doc["effective_config"] = p.values;
    manifest.doc["seed"] = p.values.at("seed");
    manifest.stage_output(out, write_dataset_csv(sim.rows));
    if (!cli.points_out.empty())
        manifest.stage_output(resolve_output(cli.points_out),
                              write_sim_points_csv(to_sim_points(sim)));
    if (!cli.map_out.empty()) {
        require(grid.spacing.has_value(), "--map-out needs a lattice grid (--grid-spacing)");
        const double map_freq = cli.o_map_freq->count() ? cli.map_freq : tx.freqs.front();
        std::vector<Point> map_points;
        std::vector<double> map_values;
        for (std::size_t i = 0; i < sim.rows.size(); ++i)
            if (std::fabs(sim.rows[i].fv.freq_mhz - map_freq) < 0.05) {
                map_points.push_back(sim.row_positions[i]);
                map_values.push_back(sim.rows[i].pathloss_db);
            }
        require(!map_points.empty(), "no simulated rows at the requested map frequency");
        manifest.stage_output(resolve_output(cli.map_out),
                              save_ascii_grid(make_coverage_raster(grid, map_points, map_values)));
    }
    manifest.commit(out.string() + ".manifest.json");
    std::cout << "wrote " << out.string() << " (" << sim.rows.size() << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct FeaturesCli {
    std::string dsm, dhm, points, freqs, out;
    double tx_x = 0, tx_y = 0, tower_height = 0, radius = 50.0, rx_antenna = 1.5;
    bool include_blockage = false;
};

std::vector<Point> parse_points_csv(const std::string& text) {
    const auto lines = pathloss::detail::read_lines(text);
    require(!lines.empty(), "points CSV is empty");
    require(pathloss::detail::split_csv_line(lines[0]) == std::vector<std::string>{"x", "y"},
            "points CSV header must be exactly 'x,y'");
    std::vector<Point> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = pathloss::detail::split_csv_line(lines[i]);
        require(f.size() == 2, "points row " + std::to_string(i + 1) + " needs 2 fields");
        const std::string ctx = "in points row " + std::to_string(i + 1);
        out.push_back({parse_double(f[0], ctx), parse_double(f[1], ctx)});
    }
    require(!out.empty(), "points CSV has no rows");
    return out;
}

int cmd_features(const FeaturesCli& cli) {
    Manifest manifest("features");
    const Raster dsm = load_ascii_grid(manifest.note_input(cli.dsm));
    const Raster dhm = load_ascii_grid(manifest.note_input(cli.dhm));
    const TerrainStack stack = make_terrain_stack(dsm, dhm);
    const auto points = parse_points_csv(manifest.note_input(cli.points));
    const auto freqs = parse_double_list(cli.freqs, "--freqs");
    TxSite tx{cli.tx_x, cli.tx_y, cli.tower_height, freqs, "tx"};

    FeatureConfig fcfg;
    fcfg.radius = cli.radius;
    fcfg.include_blockage = cli.include_blockage;
    fcfg.rx_antenna_m = cli.rx_antenna;
    const auto vectors = batch_features(stack, tx, points, freqs, fcfg);

    std::string csv = "x,y,freq_mhz,d_bs_m,h_bs_m,h_c_m,roughness_m,txhaat_m,alpha,blockage_m\n";
    for (std::size_t pi = 0; pi < points.size(); ++pi)
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            const auto& fv = vectors[pi * freqs.size() + fi];
            csv += format_double(points[pi].x) + ',' + format_double(points[pi].y) + ',' +
                   format_double(fv.freq_mhz) + ',' + format_double(fv.d_bs) + ',' +
                   format_double(fv.h_bs) + ',' + format_double(fv.h_c) + ',' +
                   format_double(fv.roughness) + ',' + format_double(fv.tx_haat) + ',' +
                   format_double(fv.alpha) + ',';
            if (fv.blockage) csv += format_double(*fv.blockage);
            csv += '\n';
        }
    const fs::path out = resolve_output(cli.out);
    manifest.doc["effective_config"] = {{"radius_m", cli.radius},
                                        {"include_blockage", cli.include_blockage},
                                        {"rx_antenna_m", cli.rx_antenna},
                                        {"freqs_mhz", freqs}};
    manifest.stage_output(out, csv);
    manifest.commit(out.string() + ".manifest.json");
    std::cout << "wrote " << out.string() << " (" << vectors.size() << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

struct ConvertCli {
    std::string measurements, sim_points, out_pathloss, out_offsets;
    double max_dist = 0.0;
    bool per_site = false;
};

int cmd_convert(const ConvertCli& cli) {
    Manifest manifest("convert");
    const auto measurements = parse_measurements_csv(manifest.note_input(cli.measurements));
    const auto sims = parse_sim_points_csv(manifest.note_input(cli.sim_points));
    require(cli.max_dist > 0.0, "--max-dist must be positive");

    const auto offsets = estimate_offsets(measurements, sims, cli.max_dist, !cli.per_site);
    std::string csv = "x,y,freq_mhz,cell_id,site_id,pathloss_db\n";
    int dropped = 0;
    for (const auto& m : measurements) {
        const SiteOffset* offset = find_offset(offsets, m.site_id, m.cell_id);
        if (!offset) {
            ++dropped;
            continue;
        }
        csv += format_double(m.x) + ',' + format_double(m.y) + ',' + format_double(m.freq()) +
               ',' + m.cell_id + ',' + m.site_id + ',' +
               format_double(rsrp_to_pathloss(m, *offset)) + '\n';
    }
    if (dropped > 0)
        std::cerr << "plkit: warning: dropped " << dropped
                  << " measurements whose cell had no matched sim points\n";

    const fs::path out_csv = resolve_output(cli.out_pathloss);
    manifest.doc["effective_config"] = {{"max_dist_m", cli.max_dist},
                                        {"per_cell", !cli.per_site}};
    manifest.stage_output(out_csv, csv);
    manifest.stage_output(resolve_output(cli.out_offsets), offsets_to_json(offsets).dump(2) + "\n");
    manifest.commit(out_csv.string() + ".manifest.json");
    std::cout << "wrote " << out_csv.string() << " and " << cli.out_offsets << " ("
              << offsets.size() << " offsets)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train / eval
// ---------------------------------------------------------------------------

struct TrainCli {
    std::vector<std::string> data;
    std::string features, out;
    int n_trees = 500, max_depth = 6, min_samples_leaf = 20;
    double learning_rate = 0.1, subsample = 1.0;
    std::uint64_t seed = 0;
    bool include_blockage = false, exclude_frequency = false;
};

int cmd_train(const TrainCli& cli) {
    Manifest manifest("train");
    std::vector<DatasetRow> rows;
    for (const auto& path : cli.data) {
        const auto part = parse_dataset_csv(manifest.note_input(path));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    TrainConfig cfg;
    cfg.n_trees = cli.n_trees;
    cfg.learning_rate = cli.learning_rate;
    cfg.max_depth = cli.max_depth;
    cfg.min_samples_leaf = cli.min_samples_leaf;
    cfg.subsample = cli.subsample;
    cfg.seed = cli.seed;
    cfg.feature_names = cli.features.empty()
                            ? default_feature_names(!cli.exclude_frequency, cli.include_blockage)
                            : parse_name_list(cli.features);
    const GbmModel model = fit(rows, cfg);

    const fs::path out = resolve_output(cli.out);
    manifest.doc["effective_config"] = {{"n_trees", cfg.n_trees},
                                        {"learning_rate", cfg.learning_rate},
                                        {"max_depth", cfg.max_depth},
                                        {"min_samples_leaf", cfg.min_samples_leaf},
                                        {"subsample", cfg.subsample},
                                        {"seed", cfg.seed},
                                        {"feature_names", cfg.feature_names}};
    manifest.doc["seed"] = cfg.seed;
    manifest.stage_output(out, save_model(model));
    manifest.commit(out.string() + ".manifest.json");
    std::cout << "wrote " << out.string() << " (" << rows.size() << " training rows)\n";
    return 0;
}

struct EvalCli {
    std::string model, data, out;
};

int cmd_eval(const EvalCli& cli) {
    Manifest manifest("eval");
    const GbmModel model = load_model(manifest.note_input(cli.model));
    const auto rows = parse_dataset_csv(manifest.note_input(cli.data));
    require(!rows.empty(), "dataset '" + cli.data + "' has no rows");
    const auto pred = predict_all(model, to_matrix(rows, model.feature_names));
    const double mae_db = mae(pred, targets(rows));
    std::cout << "mae_db=" << format_double(mae_db) << " n=" << rows.size() << "\n";
    if (!cli.out.empty()) {
        const fs::path out = resolve_output(cli.out);
        manifest.doc["effective_config"] = {{"model", cli.model}, {"data", cli.data}};
        manifest.stage_output(out, json{{"mae_db", mae_db},
                                        {"n_rows", rows.size()},
                                        {"model", cli.model},
                                        {"data", cli.data}}
                                           .dump(2) +
                                       "\n");
        manifest.commit(out.string() + ".manifest.json");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// experiment / demo
// ---------------------------------------------------------------------------

void run_experiment_to_dir(const ExperimentConfig& cfg, const fs::path& dir,
                           const std::optional<std::vector<int>>& sweep, Manifest& manifest) {
    manifest.doc["effective_config"] = experiment_config_to_json(cfg);
    manifest.doc["seed"] = cfg.seed;
    if (sweep) {
        const ResultTable table = repetition_sweep(cfg, *sweep);
        manifest.stage_output(dir / "results.csv", write_result_csv(table));
        manifest.stage_output(dir / "results.txt", render_result_table(table, cfg));
        manifest.stage_output(dir / "sweep.csv",
                              write_sweep_csv(table, *sweep, cfg.tests.size()));
    } else {
        const ExperimentResult result = run_experiment(cfg);
        manifest.stage_output(dir / "results.csv", write_result_csv(result.table));
        manifest.stage_output(dir / "results.txt", render_result_table(result.table, cfg));
        for (std::size_t i = 0; i < result.runs.size(); ++i)
            manifest.stage_output(dir / ("model_" + std::to_string(i + 1) + ".json"),
                                  save_model(result.runs[i].model));
    }
}

struct ExperimentCli {
    std::string config, out_dir, sweep;
    std::uint64_t seed = 0;
    CLI::Option* o_seed = nullptr;
};

int cmd_experiment(const ExperimentCli& cli) {
    Manifest manifest("experiment");
    const json doc = json::parse(manifest.note_input(cli.config));
    ExperimentConfig cfg =
        experiment_config_from_json(doc, fs::path(cli.config).parent_path());
    if (cli.o_seed && cli.o_seed->count()) cfg.seed = cli.seed;
    std::optional<std::vector<int>> sweep;
    if (!cli.sweep.empty()) sweep = parse_repeat_list(cli.sweep);

    const fs::path dir = resolve_output(cli.out_dir);
    run_experiment_to_dir(cfg, dir, sweep, manifest);
    manifest.commit(dir / "manifest.json");
    std::cout << "wrote " << (dir / "results.csv").string() << "\n";
    return 0;
}

struct DemoCli {
    std::string out_dir;
    std::uint64_t seed = 42;
    bool quick = false;
};

int cmd_demo(const DemoCli& cli) {
    Manifest manifest("demo");
    const fs::path dir = resolve_output(cli.out_dir);

    const demo::DemoSite site_a = demo::make_demo_site('A', cli.seed, cli.quick);
    const demo::DemoSite site_b = demo::make_demo_site('B', cli.seed, cli.quick);
    manifest.stage_output(dir / "a_dsm.asc", save_ascii_grid(site_a.stack->dsm));
    manifest.stage_output(dir / "a_dhm.asc", save_ascii_grid(site_a.stack->dhm));
    manifest.stage_output(dir / "b_dsm.asc", save_ascii_grid(site_b.stack->dsm));
    manifest.stage_output(dir / "b_dhm.asc", save_ascii_grid(site_b.stack->dhm));
    manifest.stage_output(dir / "a_measurements.csv",
                          write_measurements_csv(site_a.measurements));
    manifest.stage_output(dir / "b_measurements.csv",
                          write_measurements_csv(site_b.measurements));

    ExperimentConfig cfg = demo::demo_table_config_paths(cli.seed, cli.quick);
    manifest.stage_output(dir / "experiment.json",
                          experiment_config_to_json(cfg).dump(2) + "\n");
    // companion config for the repetition sweep (run it with: plkit experiment
    // --config sweep_experiment.json --out-dir <dir> --sweep 1..20)
    ExperimentConfig sweep_cfg = demo::demo_sweep_config(cli.seed, cli.quick);
    auto& sweep_site = sweep_cfg.sites.at("A");
    sweep_site.stack_mem.reset();
    sweep_site.measurements_mem.reset();
    sweep_site.dsm_path = "a_dsm.asc";
    sweep_site.dhm_path = "a_dhm.asc";
    sweep_site.measurements_path = "a_measurements.csv";
    manifest.stage_output(dir / "sweep_experiment.json",
                          experiment_config_to_json(sweep_cfg).dump(2) + "\n");

    // write the inputs first so the experiment below can read them back
    manifest.commit(dir / "manifest.json");
    manifest.pending_outputs.clear();

    cfg.base_dir = dir;
    run_experiment_to_dir(cfg, dir, std::nullopt, manifest);
    manifest.commit(dir / "manifest.json");
    std::cout << "demo complete; see " << (dir / "results.txt").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathloss-kit: terrain-aware pathloss datasets, models and experiments"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.failure_message(CLI::FailureMessage::simple);

    int threads = 0;
    auto* o_threads = app.add_option("--threads", threads,
                                     "cap worker threads (env: PLKIT_THREADS); results are "
                                     "independent of this setting");

    TerrainGenCli tg;
    auto* tg_cmd = app.add_subcommand("terrain-gen", "generate a synthetic DSM/DHM pair");
    tg_cmd->add_option("--config", tg.config, "JSON config; flags override its fields");
    tg_cmd->add_option("--out-dir", tg.out_dir, "output directory")->required();
    tg.o_name = tg_cmd->add_option("--name", tg.name, "output file prefix");
    tg.o_seed = tg_cmd->add_option("--seed", tg.seed, "generator seed");
    tg.o_size = tg_cmd->add_option("--size", tg.size, "grid size (2^k + 1 cells)");
    tg.o_cellsize = tg_cmd->add_option("--cellsize", tg.cellsize, "cell size in meters");
    tg.o_relief = tg_cmd->add_option("--relief", tg.relief, "ground elevation span in meters");
    tg.o_density = tg_cmd->add_option("--clutter-density", tg.clutter_density,
                                      "fraction of cells covered by clutter");
    tg.o_cmin = tg_cmd->add_option("--clutter-min", tg.clutter_min, "min clutter height");
    tg.o_cmax = tg_cmd->add_option("--clutter-max", tg.clutter_max, "max clutter height");

    SimulateCli sim;
    auto* sim_cmd = app.add_subcommand("simulate", "build a synthetic dataset over a grid");
    sim_cmd->add_option("--config", sim.config, "JSON config; flags override its fields");
    sim.o_dsm = sim_cmd->add_option("--dsm", sim.dsm, "DSM raster (.asc)");
    sim.o_dhm = sim_cmd->add_option("--dhm", sim.dhm, "DHM raster (.asc)");
    sim.o_site = sim_cmd->add_option("--site", sim.site, "site id tag");
    sim.o_tx_x = sim_cmd->add_option("--tx-x", sim.tx_x, "transmitter x (m)");
    sim.o_tx_y = sim_cmd->add_option("--tx-y", sim.tx_y, "transmitter y (m)");
    sim.o_tower = sim_cmd->add_option("--tower-height", sim.tower_height,
                                      "tower height above ground (m)");
    sim.o_freqs = sim_cmd->add_option("--freqs", sim.freqs, "comma list of MHz frequencies");
    sim.o_model = sim_cmd->add_option("--model", sim.model, "fspl | cost231 | sui");
    sim.o_terrain = sim_cmd->add_option("--terrain", sim.terrain, "SUI terrain A | B | C");
    sim.o_env = sim_cmd->add_option("--env", sim.env,
                                    "cost231 environment (suburban, metropolitan, rural)");
    sim.o_bounds = sim_cmd->add_option("--bounds", sim.bounds,
                                       "grid bounds xmin,ymin,xmax,ymax (default: raster inset)");
    sim.o_spacing = sim_cmd->add_option("--grid-spacing", sim.grid_spacing,
                                        "lattice spacing in meters");
    sim.o_grid_n = sim_cmd->add_option("--grid-n", sim.grid_n, "random point count");
    sim.o_radius = sim_cmd->add_option("--radius", sim.radius, "feature neighborhood radius (m)");
    sim.o_blockage = sim_cmd->add_flag("--include-blockage", sim.include_blockage,
                                       "add the Fresnel blockage feature");
    sim.o_rx_antenna = sim_cmd->add_option("--rx-antenna", sim.rx_antenna,
                                           "receiver antenna height (m)");
    sim.o_noise = sim_cmd->add_option("--noise-sigma", sim.noise_sigma,
                                      "log-normal shadowing sigma in dB (0 = deterministic)");
    sim.o_seed = sim_cmd->add_option("--seed", sim.seed, "seed for grids and shadowing");
    sim_cmd->add_option("--out", sim.out, "dataset CSV path")->required();
    sim_cmd->add_option("--points-out", sim.points_out,
                        "also write an x,y,freq_mhz,pathloss_db CSV for convert");
    sim_cmd->add_option("--map-out", sim.map_out, "write a coverage raster (.asc)");
    sim.o_map_freq = sim_cmd->add_option("--map-freq", sim.map_freq,
                                         "frequency for the coverage map (default: first)");

    FeaturesCli feat;
    auto* feat_cmd = app.add_subcommand("features", "compute feature vectors for points");
    feat_cmd->add_option("--dsm", feat.dsm, "DSM raster")->required();
    feat_cmd->add_option("--dhm", feat.dhm, "DHM raster")->required();
    feat_cmd->add_option("--tx-x", feat.tx_x, "transmitter x")->required();
    feat_cmd->add_option("--tx-y", feat.tx_y, "transmitter y")->required();
    feat_cmd->add_option("--tower-height", feat.tower_height, "tower height above ground")
        ->required();
    feat_cmd->add_option("--points", feat.points, "CSV of receiver points (header x,y)")
        ->required();
    feat_cmd->add_option("--freqs", feat.freqs, "comma list of MHz frequencies")->required();
    feat_cmd->add_option("--radius", feat.radius, "neighborhood radius (m)");
    feat_cmd->add_flag("--include-blockage", feat.include_blockage, "add blockage distance");
    feat_cmd->add_option("--rx-antenna", feat.rx_antenna, "receiver antenna height (m)");
    feat_cmd->add_option("--out", feat.out, "features CSV path")->required();

    ConvertCli conv;
    auto* conv_cmd = app.add_subcommand("convert", "turn RSRP logs into pathloss rows");
    conv_cmd->add_option("--measurements", conv.measurements, "measurement CSV")->required();
    conv_cmd->add_option("--sim-points", conv.sim_points, "simulated points CSV")->required();
    conv_cmd->add_option("--max-dist", conv.max_dist,
                         "match radius in meters (suggested: twice the raster cellsize)")
        ->required();
    conv_cmd->add_flag("--per-site", conv.per_site,
                       "average one offset per site instead of per cell");
    conv_cmd->add_option("--out-pathloss", conv.out_pathloss, "converted pathloss CSV")
        ->required();
    conv_cmd->add_option("--out-offsets", conv.out_offsets, "offsets JSON")->required();

    TrainCli train;
    auto* train_cmd = app.add_subcommand("train", "fit the boosted-tree regressor");
    train_cmd->add_option("--data", train.data, "dataset CSV (repeatable)")->required();
    train_cmd->add_option("--features", train.features, "comma list of feature columns");
    train_cmd->add_flag("--include-blockage", train.include_blockage,
                        "include blockage_m in the default feature set");
    train_cmd->add_flag("--exclude-frequency", train.exclude_frequency,
                        "drop freq_mhz from the default feature set");
    train_cmd->add_option("--n-trees", train.n_trees, "boosting iterations");
    train_cmd->add_option("--learning-rate", train.learning_rate, "shrinkage in (0, 1]");
    train_cmd->add_option("--max-depth", train.max_depth, "tree depth limit");
    train_cmd->add_option("--min-samples-leaf", train.min_samples_leaf, "leaf size floor");
    train_cmd->add_option("--subsample", train.subsample, "per-tree row fraction");
    train_cmd->add_option("--seed", train.seed, "subsampling seed");
    train_cmd->add_option("--out", train.out, "model JSON path")->required();

    EvalCli eval;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a dataset (MAE)");
    eval_cmd->add_option("--model", eval.model, "model JSON")->required();
    eval_cmd->add_option("--data", eval.data, "dataset CSV")->required();
    eval_cmd->add_option("--out", eval.out, "optional MAE report JSON");

    ExperimentCli exp;
    auto* exp_cmd = app.add_subcommand("experiment", "run a configured experiment");
    exp_cmd->add_option("--config", exp.config, "experiment JSON")->required();
    exp_cmd->add_option("--out-dir", exp.out_dir, "output directory")->required();
    exp_cmd->add_option("--sweep", exp.sweep, "repetition sweep, e.g. 1..20 or 1,2,5");
    exp.o_seed = exp_cmd->add_option("--seed", exp.seed, "override the config seed");

    DemoCli demo_cli;
    auto* demo_cmd = app.add_subcommand(
        "demo", "generate two synthetic environments and run the augmentation experiment");
    demo_cmd->add_option("--out-dir", demo_cli.out_dir, "output directory")->required();
    demo_cmd->add_option("--seed", demo_cli.seed, "demo seed");
    demo_cmd->add_flag("--quick", demo_cli.quick, "small grids and fewer trees");

    CLI11_PARSE(app, argc, argv);

    try {
        if (o_threads->count() > 0) {
            require(threads >= 1, "--threads must be >= 1");
            set_max_threads(threads);
        } else if (const char* env = std::getenv("PLKIT_THREADS"); env && *env) {
            set_max_threads(static_cast<int>(parse_int(env, "in PLKIT_THREADS")));
        }

        if (tg_cmd->parsed()) return cmd_terrain_gen(tg);
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (feat_cmd->parsed()) return cmd_features(feat);
        if (conv_cmd->parsed()) return cmd_convert(conv);
        if (train_cmd->parsed()) return cmd_train(train);
        if (eval_cmd->parsed()) return cmd_eval(eval);
        if (exp_cmd->parsed()) return cmd_experiment(exp);
        if (demo_cmd->parsed()) return cmd_demo(demo_cli);
    } catch (const std::exception& e) {
        std::string message = e.what();
        for (char& c : message)
            if (c == '\n') c = ' ';
        std::cerr << "plkit: error: " << message << "\n";
        return 1;
    }
    return 0;
}
