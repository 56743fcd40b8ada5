// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors
//
// End-to-end checks of the plkit binary: exit codes, file contracts, the
// no-partial-output rule and manifest emission. Invoked by ctest with
// --plkit <path-to-binary>.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int tests_failed = 0;

void check(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++tests_failed;
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& command) {
    const std::string full = command + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return {};
    RunResult result;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    std::string plkit;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--plkit") plkit = argv[i + 1];
    if (plkit.empty()) {
        std::fprintf(stderr, "usage: cli_tests --plkit <binary>\n");
        return 2;
    }

    const fs::path dir = fs::temp_directory_path() / "plkit_cli_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();

    // --- terrain-gen ---------------------------------------------------------
    {
        const auto r = run(plkit + " terrain-gen --out-dir " + d +
                           " --name demo --seed 7 --size 33 --relief 25 --clutter-density 0.1");
        check(r.exit_code == 0, "terrain-gen exits 0");
        check(fs::exists(dir / "demo_dsm.asc") && fs::exists(dir / "demo_dhm.asc"),
              "terrain-gen writes both rasters");
        check(fs::exists(dir / "demo.manifest.json"), "terrain-gen writes a manifest");
        const auto manifest = nlohmann::json::parse(slurp(dir / "demo.manifest.json"));
        check(manifest.at("command") == "terrain-gen", "manifest records the command");
        check(manifest.at("effective_config").at("seed") == 7, "manifest records the seed");
    }

    // --- simulate ------------------------------------------------------------
    const std::string sim_args = " simulate --dsm " + d + "/demo_dsm.asc --dhm " + d +
                                 "/demo_dhm.asc --tx-x 161 --tx-y 157 --tower-height 40"
                                 " --freqs 1950,2132.5 --model fspl --grid-spacing 14"
                                 " --site demo --seed 5";
    {
        const auto r = run(plkit + sim_args + " --out " + d + "/sim.csv --points-out " + d +
                           "/sim_points.csv --map-out " + d + "/map.asc");
        check(r.exit_code == 0, "simulate exits 0");
        const std::string csv = slurp(dir / "sim.csv");
        check(csv.rfind("site,source,freq_mhz,", 0) == 0, "dataset CSV carries the header");
        check(fs::exists(dir / "map.asc"), "simulate writes the coverage map");
        check(fs::exists(dir / "sim.csv.manifest.json"), "simulate writes a manifest");
    }

    // byte-identical rerun under a different thread cap
    {
        const auto first = slurp(dir / "sim.csv");
        const auto r = run(plkit + " --threads 1" + sim_args + " --out " + d + "/sim_rerun.csv");
        check(r.exit_code == 0, "simulate rerun exits 0");
        check(slurp(dir / "sim_rerun.csv") == first,
              "simulate rerun with --threads 1 is byte-identical");
    }

    // out-of-bounds transmitter: nonzero exit, no partial output
    {
        const auto r = run(plkit + " simulate --dsm " + d + "/demo_dsm.asc --dhm " + d +
                           "/demo_dhm.asc --tx-x 9999 --tx-y 157 --tower-height 40"
                           " --freqs 1950 --grid-spacing 14 --out " + d + "/bad.csv");
        check(r.exit_code != 0, "out-of-bounds transmitter exits nonzero");
        check(r.output.find("plkit: error:") != std::string::npos,
              "failure is reported as a single plkit: error: line");
        check(!fs::exists(dir / "bad.csv"), "no partial dataset is written on failure");
        check(!fs::exists(dir / "bad.csv.manifest.json"), "no manifest is written on failure");
    }

    // --- features ------------------------------------------------------------
    {
        std::ofstream pts(dir / "points.csv");
        pts << "x,y\n120,140\n200,180\n";
        pts.close();
        const auto r = run(plkit + " features --dsm " + d + "/demo_dsm.asc --dhm " + d +
                           "/demo_dhm.asc --tx-x 161 --tx-y 157 --tower-height 40 --points " + d +
                           "/points.csv --freqs 1950 --include-blockage --out " + d +
                           "/features.csv");
        check(r.exit_code == 0, "features exits 0");
        const std::string csv = slurp(dir / "features.csv");
        check(csv.rfind("x,y,freq_mhz,", 0) == 0, "features CSV carries the header");
        check(std::count(csv.begin(), csv.end(), '\n') == 3, "features CSV has one row per point");
    }

    // --- convert -------------------------------------------------------------
    {
        // measurements colocated with sim points: rsrp = -(pl) + 21.5
        const std::string sim_points = slurp(dir / "sim_points.csv");
        std::istringstream in(sim_points);
        std::string line;
        std::getline(in, line);
        std::ofstream meas(dir / "meas.csv");
        meas.precision(17);
        meas << "x,y,rsrp_dbm,earfcn,freq_mhz,cell_id,site_id\n";
        int rows = 0;
        while (std::getline(in, line) && rows < 200) {
            std::stringstream ss(line);
            std::string x, y, f, pl;
            std::getline(ss, x, ',');
            std::getline(ss, y, ',');
            std::getline(ss, f, ',');
            std::getline(ss, pl, ',');
            if (std::stod(f) != 1950.0) continue;
            meas << x << ',' << y << ',' << (-std::stod(pl) + 21.5) << ",800,,c1,demo\n";
            ++rows;
        }
        meas.close();
        const auto r = run(plkit + " convert --measurements " + d + "/meas.csv --sim-points " +
                           d + "/sim_points.csv --max-dist 20 --out-pathloss " + d +
                           "/pl.csv --out-offsets " + d + "/offsets.json");
        check(r.exit_code == 0, "convert exits 0");
        const auto offsets = nlohmann::json::parse(slurp(dir / "offsets.json"));
        check(offsets.is_array() && offsets.size() == 1, "convert emits one offset record");
        check(std::fabs(offsets[0].at("delta_db").get<double>() - 21.5) < 1e-9,
              "recovered offset equals the generating delta");
        check(offsets[0].at("site_id") == "demo" && offsets[0].at("cell_id") == "c1",
              "offset record carries site and cell ids");
    }

    // --- train / eval --------------------------------------------------------
    {
        // deep trees on the zero-noise dataset: self-evaluation must overfit
        const auto r = run(plkit + " train --data " + d + "/sim.csv --n-trees 250" +
                           " --learning-rate 0.3 --max-depth 9 --min-samples-leaf 1 --out " + d +
                           "/model.json");
        check(r.exit_code == 0, "train exits 0");
        const auto e = run(plkit + " eval --model " + d + "/model.json --data " + d +
                           "/sim.csv --out " + d + "/report.json");
        check(e.exit_code == 0, "eval exits 0");
        check(e.output.find("mae_db=") != std::string::npos, "eval prints the MAE");
        const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
        check(report.at("mae_db").get<double>() <= 0.5,
              "overfit sanity: self-evaluation MAE is at most 0.5 dB");

        const auto bad = run(plkit + " eval --model " + d + "/sim.csv --data " + d + "/sim.csv");
        check(bad.exit_code != 0, "eval rejects a non-model file");
    }

    // --- demo + experiment reproducibility -------------------------------------
    {
        const auto r1 = run(plkit + " demo --out-dir " + d + "/demo1 --quick --seed 9");
        const auto r2 = run(plkit + " --threads 2 demo --out-dir " + d + "/demo2 --quick --seed 9");
        check(r1.exit_code == 0 && r2.exit_code == 0, "quick demos exit 0");
        check(slurp(dir / "demo1/results.csv") == slurp(dir / "demo2/results.csv"),
              "demo results are byte-identical across runs and thread caps");
        check(slurp(dir / "demo1/a_measurements.csv") == slurp(dir / "demo2/a_measurements.csv"),
              "generated measurement logs are byte-identical");
        const auto csv = slurp(dir / "demo1/results.csv");
        check(std::count(csv.begin(), csv.end(), '\n') == 7,
              "demo table has six result rows (three scenarios, two test sets)");

        const auto r3 = run(plkit + " demo --out-dir " + d + "/demo3 --quick --seed 10");
        check(slurp(dir / "demo1/results.csv") != slurp(dir / "demo3/results.csv"),
              "a different seed changes the results");

        const auto sweep = run(plkit + " experiment --config " + d +
                               "/demo1/sweep_experiment.json --out-dir " + d +
                               "/sweep --sweep 1,2,3");
        check(sweep.exit_code == 0, "experiment --sweep exits 0");
        const std::string sweep_csv = slurp(dir / "sweep/sweep.csv");
        check(sweep_csv.rfind("repeat,test_label,mae_db", 0) == 0,
              "sweep CSV carries the plot-ready header");
        check(std::count(sweep_csv.begin(), sweep_csv.end(), '\n') == 4,
              "sweep CSV has one row per repeat value");
    }

    // --- PLKIT_OUT_DIR redirect ------------------------------------------------
    {
        const auto r = run("PLKIT_OUT_DIR=" + d + "/envdir " + plkit +
                           " terrain-gen --out-dir ignored --name env --seed 3 --size 17");
        check(r.exit_code == 0, "terrain-gen with PLKIT_OUT_DIR exits 0");
        check(fs::exists(dir / "envdir/ignored/env_dsm.asc"),
              "PLKIT_OUT_DIR redirects relative outputs");
    }

    std::printf("%s\n", tests_failed == 0 ? "ALL CLI TESTS PASSED" : "CLI TESTS FAILED");
    return tests_failed == 0 ? 0 : 1;
}
