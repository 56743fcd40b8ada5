// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_RASTER_HPP
#define PATHLOSS_RASTER_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pathloss/common.hpp"

namespace pathloss {

/// Gridded elevation data in a projected planar system. Values are stored
/// row-major with row 0 the northernmost row, matching the ESRI ASCII grid
/// body order. Cell (col c, row r) has its center at
///   x = xll + (c + 0.5) * cellsize
///   y = yll + (nrows - 1 - r + 0.5) * cellsize
struct Raster {
    int ncols = 0;
    int nrows = 0;
    double xll = 0.0;
    double yll = 0.0;
    double cellsize = 0.0;
    double nodata = -9999.0;
    std::vector<double> values;

    double at(int col, int row) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) +
                      static_cast<std::size_t>(col)];
    }
    double& at(int col, int row) {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) +
                      static_cast<std::size_t>(col)];
    }

    bool is_nodata(double v) const { return v == nodata || std::isnan(v); }

    double xmin() const { return xll; }
    double ymin() const { return yll; }
    double xmax() const { return xll + ncols * cellsize; }
    double ymax() const { return yll + nrows * cellsize; }

    bool contains(double x, double y) const {
        return x >= xmin() && x <= xmax() && y >= ymin() && y <= ymax();
    }

    double cell_center_x(int col) const { return xll + (col + 0.5) * cellsize; }
    double cell_center_y(int row) const { return yll + (nrows - 1 - row + 0.5) * cellsize; }

    /// Containing cell of an in-bounds point; points on the max edges fall
    /// into the last cell.
    int col_of(double x) const {
        int c = static_cast<int>(std::floor((x - xll) / cellsize));
        return std::clamp(c, 0, ncols - 1);
    }
    int row_of(double y) const {
        int from_bottom = static_cast<int>(std::floor((y - yll) / cellsize));
        from_bottom = std::clamp(from_bottom, 0, nrows - 1);
        return nrows - 1 - from_bottom;
    }
};

inline void validate(const Raster& r) {
    require(r.ncols >= 2 && r.nrows >= 2, "raster must be at least 2x2, got " +
                                              std::to_string(r.ncols) + "x" + std::to_string(r.nrows));
    require(r.cellsize > 0.0, "raster cellsize must be positive");
    require(r.values.size() == static_cast<std::size_t>(r.ncols) * static_cast<std::size_t>(r.nrows),
            "raster value count does not match dimensions");
    for (double v : r.values)
        if (!r.is_nodata(v))
            require(std::isfinite(v), "raster contains a non-finite value");
}

enum class SampleMode { nearest, bilinear };

namespace detail {

inline double sample_nearest(const Raster& r, double x, double y) {
    const double v = r.at(r.col_of(x), r.row_of(y));
    if (r.is_nodata(v))
        throw Error("sample at (" + format_double(x) + ", " + format_double(y) +
                    ") resolves onto a nodata cell");
    return v;
}

}  // namespace detail

/// Point sample of a raster. Bilinear interpolates the four surrounding cell
/// centers and degrades to nearest at the outer half-cell margin. A nodata
/// neighbor also degrades the query to nearest; a nodata containing cell is
/// an error.
inline double sample(const Raster& r, double x, double y, SampleMode mode) {
    if (!r.contains(x, y))
        throw Error("sample point (" + format_double(x) + ", " + format_double(y) +
                    ") is outside the raster bounds");
    if (mode == SampleMode::nearest) return detail::sample_nearest(r, x, y);

    const double gx = (x - r.xll) / r.cellsize - 0.5;
    const double gy = (y - r.yll) / r.cellsize - 0.5;  // measured from the bottom row
    const int c0 = static_cast<int>(std::floor(gx));
    const int b0 = static_cast<int>(std::floor(gy));
    if (c0 < 0 || c0 + 1 >= r.ncols || b0 < 0 || b0 + 1 >= r.nrows)
        return detail::sample_nearest(r, x, y);

    const double wx = gx - c0;
    const double wy = gy - b0;
    const int r0 = r.nrows - 1 - b0;      // row index of the southern pair
    const int r1 = r0 - 1;                // northern pair
    const double v00 = r.at(c0, r0);
    const double v10 = r.at(c0 + 1, r0);
    const double v01 = r.at(c0, r1);
    const double v11 = r.at(c0 + 1, r1);
    if (r.is_nodata(v00) || r.is_nodata(v10) || r.is_nodata(v01) || r.is_nodata(v11))
        return detail::sample_nearest(r, x, y);

    const double south = v00 + wx * (v10 - v00);
    const double north = v01 + wx * (v11 - v01);
    return south + wy * (north - south);
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid (.asc)
// ---------------------------------------------------------------------------
// Header keys are case-insensitive; NODATA_value defaults to -9999 when
// absent. Body rows run north to south.

namespace detail {

struct AscToken {
    std::string text;
    int line = 0;
};

inline std::vector<AscToken> asc_tokenize(const std::string& text) {
    std::vector<AscToken> tokens;
    std::string current;
    int line = 1;
    for (char c : text) {
        if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                tokens.push_back({current, line});
                current.clear();
            }
            if (c == '\n') ++line;
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back({current, line});
    return tokens;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool starts_alpha(const std::string& s) {
    return !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

}  // namespace detail

inline Raster load_ascii_grid(const std::string& text) {
    const auto tokens = detail::asc_tokenize(text);
    std::map<std::string, double> header;
    std::size_t pos = 0;
    while (pos + 1 < tokens.size() && detail::starts_alpha(tokens[pos].text)) {
        const std::string key = detail::lower(tokens[pos].text);
        const auto& value_tok = tokens[pos + 1];
        if (key != "ncols" && key != "nrows" && key != "xllcorner" && key != "yllcorner" &&
            key != "cellsize" && key != "nodata_value")
            throw Error("malformed header: unknown key '" + tokens[pos].text + "' on line " +
                        std::to_string(tokens[pos].line));
        if (header.count(key))
            throw Error("malformed header: duplicate key '" + key + "' on line " +
                        std::to_string(tokens[pos].line));
        header[key] = parse_double(value_tok.text, "for header key '" + key + "' on line " +
                                                       std::to_string(value_tok.line));
        pos += 2;
    }
    if (pos < tokens.size() && detail::starts_alpha(tokens[pos].text))
        throw Error("malformed header: key '" + tokens[pos].text + "' on line " +
                    std::to_string(tokens[pos].line) + " has no value");
    for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"})
        if (!header.count(key)) throw Error(std::string("missing required key '") + key + "'");

    Raster r;
    r.ncols = static_cast<int>(header["ncols"]);
    r.nrows = static_cast<int>(header["nrows"]);
    require(r.ncols == header["ncols"] && r.nrows == header["nrows"],
            "ncols/nrows must be integers");
    r.xll = header["xllcorner"];
    r.yll = header["yllcorner"];
    r.cellsize = header["cellsize"];
    r.nodata = header.count("nodata_value") ? header["nodata_value"] : -9999.0;
    require(r.ncols >= 2 && r.nrows >= 2, "raster must be at least 2x2");
    require(r.cellsize > 0.0, "cellsize must be positive");

    const std::size_t expected =
        static_cast<std::size_t>(r.ncols) * static_cast<std::size_t>(r.nrows);
    r.values.reserve(expected);
    for (std::size_t i = pos; i < tokens.size(); ++i) {
        if (r.values.size() == expected)
            throw Error("too many values: expected " + std::to_string(expected) +
                        ", extra token on line " + std::to_string(tokens[i].line));
        r.values.push_back(parse_double(tokens[i].text,
                                        "in grid body on line " + std::to_string(tokens[i].line)));
    }
    if (r.values.size() != expected)
        throw Error("wrong value count: expected " + std::to_string(expected) + ", got " +
                    std::to_string(r.values.size()));
    validate(r);
    return r;
}

inline std::string save_ascii_grid(const Raster& r) {
    validate(r);
    std::string out;
    out += "ncols " + std::to_string(r.ncols) + "\n";
    out += "nrows " + std::to_string(r.nrows) + "\n";
    out += "xllcorner " + format_double(r.xll) + "\n";
    out += "yllcorner " + format_double(r.yll) + "\n";
    out += "cellsize " + format_double(r.cellsize) + "\n";
    out += "NODATA_value " + format_double(r.nodata) + "\n";
    for (int row = 0; row < r.nrows; ++row) {
        for (int col = 0; col < r.ncols; ++col) {
            if (col) out += ' ';
            out += format_double(r.at(col, row));
        }
        out += '\n';
    }
    return out;
}

inline Raster load_ascii_grid_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open raster file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_ascii_grid(buf.str());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline void save_ascii_grid_file(const Raster& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write raster file '" + path.string() + "'");
    out << save_ascii_grid(r);
    if (!out) throw Error("failed writing raster file '" + path.string() + "'");
}

}  // namespace pathloss

#endif  // PATHLOSS_RASTER_HPP
