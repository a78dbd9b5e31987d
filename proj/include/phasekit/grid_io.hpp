// Copyright 2026 The phasekit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "phasekit/projections.hpp"

// File formats:
//
//   grid text   — header line `dims: d1 d2 ...` followed by whitespace-
//                 separated row-major values.
//   PGM (P2)    — accepted for 2-D nonnegative grids. Written files carry a
//                 `# phasekit-scale <s>` comment so that pixel p decodes to
//                 p * s / 65535; files without the comment decode to raw
//                 pixel counts.

namespace phasekit {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_grid_text(std::ostream& os, const RealGrid& g) {
    os << "dims:";
    for (std::size_t d : g.dims()) os << ' ' << d;
    os << '\n';
    const std::size_t row = g.dims().back();
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << detail::format_double(g[i]);
        os << ((i % row == row - 1) ? '\n' : ' ');
    }
}

inline RealGrid read_grid_text(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "dims:") {
        throw std::invalid_argument("grid file: expected header starting with 'dims:'");
    }
    std::string rest;
    std::getline(is, rest);
    std::istringstream header(rest);
    Shape dims;
    std::size_t d = 0;
    while (header >> d) dims.push_back(d);
    const std::size_t n = element_count(dims);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(is >> values[i])) {
            throw std::invalid_argument("grid file: truncated value list");
        }
    }
    return RealGrid(std::move(dims), std::move(values));
}

/// Writes a 2-D nonnegative grid as 16-bit ASCII PGM. Values are stored as
/// round(v / max * 65535) and the scale recorded in a comment, so grids whose
/// values are multiples of max/65535 round-trip exactly.
inline void write_pgm(std::ostream& os, const RealGrid& g) {
    if (g.dims().size() != 2) {
        throw std::invalid_argument("pgm: only 2-D grids are supported");
    }
    double peak = 0.0;
    for (double v : g.values()) {
        if (v < 0.0) throw std::invalid_argument("pgm: negative value");
        peak = std::max(peak, v);
    }
    const double scale = peak > 0.0 ? peak : 1.0;
    const std::size_t rows = g.dims()[0];
    const std::size_t cols = g.dims()[1];
    os << "P2\n";
    os << "# phasekit-scale " << detail::format_double(scale) << '\n';
    os << cols << ' ' << rows << '\n' << 65535 << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const long q = std::lround(g[r * cols + c] / scale * 65535.0);
            os << q << (c + 1 == cols ? '\n' : ' ');
        }
    }
}

inline RealGrid read_pgm(std::istream& is) {
    std::string magic;
    is >> magic;
    if (magic != "P2") throw std::invalid_argument("pgm: only ASCII P2 is supported");

    double scale = 0.0;  // 0 means "raw counts"
    auto skip_comments = [&] {
        is >> std::ws;
        while (is.peek() == '#') {
            std::string line;
            std::getline(is, line);
            std::istringstream c(line);
            std::string hash, key;
            c >> hash >> key;
            if (key == "phasekit-scale") c >> scale;
            is >> std::ws;
        }
    };

    skip_comments();
    std::size_t cols = 0, rows = 0;
    long maxval = 0;
    is >> cols;
    skip_comments();
    is >> rows;
    skip_comments();
    is >> maxval;
    if (!is || cols == 0 || rows == 0 || maxval <= 0) {
        throw std::invalid_argument("pgm: malformed header");
    }
    std::vector<double> values(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i) {
        long p = 0;
        if (!(is >> p)) throw std::invalid_argument("pgm: truncated pixel data");
        if (p < 0 || p > maxval) throw std::invalid_argument("pgm: pixel out of range");
        values[i] = scale > 0.0
                        ? static_cast<double>(p) * scale / static_cast<double>(maxval)
                        : static_cast<double>(p);
    }
    return RealGrid(Shape{rows, cols}, std::move(values));
}

// --- path conveniences ------------------------------------------------------

inline RealGrid read_grid_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open " + path.string());
    // Sniff the magic: PGM starts with "P2", the text format with "dims:".
    std::string magic;
    is >> magic;
    is.seekg(0);
    if (magic == "P2") return read_pgm(is);
    return read_grid_text(is);
}

inline void write_grid_file(const std::filesystem::path& path, const RealGrid& g) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open " + path.string() + " for writing");
    write_grid_text(os, g);
}

inline void write_pgm_file(const std::filesystem::path& path, const RealGrid& g) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open " + path.string() + " for writing");
    write_pgm(os, g);
}

/// Magnitude data uses the grid text format; nonnegativity is validated on load.
inline MagnitudeData read_magnitude_file(const std::filesystem::path& path) {
    return MagnitudeData::from_grid(read_grid_file(path));
}

/// Support masks are stored as 0/1 grids; any nonzero site counts as inside.
inline SupportMask read_mask_file(const std::filesystem::path& path) {
    return SupportMask::from_grid(read_grid_file(path));
}

} // namespace phasekit
