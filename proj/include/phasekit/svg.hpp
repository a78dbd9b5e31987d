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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

// Minimal deterministic SVG line charts (metric-vs-iteration plots).

namespace phasekit {

struct ChartSeries {
    std::string label;
    std::vector<double> y;  // sampled at x = 1, 2, ...
};

struct ChartSpec {
    std::string title;
    std::string x_label = "iteration";
    std::string y_label;
    std::vector<ChartSeries> series;
    int width = 860;
    int height = 540;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Rounds a span to a "nice" tick step (1, 2, or 5 times a power of ten).
inline double nice_step(double span, int target_ticks) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r <= 1.0) return mag;
    if (r <= 2.0) return 2.0 * mag;
    if (r <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

} // namespace detail

inline void write_line_chart(std::ostream& os, const ChartSpec& spec) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    constexpr int kPaletteSize = 8;

    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;

    std::size_t max_len = 0;
    double ylo = 0.0, yhi = 1.0;
    bool first = true;
    for (const auto& s : spec.series) {
        max_len = std::max(max_len, s.y.size());
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            if (first) {
                ylo = yhi = v;
                first = false;
            } else {
                ylo = std::min(ylo, v);
                yhi = std::max(yhi, v);
            }
        }
    }
    if (max_len < 2) max_len = 2;
    if (yhi - ylo < 1e-12) {
        ylo -= 1.0;
        yhi += 1.0;
    }
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;

    const auto x_of = [&](double x) {
        return ml + (x - 1.0) / (static_cast<double>(max_len) - 1.0) * pw;
    };
    const auto y_of = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
       << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << ' '
       << spec.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">"
       << detail::xml_escape(spec.title) << "</text>\n";

    // axes
    os << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(mt)
       << "\" x2=\"" << detail::svg_num(ml) << "\" y2=\"" << detail::svg_num(mt + ph)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(mt + ph)
       << "\" x2=\"" << detail::svg_num(ml + pw) << "\" y2=\"" << detail::svg_num(mt + ph)
       << "\" stroke=\"black\"/>\n";

    const double ystep = detail::nice_step(yhi - ylo, 6);
    for (double ty = std::ceil(ylo / ystep) * ystep; ty <= yhi; ty += ystep) {
        const double yy = y_of(ty);
        os << "<line x1=\"" << detail::svg_num(ml - 4) << "\" y1=\"" << detail::svg_num(yy)
           << "\" x2=\"" << detail::svg_num(ml + pw) << "\" y2=\"" << detail::svg_num(yy)
           << "\" stroke=\"#dddddd\"/>\n";
        char lab[32];
        std::snprintf(lab, sizeof(lab), "%g", ty == 0.0 ? 0.0 : ty);
        os << "<text x=\"" << detail::svg_num(ml - 8) << "\" y=\"" << detail::svg_num(yy + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << lab
           << "</text>\n";
    }
    const double xstep = detail::nice_step(static_cast<double>(max_len) - 1.0, 8);
    for (double tx = 1.0; tx <= static_cast<double>(max_len); tx += xstep) {
        const double xx = x_of(tx);
        os << "<line x1=\"" << detail::svg_num(xx) << "\" y1=\"" << detail::svg_num(mt + ph)
           << "\" x2=\"" << detail::svg_num(xx) << "\" y2=\"" << detail::svg_num(mt + ph + 4)
           << "\" stroke=\"black\"/>\n";
        char lab[32];
        std::snprintf(lab, sizeof(lab), "%g", tx);
        os << "<text x=\"" << detail::svg_num(xx) << "\" y=\"" << detail::svg_num(mt + ph + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << lab
           << "</text>\n";
    }

    os << "<text x=\"" << detail::svg_num(ml + pw / 2) << "\" y=\""
       << detail::svg_num(mt + ph + 40)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << detail::xml_escape(spec.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << detail::svg_num(mt + ph / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
          "transform=\"rotate(-90 18 "
       << detail::svg_num(mt + ph / 2) << ")\">" << detail::xml_escape(spec.y_label)
       << "</text>\n";

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < spec.series[s].y.size(); ++i) {
            const double v = spec.series[s].y[i];
            if (!std::isfinite(v)) continue;
            os << detail::svg_num(x_of(static_cast<double>(i + 1))) << ','
               << detail::svg_num(y_of(v)) << ' ';
        }
        os << "\"/>\n";
        const double ly = mt + 14.0 + 16.0 * static_cast<double>(s);
        os << "<line x1=\"" << detail::svg_num(ml + pw - 150) << "\" y1=\""
           << detail::svg_num(ly - 4) << "\" x2=\"" << detail::svg_num(ml + pw - 130)
           << "\" y2=\"" << detail::svg_num(ly - 4) << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << detail::svg_num(ml + pw - 124) << "\" y=\""
           << detail::svg_num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << detail::xml_escape(spec.series[s].label) << "</text>\n";
    }
    os << "</svg>\n";
}

} // namespace phasekit
