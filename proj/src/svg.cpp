// Copyright 2026 The uqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "uqnn/report_io.hpp"

namespace uqnn {

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char *const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v) const {
        const double t = log ? std::log10(v) : v;
        return hi > lo ? (t - lo) / (hi - lo) : 0.5;
    }
};

Axis fit_axis(const std::vector<PlotSeries> &series, bool use_x, bool log) {
    Axis a;
    a.log = log;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (log && v <= 0.0) {
                continue;
            }
            const double t = log ? std::log10(v) : v;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

}  // namespace

std::string line_plot_svg(const PlotSpec &spec, const std::vector<PlotSeries> &series) {
    const Axis ax = fit_axis(series, true, spec.log_x);
    const Axis ay = fit_axis(series, false, spec.log_y);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = t / 4.0;
        const double vx = ax.lo + fx * (ax.hi - ax.lo);
        const double vy = ay.lo + fx * (ay.hi - ay.lo);
        o << "<text x=\"" << kLeft + fx * pw << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
          << (ax.log ? std::pow(10.0, vx) : vx) << "</text>\n";
        o << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph - fx * ph + 4 << "\" text-anchor=\"end\">"
          << (ay.log ? std::pow(10.0, vy) : vy) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";
    for (size_t k = 0; k < series.size(); ++k) {
        const auto &s = series[k];
        const char *color = kColors[k % std::size(kColors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if ((ax.log && s.x[i] <= 0.0) || (ay.log && s.y[i] <= 0.0)) {
                continue;
            }
            o << kLeft + ax.map(s.x[i]) * pw << ',' << kTop + ph - ay.map(s.y[i]) * ph << ' ';
        }
        o << "\"/>\n";
        o << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 14 * k << "\" fill=\"" << color << "\">"
          << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_line_plot(const std::filesystem::path &path, const PlotSpec &spec, const std::vector<PlotSeries> &series) {
    std::ofstream out(path);
    out << line_plot_svg(spec, series);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

}  // namespace uqnn
