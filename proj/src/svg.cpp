// SPDX-License-Identifier: Apache-2.0
//
// riss: sensing-assisted reflective surface simulation
// Copyright (C) 2026 The riss authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "riss/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace riss {

namespace {

constexpr double width = 640.0, height = 480.0, margin = 60.0;

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw RenderError("CSV lacks column '" + std::string(name) + "'");
    }
    bool has(std::string_view name) const { return std::find(header.begin(), header.end(), name) != header.end(); }
};

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

Table parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw RenderError("empty CSV");
    t.header = split(line);
    std::size_t n = 1;
    while (std::getline(in, line))
    {
        ++n;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw RenderError("CSV line " + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                              " fields");
        std::vector<double> row;
        for (const auto &c : cells)
        {
            char *end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            // Non-numeric cells (labels) become NaN and are skipped by the plots.
            row.push_back(end != c.c_str() && *end == '\0' ? v : std::numeric_limits<double>::quiet_NaN());
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty())
        throw RenderError("CSV has no data rows");
    return t;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Axes
{
    double x0, x1, y0, y1;
    bool logy = false;

    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double py(double y) const
    {
        if (logy)
            y = std::log10(y);
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }
};

void widen(double &lo, double &hi)
{
    if (!(hi > lo))
    {
        lo -= 0.5;
        hi += 0.5;
    }
}

std::string frame(const Axes &a, const std::string &xlabel, const std::string &ylabel)
{
    std::ostringstream s;
    s << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\"" << num(width - 2 * margin)
      << "\" height=\"" << num(height - 2 * margin) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double fx = a.x0 + (a.x1 - a.x0) * i / 4.0;
        const double fy = a.y0 + (a.y1 - a.y0) * i / 4.0;
        const double X = margin + (width - 2 * margin) * i / 4.0;
        const double Y = height - margin - (height - 2 * margin) * i / 4.0;
        s << "<text x=\"" << num(X) << "\" y=\"" << num(height - margin + 18) << "\" text-anchor=\"middle\">"
          << label(fx) << "</text>\n";
        s << "<text x=\"" << num(margin - 6) << "\" y=\"" << num(Y + 4) << "\" text-anchor=\"end\">"
          << label(a.logy ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    s << "<text x=\"" << num(width / 2) << "\" y=\"" << num(height - 16) << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
    s << "<text x=\"16\" y=\"" << num(height / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(height / 2) << ")\">" << ylabel << "</text>\n";
    return s.str();
}

std::string line_plot(const Table &t, std::size_t xc, std::size_t yc, bool logy)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto &r : t.rows)
        if (std::isfinite(r[xc]) && std::isfinite(r[yc]) && (!logy || r[yc] > 0.0))
            pts.emplace_back(r[xc], r[yc]);
    if (pts.empty())
        throw RenderError("no plottable points");
    Axes a{pts.front().first, pts.front().first, 0, 0, logy};
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (auto [x, y] : pts)
    {
        a.x0 = std::min(a.x0, x);
        a.x1 = std::max(a.x1, x);
        const double v = logy ? std::log10(y) : y;
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    a.y0 = ylo;
    a.y1 = yhi;
    widen(a.x0, a.x1);
    widen(a.y0, a.y1);
    std::ostringstream s;
    s << frame(a, t.header[xc], t.header[yc]);
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        s << (i ? " " : "") << num(a.px(pts[i].first)) << ',' << num(a.py(pts[i].second));
    s << "\"/>\n";
    return s.str();
}

std::string scatter(const Table &t)
{
    const std::size_t re = t.column("re"), im = t.column("im");
    double lim = 0.0;
    for (const auto &r : t.rows)
        if (std::isfinite(r[re]) && std::isfinite(r[im]))
            lim = std::max({lim, std::abs(r[re]), std::abs(r[im])});
    lim = lim > 0.0 ? 1.1 * lim : 1.0;
    const Axes a{-lim, lim, -lim, lim};
    static const char *colours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
    const bool labelled = t.has("label");
    const std::size_t lc = labelled ? t.column("label") : 0;
    std::ostringstream s;
    s << frame(a, "in-phase", "quadrature");
    for (const auto &r : t.rows)
    {
        if (!std::isfinite(r[re]) || !std::isfinite(r[im]))
            continue;
        const int q = labelled && std::isfinite(r[lc]) ? int(r[lc]) & 3 : 0;
        s << "<circle cx=\"" << num(a.px(r[re])) << "\" cy=\"" << num(a.py(r[im])) << "\" r=\"1.5\" fill=\""
          << colours[q] << "\"/>\n";
    }
    return s.str();
}

std::string raster(const Table &t)
{
    const std::size_t xc = t.column("x"), zc = t.column("z"), mc = t.column("magnitude");
    std::map<double, std::size_t> xs, zs;
    double peak = 0.0;
    for (const auto &r : t.rows)
    {
        xs.emplace(r[xc], 0);
        zs.emplace(r[zc], 0);
        if (std::isfinite(r[mc]))
            peak = std::max(peak, r[mc]);
    }
    std::size_t i = 0;
    for (auto &[k, v] : xs)
        v = i++;
    i = 0;
    for (auto &[k, v] : zs)
        v = i++;
    const Axes a{xs.begin()->first, xs.rbegin()->first, zs.begin()->first, zs.rbegin()->first};
    Axes b = a;
    widen(b.x0, b.x1);
    widen(b.y0, b.y1);
    const double cw = (width - 2 * margin) / double(xs.size());
    const double ch = (height - 2 * margin) / double(zs.size());
    std::ostringstream s;
    for (const auto &r : t.rows)
    {
        const double v = peak > 0.0 && std::isfinite(r[mc]) ? r[mc] / peak : 0.0;
        // Dark blue to yellow.
        const int red = int(std::lround(255 * v)), green = int(std::lround(40 + 200 * v)),
                  blue = int(std::lround(120 * (1 - v)));
        char colour[8];
        std::snprintf(colour, sizeof colour, "#%02x%02x%02x", red, green, blue);
        const double X = margin + double(xs[r[xc]]) * cw;
        const double Y = height - margin - double(zs[r[zc]] + 1) * ch;
        s << "<rect x=\"" << num(X) << "\" y=\"" << num(Y) << "\" width=\"" << num(cw) << "\" height=\"" << num(ch)
          << "\" fill=\"" << colour << "\"/>\n";
    }
    s << frame(b, "x (m)", "z (m)");
    return s.str();
}

} // namespace

std::string render_svg(std::string_view kind, std::string_view csv_text)
{
    const Table t = parse(csv_text);
    std::string body;
    if (kind == "beampattern")
        body = line_plot(t, t.column("angle_deg"), t.column("gain_db"), false);
    else if (kind == "trace")
    {
        if (t.header.size() < 2)
            throw RenderError("trace CSV needs at least two columns");
        if (t.has("r"))
            body = line_plot(t, 0, t.column("r"), true);
        else
            body = line_plot(t, 0, t.has("objective") ? t.column("objective") : 1, false);
    }
    else if (kind == "constellation")
        body = scatter(t);
    else if (kind == "heatmap")
        body = raster(t);
    else
        throw RenderError("unknown plot kind '" + std::string(kind) + "'");

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body << "</svg>\n";
    return s.str();
}

void render_svg_file(std::string_view kind, const std::filesystem::path &csv, const std::filesystem::path &svg)
{
    std::ifstream in(csv, std::ios::binary);
    if (!in)
        throw RenderError("cannot read " + csv.string());
    std::ostringstream text;
    text << in.rdbuf();
    const std::string out = render_svg(kind, text.str());
    std::ofstream os(svg, std::ios::binary);
    if (!os)
        throw RenderError("cannot write " + svg.string());
    os << out;
}

} // namespace riss
