#ifndef NFV_PLOT_HPP
#define NFV_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfv {

struct PlotSeries
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal standalone SVG line chart with axis ticks and a legend.
inline std::string svg_line_chart(std::string const& title, std::string const& xlabel, std::string const& ylabel,
                                  std::vector<PlotSeries> const& series)
{
    double const w = 640;
    double const h = 400;
    double const left = 70;
    double const right = 20;
    double const top = 40;
    double const bottom = 50;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (auto const& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (xmax == xmin) {
        xmax = xmin + 1;
    }
    if (ymax == ymin) {
        ymax = ymin + 1;
    }
    ymin = std::min(ymin, 0.0);
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };
    static char const* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::ostringstream o;
    char buf[256];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double const xv = xmin + (xmax - xmin) * i / 5.0;
        double const yv = ymin + (ymax - ymin) * i / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"11\">%.4g</text>\n", px(xv),
                      h - bottom + 16, xv);
        o << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n", left - 6,
                      py(yv) + 4, yv);
        o << buf;
    }
    o << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << xlabel << "</text>\n";
    o << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << (top + h - bottom) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        auto const& s = series[k];
        char const* color = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            o << buf;
        }
        o << "\"/>\n";
        if (s.x.size() == 1 || s.x.size() <= 12) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(s.x[i]),
                              py(s.y[i]), color);
                o << buf;
            }
        }
        o << "<text x=\"" << w - right - 150 << "\" y=\"" << top + 14 * (k + 1) << "\" font-size=\"11\" fill=\""
          << color << "\">" << s.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(std::filesystem::path const& p)
{
    std::ifstream in(p);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline void write_text(std::filesystem::path const& p, std::string const& s)
{
    std::ofstream out(p);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << s;
}

} // namespace detail

/**
 * Renders aar.svg and anuc.svg (mean over seeds per iteration) from a
 * run directory's metrics.csv, and sweep_aar.svg / sweep_anuc.svg when a
 * sweep.csv is present. Returns the files written.
 */
inline std::vector<std::filesystem::path> plot_directory(std::filesystem::path const& dir)
{
    std::vector<std::filesystem::path> written;
    auto const metrics = dir / "metrics.csv";
    if (std::filesystem::exists(metrics)) {
        auto rows = detail::read_csv(metrics);
        std::map<double, std::pair<double, int>> aar, anuc;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() < 4) {
                throw std::runtime_error(metrics.string() + ": malformed row " + std::to_string(i + 1));
            }
            double const it = std::stod(rows[i][1]);
            aar[it].first += std::stod(rows[i][2]);
            aar[it].second += 1;
            anuc[it].first += std::stod(rows[i][3]);
            anuc[it].second += 1;
        }
        PlotSeries a{"mean over seeds", {}, {}};
        PlotSeries c{"mean over seeds", {}, {}};
        for (auto const& [x, v] : aar) {
            a.x.push_back(x);
            a.y.push_back(v.first / v.second);
        }
        for (auto const& [x, v] : anuc) {
            c.x.push_back(x);
            c.y.push_back(v.first / v.second);
        }
        detail::write_text(dir / "aar.svg", svg_line_chart("Acceptance ratio (sliding window)", "iteration", "AAR", {a}));
        detail::write_text(dir / "anuc.svg", svg_line_chart("Network utilization cost", "iteration", "ANUC", {c}));
        written.push_back(dir / "aar.svg");
        written.push_back(dir / "anuc.svg");
    }
    auto const sweep = dir / "sweep.csv";
    if (std::filesystem::exists(sweep)) {
        auto rows = detail::read_csv(sweep);
        PlotSeries a{"AAR", {}, {}};
        PlotSeries c{"ANUC", {}, {}};
        std::string param = "value";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            param = rows[i][0];
            double x = static_cast<double>(i);
            try {
                x = std::stod(rows[i][1]);
            } catch (std::exception const&) {
            }
            a.x.push_back(x);
            a.y.push_back(std::stod(rows[i][2]));
            c.x.push_back(x);
            c.y.push_back(std::stod(rows[i][4]));
        }
        detail::write_text(dir / "sweep_aar.svg", svg_line_chart("Mean AAR over repetitions", param, "AAR", {a}));
        detail::write_text(dir / "sweep_anuc.svg", svg_line_chart("Mean ANUC over repetitions", param, "ANUC", {c}));
        written.push_back(dir / "sweep_aar.svg");
        written.push_back(dir / "sweep_anuc.svg");
    }
    if (written.empty()) {
        throw std::runtime_error("no metrics.csv or sweep.csv in " + dir.string());
    }
    return written;
}

} // namespace nfv

#endif // NFV_PLOT_HPP
