#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcimb {

/// One named polyline: x and y must have equal length.
struct LineSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Static SVG line chart — batch figure output, no display server involved.
/// Axes autoscale to the data (y axis anchored at zero for positive data);
/// colors cycle through a fixed palette in series order.
class LineChart {
public:
    LineChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add(LineSeries series) {
        if (series.x.size() != series.y.size()) {
            throw std::invalid_argument("LineChart: series x/y length mismatch");
        }
        if (series.x.empty()) {
            throw std::invalid_argument("LineChart: empty series");
        }
        series_.push_back(std::move(series));
    }

    [[nodiscard]] std::string render() const {
        if (series_.empty()) throw std::logic_error("LineChart: nothing to draw");
        constexpr double kWidth = 720, kHeight = 440;
        constexpr double kLeft = 64, kRight = 160, kTop = 40, kBottom = 48;
        const double plot_w = kWidth - kLeft - kRight;
        const double plot_h = kHeight - kTop - kBottom;

        double x_min = series_[0].x[0], x_max = x_min;
        double y_min = series_[0].y[0], y_max = y_min;
        for (const LineSeries& s : series_) {
            x_min = std::min(x_min, *std::min_element(s.x.begin(), s.x.end()));
            x_max = std::max(x_max, *std::max_element(s.x.begin(), s.x.end()));
            y_min = std::min(y_min, *std::min_element(s.y.begin(), s.y.end()));
            y_max = std::max(y_max, *std::max_element(s.y.begin(), s.y.end()));
        }
        if (y_min > 0.0) y_min = 0.0;  // keep the zero baseline for error curves
        if (x_max == x_min) x_max = x_min + 1.0;
        if (y_max == y_min) y_max = y_min + 1.0;
        y_max += 0.05 * (y_max - y_min);

        const auto sx = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * plot_w; };
        const auto sy = [&](double v) {
            return kTop + plot_h - (v - y_min) / (y_max - y_min) * plot_h;
        };

        std::string svg;
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
               "viewBox=\"0 0 720 440\" font-family=\"sans-serif\">\n";
        svg += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
        svg += "<text x=\"" + fmt(kLeft + plot_w / 2) +
               "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title_) +
               "</text>\n";

        constexpr int kTicks = 5;
        for (int t = 0; t <= kTicks; ++t) {
            const double fx = x_min + (x_max - x_min) * t / kTicks;
            const double fy = y_min + (y_max - y_min) * t / kTicks;
            const double px = sx(fx), py = sy(fy);
            svg += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(px) +
                   "\" y2=\"" + fmt(kTop + plot_h) + "\" stroke=\"#dddddd\"/>\n";
            svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
                   fmt(kLeft + plot_w) + "\" y2=\"" + fmt(py) + "\" stroke=\"#dddddd\"/>\n";
            svg += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kTop + plot_h + 18) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + fmt(fx) + "</text>\n";
            svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py + 4) +
                   "\" text-anchor=\"end\" font-size=\"11\">" + fmt(fy) + "</text>\n";
        }
        svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(plot_w) +
               "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 10) +
               "\" text-anchor=\"middle\" font-size=\"13\">" + escape(x_label_) + "</text>\n";
        svg += "<text x=\"18\" y=\"" + fmt(kTop + plot_h / 2) +
               "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
               fmt(kTop + plot_h / 2) + ")\">" + escape(y_label_) + "</text>\n";

        for (std::size_t i = 0; i < series_.size(); ++i) {
            const LineSeries& s = series_[i];
            const std::string color = kPalette[i % kPaletteSize];
            std::string points;
            for (std::size_t j = 0; j < s.x.size(); ++j) {
                points += fmt(sx(s.x[j])) + "," + fmt(sy(s.y[j])) + " ";
            }
            svg += "<polyline fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
            const double ly = kTop + 14 + 18 * static_cast<double>(i);
            svg += "<line x1=\"" + fmt(kWidth - kRight + 12) + "\" y1=\"" + fmt(ly) +
                   "\" x2=\"" + fmt(kWidth - kRight + 36) + "\" y2=\"" + fmt(ly) +
                   "\" stroke=\"" + color + "\" stroke-width=\"1.8\"/>\n";
            svg += "<text x=\"" + fmt(kWidth - kRight + 42) + "\" y=\"" + fmt(ly + 4) +
                   "\" font-size=\"12\">" + escape(s.label) + "</text>\n";
        }
        svg += "</svg>\n";
        return svg;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write \"" + path + "\"");
        out << render();
    }

private:
    static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#8c564b"};
    static constexpr std::size_t kPaletteSize = 6;

    [[nodiscard]] static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    [[nodiscard]] static std::string escape(const std::string& text) {
        std::string out;
        for (char c : text) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out += c;
        }
        return out;
    }

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<LineSeries> series_;
};

} // namespace gcimb
