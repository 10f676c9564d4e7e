#include "riveq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "riveq/errors.hpp"

namespace riveq {

SvgPlot::SvgPlot(int width, int height) : width_(width), height_(height) {}

void SvgPlot::extend_range(const std::vector<double>& xs, const std::vector<double>& ys) {
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
        if (!has_data_) {
            xmin_ = xmax_ = xs[i];
            ymin_ = ymax_ = ys[i];
            has_data_ = true;
        }
        xmin_ = std::min(xmin_, xs[i]);
        xmax_ = std::max(xmax_, xs[i]);
        ymin_ = std::min(ymin_, ys[i]);
        ymax_ = std::max(ymax_, ys[i]);
    }
}

void SvgPlot::polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& color, double stroke) {
    if (xs.size() != ys.size()) throw Error("svg: x/y size mismatch");
    extend_range(xs, ys);
    series_.push_back({xs, ys, color, stroke, false, false, 0.0});
}

void SvgPlot::dashed(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::string& color) {
    if (xs.size() != ys.size()) throw Error("svg: x/y size mismatch");
    extend_range(xs, ys);
    series_.push_back({xs, ys, color, 1.0, true, false, 0.0});
}

void SvgPlot::points(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::string& color, double radius) {
    if (xs.size() != ys.size()) throw Error("svg: x/y size mismatch");
    extend_range(xs, ys);
    series_.push_back({xs, ys, color, 0.0, false, true, radius});
}

void SvgPlot::labels(const std::string& x_label, const std::string& y_label) {
    x_label_ = x_label;
    y_label_ = y_label;
}

void SvgPlot::write(const std::string& path) const {
    const double margin = 48.0;
    const double w = width_ - 2 * margin, h = height_ - 2 * margin;
    const double dx = xmax_ > xmin_ ? xmax_ - xmin_ : 1.0;
    const double dy = ymax_ > ymin_ ? ymax_ - ymin_ : 1.0;
    auto px = [&](double x) { return margin + (x - xmin_) / dx * w; };
    auto py = [&](double y) { return margin + h - (y - ymin_) / dy * h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
       << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w << "\" height=\""
       << h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    if (!x_label_.empty())
        os << "<text x=\"" << margin + w / 2 << "\" y=\"" << height_ - 12
           << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
    if (!y_label_.empty())
        os << "<text x=\"14\" y=\"" << margin + h / 2
           << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
           << margin + h / 2 << ")\">" << y_label_ << "</text>\n";

    for (const auto& s : series_) {
        if (s.dots) {
            for (size_t i = 0; i < s.xs.size(); ++i)
                os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i]) << "\" r=\""
                   << s.radius << "\" fill=\"" << s.color << "\"/>\n";
            continue;
        }
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.stroke
           << "\"";
        if (s.dashed) os << " stroke-dasharray=\"5,4\"";
        os << " points=\"";
        for (size_t i = 0; i < s.xs.size(); ++i) {
            if (i) os << ' ';
            os << px(s.xs[i]) << ',' << py(s.ys[i]);
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("svg: cannot open " + path + " for writing");
    f << os.str();
}

} // namespace riveq
