#ifndef RIVEQ_SVG_HPP
#define RIVEQ_SVG_HPP

#include <string>
#include <vector>

namespace riveq {

/// Hand-rolled polyline plots for eyeballing results; the CSV files are the
/// contract.
class SvgPlot {
public:
    SvgPlot(int width = 720, int height = 480);

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color = "#1f6fb2", double stroke = 1.5);
    void dashed(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color = "#b23a1f");
    void points(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color = "#b23a1f", double radius = 2.0);
    void labels(const std::string& x_label, const std::string& y_label);
    void write(const std::string& path) const;

private:
    struct Series {
        std::vector<double> xs, ys;
        std::string color;
        double stroke;
        bool dashed;
        bool dots;
        double radius;
    };
    void extend_range(const std::vector<double>& xs, const std::vector<double>& ys);

    int width_, height_;
    std::vector<Series> series_;
    std::string x_label_, y_label_;
    double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
    bool has_data_ = false;
};

} // namespace riveq

#endif
