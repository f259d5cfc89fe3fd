#pragma once

#include <string>
#include <utility>
#include <vector>

namespace symosc {

/// Minimal SVG scatter/line plotter: one fixed-size panel per instance with
/// linear axes, ticks and a caption. Enough for the figure commands; not a
/// plotting library.
class SvgPanel {
public:
    SvgPanel(double x_min, double x_max, double y_min, double y_max, std::string caption);

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 1.0);
    void scatter(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                 double radius = 2.0, bool hollow = false);
    void hband(double y_lo, double y_hi, const std::string& color, double opacity = 0.25);
    void vline(double x, const std::string& color);
    void label(double x, double y, const std::string& text, const std::string& color = "#333");

    /// Rendered <g> group at the given vertical offset within a page.
    std::string render(double y_offset) const;

    static constexpr double kWidth = 640.0;
    static constexpr double kHeight = 240.0;

private:
    double tx(double x) const;
    double ty(double y) const;

    double x0_, x1_, y0_, y1_;
    std::string caption_;
    std::string body_;
};

/// Stacks panels vertically into one SVG document.
std::string svg_document(const std::vector<SvgPanel>& panels);
void write_svg(const std::string& path, const std::vector<SvgPanel>& panels);

}  // namespace symosc
