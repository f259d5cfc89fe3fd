#include "symosc/svg.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symosc {

namespace {
constexpr double kMarginL = 56.0, kMarginR = 16.0, kMarginT = 28.0, kMarginB = 34.0;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}
}  // namespace

SvgPanel::SvgPanel(double x_min, double x_max, double y_min, double y_max, std::string caption)
    : x0_(x_min), x1_(x_max), y0_(y_min), y1_(y_max), caption_(std::move(caption)) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) y1_ = y0_ + 1.0;
}

double SvgPanel::tx(double x) const {
    return kMarginL + (x - x0_) / (x1_ - x0_) * (kWidth - kMarginL - kMarginR);
}

double SvgPanel::ty(double y) const {
    return kHeight - kMarginB - (y - y0_) / (y1_ - y0_) * (kHeight - kMarginT - kMarginB);
}

void SvgPanel::polyline(const std::vector<std::pair<double, double>>& pts,
                        const std::string& color, double width) {
    if (pts.size() < 2) return;
    std::ostringstream os;
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='" << width
       << "' points='";
    for (const auto& [x, y] : pts) os << fmt(tx(x)) << "," << fmt(ty(y)) << " ";
    os << "'/>\n";
    body_ += os.str();
}

void SvgPanel::scatter(const std::vector<std::pair<double, double>>& pts,
                       const std::string& color, double radius, bool hollow) {
    std::ostringstream os;
    for (const auto& [x, y] : pts) {
        os << "<circle cx='" << fmt(tx(x)) << "' cy='" << fmt(ty(y)) << "' r='" << radius
           << "' fill='" << (hollow ? "none" : color) << "' stroke='" << color << "'/>\n";
    }
    body_ += os.str();
}

void SvgPanel::hband(double y_lo, double y_hi, const std::string& color, double opacity) {
    std::ostringstream os;
    const double top = ty(y_hi), bot = ty(y_lo);
    os << "<rect x='" << fmt(kMarginL) << "' y='" << fmt(top) << "' width='"
       << fmt(kWidth - kMarginL - kMarginR) << "' height='" << fmt(bot - top) << "' fill='"
       << color << "' opacity='" << opacity << "'/>\n";
    body_ += os.str();
}

void SvgPanel::vline(double x, const std::string& color) {
    std::ostringstream os;
    os << "<line x1='" << fmt(tx(x)) << "' y1='" << fmt(ty(y0_)) << "' x2='" << fmt(tx(x))
       << "' y2='" << fmt(ty(y1_)) << "' stroke='" << color << "' stroke-dasharray='3,3'/>\n";
    body_ += os.str();
}

void SvgPanel::label(double x, double y, const std::string& text, const std::string& color) {
    std::ostringstream os;
    os << "<text x='" << fmt(tx(x)) << "' y='" << fmt(ty(y)) << "' font-size='10' fill='"
       << color << "'>" << text << "</text>\n";
    body_ += os.str();
}

std::string SvgPanel::render(double y_offset) const {
    std::ostringstream os;
    os << "<g transform='translate(0," << fmt(y_offset) << ")'>\n";
    os << "<rect x='" << fmt(kMarginL) << "' y='" << fmt(kMarginT) << "' width='"
       << fmt(kWidth - kMarginL - kMarginR) << "' height='" << fmt(kHeight - kMarginT - kMarginB)
       << "' fill='none' stroke='#888'/>\n";
    os << "<text x='" << fmt(kMarginL) << "' y='" << fmt(kMarginT - 8.0)
       << "' font-size='12' fill='#000'>" << caption_ << "</text>\n";
    // Four ticks per axis.
    for (int i = 0; i <= 4; ++i) {
        const double x = x0_ + (x1_ - x0_) * i / 4.0;
        const double y = y0_ + (y1_ - y0_) * i / 4.0;
        os << "<text x='" << fmt(tx(x) - 8.0) << "' y='" << fmt(kHeight - kMarginB + 14.0)
           << "' font-size='9' fill='#555'>" << fmt(x) << "</text>\n";
        os << "<text x='" << fmt(6.0) << "' y='" << fmt(ty(y) + 3.0)
           << "' font-size='9' fill='#555'>" << fmt(y) << "</text>\n";
    }
    os << body_;
    os << "</g>\n";
    return os.str();
}

std::string svg_document(const std::vector<SvgPanel>& panels) {
    std::ostringstream os;
    const double total = SvgPanel::kHeight * static_cast<double>(panels.size());
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << SvgPanel::kWidth << "' height='"
       << total << "' viewBox='0 0 " << SvgPanel::kWidth << " " << total << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        os << panels[i].render(SvgPanel::kHeight * static_cast<double>(i));
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const std::vector<SvgPanel>& panels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg: cannot open " + path);
    out << svg_document(panels);
}

}  // namespace symosc
