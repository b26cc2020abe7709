#include "uand/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uand::svg {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMarginL = 60, kMarginR = 20, kMarginT = 40, kMarginB = 50;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double p = 0.05 * (hi - lo);
            lo -= p;
            hi += p;
        }
    }
};

double map_x(double v, const Range& r) {
    return kMarginL + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginL - kMarginR);
}

double map_y(double v, const Range& r) {
    return kHeight - kMarginB - (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginT - kMarginB);
}

// Diverging blue-white-red, t in [-1, 1].
std::string diverging_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t < 0) {
        r = static_cast<int>(255 * (1 + t));
        g = static_cast<int>(255 * (1 + t));
        b = 255;
    } else {
        r = 255;
        g = static_cast<int>(255 * (1 - t));
        b = static_cast<int>(255 * (1 - t));
    }
    std::ostringstream os;
    os << "rgb(" << r << "," << g << "," << b << ")";
    return os.str();
}

void write_frame(std::ostream& os, const std::string& title, const std::string& x_label,
                 const std::string& y_label, const Range& rx, const Range& ry) {
    os << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='"
       << kWidth - kMarginL - kMarginR << "' height='" << kHeight - kMarginT - kMarginB
       << "' fill='none' stroke='#333'/>\n";
    os << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>"
       << title << "</text>\n";
    os << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
       << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    os << "<text x='16' y='" << kHeight / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << kHeight / 2
       << ")'>" << y_label << "</text>\n";
    // Corner tick labels are enough for a diagnostic chart.
    os << "<text x='" << kMarginL << "' y='" << kHeight - kMarginB + 16
       << "' font-size='10'>" << rx.lo << "</text>\n";
    os << "<text x='" << kWidth - kMarginR << "' y='" << kHeight - kMarginB + 16
       << "' text-anchor='end' font-size='10'>" << rx.hi << "</text>\n";
    os << "<text x='" << kMarginL - 4 << "' y='" << kHeight - kMarginB
       << "' text-anchor='end' font-size='10'>" << ry.lo << "</text>\n";
    os << "<text x='" << kMarginL - 4 << "' y='" << kMarginT + 10
       << "' text-anchor='end' font-size='10'>" << ry.hi << "</text>\n";
}

std::ofstream open(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("svg: cannot open " + path);
    os << "<?xml version='1.0' encoding='UTF-8'?>\n";
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
       << kHeight << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    return os;
}

}  // namespace

void write_scatter(const std::string& path, const std::vector<Point>& points,
                   const std::string& title, const std::string& x_label,
                   const std::string& y_label) {
    Range rx, ry;
    double vmax = 0;
    for (const auto& p : points) {
        rx.add(p.x);
        ry.add(p.y);
        vmax = std::max(vmax, std::abs(p.value));
    }
    if (points.empty()) {
        rx.add(0);
        ry.add(0);
    }
    rx.pad();
    ry.pad();
    if (vmax == 0) vmax = 1;

    auto os = open(path);
    write_frame(os, title, x_label, y_label, rx, ry);
    for (const auto& p : points) {
        os << "<circle cx='" << map_x(p.x, rx) << "' cy='" << map_y(p.y, ry)
           << "' r='3' fill='" << diverging_color(p.value / vmax)
           << "' stroke='#555' stroke-width='0.3'/>\n";
    }
    os << "</svg>\n";
}

void write_lines(const std::string& path, const std::vector<Series>& series,
                 const std::string& title, const std::string& x_label,
                 const std::string& y_label, bool log_x, bool log_y) {
    static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };

    Range rx, ry;
    for (const auto& s : series)
        for (size_t k = 0; k < s.x.size(); ++k) {
            rx.add(tx(s.x[k]));
            ry.add(ty(s.y[k]));
        }
    if (series.empty()) {
        rx.add(0);
        ry.add(0);
    }
    rx.pad();
    ry.pad();

    auto os = open(path);
    write_frame(os, title, x_label, y_label, rx, ry);
    int ci = 0;
    for (const auto& s : series) {
        const char* color = palette[ci % 6];
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (size_t k = 0; k < s.x.size(); ++k)
            os << map_x(tx(s.x[k]), rx) << "," << map_y(ty(s.y[k]), ry) << " ";
        os << "'/>\n";
        os << "<text x='" << kWidth - kMarginR - 6 << "' y='" << kMarginT + 16 + 14 * ci
           << "' text-anchor='end' font-size='11' fill='" << color << "'>" << s.label
           << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

}  // namespace uand::svg
