#include "segiso/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segiso/csv.hpp"

namespace segiso {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 56.0;

std::string num(double v) {
    // Two decimals keep the files small and byte-stable.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void header(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";
}

struct Range {
    double lo;
    double hi;
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) return Range{lo - 0.5, lo + 0.5};
    const double pad = 0.05 * (hi - lo);
    return Range{lo - pad, hi + pad};
}

}  // namespace

std::string svg_scatter(const std::vector<SvgPoint>& points, const std::string& title,
                        const std::string& x_label, const std::string& y_label) {
    std::ostringstream out;
    header(out, title);
    if (!points.empty()) {
        double xlo = points[0].x, xhi = points[0].x, ylo = points[0].y, yhi = points[0].y;
        for (const SvgPoint& p : points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        const Range xr = padded(xlo, xhi);
        const Range yr = padded(ylo, yhi);
        auto sx = [&](double x) {
            return kMargin + (x - xr.lo) / xr.span() * (kWidth - 2 * kMargin);
        };
        auto sy = [&](double y) {
            return kHeight - kMargin - (y - yr.lo) / yr.span() * (kHeight - 2 * kMargin);
        };
        out << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kHeight - kMargin) << "\" x2=\""
            << num(kWidth - kMargin) << "\" y2=\"" << num(kHeight - kMargin)
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kMargin) << "\" x2=\""
            << num(kMargin) << "\" y2=\"" << num(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
        for (const SvgPoint& p : points) {
            out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
                << "\" r=\"2.2\" fill=\"" << p.color << "\" fill-opacity=\"0.7\"/>\n";
        }
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string svg_intervals(const std::vector<SvgInterval>& intervals, const std::string& title,
                          const std::string& x_label) {
    std::ostringstream out;
    header(out, title);
    if (!intervals.empty()) {
        double lo = intervals[0].low, hi = intervals[0].high;
        for (const SvgInterval& iv : intervals) {
            lo = std::min(lo, iv.low);
            hi = std::max(hi, iv.high);
        }
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
        const Range xr = padded(lo, hi);
        auto sx = [&](double x) {
            return kMargin + 150.0 + (x - xr.lo) / xr.span() * (kWidth - 2 * kMargin - 150.0);
        };
        const double row_h =
            (kHeight - 2 * kMargin) / static_cast<double>(intervals.size());
        out << "<line x1=\"" << num(sx(0.0)) << "\" y1=\"" << num(kMargin) << "\" x2=\""
            << num(sx(0.0)) << "\" y2=\"" << num(kHeight - kMargin)
            << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            const SvgInterval& iv = intervals[i];
            const double y = kMargin + row_h * (static_cast<double>(i) + 0.5);
            out << "<text x=\"" << num(kMargin + 140.0) << "\" y=\"" << num(y + 4)
                << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
                << iv.label << "</text>\n";
            out << "<line x1=\"" << num(sx(iv.low)) << "\" y1=\"" << num(y) << "\" x2=\""
                << num(sx(iv.high)) << "\" y2=\"" << num(y) << "\" stroke=\"" << iv.color
                << "\" stroke-width=\"2\"/>\n";
            out << "<circle cx=\"" << num(sx(iv.value)) << "\" cy=\"" << num(y)
                << "\" r=\"3.5\" fill=\"" << iv.color << "\"/>\n";
        }
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace segiso
