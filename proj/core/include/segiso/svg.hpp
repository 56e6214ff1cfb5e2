#pragma once

#include <string>
#include <vector>

namespace segiso {

// Minimal self-contained vector plots for the analysis artifacts, so an
// output directory can be eyeballed without external tooling. Anything
// publication-grade should start from the CSVs instead.

struct SvgPoint {
    double x{};
    double y{};
    std::string color = "#444444";
};

std::string svg_scatter(const std::vector<SvgPoint>& points, const std::string& title,
                        const std::string& x_label, const std::string& y_label);

struct SvgInterval {
    std::string label;
    double value{};
    double low{};
    double high{};
    std::string color = "#444444";
};

std::string svg_intervals(const std::vector<SvgInterval>& intervals, const std::string& title,
                          const std::string& x_label);

}  // namespace segiso
