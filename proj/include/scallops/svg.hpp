#pragma once

#include <optional>
#include <string>
#include <vector>

namespace scallops::svg {

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::optional<double> vertical_marker;  ///< dashed vertical line, e.g. an asymptote
    std::optional<double> y_max;            ///< clip the y range
};

/// Minimal standalone line chart.
std::string render(const Chart& chart, int width = 640, int height = 420);

}  // namespace scallops::svg
