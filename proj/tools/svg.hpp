#pragma once

// Minimal self-contained SVG plots for the CLI's optional figure output.

#include <filesystem>
#include <string>
#include <vector>

namespace lambmp::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  ///< draw points instead of a polyline
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

void write_plot(const std::filesystem::path& path, const Plot& plot);

}  // namespace lambmp::svg
