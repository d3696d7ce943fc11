#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lsr {

struct ScatterSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

/// Minimal SVG scatter plot: framed axes, a few ticks, one color per series,
/// text legend. No styling knobs; CSV stays the interchange format.
void write_scatter_svg(std::span<const ScatterSeries> series,
                       const std::string& x_label, const std::string& y_label,
                       const std::filesystem::path& path);

struct HistogramSeries {
    std::string label;
    std::map<std::uint32_t, std::size_t> buckets;  // bucket lower bound -> count
    std::uint32_t bucket_width = 1;
};

/// Side-by-side bars per bucket, one color per series.
void write_histogram_svg(std::span<const HistogramSeries> series,
                         const std::string& x_label, const std::string& y_label,
                         const std::filesystem::path& path);

}  // namespace lsr
