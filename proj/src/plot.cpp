#include "lsr/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lsr/error.hpp"

namespace lsr {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kMarginLeft = 70;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 20;
constexpr double kMarginBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string fmt_tick(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double scale(double v, double pixel_lo, double pixel_hi) const {
        double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return pixel_lo + t * (pixel_hi - pixel_lo);
    }
};

void open_svg(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void draw_frame_and_labels(std::ofstream& out, const std::string& x_label,
                           const std::string& y_label) {
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << kWidth - kMarginLeft - kMarginRight << "\" height=\""
        << kHeight - kMarginTop - kMarginBottom
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
        << kHeight - 12 << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
        << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">" << y_label
        << "</text>\n";
}

void draw_legend(std::ofstream& out, std::span<const std::string> labels) {
    double y = kMarginTop + 16;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        out << "<rect x=\"" << kMarginLeft + 10 << "\" y=\"" << y - 9
            << "\" width=\"10\" height=\"10\" fill=\""
            << kColors[s % std::size(kColors)] << "\"/>\n"
            << "<text x=\"" << kMarginLeft + 26 << "\" y=\"" << y
            << "\" font-size=\"12\">" << labels[s] << "</text>\n";
        y += 16;
    }
}

}  // namespace

void write_scatter_svg(std::span<const ScatterSeries> series,
                       const std::string& x_label, const std::string& y_label,
                       const std::filesystem::path& path) {
    Range xr{1e300, -1e300};
    Range yr{1e300, -1e300};
    bool any = false;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xr.expand(x);
            yr.expand(y);
            any = true;
        }
    }
    if (!any) {
        xr = {0, 1};
        yr = {0, 1};
    }

    std::ofstream out;
    open_svg(out, path);
    draw_frame_and_labels(out, x_label, y_label);

    const double px_lo = kMarginLeft;
    const double px_hi = kWidth - kMarginRight;
    const double py_lo = kHeight - kMarginBottom;  // svg y grows downward
    const double py_hi = kMarginTop;
    for (int t = 0; t <= 4; ++t) {
        double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
        double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        double px = xr.scale(fx, px_lo, px_hi);
        double py = yr.scale(fy, py_lo, py_hi);
        out << "<line x1=\"" << px << "\" y1=\"" << py_lo << "\" x2=\"" << px
            << "\" y2=\"" << py_lo + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << py_lo + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_tick(fx)
            << "</text>\n";
        out << "<line x1=\"" << px_lo - 5 << "\" y1=\"" << py << "\" x2=\"" << px_lo
            << "\" y2=\"" << py << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px_lo - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(fy)
            << "</text>\n";
    }

    std::vector<std::string> labels;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % std::size(kColors)];
        for (const auto& [x, y] : series[s].points) {
            out << "<circle cx=\"" << xr.scale(x, px_lo, px_hi) << "\" cy=\""
                << yr.scale(y, py_lo, py_hi) << "\" r=\"4\" fill=\"" << color
                << "\" fill-opacity=\"0.8\"/>\n";
        }
        labels.push_back(series[s].label);
    }
    draw_legend(out, labels);
    out << "</svg>\n";
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

void write_histogram_svg(std::span<const HistogramSeries> series,
                         const std::string& x_label, const std::string& y_label,
                         const std::filesystem::path& path) {
    std::uint32_t bucket_lo = 0;
    std::uint32_t bucket_hi = 0;
    std::size_t max_count = 0;
    std::uint32_t width = 1;
    bool any = false;
    for (const auto& s : series) {
        width = std::max(width, s.bucket_width);
        for (const auto& [bucket, count] : s.buckets) {
            if (!any) {
                bucket_lo = bucket;
                bucket_hi = bucket;
                any = true;
            }
            bucket_lo = std::min(bucket_lo, bucket);
            bucket_hi = std::max(bucket_hi, bucket);
            max_count = std::max(max_count, count);
        }
    }
    if (!any) {
        max_count = 1;
    }
    const std::size_t num_buckets = (bucket_hi - bucket_lo) / width + 1;

    std::ofstream out;
    open_svg(out, path);
    draw_frame_and_labels(out, x_label, y_label);

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double slot_w = plot_w / static_cast<double>(num_buckets);
    const double bar_w =
        slot_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));

    std::vector<std::string> labels;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % std::size(kColors)];
        for (const auto& [bucket, count] : series[s].buckets) {
            const auto slot = (bucket - bucket_lo) / width;
            const double h =
                plot_h * static_cast<double>(count) / static_cast<double>(max_count);
            const double x = kMarginLeft + slot * slot_w + s * bar_w;
            out << "<rect x=\"" << x << "\" y=\"" << kMarginTop + plot_h - h
                << "\" width=\"" << bar_w << "\" height=\"" << h << "\" fill=\""
                << color << "\" fill-opacity=\"0.7\"/>\n";
        }
        labels.push_back(series[s].label);
    }

    for (int t = 0; t <= 4; ++t) {
        const double frac = t / 4.0;
        const double bx = bucket_lo + frac * (bucket_hi + width - bucket_lo);
        const double px = kMarginLeft + frac * plot_w;
        const double cy = frac * static_cast<double>(max_count);
        const double py = kMarginTop + plot_h * (1.0 - frac);
        out << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">"
            << fmt_tick(std::floor(bx)) << "</text>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << fmt_tick(std::ceil(cy)) << "</text>\n";
    }
    draw_legend(out, labels);
    out << "</svg>\n";
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

}  // namespace lsr
