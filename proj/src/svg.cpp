#include "sgdlab/svg.hpp"

#include "sgdlab/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sgdlab {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 55;

double to_scale(double v, AxisScale s)
{
    switch (s) {
    case AxisScale::log2: return std::log2(v);
    case AxisScale::log10: return std::log10(v);
    default: return v;
    }
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Mapper {
    double lo, hi;
    int pix_lo, pix_hi;
    double map(double v) const
    {
        const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return pix_lo + f * (pix_hi - pix_lo);
    }
};

void draw_ticks(std::ostream& os, const Mapper& mx, const Mapper& my, AxisScale xs, AxisScale ys)
{
    const int n_ticks = 6;
    for (int i = 0; i <= n_ticks; ++i) {
        const double tx = mx.lo + (mx.hi - mx.lo) * i / n_ticks;
        const double px = mx.map(tx);
        os << "<line x1='" << px << "' y1='" << kHeight - kMarginB << "' x2='" << px << "' y2='"
           << kHeight - kMarginB + 5 << "' stroke='black'/>\n";
        double label = tx;
        if (xs == AxisScale::log2) label = std::exp2(tx);
        if (xs == AxisScale::log10) label = std::pow(10.0, tx);
        os << "<text x='" << px << "' y='" << kHeight - kMarginB + 18
           << "' font-size='11' text-anchor='middle'>" << fmt(label) << "</text>\n";
    }
    for (int i = 0; i <= n_ticks; ++i) {
        const double ty = my.lo + (my.hi - my.lo) * i / n_ticks;
        const double py = my.map(ty);
        os << "<line x1='" << kMarginL - 5 << "' y1='" << py << "' x2='" << kMarginL << "' y2='"
           << py << "' stroke='black'/>\n";
        double label = ty;
        if (ys == AxisScale::log2) label = std::exp2(ty);
        if (ys == AxisScale::log10) label = std::pow(10.0, ty);
        os << "<text x='" << kMarginL - 8 << "' y='" << py + 4
           << "' font-size='11' text-anchor='end'>" << fmt(label) << "</text>\n";
    }
}

} // namespace

void write_svg_plot(const std::string& path, const SvgPlot& plot)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double sx = to_scale(s.x[i], plot.x_scale);
            const double sy = to_scale(s.y[i], plot.y_scale);
            if (!std::isfinite(sx) || !std::isfinite(sy)) continue;
            xmin = std::min(xmin, sx);
            xmax = std::max(xmax, sx);
            ymin = std::min(ymin, sy);
            ymax = std::max(ymax, sy);
        }
    }
    if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    const double padx = (xmax - xmin) * 0.06 + 1e-12;
    const double pady = (ymax - ymin) * 0.08 + 1e-12;
    const Mapper mx{xmin - padx, xmax + padx, kMarginL, kWidth - kMarginR};
    const Mapper my{ymin - pady, ymax + pady, kHeight - kMarginB, kMarginT};

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
       << "'>\n";
    os << "<desc>" << xml_escape(plot.data_table) << "</desc>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << kWidth / 2 << "' y='22' font-size='15' text-anchor='middle'>"
       << xml_escape(plot.title) << "</text>\n";
    os << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='"
       << kWidth - kMarginL - kMarginR << "' height='" << kHeight - kMarginT - kMarginB
       << "' fill='none' stroke='black'/>\n";
    draw_ticks(os, mx, my, plot.x_scale, plot.y_scale);
    os << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
       << "' font-size='13' text-anchor='middle'>" << xml_escape(plot.x_label) << "</text>\n";
    os << "<text x='16' y='" << kHeight / 2 << "' font-size='13' text-anchor='middle' "
       << "transform='rotate(-90 16 " << kHeight / 2 << ")'>" << xml_escape(plot.y_label)
       << "</text>\n";

    int legend_y = kMarginT + 16;
    for (const auto& s : plot.series) {
        if (s.line && s.x.size() > 1) {
            os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double sx = to_scale(s.x[i], plot.x_scale);
                const double sy = to_scale(s.y[i], plot.y_scale);
                if (!std::isfinite(sx) || !std::isfinite(sy)) continue;
                os << mx.map(sx) << "," << my.map(sy) << " ";
            }
            os << "'/>\n";
        }
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double sx = to_scale(s.x[i], plot.x_scale);
                const double sy = to_scale(s.y[i], plot.y_scale);
                if (!std::isfinite(sx) || !std::isfinite(sy)) continue;
                os << "<circle cx='" << mx.map(sx) << "' cy='" << my.map(sy)
                   << "' r='3.2' fill='" << s.color << "'/>\n";
            }
        }
        if (!s.label.empty()) {
            os << "<rect x='" << kWidth - kMarginR - 150 << "' y='" << legend_y - 9
               << "' width='12' height='4' fill='" << s.color << "'/>\n";
            os << "<text x='" << kWidth - kMarginR - 132 << "' y='" << legend_y
               << "' font-size='12'>" << xml_escape(s.label) << "</text>\n";
            legend_y += 16;
        }
    }
    if (!plot.annotation.empty())
        os << "<text x='" << kMarginL + 10 << "' y='" << kMarginT + 18 << "' font-size='13'>"
           << xml_escape(plot.annotation) << "</text>\n";
    os << "</svg>\n";
}

void write_svg_histogram(const std::string& path, const std::vector<double>& samples, int bins,
                         const std::string& title, const std::string& data_table)
{
    if (samples.empty() || bins < 1) throw std::invalid_argument("histogram needs samples and bins");
    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn_it, hi = std::max(*mx_it, *mn_it + 1e-12);
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double s : samples) {
        int k = static_cast<int>((s - lo) / (hi - lo) * bins);
        k = std::clamp(k, 0, bins - 1);
        counts[static_cast<std::size_t>(k)] += 1.0;
    }
    SvgPlot plot;
    plot.title = title;
    plot.x_label = "x";
    plot.y_label = "density";
    plot.data_table = data_table;
    SvgSeries s;
    s.label = "empirical";
    s.markers = false;
    const double width = (hi - lo) / bins;
    for (int k = 0; k < bins; ++k) {
        // step outline of the normalized histogram
        const double x0 = lo + k * width, x1 = x0 + width;
        const double d = counts[static_cast<std::size_t>(k)] /
                         (static_cast<double>(samples.size()) * width);
        s.x.push_back(x0);
        s.y.push_back(d);
        s.x.push_back(x1);
        s.y.push_back(d);
    }
    plot.series.push_back(std::move(s));
    write_svg_plot(path, plot);
}

std::optional<std::string> read_svg_data_table(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string all = ss.str();
    const auto a = all.find("<desc>");
    const auto b = all.find("</desc>");
    if (a == std::string::npos || b == std::string::npos || b < a) return std::nullopt;
    return all.substr(a + 6, b - a - 6);
}

} // namespace sgdlab
