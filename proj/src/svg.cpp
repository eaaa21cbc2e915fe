#include "tbar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tbar {

namespace {

constexpr double kWidth = 640, kHeight = 480, kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string header(const std::string& title) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << esc(title) << "</text>\n";
    return out.str();
}

} // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<PlotSeries>& series, bool logx, bool logy) {
    auto tx = [&](double x) { return logx ? std::log10(x) : x; };
    auto ty = [&](double y) { return logy ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!logx || x > 0) && (!logy || y > 0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (ty(y) - y0) / (y1 - y0) * ph; };

    std::ostringstream out;
    out << header(title);
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double sx = kLeft + pw * i / 4.0, sy = kTop + ph - ph * i / 4.0;
        out << "<text x=\"" << num(sx) << "\" y=\"" << num(kTop + ph + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(logx ? std::pow(10.0, fx) : fx) << "</text>\n";
        out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(logy ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << esc(xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" transform=\"rotate(-90 16 " << num(kTop + ph / 2)
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << esc(ylabel) << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % 6];
        std::ostringstream pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            pts << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
            out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        if (!s.markers_only)
            out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        out << "<text x=\"" << num(kLeft + 10) << "\" y=\"" << num(kTop + 16 + 14.0 * si) << "\" fill=\"" << color
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << esc(s.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_balls_plot(const std::string& title, const BallCollection& coll) {
    const double side = std::min(kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    auto px = [&](double x) { return kLeft + x * side; };
    auto py = [&](double y) { return kTop + side - y * side; };
    std::ostringstream out;
    out << header(title);
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << side << "\" height=\"" << side
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const Ball& b : coll.balls) {
        const char* color = b.aggregate == 0 ? "#999999" : (b.degree_sum > 0 ? "#1f77b4" : "#d62728");
        out << "<circle cx=\"" << num(px(b.center[0])) << "\" cy=\"" << num(py(b.center[1])) << "\" r=\""
            << num(b.radius * side) << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    }
    for (const Singularity& s : coll.singularities) {
        out << "<text x=\"" << num(px(s.position[0])) << "\" y=\"" << num(py(s.position[1]) + 4)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << (s.degree > 0 ? "+" : "")
            << s.degree << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft + side + 10) << "\" y=\"" << num(kTop + 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\">sigma = " << tick_label(coll.scale) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace tbar
