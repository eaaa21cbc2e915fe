#ifndef TBAR_SVG_HPP
#define TBAR_SVG_HPP

#include <string>
#include <vector>

#include "tbar/balls.hpp"

namespace tbar {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers_only = false;
};

/// Static line plot with optional logarithmic axes; nonpositive values are skipped on log axes.
std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<PlotSeries>& series, bool logx, bool logy);

/// Balls of a collection on the unit square, with singularities marked by degree sign.
std::string svg_balls_plot(const std::string& title, const BallCollection& coll);

} // namespace tbar

#endif
