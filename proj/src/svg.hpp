#pragma once

// Minimal line-plot SVG emitter. Output depends only on the data: fixed number
// formatting, no timestamps or random ids.

#include <iosfwd>
#include <string>
#include <vector>

namespace doubletscope {

struct Point {
    double x;
    double y;
};

enum class Dash { solid, dashed, dot_dashed, dotted };

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    // A polyline; NaN points break it into separate runs.
    void add_line(std::vector<Point> points, std::string color, Dash dash = Dash::solid, std::string legend = {});
    // Horizontal reference line across the plot, labelled at the right edge.
    void add_hline(double y, std::string color, Dash dash, std::string label);
    void add_marker(Point p, std::string color, std::string label = {});

    // Axis ranges; when unset they are fitted to the data with a small margin.
    void set_x_range(double lo, double hi);
    void set_y_range(double lo, double hi);

    void write(std::ostream& out) const;

private:
    struct Line {
        std::vector<Point> points;
        std::string color;
        Dash dash;
        std::string legend;
    };
    struct HLine {
        double y;
        std::string color;
        Dash dash;
        std::string label;
    };
    struct Marker {
        Point p;
        std::string color;
        std::string label;
    };

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<Line> lines_;
    std::vector<HLine> hlines_;
    std::vector<Marker> markers_;
    bool x_fixed_ = false;
    bool y_fixed_ = false;
    double x_lo_ = 0.0;
    double x_hi_ = 1.0;
    double y_lo_ = 0.0;
    double y_hi_ = 1.0;
};

} // namespace doubletscope
