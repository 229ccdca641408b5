#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace doubletscope {

namespace {

constexpr double width = 800.0;
constexpr double height = 500.0;
constexpr double margin_left = 90.0;
constexpr double margin_right = 110.0;
constexpr double margin_top = 40.0;
constexpr double margin_bottom = 60.0;

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string tick_label(double v, double step)
{
    const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(step))) + 1, 0, 10);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0.0 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* dash_attr(Dash d)
{
    switch (d) {
    case Dash::dashed: return " stroke-dasharray=\"8,5\"";
    case Dash::dot_dashed: return " stroke-dasharray=\"8,4,2,4\"";
    case Dash::dotted: return " stroke-dasharray=\"2,4\"";
    case Dash::solid: break;
    }
    return "";
}

double nice_step(double span)
{
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0})
        if (m * mag >= raw)
            return m * mag;
    return 10.0 * mag;
}

void widen(double& lo, double& hi)
{
    if (!(lo < hi)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 1e-3;
        lo -= pad;
        hi += pad;
        return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label))
{
}

void SvgPlot::add_line(std::vector<Point> points, std::string color, Dash dash, std::string legend)
{
    lines_.push_back({std::move(points), std::move(color), dash, std::move(legend)});
}

void SvgPlot::add_hline(double y, std::string color, Dash dash, std::string label)
{
    hlines_.push_back({y, std::move(color), dash, std::move(label)});
}

void SvgPlot::add_marker(Point p, std::string color, std::string label)
{
    markers_.push_back({p, std::move(color), std::move(label)});
}

void SvgPlot::set_x_range(double lo, double hi)
{
    x_fixed_ = true;
    x_lo_ = lo;
    x_hi_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi)
{
    y_fixed_ = true;
    y_lo_ = lo;
    y_hi_ = hi;
}

void SvgPlot::write(std::ostream& out) const
{
    double xl = x_lo_, xh = x_hi_, yl = y_lo_, yh = y_hi_;
    if (!x_fixed_ || !y_fixed_) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        double dxl = inf, dxh = -inf, dyl = inf, dyh = -inf;
        const auto take = [&](Point p) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                return;
            dxl = std::min(dxl, p.x);
            dxh = std::max(dxh, p.x);
            dyl = std::min(dyl, p.y);
            dyh = std::max(dyh, p.y);
        };
        for (const Line& l : lines_)
            for (Point p : l.points)
                take(p);
        for (const Marker& m : markers_)
            take(m.p);
        if (dxl > dxh) {
            dxl = dyl = 0.0;
            dxh = dyh = 1.0;
        }
        if (!x_fixed_) {
            xl = dxl;
            xh = dxh;
            widen(xl, xh);
        }
        if (!y_fixed_) {
            yl = dyl;
            yh = dyh;
            widen(yl, yh);
        }
    }

    const double pw = width - margin_left - margin_right;
    const double ph = height - margin_top - margin_bottom;
    const auto sx = [&](double x) { return margin_left + (x - xl) / (xh - xl) * pw; };
    const auto sy = [&](double y) { return margin_top + (yh - y) / (yh - yl) * ph; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
        << "</text>\n"
        << "<defs><clipPath id=\"plot\"><rect x=\"" << margin_left << "\" y=\"" << margin_top << "\" width=\"" << pw
        << "\" height=\"" << ph << "\"/></clipPath></defs>\n";

    // Axes and ticks.
    out << "<rect x=\"" << margin_left << "\" y=\"" << margin_top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double xstep = nice_step(xh - xl);
    for (double t = std::ceil(xl / xstep) * xstep; t <= xh + 1e-9 * xstep; t += xstep) {
        const std::string x = fixed(sx(t), 2);
        out << "<line x1=\"" << x << "\" y1=\"" << fixed(margin_top + ph, 2) << "\" x2=\"" << x << "\" y2=\""
            << fixed(margin_top + ph + 5, 2) << "\" stroke=\"black\"/>"
            << "<text x=\"" << x << "\" y=\"" << fixed(margin_top + ph + 19, 2) << "\" text-anchor=\"middle\">"
            << tick_label(t, xstep) << "</text>\n";
    }
    const double ystep = nice_step(yh - yl);
    for (double t = std::ceil(yl / ystep) * ystep; t <= yh + 1e-9 * ystep; t += ystep) {
        const std::string y = fixed(sy(t), 2);
        out << "<line x1=\"" << fixed(margin_left - 5, 2) << "\" y1=\"" << y << "\" x2=\"" << fixed(margin_left, 2)
            << "\" y2=\"" << y << "\" stroke=\"black\"/>"
            << "<text x=\"" << fixed(margin_left - 8, 2) << "\" y=\"" << y
            << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << tick_label(t, ystep) << "</text>\n";
    }
    out << "<text x=\"" << fixed(margin_left + pw / 2, 2) << "\" y=\"" << fixed(height - 15, 2)
        << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n"
        << "<text x=\"20\" y=\"" << fixed(margin_top + ph / 2, 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << fixed(margin_top + ph / 2, 2) << ")\">" << escape(y_label_) << "</text>\n";

    out << "<g clip-path=\"url(#plot)\">\n";
    for (const HLine& h : hlines_) {
        if (h.y < yl || h.y > yh)
            continue;
        out << "<line x1=\"" << fixed(margin_left, 2) << "\" y1=\"" << fixed(sy(h.y), 2) << "\" x2=\""
            << fixed(margin_left + pw, 2) << "\" y2=\"" << fixed(sy(h.y), 2) << "\" stroke=\"" << h.color
            << "\" stroke-width=\"1\"" << dash_attr(h.dash) << "/>\n";
    }
    for (const Line& l : lines_) {
        std::vector<std::string> runs;
        std::string current;
        std::size_t count = 0;
        const auto flush = [&] {
            if (count >= 2)
                runs.push_back(current);
            current.clear();
            count = 0;
        };
        for (Point p : l.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                flush();
                continue;
            }
            if (count > 0)
                current += ' ';
            current += fixed(sx(p.x), 2) + ',' + fixed(sy(p.y), 2);
            ++count;
        }
        flush();
        for (const std::string& r : runs)
            out << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.6\"" << dash_attr(l.dash)
                << " points=\"" << r << "\"/>\n";
    }
    for (const Marker& m : markers_)
        out << "<circle cx=\"" << fixed(sx(m.p.x), 2) << "\" cy=\"" << fixed(sy(m.p.y), 2) << "\" r=\"5\" fill=\""
            << m.color << "\"/>\n";
    out << "</g>\n";

    // Labels outside the clip region.
    for (const HLine& h : hlines_) {
        if (h.y < yl || h.y > yh || h.label.empty())
            continue;
        out << "<text x=\"" << fixed(margin_left + pw + 6, 2) << "\" y=\"" << fixed(sy(h.y), 2)
            << "\" dominant-baseline=\"middle\" fill=\"" << h.color << "\">" << escape(h.label) << "</text>\n";
    }
    double legend_y = margin_top + 14;
    for (const Line& l : lines_) {
        if (l.legend.empty())
            continue;
        out << "<line x1=\"" << fixed(margin_left + 10, 2) << "\" y1=\"" << fixed(legend_y, 2) << "\" x2=\""
            << fixed(margin_left + 40, 2) << "\" y2=\"" << fixed(legend_y, 2) << "\" stroke=\"" << l.color
            << "\" stroke-width=\"2\"" << dash_attr(l.dash) << "/>"
            << "<text x=\"" << fixed(margin_left + 46, 2) << "\" y=\"" << fixed(legend_y, 2)
            << "\" dominant-baseline=\"middle\">" << escape(l.legend) << "</text>\n";
        legend_y += 16;
    }
    for (const Marker& m : markers_) {
        if (m.label.empty())
            continue;
        out << "<text x=\"" << fixed(sx(m.p.x) + 7, 2) << "\" y=\"" << fixed(sy(m.p.y) - 7, 2) << "\" fill=\""
            << m.color << "\">" << escape(m.label) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace doubletscope
