#include "moe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace moe::plot {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Scale {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;
    double px_lo = 0.0;
    double px_hi = 1.0;

    double map(double v) const
    {
        const double t = ((log ? std::log10(v) : v) - lo) / (hi - lo);
        return px_lo + t * (px_hi - px_lo);
    }
};

Scale make_scale(const std::vector<Series>& series, bool use_x, bool log, double px_lo, double px_hi)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Series& s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && v <= 0.0)) continue;
            const double t = log ? std::log10(v) : v;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad, log, px_lo, px_hi};
}

std::vector<double> ticks(const Scale& s)
{
    std::vector<double> out;
    if (s.log) {
        for (double e = std::ceil(s.lo); e <= s.hi; e += 1.0) out.push_back(std::pow(10.0, e));
        if (out.size() < 2) {
            for (double e = std::floor(s.lo); e <= s.hi; e += 1.0)
                for (double m : {2.0, 5.0}) {
                    const double v = std::pow(10.0, e) * m;
                    if (std::log10(v) >= s.lo && std::log10(v) <= s.hi) out.push_back(v);
                }
            std::sort(out.begin(), out.end());
        }
        return out;
    }
    const double span = s.hi - s.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(s.lo / step) * step; v <= s.hi; v += step) out.push_back(std::abs(v) < 1e-14 ? 0.0 : v);
    return out;
}

} // namespace

std::string xml_escape(const std::string& s)
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

std::string render_svg(const Axes& axes, const std::vector<Series>& series, int width, int height)
{
    const double left = 80, right = 20, top = 40, bottom = 60;
    const Scale xs = make_scale(series, true, axes.log_x, left, width - right);
    const Scale ys = make_scale(series, false, axes.log_y, height - bottom, top);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           xml_escape(axes.title) + "</text>\n";

    // frame
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(width - left - right) +
           "\" height=\"" + num(height - top - bottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xs)) {
        const double px = xs.map(t);
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" + num(px) + "\" y2=\"" +
               num(height - bottom + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(height - bottom + 18) + "\" text-anchor=\"middle\">" +
               xml_escape(tick_label(t)) + "</text>\n";
    }
    for (double t : ticks(ys)) {
        const double py = ys.map(t);
        svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(left) + "\" y2=\"" + num(py) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" +
               xml_escape(tick_label(t)) + "</text>\n";
    }
    svg += "<text x=\"" + num((left + width - right) / 2.0) + "\" y=\"" + num(height - 15.0) +
           "\" text-anchor=\"middle\">" + xml_escape(axes.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num((top + height - bottom) / 2.0) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + num((top + height - bottom) / 2.0) + ")\">" +
           xml_escape(axes.y_label) + "</text>\n";

    int legend_row = 0;
    for (const Series& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((axes.log_x && s.x[i] <= 0) || (axes.log_y && s.y[i] <= 0)) continue;
            const double px = xs.map(s.x[i]);
            const double py = ys.map(s.y[i]);
            if (s.markers)
                svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
            pts += num(px) + "," + num(py) + " ";
        }
        if (s.line && !pts.empty()) {
            svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
            if (!s.dash.empty()) svg += " stroke-dasharray=\"" + s.dash + "\"";
            svg += "/>\n";
        }
        if (!s.label.empty()) {
            const double ly = top + 16.0 + 16.0 * legend_row++;
            svg += "<line x1=\"" + num(left + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(left + 30) +
                   "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"";
            if (!s.dash.empty()) svg += " stroke-dasharray=\"" + s.dash + "\"";
            svg += "/>\n";
            svg += "<text x=\"" + num(left + 36) + "\" y=\"" + num(ly) + "\">" + xml_escape(s.label) + "</text>\n";
        }
    }
    for (std::size_t i = 0; i < axes.notes.size(); ++i) {
        svg += "<text x=\"" + num(width - right - 10) + "\" y=\"" + num(top + 16.0 + 16.0 * static_cast<double>(i)) +
               "\" text-anchor=\"end\">" + xml_escape(axes.notes[i]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace moe::plot
