#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace ndopt::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool scatter = false;
};

struct PlotSpec {
    std::string title;
    std::string xlabel, ylabel;
    bool logx = false, logy = false;
    int width = 820, height = 520;
    std::string comment; ///< manifest line, embedded as an XML comment
};

namespace detail {

inline const char* palette(size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf"};
    return colors[i % 7];
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline std::string esc(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '&') r += "&amp;";
        else if (c == '<') r += "&lt;";
        else if (c == '>') r += "&gt;";
        else r += c;
    }
    return r;
}

} // namespace detail

/// Minimal line/scatter plot: axes with tick labels, one polyline or point
/// cloud per series, and a legend. Log axes use decade ticks.
inline std::string render(const PlotSpec& spec, const std::vector<Series>& series) {
    const double ml = 70, mr = 20, mt = 34, mb = 48;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (spec.logx && x <= 0) continue;
            if (spec.logy && y <= 0) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmin == xmax) { xmin -= 0.5; xmax += 0.5; }
    if (ymin == ymax) { ymin = ymin == 0 ? -0.5 : ymin * 0.5; ymax = ymax == 0 ? 0.5 : ymax * 1.5; }

    const auto tx = [&](double x) {
        const double a = spec.logx ? std::log10(x) : x;
        const double lo = spec.logx ? std::log10(xmin) : xmin;
        const double hi = spec.logx ? std::log10(xmax) : xmax;
        return ml + (a - lo) / (hi - lo) * pw;
    };
    const auto ty = [&](double y) {
        const double a = spec.logy ? std::log10(y) : y;
        const double lo = spec.logy ? std::log10(ymin) : ymin;
        const double hi = spec.logy ? std::log10(ymax) : ymax;
        return mt + ph - (a - lo) / (hi - lo) * ph;
    };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
    if (!spec.comment.empty()) {
        // Double hyphens are illegal inside XML comments.
        std::string c = detail::esc(spec.comment);
        size_t pos = 0;
        while ((pos = c.find("--", pos)) != std::string::npos) c.replace(pos, 2, "- -");
        o << "<!-- " << c << " -->\n";
    }
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::esc(spec.title) << "</text>\n";

    // Axes.
    o << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";

    const auto ticks = [&](bool logscale, double lo, double hi) {
        std::vector<double> t;
        if (logscale) {
            for (int d = static_cast<int>(std::floor(std::log10(lo)));
                 d <= static_cast<int>(std::ceil(std::log10(hi))); ++d) {
                const double v = std::pow(10.0, d);
                if (v >= lo * 0.999 && v <= hi * 1.001) t.push_back(v);
            }
        } else {
            for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5);
        }
        return t;
    };
    for (double v : ticks(spec.logx, xmin, xmax)) {
        o << "<line x1=\"" << tx(v) << "\" y1=\"" << mt + ph << "\" x2=\"" << tx(v) << "\" y2=\""
          << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << tx(v) << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\" font-size=\"10\">" << detail::fmt(v) << "</text>\n";
    }
    for (double v : ticks(spec.logy, ymin, ymax)) {
        o << "<line x1=\"" << ml - 5 << "\" y1=\"" << ty(v) << "\" x2=\"" << ml << "\" y2=\""
          << ty(v) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << ml - 8 << "\" y=\"" << ty(v) + 3
          << "\" text-anchor=\"end\" font-size=\"10\">" << detail::fmt(v) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::esc(spec.xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\""
      << " transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << detail::esc(spec.ylabel)
      << "</text>\n";

    // Series.
    for (size_t i = 0; i < series.size(); ++i) {
        const char* color = detail::palette(i);
        if (series[i].scatter) {
            for (auto [x, y] : series[i].points) {
                if ((spec.logx && x <= 0) || (spec.logy && y <= 0)) continue;
                o << "<circle cx=\"" << tx(x) << "\" cy=\"" << ty(y)
                  << "\" r=\"2\" fill=\"" << color << "\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (auto [x, y] : series[i].points) {
                if ((spec.logx && x <= 0) || (spec.logy && y <= 0)) continue;
                o << tx(x) << "," << ty(y) << " ";
            }
            o << "\"/>\n";
        }
    }

    // Legend.
    const double lx = ml + pw - 170, ly = mt + 10;
    o << "<rect x=\"" << lx - 8 << "\" y=\"" << ly - 14 << "\" width=\"178\" height=\""
      << series.size() * 16 + 10 << "\" fill=\"white\" stroke=\"#888\"/>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        o << "<line x1=\"" << lx << "\" y1=\"" << ly + 16 * i << "\" x2=\"" << lx + 22
          << "\" y2=\"" << ly + 16 * i << "\" stroke=\"" << detail::palette(i)
          << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 16 * i + 4 << "\" font-size=\"11\">"
          << detail::esc(series[i].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace ndopt::svg
