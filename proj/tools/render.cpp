#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ghostsnr/errors.hpp"

namespace ghostsnr::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output", "cannot write " + path);
    f << content;
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

}  // namespace

std::string svg_loglog(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series) {
    const double W = 720, H = 480, left = 80, right = 170, top = 40, bottom = 60;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    auto ok = [](double x, double y) { return x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y); };
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i)
            if (ok(s.x[i], s.y[i])) {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
    if (!(xmin < xmax)) xmin = 0.1, xmax = 10;
    if (!(ymin < ymax)) ymin = ymin > 0 && std::isfinite(ymin) ? ymin / 10 : 0.1, ymax = ymin * 100;
    const double lx0 = std::floor(std::log10(xmin)), lx1 = std::ceil(std::log10(xmax));
    const double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * pw; };
    auto py = [&](double y) { return top + (ly1 - std::log10(y)) / (ly1 - ly0) * ph; };

    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
    const int xstep = std::max(1, static_cast<int>((lx1 - lx0) / 8));
    for (int e = static_cast<int>(lx0); e <= lx1; e += xstep) {
        const double x = px(std::pow(10.0, e));
        o << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + ph << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    const int ystep = std::max(1, static_cast<int>((ly1 - ly0) / 8));
    for (int e = static_cast<int>(ly0); e <= ly1; e += ystep) {
        const double y = py(std::pow(10.0, e));
        o << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    o << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
        std::ostringstream pts;
        pts.precision(6);
        for (size_t i = 0; i < s.x.size(); ++i)
            if (ok(s.x[i], s.y[i])) pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace ghostsnr::cli
