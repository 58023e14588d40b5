#include "srp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "srp/error.hpp"

namespace srp::plot {

namespace {

constexpr double kWidth = 960.0;
constexpr double kPanelH = 250.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kGap = 60.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Box {
    double x0, y0, w, h;
    double t0, t1, v0, v1;
    [[nodiscard]] double px(double t) const { return x0 + (t - t0) / (t1 - t0) * w; }
    [[nodiscard]] double py(double v) const { return y0 + h - (v - v0) / (v1 - v0) * h; }
};

void value_range(const std::vector<Trace>& traces, double t0, double t1, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& tr : traces) {
        const auto a = static_cast<std::size_t>(std::max(0.0, std::floor(t0 * tr.sample_rate_hz)));
        const auto b = std::min(tr.values.size(), static_cast<std::size_t>(std::ceil(t1 * tr.sample_rate_hz)) + 1);
        for (std::size_t i = a; i < b; ++i) {
            if (!std::isfinite(tr.values[i])) continue;
            lo = std::min(lo, tr.values[i]);
            hi = std::max(hi, tr.values[i]);
        }
    }
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

// Min/max per pixel column keeps long traces compact without hiding spikes.
void polyline(std::ostringstream& out, const Trace& tr, const Box& box) {
    const auto a = static_cast<std::size_t>(std::max(0.0, std::floor(box.t0 * tr.sample_rate_hz)));
    const auto b = std::min(tr.values.size(), static_cast<std::size_t>(std::ceil(box.t1 * tr.sample_rate_hz)) + 1);
    if (b <= a) return;
    out << "<polyline fill=\"none\" stroke=\"" << xml_escape(tr.color) << "\" stroke-width=\"1\" points=\"";
    const std::size_t n = b - a;
    const auto columns = static_cast<std::size_t>(box.w);
    if (n <= 2 * columns) {
        for (std::size_t i = a; i < b; ++i) {
            const double t = static_cast<double>(i) / tr.sample_rate_hz;
            out << num(box.px(t)) << ',' << num(box.py(tr.values[i])) << ' ';
        }
    } else {
        for (std::size_t c = 0; c < columns; ++c) {
            const std::size_t i0 = a + c * n / columns, i1 = std::max(i0 + 1, a + (c + 1) * n / columns);
            double lo = tr.values[i0], hi = tr.values[i0];
            for (std::size_t i = i0; i < i1; ++i) lo = std::min(lo, tr.values[i]), hi = std::max(hi, tr.values[i]);
            const double x = box.x0 + static_cast<double>(c) + 0.5;
            out << num(x) << ',' << num(box.py(hi)) << ' ' << num(x) << ',' << num(box.py(lo)) << ' ';
        }
    }
    out << "\"/>\n";
}

void panel(std::ostringstream& out, const OverlayPlot& plot, const Box& box, const std::string& caption) {
    out << "<rect x=\"" << num(box.x0) << "\" y=\"" << num(box.y0) << "\" width=\"" << num(box.w) << "\" height=\""
        << num(box.h) << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = box.v0 + (box.v1 - box.v0) * k / 4.0;
        const double t = box.t0 + (box.t1 - box.t0) * k / 4.0;
        out << "<text x=\"" << num(box.x0 - 6) << "\" y=\"" << num(box.py(v) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
        out << "<text x=\"" << num(box.px(t)) << "\" y=\"" << num(box.y0 + box.h + 16)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << num(box.x0 + box.w / 2) << "\" y=\"" << num(box.y0 + box.h + 32)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(caption) << "</text>\n";
    out << "<text x=\"14\" y=\"" << num(box.y0 + box.h / 2) << "\" font-size=\"12\" transform=\"rotate(-90 14 "
        << num(box.y0 + box.h / 2) << ")\" text-anchor=\"middle\">" << xml_escape(plot.y_label) << "</text>\n";
    out << "<g clip-path=\"url(#clip" << (box.y0 > kTop ? 1 : 0) << ")\">\n";
    for (const auto& tr : plot.traces) polyline(out, tr, box);
    out << "</g>\n";
}

}  // namespace

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_svg(const OverlayPlot& plot) {
    require(!plot.traces.empty(), ErrorCode::EmptyInput, "plot has no traces");
    double duration = 0.0;
    for (const auto& tr : plot.traces) {
        require(tr.sample_rate_hz > 0.0, ErrorCode::NonPositiveArgument, "trace sample rate must be positive");
        duration = std::max(duration, static_cast<double>(tr.values.size()) / tr.sample_rate_hz);
    }
    require(duration > 0.0, ErrorCode::EmptyInput, "plot traces are empty");
    const double z0 = std::clamp(plot.zoom_start_s, 0.0, duration);
    const double z1 = std::min(duration, z0 + std::max(plot.zoom_len_s, 1e-9));

    const double w = kWidth - kLeft - kRight;
    Box top{kLeft, kTop, w, kPanelH, 0.0, duration, 0.0, 1.0};
    value_range(plot.traces, top.t0, top.t1, top.v0, top.v1);
    Box bottom{kLeft, kTop + kPanelH + kGap, w, kPanelH, z0, z1 > z0 ? z1 : z0 + 1e-9, 0.0, 1.0};
    value_range(plot.traces, bottom.t0, bottom.t1, bottom.v0, bottom.v1);
    const double height = bottom.y0 + kPanelH + 70.0;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\">\n";
    out << "<defs>\n";
    for (int i = 0; i < 2; ++i) {
        const Box& b = i == 0 ? top : bottom;
        out << "<clipPath id=\"clip" << i << "\"><rect x=\"" << num(b.x0) << "\" y=\"" << num(b.y0) << "\" width=\""
            << num(b.w) << "\" height=\"" << num(b.h) << "\"/></clipPath>\n";
    }
    out << "</defs>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
        << xml_escape(plot.title) << "</text>\n";

    panel(out, plot, top, "time [s]");
    for (double t : {z0, z1}) {
        out << "<line x1=\"" << num(top.px(t)) << "\" y1=\"" << num(top.y0) << "\" x2=\"" << num(top.px(t))
            << "\" y2=\"" << num(top.y0 + top.h) << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
    }
    panel(out, plot, bottom, "time [s], zoomed fragment");

    double lx = kLeft + 10.0;
    const double ly = kTop + 14.0;
    for (const auto& tr : plot.traces) {
        out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 18) << "\" y2=\""
            << num(ly - 4) << "\" stroke=\"" << xml_escape(tr.color) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(ly) << "\" font-size=\"11\">" << xml_escape(tr.label)
            << "</text>\n";
        lx += 30.0 + 7.0 * static_cast<double>(tr.label.size());
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace srp::plot
