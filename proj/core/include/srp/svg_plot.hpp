#pragma once

#include <string>
#include <vector>

namespace srp::plot {

struct Trace {
    std::string label;
    std::string color;  // any SVG color
    std::vector<double> values;
    double sample_rate_hz = 1.0;
};

/// Two stacked panels: the whole series with the zoom fragment marked by red
/// lines, and the fragment itself underneath.
struct OverlayPlot {
    std::string title;
    std::string y_label = "power [kW]";
    std::vector<Trace> traces;
    double zoom_start_s = 0.0;
    double zoom_len_s = 1.0;
};

std::string render_svg(const OverlayPlot& plot);

std::string xml_escape(const std::string& text);

}  // namespace srp::plot
