#include "fdl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/errors.hpp"

namespace fdl {

std::string format_fixed3(double value) {
    // llround + integer rendering keeps the output independent of locale and
    // library printf behavior.
    long long scaled = std::llround(value * 1000.0);
    std::string out;
    if (scaled < 0) {
        out.push_back('-');
        scaled = -scaled;
    }
    out += std::to_string(scaled / 1000);
    const long long frac = scaled % 1000;
    out.push_back('.');
    out.push_back(static_cast<char>('0' + frac / 100));
    out.push_back(static_cast<char>('0' + (frac / 10) % 10));
    out.push_back(static_cast<char>('0' + frac % 10));
    return out;
}

std::string render_svg(const Graph& g, const Layout& layout, const RenderStyle& style) {
    if (!all_finite(layout))
        throw DomainError("render_svg: layout has non-finite coordinates");
    if (static_cast<int>(layout.positions.size()) != g.node_count)
        throw DomainError("render_svg: layout size does not match node count");

    const double size = static_cast<double>(style.image_size);
    const double margin = style.margin_fraction * size;
    const double avail = size - 2.0 * margin;

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& p : layout.positions) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double span_x = g.node_count > 0 ? max_x - min_x : 0.0;
    const double span_y = g.node_count > 0 ? max_y - min_y : 0.0;

    double scale = 0.0;
    if (span_x > 0.0 && span_y > 0.0)
        scale = std::min(avail / span_x, avail / span_y);
    else if (span_x > 0.0)
        scale = avail / span_x;
    else if (span_y > 0.0)
        scale = avail / span_y;
    // scale stays 0 for a degenerate bounding box; everything lands centered.

    const double offset_x = margin + (avail - scale * span_x) / 2.0;
    const double offset_y = margin + (avail - scale * span_y) / 2.0;
    auto to_image = [&](Vec2 p) -> Vec2 {
        return {offset_x + (p.x - min_x) * scale,
                offset_y + (max_y - p.y) * scale}; // flip y
    };

    std::string svg;
    svg.reserve(128 + 96 * (g.edges.size() + layout.positions.size()));
    const std::string dim = std::to_string(style.image_size);
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + dim + "\" height=\"" + dim +
           "\" viewBox=\"0 0 " + dim + " " + dim + "\">\n";
    svg += "<rect width=\"" + dim + "\" height=\"" + dim + "\" fill=\"#ffffff\"/>\n";

    for (const auto& [u, v] : g.edges) {
        const Vec2 a = to_image(layout.positions[u]);
        const Vec2 b = to_image(layout.positions[v]);
        svg += "<line x1=\"" + format_fixed3(a.x) + "\" y1=\"" + format_fixed3(a.y) +
               "\" x2=\"" + format_fixed3(b.x) + "\" y2=\"" + format_fixed3(b.y) +
               "\" stroke=\"" + style.edge_color + "\" stroke-width=\"" +
               format_fixed3(style.edge_width) + "\"/>\n";
    }
    for (const auto& p : layout.positions) {
        const Vec2 c = to_image(p);
        svg += "<circle cx=\"" + format_fixed3(c.x) + "\" cy=\"" + format_fixed3(c.y) +
               "\" r=\"" + format_fixed3(style.node_radius) + "\" fill=\"" + style.node_color +
               "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace fdl
