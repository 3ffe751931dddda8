#pragma once

#include <string>

#include "fdl/graph.hpp"
#include "fdl/layout.hpp"

namespace fdl {

/// Visual style for snapshot rendering. Sizes are in SVG user units of the
/// image_size x image_size viewport.
struct RenderStyle {
    double node_radius = 3.0;
    double edge_width = 1.0;
    std::string node_color = "#2a6f97";
    std::string edge_color = "#9a9a9a";
    double margin_fraction = 0.05; // of image_size, per side
    int image_size = 1000;
};

/// Deterministic SVG snapshot: the layout is fitted into the image with a
/// uniform scale and translation (aspect preserved, margin respected, y
/// flipped so larger layout y is drawn higher), edges first and then nodes,
/// both in ascending index order. All numeric attributes use fixed 3-decimal
/// formatting, so identical inputs produce byte-identical output.
/// A layout whose nodes all coincide is drawn at the image center.
std::string render_svg(const Graph& g, const Layout& layout, const RenderStyle& style = {});

/// Fixed 3-decimal formatting used for every numeric SVG attribute.
std::string format_fixed3(double value);

} // namespace fdl
