#include <doctest.h>

#include <algorithm>
#include <string>

#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/svg.hpp"

using namespace fdl;

namespace {

Layout positions(std::vector<Vec2> p, Bounds b = {100.0, 100.0}) {
    Layout layout;
    layout.positions = std::move(p);
    layout.bounds = b;
    return layout;
}

// Collect every value of a numeric attribute like cx="..." in order.
std::vector<double> attr_values(const std::string& svg, const std::string& attr) {
    std::vector<double> out;
    const std::string needle = attr + "=\"";
    std::size_t pos = 0;
    while ((pos = svg.find(needle, pos)) != std::string::npos) {
        pos += needle.size();
        const std::size_t end = svg.find('"', pos);
        out.push_back(std::stod(svg.substr(pos, end - pos)));
        pos = end;
    }
    return out;
}

} // namespace

TEST_CASE("format_fixed3") {
    CHECK(format_fixed3(0.0) == "0.000");
    CHECK(format_fixed3(1.0) == "1.000");
    CHECK(format_fixed3(12.3456) == "12.346");
    CHECK(format_fixed3(-3.0004) == "-3.000");
    CHECK(format_fixed3(-0.0006) == "-0.001");
    CHECK(format_fixed3(2.9999999) == "3.000");
    CHECK(format_fixed3(999.9995) == "1000.000");
}

TEST_CASE("render_svg") {
    Graph square = parse_edge_list("a b\nb c\nc d\nd a");

    SUBCASE("single node lands at the image center") {
        Graph one = parse_gml("graph [ node [ id 1 ] ]");
        const std::string svg = render_svg(one, positions({{77.0, 3.0}}));
        const auto cx = attr_values(svg, "cx");
        const auto cy = attr_values(svg, "cy");
        REQUIRE(cx.size() == 1);
        CHECK(cx[0] == doctest::Approx(500.0));
        CHECK(cy[0] == doctest::Approx(500.0));
    }
    SUBCASE("byte determinism") {
        Layout layout = positions({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
        CHECK(render_svg(square, layout) == render_svg(square, layout));
    }
    SUBCASE("square layout with margin 0.1 spans exactly [100, 900]") {
        RenderStyle style;
        style.margin_fraction = 0.1;
        style.image_size = 1000;
        Layout layout = positions({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
        const std::string svg = render_svg(square, layout, style);
        for (const char* attr : {"cx", "cy"}) {
            const auto values = attr_values(svg, attr);
            CHECK(*std::min_element(values.begin(), values.end()) == doctest::Approx(100.0));
            CHECK(*std::max_element(values.begin(), values.end()) == doctest::Approx(900.0));
        }
    }
    SUBCASE("coincident layout still produces centered output") {
        Layout layout = positions({{5, 5}, {5, 5}, {5, 5}, {5, 5}});
        const std::string svg = render_svg(square, layout);
        for (double v : attr_values(svg, "cx")) CHECK(v == doctest::Approx(500.0));
        CHECK(svg.find("</svg>") != std::string::npos);
    }
    SUBCASE("larger layout y is drawn higher (smaller image y)") {
        Graph pair = parse_gml("graph [ node [ id 1 ] node [ id 2 ] ]");
        const std::string svg = render_svg(pair, positions({{0.0, 0.0}, {0.0, 10.0}}));
        const auto cy = attr_values(svg, "cy");
        REQUIRE(cy.size() == 2);
        CHECK(cy[1] < cy[0]);
    }
    SUBCASE("edges come before nodes, all indices in order") {
        Layout layout = positions({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
        const std::string svg = render_svg(square, layout);
        CHECK(svg.rfind("<line") < svg.find("<circle"));
        const auto x1 = attr_values(svg, "x1");
        CHECK(x1.size() == square.edges.size());
        const auto cx = attr_values(svg, "cx");
        CHECK(cx.size() == static_cast<std::size_t>(square.node_count));
    }
    SUBCASE("output is well-formed: every element closed, quotes balanced") {
        Layout layout = positions({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
        const std::string svg = render_svg(square, layout);
        CHECK(std::count(svg.begin(), svg.end(), '"') % 2 == 0);
        std::size_t opens = 0, closes = 0, pos = 0;
        while ((pos = svg.find("<", pos)) != std::string::npos) {
            if (svg.compare(pos, 2, "</") == 0)
                ++closes;
            else
                ++opens;
            ++pos;
        }
        std::size_t self_closing = 0;
        pos = 0;
        while ((pos = svg.find("/>", pos)) != std::string::npos) {
            ++self_closing;
            ++pos;
        }
        CHECK(opens == closes + self_closing);
    }
    SUBCASE("non-finite layouts are rejected") {
        Layout bad = positions({{0, 0}, {1, 0}, {1, 1}, {0, std::nan("")}});
        CHECK_THROWS(render_svg(square, bad));
    }
}
