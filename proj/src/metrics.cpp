#include "fdl/metrics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

#include "fdl/errors.hpp"

namespace fdl {

namespace {

constexpr double kOrientEps = 1e-12;

// Sign of the cross product (b-a) x (c-a): +1 left turn, -1 right turn,
// 0 within the collinearity epsilon.
int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross > kOrientEps) return 1;
    if (cross < -kOrientEps) return -1;
    return 0;
}

// 1-D interval interiors overlap.
bool interiors_overlap(double a0, double a1, double b0, double b1) {
    if (a0 > a1) std::swap(a0, a1);
    if (b0 > b1) std::swap(b0, b1);
    return std::max(a0, b0) < std::min(a1, b1) - kOrientEps;
}

struct SegmentBox {
    double min_x, max_x, min_y, max_y;
};

SegmentBox box_of(Vec2 a, Vec2 b) {
    return {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
}

bool boxes_overlap(const SegmentBox& a, const SegmentBox& b) {
    return a.min_x <= b.max_x && b.min_x <= a.max_x && a.min_y <= b.max_y && b.min_y <= a.max_y;
}

} // namespace

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 p3, Vec2 p4) {
    // Degenerate segments never cross.
    if (distance(p1, p2) < kOrientEps || distance(p3, p4) < kOrientEps) return false;

    const int d1 = orientation(p3, p4, p1);
    const int d2 = orientation(p3, p4, p2);
    const int d3 = orientation(p1, p2, p3);
    const int d4 = orientation(p1, p2, p4);

    // Proper crossing: each segment's endpoints straddle the other strictly.
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;

    // All four collinear: count only overlapping interiors.
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        // Project on the dominant axis of the first segment.
        if (std::abs(p2.x - p1.x) >= std::abs(p2.y - p1.y))
            return interiors_overlap(p1.x, p2.x, p3.x, p4.x);
        return interiors_overlap(p1.y, p2.y, p3.y, p4.y);
    }

    // Any remaining contact involves an endpoint touching the other segment.
    return false;
}

namespace {

long long brute_force_count(const Graph& g, const Layout& layout,
                            const std::vector<SegmentBox>& boxes) {
    const int m = g.edge_count();
    long long crossings = 0;
    for (int e = 0; e < m; ++e) {
        const auto [a, b] = g.edges[e];
        const Vec2 pa = layout.positions[a];
        const Vec2 pb = layout.positions[b];
        for (int f = e + 1; f < m; ++f) {
            const auto [c, d] = g.edges[f];
            if (a == c || a == d || b == c || b == d) continue;
            if (!boxes_overlap(boxes[e], boxes[f])) continue;
            if (segments_cross(pa, pb, layout.positions[c], layout.positions[d])) ++crossings;
        }
    }
    return crossings;
}

std::vector<SegmentBox> segment_boxes(const Graph& g, const Layout& layout) {
    std::vector<SegmentBox> boxes;
    boxes.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges)
        boxes.push_back(box_of(layout.positions[u], layout.positions[v]));
    return boxes;
}

} // namespace

long long count_crossings(const Graph& g, const Layout& layout) {
    return brute_force_count(g, layout, segment_boxes(g, layout));
}

SweepCount count_crossings_sweep_result(const Graph& g, const Layout& layout) {
    const int m = g.edge_count();
    const auto boxes = segment_boxes(g, layout);
    if (m < 64) return {brute_force_count(g, layout, boxes), false};

    double min_x = boxes[0].min_x, max_x = boxes[0].max_x;
    double min_y = boxes[0].min_y, max_y = boxes[0].max_y;
    double sum_w = 0.0, sum_h = 0.0;
    for (const auto& b : boxes) {
        min_x = std::min(min_x, b.min_x);
        max_x = std::max(max_x, b.max_x);
        min_y = std::min(min_y, b.min_y);
        max_y = std::max(max_y, b.max_y);
        sum_w += b.max_x - b.min_x;
        sum_h += b.max_y - b.min_y;
    }
    const double span_x = max_x - min_x;
    const double span_y = max_y - min_y;
    if (!(span_x > 0.0) || !(span_y > 0.0))
        return {brute_force_count(g, layout, boxes), true}; // collapsed layout

    // Cell size near the average segment extent keeps most segments in a
    // handful of cells.
    const double target = std::max({sum_w / m, sum_h / m, 1e-9});
    const int grid_x = std::clamp(static_cast<int>(span_x / target) + 1, 1, 1024);
    const int grid_y = std::clamp(static_cast<int>(span_y / target) + 1, 1, 1024);
    const double cell_w = span_x / grid_x;
    const double cell_h = span_y / grid_y;

    auto cell_range = [&](const SegmentBox& b) {
        const int x0 = std::clamp(static_cast<int>((b.min_x - min_x) / cell_w), 0, grid_x - 1);
        const int x1 = std::clamp(static_cast<int>((b.max_x - min_x) / cell_w), 0, grid_x - 1);
        const int y0 = std::clamp(static_cast<int>((b.min_y - min_y) / cell_h), 0, grid_y - 1);
        const int y1 = std::clamp(static_cast<int>((b.max_y - min_y) / cell_h), 0, grid_y - 1);
        return std::array<int, 4>{x0, x1, y0, y1};
    };

    std::vector<std::vector<int>> cells(static_cast<std::size_t>(grid_x) * grid_y);
    std::vector<std::array<int, 4>> ranges(m);
    double occupancy = 0.0;
    for (int e = 0; e < m; ++e) {
        ranges[e] = cell_range(boxes[e]);
        const auto [x0, x1, y0, y1] = ranges[e];
        occupancy += static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
        for (int cy = y0; cy <= y1; ++cy)
            for (int cx = x0; cx <= x1; ++cx)
                cells[static_cast<std::size_t>(cy) * grid_x + cx].push_back(e);
    }

    // If binning does not separate the segments (stacked drawings, long
    // near-collinear bundles) the candidate work degenerates to the double
    // loop; run the reference path and say so.
    double candidate_work = 0.0;
    for (const auto& cell : cells) {
        const double c = static_cast<double>(cell.size());
        candidate_work += c * (c - 1.0) / 2.0;
    }
    const double brute_work = static_cast<double>(m) * (m - 1) / 2.0;
    if (candidate_work > 0.75 * brute_work || occupancy > 64.0 * m)
        return {brute_force_count(g, layout, boxes), true};

    long long crossings = 0;
    for (int cy = 0; cy < grid_y; ++cy) {
        for (int cx = 0; cx < grid_x; ++cx) {
            const auto& cell = cells[static_cast<std::size_t>(cy) * grid_x + cx];
            for (std::size_t s = 0; s < cell.size(); ++s) {
                const int e = cell[s];
                const auto [a, b] = g.edges[e];
                for (std::size_t t = s + 1; t < cell.size(); ++t) {
                    const int f = cell[t];
                    // Process each pair only in the first cell both touch.
                    if (std::max(ranges[e][0], ranges[f][0]) != cx ||
                        std::max(ranges[e][2], ranges[f][2]) != cy)
                        continue;
                    const auto [c, d] = g.edges[f];
                    if (a == c || a == d || b == c || b == d) continue;
                    if (!boxes_overlap(boxes[e], boxes[f])) continue;
                    if (segments_cross(layout.positions[a], layout.positions[b],
                                       layout.positions[c], layout.positions[d]))
                        ++crossings;
                }
            }
        }
    }
    return {crossings, false};
}

long long count_crossings_sweep(const Graph& g, const Layout& layout) {
    return count_crossings_sweep_result(g, layout).crossings;
}

EdgeLengthStats edge_length_stats(const Graph& g, const Layout& layout) {
    if (g.edges.empty()) throw DomainError("edge_length_stats: graph has no edges");
    double sum = 0.0;
    for (const auto& [u, v] : g.edges)
        sum += distance(layout.positions[u], layout.positions[v]);
    const double mean = sum / static_cast<double>(g.edges.size());
    double var = 0.0;
    for (const auto& [u, v] : g.edges) {
        const double dev = distance(layout.positions[u], layout.positions[v]) - mean;
        var += dev * dev;
    }
    var /= static_cast<double>(g.edges.size());
    return {mean, std::sqrt(var)};
}

MetricsReport compute_metrics(const Graph& g, const Layout& layout) {
    MetricsReport report;
    const auto start = std::chrono::steady_clock::now();
    const auto sweep = count_crossings_sweep_result(g, layout);
    report.crossings = sweep.crossings;
    report.sweep_fallback = sweep.brute_force_fallback;
    report.edge_count = g.edge_count();
    if (!g.edges.empty()) {
        const auto stats = edge_length_stats(g, layout);
        report.edge_length_mean = stats.mean;
        report.edge_length_stddev = stats.stddev;
    }
    report.compute_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
    return {{"crossings", report.crossings},
            {"edge_length_mean", report.edge_length_mean},
            {"edge_length_stddev", report.edge_length_stddev},
            {"edge_count", report.edge_count}};
}

} // namespace fdl
