#pragma once

#include <cstdint>

#include <json.hpp>

#include "fdl/graph.hpp"
#include "fdl/layout.hpp"

namespace fdl {

/// True iff the open interiors of segments (p1,p2) and (p3,p4) intersect,
/// or the segments are collinear with overlapping interiors. Contact at an
/// endpoint only — a shared endpoint, or an endpoint lying on the other
/// segment — does not count. Zero-length segments never cross.
///
/// Orientation signs are classified with an absolute epsilon of 1e-12 on the
/// cross product; layouts come from floating-point dynamics, not adversarial
/// inputs.
bool segments_cross(Vec2 p1, Vec2 p2, Vec2 p3, Vec2 p4);

/// Number of unordered edge pairs, excluding pairs sharing a graph endpoint,
/// whose drawn segments cross. Plain O(m^2) double loop; this is the
/// reference the accelerated counter is held to.
long long count_crossings(const Graph& g, const Layout& layout);

struct SweepCount {
    long long crossings = 0;
    bool brute_force_fallback = false;
};

/// Same count as count_crossings, computed with uniform-grid binning of the
/// segments. Falls back to the double loop (flagged) when the layout is too
/// degenerate for binning to prune anything — stacked or near-collinear
/// drawings.
SweepCount count_crossings_sweep_result(const Graph& g, const Layout& layout);
long long count_crossings_sweep(const Graph& g, const Layout& layout);

struct EdgeLengthStats {
    double mean = 0.0;
    double stddev = 0.0; // population convention
};

/// Mean and population standard deviation of the drawn edge lengths.
/// Throws DomainError when the graph has no edges.
EdgeLengthStats edge_length_stats(const Graph& g, const Layout& layout);

struct MetricsReport {
    long long crossings = 0;
    double edge_length_mean = 0.0;
    double edge_length_stddev = 0.0;
    int edge_count = 0;
    double compute_ms = 0.0; // wall time; never serialized
    bool sweep_fallback = false;
};

/// Both quality measures at once, using the accelerated counter. Graphs
/// without edges report zero mean/stddev instead of failing.
MetricsReport compute_metrics(const Graph& g, const Layout& layout);

nlohmann::json metrics_to_json(const MetricsReport& report);

} // namespace fdl
