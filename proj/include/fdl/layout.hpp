#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fdl/rng.hpp"

namespace fdl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Canvas size in layout units. Algorithms that clamp do so to [0,width]x[0,height].
struct Bounds {
    double width = 0.0;
    double height = 0.0;

    double diagonal() const { return std::hypot(width, height); }
    Vec2 center() const { return {width / 2.0, height / 2.0}; }

    Vec2 clamp(Vec2 p) const {
        if (p.x < 0.0) p.x = 0.0;
        if (p.x > width) p.x = width;
        if (p.y < 0.0) p.y = 0.0;
        if (p.y > height) p.y = height;
        return p;
    }
};

/// Per-node positions on a bounded canvas. positions.size() always equals the
/// node count of the graph being laid out.
struct Layout {
    std::vector<Vec2> positions;
    Bounds bounds;
};

inline bool all_finite(const Layout& layout) {
    for (const auto& p : layout.positions)
        if (!p.finite()) return false;
    return true;
}

/// Every coordinate drawn uniformly within the bounds; node order 0..n-1,
/// x before y, from Rng(seed). Identical seeds give identical layouts.
Layout init_random_layout(int node_count, Bounds bounds, std::uint64_t seed);

/// Nodes evenly spaced on the inscribed circle, node 0 at angle 0,
/// angles increasing counter-clockwise.
Layout init_circular_layout(int node_count, Bounds bounds);

/// Unit vector at a uniformly random angle; used to separate coincident nodes.
inline Vec2 random_unit_vector(Rng& rng) {
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return {std::cos(angle), std::sin(angle)};
}

} // namespace fdl
