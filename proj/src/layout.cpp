#include "fdl/layout.hpp"

#include "fdl/errors.hpp"

namespace fdl {

Layout init_random_layout(int node_count, Bounds bounds, std::uint64_t seed) {
    if (!(bounds.width > 0.0) || !(bounds.height > 0.0))
        throw DomainError("init_random_layout: bounds must be positive");
    Layout layout;
    layout.bounds = bounds;
    layout.positions.resize(node_count);
    Rng rng(seed);
    for (auto& p : layout.positions) {
        p.x = rng.uniform(0.0, bounds.width);
        p.y = rng.uniform(0.0, bounds.height);
    }
    return layout;
}

Layout init_circular_layout(int node_count, Bounds bounds) {
    if (node_count < 1) throw DomainError("init_circular_layout: need at least one node");
    Layout layout;
    layout.bounds = bounds;
    layout.positions.resize(node_count);
    const Vec2 c = bounds.center();
    if (node_count == 1) {
        layout.positions[0] = c;
        return layout;
    }
    const double r = std::min(bounds.width, bounds.height) / 2.0;
    const double step = 2.0 * 3.14159265358979323846 / node_count;
    for (int i = 0; i < node_count; ++i) {
        const double a = step * i;
        layout.positions[i] = {c.x + r * std::cos(a), c.y + r * std::sin(a)};
    }
    return layout;
}

} // namespace fdl
