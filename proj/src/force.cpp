#include "fdl/force.hpp"

#include <algorithm>
#include <cmath>

#include "fdl/errors.hpp"

namespace fdl {

double fr_attraction(double d, double k) { return d * d / k; }

double fr_repulsion(double d, double k, double min_distance) {
    return -(k * k) / std::max(d, min_distance);
}

double frr_attraction(double d, double k_pair) { return d * d * d / k_pair; }

double fa2_attraction(double d) { return std::log1p(d); }

double fa2_repulsion(int deg1, int deg2, double d, double k_r, double min_distance) {
    // The degree product is formed first, in integers, so the result is
    // exactly symmetric in deg1/deg2.
    const double mass = static_cast<double>(static_cast<long long>(deg1 + 1) * (deg2 + 1));
    return k_r * mass / std::max(d, min_distance);
}

double fa2_gravity(int deg, double k_g, double d_center, bool strong) {
    const double base = k_g * static_cast<double>(deg + 1);
    return strong ? base * d_center : base;
}

namespace {

constexpr double kCoincidenceEps = 1e-12;

// Direction from b to a; coincident pairs get a seeded random direction so
// the force still has somewhere to point.
inline Vec2 direction_between(Vec2 a, Vec2 b, Rng& rng) {
    const Vec2 delta = a - b;
    const double d = delta.norm();
    if (d < kCoincidenceEps) return random_unit_vector(rng);
    return delta / d;
}

[[noreturn]] void throw_non_finite(std::string_view algo, int node, std::int64_t iteration) {
    throw NumericalError("algorithm " + std::string(algo) + ": non-finite displacement at node " +
                         std::to_string(node) + ", iteration " + std::to_string(iteration));
}

} // namespace

void SpringLayoutAlgorithm::on_initialize(const ParamSet& params) {
    const int n = graph_->node_count;
    const Bounds& b = layout_.bounds;
    k_ = params.number("k", std::sqrt(b.width * b.height / std::max(n, 1)));
    temperature_ = params.number("t0", 0.1 * b.width);
    cooling_ = params.number("cooling", 0.995);
    min_distance_ = params.number("min_distance", 1e-4);
    const std::string source = params.str("pair_k_source", "edge_weight");
    if (source == "edge_weight")
        pair_k_source_ = PairKSource::EdgeWeight;
    else if (source == "global_k")
        pair_k_source_ = PairKSource::GlobalK;
    else
        throw DomainError(std::string(name()) + ": unknown pair_k_source '" + source + "'");

    rng_ = Rng(seed_);
    iteration_ = 0;
    displacement_.assign(n, {});
}

double SpringLayoutAlgorithm::pair_ideal(std::size_t edge_index) const {
    if (pair_k_source_ == PairKSource::EdgeWeight && graph_->weighted())
        return graph_->edge_weights[edge_index];
    return k_;
}

StepReport SpringLayoutAlgorithm::step() {
    const int n = graph_->node_count;
    std::fill(displacement_.begin(), displacement_.end(), Vec2{});

    // Repulsion, all pairs, global k.
    for (int i = 0; i < n; ++i) {
        const Vec2 pi = layout_.positions[i];
        for (int j = i + 1; j < n; ++j) {
            const Vec2 pj = layout_.positions[j];
            const Vec2 away = direction_between(pi, pj, rng_);
            const double magnitude = -fr_repulsion(distance(pi, pj), k_, min_distance_);
            displacement_[i] += away * magnitude;
            displacement_[j] -= away * magnitude;
        }
    }

    // Attraction along edges.
    for (std::size_t e = 0; e < graph_->edges.size(); ++e) {
        const auto [u, v] = graph_->edges[e];
        const Vec2 pu = layout_.positions[u];
        const Vec2 pv = layout_.positions[v];
        const double d = distance(pu, pv);
        const double kp = pair_ideal(e);
        const double magnitude =
            attraction_ == AttractionKind::Quadratic ? fr_attraction(d, kp) : frr_attraction(d, kp);
        const Vec2 toward = direction_between(pv, pu, rng_); // u -> v
        displacement_[u] += toward * magnitude;
        displacement_[v] -= toward * magnitude;
    }

    StepReport report;
    ++iteration_;
    for (int i = 0; i < n; ++i) {
        Vec2 disp = displacement_[i];
        if (!disp.finite()) throw_non_finite(name(), i, iteration_);
        const double len = disp.norm();
        if (len > temperature_) disp = disp * (temperature_ / len);
        const Vec2 before = layout_.positions[i];
        layout_.positions[i] = layout_.bounds.clamp(before + disp);
        const double moved = distance(before, layout_.positions[i]);
        if (moved > 0.0) {
            ++report.moved_nodes;
            report.max_displacement = std::max(report.max_displacement, moved);
        }
    }

    temperature_ = std::max(temperature_ * cooling_, 1e-3 * k_);
    return report;
}

nlohmann::json SpringLayoutAlgorithm::stats() const {
    return {{"iterations", iteration_}, {"temperature", temperature_}, {"k", k_}};
}

void FA2Algorithm::on_initialize(const ParamSet& params) {
    const int n = graph_->node_count;
    const Bounds& b = layout_.bounds;
    const double k = std::sqrt(b.width * b.height / std::max(n, 1));
    k_r_ = params.number("k_r", k);
    k_g_ = params.number("k_g", 0.1);
    strong_gravity_ = params.boolean("strong_gravity", false);
    step_limit_ = params.number("step0", 0.1 * std::min(b.width, b.height));
    step_decay_ = params.number("step_decay", 0.995);
    step_floor_ = 1e-3 * step_limit_;
    min_distance_ = params.number("min_distance", 1e-4);

    rng_ = Rng(seed_);
    iteration_ = 0;
    displacement_.assign(n, {});
}

StepReport FA2Algorithm::step() {
    const int n = graph_->node_count;
    std::fill(displacement_.begin(), displacement_.end(), Vec2{});
    const Vec2 center = layout_.bounds.center();

    for (int i = 0; i < n; ++i) {
        const Vec2 pi = layout_.positions[i];
        for (int j = i + 1; j < n; ++j) {
            const Vec2 pj = layout_.positions[j];
            const Vec2 away = direction_between(pi, pj, rng_);
            const double magnitude =
                fa2_repulsion(graph_->degree(i), graph_->degree(j), distance(pi, pj), k_r_, min_distance_);
            displacement_[i] += away * magnitude;
            displacement_[j] -= away * magnitude;
        }
    }

    for (const auto& [u, v] : graph_->edges) {
        const Vec2 pu = layout_.positions[u];
        const Vec2 pv = layout_.positions[v];
        const double magnitude = fa2_attraction(distance(pu, pv));
        const Vec2 toward = direction_between(pv, pu, rng_);
        displacement_[u] += toward * magnitude;
        displacement_[v] -= toward * magnitude;
    }

    for (int i = 0; i < n; ++i) {
        const Vec2 pi = layout_.positions[i];
        const double d_center = distance(pi, center);
        if (d_center >= kCoincidenceEps) {
            const Vec2 toward_center = (center - pi) / d_center;
            displacement_[i] +=
                toward_center * fa2_gravity(graph_->degree(i), k_g_, d_center, strong_gravity_);
        }
    }

    StepReport report;
    ++iteration_;
    for (int i = 0; i < n; ++i) {
        Vec2 disp = displacement_[i];
        if (!disp.finite()) throw_non_finite(name(), i, iteration_);
        const double len = disp.norm();
        if (len > step_limit_) disp = disp * (step_limit_ / len);
        const Vec2 before = layout_.positions[i];
        layout_.positions[i] = layout_.bounds.clamp(before + disp);
        const double moved = distance(before, layout_.positions[i]);
        if (moved > 0.0) {
            ++report.moved_nodes;
            report.max_displacement = std::max(report.max_displacement, moved);
        }
    }

    step_limit_ = std::max(step_limit_ * step_decay_, step_floor_);
    return report;
}

nlohmann::json FA2Algorithm::stats() const {
    return {{"iterations", iteration_}, {"step_limit", step_limit_}};
}

} // namespace fdl
