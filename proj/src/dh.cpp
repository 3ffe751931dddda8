#include "fdl/dh.hpp"

#include <algorithm>
#include <cmath>

#include "fdl/errors.hpp"

namespace fdl {

namespace {

constexpr double kDistanceFloorFraction = 1e-12; // of fr_k
constexpr double kCoincidenceFraction = 1e-9;
constexpr double kJitterFraction = 1e-6;

// Energy contribution of the pair (i, j) at distance d.
inline double pair_energy(double d, bool adjacent, double k) {
    double e = -(k * k) / d; // repulsion term, all pairs
    if (adjacent) e += (d * d) / k;
    return e;
}

} // namespace

double dh_energy(const Layout& layout, const Graph& g, const DHParams& params) {
    const double k = params.fr_k;
    const double floor_dist = kDistanceFloorFraction * k;
    double e = 0.0;
    for (int i = 0; i < g.node_count; ++i) {
        const Vec2 pi = layout.positions[i];
        for (int j = i + 1; j < g.node_count; ++j) {
            double d = distance(pi, layout.positions[j]);
            if (d < floor_dist) d = floor_dist;
            e += pair_energy(d, g.has_edge(i, j), k);
        }
    }
    return e;
}

double dh_candidate_energy_delta(int i, Vec2 new_pos, const Layout& layout,
                                 const Graph& g, const DHParams& params) {
    const double k = params.fr_k;
    const double floor_dist = kDistanceFloorFraction * k;
    const Vec2 old_pos = layout.positions[i];
    double delta = 0.0;
    for (int j = 0; j < g.node_count; ++j) {
        if (j == i) continue;
        const Vec2 pj = layout.positions[j];
        double d_old = distance(old_pos, pj);
        double d_new = distance(new_pos, pj);
        if (d_old < floor_dist) d_old = floor_dist;
        if (d_new < floor_dist) d_new = floor_dist;
        const bool adjacent = g.has_edge(i, j);
        delta += pair_energy(d_new, adjacent, k) - pair_energy(d_old, adjacent, k);
    }
    return delta;
}

bool dh_accept(double delta, double temperature, const DHParams& params, double u) {
    if (delta <= 0.0) return true;
    const double p = std::exp(-delta / (params.boltzmann_k * temperature));
    if (params.acceptance == DHParams::Acceptance::Threshold) return p < params.phi;
    return u < p;
}

void DHAlgorithm::on_initialize(const ParamSet& params) {
    params_.T0 = params.number("T0", 0.0);
    params_.cooling = params.number("cooling", 0.95);
    params_.boltzmann_k = params.number("boltzmann_k", 1.0);
    params_.move_radius0 = params.number("move_radius0", 0.0);
    params_.radius_decay = params.number("radius_decay", 0.98);
    params_.fr_k = params.number("fr_k", 0.0);
    params_.phi = params.number("phi", 0.5);
    const std::string mode = params.str("acceptance_mode", "metropolis");
    if (mode == "threshold")
        params_.acceptance = DHParams::Acceptance::Threshold;
    else if (mode == "metropolis")
        params_.acceptance = DHParams::Acceptance::Metropolis;
    else
        throw DomainError("dh: unknown acceptance_mode '" + mode + "'");

    const int n = graph_->node_count;
    const Bounds& b = layout_.bounds;
    if (params_.fr_k <= 0.0)
        params_.fr_k = std::sqrt(b.width * b.height / std::max(n, 1));
    if (params_.move_radius0 <= 0.0) params_.move_radius0 = 0.1 * b.diagonal();

    rng_ = Rng(seed_);
    sweeps_ = 0;
    accepted_total_ = 0;
    move_radius_ = params_.move_radius0;

    // The pair energy is singular at zero distance; separate any coincident
    // pairs in the starting layout.
    const double coincidence = kCoincidenceFraction * params_.fr_k;
    for (int pass = 0; pass < 16; ++pass) {
        bool clean = true;
        for (int i = 0; i < n && clean; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (distance(layout_.positions[i], layout_.positions[j]) < coincidence) {
                    layout_.positions[j] +=
                        random_unit_vector(rng_) * (kJitterFraction * params_.fr_k);
                    clean = false;
                    break;
                }
            }
        if (clean) break;
    }

    energy_ = dh_energy(layout_, *graph_, params_);
    if (params_.T0 > 0.0) {
        initial_temperature_ = params_.T0;
    } else {
        initial_temperature_ = std::abs(energy_) / std::max(n, 1);
        if (!(initial_temperature_ > 0.0) || !std::isfinite(initial_temperature_))
            initial_temperature_ = 1.0;
    }
    temperature_ = initial_temperature_;
}

StepReport DHAlgorithm::step() {
    StepReport report;
    const int n = graph_->node_count;
    const double coincidence = kCoincidenceFraction * params_.fr_k;

    for (int proposal = 0; proposal < n; ++proposal) {
        const int i = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(n)));
        const Vec2 current = layout_.positions[i];

        const double angle = rng_.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double radius = move_radius_ * std::sqrt(rng_.next_double());
        Vec2 candidate{current.x + radius * std::cos(angle),
                       current.y + radius * std::sin(angle)};
        candidate = layout_.bounds.clamp(candidate);

        // Keep proposals off the top of other nodes.
        for (int attempt = 0; attempt < 8; ++attempt) {
            bool coincident = false;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                if (distance(candidate, layout_.positions[j]) < coincidence) {
                    coincident = true;
                    break;
                }
            }
            if (!coincident) break;
            candidate = layout_.bounds.clamp(
                candidate + random_unit_vector(rng_) * (kJitterFraction * params_.fr_k));
        }

        const double delta = dh_candidate_energy_delta(i, candidate, layout_, *graph_, params_);
        const double u = params_.acceptance == DHParams::Acceptance::Metropolis && delta > 0.0
                             ? rng_.next_double()
                             : 0.0;
        if (dh_accept(delta, temperature_, params_, u)) {
            layout_.positions[i] = candidate;
            energy_ += delta;
            ++report.moved_nodes;
            ++accepted_total_;
            report.max_displacement =
                std::max(report.max_displacement, distance(current, candidate));
        }
    }

    ++sweeps_;
    // Computed from the sweep count so the schedule is exactly
    // T0 * cooling^s regardless of accumulation order.
    temperature_ = initial_temperature_ * std::pow(params_.cooling, static_cast<double>(sweeps_));
    move_radius_ =
        params_.move_radius0 * std::pow(params_.radius_decay, static_cast<double>(sweeps_));
    return report;
}

nlohmann::json DHAlgorithm::stats() const {
    return {{"sweeps", sweeps_},
            {"accepted", accepted_total_},
            {"temperature", temperature_},
            {"move_radius", move_radius_},
            {"energy", energy_}};
}

} // namespace fdl
