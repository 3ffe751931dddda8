#pragma once

#include <cstdint>
#include <string_view>

#include "fdl/algorithm.hpp"
#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/rng.hpp"

namespace fdl {

/// Simulated-annealing parameters. Non-positive T0 / move_radius0 / fr_k are
/// resolved at initialization: T0 from the initial energy, move_radius0 from
/// the canvas diagonal, fr_k from sqrt(area / n).
struct DHParams {
    enum class Acceptance { Metropolis, Threshold };

    double T0 = 0.0;
    double cooling = 0.95;
    double boltzmann_k = 1.0;
    double move_radius0 = 0.0;
    double radius_decay = 0.98;
    double fr_k = 0.0;
    Acceptance acceptance = Acceptance::Metropolis;
    double phi = 0.5;
};

/// Annealing energy: attraction d^2/k over adjacent pairs plus repulsion
/// -k^2/d over all pairs. Distances are floored at a tiny fraction of fr_k
/// so coincident pairs stay finite.
double dh_energy(const Layout& layout, const Graph& g, const DHParams& params);

/// E' - E for moving node i to new_pos, computed from node i's terms only.
/// Equals the full-recompute difference.
double dh_candidate_energy_delta(int i, Vec2 new_pos, const Layout& layout,
                                 const Graph& g, const DHParams& params);

/// delta <= 0 is always accepted. Otherwise p = exp(-delta / (k*T));
/// Metropolis accepts when u < p, the threshold mode accepts when p < phi.
bool dh_accept(double delta, double temperature, const DHParams& params, double u);

/// Davidson-Harel annealing under the stepping contract. One step is a sweep
/// of n proposals: pick a uniform random node, propose a uniform position in
/// the disk of the current move radius (clamped to bounds), accept per
/// dh_accept. After the sweep T and the radius decay geometrically.
///
/// Parameters: T0, cooling, boltzmann_k, move_radius0, radius_decay, fr_k,
/// acceptance_mode ("metropolis" | "threshold"), phi.
class DHAlgorithm final : public Algorithm {
public:
    std::string_view name() const override { return "dh"; }
    StepReport step() override;
    nlohmann::json stats() const override;

    double temperature() const { return temperature_; }
    double move_radius() const { return move_radius_; }
    double current_energy() const { return energy_; }

protected:
    void on_initialize(const ParamSet& params) override;

private:
    DHParams params_;
    Rng rng_{0};
    double initial_temperature_ = 1.0;
    double temperature_ = 1.0;
    double move_radius_ = 1.0;
    double energy_ = 0.0;
    std::int64_t sweeps_ = 0;
    std::int64_t accepted_total_ = 0;
};

} // namespace fdl
