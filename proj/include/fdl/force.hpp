#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fdl/algorithm.hpp"
#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/rng.hpp"

namespace fdl {

/// f_a(d) = d^2 / k, toward the partner.
double fr_attraction(double d, double k);

/// f_r(d) = -k^2 / max(d, min_distance); negative means "push apart".
double fr_repulsion(double d, double k, double min_distance = 1e-4);

/// Range-extension attraction f_a(d) = d^3 / k_pair.
double frr_attraction(double d, double k_pair);

/// LinLog-style attraction F_a(d) = ln(1 + d).
double fa2_attraction(double d);

/// Degree-dependent repulsion F_r = k_r * (deg1+1)(deg2+1) / max(d, min_distance).
double fa2_repulsion(int deg1, int deg2, double d, double k_r, double min_distance = 1e-4);

/// Gravity toward the canvas center: k_g * (deg+1), or k_g * (deg+1) * d_center
/// in the strong form.
double fa2_gravity(int deg, double k_g, double d_center = 0.0, bool strong = false);

/// Where the per-pair ideal distance for the range-extension attraction
/// comes from: the edge weight when the graph carries weights, else the
/// global k.
enum class PairKSource { EdgeWeight, GlobalK };

enum class AttractionKind { Quadratic, Cubic };

/// FR and FRR. One step accumulates repulsion over all pairs and attraction
/// over edges into per-node displacement vectors, caps each displacement at
/// the current temperature, moves the nodes and clamps them to the bounds,
/// then cools: t <- cooling * t with floor 1e-3 * k.
///
/// FRR is the same machine with cubic attraction and per-pair ideal
/// distances; with quadratic attraction and the global k the two produce
/// identical trajectories by construction.
///
/// Parameters: k, t0, cooling, min_distance, pair_k_source
/// ("edge_weight" | "global_k").
class SpringLayoutAlgorithm final : public Algorithm {
public:
    SpringLayoutAlgorithm(std::string name, AttractionKind attraction)
        : name_(std::move(name)), attraction_(attraction) {}

    std::string_view name() const override { return name_; }
    StepReport step() override;
    nlohmann::json stats() const override;

    double temperature() const { return temperature_; }
    double ideal_distance() const { return k_; }

protected:
    void on_initialize(const ParamSet& params) override;

private:
    double pair_ideal(std::size_t edge_index) const;

    std::string name_;
    AttractionKind attraction_;
    PairKSource pair_k_source_ = PairKSource::EdgeWeight;
    double k_ = 1.0;
    double temperature_ = 1.0;
    double cooling_ = 0.995;
    double min_distance_ = 1e-4;
    Rng rng_{0};
    std::int64_t iteration_ = 0;
    std::vector<Vec2> displacement_;
};

/// ForceAtlas2 forces under the same stepping scheme: LinLog attraction over
/// edges, degree-dependent repulsion over all pairs, gravity (plain or
/// strong) toward the canvas center; displacements capped at a step limit
/// that decays geometrically with a floor.
///
/// Parameters: k_r, k_g, strong_gravity, step0, step_decay, min_distance.
class FA2Algorithm final : public Algorithm {
public:
    std::string_view name() const override { return "fa2"; }
    StepReport step() override;
    nlohmann::json stats() const override;

    double step_limit() const { return step_limit_; }

protected:
    void on_initialize(const ParamSet& params) override;

private:
    double k_r_ = 1.0;
    double k_g_ = 0.1;
    bool strong_gravity_ = false;
    double step_limit_ = 1.0;
    double step_decay_ = 0.995;
    double step_floor_ = 1e-3;
    double min_distance_ = 1e-4;
    Rng rng_{0};
    std::int64_t iteration_ = 0;
    std::vector<Vec2> displacement_;
};

} // namespace fdl
