#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "fdl/algorithm.hpp"
#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/rng.hpp"

namespace fdl {

/// Spring model over one connected component: ideal length l_ij = L * d_ij
/// and stiffness k_ij = K / d_ij^2, both derived from hop distances.
/// `nodes` maps the model's local indices onto graph node indices, so a
/// model built for a connected graph is the identity mapping.
struct KKModel {
    std::vector<int> nodes;
    DistanceMatrix dist;
    double length_per_hop = 1.0;  // L, canvas units per hop
    double stiffness_const = 1.0; // K

    int size() const { return static_cast<int>(nodes.size()); }

    double ideal(int i, int j) const {
        return length_per_hop * static_cast<double>(dist.at(i, j));
    }
    double stiffness(int i, int j) const {
        const double d = static_cast<double>(dist.at(i, j));
        return stiffness_const / (d * d);
    }
};

/// Builds the model for one component (given as global node indices).
/// L is chosen so the component's BFS diameter spans diagonal_fraction of
/// target_diagonal.
KKModel make_kk_model(const Graph& g, const std::vector<int>& component,
                      double target_diagonal, double diagonal_fraction = 0.9,
                      double stiffness_const = 1.0);

/// Convenience overload for connected graphs; throws DomainError when the
/// graph has more than one component.
KKModel make_kk_model(const Graph& g, Bounds bounds,
                      double diagonal_fraction = 0.9, double stiffness_const = 1.0);

/// E = sum_{i<j} 1/2 k_ij (|p_i - p_j| - l_ij)^2
double kk_energy(const Layout& layout, const KKModel& model);

/// Gradient of the energy with respect to node i's position.
Vec2 kk_gradient(int local_i, const Layout& layout, const KKModel& model);

/// Gradient restricted to the given partner set (used when only part of a
/// component is being laid out). `partners` may contain i itself; it is
/// skipped.
Vec2 kk_gradient_over(int local_i, const Layout& layout, const KKModel& model,
                      std::span<const int> partners);

struct KKNewtonOptions {
    int max_inner = 20;
    double inner_tolerance = 1e-6;
    Rng* jitter_rng = nullptr; // separates coincident nodes when provided
};

/// Moves node i by repeated 2x2 Newton solves of the per-node system until
/// its gradient magnitude drops below inner_tolerance or max_inner rounds
/// pass. A singular system falls back to a gradient step of length 0.1*L.
/// Each applied move is damped (step halved, at most 20 times, reverting if
/// that fails) so the node-local energy never increases.
/// Returns the final position; the layout is updated in place.
Vec2 kk_newton_step(int local_i, Layout& layout, const KKModel& model,
                    const KKNewtonOptions& opt = {});
Vec2 kk_newton_step_over(int local_i, Layout& layout, const KKModel& model,
                         std::span<const int> partners,
                         const KKNewtonOptions& opt = {});

/// Stability ratio of a partially laid-out area: with dev_i = |cur_i - tgt_i|,
/// r = mean(dev) / population-stddev(dev), and r = 0 when all deviations are
/// equal (including all zero). Small r means most lengths sit at their
/// targets with only a few stragglers.
double stability_ratio(std::span<const double> current_lengths,
                       std::span<const double> target_lengths);

/// Starting area used by the decaying-stiffness variant: the maximum-degree
/// node of the component (ties broken by lowest index) plus everything
/// within two hops. Returns global node indices, ascending.
std::vector<int> kkmsds_starting_area(const Graph& g, const std::vector<int>& component);

enum class KKVariant { Classic, MultiSelect, DecayingStiffness };

/// KK, KK-MS and KK-MS-DS under one roof.
///
/// All three share the ordered-queue selection: the queue holds (node, delta)
/// sorted by delta descending (ties by index), a step pops the top k_top
/// entries, Newton-updates them, recomputes only their deltas and reinserts
/// them. After ceil(sqrt(pool)) distinct nodes have been selected the queue
/// is cleared and every delta recomputed. Classic runs with k_top = 1;
/// MultiSelect defaults k_top to ceil(sqrt(n)); DecayingStiffness restricts
/// everything to a growing active set and decays each node's selection
/// priority by gamma per update.
///
/// Disconnected graphs are decomposed: each component gets its own model and
/// a cell in a size-sorted grid packing of the canvas.
///
/// Parameters: L_scale_fraction, K, k_top, resets, gamma, epsilon,
/// stability_window, max_inner, inner_tolerance.
class KKFamilyAlgorithm final : public Algorithm {
public:
    explicit KKFamilyAlgorithm(KKVariant variant) : variant_(variant) {}

    std::string_view name() const override;
    StepReport step() override;
    nlohmann::json stats() const override;

    double total_energy() const;
    int component_count() const { return static_cast<int>(comps_.size()); }
    const KKModel& model(int comp) const { return comps_[comp].model; }
    int distinct_selected(int comp) const { return comps_[comp].distinct_selected; }
    int active_set_size(int comp) const { return static_cast<int>(comps_[comp].active.size()); }
    std::vector<int> active_set_global(int comp) const;
    double sigma_of(int comp, int global_node) const;
    int expansion_count() const { return expansions_; }
    bool fully_expanded() const;

    /// When enabled, every popped node (global index) is appended to the
    /// selection history. Off by default; test instrumentation.
    void record_selections(bool enabled) { record_selections_ = enabled; }
    const std::vector<int>& selection_history() const { return selection_history_; }

protected:
    void on_initialize(const ParamSet& params) override;

private:
    struct QueueEntry {
        double delta;
        int node;
    };
    struct QueueOrder {
        bool operator()(const QueueEntry& a, const QueueEntry& b) const {
            if (a.delta != b.delta) return a.delta > b.delta;
            return a.node < b.node;
        }
    };

    struct Component {
        KKModel model;
        std::vector<std::vector<int>> adj;           // local indices
        std::vector<std::pair<int, int>> local_edges;
        std::vector<int> global_to_local;            // -1 elsewhere (sized n)

        std::set<QueueEntry, QueueOrder> queue;
        std::vector<char> selected_since_reset;
        int distinct_selected = 0;
        int k_top = 1;
        int reset_threshold = 1;

        // decaying-stiffness state
        std::vector<char> in_active;
        std::vector<int> active; // sorted local indices; == all nodes unless DS
        std::vector<double> sigma;
        std::vector<int> update_counts;
        int stable_streak = 0;

        bool quiet_last_step = false;
    };

    double node_delta(const Component& c, int local) const;
    void rebuild_queue(Component& c);
    void maybe_expand(Component& c);
    void step_component(Component& c, StepReport& report);

    KKVariant variant_;
    std::vector<Component> comps_;
    Rng rng_{0};

    double length_fraction_ = 0.9;
    double stiffness_k_ = 1.0;
    int k_top_param_ = 0; // 0 = derive from pool size / variant
    bool resets_enabled_ = true;
    double gamma_ = 0.9;
    double epsilon_ = 0.5;
    int stability_window_ = 10;
    KKNewtonOptions newton_;

    int expansions_ = 0;
    std::int64_t iteration_ = 0;
    bool record_selections_ = false;
    std::vector<int> selection_history_;
};

} // namespace fdl
