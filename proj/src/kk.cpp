#include "fdl/kk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/errors.hpp"

namespace fdl {

namespace {

constexpr double kCoincidenceFraction = 1e-9; // of L; below this, jitter
constexpr double kJitterFraction = 1e-6;      // of L; jitter magnitude
constexpr double kSingularDet = 1e-12;

struct NodeDerivatives {
    double gx = 0.0, gy = 0.0;  // gradient
    double axx = 0.0, axy = 0.0, ayy = 0.0; // Hessian of the node-local system
};

// Gradient and second derivatives of Eq-style energy restricted to node i.
// Distances are floored at a tiny fraction of L so exactly coincident nodes
// cannot produce non-finite values even when no jitter source is available.
NodeDerivatives node_derivatives(int i, const Layout& layout, const KKModel& m,
                                 std::span<const int> partners) {
    NodeDerivatives out;
    const Vec2 pi = layout.positions[m.nodes[i]];
    const double floor_dist = 1e-12 * m.length_per_hop;
    for (int j : partners) {
        if (j == i) continue;
        const Vec2 pj = layout.positions[m.nodes[j]];
        const double dx = pi.x - pj.x;
        const double dy = pi.y - pj.y;
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < floor_dist) dist = floor_dist;
        const double k = m.stiffness(i, j);
        const double l = m.ideal(i, j);
        const double inv = 1.0 / dist;
        out.gx += k * dx * (1.0 - l * inv);
        out.gy += k * dy * (1.0 - l * inv);
        const double den = dist * dist * dist;
        out.axx += k * (1.0 - l * dy * dy / den);
        out.axy += k * l * dx * dy / den;
        out.ayy += k * (1.0 - l * dx * dx / den);
    }
    return out;
}

double local_energy(int i, Vec2 pi, const Layout& layout, const KKModel& m,
                    std::span<const int> partners) {
    double e = 0.0;
    const double floor_dist = 1e-12 * m.length_per_hop;
    for (int j : partners) {
        if (j == i) continue;
        const Vec2 pj = layout.positions[m.nodes[j]];
        double dist = distance(pi, pj);
        if (dist < floor_dist) dist = floor_dist;
        const double dev = dist - m.ideal(i, j);
        e += 0.5 * m.stiffness(i, j) * dev * dev;
    }
    return e;
}

std::vector<int> identity_partners(int n) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
}

} // namespace

KKModel make_kk_model(const Graph& g, const std::vector<int>& component,
                      double target_diagonal, double diagonal_fraction,
                      double stiffness_const) {
    KKModel m;
    m.nodes = component;
    m.stiffness_const = stiffness_const;

    const int n = static_cast<int>(component.size());
    std::vector<int> local_of(g.node_count, -1);
    for (int i = 0; i < n; ++i) local_of[component[i]] = i;

    // Hop distances by BFS inside the component.
    m.dist.n = n;
    m.dist.d.assign(static_cast<std::size_t>(n) * n, DistanceMatrix::kUnreachable);
    std::vector<int> queue(n);
    for (int src = 0; src < n; ++src) {
        auto* row = &m.dist.d[static_cast<std::size_t>(src) * n];
        int head = 0, tail = 0;
        row[src] = 0;
        queue[tail++] = src;
        while (head < tail) {
            const int u = queue[head++];
            for (int vg : g.adjacency[m.nodes[u]]) {
                const int v = local_of[vg];
                if (v < 0)
                    throw DomainError("make_kk_model: component is not closed under adjacency");
                if (row[v] == DistanceMatrix::kUnreachable) {
                    row[v] = row[u] + 1;
                    queue[tail++] = v;
                }
            }
        }
        if (tail != n)
            throw DomainError("make_kk_model: node set is not connected");
    }

    const std::uint32_t diameter = m.dist.max_finite();
    m.length_per_hop = diagonal_fraction * target_diagonal /
                       static_cast<double>(std::max<std::uint32_t>(diameter, 1));
    return m;
}

KKModel make_kk_model(const Graph& g, Bounds bounds, double diagonal_fraction,
                      double stiffness_const) {
    auto comps = connected_components(g);
    if (comps.size() != 1)
        throw DomainError("make_kk_model: graph is not connected; build per component");
    return make_kk_model(g, comps[0], bounds.diagonal(), diagonal_fraction, stiffness_const);
}

double kk_energy(const Layout& layout, const KKModel& model) {
    double e = 0.0;
    const int n = model.size();
    for (int i = 0; i < n; ++i) {
        const Vec2 pi = layout.positions[model.nodes[i]];
        for (int j = i + 1; j < n; ++j) {
            const Vec2 pj = layout.positions[model.nodes[j]];
            const double dev = distance(pi, pj) - model.ideal(i, j);
            e += 0.5 * model.stiffness(i, j) * dev * dev;
        }
    }
    return e;
}

Vec2 kk_gradient_over(int local_i, const Layout& layout, const KKModel& model,
                      std::span<const int> partners) {
    const auto d = node_derivatives(local_i, layout, model, partners);
    return {d.gx, d.gy};
}

Vec2 kk_gradient(int local_i, const Layout& layout, const KKModel& model) {
    const auto all = identity_partners(model.size());
    return kk_gradient_over(local_i, layout, model, all);
}

Vec2 kk_newton_step_over(int local_i, Layout& layout, const KKModel& model,
                         std::span<const int> partners, const KKNewtonOptions& opt) {
    const double L = model.length_per_hop;
    Vec2& p = layout.positions[model.nodes[local_i]];

    // Separate node i from any coincident partner before evaluating the
    // gradient; the energy's derivative is singular at zero distance.
    if (opt.jitter_rng != nullptr) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            bool coincident = false;
            for (int j : partners) {
                if (j == local_i) continue;
                if (distance(p, layout.positions[model.nodes[j]]) < kCoincidenceFraction * L) {
                    coincident = true;
                    break;
                }
            }
            if (!coincident) break;
            p += random_unit_vector(*opt.jitter_rng) * (kJitterFraction * L);
        }
    }

    // Damping: halve the step until the node-local energy does not increase;
    // gives up (position unchanged) if 20 halvings are not enough.
    auto try_damped = [&](Vec2 step, double before) -> bool {
        if (!step.finite()) return false;
        Vec2 candidate = p + step;
        for (int halving = 0; halving <= 20; ++halving) {
            if (local_energy(local_i, candidate, layout, model, partners) <= before) {
                p = candidate;
                return true;
            }
            step = step * 0.5;
            candidate = p + step;
        }
        return false;
    };

    for (int inner = 0; inner < opt.max_inner; ++inner) {
        const auto d = node_derivatives(local_i, layout, model, partners);
        const double grad_mag = std::hypot(d.gx, d.gy);
        if (grad_mag < opt.inner_tolerance) break;

        const double before = local_energy(local_i, p, layout, model, partners);
        const Vec2 descent = Vec2{-d.gx, -d.gy} * (0.1 * L / grad_mag);

        const double det = d.axx * d.ayy - d.axy * d.axy;
        bool moved = false;
        if (std::abs(det) >= kSingularDet) {
            const Vec2 newton{(-d.gx * d.ayy + d.gy * d.axy) / det,
                              (d.gx * d.axy - d.gy * d.axx) / det};
            moved = try_damped(newton, before);
        }
        // The Hessian is indefinite away from the minimum, so the Newton
        // direction can point uphill; the plain descent direction still
        // makes progress there.
        if (!moved) moved = try_damped(descent, before);
        if (!moved) break;
    }
    return p;
}

Vec2 kk_newton_step(int local_i, Layout& layout, const KKModel& model,
                    const KKNewtonOptions& opt) {
    const auto all = identity_partners(model.size());
    return kk_newton_step_over(local_i, layout, model, all, opt);
}

double stability_ratio(std::span<const double> current_lengths,
                       std::span<const double> target_lengths) {
    if (current_lengths.size() != target_lengths.size())
        throw DomainError("stability_ratio: length mismatch");
    if (current_lengths.empty())
        throw DomainError("stability_ratio: need at least one edge");

    const std::size_t n = current_lengths.size();
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i)
        dev[i] = std::abs(current_lengths[i] - target_lengths[i]);

    double mean = 0.0;
    for (double d : dev) mean += d;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double d : dev) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n);

    const double sd = std::sqrt(var);
    if (sd == 0.0) return 0.0; // all deviations equal, including all-zero
    return mean / sd;
}

std::vector<int> kkmsds_starting_area(const Graph& g, const std::vector<int>& component) {
    int seed_node = -1;
    int best_degree = -1;
    for (int v : component) {
        if (g.degree(v) > best_degree) {
            best_degree = g.degree(v);
            seed_node = v;
        }
    }
    // Two-hop ball by BFS from the seed.
    std::vector<int> result;
    std::vector<std::pair<int, int>> frontier{{seed_node, 0}};
    std::vector<char> visited(g.node_count, 0);
    visited[seed_node] = 1;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        auto [u, hops] = frontier[head];
        result.push_back(u);
        if (hops == 2) continue;
        for (int v : g.adjacency[u]) {
            if (!visited[v]) {
                visited[v] = 1;
                frontier.emplace_back(v, hops + 1);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::string_view KKFamilyAlgorithm::name() const {
    switch (variant_) {
        case KKVariant::Classic: return "kk";
        case KKVariant::MultiSelect: return "kk-ms";
        case KKVariant::DecayingStiffness: return "kk-ms-ds";
    }
    return "kk";
}

void KKFamilyAlgorithm::on_initialize(const ParamSet& params) {
    length_fraction_ = params.number("L_scale_fraction", 0.9);
    stiffness_k_ = params.number("K", 1.0);
    k_top_param_ = params.integer("k_top", 0);
    resets_enabled_ = params.boolean("resets", true);
    gamma_ = params.number("gamma", 0.9);
    // Settled areas plateau at r of roughly 1.3 to 5 depending on structure,
    // while churn sits near 1, so no small threshold separates the phases;
    // the dependable default is to expand every stability_window steps.
    epsilon_ = params.number("epsilon", 1e18);
    stability_window_ = params.integer("stability_window", 10);
    newton_.max_inner = params.integer("max_inner", 20);
    newton_.inner_tolerance = params.number("inner_tolerance", 1e-6);

    rng_ = Rng(seed_);
    newton_.jitter_rng = &rng_;
    expansions_ = 0;
    iteration_ = 0;
    selection_history_.clear();

    const auto components = connected_components(*graph_);
    const std::size_t ncomp = components.size();

    // Disconnected graphs: each component is laid out independently in its
    // own cell of a grid packing, largest component first.
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(ncomp))));
    const int rows = static_cast<int>((ncomp + cols - 1) / cols);
    const double cell_w = ncomp == 1 ? layout_.bounds.width : layout_.bounds.width / cols;
    const double cell_h = ncomp == 1 ? layout_.bounds.height : layout_.bounds.height / rows;
    const double cell_diag = std::hypot(cell_w, cell_h);

    comps_.clear();
    comps_.resize(ncomp);
    for (std::size_t c = 0; c < ncomp; ++c) {
        Component& comp = comps_[c];
        comp.model = make_kk_model(*graph_, components[c], cell_diag, length_fraction_, stiffness_k_);
        const int n = comp.model.size();

        comp.global_to_local.assign(graph_->node_count, -1);
        for (int i = 0; i < n; ++i) comp.global_to_local[comp.model.nodes[i]] = i;

        comp.adj.assign(n, {});
        for (int i = 0; i < n; ++i) {
            for (int vg : graph_->adjacency[comp.model.nodes[i]])
                comp.adj[i].push_back(comp.global_to_local[vg]);
            std::sort(comp.adj[i].begin(), comp.adj[i].end());
        }
        for (int i = 0; i < n; ++i)
            for (int j : comp.adj[i])
                if (i < j) comp.local_edges.emplace_back(i, j);

        if (ncomp > 1) {
            // Map this component's initial positions into its cell, keeping a
            // 10% interior margin.
            const double ox = cell_w * static_cast<double>(c % cols);
            const double oy = cell_h * static_cast<double>(c / cols);
            double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
            double min_y = min_x, max_y = -min_x;
            for (int gnode : comp.model.nodes) {
                const Vec2 p = layout_.positions[gnode];
                min_x = std::min(min_x, p.x); max_x = std::max(max_x, p.x);
                min_y = std::min(min_y, p.y); max_y = std::max(max_y, p.y);
            }
            const double span_x = max_x - min_x, span_y = max_y - min_y;
            for (int gnode : comp.model.nodes) {
                Vec2& p = layout_.positions[gnode];
                const double fx = span_x > 0.0 ? (p.x - min_x) / span_x : 0.5;
                const double fy = span_y > 0.0 ? (p.y - min_y) / span_y : 0.5;
                p.x = ox + cell_w * (0.1 + 0.8 * fx);
                p.y = oy + cell_h * (0.1 + 0.8 * fy);
            }
        }

        if (variant_ == KKVariant::DecayingStiffness && n > 1) {
            const auto area = kkmsds_starting_area(*graph_, components[c]);
            comp.in_active.assign(n, 0);
            for (int gnode : area) {
                comp.active.push_back(comp.global_to_local[gnode]);
                comp.in_active[comp.global_to_local[gnode]] = 1;
            }
            std::sort(comp.active.begin(), comp.active.end());
        } else {
            comp.active = identity_partners(n);
            comp.in_active.assign(n, 1);
        }
        comp.sigma.assign(n, 1.0);
        comp.update_counts.assign(n, 0);
        comp.selected_since_reset.assign(n, 0);

        const int pool = static_cast<int>(comp.active.size());
        comp.reset_threshold = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(pool))));
        if (k_top_param_ > 0)
            comp.k_top = k_top_param_;
        else
            comp.k_top = variant_ == KKVariant::Classic ? 1 : comp.reset_threshold;
    }
}

double KKFamilyAlgorithm::node_delta(const Component& c, int local) const {
    const Vec2 g = kk_gradient_over(local, layout_, c.model,
                                    std::span<const int>(c.active));
    return c.sigma[local] * g.norm();
}

void KKFamilyAlgorithm::rebuild_queue(Component& c) {
    c.queue.clear();
    for (int i : c.active) c.queue.insert({node_delta(c, i), i});
    std::fill(c.selected_since_reset.begin(), c.selected_since_reset.end(), 0);
    c.distinct_selected = 0;
}

void KKFamilyAlgorithm::maybe_expand(Component& c) {
    // Stability of the active area, measured over its edges.
    std::vector<double> current, target;
    for (const auto& [u, v] : c.local_edges) {
        if (!c.in_active[u] || !c.in_active[v]) continue;
        current.push_back(distance(layout_.positions[c.model.nodes[u]],
                                   layout_.positions[c.model.nodes[v]]));
        target.push_back(c.model.ideal(u, v));
    }
    if (current.empty()) return;

    const double r = stability_ratio(current, target);
    if (r < epsilon_)
        ++c.stable_streak;
    else
        c.stable_streak = 0;
    if (c.stable_streak < stability_window_) return;
    c.stable_streak = 0;
    if (c.active.size() == static_cast<std::size_t>(c.model.size())) return;

    // Add every node adjacent to the active set; newcomers start at full
    // stiffness.
    std::vector<int> frontier;
    for (int i : c.active)
        for (int j : c.adj[i])
            if (!c.in_active[j]) {
                c.in_active[j] = 1;
                frontier.push_back(j);
            }
    for (int j : frontier) {
        c.active.push_back(j);
        c.sigma[j] = 1.0;
        c.update_counts[j] = 0;
    }
    std::sort(c.active.begin(), c.active.end());
    ++expansions_;

    const int pool = static_cast<int>(c.active.size());
    c.reset_threshold = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(pool))));
    if (k_top_param_ <= 0 && variant_ != KKVariant::Classic) c.k_top = c.reset_threshold;
    rebuild_queue(c);
}

void KKFamilyAlgorithm::step_component(Component& c, StepReport& report) {
    if (c.model.size() <= 1) {
        c.quiet_last_step = true;
        return;
    }
    if (c.queue.empty()) rebuild_queue(c);

    const std::span<const int> partners(c.active);
    std::vector<QueueEntry> popped;
    const int batch = std::min<int>(c.k_top, static_cast<int>(c.queue.size()));
    for (int b = 0; b < batch; ++b) {
        auto it = c.queue.begin();
        popped.push_back(*it);
        c.queue.erase(it);
    }

    bool quiet = true;
    for (const auto& entry : popped) {
        const int i = entry.node;
        if (record_selections_) selection_history_.push_back(c.model.nodes[i]);
        if (!c.selected_since_reset[i]) {
            c.selected_since_reset[i] = 1;
            ++c.distinct_selected;
        }
        const Vec2 before = layout_.positions[c.model.nodes[i]];
        const Vec2 after = kk_newton_step_over(i, layout_, c.model, partners, newton_);
        const double moved = distance(before, after);
        if (moved > 0.0) {
            ++report.moved_nodes;
            report.max_displacement = std::max(report.max_displacement, moved);
            quiet = false;
        }
        if (variant_ == KKVariant::DecayingStiffness) {
            ++c.update_counts[i];
            c.sigma[i] = std::pow(gamma_, c.update_counts[i]);
        }
    }
    // Fresh deltas for the popped nodes only; everything else stays as
    // inserted until the next reset.
    for (const auto& entry : popped) {
        const double delta = node_delta(c, entry.node);
        c.queue.insert({delta, entry.node});
        if (delta >= newton_.inner_tolerance) quiet = false;
    }
    c.quiet_last_step = quiet;

    if (variant_ == KKVariant::DecayingStiffness) maybe_expand(c);

    if (resets_enabled_ && c.distinct_selected >= c.reset_threshold) rebuild_queue(c);
}

StepReport KKFamilyAlgorithm::step() {
    StepReport report;
    ++iteration_;
    bool all_quiet = true;
    for (auto& c : comps_) {
        step_component(c, report);
        all_quiet = all_quiet && c.quiet_last_step;
    }
    report.busy = variant_ == KKVariant::DecayingStiffness && !fully_expanded();
    report.converged = all_quiet && !report.busy;
    return report;
}

double KKFamilyAlgorithm::total_energy() const {
    double e = 0.0;
    for (const auto& c : comps_) e += kk_energy(layout_, c.model);
    return e;
}

std::vector<int> KKFamilyAlgorithm::active_set_global(int comp) const {
    std::vector<int> out;
    out.reserve(comps_[comp].active.size());
    for (int i : comps_[comp].active) out.push_back(comps_[comp].model.nodes[i]);
    std::sort(out.begin(), out.end());
    return out;
}

double KKFamilyAlgorithm::sigma_of(int comp, int global_node) const {
    const int local = comps_[comp].global_to_local[global_node];
    return comps_[comp].sigma[local];
}

bool KKFamilyAlgorithm::fully_expanded() const {
    for (const auto& c : comps_)
        if (c.active.size() != static_cast<std::size_t>(c.model.size())) return false;
    return true;
}

nlohmann::json KKFamilyAlgorithm::stats() const {
    nlohmann::json j;
    j["components"] = comps_.size();
    j["iterations"] = iteration_;
    if (variant_ == KKVariant::DecayingStiffness) {
        j["expansions"] = expansions_;
        j["fully_expanded"] = fully_expanded();
        nlohmann::json sizes = nlohmann::json::array();
        for (const auto& c : comps_) sizes.push_back(c.active.size());
        j["active_set_sizes"] = std::move(sizes);
    }
    return j;
}

} // namespace fdl
