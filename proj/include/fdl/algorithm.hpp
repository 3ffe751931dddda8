#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/params.hpp"

namespace fdl {

/// What a single step did. max_displacement is the largest node movement in
/// canvas units; converged means the algorithm considers itself done; busy
/// means structural work is still pending (e.g. a growing active set), so a
/// quiet layout must not be treated as converged yet.
struct StepReport {
    int moved_nodes = 0;
    double max_displacement = 0.0;
    bool converged = false;
    bool busy = false;
};

/// Uniform stepping contract shared by all seven layout algorithms.
///
/// An instance owns its Layout. initialize() must be called exactly once
/// before step(). Given identical (graph, params, seed) the k-th step()
/// produces identical positions on every run; nothing inside step() may
/// depend on wall time, addresses or thread scheduling.
class Algorithm {
public:
    virtual ~Algorithm() = default;

    virtual std::string_view name() const = 0;

    void initialize(const Graph& g, Layout layout, const ParamSet& params, std::uint64_t seed);

    virtual StepReport step() = 0;

    const Layout& layout() const { return layout_; }
    const Graph& graph() const { return *graph_; }
    bool initialized() const { return graph_ != nullptr; }

    /// Algorithm-specific diagnostics for run reports (expansion counts and
    /// the like). Base implementation returns an empty object.
    virtual nlohmann::json stats() const { return nlohmann::json::object(); }

protected:
    virtual void on_initialize(const ParamSet& params) = 0;

    const Graph* graph_ = nullptr;
    Layout layout_;
    std::uint64_t seed_ = 0;
};

/// Algorithm registry. Valid names: kk, kk-ms, kk-ms-ds, dh, fr, frr, fa2.
/// Throws DomainError for anything else.
std::unique_ptr<Algorithm> make_algorithm(std::string_view name);

/// The seven registered names, in presentation order.
const std::vector<std::string>& algorithm_names();

} // namespace fdl
