#include "fdl/algorithm.hpp"

#include "fdl/dh.hpp"
#include "fdl/errors.hpp"
#include "fdl/force.hpp"
#include "fdl/kk.hpp"

namespace fdl {

void Algorithm::initialize(const Graph& g, Layout layout, const ParamSet& params,
                           std::uint64_t seed) {
    if (static_cast<int>(layout.positions.size()) != g.node_count)
        throw DomainError("initialize: layout size does not match node count");
    graph_ = &g;
    layout_ = std::move(layout);
    seed_ = seed;
    on_initialize(params);
}

std::unique_ptr<Algorithm> make_algorithm(std::string_view name) {
    if (name == "kk") return std::make_unique<KKFamilyAlgorithm>(KKVariant::Classic);
    if (name == "kk-ms") return std::make_unique<KKFamilyAlgorithm>(KKVariant::MultiSelect);
    if (name == "kk-ms-ds")
        return std::make_unique<KKFamilyAlgorithm>(KKVariant::DecayingStiffness);
    if (name == "dh") return std::make_unique<DHAlgorithm>();
    if (name == "fr")
        return std::make_unique<SpringLayoutAlgorithm>("fr", AttractionKind::Quadratic);
    if (name == "frr")
        return std::make_unique<SpringLayoutAlgorithm>("frr", AttractionKind::Cubic);
    if (name == "fa2") return std::make_unique<FA2Algorithm>();

    std::string valid;
    for (const auto& candidate : algorithm_names()) {
        if (!valid.empty()) valid += ", ";
        valid += candidate;
    }
    throw DomainError("unknown algorithm '" + std::string(name) + "'; valid names: " + valid);
}

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"kk", "kk-ms", "kk-ms-ds", "dh",
                                                "fr", "frr", "fa2"};
    return names;
}

} // namespace fdl
