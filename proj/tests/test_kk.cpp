#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fdl/algorithm.hpp"
#include "fdl/errors.hpp"
#include "fdl/graph.hpp"
#include "fdl/kk.hpp"
#include "fdl/layout.hpp"
#include "oracles.hpp"

using namespace fdl;

namespace {

// Two-node model with hop distance 1: l = length_per_hop, k = stiffness_const.
KKModel two_node_model(double ideal_length, double stiffness) {
    KKModel m;
    m.nodes = {0, 1};
    m.dist.n = 2;
    m.dist.d = {0, 1, 1, 0};
    m.length_per_hop = ideal_length;
    m.stiffness_const = stiffness;
    return m;
}

Layout positions(std::vector<Vec2> p, Bounds b = {1000.0, 1000.0}) {
    Layout layout;
    layout.positions = std::move(p);
    layout.bounds = b;
    return layout;
}

} // namespace

TEST_CASE("kk model construction") {
    Graph g = parse_edge_list("a b\nb c");
    KKModel m = make_kk_model(g, Bounds{100.0, 100.0});
    const double diag = std::hypot(100.0, 100.0);
    CHECK(m.length_per_hop == doctest::Approx(0.9 * diag / 2.0)); // diameter 2
    CHECK(m.ideal(0, 2) == doctest::Approx(2.0 * m.length_per_hop));
    CHECK(m.stiffness(0, 2) == doctest::Approx(1.0 / 4.0));
    CHECK(m.stiffness(0, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_kk_model(parse_edge_list("a b\nc d"), Bounds{10.0, 10.0}), DomainError);
}

TEST_CASE("kk_energy") {
    SUBCASE("zero at the ideal distance") {
        KKModel m = two_node_model(5.0, 1.0);
        CHECK(kk_energy(positions({{0.0, 0.0}, {5.0, 0.0}}), m) == doctest::Approx(0.0));
    }
    SUBCASE("half k times squared deviation") {
        KKModel m = two_node_model(5.0, 2.0);
        CHECK(kk_energy(positions({{0.0, 0.0}, {6.0, 0.0}}), m) == doctest::Approx(1.0));
    }
    SUBCASE("matches the from-scratch oracle on random instances") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Graph g = oracles::random_graph(8, 0.3, seed, true);
            KKModel m = make_kk_model(g, Bounds{100.0, 100.0});
            auto pos = oracles::random_positions(8, 100.0, seed + 1000);
            const double expected =
                oracles::kk_energy_reference(g, pos, m.length_per_hop, m.stiffness_const);
            const double got = kk_energy(positions(pos, {100.0, 100.0}), m);
            CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("kk_gradient") {
    SUBCASE("zero at equilibrium") {
        KKModel m = two_node_model(5.0, 1.0);
        const Vec2 g0 = kk_gradient(0, positions({{0.0, 0.0}, {5.0, 0.0}}), m);
        CHECK(g0.x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(g0.y == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("pure x displacement beyond ideal gives gx > 0, gy = 0") {
        KKModel m = two_node_model(5.0, 1.0);
        const Vec2 g1 = kk_gradient(1, positions({{0.0, 0.0}, {8.0, 0.0}}), m);
        CHECK(g1.x > 0.0);
        CHECK(g1.y == doctest::Approx(0.0));
    }
    SUBCASE("matches central finite differences on random instances") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const int n = 4 + static_cast<int>(seed % 9); // up to 12
            Graph g = oracles::random_graph(n, 0.3, seed, true);
            KKModel m = make_kk_model(g, Bounds{100.0, 100.0});
            Layout layout = positions(oracles::random_positions(n, 100.0, seed + 2000),
                                      {100.0, 100.0});
            const double h = 1e-6 * m.length_per_hop;
            for (int i = 0; i < n; ++i) {
                const Vec2 grad = kk_gradient(i, layout, m);
                Layout plus = layout, minus = layout;
                plus.positions[i].x += h;
                minus.positions[i].x -= h;
                const double fd_x = (kk_energy(plus, m) - kk_energy(minus, m)) / (2.0 * h);
                plus = layout;
                minus = layout;
                plus.positions[i].y += h;
                minus.positions[i].y -= h;
                const double fd_y = (kk_energy(plus, m) - kk_energy(minus, m)) / (2.0 * h);
                const double scale = std::max({std::abs(fd_x), std::abs(fd_y), 1e-6});
                CHECK(std::abs(grad.x - fd_x) / scale < 1e-5);
                CHECK(std::abs(grad.y - fd_y) / scale < 1e-5);
            }
        }
    }
}

TEST_CASE("kk_newton_step") {
    SUBCASE("two-body convergence to the ideal length") {
        KKModel m = two_node_model(40.0, 1.0);
        Layout layout = positions({{0.0, 0.0}, {3.0, 1.0}});
        KKNewtonOptions opt;
        opt.max_inner = 20;
        opt.inner_tolerance = 1e-12;
        kk_newton_step(1, layout, m, opt); // node 0 stays frozen
        const double dist = distance(layout.positions[0], layout.positions[1]);
        CHECK(std::abs(dist - 40.0) < 1e-6 * 40.0);
    }
    SUBCASE("a node below tolerance does not move") {
        KKModel m = two_node_model(5.0, 1.0);
        Layout layout = positions({{0.0, 0.0}, {5.0, 0.0}});
        KKNewtonOptions opt;
        const Vec2 before = layout.positions[1];
        kk_newton_step(1, layout, m, opt);
        CHECK(layout.positions[1] == before);
    }
    SUBCASE("never increases the energy on random instances") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const int n = 5 + static_cast<int>(seed % 6);
            Graph g = oracles::random_graph(n, 0.4, seed, true);
            KKModel m = make_kk_model(g, Bounds{100.0, 100.0});
            Layout layout = positions(oracles::random_positions(n, 100.0, seed + 3000),
                                      {100.0, 100.0});
            Rng jitter(seed);
            KKNewtonOptions opt;
            opt.jitter_rng = &jitter;
            double energy = kk_energy(layout, m);
            for (int round = 0; round < 3 * n; ++round) {
                kk_newton_step(round % n, layout, m, opt);
                const double next = kk_energy(layout, m);
                CHECK(next <= energy + 1e-9 * std::max(1.0, std::abs(energy)));
                energy = next;
            }
        }
    }
}

TEST_CASE("stability_ratio") {
    SUBCASE("zero when current equals target") {
        const std::vector<double> cur{3.0, 4.0, 5.0};
        CHECK(stability_ratio(cur, cur) == 0.0);
    }
    SUBCASE("deviations {1,3} give r = 2") {
        const std::vector<double> cur{2.0, 4.0};
        const std::vector<double> tgt{1.0, 1.0};
        CHECK(stability_ratio(cur, tgt) == doctest::Approx(2.0));
    }
    SUBCASE("equal nonzero deviations give r = 0 by convention") {
        const std::vector<double> cur{4.0, 5.0, 9.0};
        const std::vector<double> tgt{2.0, 3.0, 7.0};
        CHECK(stability_ratio(cur, tgt) == 0.0);
    }
    SUBCASE("length mismatch is a domain error") {
        const std::vector<double> a{1.0, 2.0};
        const std::vector<double> b{1.0};
        CHECK_THROWS_AS(stability_ratio(a, b), DomainError);
        CHECK_THROWS_AS(stability_ratio({}, {}), DomainError);
    }
}

TEST_CASE("kk-ms queue behavior") {
    SUBCASE("k_top=1 without resets reduces to classic argmax selection") {
        Graph g = oracles::random_graph(12, 0.3, 7, true);
        ParamSet params;
        params.set("k_top", 1);
        params.set("resets", false);

        auto classic = std::make_unique<KKFamilyAlgorithm>(KKVariant::Classic);
        auto multi = std::make_unique<KKFamilyAlgorithm>(KKVariant::MultiSelect);
        classic->record_selections(true);
        multi->record_selections(true);
        classic->initialize(g, init_random_layout(g.node_count, {100, 100}, 3), params, 3);
        multi->initialize(g, init_random_layout(g.node_count, {100, 100}, 3), params, 3);
        for (int step = 0; step < 50; ++step) {
            classic->step();
            multi->step();
        }
        CHECK(classic->selection_history() == multi->selection_history());
        CHECK(classic->layout().positions == multi->layout().positions);
    }
    SUBCASE("9-node graph resets after 3 distinct selections") {
        Graph g = generate_grid_random(3, 3, 1.0, 1); // 9 nodes, connected
        ParamSet params;
        params.set("k_top", 1);
        KKFamilyAlgorithm algo(KKVariant::MultiSelect);
        algo.record_selections(true);
        algo.initialize(g, init_random_layout(9, {100, 100}, 5), params, 5);

        // Step until the third distinct node has been selected; the counter
        // must be cleared by the reset at the end of that step.
        std::set<int> distinct;
        int steps = 0;
        while (distinct.size() < 3 && steps < 100) {
            algo.step();
            ++steps;
            distinct.clear();
            for (int v : algo.selection_history()) distinct.insert(v);
        }
        REQUIRE(distinct.size() == 3);
        CHECK(algo.distinct_selected(0) == 0); // reset fired
    }
    SUBCASE("selection sequence is reproducible") {
        Graph g = generate_tree(3, 3);
        auto run_once = [&] {
            KKFamilyAlgorithm algo(KKVariant::MultiSelect);
            algo.record_selections(true);
            algo.initialize(g, init_random_layout(g.node_count, {100, 100}, 11), ParamSet{}, 11);
            for (int i = 0; i < 40; ++i) algo.step();
            return algo.selection_history();
        };
        CHECK(run_once() == run_once());
    }
}

TEST_CASE("kk-ms-ds starting area") {
    SUBCASE("star graph takes all nodes") {
        Graph g = parse_edge_list("c a\nc b\nc d\nc e\nc f");
        auto area = kkmsds_starting_area(g, connected_components(g)[0]);
        CHECK(area.size() == 6);
    }
    SUBCASE("path of 7 picks the lowest-index degree-2 node") {
        Graph g = parse_edge_list("n0 n1\nn1 n2\nn2 n3\nn3 n4\nn4 n5\nn5 n6");
        auto area = kkmsds_starting_area(g, connected_components(g)[0]);
        // Max degree 2 first occurs at node 1; its 2-hop ball is {0,1,2,3}.
        CHECK(area == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("tree(6,3) ball matches an independent BFS oracle") {
        Graph g = generate_tree(6, 3);
        // Degree-7 internal nodes beat the degree-6 root; the first is node 1.
        int max_degree = -1, seed_node = -1;
        for (int v = 0; v < g.node_count; ++v)
            if (g.degree(v) > max_degree) {
                max_degree = g.degree(v);
                seed_node = v;
            }
        CHECK(seed_node == 1);
        CHECK(max_degree == 7);

        DistanceMatrix d = apsp_bfs(g);
        std::vector<int> expected;
        for (int v = 0; v < g.node_count; ++v)
            if (d.at(seed_node, v) <= 2) expected.push_back(v);
        auto area = kkmsds_starting_area(g, connected_components(g)[0]);
        CHECK(area == expected);
    }
}

TEST_CASE("kk-ms-ds stepping") {
    SUBCASE("default threshold forces monotone growth to the full graph") {
        Graph g = generate_grid_random(6, 6, 1.0, 2);
        KKFamilyAlgorithm algo(KKVariant::DecayingStiffness);
        algo.initialize(g, init_random_layout(g.node_count, {200, 200}, 4), ParamSet{}, 4);
        int last_size = algo.active_set_size(0);
        int steps = 0;
        while (!algo.fully_expanded() && steps < 5000) {
            algo.step();
            ++steps;
            const int size = algo.active_set_size(0);
            CHECK(size >= last_size); // active set only grows
            last_size = size;
        }
        CHECK(algo.fully_expanded());
        CHECK(algo.expansion_count() > 0);
    }
    SUBCASE("epsilon 0 blocks expansion and reports it") {
        Graph g = generate_grid_random(5, 5, 1.0, 2);
        ParamSet params;
        params.set("epsilon", 0.0);
        KKFamilyAlgorithm algo(KKVariant::DecayingStiffness);
        algo.initialize(g, init_random_layout(g.node_count, {200, 200}, 4), params, 4);
        StepReport last;
        for (int i = 0; i < 300; ++i) last = algo.step();
        CHECK(algo.expansion_count() == 0);
        CHECK_FALSE(algo.fully_expanded());
        CHECK(last.busy);                   // still structurally unfinished
        CHECK_FALSE(last.converged);        // quiet layout must not convert to Converged
        CHECK(algo.stats()["fully_expanded"] == false);
    }
    SUBCASE("sigma decays exactly as gamma^updates") {
        Graph g = generate_grid_random(4, 4, 1.0, 2);
        const double gamma = 0.875;
        ParamSet params;
        params.set("gamma", gamma);
        params.set("epsilon", 0.0); // keep the active set fixed
        KKFamilyAlgorithm algo(KKVariant::DecayingStiffness);
        algo.record_selections(true);
        algo.initialize(g, init_random_layout(g.node_count, {200, 200}, 9), params, 9);
        for (int i = 0; i < 25; ++i) algo.step();
        std::map<int, int> updates;
        for (int v : algo.selection_history()) ++updates[v];
        REQUIRE(!updates.empty());
        for (const auto& [node, count] : updates)
            CHECK(algo.sigma_of(0, node) == std::pow(gamma, count));
    }
    SUBCASE("grid 10x10 reaches full coverage before converging under defaults") {
        Graph g = generate_grid_random(10, 10, 1.0, 3);
        KKFamilyAlgorithm algo(KKVariant::DecayingStiffness);
        algo.initialize(g, init_random_layout(g.node_count, {1000, 1000}, 6), ParamSet{}, 6);
        bool converged_before_full = false;
        int steps = 0;
        while (steps < 20000) {
            const StepReport report = algo.step();
            ++steps;
            if (report.converged && !algo.fully_expanded()) converged_before_full = true;
            if (algo.fully_expanded()) break;
        }
        CHECK(algo.fully_expanded());
        CHECK_FALSE(converged_before_full);
        CHECK(algo.active_set_size(0) == 100);
    }
}

TEST_CASE("kk disconnected graphs") {
    // Components are packed separately and each reaches its own equilibrium.
    Graph g = parse_edge_list("a b\nb c\nc a\nx y\ny z\nz x");
    KKFamilyAlgorithm algo(KKVariant::Classic);
    algo.initialize(g, init_random_layout(g.node_count, {400, 400}, 8), ParamSet{}, 8);
    CHECK(algo.component_count() == 2);
    for (int i = 0; i < 400; ++i) algo.step();
    CHECK(algo.total_energy() == doctest::Approx(0.0).epsilon(1e-6));
    // Both triangles end up equilateral at their own scale.
    for (int comp = 0; comp < 2; ++comp)
        CHECK(kk_energy(algo.layout(), algo.model(comp)) ==
              doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("kk energy is non-increasing across run steps") {
    Graph g = generate_grid_random(5, 5, 1.0, 11);
    KKFamilyAlgorithm algo(KKVariant::Classic);
    algo.initialize(g, init_random_layout(g.node_count, {500, 500}, 13), ParamSet{}, 13);
    double energy = algo.total_energy();
    for (int i = 0; i < 300; ++i) {
        algo.step();
        const double next = algo.total_energy();
        CHECK(next <= energy + 1e-9 * std::max(1.0, std::abs(energy)));
        energy = next;
    }
}
