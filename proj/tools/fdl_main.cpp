#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdl/bench.hpp"
#include "fdl/errors.hpp"
#include "fdl/graph.hpp"
#include "fdl/metrics.hpp"
#include "fdl/runner.hpp"
#include "fdl/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

json parse_param_value(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || parsed.is_object() || parsed.is_array()) return json(text);
    return parsed;
}

fdl::ParamSet parse_params(const std::vector<std::string>& kvs) {
    json obj = json::object();
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw fdl::DomainError("--params expects key=value, got '" + kv + "'");
        obj[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
    }
    return fdl::ParamSet(obj);
}

std::vector<fdl::Duration> parse_marks(const std::string& csv) {
    std::vector<fdl::Duration> marks;
    std::string token;
    std::istringstream ss(csv);
    while (std::getline(ss, token, ','))
        if (!token.empty()) marks.push_back(fdl::parse_duration(token));
    return marks;
}

std::vector<fdl::Vec2> load_positions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fdl::ParseError("cannot open positions file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw fdl::ParseError("positions file " + path + ": " + e.what());
    }
    if (j.is_object() && j.contains("positions")) j = j["positions"];
    if (!j.is_array()) throw fdl::ParseError("positions file " + path + ": expected an array");
    std::vector<fdl::Vec2> out;
    out.reserve(j.size());
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2)
            throw fdl::ParseError("positions file " + path + ": entries must be [x, y]");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

struct GenArgs {
    std::string generator;
    std::vector<double> args;
    std::string out;
    std::uint64_t seed = 1;
};

int cmd_gen(const GenArgs& a) {
    fdl::DatasetSpec spec;
    spec.name = a.generator;
    spec.generator = a.generator;
    spec.args = a.args;
    if (a.generator == "grid_rnd" && spec.args.size() == 3)
        spec.args.push_back(static_cast<double>(a.seed));
    const fdl::Graph g = fdl::build_dataset(spec);

    write_file(a.out, fdl::to_edge_list(g));
    const json sidecar{{"generator", a.generator},
                       {"args", a.args},
                       {"nodes", g.node_count},
                       {"edges", g.edge_count()},
                       {"avg_degree", fdl::avg_degree(g)}};
    write_file(a.out + ".json", sidecar.dump(2) + "\n");
    std::cout << sidecar.dump() << "\n";
    return 0;
}

struct LayoutArgs {
    std::string graph_path;
    std::string algo;
    std::string budget = "5s";
    std::string marks;
    std::uint64_t seed = 1;
    std::string out = "layout_out";
    std::vector<std::string> params;
    double width = 1000.0, height = 1000.0;
    std::string init = "random";
    bool no_convergence = false;
    std::int64_t max_iterations = 0;
    int svg_size = 1000;
};

int cmd_layout(const LayoutArgs& a) {
    const fdl::Graph g = fdl::load_graph_file(a.graph_path);

    fdl::RunConfig cfg;
    cfg.budget = fdl::parse_duration(a.budget);
    cfg.snapshot_marks = parse_marks(a.marks);
    cfg.seed = a.seed;
    cfg.bounds = {a.width, a.height};
    cfg.algorithm_params = parse_params(a.params);
    cfg.allow_convergence = !a.no_convergence;
    if (a.max_iterations > 0) cfg.max_iterations = a.max_iterations;
    cfg.virtual_step = fdl::virtual_clock_from_env();

    const fdl::RunRecord record = fdl::run_layout(g, a.algo, cfg, a.init);
    fdl::RenderStyle style;
    style.image_size = a.svg_size;
    fdl::write_run_outputs(g, record, a.out, style);

    const auto& final_snap = record.snapshots.back();
    const json summary{{"algorithm", record.algorithm_name},
                       {"termination", to_string(record.termination)},
                       {"iterations", record.total_iterations},
                       {"snapshots", record.snapshots.size()},
                       {"final_crossings", final_snap.crossings},
                       {"final_edge_length_stddev", final_snap.edge_length_stddev},
                       {"out", a.out}};
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_metrics(const std::string& graph_path, const std::string& positions_path) {
    const fdl::Graph g = fdl::load_graph_file(graph_path);
    fdl::Layout layout;
    layout.positions = load_positions(positions_path);
    if (static_cast<int>(layout.positions.size()) != g.node_count)
        throw fdl::DomainError("positions count (" + std::to_string(layout.positions.size()) +
                               ") does not match graph node count (" +
                               std::to_string(g.node_count) + ")");
    const fdl::MetricsReport report = fdl::compute_metrics(g, layout);
    std::cout << fdl::metrics_to_json(report).dump() << "\n";
    return 0;
}

struct RenderArgs {
    std::string graph_path;
    std::string positions_path;
    std::string out;
    int size = 1000;
    double node_radius = 3.0;
    double edge_width = 1.0;
    double margin = 0.05;
    std::string node_color = "#2a6f97";
    std::string edge_color = "#9a9a9a";
};

int cmd_render(const RenderArgs& a) {
    const fdl::Graph g = fdl::load_graph_file(a.graph_path);
    fdl::Layout layout;
    layout.positions = load_positions(a.positions_path);
    if (static_cast<int>(layout.positions.size()) != g.node_count)
        throw fdl::DomainError("positions count does not match graph node count");
    fdl::RenderStyle style;
    style.image_size = a.size;
    style.node_radius = a.node_radius;
    style.edge_width = a.edge_width;
    style.margin_fraction = a.margin;
    style.node_color = a.node_color;
    style.edge_color = a.edge_color;
    write_file(a.out, fdl::render_svg(g, layout, style));
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

int cmd_bench(const std::string& matrix_path, int jobs, const std::string& out_override) {
    fdl::BenchMatrix matrix = fdl::load_bench_matrix(matrix_path);
    if (!out_override.empty()) matrix.output_dir = out_override;
    if (auto env_clock = fdl::virtual_clock_from_env()) matrix.virtual_step = env_clock;

    const fdl::BenchResult result = fdl::run_bench(matrix, jobs);
    const json summary{{"cells", result.cells.size()},
                       {"failed", result.failed_count},
                       {"output_dir", matrix.output_dir}};
    std::cout << summary.dump() << "\n";
    if (result.failed_count > 0) {
        for (const auto& cell : result.cells)
            if (cell.failed)
                std::cerr << "FAILED " << cell.dataset << " / " << cell.algorithm << " / seed "
                          << cell.seed << ": " << cell.error << "\n";
        return kExitRuntime;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"force-directed layout engine and benchmark harness"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a dataset as edge-list + sidecar stats");
    gen_cmd->add_option("generator", gen.generator, "tree | sierpinski | grid_rnd | cycle")
        ->required();
    gen_cmd->add_option("args", gen.args, "generator arguments");
    gen_cmd->add_option("--out", gen.out, "output edge-list path")->required();
    gen_cmd->add_option("--seed", gen.seed, "seed for randomized generators");

    LayoutArgs lay;
    auto* lay_cmd = app.add_subcommand("layout", "run one algorithm on one graph");
    lay_cmd->add_option("graph", lay.graph_path, "graph file (edge list or GML)")->required();
    lay_cmd->add_option("--algo", lay.algo, "kk | kk-ms | kk-ms-ds | dh | fr | frr | fa2")
        ->required();
    lay_cmd->add_option("--budget", lay.budget, "time budget (ms/s/m suffix)");
    lay_cmd->add_option("--marks", lay.marks, "comma-separated snapshot marks");
    lay_cmd->add_option("--seed", lay.seed, "run seed");
    lay_cmd->add_option("--out", lay.out, "output directory");
    lay_cmd->add_option("--params", lay.params, "algorithm parameter key=value (repeatable)");
    lay_cmd->add_option("--width", lay.width, "canvas width");
    lay_cmd->add_option("--height", lay.height, "canvas height");
    lay_cmd->add_option("--init", lay.init, "initial placement: random | circle");
    lay_cmd->add_flag("--no-convergence", lay.no_convergence,
                      "terminate on the time budget only");
    lay_cmd->add_option("--max-iterations", lay.max_iterations, "iteration safety cap");
    lay_cmd->add_option("--svg-size", lay.svg_size, "snapshot image size in pixels");

    std::string metrics_graph, metrics_positions;
    auto* met_cmd = app.add_subcommand("metrics", "crossings and edge-length spread of a drawing");
    met_cmd->add_option("graph", metrics_graph, "graph file")->required();
    met_cmd->add_option("positions", metrics_positions, "JSON positions file")->required();

    RenderArgs ren;
    auto* ren_cmd = app.add_subcommand("render", "render a drawing to SVG");
    ren_cmd->add_option("graph", ren.graph_path, "graph file")->required();
    ren_cmd->add_option("positions", ren.positions_path, "JSON positions file")->required();
    ren_cmd->add_option("--out", ren.out, "output SVG path")->required();
    ren_cmd->add_option("--size", ren.size, "image size in pixels");
    ren_cmd->add_option("--node-radius", ren.node_radius, "node radius");
    ren_cmd->add_option("--edge-width", ren.edge_width, "edge stroke width");
    ren_cmd->add_option("--margin", ren.margin, "margin fraction");
    ren_cmd->add_option("--node-color", ren.node_color, "node fill color");
    ren_cmd->add_option("--edge-color", ren.edge_color, "edge stroke color");

    std::string bench_matrix, bench_out;
    int bench_jobs = 1;
    auto* bench_cmd = app.add_subcommand("bench", "run a dataset x algorithm x seed matrix");
    bench_cmd->add_option("--matrix", bench_matrix, "matrix JSON file")->required();
    bench_cmd->add_option("--jobs", bench_jobs, "parallel cells");
    bench_cmd->add_option("--out", bench_out, "override matrix output_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (lay_cmd->parsed()) return cmd_layout(lay);
        if (met_cmd->parsed()) return cmd_metrics(metrics_graph, metrics_positions);
        if (ren_cmd->parsed()) return cmd_render(ren);
        if (bench_cmd->parsed()) return cmd_bench(bench_matrix, bench_jobs, bench_out);
    } catch (const fdl::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
