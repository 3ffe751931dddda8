#include "fdl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "fdl/errors.hpp"

namespace fs = std::filesystem;

namespace fdl {

namespace {

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out.empty() ? std::string("unnamed") : out;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

Graph build_dataset(const DatasetSpec& spec) {
    if (!spec.path.empty()) return load_graph_file(spec.path);
    auto arg = [&](std::size_t i) -> double {
        if (i >= spec.args.size())
            throw DomainError("dataset '" + spec.name + "': generator '" + spec.generator +
                              "' is missing argument " + std::to_string(i + 1));
        return spec.args[i];
    };
    if (spec.generator == "tree")
        return generate_tree(static_cast<int>(arg(0)), static_cast<int>(arg(1)));
    if (spec.generator == "sierpinski") return generate_sierpinski(static_cast<int>(arg(0)));
    if (spec.generator == "grid_rnd")
        return generate_grid_random(static_cast<int>(arg(0)), static_cast<int>(arg(1)), arg(2),
                                    spec.args.size() > 3 ? static_cast<std::uint64_t>(arg(3)) : 1);
    if (spec.generator == "cycle") return generate_cycle(static_cast<int>(arg(0)));
    throw DomainError("dataset '" + spec.name + "': unknown generator '" + spec.generator +
                      "'; known: tree, sierpinski, grid_rnd, cycle");
}

BenchMatrix parse_bench_matrix(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("bench matrix: expected a JSON object");
    BenchMatrix m;

    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty())
        throw ParseError("bench matrix: 'datasets' must be a non-empty array");
    for (const auto& d : j["datasets"]) {
        DatasetSpec spec;
        spec.name = d.value("name", "");
        if (spec.name.empty()) throw ParseError("bench matrix: dataset without a name");
        spec.path = d.value("path", "");
        spec.generator = d.value("generator", "");
        if (d.contains("args"))
            for (const auto& a : d["args"]) spec.args.push_back(a.get<double>());
        if (spec.path.empty() && spec.generator.empty())
            throw ParseError("bench matrix: dataset '" + spec.name +
                             "' needs a path or a generator");
        m.datasets.push_back(std::move(spec));
    }

    if (!j.contains("algorithms") || !j["algorithms"].is_array() || j["algorithms"].empty())
        throw ParseError("bench matrix: 'algorithms' must be a non-empty array");
    for (const auto& a : j["algorithms"]) {
        AlgorithmSpec spec;
        spec.name = a.value("name", "");
        if (spec.name.empty()) throw ParseError("bench matrix: algorithm without a name");
        spec.label = a.value("label", spec.name);
        if (a.contains("params")) spec.params = ParamSet(a["params"]);
        m.algorithms.push_back(std::move(spec));
    }

    // Names must be unique: they become CSV keys and directory names.
    std::set<std::string> labels, names;
    for (const auto& a : m.algorithms)
        if (!labels.insert(a.label).second)
            throw ParseError("bench matrix: duplicate algorithm label '" + a.label + "'");
    for (const auto& d : m.datasets)
        if (!names.insert(d.name).second)
            throw ParseError("bench matrix: duplicate dataset name '" + d.name + "'");

    if (j.contains("seeds"))
        for (const auto& s : j["seeds"]) m.seeds.push_back(s.get<std::uint64_t>());
    if (m.seeds.empty()) m.seeds.push_back(1);

    m.budget = parse_duration(j.value("budget", "10s"));
    if (j.contains("marks"))
        for (const auto& mk : j["marks"]) m.marks.push_back(parse_duration(mk.get<std::string>()));
    if (j.contains("bounds")) {
        m.bounds.width = j["bounds"].value("width", 1000.0);
        m.bounds.height = j["bounds"].value("height", 1000.0);
    }
    m.output_dir = j.value("output_dir", m.output_dir);
    if (j.contains("virtual_clock_ms"))
        m.virtual_step = std::chrono::duration_cast<Duration>(
            std::chrono::duration<double, std::milli>(j["virtual_clock_ms"].get<double>()));
    m.allow_convergence = j.value("allow_convergence", true);
    if (j.contains("max_iterations")) m.max_iterations = j["max_iterations"].get<std::int64_t>();
    m.init_mode = j.value("init", "random");
    if (m.init_mode != "random" && m.init_mode != "circle")
        throw ParseError("bench matrix: init must be 'random' or 'circle'");
    return m;
}

BenchMatrix load_bench_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("matrix file " + path + ": " + e.what());
    }
    return parse_bench_matrix(j);
}

RunRecord run_layout(const Graph& g, const std::string& algorithm, const RunConfig& cfg,
                     const std::string& init_mode) {
    Layout initial = init_mode == "circle"
                         ? init_circular_layout(g.node_count, cfg.bounds)
                         : init_random_layout(g.node_count, cfg.bounds, cfg.seed);
    auto algo = make_algorithm(algorithm);
    algo->initialize(g, std::move(initial), cfg.algorithm_params, cfg.seed);
    return run(*algo, g, cfg);
}

void write_run_outputs(const Graph& g, const RunRecord& record, const std::string& dir,
                       const RenderStyle& style) {
    fs::create_directories(dir);
    write_text_file(fs::path(dir) / "run.json", run_record_to_json(record).dump(2) + "\n");

    int scheduled = 0;
    for (const auto& snap : record.snapshots) {
        Layout snap_layout{snap.positions, record.config.bounds};
        std::string file_name;
        if (snap.is_final) {
            file_name = "snapshot_final.svg";
        } else {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "snapshot_%02d_%lldms.svg", scheduled++,
                          static_cast<long long>(duration_ms(snap.elapsed)));
            file_name = buf;
        }
        write_text_file(fs::path(dir) / file_name, render_svg(g, snap_layout, style));
    }
}

BenchResult run_bench(const BenchMatrix& matrix, int jobs) {
    const std::size_t n_data = matrix.datasets.size();
    const std::size_t n_algo = matrix.algorithms.size();
    const std::size_t n_seed = matrix.seeds.size();
    const std::size_t n_cells = n_data * n_algo * n_seed;

    fs::create_directories(matrix.output_dir);

    // Datasets are immutable once built and shared by every cell.
    std::vector<Graph> graphs;
    graphs.reserve(n_data);
    for (const auto& spec : matrix.datasets) graphs.push_back(build_dataset(spec));

    BenchResult result;
    result.cells.resize(n_cells);
    for (const auto& spec : matrix.datasets) {
        if (spec.name.find("snowflake") != std::string::npos)
            result.notes.push_back("dataset '" + spec.name +
                                   "' is a tree-generator stand-in; the original construction "
                                   "is undocumented");
    }

    std::atomic<std::size_t> next_cell{0};
    std::atomic<int> failures{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t cell = next_cell.fetch_add(1);
            if (cell >= n_cells) break;
            const std::size_t d = cell / (n_algo * n_seed);
            const std::size_t a = (cell / n_seed) % n_algo;
            const std::size_t s = cell % n_seed;

            const auto& dataset = matrix.datasets[d];
            const auto& algo = matrix.algorithms[a];
            BenchCellOutcome& out = result.cells[cell];
            out.dataset = dataset.name;
            out.algorithm = algo.label;
            out.seed = matrix.seeds[s];

            RunConfig cfg;
            cfg.budget = matrix.budget;
            cfg.snapshot_marks = matrix.marks;
            cfg.seed = matrix.seeds[s];
            cfg.bounds = matrix.bounds;
            cfg.algorithm_params = algo.params;
            cfg.max_iterations = matrix.max_iterations;
            cfg.allow_convergence = matrix.allow_convergence;
            cfg.virtual_step = matrix.virtual_step;

            const fs::path cell_dir = fs::path(matrix.output_dir) / "cells" /
                                      (sanitize(dataset.name) + "__" + sanitize(algo.label) +
                                       "__s" + std::to_string(matrix.seeds[s]));
            try {
                const RunRecord record =
                    run_layout(graphs[d], algo.name, cfg, matrix.init_mode);
                write_run_outputs(graphs[d], record, cell_dir.string(), matrix.style);
                const Snapshot& final_snap = record.snapshots.back();
                out.final_crossings = final_snap.crossings;
                out.final_stddev = final_snap.edge_length_stddev;
                out.iterations = record.total_iterations;
                out.termination = to_string(record.termination);
            } catch (const std::exception& e) {
                out.failed = true;
                out.error = e.what();
                out.termination = "FAILED";
                failures.fetch_add(1);
            }
        }
    };

    const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(n_cells)));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.failed_count = failures.load();

    // bench.csv in deterministic matrix order.
    write_text_file(fs::path(matrix.output_dir) / "bench.csv", bench_csv(result, matrix));

    // Pivot tables shaped rows=datasets, columns=algorithms; cells average
    // the final metric over seeds.
    auto pivot = [&](auto metric_of, auto format) {
        std::ostringstream csv;
        csv << "dataset";
        for (const auto& a : matrix.algorithms) csv << ',' << a.label;
        csv << '\n';
        for (std::size_t d = 0; d < n_data; ++d) {
            csv << matrix.datasets[d].name;
            for (std::size_t a = 0; a < n_algo; ++a) {
                double sum = 0.0;
                int ok = 0;
                for (std::size_t s = 0; s < n_seed; ++s) {
                    const auto& cell = result.cells[(d * n_algo + a) * n_seed + s];
                    if (!cell.failed) {
                        sum += metric_of(cell);
                        ++ok;
                    }
                }
                csv << ',' << (ok > 0 ? format(sum / ok) : std::string("NA"));
            }
            csv << '\n';
        }
        return csv.str();
    };
    write_text_file(fs::path(matrix.output_dir) / "pivot_crossings.csv",
                    pivot([](const BenchCellOutcome& c) { return static_cast<double>(c.final_crossings); },
                          fixed2));
    write_text_file(fs::path(matrix.output_dir) / "pivot_stddev.csv",
                    pivot([](const BenchCellOutcome& c) { return c.final_stddev; }, fixed6));

    nlohmann::json summary{{"cells", n_cells},
                           {"failed", result.failed_count},
                           {"budget_ms", duration_ms(matrix.budget)},
                           {"seeds", matrix.seeds},
                           {"notes", result.notes}};
    write_text_file(fs::path(matrix.output_dir) / "summary.json", summary.dump(2) + "\n");
    return result;
}

std::string bench_csv(const BenchResult& result, const BenchMatrix& matrix) {
    std::ostringstream csv;
    csv << "dataset,algorithm,seed,budget_ms,final_crossings,final_stddev,iterations,termination\n";
    for (const auto& cell : result.cells) {
        csv << cell.dataset << ',' << cell.algorithm << ',' << cell.seed << ','
            << duration_ms(matrix.budget) << ',';
        if (cell.failed)
            csv << ",,0,FAILED";
        else
            csv << cell.final_crossings << ',' << fixed6(cell.final_stddev) << ','
                << cell.iterations << ',' << cell.termination;
        csv << '\n';
    }
    return csv.str();
}

} // namespace fdl
