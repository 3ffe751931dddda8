#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdl/graph.hpp"
#include "fdl/runner.hpp"
#include "fdl/svg.hpp"

namespace fdl {

/// A dataset is either a graph file or an inline generator call
/// (tree, sierpinski, grid_rnd, cycle), so benchmark matrices need no
/// external data.
struct DatasetSpec {
    std::string name;
    std::string path;             // when non-empty, wins over generator
    std::string generator;
    std::vector<double> args;
};

Graph build_dataset(const DatasetSpec& spec);

struct AlgorithmSpec {
    std::string label; // unique column label; defaults to name
    std::string name;  // registry name
    ParamSet params;
};

struct BenchMatrix {
    std::vector<DatasetSpec> datasets;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::uint64_t> seeds;
    Duration budget{0};
    std::vector<Duration> marks;
    Bounds bounds{1000.0, 1000.0};
    std::string output_dir = "bench_out";
    std::optional<Duration> virtual_step;
    bool allow_convergence = true;
    std::optional<std::int64_t> max_iterations;
    std::string init_mode = "random"; // or "circle"
    RenderStyle style;
};

/// Matrix JSON:
/// {
///   "datasets":   [{"name": ..., "path": ...} | {"name": ..., "generator": ..., "args": [...]}],
///   "algorithms": [{"name": ..., "label"?: ..., "params"?: {...}}],
///   "seeds": [...], "budget": "10s", "marks": ["2s", "5s"],
///   "bounds"?: {"width": W, "height": H}, "output_dir"?: ...,
///   "virtual_clock_ms"?: N, "allow_convergence"?: bool,
///   "max_iterations"?: N, "init"?: "random" | "circle"
/// }
BenchMatrix parse_bench_matrix(const nlohmann::json& j);
BenchMatrix load_bench_matrix(const std::string& path);

/// One full layout run: init layout, make + initialize the algorithm, run.
RunRecord run_layout(const Graph& g, const std::string& algorithm, const RunConfig& cfg,
                     const std::string& init_mode = "random");

/// Writes run.json plus one SVG per snapshot into dir:
/// snapshot_<index>_<elapsed_ms>ms.svg for scheduled marks and
/// snapshot_final.svg for the terminal capture.
void write_run_outputs(const Graph& g, const RunRecord& record, const std::string& dir,
                       const RenderStyle& style);

struct BenchCellOutcome {
    std::string dataset;
    std::string algorithm;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    long long final_crossings = 0;
    double final_stddev = 0.0;
    std::int64_t iterations = 0;
    std::string termination;
};

struct BenchResult {
    std::vector<BenchCellOutcome> cells; // dataset-major, then algorithm, then seed
    int failed_count = 0;
    std::vector<std::string> notes;
};

/// Runs every (dataset x algorithm x seed) cell, up to `jobs` in parallel
/// (each cell stays single-threaded), and writes bench.csv, the two pivot
/// tables, summary.json and the per-cell run outputs under output_dir.
/// A cell that aborts is recorded as a FAILED row; the remaining cells
/// still run.
BenchResult run_bench(const BenchMatrix& matrix, int jobs = 1);

/// bench.csv content for the result (header + one row per cell, matrix order).
std::string bench_csv(const BenchResult& result, const BenchMatrix& matrix);

} // namespace fdl
