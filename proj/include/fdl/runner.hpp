#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdl/algorithm.hpp"
#include "fdl/graph.hpp"
#include "fdl/layout.hpp"
#include "fdl/params.hpp"

namespace fdl {

using Duration = std::chrono::nanoseconds;

/// How a run ended. A step that produces non-finite coordinates does not
/// terminate the run, it aborts it (NumericalError).
enum class Termination { BudgetExceeded, Converged, IterationCap };

std::string to_string(Termination t);

struct RunConfig {
    Duration budget{0};
    std::vector<Duration> snapshot_marks; // strictly ascending, each <= budget
    std::uint64_t seed = 0;
    Bounds bounds{1000.0, 1000.0};
    ParamSet algorithm_params;
    std::optional<std::int64_t> max_iterations;

    /// Early termination on quiescence: max step displacement below
    /// convergence_fraction * canvas diagonal for convergence_window
    /// consecutive steps. Disable to reproduce the pure time-budget
    /// protocol.
    bool allow_convergence = true;
    double convergence_fraction = 1e-6;
    int convergence_window = 10;

    /// When set, the run uses a virtual clock that advances by this amount
    /// per step instead of measuring wall time, making schedules and
    /// iteration counts reproducible.
    std::optional<Duration> virtual_step;
};

struct Snapshot {
    Duration elapsed{0};
    std::int64_t iteration = 0;
    std::vector<Vec2> positions;
    long long crossings = 0;
    double edge_length_mean = 0.0;
    double edge_length_stddev = 0.0;
    bool is_final = false;
};

struct RunRecord {
    std::string algorithm_name;
    RunConfig config;
    std::vector<Snapshot> snapshots; // scheduled marks first, final last
    Termination termination = Termination::BudgetExceeded;
    std::int64_t total_iterations = 0;
    Duration wall_time{0};
    nlohmann::json algorithm_stats;
};

/// Drives an initialized algorithm until the budget is spent, the iteration
/// cap is hit, or (when allowed) the run converges. Elapsed time is the sum
/// of measured step durations — snapshot capture does not consume budget —
/// or of virtual ticks when a virtual clock is configured. After each step,
/// one snapshot is captured per snapshot mark the elapsed time has passed;
/// a final snapshot is always appended at termination.
RunRecord run(Algorithm& algo, const Graph& g, const RunConfig& cfg);

/// JSON form: {algorithm, params, seed, bounds, budget_ms, snapshots:
/// [{elapsed_ms, iteration, crossings, edge_length_mean, edge_length_stddev,
/// final, positions: [[x, y], ...]}], termination, total_iterations,
/// algorithm_stats, wall_ms?}. wall_ms is environment-dependent and omitted
/// when include_wall is false.
nlohmann::json run_record_to_json(const RunRecord& record, bool include_wall = true);

/// Parses "30s", "1500ms", "2m", "1.5s" or a bare number (milliseconds).
Duration parse_duration(const std::string& text);

/// Whole milliseconds, rounded down.
std::int64_t duration_ms(Duration d);

/// Reads FDL_VIRTUAL_CLOCK ("steps:<ms>"); empty optional when unset.
/// Throws ParseError on a malformed value.
std::optional<Duration> virtual_clock_from_env();

} // namespace fdl
