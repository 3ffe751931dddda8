#include "fdl/runner.hpp"

#include <cmath>
#include <cstdlib>

#include "fdl/errors.hpp"
#include "fdl/metrics.hpp"

namespace fdl {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::BudgetExceeded: return "BudgetExceeded";
        case Termination::Converged: return "Converged";
        case Termination::IterationCap: return "IterationCap";
    }
    return "BudgetExceeded";
}

namespace {

Snapshot capture_snapshot(const Graph& g, const Layout& layout, Duration elapsed,
                          std::int64_t iteration, bool is_final) {
    Snapshot snap;
    snap.elapsed = elapsed;
    snap.iteration = iteration;
    snap.positions = layout.positions; // copy; later steps must not alter it
    snap.is_final = is_final;
    const MetricsReport metrics = compute_metrics(g, layout);
    snap.crossings = metrics.crossings;
    snap.edge_length_mean = metrics.edge_length_mean;
    snap.edge_length_stddev = metrics.edge_length_stddev;
    return snap;
}

void check_finite(const Algorithm& algo, std::int64_t iteration) {
    const auto& positions = algo.layout().positions;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!positions[i].finite())
            throw NumericalError("algorithm " + std::string(algo.name()) +
                                 ": non-finite coordinate at node " + std::to_string(i) +
                                 ", iteration " + std::to_string(iteration));
    }
}

} // namespace

RunRecord run(Algorithm& algo, const Graph& g, const RunConfig& cfg) {
    if (!algo.initialized()) throw DomainError("run: algorithm not initialized");
    for (std::size_t i = 0; i < cfg.snapshot_marks.size(); ++i) {
        if (cfg.snapshot_marks[i] > cfg.budget)
            throw DomainError("run: snapshot mark beyond budget");
        if (i > 0 && cfg.snapshot_marks[i] <= cfg.snapshot_marks[i - 1])
            throw DomainError("run: snapshot marks must be strictly ascending");
    }

    RunRecord record;
    record.algorithm_name = std::string(algo.name());
    record.config = cfg;

    const auto wall_start = std::chrono::steady_clock::now();
    Duration elapsed{0};
    std::int64_t iteration = 0;
    std::size_t next_mark = 0;
    int quiet_streak = 0;
    const double convergence_threshold =
        cfg.convergence_fraction * algo.layout().bounds.diagonal();

    Termination termination = Termination::BudgetExceeded;
    while (true) {
        if (elapsed >= cfg.budget) {
            termination = Termination::BudgetExceeded;
            break;
        }
        if (cfg.max_iterations && iteration >= *cfg.max_iterations) {
            termination = Termination::IterationCap;
            break;
        }

        const auto step_start = std::chrono::steady_clock::now();
        const StepReport report = algo.step();
        elapsed += cfg.virtual_step
                       ? *cfg.virtual_step
                       : std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() -
                                                              step_start);
        ++iteration;
        check_finite(algo, iteration);

        while (next_mark < cfg.snapshot_marks.size() &&
               elapsed >= cfg.snapshot_marks[next_mark]) {
            record.snapshots.push_back(
                capture_snapshot(g, algo.layout(), elapsed, iteration, false));
            ++next_mark;
        }

        if (cfg.allow_convergence && !report.busy) {
            if (report.converged) {
                termination = Termination::Converged;
                break;
            }
            if (report.max_displacement < convergence_threshold) {
                if (++quiet_streak >= cfg.convergence_window) {
                    termination = Termination::Converged;
                    break;
                }
            } else {
                quiet_streak = 0;
            }
        } else if (report.busy) {
            quiet_streak = 0;
        }
    }

    record.snapshots.push_back(capture_snapshot(g, algo.layout(), elapsed, iteration, true));
    record.termination = termination;
    record.total_iterations = iteration;
    record.wall_time = std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() -
                                                            wall_start);
    record.algorithm_stats = algo.stats();
    return record;
}

std::int64_t duration_ms(Duration d) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

nlohmann::json run_record_to_json(const RunRecord& record, bool include_wall) {
    nlohmann::json snapshots = nlohmann::json::array();
    for (const auto& snap : record.snapshots) {
        nlohmann::json positions = nlohmann::json::array();
        for (const auto& p : snap.positions)
            positions.push_back(nlohmann::json::array({p.x, p.y}));
        snapshots.push_back({{"elapsed_ms", duration_ms(snap.elapsed)},
                             {"iteration", snap.iteration},
                             {"crossings", snap.crossings},
                             {"edge_length_mean", snap.edge_length_mean},
                             {"edge_length_stddev", snap.edge_length_stddev},
                             {"final", snap.is_final},
                             {"positions", std::move(positions)}});
    }

    nlohmann::json j{{"algorithm", record.algorithm_name},
                     {"params", record.config.algorithm_params.json()},
                     {"seed", record.config.seed},
                     {"bounds",
                      {{"width", record.config.bounds.width},
                       {"height", record.config.bounds.height}}},
                     {"budget_ms", duration_ms(record.config.budget)},
                     {"snapshots", std::move(snapshots)},
                     {"termination", to_string(record.termination)},
                     {"total_iterations", record.total_iterations}};
    if (!record.algorithm_stats.empty()) j["algorithm_stats"] = record.algorithm_stats;
    if (include_wall) j["wall_ms"] = duration_ms(record.wall_time);
    return j;
}

Duration parse_duration(const std::string& text) {
    if (text.empty()) throw ParseError("duration: empty string");
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ParseError("duration: cannot parse '" + text + "'");
    }
    const std::string suffix = text.substr(pos);
    double ms = 0.0;
    if (suffix.empty() || suffix == "ms")
        ms = value;
    else if (suffix == "s")
        ms = value * 1e3;
    else if (suffix == "m")
        ms = value * 60e3;
    else
        throw ParseError("duration: unknown suffix '" + suffix + "' in '" + text + "'");
    if (ms < 0.0) throw ParseError("duration: negative value '" + text + "'");
    return std::chrono::duration_cast<Duration>(std::chrono::duration<double, std::milli>(ms));
}

std::optional<Duration> virtual_clock_from_env() {
    const char* env = std::getenv("FDL_VIRTUAL_CLOCK");
    if (env == nullptr || *env == '\0') return std::nullopt;
    const std::string text(env);
    const std::string prefix = "steps:";
    if (text.rfind(prefix, 0) != 0)
        throw ParseError("FDL_VIRTUAL_CLOCK must look like steps:<ms>, got '" + text + "'");
    const std::string ms_part = text.substr(prefix.size());
    return parse_duration(ms_part);
}

} // namespace fdl
