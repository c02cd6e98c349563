#include "descent/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "descent/errors.hpp"
#include "descent/kernels.hpp"
#include "descent/optimizer.hpp"
#include "descent/vec.hpp"

namespace descent {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json summary_json_obj(const RunSummary& s) {
    nlohmann::json j;
    j["optimizer"] = s.optimizer;
    j["steps_done"] = s.steps_done;
    j["final_loss"] = s.final_loss;
    j["best_loss"] = s.best_loss;
    if (s.steps_to_threshold)
        j["steps_to_threshold"] = *s.steps_to_threshold;
    else
        j["steps_to_threshold"] = nullptr;
    j["diverged"] = s.diverged;
    if (s.diverged) j["diverged_at"] = s.diverged_at;
    j["trace_path"] = s.trace_path;
    j["wall_seconds"] = s.wall_seconds;
    return j;
}

}  // namespace

RunSummary run(const RunConfig& config) {
    const auto start = Clock::now();
    config.optimizer.validate();
    const ProblemPtr problem = make_problem(config.problem, config.seed);
    const std::unique_ptr<Stepper> stepper = make_stepper(config.optimizer);
    OptimizerState state = stepper->init_state(*problem->layout());
    ParameterSet w = initial_params(config.problem, *problem);

    RunSummary summary;
    summary.optimizer = to_string(config.optimizer.id);
    summary.best_loss = std::numeric_limits<double>::infinity();
    summary.trace_path = resolve_output_path(config.trace_path);

    std::ostringstream trace;
    trace << trace_header() << '\n';

    for (std::int64_t t = 1; t <= config.steps; ++t) {
        ProblemGradientSource source(*problem, t);
        const double multiplier = eta_at(config.optimizer.schedule, t);
        StepOutcome outcome;
        try {
            outcome = stepper->step(state, w, source, multiplier);
        } catch (const NumericError&) {
            // divergence: keep the trace truncated at the last finite step
            summary.diverged = true;
            summary.diverged_at = t;
            break;
        }
        w = std::move(outcome.params);
        summary.steps_done = t;
        summary.best_loss = std::min(summary.best_loss, outcome.loss);
        if (!summary.steps_to_threshold && outcome.loss < config.threshold)
            summary.steps_to_threshold = t;
        if (t % config.log_every == 0 || t == config.steps) {
            const TraceRecord record{t,
                                     outcome.loss,
                                     outcome.grad_norm,
                                     outcome.update_norm,
                                     outcome.effective_lr,
                                     outcome.extra_evals};
            trace << format_trace_row(record) << '\n';
            summary.trace.push_back(record);
        }
    }

    if (!summary.diverged) {
        // full-batch loss at the final weights
        summary.final_loss = problem->evaluate(w).loss;
        summary.best_loss = std::min(summary.best_loss, summary.final_loss);
        summary.final_params = w.values;
    } else {
        summary.final_loss = std::numeric_limits<double>::quiet_NaN();
    }
    if (!summary.trace_path.empty()) write_file_atomic(summary.trace_path, trace.str());
    summary.wall_seconds = seconds_since(start);
    return summary;
}

std::string summary_to_json(const RunSummary& summary) {
    return summary_json_obj(summary).dump(2);
}

std::string summary_to_text(const RunSummary& summary) {
    std::ostringstream out;
    out << "optimizer:      " << summary.optimizer << '\n';
    if (summary.diverged) {
        out << "status:         diverged at step " << summary.diverged_at << '\n';
        out << "last finite:    step " << summary.steps_done << '\n';
        return out.str();
    }
    out << "steps:          " << summary.steps_done << '\n';
    out << "final loss:     " << summary.final_loss << '\n';
    out << "best loss:      " << summary.best_loss << '\n';
    if (summary.steps_to_threshold)
        out << "steps to thr.:  " << *summary.steps_to_threshold << '\n';
    else
        out << "steps to thr.:  not reached\n";
    if (!summary.trace_path.empty()) out << "trace:          " << summary.trace_path << '\n';
    return out.str();
}

CompareReport compare(const std::vector<RunConfig>& configs) {
    if (configs.empty()) throw ConfigError("compare: empty config list");
    auto problem_key = [](const ProblemConfig& p) {
        std::ostringstream key;
        key << p.name << '|' << p.dim << '|' << p.cond << '|' << p.wstar << '|' << p.x0
            << '|' << p.noise << '|' << p.csv << '|' << p.l2 << '|' << p.batch_size << '|'
            << p.rows << '|' << p.cols;
        return key.str();
    };
    const std::string shared = problem_key(configs.front().problem);
    for (const RunConfig& cfg : configs) {
        if (problem_key(cfg.problem) != shared)
            throw ConfigError("compare: all configs must share one problem");
    }

    CompareReport report;
    report.rows.resize(configs.size());
    std::vector<std::string> errors(configs.size());
    // one worker per run, no shared mutable state
    std::vector<std::thread> workers;
    workers.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                report.rows[i] = run(configs[i]);
            } catch (const std::exception& err) {
                errors[i] = err.what();
            }
        });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::string& err : errors)
        if (!err.empty()) throw ConfigError("compare: " + err);

    // traces written by run() are re-parsed to prove the round trip
    for (RunSummary& row : report.rows) {
        if (row.trace_path.empty()) continue;
        const std::vector<TraceRecord> parsed = parse_trace_file(row.trace_path);
        if (parsed.size() != row.trace.size())
            throw ConfigError("compare: trace '" + row.trace_path + "' did not round-trip");
    }
    return report;
}

std::string report_to_json(const CompareReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const RunSummary& row : report.rows) rows.push_back(summary_json_obj(row));
    nlohmann::json j;
    j["rows"] = rows;
    return j.dump(2);
}

std::string report_to_text(const CompareReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %14s %14s %12s %10s\n", "optimizer",
                  "final_loss", "best_loss", "steps_to_thr", "wall_s");
    out << line;
    for (const RunSummary& row : report.rows) {
        std::string to_thr = row.steps_to_threshold
                                 ? std::to_string(*row.steps_to_threshold)
                                 : std::string("-");
        if (row.diverged) to_thr = "diverged";
        std::snprintf(line, sizeof(line), "%-12s %14.6e %14.6e %12s %10.3f\n",
                      row.optimizer.c_str(), row.final_loss, row.best_loss, to_thr.c_str(),
                      row.wall_seconds);
        out << line;
    }
    return out.str();
}

GradcheckReport gradcheck(const Problem& problem, std::int64_t points,
                          std::uint64_t seed) {
    if (points < 1) throw ConfigError("gradcheck: points must be >= 1");
    GradcheckReport report;
    report.points = points;
    std::mt19937_64 engine(mix_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = problem.layout()->size();
    if (problem.has_hvp()) report.max_hvp_rel_err = 0.0;
    for (std::int64_t p = 0; p < points; ++p) {
        ParameterSet w = fill_params(problem.layout(), 0.0);
        for (double& x : w.values) x = normal(engine);
        const std::vector<double> analytic = problem.evaluate(w).gradient;
        const std::vector<double> numeric = fd_gradient(problem, w);
        const double scale = std::max(linf_norm(analytic), 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            const double err = std::abs(analytic[i] - numeric[i]) / scale;
            if (err > report.max_grad_rel_err) {
                report.max_grad_rel_err = err;
                report.worst_coordinate = static_cast<std::int64_t>(i);
            }
        }
        if (problem.has_hvp()) {
            std::vector<double> dir(n);
            for (double& x : dir) x = normal(engine);
            const std::vector<double> exact = problem.hvp(w, dir);
            const std::vector<double> numeric_hvp = fd_hvp(problem, w, dir);
            const double hvp_scale = std::max(linf_norm(exact), 1e-12);
            for (std::size_t i = 0; i < n; ++i) {
                const double err = std::abs(exact[i] - numeric_hvp[i]) / hvp_scale;
                report.max_hvp_rel_err = std::max(*report.max_hvp_rel_err, err);
            }
        }
    }
    report.pass = report.max_grad_rel_err < report.grad_tolerance &&
                  (!report.max_hvp_rel_err || *report.max_hvp_rel_err < report.hvp_tolerance);
    return report;
}

std::string gradcheck_to_text(const GradcheckReport& report) {
    std::ostringstream out;
    out << (report.pass ? "PASS" : "FAIL") << ": max gradient relative error "
        << report.max_grad_rel_err << " over " << report.points << " points (tolerance "
        << report.grad_tolerance << ")";
    if (!report.pass && report.worst_coordinate >= 0)
        out << ", worst coordinate " << report.worst_coordinate;
    if (report.max_hvp_rel_err)
        out << "; max hvp relative error " << *report.max_hvp_rel_err << " (tolerance "
            << report.hvp_tolerance << ")";
    out << '\n';
    return out.str();
}

}  // namespace descent
