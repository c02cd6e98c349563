#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descent/config.hpp"
#include "descent/trace.hpp"

namespace descent {

struct RunSummary {
    std::string optimizer;
    std::int64_t steps_done = 0;
    double final_loss = 0.0;  // full-batch loss at the final weights
    double best_loss = 0.0;   // best logged loss
    std::optional<std::int64_t> steps_to_threshold;
    bool diverged = false;
    std::int64_t diverged_at = 0;  // step at which divergence was detected
    std::string trace_path;
    double wall_seconds = 0.0;
    std::vector<TraceRecord> trace;  // the logged rows
    std::vector<double> final_params;
};

// Executes the configured run, writing trace rows every log_every steps
// plus the final step. On divergence the trace is truncated at the last
// finite step and summary.diverged is set.
RunSummary run(const RunConfig& config);

std::string summary_to_json(const RunSummary& summary);
std::string summary_to_text(const RunSummary& summary);

struct CompareReport {
    std::vector<RunSummary> rows;
};

// Runs every config (in parallel, one worker per run) against the shared
// problem; configs with mismatched problem sections are rejected.
CompareReport compare(const std::vector<RunConfig>& configs);

std::string report_to_json(const CompareReport& report);
std::string report_to_text(const CompareReport& report);

struct GradcheckReport {
    bool pass = false;
    double max_grad_rel_err = 0.0;
    std::optional<double> max_hvp_rel_err;
    std::int64_t worst_coordinate = -1;
    std::int64_t points = 0;
    double grad_tolerance = 1e-6;
    double hvp_tolerance = 1e-5;
};

// Compares analytic gradients (and Hessian-vector products where
// available) against central differences at seeded random points.
GradcheckReport gradcheck(const Problem& problem, std::int64_t points,
                          std::uint64_t seed);

std::string gradcheck_to_text(const GradcheckReport& report);

}  // namespace descent
