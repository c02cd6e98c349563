#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descent/optimizer.hpp"
#include "descent/problem.hpp"

namespace descent {

// Flat "section.key = value" text, '#' comments, later keys override
// earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);
// Applies "KEY=VALUE" command-line overrides on top of file keys.
void apply_override(KeyValues& kv, const std::string& assignment);

struct ProblemConfig {
    std::string name = "quadratic";  // quadratic | noisy_quadratic | rosenbrock | logistic
    std::int64_t dim = 10;
    double cond = 1.0;          // eigenvalues linearly spaced in [1, cond]
    std::string wstar = "zero"; // zero | ones  (target for b = A w*)
    double x0 = 1.0;            // initial fill value for the weights
    double noise = 0.0;         // gradient noise scale (noisy_quadratic)
    std::string csv;            // dataset path (logistic)
    double l2 = 0.0;
    std::int64_t batch_size = 0;    // 0 = full batch
    std::int64_t rows = 0, cols = 0;  // optional matrix2d layout, rows*cols = dim
};

struct RunConfig {
    OptimizerSpec optimizer{};
    ProblemConfig problem{};
    std::int64_t steps = 100;
    std::uint64_t seed = 0;
    std::string trace_path;  // empty = no trace file
    std::int64_t log_every = 1;
    double threshold = 1e-6;  // loss threshold for steps-to-threshold
};

// Builds a RunConfig from parsed keys; unknown keys and invalid values
// raise ConfigError. Schedule and hyperparameter defaults are resolved per
// optimizer (see README for the key list).
RunConfig run_config_from(const KeyValues& kv);

ProblemPtr make_problem(const ProblemConfig& cfg, std::uint64_t seed);
ParameterSet initial_params(const ProblemConfig& cfg, const Problem& problem);

// Resolves a relative trace path against $DESCENT_OUT_DIR when set.
std::string resolve_output_path(const std::string& path);

}  // namespace descent
