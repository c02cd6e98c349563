#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "descent/hyperparameters.hpp"
#include "descent/layout.hpp"
#include "descent/problem.hpp"
#include "descent/schedule.hpp"
#include "descent/state.hpp"

namespace descent {

enum class OptimizerId {
    sgd,
    momentum,
    nag,
    adagrad,
    rmsprop,
    adadelta,
    adam,
    adamnc,
    adamax,
    nadam,
    adamw,
    adafactor,
    amsgrad,
    radam,
    lamb,
    lookahead,
    adabelief,
    sam,
    asam,
    ranger21,
    adan,
    lion,
    sophia,
    muon,
};

const char* to_string(OptimizerId id);
std::optional<OptimizerId> optimizer_from_string(std::string_view name);

// Lookahead, SAM, and ASAM wrap another (non-wrapper) optimizer.
bool is_wrapper(OptimizerId id);

struct OptimizerInfo {
    OptimizerId id;
    const char* name;  // display name
    int year;          // year introduced
};

// All 24 optimizers in chronological order.
std::span<const OptimizerInfo> optimizer_table();

Hyperparameters default_hyperparameters(OptimizerId id);
ScheduleKind default_schedule_kind(OptimizerId id);

struct OptimizerSpec {
    OptimizerId id = OptimizerId::sgd;
    Hyperparameters hp{};
    ScheduleSpec schedule{};
    OptimizerId inner = OptimizerId::sgd;  // Lookahead inner / SAM base

    void validate() const;  // throws ConfigError
};

// Spec with per-optimizer default hyperparameters and schedule.
OptimizerSpec default_spec(OptimizerId id);

// Hands gradients (and Hessian-vector products) to a stepper while
// counting evaluations, so extra_evals can be reported. SAM/ASAM wrap a
// source to move the evaluation point.
class GradientSource {
public:
    virtual ~GradientSource() = default;

    // Rejects non-finite losses and gradients with NumericError.
    virtual GradientEvaluation evaluate(const ParameterSet& w) = 0;
    virtual std::vector<double> hvp(const ParameterSet& w, std::span<const double> u) = 0;
    virtual std::int64_t eval_count() const = 0;
};

// Evaluates a problem at a fixed batch. The Hessian-vector product is
// exact when the problem provides one and central-difference otherwise;
// the fallback counts as two evaluations.
class ProblemGradientSource final : public GradientSource {
public:
    explicit ProblemGradientSource(const Problem& problem,
                                   std::optional<std::int64_t> batch = {});

    GradientEvaluation evaluate(const ParameterSet& w) override;
    std::vector<double> hvp(const ParameterSet& w, std::span<const double> u) override;
    std::int64_t eval_count() const override { return evals_; }

    std::optional<std::int64_t> batch() const { return batch_; }
    const Problem& problem() const { return *problem_; }

private:
    const Problem* problem_;
    std::optional<std::int64_t> batch_;
    std::int64_t evals_ = 0;
};

struct StepOutcome {
    ParameterSet params;          // the updated weights, all finite
    double loss = 0.0;            // from the step's primary evaluation
    double grad_norm = 0.0;       // L2 norm of that gradient
    double update_norm = 0.0;     // ||w' - w||_2
    double effective_lr = 0.0;    // scalar learning rate applied this step
    std::int64_t extra_evals = 0; // evaluations beyond the primary one
};

// A pure update rule: given (state, w, gradient source, schedule
// multiplier) produce the next weights. t is state.step_count + 1; the
// state is advanced in place. Steppers hold no mutable data themselves.
class Stepper {
public:
    virtual ~Stepper() = default;

    const OptimizerSpec& spec() const { return spec_; }

    virtual OptimizerState init_state(const ParameterLayout& layout) const = 0;
    virtual StepOutcome step(OptimizerState& state, const ParameterSet& w,
                             GradientSource& grads, double lr_multiplier) const = 0;

protected:
    explicit Stepper(OptimizerSpec spec) : spec_(std::move(spec)) {}

    OptimizerSpec spec_;
};

std::unique_ptr<Stepper> make_stepper(const OptimizerSpec& spec);

// Zero-filled buffers for the given optimizer; step_count = 0.
OptimizerState state_init(const OptimizerSpec& spec, const ParameterLayout& layout);
OptimizerState state_init(OptimizerId id, const ParameterLayout& layout);

}  // namespace descent
