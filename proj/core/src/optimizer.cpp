#include "descent/optimizer.hpp"

#include <cmath>

#include "descent/errors.hpp"
#include "descent/vec.hpp"
#include "steppers.hpp"

namespace descent {

ProblemGradientSource::ProblemGradientSource(const Problem& problem,
                                             std::optional<std::int64_t> batch)
    : problem_(&problem), batch_(batch) {}

GradientEvaluation ProblemGradientSource::evaluate(const ParameterSet& w) {
    GradientEvaluation eval = problem_->evaluate(w, batch_);
    if (eval.gradient.size() != problem_->layout()->size())
        throw ConfigError("problem '" + problem_->name() +
                          "': gradient length does not match layout");
    if (!std::isfinite(eval.loss) || !all_finite(eval.gradient))
        throw NumericError("non-finite loss or gradient from problem '" +
                           problem_->name() + "'");
    ++evals_;
    return eval;
}

std::vector<double> ProblemGradientSource::hvp(const ParameterSet& w,
                                               std::span<const double> u) {
    std::vector<double> result;
    if (problem_->has_hvp()) {
        result = problem_->hvp(w, u, batch_);
        evals_ += 1;
    } else {
        result = fd_hvp(*problem_, w, u, 1e-5, batch_);
        evals_ += 2;  // two gradient evaluations behind the central difference
    }
    if (!all_finite(result))
        throw NumericError("non-finite Hessian-vector product from problem '" +
                           problem_->name() + "'");
    return result;
}

std::unique_ptr<Stepper> make_stepper(const OptimizerSpec& spec) {
    spec.validate();
    if (auto s = detail::make_basic_stepper(spec)) return s;
    if (auto s = detail::make_adam_family_stepper(spec)) return s;
    if (auto s = detail::make_modern_stepper(spec)) return s;
    if (auto s = detail::make_wrapper_stepper(spec)) return s;
    throw ConfigError(std::string("unknown optimizer id '") + to_string(spec.id) + "'");
}

OptimizerState state_init(const OptimizerSpec& spec, const ParameterLayout& layout) {
    return make_stepper(spec)->init_state(layout);
}

OptimizerState state_init(OptimizerId id, const ParameterLayout& layout) {
    return state_init(default_spec(id), layout);
}

}  // namespace descent
