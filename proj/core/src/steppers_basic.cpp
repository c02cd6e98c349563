#include <cmath>

#include "steppers.hpp"

namespace descent::detail {

StepOutcome make_outcome(const ParameterSet& old_params, std::vector<double> values,
                         const GradientEvaluation& eval, double effective_lr,
                         std::int64_t extra_evals) {
    if (!all_finite(values))
        throw NumericError("step produced non-finite weights");
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - old_params.values[i];
        norm_sq += d * d;
    }
    StepOutcome out;
    out.params = ParameterSet{old_params.layout, std::move(values)};
    out.loss = eval.loss;
    out.grad_norm = l2_norm(eval.gradient);
    out.update_norm = std::sqrt(norm_sq);
    out.effective_lr = effective_lr;
    out.extra_evals = extra_evals;
    return out;
}

namespace {

// w <- w - lr*g
class SgdStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout&) const override {
        return OptimizerState{0, SgdState{}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double lr = spec_.hp.eta * multiplier;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr * eval.gradient[i];
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// v <- gamma*v - lr*g;  w <- w + v
class MomentumStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, MomentumState{zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& ms = std::get<MomentumState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double lr = spec_.hp.eta * multiplier;
        const double gamma = spec_.hp.gamma;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            ms.velocity[i] = gamma * ms.velocity[i] - lr * eval.gradient[i];
            values[i] += ms.velocity[i];
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Like Momentum, but the gradient is taken at the lookahead point
// w + gamma*v. That evaluation replaces the usual one.
class NagStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, MomentumState{zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& ms = std::get<MomentumState>(state.data);
        const std::int64_t before = grads.eval_count();
        const double gamma = spec_.hp.gamma;
        ParameterSet probe = w;
        for (std::size_t i = 0; i < probe.values.size(); ++i)
            probe.values[i] += gamma * ms.velocity[i];
        const GradientEvaluation eval = grads.evaluate(probe);
        const double lr = spec_.hp.eta * multiplier;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            ms.velocity[i] = gamma * ms.velocity[i] - lr * eval.gradient[i];
            values[i] += ms.velocity[i];
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// a <- a + g^2;  w <- w - lr*g/sqrt(a + eps)
class AdagradStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdagradState{zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdagradState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double g = eval.gradient[i];
            as.accum[i] += g * g;
            values[i] -= lr * g / std::sqrt(as.accum[i] + eps);
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// b <- beta*b + (1-beta)*g^2;  w <- w - lr*g/sqrt(b + eps)
class RmspropStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, RmspropState{zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& rs = std::get<RmspropState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        ema_sq(rs.sq_avg, spec_.hp.beta2, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] -= lr * eval.gradient[i] / std::sqrt(rs.sq_avg[i] + eps);
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// No global learning rate: the update is scaled by the running RMS of past
// updates over the running RMS of gradients. The update EMA uses the
// previous step's value before being refreshed with the new update.
class AdadeltaStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdadeltaState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& ds = std::get<AdadeltaState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double beta = spec_.hp.beta2;
        const double eps = spec_.hp.eps;
        ema_sq(ds.sq_avg, beta, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double delta = -multiplier *
                                 std::sqrt(ds.update_sq_avg[i] + eps) /
                                 std::sqrt(ds.sq_avg[i] + eps) * eval.gradient[i];
            ds.update_sq_avg[i] = beta * ds.update_sq_avg[i] + (1.0 - beta) * delta * delta;
            values[i] += delta;
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, multiplier,
                            grads.eval_count() - before - 1);
    }
};

}  // namespace

std::unique_ptr<Stepper> make_basic_stepper(const OptimizerSpec& spec) {
    switch (spec.id) {
        case OptimizerId::sgd: return std::make_unique<SgdStepper>(spec);
        case OptimizerId::momentum: return std::make_unique<MomentumStepper>(spec);
        case OptimizerId::nag: return std::make_unique<NagStepper>(spec);
        case OptimizerId::adagrad: return std::make_unique<AdagradStepper>(spec);
        case OptimizerId::rmsprop: return std::make_unique<RmspropStepper>(spec);
        case OptimizerId::adadelta: return std::make_unique<AdadeltaStepper>(spec);
        default: return nullptr;
    }
}

}  // namespace descent::detail
