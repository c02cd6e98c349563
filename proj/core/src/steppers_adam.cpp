#include <cmath>

#include "steppers.hpp"

namespace descent::detail {
namespace {

// m, v EMAs with bias correction; eps sits inside the square root.
class AdamStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        const double bc1 = 1.0 - std::pow(spec_.hp.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(spec_.hp.beta2, static_cast<double>(t));
        ema(as.m, spec_.hp.beta1, eval.gradient);
        ema_sq(as.v, spec_.hp.beta2, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double mhat = as.m[i] / bc1;
            const double vhat = as.v[i] / bc2;
            values[i] -= lr * mhat / std::sqrt(vhat + eps);
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Adam with time-varying decay rates: beta2_t = 1 - 1/t turns the second
// moment into a running average; the schedule replaces bias correction.
class AdamncStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        const double beta2t = 1.0 - 1.0 / static_cast<double>(t);
        ema(as.m, spec_.hp.beta1, eval.gradient);
        ema_sq(as.v, beta2t, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] -= lr * as.m[i] / std::sqrt(as.v[i] + eps);
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Second moment replaced by an exponentially weighted infinity norm
// u = max(beta2*u, |g|); no bias correction or eps needed for u.
class AdamaxStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamaxState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamaxState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double bc1 = 1.0 - std::pow(spec_.hp.beta1, static_cast<double>(t));
        ema(as.m, spec_.hp.beta1, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            as.u[i] = std::max(spec_.hp.beta2 * as.u[i], std::abs(eval.gradient[i]));
            // u = 0 implies every past gradient was 0, hence m = 0
            if (as.u[i] > 0.0) values[i] -= lr * (as.m[i] / bc1) / as.u[i];
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Adam with the Nesterov-style first moment:
// mN = beta1/(1-beta1^(t+1)) * m + (1-beta1)/(1-beta1^t) * g.
class NadamStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double beta1 = spec_.hp.beta1;
        const double eps = spec_.hp.eps;
        const double momentum_coef =
            beta1 / (1.0 - std::pow(beta1, static_cast<double>(t + 1)));
        const double grad_coef =
            (1.0 - beta1) / (1.0 - std::pow(beta1, static_cast<double>(t)));
        const double bc2 = 1.0 - std::pow(spec_.hp.beta2, static_cast<double>(t));
        ema(as.m, beta1, eval.gradient);
        ema_sq(as.v, spec_.hp.beta2, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double m_nesterov = momentum_coef * as.m[i] + grad_coef * eval.gradient[i];
            const double vhat = as.v[i] / bc2;
            values[i] -= lr * m_nesterov / std::sqrt(vhat + eps);
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Decoupled weight decay: the schedule multiplier scales both the Adam
// term and the decay. Decay shrinks weights unless the literal sign flag
// is set (see README).
class AdamwStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        std::vector<double> values = w.values;
        adamw_tensor_update(values, eval.gradient, as.m, as.v, t, spec_.hp.eta,
                            multiplier, spec_.hp.beta1, spec_.hp.beta2, spec_.hp.eps,
                            spec_.hp.lambda, spec_.hp.paper_literal_decay_sign);
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, spec_.hp.eta * multiplier,
                            grads.eval_count() - before - 1);
    }
};

// Keeps the running elementwise maximum of second moments; no debiasing,
// eps sits outside the square root.
class AmsgradStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{
            0, AmsgradState{zeros(layout.size()), zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AmsgradState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        ema(as.m, spec_.hp.beta1, eval.gradient);
        ema_sq(as.v, spec_.hp.beta2, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            as.v_max[i] = std::max(as.v_max[i], as.v[i]);
            values[i] -= lr * as.m[i] / (std::sqrt(as.v_max[i]) + eps);
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Rectified Adam: below the tractability threshold (rho <= 4) the update
// falls back to the bias-corrected first moment alone.
class RadamStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    // Degrees of freedom of the variance estimate at step t.
    static double rho_t(std::int64_t t, double beta2) {
        const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
        const double b2t = std::pow(beta2, static_cast<double>(t));
        return rho_inf - 2.0 * static_cast<double>(t) * b2t / (1.0 - b2t);
    }

    // Computed in log space so extreme beta2 values cannot overflow.
    static double rectification(double rho, double rho_inf) {
        const double log_r = 0.5 * (std::log(rho - 4.0) + std::log(rho - 2.0) +
                                    std::log(rho_inf) - std::log(rho_inf - 4.0) -
                                    std::log(rho_inf - 2.0) - std::log(rho));
        return std::exp(log_r);
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double beta2 = spec_.hp.beta2;
        const double bc1 = 1.0 - std::pow(spec_.hp.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
        const double rho = rho_t(t, beta2);
        ema(as.m, spec_.hp.beta1, eval.gradient);
        ema_sq(as.v, beta2, eval.gradient);
        std::vector<double> values = w.values;
        double effective = lr;
        if (rho > 4.0 && rho_inf > 4.0) {
            const double rect = rectification(rho, rho_inf);
            effective = lr * rect;
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double vhat = as.v[i] / bc2;
                if (vhat > 0.0)
                    values[i] -= effective * (as.m[i] / bc1) / std::sqrt(vhat);
            }
        } else {
            for (std::size_t i = 0; i < values.size(); ++i)
                values[i] -= lr * (as.m[i] / bc1);
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, effective,
                            grads.eval_count() - before - 1);
    }
};

// Layerwise trust ratio: each tensor's update is the unit direction
// (m_hat/sqrt(v_hat+eps) + lambda*w) scaled by phi(||w||) = clamp(||w||).
class LambStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdamState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double eps = spec_.hp.eps;
        const double lambda = spec_.hp.lambda;
        const double bc1 = 1.0 - std::pow(spec_.hp.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(spec_.hp.beta2, static_cast<double>(t));
        ema(as.m, spec_.hp.beta1, eval.gradient);
        ema_sq(as.v, spec_.hp.beta2, eval.gradient);
        std::vector<double> values = w.values;
        const ParameterLayout& layout = *w.layout;
        std::vector<double> direction(values.size(), 0.0);
        for (std::size_t tix = 0; tix < layout.tensor_count(); ++tix) {
            const std::size_t off = layout.offset(tix);
            const std::size_t len = layout.tensor_size(tix);
            double dir_sq = 0.0;
            double w_sq = 0.0;
            for (std::size_t i = off; i < off + len; ++i) {
                const double x = (as.m[i] / bc1) / std::sqrt(as.v[i] / bc2 + eps);
                direction[i] = x + lambda * w.values[i];
                dir_sq += direction[i] * direction[i];
                w_sq += w.values[i] * w.values[i];
            }
            const double dir_norm = std::sqrt(dir_sq);
            if (dir_norm == 0.0) continue;  // degenerate direction: no update
            const double phi = std::min(std::max(std::sqrt(w_sq), spec_.hp.gamma_l),
                                        spec_.hp.gamma_u);
            const double scale = lr * phi / dir_norm;
            for (std::size_t i = off; i < off + len; ++i) values[i] -= scale * direction[i];
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// The belief buffer tracks squared deviations of the gradient from its
// EMA; eps is added on every update and again outside the square root.
class AdabeliefStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, AdabeliefState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& as = std::get<AdabeliefState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double lr = spec_.hp.eta * multiplier;
        const double beta2 = spec_.hp.beta2;
        const double eps = spec_.hp.eps;
        const double bc1 = 1.0 - std::pow(spec_.hp.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        ema(as.m, spec_.hp.beta1, eval.gradient);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double dev = eval.gradient[i] - as.m[i];
            as.s[i] = beta2 * as.s[i] + (1.0 - beta2) * dev * dev + eps;
            const double shat = as.s[i] / bc2;
            values[i] -= lr * (as.m[i] / bc1) / (std::sqrt(shat) + eps);
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

}  // namespace

std::unique_ptr<Stepper> make_adam_family_stepper(const OptimizerSpec& spec) {
    switch (spec.id) {
        case OptimizerId::adam: return std::make_unique<AdamStepper>(spec);
        case OptimizerId::adamnc: return std::make_unique<AdamncStepper>(spec);
        case OptimizerId::adamax: return std::make_unique<AdamaxStepper>(spec);
        case OptimizerId::nadam: return std::make_unique<NadamStepper>(spec);
        case OptimizerId::adamw: return std::make_unique<AdamwStepper>(spec);
        case OptimizerId::amsgrad: return std::make_unique<AmsgradStepper>(spec);
        case OptimizerId::radam: return std::make_unique<RadamStepper>(spec);
        case OptimizerId::lamb: return std::make_unique<LambStepper>(spec);
        case OptimizerId::adabelief: return std::make_unique<AdabeliefStepper>(spec);
        default: return nullptr;
    }
}

}  // namespace descent::detail
