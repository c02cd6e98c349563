#include <cmath>

#include "steppers.hpp"

namespace descent::detail {
namespace {

OptimizerSpec inner_spec(const OptimizerSpec& spec) {
    OptimizerSpec inner = spec;
    inner.id = spec.inner;
    return inner;
}

// Evaluates the parent source at a fixed offset from the query point and
// optionally adds a constant term to the gradient (the decayed weights of
// the outer iterate for ASAM).
class ShiftedGradientSource final : public GradientSource {
public:
    ShiftedGradientSource(GradientSource& parent, std::vector<double> offset,
                          std::vector<double> additive = {})
        : parent_(&parent), offset_(std::move(offset)), additive_(std::move(additive)) {}

    GradientEvaluation evaluate(const ParameterSet& w) override {
        GradientEvaluation eval = parent_->evaluate(shift(w));
        if (!additive_.empty())
            for (std::size_t i = 0; i < eval.gradient.size(); ++i)
                eval.gradient[i] += additive_[i];
        return eval;
    }

    std::vector<double> hvp(const ParameterSet& w, std::span<const double> u) override {
        return parent_->hvp(shift(w), u);
    }

    std::int64_t eval_count() const override { return parent_->eval_count(); }

private:
    ParameterSet shift(const ParameterSet& w) const {
        ParameterSet shifted = w;
        for (std::size_t i = 0; i < shifted.values.size(); ++i)
            shifted.values[i] += offset_[i];
        return shifted;
    }

    GradientSource* parent_;
    std::vector<double> offset_;
    std::vector<double> additive_;
};

// Slow weights track the inner optimizer's fast weights; every k-th step
// the fast weights are pulled back onto the slow ones.
class LookaheadStepper final : public Stepper {
public:
    explicit LookaheadStepper(const OptimizerSpec& spec)
        : Stepper(spec), inner_(make_stepper(inner_spec(spec))) {}

    OptimizerState init_state(const ParameterLayout& layout) const override {
        LookaheadState st;
        st.slow = zeros(layout.size());
        st.inner = StateBox(inner_->init_state(layout));
        return OptimizerState{0, std::move(st)};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<LookaheadState>(state.data);
        const std::int64_t before = grads.eval_count();
        if (!st.slow_bound) {
            st.slow = w.values;  // slow weights start at the initial point
            st.slow_bound = true;
        }
        StepOutcome out = inner_->step(st.inner.get(), w, grads, multiplier);
        st.since_sync += 1;
        if (st.since_sync >= spec_.hp.k) {
            const double alpha = spec_.hp.alpha;
            for (std::size_t i = 0; i < st.slow.size(); ++i) {
                st.slow[i] += alpha * (out.params.values[i] - st.slow[i]);
                out.params.values[i] = st.slow[i];
            }
            st.since_sync = 0;
        }
        state.step_count += 1;
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            const double d = out.params.values[i] - w.values[i];
            norm_sq += d * d;
        }
        out.update_norm = std::sqrt(norm_sq);
        out.extra_evals = grads.eval_count() - before - 1;
        return out;
    }
};

// Evaluates the base optimizer's gradient at a perturbed point chosen to
// (approximately) maximize the local loss. SAM uses the unit gradient
// direction scaled by sigma; ASAM normalizes per coordinate by |w| and
// adds the lambda*w term to the perturbed gradient.
class SharpnessAwareStepper final : public Stepper {
public:
    explicit SharpnessAwareStepper(const OptimizerSpec& spec)
        : Stepper(spec), base_(make_stepper(inner_spec(spec))),
          adaptive_(spec.id == OptimizerId::asam) {}

    OptimizerState init_state(const ParameterLayout& layout) const override {
        SamState st;
        st.base = StateBox(base_->init_state(layout));
        return OptimizerState{0, std::move(st)};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<SamState>(state.data);
        const std::int64_t before = grads.eval_count();
        const double sigma = spec_.hp.sigma;
        if (sigma == 0.0 && !(adaptive_ && spec_.hp.lambda > 0.0)) {
            // no perturbation and no decay term: identical to the base
            StepOutcome out = base_->step(st.base.get(), w, grads, multiplier);
            state.step_count += 1;
            out.extra_evals = grads.eval_count() - before - 1;
            return out;
        }

        const GradientEvaluation at_w = grads.evaluate(w);
        const std::size_t n = w.values.size();
        std::vector<double> offset(n, 0.0);
        if (sigma > 0.0) {
            if (adaptive_) {
                // epsilon = sigma * T_w^2 g / ||T_w g||,  T_w = diag(|w|)
                double norm_sq = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double scaled = std::abs(w.values[i]) * at_w.gradient[i];
                    norm_sq += scaled * scaled;
                }
                const double norm = std::sqrt(norm_sq);
                if (norm > 0.0)
                    for (std::size_t i = 0; i < n; ++i)
                        offset[i] = sigma * w.values[i] * w.values[i] * at_w.gradient[i] / norm;
            } else {
                const double norm = l2_norm(at_w.gradient);
                if (norm > 0.0)
                    for (std::size_t i = 0; i < n; ++i)
                        offset[i] = sigma * at_w.gradient[i] / norm;
            }
        }
        std::vector<double> additive;
        if (adaptive_ && spec_.hp.lambda > 0.0) {
            additive.resize(n);
            for (std::size_t i = 0; i < n; ++i) additive[i] = spec_.hp.lambda * w.values[i];
        }
        ShiftedGradientSource shifted(grads, std::move(offset), std::move(additive));
        StepOutcome out = base_->step(st.base.get(), w, shifted, multiplier);
        state.step_count += 1;
        // report the unperturbed point in the trace
        out.loss = at_w.loss;
        out.grad_norm = l2_norm(at_w.gradient);
        out.extra_evals = grads.eval_count() - before - 1;
        return out;
    }

private:
    std::unique_ptr<Stepper> base_;
    bool adaptive_;
};

}  // namespace

std::unique_ptr<Stepper> make_wrapper_stepper(const OptimizerSpec& spec) {
    switch (spec.id) {
        case OptimizerId::lookahead: return std::make_unique<LookaheadStepper>(spec);
        case OptimizerId::sam:
        case OptimizerId::asam: return std::make_unique<SharpnessAwareStepper>(spec);
        default: return nullptr;
    }
}

}  // namespace descent::detail
